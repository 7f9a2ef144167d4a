#include "visnow/errors.hpp"
#include "visnow/gbdt.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

using namespace visnow;

namespace {

FeatureMatrix noisy_standard(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    FeatureMatrix m;
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, kFeatureCount> row{};
        for (auto& v : row) v = z(rng);
        double margin = -2.5 + row[0] - 0.8 * row[1] + 0.6 * row[4] * row[5] + 0.3 * std::sin(3 * row[7]);
        int y = u(rng) < 1.0 / (1.0 + std::exp(-margin)) ? 1 : 0;
        for (auto& v : row)
            if (u(rng) < 0.05) v = kMissing;
        m.push_back(row, y);
    }
    return m;
}

// Reflected CRC-32 (polynomial 0xEDB88320), bitwise.
std::uint32_t crc32_ref(const std::uint8_t* p, std::size_t n) {
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i) {
        c ^= p[i];
        for (int k = 0; k < 8; ++k) c = (c >> 1) ^ (0xEDB88320u & (0u - (c & 1u)));
    }
    return ~c;
}

void reseal(std::vector<std::uint8_t>& bytes) {
    std::uint32_t c = crc32_ref(bytes.data(), bytes.size() - 4);
    std::memcpy(bytes.data() + bytes.size() - 4, &c, 4);
}

Model trained(std::size_t n = 2000, int trees = 20) {
    TrainConfig c;
    c.n_trees = trees;
    auto r = train(noisy_standard(n, 3), {}, c);
    r.model.metadata.station = "KJFK";
    r.model.metadata.horizon_h = 3;
    r.model.metadata.train_start = "2019-01-01T00:00Z";
    r.model.metadata.train_end = "2022-06-30T23:00Z";
    return r.model;
}

} // namespace

TEST_CASE("round trip preserves every prediction and field") {
    auto m = trained();
    test::TempDir dir;
    save_model(m, dir / "m.vngb");
    auto back = load_model(dir / "m.vngb");
    CHECK(back.metadata.station == "KJFK");
    CHECK(back.metadata.horizon_h == 3);
    CHECK(back.metadata.train_end == "2022-06-30T23:00Z");
    CHECK(back.metadata.feature_set_version == kFeatureSetVersion);
    CHECK(back.feature_names == m.feature_names);
    CHECK(back.config.n_trees == 20);
    CHECK(back.config.scale_pos_weight == m.config.scale_pos_weight);
    CHECK(back.base_score == m.base_score);
    auto test = noisy_standard(3000, 99);
    for (std::size_t i = 0; i < test.rows(); ++i)
        CHECK(predict_proba(back, test.row(i)) == predict_proba(m, test.row(i)));
    CHECK(serialize_model(back) == serialize_model(m));
}

TEST_CASE("the checksum is a standard CRC-32 of everything before it") {
    auto bytes = serialize_model(trained(500, 3));
    std::uint32_t stored;
    std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
    CHECK(stored == crc32_ref(bytes.data(), bytes.size() - 4));
    CHECK(std::memcmp(bytes.data(), "VNGB", 4) == 0);
}

TEST_CASE("truncation and damage are detected") {
    auto bytes = serialize_model(trained(500, 3));
    for (std::size_t keep : {std::size_t(0), std::size_t(3), std::size_t(12), bytes.size() / 2, bytes.size() - 1}) {
        std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + std::ptrdiff_t(keep));
        CHECK_THROWS_AS(deserialize_model(cut), CorruptModel);
    }
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        auto bad = bytes;
        bad[rng() % bad.size()] ^= std::uint8_t(1u << (rng() % 8));
        CHECK_THROWS_AS(deserialize_model(bad), CorruptModel);
    }
    test::TempDir dir;
    CHECK_THROWS_AS(load_model(dir / "absent.vngb"), CorruptModel);
    std::ofstream(dir / "short.vngb", std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()), 40);
    CHECK_THROWS_AS(load_model(dir / "short.vngb"), CorruptModel);
}

TEST_CASE("structural damage behind a valid checksum is still rejected") {
    auto bytes = serialize_model(trained(500, 3));
    // Trailing garbage before the checksum.
    auto extra = bytes;
    extra.insert(extra.end() - 4, {1, 2, 3});
    reseal(extra);
    CHECK_THROWS_AS(deserialize_model(extra), CorruptModel);
}

TEST_CASE("other format versions are refused") {
    auto bytes = serialize_model(trained(500, 3));
    std::uint32_t v = kModelFormatVersion + 1;
    std::memcpy(bytes.data() + 4, &v, 4);
    reseal(bytes);
    CHECK_THROWS_AS(deserialize_model(bytes), FormatVersionMismatch);
}

TEST_CASE("default configuration on 30k rows gives a file of a few hundred KB") {
    auto r = train(noisy_standard(30000, 5), {}, TrainConfig{});
    auto bytes = serialize_model(r.model);
    MESSAGE("model size " << bytes.size() << " bytes");
    CHECK(bytes.size() >= 200'000);
    CHECK(bytes.size() <= 1'500'000);
}
