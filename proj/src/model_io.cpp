#include "visnow/errors.hpp"
#include "visnow/gbdt.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <stdexcept>

namespace visnow {

namespace {

constexpr char kMagic[4] = {'V', 'N', 'G', 'B'};
constexpr std::uint8_t kLeafTag = 0;
constexpr std::uint8_t kSplitTag = 1;

static_assert(std::endian::native == std::endian::little, "model I/O assumes a little-endian host");

class Writer {
public:
    template <class T> void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
        out.insert(out.end(), p, p + sizeof(T));
    }
    void str(const std::string& s) {
        put<std::uint32_t>(std::uint32_t(s.size()));
        out.insert(out.end(), s.begin(), s.end());
    }
    std::vector<std::uint8_t> out;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes(b) {}
    template <class T> T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, bytes.data() + off, sizeof(T));
        off += sizeof(T);
        return v;
    }
    std::string str() {
        auto n = get<std::uint32_t>();
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes.data() + off), n);
        off += n;
        return s;
    }
    bool done() const { return off == bytes.size(); }

private:
    void need(std::size_t n) const {
        if (bytes.size() - off < n) throw CorruptModel("unexpected end of model data");
    }
    std::span<const std::uint8_t> bytes;
    std::size_t off = 0;
};

std::uint32_t crc(std::span<const std::uint8_t> bytes) {
    uLong c = crc32(0L, Z_NULL, 0);
    std::size_t off = 0;
    while (off < bytes.size()) {
        uInt chunk = uInt(std::min<std::size_t>(bytes.size() - off, 1u << 30));
        c = crc32(c, bytes.data() + off, chunk);
        off += chunk;
    }
    return std::uint32_t(c);
}

void write_tree(Writer& w, const Tree& t) {
    w.put<std::uint32_t>(std::uint32_t(t.nodes.size()));
    for (const TreeNode& n : t.nodes) {
        if (n.is_leaf()) {
            w.put(kLeafTag);
            w.put(n.value);
        } else {
            w.put(kSplitTag);
            w.put(n.feature);
            w.put<std::uint8_t>(n.default_left ? 1 : 0);
            w.put(n.threshold);
            w.put(n.gain);
        }
        w.put(n.hess);
        w.put(n.count);
    }
}

Tree read_tree(Reader& r, std::size_t n_features, int max_depth) {
    Tree t;
    auto count = r.get<std::uint32_t>();
    t.nodes.resize(count);
    std::size_t next = 0;
    // Preorder decode; `depth` guards against cyclic or runaway input.
    std::function<std::int32_t(int)> node = [&](int depth) -> std::int32_t {
        if (next >= count || depth > max_depth) throw CorruptModel("malformed tree structure");
        std::size_t idx = next++;
        TreeNode n;
        auto tag = r.get<std::uint8_t>();
        if (tag == kLeafTag) {
            n.value = r.get<double>();
        } else if (tag == kSplitTag) {
            n.feature = r.get<std::uint16_t>();
            if (n.feature >= n_features) throw CorruptModel("split feature index out of range");
            n.default_left = r.get<std::uint8_t>() != 0;
            n.threshold = r.get<double>();
            n.gain = r.get<double>();
        } else {
            throw CorruptModel("unknown node tag");
        }
        n.hess = r.get<double>();
        n.count = r.get<std::uint64_t>();
        t.nodes[idx] = n;
        if (tag == kSplitTag) {
            std::int32_t l = node(depth + 1);
            std::int32_t rr = node(depth + 1);
            t.nodes[idx].left = l;
            t.nodes[idx].right = rr;
        }
        return std::int32_t(idx);
    };
    if (count == 0) throw CorruptModel("empty tree");
    node(0);
    if (next != count) throw CorruptModel("tree node count mismatch");
    return t;
}

} // namespace

std::vector<std::uint8_t> serialize_model(const Model& m) {
    Writer w;
    for (char c : kMagic) w.put(c);
    w.put<std::uint32_t>(kModelFormatVersion);
    w.put<std::uint32_t>(m.metadata.feature_set_version);
    w.str(m.metadata.station);
    w.put<std::int32_t>(m.metadata.horizon_h);
    w.str(m.metadata.train_start);
    w.str(m.metadata.train_end);
    const TrainConfig& c = m.config;
    w.put<std::int32_t>(c.n_trees);
    w.put<std::int32_t>(c.max_depth);
    w.put(c.learning_rate);
    w.put(c.min_child_weight);
    w.put(c.l2_lambda);
    w.put(c.gamma);
    w.put(c.scale_pos_weight.value_or(0.0));
    w.put<std::uint64_t>(c.seed);
    w.put(m.base_score);
    w.put<std::uint32_t>(std::uint32_t(m.feature_names.size()));
    for (const auto& name : m.feature_names) w.str(name);
    w.put<std::uint32_t>(std::uint32_t(m.trees.size()));
    for (const Tree& t : m.trees) write_tree(w, t);
    w.put<std::uint32_t>(crc(w.out));
    return std::move(w.out);
}

Model deserialize_model(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw CorruptModel("not a model file");
    auto body = bytes.first(bytes.size() - 4);
    std::uint32_t stored;
    std::memcpy(&stored, bytes.data() + body.size(), 4);
    if (crc(body) != stored) throw CorruptModel("checksum mismatch (truncated or damaged file)");

    Reader r(body);
    for (int i = 0; i < 4; ++i) r.get<char>();
    auto version = r.get<std::uint32_t>();
    if (version != kModelFormatVersion)
        throw FormatVersionMismatch("file format version " + std::to_string(version) + ", expected " +
                                    std::to_string(kModelFormatVersion));
    Model m;
    m.metadata.feature_set_version = r.get<std::uint32_t>();
    m.metadata.station = r.str();
    m.metadata.horizon_h = r.get<std::int32_t>();
    m.metadata.train_start = r.str();
    m.metadata.train_end = r.str();
    TrainConfig& c = m.config;
    c.n_trees = r.get<std::int32_t>();
    c.max_depth = r.get<std::int32_t>();
    c.learning_rate = r.get<double>();
    c.min_child_weight = r.get<double>();
    c.l2_lambda = r.get<double>();
    c.gamma = r.get<double>();
    double spw = r.get<double>();
    if (spw > 0) c.scale_pos_weight = spw;
    c.seed = r.get<std::uint64_t>();
    m.base_score = r.get<double>();
    auto nf = r.get<std::uint32_t>();
    if (nf == 0 || nf > std::numeric_limits<std::uint16_t>::max()) throw CorruptModel("bad feature count");
    for (std::uint32_t i = 0; i < nf; ++i) m.feature_names.push_back(r.str());
    auto nt = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < nt; ++i) m.trees.push_back(read_tree(r, nf, std::max(c.max_depth, 0)));
    if (!r.done()) throw CorruptModel("trailing bytes after tree section");
    return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
    auto bytes = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write model file " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw std::runtime_error("failed writing model file " + path.string());
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorruptModel("cannot open model file " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

} // namespace visnow
