#include "visnow/ingest.hpp"

#include "visnow/errors.hpp"
#include "visnow/time.hpp"

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace visnow {

using namespace std::chrono;
using nlohmann::json;

std::string_view source_dir(Source s) { return s == Source::observations ? "metar" : "taf"; }

std::optional<Source> parse_source(std::string_view name) {
    if (name == "metar" || name == "observations") return Source::observations;
    if (name == "taf" || name == "tafs") return Source::tafs;
    return std::nullopt;
}

void FetchJob::validate() const {
    if (station.empty()) throw std::invalid_argument("fetch job needs a station");
    if (end <= start) throw std::invalid_argument("fetch window is empty");
    if (batch_days < 1) throw std::invalid_argument("batch_days must be >= 1");
    if (min_interval_ms < 0) throw std::invalid_argument("min_interval_ms must be >= 0");
}

std::vector<Chunk> plan_chunks(const FetchJob& job) {
    job.validate();
    std::vector<Chunk> out;
    for (sys_days s = job.start; s < job.end; s += days{job.batch_days})
        out.push_back({s, std::min(s + days{job.batch_days}, job.end)});
    return out;
}

struct HttplibTransport::Impl {
    seconds timeout;
    std::map<std::string, std::unique_ptr<httplib::Client>> clients;
};

HttplibTransport::HttplibTransport(seconds timeout) : impl_(std::make_unique<Impl>()) { impl_->timeout = timeout; }
HttplibTransport::~HttplibTransport() = default;

std::optional<HttpResponse> HttplibTransport::get(const std::string& base_url, const std::string& target,
                                                  const std::map<std::string, std::string>& headers) {
    auto& cli = impl_->clients[base_url];
    if (!cli) {
        cli = std::make_unique<httplib::Client>(base_url);
        cli->set_connection_timeout(impl_->timeout);
        cli->set_read_timeout(impl_->timeout);
        cli->set_follow_location(true);
    }
    httplib::Headers h(headers.begin(), headers.end());
    auto res = cli->Get(target, h);
    if (!res) return std::nullopt;
    return HttpResponse{res->status, res->body};
}

namespace {

std::string expect_string(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_string()) throw DataError(where + ": missing string '" + key + "'");
    return j[key].get<std::string>();
}

SourceEndpoint endpoint_from(const json& j, const std::string& where) {
    if (!j.is_object()) throw DataError(where + " must be an object");
    SourceEndpoint e;
    e.base_url = expect_string(j, "base_url", where);
    e.target = expect_string(j, "target", where);
    if (j.contains("token_env")) e.token_env = expect_string(j, "token_env", where);
    return e;
}

void replace_all(std::string& s, std::string_view key, const std::string& value) {
    for (std::size_t p = s.find(key); p != std::string::npos; p = s.find(key, p + value.size()))
        s.replace(p, key.size(), value);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const std::filesystem::path& p, std::string_view data) {
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(data.data(), std::streamsize(data.size()));
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, p);
}

json load_manifest(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return json::object();
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw CacheCorrupt("unreadable manifest " + path.string() + ": " + e.what());
    }
}

bool retryable(int status) { return status == 429 || status >= 500; }

} // namespace

SourcesConfig SourcesConfig::load(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw DataError("cannot parse " + path.string() + ": " + e.what());
    }
    if (!j.contains("observations") || !j.contains("tafs"))
        throw DataError(path.string() + ": needs 'observations' and 'tafs' entries");
    return {endpoint_from(j["observations"], "observations"), endpoint_from(j["tafs"], "tafs")};
}

std::string expand_target(const std::string& templ, const std::string& station, const Chunk& chunk) {
    std::string s = templ;
    year_month_day a{chunk.start}, b{chunk.end};
    replace_all(s, "{station}", station);
    replace_all(s, "{start}", format_date(chunk.start));
    replace_all(s, "{end}", format_date(chunk.end));
    replace_all(s, "{y1}", std::to_string(int(a.year())));
    replace_all(s, "{m1}", std::to_string(unsigned(a.month())));
    replace_all(s, "{d1}", std::to_string(unsigned(a.day())));
    replace_all(s, "{y2}", std::to_string(int(b.year())));
    replace_all(s, "{m2}", std::to_string(unsigned(b.month())));
    replace_all(s, "{d2}", std::to_string(unsigned(b.day())));
    return s;
}

std::filesystem::path cache_path(const std::filesystem::path& cache_dir, Source source, const std::string& station) {
    return cache_dir / std::string(source_dir(source)) / station;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("SHA-256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 15];
    }
    return out;
}

void verify_cache(const std::filesystem::path& dir) {
    json m = load_manifest(dir / "manifest.json");
    if (!m.contains("chunks")) throw CacheCorrupt("no manifest in " + dir.string());
    for (const auto& c : m["chunks"]) {
        auto file = dir / c.at("file").get<std::string>();
        if (!std::filesystem::exists(file)) throw CacheCorrupt("missing chunk " + file.string());
        std::string body = read_file(file);
        if (body.size() != c.at("bytes").get<std::size_t>() || sha256_hex(body) != c.at("sha256").get<std::string>())
            throw CacheCorrupt("checksum mismatch for " + file.string());
    }
}

FetchResult fetch(const FetchJob& job, const std::filesystem::path& cache_dir, HttpTransport& transport,
                  const SourcesConfig& sources, const FetchOptions& options) {
    auto chunks = plan_chunks(job);
    auto sleep = options.sleep ? options.sleep : [](milliseconds d) { std::this_thread::sleep_for(d); };
    const SourceEndpoint& ep = sources.endpoint(job.source);
    std::map<std::string, std::string> headers;
    if (!ep.token_env.empty())
        if (const char* tok = std::getenv(ep.token_env.c_str()); tok && *tok)
            headers["Authorization"] = std::string("Bearer ") + tok;

    FetchResult res;
    res.dir = cache_path(cache_dir, job.source, job.station);
    res.chunks = chunks.size();
    std::filesystem::create_directories(res.dir);
    const auto manifest_path = res.dir / "manifest.json";
    json manifest = load_manifest(manifest_path);
    if (!manifest.contains("chunks")) manifest["chunks"] = json::object();
    json& listed = manifest["chunks"];
    if (!listed.is_object()) throw CacheCorrupt("manifest chunk list has the wrong shape");

    std::optional<steady_clock::time_point> last_request;
    const milliseconds spacing{job.min_interval_ms};

    for (const Chunk& chunk : chunks) {
        const std::string key = format_date(chunk.start);
        const std::string file = key + ".txt";
        const auto path = res.dir / file;
        if (listed.contains(key) && std::filesystem::exists(path)) {
            const json& entry = listed[key];
            std::string body = read_file(path);
            if (body.size() != entry.value("bytes", std::size_t(0)) || sha256_hex(body) != entry.value("sha256", ""))
                throw CacheCorrupt("checksum mismatch for cached chunk " + path.string());
            if (entry.value("end", "") == format_date(chunk.end)) {
                ++res.cache_hits;
                continue;
            }
        }

        const std::string target = expand_target(ep.target, job.station, chunk);
        std::optional<HttpResponse> reply;
        std::string last_problem;
        for (int attempt = 1;; ++attempt) {
            if (last_request) {
                auto due = *last_request + spacing;
                auto now = steady_clock::now();
                if (now < due) sleep(ceil<milliseconds>(due - now));
            }
            last_request = steady_clock::now();
            res.request_times.push_back(*last_request);
            ++res.requests;
            reply = transport.get(ep.base_url, target, headers);
            if (reply && reply->status >= 200 && reply->status < 300) break;
            if (reply && !retryable(reply->status))
                throw DataError("HTTP " + std::to_string(reply->status) + " for " + ep.base_url + target);
            last_problem = reply ? "HTTP " + std::to_string(reply->status) : "timeout or connection failure";
            if (attempt >= options.retry.max_attempts)
                throw ExhaustedRetries(std::to_string(attempt) + " attempts for " + ep.base_url + target +
                                       ", last: " + last_problem);
            ++res.retries;
            double delay = double(options.retry.base_delay.count()) * std::pow(options.retry.factor, attempt - 1);
            sleep(milliseconds{std::llround(delay)});
        }

        write_atomic(path, reply->body);
        listed[key] = {{"file", file},
                       {"start", key},
                       {"end", format_date(chunk.end)},
                       {"bytes", reply->body.size()},
                       {"sha256", sha256_hex(reply->body)}};
        manifest["source"] = std::string(source_dir(job.source));
        manifest["station"] = job.station;
        write_atomic(manifest_path, manifest.dump(2));
    }
    return res;
}

} // namespace visnow
