#pragma once

// Paced, retrying archive downloads with an on-disk cache.
//
// Layout: <cache>/<source>/<station>/<chunk-start>.txt plus manifest.json in
// the station directory listing every chunk with its byte count and SHA-256.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace visnow {

enum class Source { observations, tafs };

/// Directory name used in the cache ("metar", "taf").
std::string_view source_dir(Source s);
/// Accepts "metar"/"observations" and "taf"/"tafs".
std::optional<Source> parse_source(std::string_view name);

struct FetchJob {
    std::string station;
    /// Half-open day range [start, end).
    std::chrono::sys_days start{};
    std::chrono::sys_days end{};
    Source source = Source::observations;
    int batch_days = 30;
    int min_interval_ms = 1000;

    /// Throws std::invalid_argument.
    void validate() const;
    long window_days() const { return (end - start).count(); }
};

struct Chunk {
    std::chrono::sys_days start{};
    std::chrono::sys_days end{};
};

/// ceil(window_days / batch_days) consecutive chunks; the last may be short.
std::vector<Chunk> plan_chunks(const FetchJob& job);

struct HttpResponse {
    int status = 0;
    std::string body;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    /// nullopt on connection failure or timeout.
    virtual std::optional<HttpResponse> get(const std::string& base_url, const std::string& target,
                                            const std::map<std::string, std::string>& headers) = 0;
};

/// cpp-httplib client; one connection per base URL, reused.
class HttplibTransport : public HttpTransport {
public:
    explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds{30});
    ~HttplibTransport() override;
    std::optional<HttpResponse> get(const std::string& base_url, const std::string& target,
                                    const std::map<std::string, std::string>& headers) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Endpoint for one source. `target` may contain {station}, {start}, {end}
/// (YYYY-MM-DD) and {y1} {m1} {d1} {y2} {m2} {d2}.
struct SourceEndpoint {
    std::string base_url;
    std::string target;
    /// Environment variable holding a bearer token, if the provider needs one.
    std::string token_env;
};

struct SourcesConfig {
    SourceEndpoint observations;
    SourceEndpoint tafs;

    const SourceEndpoint& endpoint(Source s) const { return s == Source::observations ? observations : tafs; }
    /// Throws DataError on malformed files.
    static SourcesConfig load(const std::filesystem::path& path);
};

std::string expand_target(const std::string& templ, const std::string& station, const Chunk& chunk);

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;
};

struct FetchOptions {
    RetryPolicy retry;
    /// Replaceable for tests; defaults to std::this_thread::sleep_for.
    std::function<void(std::chrono::milliseconds)> sleep;
};

struct FetchResult {
    std::filesystem::path dir;
    std::size_t chunks = 0;
    std::size_t cache_hits = 0;
    std::size_t requests = 0;
    std::size_t retries = 0;
    std::vector<std::chrono::steady_clock::time_point> request_times;
};

/// Downloads every chunk not already cached. Throws ExhaustedRetries,
/// CacheCorrupt, and DataError for non-retryable HTTP errors.
FetchResult fetch(const FetchJob& job, const std::filesystem::path& cache_dir, HttpTransport& transport,
                  const SourcesConfig& sources, const FetchOptions& options = {});

std::filesystem::path cache_path(const std::filesystem::path& cache_dir, Source source, const std::string& station);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Re-hashes every chunk listed in the manifest. Throws CacheCorrupt.
void verify_cache(const std::filesystem::path& station_dir);

} // namespace visnow
