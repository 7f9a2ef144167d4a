#pragma once

// In-process HTTP archive for ingest tests. Serves /metar and /taf with
// deterministic bodies per (station, start, end) and can inject faults.

#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace visnow::test {

enum class Fault { rate_limited, server_error, timeout, not_found };

struct MockRequest {
    std::string path;
    std::string station, start, end;
    std::string authorization;
    std::chrono::steady_clock::time_point at;
};

class MockArchive {
public:
    /// `stall` is how long a timeout fault holds the connection.
    explicit MockArchive(std::chrono::milliseconds stall = std::chrono::milliseconds{2500});
    ~MockArchive();
    MockArchive(const MockArchive&) = delete;
    MockArchive& operator=(const MockArchive&) = delete;

    std::string base_url() const;
    /// Faults returned, in order, to the next requests for the chunk starting
    /// at `start` (YYYY-MM-DD).
    void inject(const std::string& start, std::vector<Fault> faults);
    std::vector<MockRequest> requests() const;
    void clear_requests();

    static std::string metar_body(const std::string& station, const std::string& start, const std::string& end);
    static std::string taf_body(const std::string& station, const std::string& start, const std::string& end);

    /// sources.json text pointing at this server.
    std::string sources_json() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace visnow::test
