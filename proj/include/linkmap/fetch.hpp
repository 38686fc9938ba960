#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "linkmap/robots.hpp"
#include "linkmap/url.hpp"

namespace linkmap {

using Millis = std::int64_t; // milliseconds since the Unix epoch

/// Time source for politeness delays; tests substitute ManualClock.
class Clock {
public:
    virtual ~Clock() = default;
    virtual Millis now_ms() = 0;
    virtual void sleep_until_ms(Millis deadline) = 0;
};

class SystemClock final : public Clock {
public:
    Millis now_ms() override;
    void sleep_until_ms(Millis deadline) override;
};

/// Deterministic clock: sleeping advances time instantly. Every call to
/// now_ms() also advances by `tick_ms` so consecutive fetches are ordered.
class ManualClock final : public Clock {
public:
    explicit ManualClock(Millis start = 0, Millis tick_ms = 0) : now_(start), tick_(tick_ms) {}
    Millis now_ms() override;
    void sleep_until_ms(Millis deadline) override;
    void advance(Millis ms);

private:
    std::mutex mu_;
    Millis now_;
    Millis tick_;
};

/// Outcome of one HTTP request (no redirect following).
struct FetchResponse {
    int status = 0;        // HTTP status; 0 when the transport failed
    std::string error;     // transport-error tag: "connect", "timeout", "too-large", ...
    std::string location;  // Location header of a redirect
    std::string content_type;
    std::string body;

    bool ok() const noexcept { return status >= 200 && status < 300; }
    bool redirect() const noexcept { return status >= 300 && status < 400 && !location.empty(); }
    /// "200", "404", or "error:<tag>".
    std::string status_tag() const;
};

/// Performs a single GET. Implementations must be safe to call concurrently.
class Fetcher {
public:
    virtual ~Fetcher() = default;
    virtual FetchResponse fetch(const Url& url) = 0;
};

/// In-process site fixture: URL string -> canned response. Unknown URLs
/// answer 404. Records every request for assertions.
class FixtureFetcher final : public Fetcher {
public:
    void add_page(const std::string& url, std::string html, int status = 200);
    void add_redirect(const std::string& from, const std::string& to, int status = 301);
    void add_failure(const std::string& url, std::string error_tag);

    FetchResponse fetch(const Url& url) override;

    std::vector<std::string> requests() const;
    std::size_t request_count(const std::string& url) const;

private:
    mutable std::mutex mu_;
    std::map<std::string, FetchResponse> pages_;
    std::vector<std::string> requests_;
};

struct HttpFetcherOptions {
    std::string user_agent = "linkmap/0.1";
    Millis timeout_ms = 15000;
    std::size_t max_body_bytes = 5u << 20;
    /// host -> "ip:port" connection override (like curl --resolve); the Host
    /// header keeps the original name.
    std::map<std::string, std::string> resolve_overrides;
};

/// HTTP/1.1 client with TLS, backed by cpp-httplib.
class HttpFetcher final : public Fetcher {
public:
    explicit HttpFetcher(HttpFetcherOptions options);
    FetchResponse fetch(const Url& url) override;

private:
    HttpFetcherOptions options_;
};

/// One line of the fetch log.
struct FetchRecord {
    std::string url;
    std::string status;
    Millis fetched_at = 0;
    std::size_t bytes = 0;
    Millis duration_ms = 0;
};

class FetchLog {
public:
    void append(FetchRecord record);
    std::vector<FetchRecord> records() const;
    /// JSON-lines: {url, status, fetched_at, bytes, duration_ms} per fetch.
    void write_jsonl(std::ostream& out) const;

private:
    mutable std::mutex mu_;
    std::vector<FetchRecord> records_;
};

struct PolitenessOptions {
    Millis per_host_min_delay_ms = 1000;
    bool respect_robots = true;
    std::string user_agent = "linkmap/0.1";
};

/// Wraps a Fetcher with per-host serialization, a minimum delay between
/// consecutive requests to one host, robots.txt checks, and fetch logging.
class PoliteFetcher {
public:
    PoliteFetcher(Fetcher& inner, Clock& clock, PolitenessOptions options, FetchLog* log = nullptr);

    struct Result {
        FetchResponse response;
        Millis fetched_at = 0;
        bool robots_blocked = false;
    };

    Result fetch(const Url& url);

    /// Cached robots.txt verdict for the URL's origin (fetched on first use).
    bool robots_allowed(const Url& url);

    Clock& clock() noexcept { return clock_; }

private:
    struct HostState {
        std::mutex mu;
        std::optional<Millis> last_fetch;
        std::map<std::string, RobotsRules> robots; // by origin
    };

    HostState& host_state(const std::string& host);
    FetchResponse timed_fetch(HostState& host, const Url& url, Millis& fetched_at);

    Fetcher& inner_;
    Clock& clock_;
    PolitenessOptions options_;
    FetchLog* log_;
    std::mutex hosts_mu_;
    std::unordered_map<std::string, std::unique_ptr<HostState>> hosts_;
};

} // namespace linkmap
