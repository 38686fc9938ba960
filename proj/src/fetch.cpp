#include "linkmap/fetch.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace linkmap {

Millis SystemClock::now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep_until_ms(Millis deadline) {
    auto remaining = deadline - now_ms();
    if (remaining > 0) std::this_thread::sleep_for(std::chrono::milliseconds(remaining));
}

Millis ManualClock::now_ms() {
    std::lock_guard lock(mu_);
    auto t = now_;
    now_ += tick_;
    return t;
}

void ManualClock::sleep_until_ms(Millis deadline) {
    std::lock_guard lock(mu_);
    now_ = std::max(now_, deadline);
}

void ManualClock::advance(Millis ms) {
    std::lock_guard lock(mu_);
    now_ += ms;
}

std::string FetchResponse::status_tag() const {
    if (status == 0) return "error:" + (error.empty() ? std::string("unknown") : error);
    return std::to_string(status);
}

void FixtureFetcher::add_page(const std::string& url, std::string html, int status) {
    FetchResponse r;
    r.status = status;
    r.content_type = "text/html";
    r.body = std::move(html);
    std::lock_guard lock(mu_);
    pages_[parse_absolute_url(url).value().str()] = std::move(r);
}

void FixtureFetcher::add_redirect(const std::string& from, const std::string& to, int status) {
    FetchResponse r;
    r.status = status;
    r.location = to;
    std::lock_guard lock(mu_);
    pages_[parse_absolute_url(from).value().str()] = std::move(r);
}

void FixtureFetcher::add_failure(const std::string& url, std::string error_tag) {
    FetchResponse r;
    r.error = std::move(error_tag);
    std::lock_guard lock(mu_);
    pages_[parse_absolute_url(url).value().str()] = std::move(r);
}

FetchResponse FixtureFetcher::fetch(const Url& url) {
    Url key = url;
    key.fragment.reset();
    std::lock_guard lock(mu_);
    requests_.push_back(key.str());
    auto it = pages_.find(key.str());
    if (it != pages_.end()) return it->second;
    FetchResponse missing;
    missing.status = 404;
    return missing;
}

std::vector<std::string> FixtureFetcher::requests() const {
    std::lock_guard lock(mu_);
    return requests_;
}

std::size_t FixtureFetcher::request_count(const std::string& url) const {
    std::lock_guard lock(mu_);
    return static_cast<std::size_t>(std::count(requests_.begin(), requests_.end(), url));
}

HttpFetcher::HttpFetcher(HttpFetcherOptions options) : options_(std::move(options)) {}

namespace {

std::string transport_error_tag(httplib::Error err) {
    switch (err) {
    case httplib::Error::Connection: return "connect";
    case httplib::Error::ConnectionTimeout: return "timeout";
    case httplib::Error::Read: return "read";
    case httplib::Error::Write: return "write";
    case httplib::Error::SSLConnection: return "tls";
    case httplib::Error::SSLServerVerification: return "tls-verify";
    case httplib::Error::Canceled: return "too-large";
    default: return "transport";
    }
}

} // namespace

FetchResponse HttpFetcher::fetch(const Url& url) {
    FetchResponse out;
    std::string connect_to = url.origin();
    auto override_it = options_.resolve_overrides.find(url.host);
    if (override_it != options_.resolve_overrides.end()) connect_to = url.scheme + "://" + override_it->second;

    httplib::Client client(connect_to);
    auto timeout = std::chrono::milliseconds(options_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    client.set_follow_location(false);

    httplib::Headers headers{{"User-Agent", options_.user_agent}, {"Accept", "text/html,*/*;q=0.5"}};
    std::string host_header = url.host + (url.port.empty() ? "" : ":" + url.port);
    headers.emplace("Host", host_header);

    std::string body;
    bool too_large = false;
    auto result = client.Get(
        url.request_target(), headers,
        [&](const httplib::Response&) { return true; },
        [&](const char* data, std::size_t len) {
            if (body.size() + len > options_.max_body_bytes) {
                too_large = true;
                return false;
            }
            body.append(data, len);
            return true;
        });
    if (!result) {
        out.error = too_large ? "too-large" : transport_error_tag(result.error());
        return out;
    }
    out.status = result->status;
    out.location = result->get_header_value("Location");
    out.content_type = result->get_header_value("Content-Type");
    out.body = std::move(body);
    return out;
}

void FetchLog::append(FetchRecord record) {
    std::lock_guard lock(mu_);
    records_.push_back(std::move(record));
}

std::vector<FetchRecord> FetchLog::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

void FetchLog::write_jsonl(std::ostream& out) const {
    for (const auto& r : records()) {
        nlohmann::ordered_json j;
        j["url"] = r.url;
        j["status"] = r.status;
        j["fetched_at"] = r.fetched_at;
        j["bytes"] = r.bytes;
        j["duration_ms"] = r.duration_ms;
        out << j.dump() << '\n';
    }
}

PoliteFetcher::PoliteFetcher(Fetcher& inner, Clock& clock, PolitenessOptions options, FetchLog* log)
    : inner_(inner), clock_(clock), options_(std::move(options)), log_(log) {}

PoliteFetcher::HostState& PoliteFetcher::host_state(const std::string& host) {
    std::lock_guard lock(hosts_mu_);
    auto& slot = hosts_[host];
    if (!slot) slot = std::make_unique<HostState>();
    return *slot;
}

FetchResponse PoliteFetcher::timed_fetch(HostState& host, const Url& url, Millis& fetched_at) {
    Millis delay = options_.per_host_min_delay_ms;
    for (const auto& [origin, rules] : host.robots) delay = std::max(delay, rules.crawl_delay_ms());
    if (host.last_fetch) clock_.sleep_until_ms(*host.last_fetch + delay);
    fetched_at = clock_.now_ms();
    auto response = inner_.fetch(url);
    auto finished = clock_.now_ms();
    host.last_fetch = std::max(fetched_at, finished);
    if (log_)
        log_->append({url.str(), response.status_tag(), fetched_at, response.body.size(), finished - fetched_at});
    return response;
}

bool PoliteFetcher::robots_allowed(const Url& url) {
    if (!options_.respect_robots) return true;
    auto& host = host_state(url.host);
    std::lock_guard lock(host.mu);
    auto origin = url.origin();
    auto it = host.robots.find(origin);
    if (it == host.robots.end()) {
        Url robots_url = url;
        robots_url.path = "/robots.txt";
        robots_url.query.reset();
        robots_url.fragment.reset();
        Millis at = 0;
        auto response = timed_fetch(host, robots_url, at);
        RobotsRules rules;
        if (response.ok())
            rules = RobotsRules::parse(response.body, options_.user_agent);
        else if (response.status != 0)
            rules = RobotsRules::for_status(response.status);
        it = host.robots.emplace(origin, std::move(rules)).first;
    }
    return it->second.allowed(url.request_target());
}

PoliteFetcher::Result PoliteFetcher::fetch(const Url& url) {
    Result result;
    if (!robots_allowed(url)) {
        result.robots_blocked = true;
        return result;
    }
    auto& host = host_state(url.host);
    std::lock_guard lock(host.mu);
    result.response = timed_fetch(host, url, result.fetched_at);
    return result;
}

} // namespace linkmap
