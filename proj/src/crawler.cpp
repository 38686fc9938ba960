#include "linkmap/crawler.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <optional>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "linkmap/html.hpp"

namespace linkmap {

void CrawlConfig::validate() const {
    if (max_hops < 0) throw InvalidArgument("max_hops must be >= 0");
    if (max_pages_per_domain < 1) throw InvalidArgument("max_pages_per_domain must be >= 1");
    if (per_host_min_delay_ms < 0) throw InvalidArgument("per_host_min_delay must be >= 0");
    if (max_redirects < 0) throw InvalidArgument("max_redirects must be >= 0");
    if (max_concurrency < 1) throw InvalidArgument("max_concurrency must be >= 1");
}

HyperlinkGraph CrawlResult::graph() const {
    HyperlinkGraph g;
    if (domain.empty()) return g;
    g.add_node(domain);
    for (const auto& [dst, ts] : external_edges) g.add_edge(domain, dst, ts);
    return g;
}

namespace {

std::optional<DomainKey> try_canonicalize(const DomainCanonicalizer& canon, std::string_view url) {
    try {
        return canon.canonicalize_url(url);
    } catch (const CanonicalizeError&) {
        return std::nullopt;
    }
}

bool looks_like_html(const FetchResponse& r) {
    if (r.content_type.empty()) return true;
    std::string ct = r.content_type;
    std::transform(ct.begin(), ct.end(), ct.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ct.find("html") != std::string::npos;
}

Timestamp to_seconds(Millis ms) { return ms / 1000; }

/// Result of fetching one URL, following same-domain redirects.
struct PageOutcome {
    std::string requested;
    std::string final_url;
    std::string status;
    Millis fetched_at = 0;
    bool ok = false;
    bool robots_blocked = false;
    std::vector<std::string> fetched_chain; // every URL actually requested
    std::vector<std::string> links;
    std::optional<std::string> external_redirect;
};

/// Fetches `url`, following redirects up to the configured limit. A
/// redirect that leaves `home` ends the branch and is reported as an
/// external redirect. `claim` is consulted before following a redirect to a
/// URL the caller may already have visited.
PageOutcome fetch_page(const Url& url, const std::optional<DomainKey>& home, PoliteFetcher& fetcher,
                       const CrawlConfig& config, const DomainCanonicalizer& canon,
                       const std::function<bool(const std::string&)>& claim) {
    PageOutcome out;
    out.requested = url.str();
    Url current = url;
    for (int redirects = 0;; ++redirects) {
        auto result = fetcher.fetch(current);
        if (result.robots_blocked) {
            out.robots_blocked = true;
            out.status = "robots";
            return out;
        }
        out.fetched_chain.push_back(current.str());
        if (out.fetched_chain.size() == 1) out.fetched_at = result.fetched_at;
        const auto& response = result.response;
        if (!response.redirect()) {
            out.final_url = current.str();
            out.status = response.status_tag();
            out.ok = response.ok();
            if (out.ok && looks_like_html(response)) out.links = extract_hyperlinks(response.body, out.final_url);
            return out;
        }
        auto ref = parse_url_reference(response.location);
        if (!ref) {
            out.status = "error:bad-redirect";
            return out;
        }
        Url next = resolve_reference(current, *ref);
        next.fragment.reset();
        if (!next.is_http()) {
            out.status = "error:bad-redirect";
            return out;
        }
        auto next_domain = try_canonicalize(canon, next.str());
        if (home && next_domain != home) {
            out.status = response.status_tag();
            out.external_redirect = next.str();
            return out;
        }
        if (redirects >= config.max_redirects) {
            out.status = "error:too-many-redirects";
            return out;
        }
        if (std::find(out.fetched_chain.begin(), out.fetched_chain.end(), next.str()) != out.fetched_chain.end() ||
            (claim && !claim(next.str()))) {
            out.status = response.status_tag();
            return out;
        }
        current = std::move(next);
    }
}

/// Fetches a batch, one worker per host group so that requests to a host
/// stay serialized while distinct hosts proceed in parallel. Outcomes come
/// back in input order.
std::vector<PageOutcome> fetch_batch(const std::vector<Url>& urls, const std::vector<std::optional<DomainKey>>& homes,
                                     PoliteFetcher& fetcher, const CrawlConfig& config,
                                     const DomainCanonicalizer& canon,
                                     const std::function<bool(const std::string&)>& claim) {
    std::vector<PageOutcome> outcomes(urls.size());
    std::vector<std::vector<std::size_t>> groups;
    std::unordered_map<std::string, std::size_t> group_of_host;
    for (std::size_t i = 0; i < urls.size(); ++i) {
        auto [it, inserted] = group_of_host.try_emplace(urls[i].host, groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(i);
    }

    std::atomic<std::size_t> next_group{0};
    auto worker = [&] {
        for (std::size_t g; (g = next_group.fetch_add(1)) < groups.size();)
            for (auto i : groups[g]) outcomes[i] = fetch_page(urls[i], homes[i], fetcher, config, canon, claim);
    };
    auto threads = std::min<std::size_t>(static_cast<std::size_t>(config.max_concurrency), groups.size());
    if (threads <= 1) {
        worker();
        return outcomes;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear();
    return outcomes;
}

} // namespace

CrawlResult deep_crawl(const DomainKey& domain, PoliteFetcher& fetcher, const CrawlConfig& config) {
    config.validate();
    DomainCanonicalizer canon(config.multi_tenant_suffixes);
    CrawlResult result;
    result.domain = domain;

    std::mutex seen_mu;
    std::unordered_set<std::string> seen;
    auto claim = [&](const std::string& url) {
        std::lock_guard lock(seen_mu);
        return seen.insert(url).second;
    };
    std::unordered_set<std::string> inventoried;

    auto record_link = [&](const std::string& link, int hop, const std::string& source,
                           const std::optional<DomainKey>& key) {
        result.collected_urls.insert(link);
        if (inventoried.insert(link).second)
            result.inventory.push_back({link, key ? key->str() : std::string(), hop, source});
    };

    // Homepage probe: https first, then http.
    std::optional<PageOutcome> home;
    for (const char* scheme : {"https", "http"}) {
        auto url = parse_absolute_url(std::string(scheme) + "://" + domain.str() + "/");
        claim(url->str());
        auto outcome = fetch_page(*url, domain, fetcher, config, canon, claim);
        result.homepage_status = outcome.status;
        if (outcome.ok) {
            home = std::move(outcome);
            break;
        }
        if (outcome.robots_blocked) ++result.robots_skipped;
        if (outcome.external_redirect) {
            if (auto key = try_canonicalize(canon, *outcome.external_redirect)) {
                result.external_edges.try_emplace(*key, to_seconds(outcome.fetched_at));
                record_link(*outcome.external_redirect, 0, outcome.requested, key);
            }
        }
    }
    if (!home) {
        ++result.fetch_failures;
        return result;
    }

    std::vector<PageOutcome> level_outcomes;
    level_outcomes.push_back(std::move(*home));
    for (int hop = 0;; ++hop) {
        result.hop_reached = hop;
        std::vector<Url> next_frontier;
        for (auto& outcome : level_outcomes) {
            if (outcome.robots_blocked) {
                ++result.robots_skipped;
                continue;
            }
            for (const auto& fetched : outcome.fetched_chain) result.pages_visited.insert(fetched);
            if (!outcome.ok && !outcome.external_redirect) ++result.fetch_failures;
            const Timestamp ts = to_seconds(outcome.fetched_at);
            const std::string& source = outcome.final_url.empty() ? outcome.requested : outcome.final_url;

            PageFetch page{source, outcome.status, outcome.fetched_at, {}, {}};
            if (outcome.external_redirect) {
                auto key = try_canonicalize(canon, *outcome.external_redirect);
                if (key) {
                    auto [it, inserted] = result.external_edges.try_emplace(*key, ts);
                    if (!inserted) it->second = std::min(it->second, ts);
                }
                record_link(*outcome.external_redirect, hop, outcome.requested, key);
                page.external_links.push_back(*outcome.external_redirect);
            }
            for (const auto& link : outcome.links) {
                auto key = try_canonicalize(canon, link);
                record_link(link, hop + 1, source, key);
                if (key == domain) {
                    page.internal_links.push_back(link);
                    if (hop < config.max_hops && claim(link)) next_frontier.push_back(*parse_absolute_url(link));
                } else {
                    page.external_links.push_back(link);
                    if (key) {
                        auto [it, inserted] = result.external_edges.try_emplace(*key, ts);
                        if (!inserted) it->second = std::min(it->second, ts);
                    }
                }
            }
            result.pages.push_back(std::move(page));
        }

        auto budget = static_cast<std::size_t>(config.max_pages_per_domain);
        auto remaining = budget > result.pages_visited.size() ? budget - result.pages_visited.size() : 0;
        if (next_frontier.size() > remaining) next_frontier.resize(remaining);
        if (next_frontier.empty() || hop >= config.max_hops) break;

        std::vector<std::optional<DomainKey>> homes(next_frontier.size(), domain);
        level_outcomes = fetch_batch(next_frontier, homes, fetcher, config, canon, claim);
    }

    std::sort(result.pages.begin(), result.pages.end(),
              [](const PageFetch& a, const PageFetch& b) { return a.url < b.url; });
    return result;
}

HopExpansion hop_expand(const std::vector<std::string>& seed_pages, PoliteFetcher& fetcher, const CrawlConfig& config) {
    config.validate();
    if (seed_pages.empty()) throw InvalidArgument("hop_expand needs at least one seed page");
    DomainCanonicalizer canon(config.multi_tenant_suffixes);
    HopExpansion out;

    std::unordered_map<std::string, PageOutcome> fetched;
    std::unordered_set<std::string> inventoried;

    // Fetches every URL of `urls` that has not been fetched yet.
    auto fetch_all = [&](const std::vector<std::string>& urls) {
        std::vector<Url> batch;
        std::vector<std::optional<DomainKey>> homes;
        for (const auto& u : urls) {
            if (fetched.contains(u)) continue;
            auto parsed = parse_absolute_url(u);
            auto key = try_canonicalize(canon, u);
            if (!parsed || !parsed->is_http()) {
                PageOutcome bad;
                bad.requested = u;
                bad.status = "error:invalid-url";
                fetched.emplace(u, std::move(bad));
                continue;
            }
            fetched.emplace(u, PageOutcome{});
            batch.push_back(std::move(*parsed));
            homes.push_back(key);
        }
        auto outcomes = fetch_batch(batch, homes, fetcher, config, canon, {});
        for (std::size_t i = 0; i < batch.size(); ++i) fetched[batch[i].str()] = std::move(outcomes[i]);
    };

    // Collects the links of `pages` into `links`, recording edges.
    auto harvest = [&](const std::vector<std::string>& pages, int hop, std::set<std::string>& links,
                       std::vector<std::string>& ordered) {
        for (const auto& page : pages) {
            const auto& outcome = fetched.at(page);
            if (!outcome.ok) out.failures[page] = outcome.status;
            auto src = try_canonicalize(canon, outcome.final_url.empty() ? page : outcome.final_url);
            if (src) out.graph.add_node(*src);
            const Timestamp ts = to_seconds(outcome.fetched_at);
            if (outcome.external_redirect && src) {
                if (auto dst = try_canonicalize(canon, *outcome.external_redirect)) out.graph.add_edge(*src, *dst, ts);
            }
            for (const auto& link : outcome.links) {
                auto dst = try_canonicalize(canon, link);
                if (links.insert(link).second) ordered.push_back(link);
                if (inventoried.insert(link).second)
                    out.inventory.push_back({link, dst ? dst->str() : std::string(), hop, page});
                if (src && dst) out.graph.add_edge(*src, *dst, ts);
            }
        }
    };

    std::vector<std::string> seeds;
    for (const auto& s : seed_pages) {
        auto parsed = parse_absolute_url(s);
        std::string normalized = parsed ? parsed->str() : s;
        if (std::find(seeds.begin(), seeds.end(), normalized) == seeds.end()) seeds.push_back(normalized);
    }
    fetch_all(seeds);
    std::vector<std::string> hop1_ordered;
    harvest(seeds, 1, out.hop1_links, hop1_ordered);

    fetch_all(hop1_ordered);
    std::vector<std::string> hop2_ordered;
    harvest(hop1_ordered, 2, out.hop2_links, hop2_ordered);
    return out;
}

void write_inventory_jsonl(std::ostream& out, const std::vector<UrlInventoryEntry>& inventory) {
    for (const auto& e : inventory) {
        nlohmann::ordered_json j;
        j["url"] = e.url;
        j["domain"] = e.domain;
        j["hop"] = e.hop;
        j["source"] = e.source;
        out << j.dump() << '\n';
    }
}

std::vector<UrlInventoryEntry> read_inventory_jsonl(std::istream& in, const std::string& source_name) {
    std::vector<UrlInventoryEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            out.push_back({j.at("url").get<std::string>(), j.at("domain").get<std::string>(), j.at("hop").get<int>(),
                           j.at("source").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(source_name, lineno, e.what());
        }
    }
    return out;
}

} // namespace linkmap
