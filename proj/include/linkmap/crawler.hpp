#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "linkmap/domain.hpp"
#include "linkmap/fetch.hpp"
#include "linkmap/graph.hpp"

namespace linkmap {

struct CrawlConfig {
    int max_hops = 15;
    int max_pages_per_domain = 10000;
    Millis per_host_min_delay_ms = 1000;
    Millis fetch_timeout_ms = 15000;
    std::size_t max_body_bytes = 5u << 20;
    std::string user_agent = "linkmap/0.1 (+research crawler)";
    bool respect_robots = true;
    int max_redirects = 5;
    /// Hosts fetched concurrently within one hop level.
    int max_concurrency = 8;
    MultiTenantSuffixes multi_tenant_suffixes = default_multi_tenant_suffixes();

    /// Throws InvalidArgument when an invariant does not hold.
    void validate() const;
};

/// One fetched page and the links found on it, split by whether the link
/// stays on the page's own domain.
struct PageFetch {
    std::string url;
    std::string status; // HTTP status or "error:<tag>" / "robots"
    Millis fetched_at = 0;
    std::vector<std::string> internal_links;
    std::vector<std::string> external_links;
};

/// Where a collected URL was first seen.
struct UrlInventoryEntry {
    std::string url;
    std::string domain; // empty when the URL has no canonical domain
    int hop = 0;
    std::string source;
};

struct CrawlResult {
    DomainKey domain;
    std::set<std::string> pages_visited;
    std::set<std::string> collected_urls;
    /// External edge target -> earliest fetch time (UTC seconds) it was seen.
    std::map<DomainKey, Timestamp> external_edges;
    int hop_reached = 0;
    std::string homepage_status;
    std::size_t robots_skipped = 0;
    std::size_t fetch_failures = 0;
    std::vector<PageFetch> pages;
    std::vector<UrlInventoryEntry> inventory;

    /// Graph with `domain` and one edge per external target.
    HyperlinkGraph graph() const;
};

/// Level-synchronous breadth-first crawl of one domain's internal pages
/// starting at its homepage (https first, then http). Level 0 is the
/// homepage; pages up to `max_hops` links away are fetched. External links
/// become collected URLs and domain edges; off-domain URLs are never fetched.
CrawlResult deep_crawl(const DomainKey& domain, PoliteFetcher& fetcher, const CrawlConfig& config);

struct HopExpansion {
    std::set<std::string> hop1_links;
    std::set<std::string> hop2_links;
    HyperlinkGraph graph;
    std::map<std::string, std::string> failures; // url -> status tag
    std::vector<UrlInventoryEntry> inventory;
};

/// Fetches every seed page, collects its hyperlinks (hop 1), fetches each
/// hop-1 URL once and collects theirs (hop 2). Every observed cross-domain
/// hyperlink becomes a graph edge. Fetch failures are recorded per URL.
HopExpansion hop_expand(const std::vector<std::string>& seed_pages, PoliteFetcher& fetcher, const CrawlConfig& config);

/// JSON-lines `{url, domain, hop, source}` per entry.
void write_inventory_jsonl(std::ostream& out, const std::vector<UrlInventoryEntry>& inventory);
std::vector<UrlInventoryEntry> read_inventory_jsonl(std::istream& in, const std::string& source_name = "<inventory>");

} // namespace linkmap
