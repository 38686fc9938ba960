#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkmap/centrality.hpp"
#include "linkmap/crawler.hpp"
#include "linkmap/discovery.hpp"
#include "linkmap/graph.hpp"
#include "linkmap/labels.hpp"

namespace httplib {
class Server;
}

namespace linkmap {

struct HttpReply {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

struct ReviewServiceOptions {
    /// Seeds of the current iteration; the next plan is these plus every
    /// domain whose active label is confirmed_community.
    std::vector<DomainKey> seeds;
    std::string plans_dir;
    std::optional<HitsScores> hits;
    std::map<DomainKey, std::vector<std::string>> sample_urls;
    std::size_t max_sample_urls = 20;
    std::string static_dir;
    std::function<Timestamp()> clock;
};

/// Backs the review UI: candidate listing, per-domain context, label
/// submission with optimistic revisions, and iteration plans. The graph is
/// only read; labels go to the store.
class ReviewService {
public:
    ReviewService(const HyperlinkGraph& graph, CandidateList candidates, LabelStore& store, ReviewServiceOptions options);

    /// GET /api/candidates[?status=<label>]
    HttpReply list_candidates(const std::optional<std::string>& status) const;
    /// GET /api/domains/{d}/context
    HttpReply domain_context(std::string_view domain) const;
    /// POST /api/domains/{d}/label
    HttpReply post_label(std::string_view domain, std::string_view body);
    /// POST /api/iterations
    HttpReply new_iteration();
    /// GET /api/health
    HttpReply health() const;

    /// Registers the API routes and, when configured, static files under `/`.
    void mount(httplib::Server& server);

private:
    std::optional<DomainKey> known_domain(std::string_view text) const;

    const HyperlinkGraph& graph_;
    CandidateList candidates_;
    std::map<DomainKey, std::vector<const CandidateScore*>> scores_by_candidate_;
    std::vector<DomainKey> candidate_order_;
    LabelStore& store_;
    ReviewServiceOptions options_;
    std::mutex iteration_mu_;
    DomainSet seeds_;
};

/// Sample URLs per domain, in inventory order, capped at `per_domain`.
std::map<DomainKey, std::vector<std::string>> sample_urls_by_domain(const std::vector<UrlInventoryEntry>& inventory,
                                                                    std::size_t per_domain);

} // namespace linkmap
