#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "linkmap/graph.hpp"
#include "linkmap/stats.hpp"

namespace linkmap {

/// Overlap coefficient |X ∩ Y| / min(|X|, |Y|) of the two neighborhoods;
/// 0 when either is empty. Throws InvalidArgument for x == y and NotFound
/// for an unknown node.
double ssc(const HyperlinkGraph& g, const DomainKey& x, const DomainKey& y,
           NeighborhoodMode mode = NeighborhoodMode::Union);

/// Non-seed domains with edges both to and from at least one seed.
/// Throws NotFound if a seed is not in the graph.
DomainSet bidirectional_partners(const HyperlinkGraph& g, const DomainSet& seeds);

struct CandidateScore {
    DomainKey candidate;
    DomainKey seed;
    double ssc = 0;
    int rank_within_seed = 0;  // 1-based
};

struct DiscoveryOptions {
    int k = 10;
    NeighborhoodMode mode = NeighborhoodMode::Union;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct CandidateList {
    std::size_t pool_size = 0;
    int k = 0;
    NeighborhoodMode mode = NeighborhoodMode::Union;
    /// Sorted by (candidate's best ssc desc, candidate name, ssc desc, seed name).
    std::vector<CandidateScore> scores;

    /// Distinct candidates in output order.
    std::vector<DomainKey> candidates() const;
};

/// Ranks the bidirectional partners of `confirmed` against every seed and
/// keeps each seed's top k (ties by candidate name). Output does not depend
/// on the thread count. Throws InvalidArgument on an empty seed set or k < 1.
CandidateList candidate_pipeline(const HyperlinkGraph& g, const DomainSet& confirmed, const DiscoveryOptions& options = {});

/// SSC of every group member against `reference`, compared with a
/// Mann-Whitney U test (group_a as the first sample).
MwuResult ssc_separation_test(const HyperlinkGraph& g, const DomainSet& group_a, const DomainSet& group_b,
                              const DomainKey& reference, NeighborhoodMode mode = NeighborhoodMode::Union);

/// `candidate,seed,ssc,rank` rows with ssc at 17 significant digits.
void write_candidates_csv(std::ostream& out, const CandidateList& list);
CandidateList read_candidates_csv(std::istream& in, const std::string& source_name = "<candidates>");
/// `{pool_size, k, mode}`.
std::string candidates_summary_json(const CandidateList& list);

} // namespace linkmap
