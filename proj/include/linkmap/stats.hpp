#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linkmap/graph.hpp"

namespace linkmap {

enum class MwuMethod { Exact, NormalApprox };

std::string to_string(MwuMethod method);

struct MwuResult {
    double u_a = 0;  // pairs where a wins, ties counted 1/2
    double u_b = 0;  // n*m - u_a
    double p_two_sided = 1;
    MwuMethod method = MwuMethod::Exact;
};

/// Largest n*m for which the exact permutation distribution is used.
inline constexpr std::size_t kMwuExactLimit = 400;

/// Two-sided Mann-Whitney U test of a against b.
///
/// For n*m <= kMwuExactLimit the p-value is the exact permutation probability
/// over all C(n+m, n) assignments of the pooled values (ties keep their
/// midranks, so tied data is handled exactly too). Larger samples use the
/// normal approximation with tie-corrected variance and a 0.5 continuity
/// correction. Throws InvalidArgument on an empty sample.
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Product-moment correlation. Throws InvalidArgument on length mismatch,
/// fewer than two points, or a constant series.
double pearson(std::span<const double> x, std::span<const double> y);

enum class CountDirection {
    GroupToTargets,  // edges d -> t
    TargetsToGroup,  // edges t -> d
};

struct ConnectionCounts {
    std::map<DomainKey, std::size_t> per_domain;
    double mean = 0;  // 0 for an empty group
};

/// Distinct targets each group member links to (or is linked from).
/// Every member of group and targets must be a node; NotFound otherwise.
ConnectionCounts connection_count_summary(const HyperlinkGraph& g, const DomainSet& group, const DomainSet& targets,
                                          CountDirection direction = CountDirection::GroupToTargets);

using Date = std::chrono::year_month_day;

std::string format_date(Date d);
/// Parses YYYY-MM-DD; nullopt when malformed or not a calendar date.
std::optional<Date> parse_date(std::string_view text);

struct RankSnapshot {
    Date date;
    std::map<DomainKey, int> ranks;
};

/// Reads `ranks-YYYY-MM-DD.csv` (lines `rank,domain`, optional header). Hosts
/// are canonicalized; when several map to one key the best rank is kept.
/// Throws ParseError on a bad filename, malformed line or repeated rank.
RankSnapshot load_rank_snapshot(const std::string& path,
                                const MultiTenantSuffixes& multi_tenant_suffixes = default_multi_tenant_suffixes());
/// Every ranks-*.csv in dir, sorted by date.
std::vector<RankSnapshot> load_rank_snapshots(const std::string& dir,
                                              const MultiTenantSuffixes& multi_tenant_suffixes = default_multi_tenant_suffixes());

struct DatedCount {
    Date date;
    std::size_t count = 0;
};

/// Community members ranked at or above `threshold` in each snapshot.
/// Throws InvalidArgument if snapshots are unsorted or share a date.
std::vector<DatedCount> popularity_series(const std::vector<RankSnapshot>& snapshots, const DomainSet& community,
                                          int threshold);

struct DatedMedian {
    Date date;
    double median = 0;
};

struct MedianRankSeries {
    std::vector<DatedMedian> points;
    std::vector<Date> skipped;  // no community member present
};

/// Median rank of the community members present in each snapshot; even
/// counts average the two middle ranks.
MedianRankSeries median_rank_series(const std::vector<RankSnapshot>& snapshots, const DomainSet& community);

} // namespace linkmap
