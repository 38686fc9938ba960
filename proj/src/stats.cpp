#include "linkmap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "linkmap/error.hpp"
#include "linkmap/io.hpp"

namespace linkmap {

std::string to_string(MwuMethod method) { return method == MwuMethod::Exact ? "exact" : "normal-approx"; }

namespace {

struct PooledRanks {
    std::vector<long long> doubled_rank;  // 2 * midrank, index-aligned with a ++ b
    double tie_term = 0;                  // sum of t^3 - t over tie blocks
};

PooledRanks pooled_ranks(std::span<const double> a, std::span<const double> b) {
    std::vector<double> values(a.begin(), a.end());
    values.insert(values.end(), b.begin(), b.end());
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });

    PooledRanks out;
    out.doubled_rank.resize(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        // positions i..j-1 hold ranks i+1..j; their mean doubled is i+1+j
        for (std::size_t t = i; t < j; ++t) out.doubled_rank[order[t]] = static_cast<long long>(i + 1 + j);
        double t = static_cast<double>(j - i);
        out.tie_term += t * t * t - t;
        i = j;
    }
    return out;
}

// Exact two-sided permutation p-value. Counts the size-k subsets of the
// pooled doubled ranks whose U lies at least as far from k*m/2 as observed.
double exact_p(const std::vector<long long>& doubled_rank, std::size_t k, long long observed_sum) {
    const std::size_t total = doubled_rank.size();
    const long long m = static_cast<long long>(total - k);
    const long long kk = static_cast<long long>(k);
    long long max_sum = 0;
    for (auto r : doubled_rank) max_sum += r;

    std::vector<std::vector<double>> ways(k + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1;
    long long reach = 0;
    for (std::size_t i = 0; i < total; ++i) {
        const long long r = doubled_rank[i];
        reach += r;
        for (std::size_t c = std::min(k, i + 1); c >= 1; --c) {
            auto& dst = ways[c];
            const auto& src = ways[c - 1];
            for (long long s = reach; s >= r; --s) dst[static_cast<std::size_t>(s)] += src[static_cast<std::size_t>(s - r)];
        }
    }

    auto deviation = [&](long long sum) { return std::llabs(sum - kk * (kk + 1) - kk * m); };
    const long long observed = deviation(observed_sum);
    double extreme = 0, all = 0;
    for (long long s = 0; s <= max_sum; ++s) {
        double w = ways[k][static_cast<std::size_t>(s)];
        if (w == 0) continue;
        all += w;
        if (deviation(s) >= observed) extreme += w;
    }
    return std::min(1.0, extreme / all);
}

double normal_p(double u, double n, double m, double tie_term) {
    const double total = n + m;
    const double variance = n * m / 12.0 * ((total + 1) - tie_term / (total * (total - 1)));
    if (!(variance > 0)) return 1.0;
    const double z = std::max(0.0, std::fabs(u - n * m / 2.0) - 0.5) / std::sqrt(variance);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

} // namespace

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("mann_whitney_u: empty sample");
    for (auto v : a)
        if (std::isnan(v)) throw InvalidArgument("mann_whitney_u: NaN in sample");
    for (auto v : b)
        if (std::isnan(v)) throw InvalidArgument("mann_whitney_u: NaN in sample");

    const auto n = a.size(), m = b.size();
    const auto ranks = pooled_ranks(a, b);
    long long sum_a = 0;
    for (std::size_t i = 0; i < n; ++i) sum_a += ranks.doubled_rank[i];
    const long long nn = static_cast<long long>(n);

    MwuResult r;
    r.u_a = static_cast<double>(sum_a - nn * (nn + 1)) / 2.0;
    r.u_b = static_cast<double>(n * m) - r.u_a;

    if (n * m <= kMwuExactLimit) {
        r.method = MwuMethod::Exact;
        if (n <= m) {
            r.p_two_sided = exact_p(ranks.doubled_rank, n, sum_a);
        } else {
            // enumerate the smaller group: put b first so its ranks sit in the first m slots
            std::vector<long long> swapped(ranks.doubled_rank.begin() + static_cast<std::ptrdiff_t>(n),
                                           ranks.doubled_rank.end());
            swapped.insert(swapped.end(), ranks.doubled_rank.begin(),
                           ranks.doubled_rank.begin() + static_cast<std::ptrdiff_t>(n));
            long long sum_b = 0;
            for (std::size_t i = 0; i < m; ++i) sum_b += swapped[i];
            r.p_two_sided = exact_p(swapped, m, sum_b);
        }
    } else {
        r.method = MwuMethod::NormalApprox;
        r.p_two_sided = normal_p(r.u_a, static_cast<double>(n), static_cast<double>(m), ranks.tie_term);
    }
    return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidArgument("pearson: length mismatch");
    if (x.size() < 2) throw InvalidArgument("pearson: need at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0) throw InvalidArgument("pearson: constant-series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

ConnectionCounts connection_count_summary(const HyperlinkGraph& g, const DomainSet& group, const DomainSet& targets,
                                          CountDirection direction) {
    for (const auto& t : targets)
        if (!g.contains(t)) throw NotFound("not-in-graph: " + t.str());
    ConnectionCounts out;
    for (const auto& d : group) {
        const auto& adjacent = direction == CountDirection::GroupToTargets ? g.out_neighbors(d) : g.in_neighbors(d);
        std::size_t count = 0;
        for (const auto& t : adjacent) count += targets.contains(t);
        out.per_domain[d] = count;
        out.mean += static_cast<double>(count);
    }
    if (!group.empty()) out.mean /= static_cast<double>(group.size());
    return out;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned mo = 0, d = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        if (i == 4 || i == 7) continue;
        if (text[i] < '0' || text[i] > '9') return std::nullopt;
        unsigned digit = static_cast<unsigned>(text[i] - '0');
        if (i < 4) y = y * 10 + static_cast<int>(digit);
        else if (i < 7) mo = mo * 10 + digit;
        else d = d * 10 + digit;
    }
    Date date{std::chrono::year(y), std::chrono::month(mo), std::chrono::day(d)};
    if (!date.ok()) return std::nullopt;
    return date;
}

RankSnapshot load_rank_snapshot(const std::string& path, const MultiTenantSuffixes& multi_tenant_suffixes) {
    const std::string name = std::filesystem::path(path).filename().string();
    const std::string prefix = "ranks-", suffix = ".csv";
    std::optional<Date> date;
    if (name.size() == prefix.size() + 10 + suffix.size() && name.starts_with(prefix) && name.ends_with(suffix))
        date = parse_date(std::string_view(name).substr(prefix.size(), 10));
    if (!date) throw ParseError(path + ": snapshot filename must be ranks-YYYY-MM-DD.csv");

    DomainCanonicalizer canon(multi_tenant_suffixes);
    RankSnapshot snap;
    snap.date = *date;
    std::set<int> seen_ranks;
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = parse_csv_line(line);
        if (lineno == 1 && fields.size() == 2 && fields[0] == "rank") continue;
        if (fields.size() != 2) throw ParseError(path, lineno, "expected rank,domain");
        int rank = 0;
        try {
            std::size_t used = 0;
            rank = std::stoi(fields[0], &used);
            if (used != fields[0].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "bad rank '" + fields[0] + "'");
        }
        if (rank < 1) throw ParseError(path, lineno, "rank must be >= 1");
        if (!seen_ranks.insert(rank).second) throw ParseError(path, lineno, "duplicate rank " + fields[0]);
        DomainKey key;
        try {
            key = canon.canonicalize_host(fields[1]);
        } catch (const CanonicalizeError&) {
            continue;  // IPs and bare suffixes have no place in a domain series
        }
        auto [it, inserted] = snap.ranks.emplace(key, rank);
        if (!inserted) it->second = std::min(it->second, rank);
    }
    return snap;
}

std::vector<RankSnapshot> load_rank_snapshots(const std::string& dir, const MultiTenantSuffixes& multi_tenant_suffixes) {
    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with("ranks-") && name.ends_with(".csv"))
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    std::vector<RankSnapshot> out;
    for (const auto& f : files) out.push_back(load_rank_snapshot(f, multi_tenant_suffixes));
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.date < y.date; });
    return out;
}

namespace {

void check_dates(const std::vector<RankSnapshot>& snapshots) {
    for (std::size_t i = 1; i < snapshots.size(); ++i) {
        if (snapshots[i].date == snapshots[i - 1].date)
            throw InvalidArgument("duplicate snapshot date " + format_date(snapshots[i].date));
        if (snapshots[i].date < snapshots[i - 1].date) throw InvalidArgument("snapshots not sorted by date");
    }
}

} // namespace

std::vector<DatedCount> popularity_series(const std::vector<RankSnapshot>& snapshots, const DomainSet& community,
                                          int threshold) {
    check_dates(snapshots);
    std::vector<DatedCount> out;
    for (const auto& snap : snapshots) {
        DatedCount point{snap.date, 0};
        for (const auto& d : community) {
            auto it = snap.ranks.find(d);
            if (it != snap.ranks.end() && it->second <= threshold) ++point.count;
        }
        out.push_back(point);
    }
    return out;
}

MedianRankSeries median_rank_series(const std::vector<RankSnapshot>& snapshots, const DomainSet& community) {
    check_dates(snapshots);
    MedianRankSeries out;
    for (const auto& snap : snapshots) {
        std::vector<int> present;
        for (const auto& d : community) {
            auto it = snap.ranks.find(d);
            if (it != snap.ranks.end()) present.push_back(it->second);
        }
        if (present.empty()) {
            out.skipped.push_back(snap.date);
            continue;
        }
        std::sort(present.begin(), present.end());
        const auto mid = present.size() / 2;
        double median = present.size() % 2 ? present[mid] : (present[mid - 1] + present[mid]) / 2.0;
        out.points.push_back({snap.date, median});
    }
    return out;
}

} // namespace linkmap
