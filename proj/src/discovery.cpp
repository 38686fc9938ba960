#include "linkmap/discovery.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "linkmap/error.hpp"
#include "linkmap/io.hpp"

namespace linkmap {

namespace {

template <class A, class B>
std::size_t intersection_size(const A& x, const B& y) {
    std::size_t n = 0;
    auto i = x.begin();
    auto j = y.begin();
    while (i != x.end() && j != y.end()) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

double overlap(std::size_t common, std::size_t x_size, std::size_t y_size) {
    if (x_size == 0 || y_size == 0) return 0.0;
    return static_cast<double>(common) / static_cast<double>(std::min(x_size, y_size));
}

void require_node(const HyperlinkGraph& g, const DomainKey& d) {
    if (!g.contains(d)) throw NotFound("not-in-graph: " + d.str());
}

/// Neighborhoods as sorted integer ids so the pipeline's inner loop avoids
/// string comparisons.
class NeighborhoodIndex {
public:
    NeighborhoodIndex(const HyperlinkGraph& g, NeighborhoodMode mode) : g_(g), mode_(mode) {
        std::uint32_t next = 0;
        for (const auto& d : g.nodes()) ids_.emplace(d.str(), next++);
    }

    std::vector<std::uint32_t> of(const DomainKey& d) const {
        std::vector<std::uint32_t> out;
        for (const auto& n : g_.neighborhood(d, mode_)) out.push_back(ids_.at(n.str()));
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    const HyperlinkGraph& g_;
    NeighborhoodMode mode_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

} // namespace

double ssc(const HyperlinkGraph& g, const DomainKey& x, const DomainKey& y, NeighborhoodMode mode) {
    if (x == y) throw InvalidArgument("self-comparison: " + x.str());
    auto nx = g.neighborhood(x, mode);
    auto ny = g.neighborhood(y, mode);
    return overlap(intersection_size(nx, ny), nx.size(), ny.size());
}

DomainSet bidirectional_partners(const HyperlinkGraph& g, const DomainSet& seeds) {
    DomainSet out;
    for (const auto& s : seeds) {
        require_node(g, s);
        const auto& back = g.in_neighbors(s);
        for (const auto& d : g.out_neighbors(s))
            if (back.contains(d) && !seeds.contains(d)) out.insert(d);
    }
    return out;
}

std::vector<DomainKey> CandidateList::candidates() const {
    std::vector<DomainKey> out;
    for (const auto& s : scores)
        if (out.empty() || out.back() != s.candidate) out.push_back(s.candidate);
    return out;
}

CandidateList candidate_pipeline(const HyperlinkGraph& g, const DomainSet& confirmed, const DiscoveryOptions& options) {
    if (confirmed.empty()) throw InvalidArgument("candidate_pipeline: empty confirmed set");
    if (options.k < 1) throw InvalidArgument("candidate_pipeline: k must be >= 1");
    for (const auto& s : confirmed) require_node(g, s);

    const auto pool_set = bidirectional_partners(g, confirmed);
    const std::vector<DomainKey> pool(pool_set.begin(), pool_set.end());
    const std::vector<DomainKey> seeds(confirmed.begin(), confirmed.end());

    NeighborhoodIndex index(g, options.mode);
    std::vector<std::vector<std::uint32_t>> pool_nbrs;
    pool_nbrs.reserve(pool.size());
    for (const auto& c : pool) pool_nbrs.push_back(index.of(c));

    std::vector<std::vector<CandidateScore>> per_seed(seeds.size());
    auto rank_seed = [&](std::size_t si) {
        const auto seed_nbrs = index.of(seeds[si]);
        std::vector<std::pair<double, std::size_t>> scored;
        scored.reserve(pool.size());
        for (std::size_t ci = 0; ci < pool.size(); ++ci)
            scored.emplace_back(overlap(intersection_size(seed_nbrs, pool_nbrs[ci]), seed_nbrs.size(), pool_nbrs[ci].size()),
                                ci);
        // pool is sorted by name, so index order is the lexicographic tie-break
        auto keep = std::min(scored.size(), static_cast<std::size_t>(options.k));
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                          [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
        for (std::size_t r = 0; r < keep; ++r)
            per_seed[si].push_back({pool[scored[r].second], seeds[si], scored[r].first, static_cast<int>(r + 1)});
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, seeds.size()));
    if (threads <= 1) {
        for (std::size_t si = 0; si < seeds.size(); ++si) rank_seed(si);
    } else {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t)
            workers.emplace_back([&, t] {
                for (std::size_t si = t; si < seeds.size(); si += threads) rank_seed(si);
            });
    }

    CandidateList out;
    out.pool_size = pool.size();
    out.k = options.k;
    out.mode = options.mode;
    std::map<DomainKey, double> best;
    for (const auto& rows : per_seed)
        for (const auto& row : rows) {
            auto [it, inserted] = best.emplace(row.candidate, row.ssc);
            if (!inserted) it->second = std::max(it->second, row.ssc);
            out.scores.push_back(row);
        }
    std::sort(out.scores.begin(), out.scores.end(), [&](const CandidateScore& a, const CandidateScore& b) {
        double ba = best.at(a.candidate), bb = best.at(b.candidate);
        if (ba != bb) return ba > bb;
        if (a.candidate != b.candidate) return a.candidate < b.candidate;
        if (a.ssc != b.ssc) return a.ssc > b.ssc;
        return a.seed < b.seed;
    });
    return out;
}

MwuResult ssc_separation_test(const HyperlinkGraph& g, const DomainSet& group_a, const DomainSet& group_b,
                              const DomainKey& reference, NeighborhoodMode mode) {
    for (const auto& d : group_a)
        if (group_b.contains(d)) throw InvalidArgument("groups overlap at " + d.str());
    std::vector<double> a, b;
    for (const auto& d : group_a) a.push_back(ssc(g, d, reference, mode));
    for (const auto& d : group_b) b.push_back(ssc(g, d, reference, mode));
    return mann_whitney_u(a, b);
}

void write_candidates_csv(std::ostream& out, const CandidateList& list) {
    out << "candidate,seed,ssc,rank\n";
    for (const auto& s : list.scores)
        out << csv_field(s.candidate.str()) << ',' << csv_field(s.seed.str()) << ',' << format_double(s.ssc) << ','
            << s.rank_within_seed << '\n';
}

CandidateList read_candidates_csv(std::istream& in, const std::string& source_name) {
    CandidateList list;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = parse_csv_line(line);
        if (lineno == 1) {
            if (f != std::vector<std::string>{"candidate", "seed", "ssc", "rank"})
                throw ParseError(source_name, lineno, "expected header candidate,seed,ssc,rank");
            continue;
        }
        if (f.size() != 4) throw ParseError(source_name, lineno, "expected 4 fields");
        CandidateScore s;
        try {
            s.candidate = DomainKey::from_canonical(f[0]);
            s.seed = DomainKey::from_canonical(f[1]);
            std::size_t used = 0;
            s.ssc = std::stod(f[2], &used);
            if (used != f[2].size()) throw std::invalid_argument("ssc");
            s.rank_within_seed = std::stoi(f[3], &used);
            if (used != f[3].size()) throw std::invalid_argument("rank");
        } catch (const std::exception& e) {
            throw ParseError(source_name, lineno, std::string("bad candidate row: ") + e.what());
        }
        if (s.ssc < 0 || s.ssc > 1 || s.rank_within_seed < 1) throw ParseError(source_name, lineno, "value out of range");
        list.k = std::max(list.k, s.rank_within_seed);
        list.scores.push_back(std::move(s));
    }
    if (lineno == 0) throw ParseError(source_name, 1, "empty candidate file");
    list.pool_size = list.candidates().size();
    return list;
}

std::string candidates_summary_json(const CandidateList& list) {
    nlohmann::ordered_json j;
    j["pool_size"] = list.pool_size;
    j["k"] = list.k;
    j["mode"] = to_string(list.mode);
    return j.dump(2) + "\n";
}

} // namespace linkmap
