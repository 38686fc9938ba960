#include "linkmap/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <thread>

#include "linkmap/error.hpp"
#include "linkmap/io.hpp"

namespace linkmap {

namespace {

/// Compressed adjacency over node indices in lexicographic order.
struct Csr {
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> targets;
};

Csr build_csr(const std::vector<DomainKey>& nodes, const std::map<DomainKey, std::uint32_t>& index,
              const HyperlinkGraph& g, bool reverse) {
    Csr csr;
    csr.offsets.push_back(0);
    for (const auto& d : nodes) {
        for (const auto& n : reverse ? g.in_neighbors(d) : g.out_neighbors(d)) csr.targets.push_back(index.at(n));
        csr.offsets.push_back(csr.targets.size());
    }
    return csr;
}

// out[i] = sum of x[j] over row i of the adjacency; rows are split across
// threads, each row summed in a fixed order.
void multiply(const Csr& csr, const std::vector<double>& x, std::vector<double>& out, unsigned threads) {
    const std::size_t n = out.size();
    auto rows = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double s = 0;
            for (std::size_t e = csr.offsets[i]; e < csr.offsets[i + 1]; ++e) s += x[csr.targets[e]];
            out[i] = s;
        }
    };
    if (threads <= 1 || n < 2048) {
        rows(0, n);
        return;
    }
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t b = 0; b < n; b += chunk) workers.emplace_back(rows, b, std::min(n, b + chunk));
}

void normalize(std::vector<double>& v, HitsNorm norm) {
    double total = 0;
    if (norm == HitsNorm::L2) {
        for (double x : v) total += x * x;
        total = std::sqrt(total);
    } else {
        for (double x : v) total += x;
    }
    if (total > 0)
        for (double& x : v) x /= total;
}

double max_change(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

std::vector<RankedNode> ranked(const HitsScores& scores, std::size_t k, bool by_hub) {
    if (k < 1) throw InvalidArgument("top-k requires k >= 1");
    std::vector<RankedNode> rows;
    for (const auto& [d, h] : scores.hub) {
        auto it = scores.authority.find(d);
        rows.push_back({d, h, it == scores.authority.end() ? 0.0 : it->second});
    }
    auto key = [by_hub](const RankedNode& r) { return by_hub ? r.hub : r.authority; };
    std::stable_sort(rows.begin(), rows.end(), [&](const RankedNode& a, const RankedNode& b) { return key(a) > key(b); });
    rows.resize(std::min(k, rows.size()));
    return rows;
}

} // namespace

HitsScores hits(const HyperlinkGraph& g, const HitsOptions& options) {
    if (g.edge_count() == 0) throw InvalidArgument("no-edges: HITS needs at least one edge");
    if (!(options.tol > 0) || options.max_iter < 1) throw InvalidArgument("hits: tol must be > 0 and max_iter >= 1");

    const auto node_set = g.nodes();
    const std::vector<DomainKey> nodes(node_set.begin(), node_set.end());
    std::map<DomainKey, std::uint32_t> index;
    for (std::uint32_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], i);
    const Csr out_adj = build_csr(nodes, index, g, false);
    const Csr in_adj = build_csr(nodes, index, g, true);

    const std::size_t n = nodes.size();
    std::vector<double> hub(n, 1.0), auth(n, 1.0), next_hub(n), next_auth(n);
    normalize(hub, options.norm);
    normalize(auth, options.norm);

    HitsScores scores;
    for (int it = 1; it <= options.max_iter; ++it) {
        multiply(in_adj, hub, next_auth, options.threads);
        normalize(next_auth, options.norm);
        multiply(out_adj, next_auth, next_hub, options.threads);
        normalize(next_hub, options.norm);
        const double delta = std::max(max_change(hub, next_hub), max_change(auth, next_auth));
        hub.swap(next_hub);
        auth.swap(next_auth);
        scores.iterations = it;
        if (delta < options.tol) {
            scores.converged = true;
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        scores.hub.emplace(nodes[i], hub[i]);
        scores.authority.emplace(nodes[i], auth[i]);
    }
    return scores;
}

std::vector<RankedNode> top_hubs(const HitsScores& scores, std::size_t k) { return ranked(scores, k, true); }
std::vector<RankedNode> top_authorities(const HitsScores& scores, std::size_t k) { return ranked(scores, k, false); }

DomainSet base_set(const HyperlinkGraph& g, const DomainSet& root) {
    DomainSet out;
    for (const auto& r : root) {
        if (!g.contains(r)) throw NotFound("not-in-graph: " + r.str());
        out.insert(r);
        for (const auto& d : g.out_neighbors(r)) out.insert(d);
        for (const auto& d : g.in_neighbors(r)) out.insert(d);
    }
    return out;
}

void write_hits_csv(std::ostream& out, const HitsScores& scores) {
    out << "domain,hub,authority\n";
    for (const auto& [d, h] : scores.hub)
        out << csv_field(d.str()) << ',' << format_double(h) << ',' << format_double(scores.authority.at(d)) << '\n';
}

HitsScores read_hits_csv(std::istream& in, const std::string& source_name) {
    HitsScores scores;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = parse_csv_line(line);
        if (lineno == 1) {
            if (f != std::vector<std::string>{"domain", "hub", "authority"})
                throw ParseError(source_name, lineno, "expected header domain,hub,authority");
            continue;
        }
        if (f.size() != 3) throw ParseError(source_name, lineno, "expected 3 fields");
        try {
            auto d = DomainKey::from_canonical(f[0]);
            scores.hub[d] = std::stod(f[1]);
            scores.authority[d] = std::stod(f[2]);
        } catch (const std::exception& e) {
            throw ParseError(source_name, lineno, e.what());
        }
    }
    return scores;
}

void write_ranked_table(std::ostream& out, const std::vector<RankedNode>& rows) {
    std::size_t width = 6;
    for (const auto& r : rows) width = std::max(width, r.domain.str().size());
    const int w = static_cast<int>(width);
    out << std::left << std::setw(4) << "rank" << "  " << std::setw(w) << "domain" << std::right << "  " << std::setw(12)
        << "hub" << "  " << std::setw(12) << "authority" << '\n';
    out << std::fixed << std::setprecision(6);
    for (std::size_t i = 0; i < rows.size(); ++i)
        out << std::left << std::setw(4) << i + 1 << "  " << std::setw(w) << rows[i].domain.str() << std::right << "  "
            << std::setw(12) << rows[i].hub << "  " << std::setw(12) << rows[i].authority << '\n';
    out << std::defaultfloat << std::setprecision(6);
}

} // namespace linkmap
