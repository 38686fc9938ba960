#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "linkmap/graph.hpp"

namespace linkmap {

enum class HitsNorm { L2, L1 };

struct HitsOptions {
    double tol = 1e-10;
    int max_iter = 1000;
    HitsNorm norm = HitsNorm::L2;
    unsigned threads = 1;
};

struct HitsScores {
    std::map<DomainKey, double> hub;
    std::map<DomainKey, double> authority;
    int iterations = 0;
    bool converged = false;
};

/// Kleinberg's hub/authority iteration from a uniform start: a = Aᵀh, then
/// h = Aa, each normalized. Stops when neither vector moves more than tol in
/// any coordinate. Throws InvalidArgument on a graph with no edges.
HitsScores hits(const HyperlinkGraph& g, const HitsOptions& options = {});

struct RankedNode {
    DomainKey domain;
    double hub = 0;
    double authority = 0;
};

/// Highest-scoring nodes first, ties by name. Throws InvalidArgument for k < 1.
std::vector<RankedNode> top_hubs(const HitsScores& scores, std::size_t k);
std::vector<RankedNode> top_authorities(const HitsScores& scores, std::size_t k);

/// root plus everything linking to or linked from it. Throws NotFound if a
/// root member is not a node.
DomainSet base_set(const HyperlinkGraph& g, const DomainSet& root);

/// `domain,hub,authority` for every node, 17 significant digits.
void write_hits_csv(std::ostream& out, const HitsScores& scores);
HitsScores read_hits_csv(std::istream& in, const std::string& source_name = "<hits>");
/// Fixed-width table of ranked rows.
void write_ranked_table(std::ostream& out, const std::vector<RankedNode>& rows);

} // namespace linkmap
