#pragma once

#include <cstdio>
#include <random>
#include <string>

#include "linkmap/graph.hpp"

namespace linkmap::testing {

struct PlantedGraph {
    HyperlinkGraph graph;
    DomainSet community;
    DomainSet confirmed;  // labeled subset of the community
    DomainSet background;
};

/// A community with dense mutual links hidden among background nodes. Each
/// background node has a mutual link with one confirmed seed, so it reaches
/// the candidate pool, plus sparse random links. Background names sort before
/// community names, so lexicographic tie-breaks never favour the community.
inline PlantedGraph planted_community(int members, int confirmed, int background, unsigned seed,
                                      double p_member = 0.8, double p_background = 0.02) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    auto name = [](char prefix, int i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%c%03d.net", prefix, i);
        return DomainKey::from_canonical(buf);
    };
    PlantedGraph out;
    std::vector<DomainKey> comm, bg;
    for (int i = 0; i < members; ++i) comm.push_back(name('c', i));
    for (int i = 0; i < background; ++i) bg.push_back(name('b', i));
    for (const auto& d : comm) out.graph.add_node(d), out.community.insert(d);
    for (const auto& d : bg) out.graph.add_node(d), out.background.insert(d);
    for (int i = 0; i < confirmed; ++i) out.confirmed.insert(comm[static_cast<std::size_t>(i)]);

    for (std::size_t i = 0; i < comm.size(); ++i)
        for (std::size_t j = i + 1; j < comm.size(); ++j)
            if (coin(rng) < p_member) {
                out.graph.add_edge(comm[i], comm[j], 0);
                out.graph.add_edge(comm[j], comm[i], 0);
            }
    std::uniform_int_distribution<int> pick_seed(0, confirmed - 1), pick_member(0, members - 1);
    for (const auto& b : bg) {
        const auto& s = comm[static_cast<std::size_t>(pick_seed(rng))];
        out.graph.add_edge(b, s, 0);
        out.graph.add_edge(s, b, 0);
        if (coin(rng) < 0.3) out.graph.add_edge(b, comm[static_cast<std::size_t>(pick_member(rng))], 0);
        for (const auto& other : bg)
            if (other != b && coin(rng) < p_background) out.graph.add_edge(b, other, 0);
    }
    return out;
}

} // namespace linkmap::testing
