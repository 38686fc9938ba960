#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "linkmap/domain.hpp"

namespace linkmap {

using Timestamp = std::int64_t; // UTC seconds
using DomainSet = std::set<DomainKey>;

enum class NeighborhoodMode { Out, In, Union };

std::string to_string(NeighborhoodMode mode);
NeighborhoodMode parse_neighborhood_mode(std::string_view text);

/// Directed, deduplicated domain-level hyperlink graph with forward and
/// reverse adjacency kept in lockstep. Self-loops are never stored.
class HyperlinkGraph {
public:
    using Edge = std::pair<DomainKey, DomainKey>;

    void add_node(const DomainKey& d);

    /// Inserts src->dst. Re-adding keeps the earliest first_seen. A self-loop
    /// is dropped and counted. Returns true when a new edge was created.
    bool add_edge(const DomainKey& src, const DomainKey& dst, Timestamp first_seen);

    bool contains(const DomainKey& d) const { return out_.contains(d); }
    bool has_edge(const DomainKey& src, const DomainKey& dst) const { return meta_.contains({src, dst}); }
    Timestamp first_seen(const DomainKey& src, const DomainKey& dst) const;

    /// Throws NotFound when d is not a node.
    const DomainSet& out_neighbors(const DomainKey& d) const;
    const DomainSet& in_neighbors(const DomainKey& d) const;
    DomainSet neighborhood(const DomainKey& d, NeighborhoodMode mode) const;

    std::size_t node_count() const noexcept { return out_.size(); }
    std::size_t edge_count() const noexcept { return meta_.size(); }
    std::size_t dropped_self_loops() const noexcept { return dropped_self_loops_; }

    /// Nodes in lexicographic order.
    DomainSet nodes() const;
    const std::map<Edge, Timestamp>& edges() const noexcept { return meta_; }

    /// Subgraph on `keep` with every edge whose endpoints are both kept.
    HyperlinkGraph induced_subgraph(const DomainSet& keep) const;
    /// Same nodes, every edge reversed.
    HyperlinkGraph reversed() const;

    bool operator==(const HyperlinkGraph& other) const { return out_ == other.out_ && meta_ == other.meta_; }

private:
    std::map<DomainKey, DomainSet> out_;
    std::map<DomainKey, DomainSet> in_;
    std::map<Edge, Timestamp> meta_;
    std::size_t dropped_self_loops_ = 0;
};

/// Node and edge union; per-edge first_seen is the minimum of both inputs.
HyperlinkGraph merge(const HyperlinkGraph& a, const HyperlinkGraph& b);

/// "hlg v1" text format: header line, sorted `src\tdst\tfirst_seen` edge
/// lines, then isolated nodes after a `#nodes` sentinel.
void write_hlg(std::ostream& out, const HyperlinkGraph& g);
HyperlinkGraph read_hlg(std::istream& in, const std::string& source_name = "<hlg>");

void save_hlg(const std::string& path, const HyperlinkGraph& g);
HyperlinkGraph load_hlg(const std::string& path);

} // namespace linkmap
