#include "linkmap/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "linkmap/io.hpp"

namespace linkmap {

namespace {
constexpr std::string_view kHeader = "#hlg v1";
constexpr std::string_view kNodesSentinel = "#nodes";
} // namespace

std::string to_string(NeighborhoodMode mode) {
    switch (mode) {
    case NeighborhoodMode::Out: return "out";
    case NeighborhoodMode::In: return "in";
    case NeighborhoodMode::Union: return "union";
    }
    return "union";
}

NeighborhoodMode parse_neighborhood_mode(std::string_view text) {
    if (text == "out") return NeighborhoodMode::Out;
    if (text == "in") return NeighborhoodMode::In;
    if (text == "union") return NeighborhoodMode::Union;
    throw InvalidArgument("unknown neighborhood mode: " + std::string(text));
}

void HyperlinkGraph::add_node(const DomainKey& d) {
    out_.try_emplace(d);
    in_.try_emplace(d);
}

bool HyperlinkGraph::add_edge(const DomainKey& src, const DomainKey& dst, Timestamp first_seen) {
    if (src == dst) {
        ++dropped_self_loops_;
        return false;
    }
    add_node(src);
    add_node(dst);
    auto [it, inserted] = meta_.try_emplace({src, dst}, first_seen);
    if (!inserted) {
        it->second = std::min(it->second, first_seen);
        return false;
    }
    out_[src].insert(dst);
    in_[dst].insert(src);
    return true;
}

Timestamp HyperlinkGraph::first_seen(const DomainKey& src, const DomainKey& dst) const {
    auto it = meta_.find({src, dst});
    if (it == meta_.end()) throw NotFound("no edge " + src.str() + " -> " + dst.str());
    return it->second;
}

const DomainSet& HyperlinkGraph::out_neighbors(const DomainKey& d) const {
    auto it = out_.find(d);
    if (it == out_.end()) throw NotFound("not in graph: " + d.str());
    return it->second;
}

const DomainSet& HyperlinkGraph::in_neighbors(const DomainKey& d) const {
    auto it = in_.find(d);
    if (it == in_.end()) throw NotFound("not in graph: " + d.str());
    return it->second;
}

DomainSet HyperlinkGraph::neighborhood(const DomainKey& d, NeighborhoodMode mode) const {
    switch (mode) {
    case NeighborhoodMode::Out: return out_neighbors(d);
    case NeighborhoodMode::In: return in_neighbors(d);
    case NeighborhoodMode::Union: {
        DomainSet result = out_neighbors(d);
        const auto& in = in_neighbors(d);
        result.insert(in.begin(), in.end());
        return result;
    }
    }
    return {};
}

DomainSet HyperlinkGraph::nodes() const {
    DomainSet result;
    for (const auto& [d, _] : out_) result.insert(result.end(), d);
    return result;
}

HyperlinkGraph HyperlinkGraph::induced_subgraph(const DomainSet& keep) const {
    HyperlinkGraph sub;
    for (const auto& d : keep)
        if (contains(d)) sub.add_node(d);
    for (const auto& [edge, ts] : meta_)
        if (keep.contains(edge.first) && keep.contains(edge.second)) sub.add_edge(edge.first, edge.second, ts);
    return sub;
}

HyperlinkGraph HyperlinkGraph::reversed() const {
    HyperlinkGraph rev;
    for (const auto& [d, _] : out_) rev.add_node(d);
    for (const auto& [edge, ts] : meta_) rev.add_edge(edge.second, edge.first, ts);
    return rev;
}

HyperlinkGraph merge(const HyperlinkGraph& a, const HyperlinkGraph& b) {
    HyperlinkGraph result = a;
    for (const auto& d : b.nodes()) result.add_node(d);
    for (const auto& [edge, ts] : b.edges()) result.add_edge(edge.first, edge.second, ts);
    return result;
}

void write_hlg(std::ostream& out, const HyperlinkGraph& g) {
    out << kHeader << '\n';
    for (const auto& [edge, ts] : g.edges())
        out << edge.first.str() << '\t' << edge.second.str() << '\t' << ts << '\n';
    bool sentinel_written = false;
    for (const auto& d : g.nodes()) {
        if (!g.out_neighbors(d).empty() || !g.in_neighbors(d).empty()) continue;
        if (!sentinel_written) {
            out << kNodesSentinel << '\n';
            sentinel_written = true;
        }
        out << d.str() << '\n';
    }
}

HyperlinkGraph read_hlg(std::istream& in, const std::string& source_name) {
    HyperlinkGraph g;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || (++line_no, line != kHeader))
        throw ParseError(source_name, 1, "missing '#hlg v1' header");

    auto parse_domain = [&](std::string_view text) {
        try {
            return DomainKey::from_canonical(text);
        } catch (const InvalidArgument& e) {
            throw ParseError(source_name, line_no, e.what());
        }
    };

    bool in_nodes = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line == kNodesSentinel) {
            in_nodes = true;
            continue;
        }
        if (in_nodes) {
            g.add_node(parse_domain(line));
            continue;
        }
        auto fields = split(line, '\t');
        if (fields.size() != 3) throw ParseError(source_name, line_no, "expected src<TAB>dst<TAB>first_seen");
        Timestamp ts = 0;
        auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), ts);
        if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size())
            throw ParseError(source_name, line_no, "bad timestamp '" + std::string(fields[2]) + "'");
        g.add_edge(parse_domain(fields[0]), parse_domain(fields[1]), ts);
    }
    return g;
}

void save_hlg(const std::string& path, const HyperlinkGraph& g) {
    std::ostringstream buf;
    write_hlg(buf, g);
    write_file_atomic(path, buf.str());
}

HyperlinkGraph load_hlg(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open graph file: " + path);
    return read_hlg(in, path);
}

} // namespace linkmap
