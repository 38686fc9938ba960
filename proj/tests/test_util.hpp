#pragma once

#include <cstdio>
#include <random>
#include <string>

#include "linkmap/graph.hpp"

namespace linkmap::testing {

inline DomainKey D(const std::string& name) { return DomainKey::from_canonical(name); }

inline std::string node_name(int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "n%03d.com", i);
    return buf;
}

/// Erdos-Renyi style directed graph on n named nodes; every node is present
/// even when isolated. Timestamps are drawn from [0, ts_range].
inline HyperlinkGraph random_graph(int n, double p, unsigned seed, Timestamp ts_range = 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<Timestamp> ts(0, ts_range);
    HyperlinkGraph g;
    for (int i = 0; i < n; ++i) g.add_node(D(node_name(i)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && coin(rng) < p) g.add_edge(D(node_name(i)), D(node_name(j)), ts(rng));
    return g;
}

} // namespace linkmap::testing

#include <filesystem>

#include <unistd.h>

namespace linkmap::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("linkmap-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace linkmap::testing
