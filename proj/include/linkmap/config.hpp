#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linkmap/crawler.hpp"
#include "linkmap/graph.hpp"

namespace linkmap {

struct DiscoveryConfig {
    int k = 10;
    NeighborhoodMode mode = NeighborhoodMode::Union;
    unsigned threads = 0;
};

struct ClassifierConfig {
    int search_iters = 100;
    int folds = 5;
    double train_frac = 0.7;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;
};

/// File locations, absolute after loading. Empty means not configured.
struct ProjectPaths {
    std::string graph;
    std::string labels;
    std::string metadata;
    std::string snapshots;
    std::string candidates;
    std::string hits;
    std::string inventory;
    std::string plans;
    std::string static_dir;
};

struct ProjectConfig {
    /// Hosts or URLs in the file, canonicalized, sorted and deduplicated.
    std::vector<DomainKey> seeds;
    CrawlConfig crawl;
    DiscoveryConfig discovery;
    ClassifierConfig classifier;
    ProjectPaths paths;

    /// Throws InvalidArgument when seeds are empty.
    void require_seeds() const;
};

/// Parses TOML. Relative paths resolve against `base_dir`, and every
/// configured path must sit in an existing directory. Unknown keys are errors.
ProjectConfig parse_project_config(std::string_view toml_text, const std::string& base_dir,
                                   const std::string& source = "<config>");
ProjectConfig load_project_config(const std::string& path);

} // namespace linkmap
