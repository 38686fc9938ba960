#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linkmap/graph.hpp"

namespace linkmap {

/// Column layout shared by every matrix built for one experiment: one bit per
/// connection target, then the metadata columns.
struct FeatureSpec {
    std::vector<DomainKey> connection_targets;
    std::vector<std::string> metadata_features;

    std::size_t size() const noexcept { return connection_targets.size() + metadata_features.size(); }
    /// `link:<domain>` for targets, then the metadata names.
    std::vector<std::string> column_names() const;

    bool operator==(const FeatureSpec&) const = default;
};

/// A = top k outsiders by how many community members they link to, B = top k
/// outsiders by how many members link to them (ties by name), then the
/// community in name order; duplicates keep their first position.
/// Throws InvalidArgument for an empty community or k < 1, NotFound if a
/// member is not a node.
FeatureSpec build_connection_feature_spec(const HyperlinkGraph& g, const DomainSet& community, std::size_t k = 100);

struct DomainMetadata {
    std::optional<double> time_since_registration;  // days
    std::optional<double> time_to_expiration;       // days
    std::optional<double> time_since_update;        // days
    std::optional<double> domain_length;            // characters
    std::optional<double> domain_life_span;         // days
    std::optional<double> as_number;
    std::optional<std::string> registrar;

    bool operator==(const DomainMetadata&) const = default;
};

using MetadataTable = std::map<DomainKey, DomainMetadata>;

/// CSV keyed by `domain`; any subset of the metadata columns in any order,
/// empty cell = missing. Throws ParseError on unknown columns, bad numbers or
/// negative day counts.
MetadataTable read_metadata_csv(std::istream& in, const std::string& source_name = "<metadata>");
MetadataTable load_metadata_csv(const std::string& path);

/// Numeric fields each get a value column and a `<name>:missing` bit. The
/// registrar is one-hot over the `max_registrars` most common values in
/// `table` (ties by name) plus `registrar:missing`.
std::vector<std::string> metadata_feature_names(const MetadataTable& table, std::size_t max_registrars = 20);

/// Connection bit j is 1 iff the edge d -> targets[j] exists. Metadata columns
/// follow; a missing numeric value is NaN (the forest imputes it with the
/// training median) and its indicator is 1. domain_length falls back to the
/// length of d. Throws NotFound if d is not a node.
std::vector<double> featurize(const HyperlinkGraph& g, const DomainKey& d, const FeatureSpec& spec,
                              const DomainMetadata* meta = nullptr);

enum class ClassLabel { Authentic = 0, Misinformation = 1 };

std::string to_string(ClassLabel label);
ClassLabel parse_class_label(std::string_view text);

struct LabeledRow {
    DomainKey domain;
    std::vector<double> features;
    int label = 0;  // 1 = misinformation (positive)
};

struct LabeledDataset {
    FeatureSpec spec;
    std::vector<LabeledRow> rows;

    std::size_t positives() const;
    std::size_t negatives() const { return rows.size() - positives(); }
};

/// `domain,label` with labels misinformation|authentic.
std::map<DomainKey, ClassLabel> read_class_labels_csv(std::istream& in, const std::string& source_name = "<labels>");

struct DatasetBuild {
    LabeledDataset data;
    std::vector<DomainKey> missing_from_graph;
};

/// Featurizes every labeled domain present in g, in name order.
DatasetBuild build_dataset(const HyperlinkGraph& g, const std::map<DomainKey, ClassLabel>& labels,
                           const FeatureSpec& spec, const MetadataTable* metadata = nullptr);

/// Matrix CSV: `domain,label,<column names>`; NaN written as an empty cell.
void write_dataset_csv(std::ostream& out, const LabeledDataset& data);
/// Reads a matrix back; `spec` must describe the same columns.
LabeledDataset read_dataset_csv(std::istream& in, const FeatureSpec& spec, const std::string& source_name = "<dataset>");

/// Spec file: `{"format": "featurespec v1", "connection_targets": [...], "metadata_features": [...]}`.
std::string feature_spec_json(const FeatureSpec& spec);
FeatureSpec parse_feature_spec_json(std::string_view text);

/// Stratified split: each class is shuffled with `seed` and cut at
/// round(train_frac * n), kept within [1, n-1]. Throws InvalidArgument if
/// train_frac is outside (0, 1) or a class has fewer than 2 rows.
std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& data, double train_frac = 0.7,
                                                           std::uint64_t seed = 0);

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

} // namespace linkmap
