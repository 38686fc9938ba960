#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linkmap/features.hpp"
#include "linkmap/metrics.hpp"

namespace linkmap {

enum class FeatureFraction { Sqrt, Log2, Quarter, Half, All };

std::string to_string(FeatureFraction f);
FeatureFraction parse_feature_fraction(std::string_view text);
/// Number of candidate features per split out of `total`, at least 1.
std::size_t features_per_split(FeatureFraction f, std::size_t total);

struct ForestParams {
    int n_trees = 100;
    std::optional<int> max_depth;  // nullopt = grow until pure or min_samples_leaf binds
    int min_samples_leaf = 1;
    FeatureFraction features_per_split = FeatureFraction::Sqrt;
    bool bootstrap = true;

    bool operator==(const ForestParams&) const = default;
};

/// Axis-aligned binary tree; rows with x[feature] <= threshold go left.
/// leaf_counts holds the (negative, positive) training weight reaching each
/// node, bootstrap multiplicity included.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    std::array<std::uint32_t, 2> leaf_counts{};

    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::uint64_t seed = 0;
    std::vector<TreeNode> nodes;

    /// Majority class at the reached leaf; an even leaf votes negative.
    int predict(std::span<const double> x) const;
    bool operator==(const DecisionTree&) const = default;
};

struct CvSummary {
    int folds = 0;
    int search_iters = 0;
    double mean_accuracy = 0;
    double mean_roc_auc = 0;
    double mean_pr_auc = 0;

    bool operator==(const CvSummary&) const = default;
};

struct ForestModel {
    ForestParams params;
    std::uint64_t master_seed = 0;
    std::vector<std::string> feature_names;
    std::vector<double> imputation;  // training median per column, used for NaN inputs
    std::vector<DecisionTree> trees;
    std::vector<double> importances;
    std::optional<CvSummary> cv;
    std::vector<DomainKey> holdout;  // rows kept out of training, if any

    bool operator==(const ForestModel&) const = default;
};

/// Seed of tree i: derive_seed(master_seed, i).
std::uint64_t tree_seed(std::uint64_t master_seed, std::size_t tree_index);

/// Fits one forest with fixed hyperparameters. Rows are put in domain order
/// first, so the result does not depend on input row order or thread count.
/// Single-class data yields single-leaf trees. Throws InvalidArgument on an
/// empty dataset.
ForestModel fit_forest(const LabeledDataset& data, const ForestParams& params, std::uint64_t master_seed,
                       unsigned threads = 0);

struct SearchOptions {
    int search_iters = 100;
    int folds = 5;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Uniform draw from the search space: n_trees {100..500 step 100}, max_depth
/// {2..20, unlimited}, min_samples_leaf {1..10}, features_per_split
/// {sqrt, log2, 0.25, 0.5}.
std::vector<ForestParams> sample_search_space(int count, std::uint64_t seed);

struct SearchTrial {
    ForestParams params;
    double mean_accuracy = 0;
    double mean_roc_auc = 0;
    double mean_pr_auc = 0;
};

struct TrainResult {
    ForestModel model;
    std::vector<SearchTrial> trials;
    std::size_t best = 0;
};

/// Randomized search scored by stratified k-fold CV accuracy at threshold 0.5
/// (ties: fewer trees, then shallower, then earlier draw), then a refit of
/// the winner on all rows. Throws InvalidArgument ("degenerate-labels") for
/// single-class data or when a class has fewer rows than folds.
TrainResult train_random_forest(const LabeledDataset& data, const SearchOptions& options = {});

/// Fraction of trees voting positive. Throws InvalidArgument on a length
/// mismatch.
double predict_proba(const ForestModel& model, std::span<const double> x);

/// Per-feature mean decrease in Gini impurity, each tree normalized then
/// averaged and renormalized; all zeros when no tree split.
const std::vector<double>& gini_importance(const ForestModel& model);

/// `forest v1` JSON.
std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(std::string_view text);
void save_forest(const std::string& path, const ForestModel& model);
ForestModel load_forest(const std::string& path);

struct EvaluationReport {
    std::size_t rows = 0;
    std::size_t positives = 0;
    double roc_auc = 0;
    double pr_auc = 0;
    std::vector<CurvePoint> roc_points;
    std::vector<CurvePoint> pr_points;
    std::vector<std::pair<std::string, double>> top_importances;
    std::optional<CvSummary> cv;
};

/// Scores `data` with the model. Throws InvalidArgument if the dataset columns
/// differ from the model's or a class is missing.
EvaluationReport evaluate_model(const ForestModel& model, const LabeledDataset& data, std::size_t top_n = 20);
/// `{roc_auc, pr_auc, curve_points, importances_topN, ...}`.
std::string evaluation_json(const EvaluationReport& report);
/// `curve,x,y,threshold` rows for plotting.
std::string curve_points_csv(const EvaluationReport& report);

} // namespace linkmap
