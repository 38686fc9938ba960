#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "linkmap/error.hpp"
#include "linkmap/forest.hpp"
#include "linkmap/random.hpp"
#include "test_util.hpp"

using namespace linkmap;
using linkmap::testing::D;
using linkmap::testing::node_name;

namespace {

LabeledDataset make_dataset(std::size_t features) {
    LabeledDataset d;
    for (std::size_t f = 0; f < features; ++f) d.spec.metadata_features.push_back("f" + std::to_string(f));
    return d;
}

/// Feature 0 is the label; the rest are coin flips.
LabeledDataset label_in_feature_zero(int rows, std::size_t noise_features, unsigned seed) {
    std::mt19937 rng(seed);
    auto d = make_dataset(noise_features + 1);
    for (int i = 0; i < rows; ++i) {
        std::vector<double> x{static_cast<double>(i % 2)};
        for (std::size_t f = 0; f < noise_features; ++f) x.push_back(static_cast<double>(rng() % 2));
        d.rows.push_back({D(node_name(i)), x, i % 2});
    }
    return d;
}

LabeledDataset random_labels(int rows, std::size_t features, unsigned seed) {
    std::mt19937 rng(seed);
    auto d = make_dataset(features);
    std::vector<int> labels(static_cast<std::size_t>(rows));
    for (int i = 0; i < rows; ++i) labels[static_cast<std::size_t>(i)] = i % 2;
    std::shuffle(labels.begin(), labels.end(), rng);
    for (int i = 0; i < rows; ++i) {
        std::vector<double> x;
        for (std::size_t f = 0; f < features; ++f) x.push_back(static_cast<double>(rng() % 2));
        d.rows.push_back({D(node_name(i)), x, labels[static_cast<std::size_t>(i)]});
    }
    return d;
}

LabeledDataset continuous(int rows, std::size_t features, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0, 1);
    auto d = make_dataset(features);
    for (int i = 0; i < rows; ++i) {
        std::vector<double> x;
        for (std::size_t f = 0; f < features; ++f) x.push_back(noise(rng));
        int label = x[0] + 0.5 * x[1] + 0.3 * noise(rng) > 0 ? 1 : 0;
        d.rows.push_back({D(node_name(i)), x, label});
    }
    return d;
}

std::vector<double> all_probas(const ForestModel& m, const LabeledDataset& d) {
    std::vector<double> out;
    for (const auto& r : d.rows) out.push_back(predict_proba(m, r.features));
    return out;
}

struct BestSplit {
    std::size_t feature = 0;
    double threshold = 0;
    double decrease = -1;
};

/// Every feature and every midpoint between distinct values, scored by the
/// count-weighted Gini decrease; first maximum wins.
BestSplit exhaustive_split(const LabeledDataset& d) {
    auto gini = [](double c0, double c1) { double w = c0 + c1; return w > 0 ? w - (c0 * c0 + c1 * c1) / w : 0.0; };
    double t0 = 0, t1 = 0;
    for (const auto& r : d.rows) (r.label ? t1 : t0) += 1;
    BestSplit best;
    for (std::size_t f = 0; f < d.spec.size(); ++f) {
        std::set<double> values;
        for (const auto& r : d.rows) values.insert(r.features[f]);
        for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
            double thr = *it + (*std::next(it) - *it) / 2;
            double l0 = 0, l1 = 0;
            for (const auto& r : d.rows)
                if (r.features[f] <= thr) (r.label ? l1 : l0) += 1;
            double dec = gini(t0, t1) - gini(l0, l1) - gini(t0 - l0, t1 - l1);
            if (dec > best.decrease) best = {f, thr, dec};
        }
    }
    return best;
}

} // namespace

TEST(FeatureFraction, Counts) {
    EXPECT_EQ(features_per_split(FeatureFraction::Sqrt, 490), 22u);
    EXPECT_EQ(features_per_split(FeatureFraction::Log2, 490), 8u);
    EXPECT_EQ(features_per_split(FeatureFraction::Quarter, 490), 122u);
    EXPECT_EQ(features_per_split(FeatureFraction::Half, 490), 245u);
    EXPECT_EQ(features_per_split(FeatureFraction::All, 490), 490u);
    EXPECT_EQ(features_per_split(FeatureFraction::Log2, 1), 1u);
    EXPECT_EQ(parse_feature_fraction("0.25"), FeatureFraction::Quarter);
    EXPECT_THROW(parse_feature_fraction("most"), InvalidArgument);
}

TEST(SearchSpace, DrawsStayInsideTheSpace) {
    auto draws = sample_search_space(500, 3);
    std::set<int> trees, depths;
    for (const auto& p : draws) {
        EXPECT_EQ(p.n_trees % 100, 0);
        EXPECT_GE(p.n_trees, 100);
        EXPECT_LE(p.n_trees, 500);
        if (p.max_depth) {
            EXPECT_GE(*p.max_depth, 2);
            EXPECT_LE(*p.max_depth, 20);
        }
        depths.insert(p.max_depth.value_or(0));
        EXPECT_GE(p.min_samples_leaf, 1);
        EXPECT_LE(p.min_samples_leaf, 10);
        EXPECT_NE(p.features_per_split, FeatureFraction::All);
        EXPECT_TRUE(p.bootstrap);
        trees.insert(p.n_trees);
    }
    EXPECT_EQ(trees.size(), 5u);
    EXPECT_EQ(depths.size(), 20u);
    EXPECT_EQ(sample_search_space(10, 3), std::vector<ForestParams>(draws.begin(), draws.begin() + 10));
}

TEST(Train, PerfectlySeparable) {
    auto data = label_in_feature_zero(40, 5, 1);
    SearchOptions o;
    o.search_iters = 10;
    o.master_seed = 7;
    auto result = train_random_forest(data, o);
    ASSERT_TRUE(result.model.cv);
    EXPECT_EQ(result.model.cv->mean_accuracy, 1.0);
    for (const auto& r : data.rows) EXPECT_EQ(predict_proba(result.model, r.features) >= 0.5 ? 1 : 0, r.label);
}

TEST(Train, RandomLabelsStayNearChance) {
    auto data = random_labels(200, 10, 4);
    SearchOptions o;
    o.search_iters = 20;
    o.master_seed = 11;
    auto result = train_random_forest(data, o);
    double best = result.trials[result.best].mean_accuracy;
    EXPECT_GE(best, 0.35);
    EXPECT_LE(best, 0.65);
}

TEST(Train, DeterministicAcrossRunsThreadsAndRowOrder) {
    auto data = continuous(60, 4, 5);
    SearchOptions o;
    o.search_iters = 4;
    o.master_seed = 99;
    o.threads = 1;
    auto first = forest_to_json(train_random_forest(data, o).model);
    EXPECT_EQ(forest_to_json(train_random_forest(data, o).model), first);
    o.threads = 3;
    EXPECT_EQ(forest_to_json(train_random_forest(data, o).model), first);
    std::reverse(data.rows.begin(), data.rows.end());
    EXPECT_EQ(forest_to_json(train_random_forest(data, o).model), first);
}

TEST(Train, TieBreakPrefersSmallerForests) {
    auto data = label_in_feature_zero(40, 2, 2);
    SearchOptions o;
    o.search_iters = 30;
    auto result = train_random_forest(data, o);
    const auto& best = result.trials[result.best];
    for (const auto& t : result.trials) {
        if (t.mean_accuracy != best.mean_accuracy) {
            EXPECT_LT(t.mean_accuracy, best.mean_accuracy);
            continue;
        }
        EXPECT_GE(t.params.n_trees, best.params.n_trees);
    }
    EXPECT_EQ(result.model.params, best.params);
}

TEST(Train, Errors) {
    auto data = label_in_feature_zero(40, 1, 1);
    for (auto& r : data.rows) r.label = 1;
    EXPECT_THROW(train_random_forest(data), InvalidArgument);
    auto few = label_in_feature_zero(8, 1, 1);
    EXPECT_THROW(train_random_forest(few), InvalidArgument);
}

TEST(PredictProba, VoteFractions) {
    auto data = label_in_feature_zero(20, 0, 1);
    ForestParams p;
    p.n_trees = 4;
    p.bootstrap = false;
    auto model = fit_forest(data, p, 1);
    EXPECT_EQ(predict_proba(model, std::vector<double>{1}), 1.0);
    EXPECT_EQ(predict_proba(model, std::vector<double>{0}), 0.0);
    // flip two of the four trees
    for (std::size_t t = 0; t < 2; ++t)
        for (auto& n : model.trees[t].nodes) std::swap(n.leaf_counts[0], n.leaf_counts[1]);
    EXPECT_EQ(predict_proba(model, std::vector<double>{1}), 0.5);
    EXPECT_THROW(predict_proba(model, std::vector<double>{1, 2}), InvalidArgument);

    p.n_trees = 1;
    p.bootstrap = true;
    auto single = fit_forest(continuous(50, 3, 2), p, 3);
    for (const auto& r : continuous(50, 3, 8).rows) {
        double v = predict_proba(single, r.features);
        EXPECT_TRUE(v == 0.0 || v == 1.0);
    }
}

TEST(PredictProba, MissingValuesUseTrainingMedian) {
    auto data = make_dataset(1);
    for (int i = 0; i < 9; ++i) data.rows.push_back({D(node_name(i)), {static_cast<double>(i)}, i >= 5 ? 1 : 0});
    data.rows[0].features[0] = kMissing;
    ForestParams p;
    p.n_trees = 1;
    p.bootstrap = false;
    auto model = fit_forest(data, p, 1);
    EXPECT_EQ(model.imputation[0], 4.5);  // median of 1..8
    EXPECT_EQ(predict_proba(model, std::vector<double>{kMissing}), predict_proba(model, std::vector<double>{4.5}));
}

TEST(Importance, SignalFeatureDominates) {
    auto data = label_in_feature_zero(200, 9, 3);
    ForestParams p;
    p.n_trees = 50;
    p.features_per_split = FeatureFraction::Half;
    auto model = fit_forest(data, p, 5);
    EXPECT_EQ(exhaustive_split(data).feature, 0u);
    auto& imp = gini_importance(model);
    EXPECT_GT(imp[0], 0.9);
    double sum = 0;
    for (double v : imp) {
        EXPECT_GE(v, 0.0);
        sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Importance, ConstantLabelsGiveZero) {
    auto data = label_in_feature_zero(20, 3, 1);
    for (auto& r : data.rows) r.label = 0;
    auto model = fit_forest(data, ForestParams{}, 1);
    for (double v : gini_importance(model)) EXPECT_EQ(v, 0.0);
    for (const auto& t : model.trees) EXPECT_EQ(t.nodes.size(), 1u);
}

TEST(Importance, ColumnPermutationPermutesImportances) {
    auto data = continuous(120, 5, 21);
    ForestParams p;
    p.n_trees = 20;
    p.features_per_split = FeatureFraction::All;
    auto base = fit_forest(data, p, 4);
    const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
    auto permuted = make_dataset(5);
    for (std::size_t j = 0; j < 5; ++j) permuted.spec.metadata_features[j] = data.spec.metadata_features[perm[j]];
    for (const auto& r : data.rows) {
        std::vector<double> x(5);
        for (std::size_t j = 0; j < 5; ++j) x[j] = r.features[perm[j]];
        permuted.rows.push_back({r.domain, x, r.label});
    }
    auto other = fit_forest(permuted, p, 4);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_DOUBLE_EQ(other.importances[j], base.importances[perm[j]]);
}

TEST(Tree, StumpMatchesExhaustiveSplit) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        auto data = make_dataset(4);
        for (int i = 0; i < 2; ++i) {
            std::vector<double> x;
            for (int f = 0; f < 4; ++f) x.push_back(noise(rng));
            data.rows.push_back({D(node_name(i)), x, i});
        }
        ForestParams p;
        p.n_trees = 1;
        p.max_depth = 1;
        p.bootstrap = false;
        p.features_per_split = FeatureFraction::All;
        auto model = fit_forest(data, p, static_cast<std::uint64_t>(trial));
        auto oracle = exhaustive_split(data);
        ASSERT_EQ(model.trees[0].nodes.size(), 3u);
        EXPECT_EQ(model.trees[0].nodes[0].feature, static_cast<int>(oracle.feature));
        EXPECT_EQ(model.trees[0].nodes[0].threshold, oracle.threshold);
    }
    // larger samples: the stump still picks the exhaustive optimum
    for (int trial = 0; trial < 20; ++trial) {
        auto data = continuous(30, 4, static_cast<unsigned>(100 + trial));
        ForestParams p;
        p.n_trees = 1;
        p.max_depth = 1;
        p.bootstrap = false;
        p.features_per_split = FeatureFraction::All;
        auto model = fit_forest(data, p, 1);
        auto oracle = exhaustive_split(data);
        EXPECT_EQ(model.trees[0].nodes[0].feature, static_cast<int>(oracle.feature));
        EXPECT_EQ(model.trees[0].nodes[0].threshold, oracle.threshold);
    }
}

TEST(Tree, ConstantColumnNeverChanges) {
    auto data = continuous(80, 3, 13);
    ForestParams p;
    p.n_trees = 15;
    p.features_per_split = FeatureFraction::All;
    auto base = fit_forest(data, p, 2);
    auto padded = make_dataset(4);
    for (const auto& r : data.rows) {
        std::vector<double> x{7.0};
        x.insert(x.end(), r.features.begin(), r.features.end());
        padded.rows.push_back({r.domain, x, r.label});
    }
    auto with_constant = fit_forest(padded, p, 2);
    EXPECT_EQ(with_constant.importances[0], 0.0);
    for (const auto& t : with_constant.trees)
        for (const auto& n : t.nodes) EXPECT_NE(n.feature, 0);
    auto probe = continuous(40, 3, 77);
    for (const auto& r : probe.rows) {
        std::vector<double> x{7.0};
        x.insert(x.end(), r.features.begin(), r.features.end());
        EXPECT_EQ(predict_proba(with_constant, x), predict_proba(base, r.features));
    }
}

TEST(Tree, SeedsDerivedFromMasterSeed) {
    auto model = fit_forest(continuous(30, 2, 1), ForestParams{}, 1234);
    for (std::size_t t = 0; t < model.trees.size(); ++t) EXPECT_EQ(model.trees[t].seed, tree_seed(1234, t));
    EXPECT_NE(tree_seed(1234, 0), tree_seed(1234, 1));
    EXPECT_NE(tree_seed(1234, 0), tree_seed(1235, 0));
}

TEST(ModelFile, RoundTripIsByteIdentical) {
    auto data = continuous(60, 3, 4);
    data.rows[3].features[1] = kMissing;
    SearchOptions o;
    o.search_iters = 3;
    auto model = train_random_forest(data, o).model;
    model.holdout = {D("held.com")};
    auto text = forest_to_json(model);
    auto back = forest_from_json(text);
    EXPECT_EQ(back, model);
    EXPECT_EQ(forest_to_json(back), text);
    EXPECT_EQ(all_probas(back, data), all_probas(model, data));
}

TEST(ModelFile, RejectsMalformed) {
    EXPECT_THROW(forest_from_json("{}"), ParseError);
    EXPECT_THROW(forest_from_json("not json"), ParseError);
    auto model = fit_forest(continuous(20, 2, 1), ForestParams{2, 2, 1, FeatureFraction::All, false}, 1);
    auto text = forest_to_json(model);
    auto broken = text;
    broken.replace(broken.find("forest v1"), 9, "forest v9");
    EXPECT_THROW(forest_from_json(broken), ParseError);
    auto j = nlohmann::json::parse(text);
    j["trees"][0]["nodes"]["left"][0] = 99;
    EXPECT_THROW(forest_from_json(j.dump()), ParseError);
}

TEST(Evaluation, ReportContents) {
    auto data = continuous(80, 3, 6);
    auto model = fit_forest(data, ForestParams{20, 3, 1, FeatureFraction::All, true}, 1);
    auto report = evaluate_model(model, data, 2);
    EXPECT_EQ(report.rows, 80u);
    EXPECT_GT(report.roc_auc, 0.9);
    EXPECT_EQ(report.top_importances.size(), 2u);
    EXPECT_EQ(report.top_importances[0].first, "f0");
    auto json = nlohmann::json::parse(evaluation_json(report));
    EXPECT_EQ(json["roc_auc"].get<double>(), report.roc_auc);
    EXPECT_TRUE(json["curve_points"]["roc"][0]["threshold"].is_null());
    EXPECT_EQ(curve_points_csv(report).rfind("curve,x,y,threshold\nroc,0,0,inf\n", 0), 0u);

    auto other = make_dataset(2);
    EXPECT_THROW(evaluate_model(model, other), InvalidArgument);
}
