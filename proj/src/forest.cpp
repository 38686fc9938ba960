#include "linkmap/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "linkmap/error.hpp"
#include "linkmap/io.hpp"
#include "linkmap/random.hpp"

namespace linkmap {

std::string to_string(FeatureFraction f) {
    switch (f) {
    case FeatureFraction::Sqrt: return "sqrt";
    case FeatureFraction::Log2: return "log2";
    case FeatureFraction::Quarter: return "0.25";
    case FeatureFraction::Half: return "0.5";
    case FeatureFraction::All: return "all";
    }
    return "sqrt";
}

FeatureFraction parse_feature_fraction(std::string_view text) {
    for (auto f : {FeatureFraction::Sqrt, FeatureFraction::Log2, FeatureFraction::Quarter, FeatureFraction::Half,
                   FeatureFraction::All})
        if (to_string(f) == text) return f;
    throw InvalidArgument("features_per_split must be sqrt, log2, 0.25, 0.5 or all");
}

std::size_t features_per_split(FeatureFraction f, std::size_t total) {
    const double n = static_cast<double>(total);
    double m = n;
    switch (f) {
    case FeatureFraction::Sqrt: m = std::sqrt(n); break;
    case FeatureFraction::Log2: m = total > 0 ? std::log2(n) : 0; break;
    case FeatureFraction::Quarter: m = 0.25 * n; break;
    case FeatureFraction::Half: m = 0.5 * n; break;
    case FeatureFraction::All: break;
    }
    return std::clamp<std::size_t>(static_cast<std::size_t>(m), 1, std::max<std::size_t>(total, 1));
}

std::uint64_t tree_seed(std::uint64_t master_seed, std::size_t tree_index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(tree_index));
}

int DecisionTree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0)
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                                          : nodes[i].right);
    return nodes[i].leaf_counts[1] > nodes[i].leaf_counts[0] ? 1 : 0;
}

namespace {

constexpr std::uint64_t kSearchStream = 0x5EA2C4;
constexpr std::uint64_t kFoldStream = 0xF01D5;
constexpr std::uint64_t kTrialStream = 0x7121A1;

unsigned resolve_threads(unsigned requested) {
    return requested ? requested : std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, count) on up to `threads` workers. Each task
/// writes only its own slot, so results do not depend on scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task) {
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t)
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mu);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

/// Column-major training matrix with missing values already imputed.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
    std::vector<char> binary;  // column holds only 0 and 1
    std::vector<std::size_t> name_rank;  // equal split gains go to the smaller name
    std::vector<int> labels;

    const double* column(std::size_t f) const { return data.data() + f * rows; }
};

std::vector<double> fit_imputation(const std::vector<const LabeledRow*>& rows, std::size_t cols) {
    std::vector<double> medians(cols, 0.0);
    std::vector<double> present;
    for (std::size_t f = 0; f < cols; ++f) {
        present.clear();
        for (const auto* r : rows)
            if (!std::isnan(r->features[f])) present.push_back(r->features[f]);
        if (present.empty()) continue;
        std::sort(present.begin(), present.end());
        const auto mid = present.size() / 2;
        medians[f] = present.size() % 2 ? present[mid] : (present[mid - 1] + present[mid]) / 2.0;
    }
    return medians;
}

Matrix make_matrix(const std::vector<const LabeledRow*>& rows, const std::vector<std::string>& names,
                   const std::vector<double>& imputation) {
    Matrix m;
    m.rows = rows.size();
    m.cols = imputation.size();
    std::vector<std::size_t> by_name(m.cols);
    std::iota(by_name.begin(), by_name.end(), 0);
    std::stable_sort(by_name.begin(), by_name.end(), [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
    m.name_rank.resize(m.cols);
    for (std::size_t r = 0; r < m.cols; ++r) m.name_rank[by_name[r]] = r;
    m.data.resize(m.rows * m.cols);
    m.binary.assign(m.cols, 1);
    for (std::size_t i = 0; i < m.rows; ++i) {
        m.labels.push_back(rows[i]->label);
        for (std::size_t f = 0; f < m.cols; ++f) {
            double v = rows[i]->features[f];
            if (std::isnan(v)) v = imputation[f];
            m.data[f * m.rows + i] = v;
            if (v != 0.0 && v != 1.0) m.binary[f] = 0;
        }
    }
    return m;
}

/// W * gini for class weights (c0, c1), W = c0 + c1.
double weighted_gini(double c0, double c1) {
    const double w = c0 + c1;
    return w > 0 ? w - (c0 * c0 + c1 * c1) / w : 0.0;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const ForestParams& params, std::uint64_t seed)
        : x_(x), params_(params), rng_(seed), importance_(x.cols, 0.0) {
        tree_.seed = seed;
        features_.resize(x.cols);
        std::iota(features_.begin(), features_.end(), 0);
        per_split_ = features_per_split(params.features_per_split, x.cols);
    }

    DecisionTree build() {
        weight_.assign(x_.rows, 0);
        if (params_.bootstrap) {
            for (std::size_t i = 0; i < x_.rows; ++i) ++weight_[uniform_below(rng_, x_.rows)];
        } else {
            std::fill(weight_.begin(), weight_.end(), 1u);
        }
        std::vector<std::uint32_t> root;
        for (std::uint32_t i = 0; i < x_.rows; ++i)
            if (weight_[i]) root.push_back(i);

        struct Pending {
            std::size_t node;
            std::vector<std::uint32_t> samples;
            int depth;
        };
        tree_.nodes.emplace_back();
        std::vector<Pending> stack;
        stack.push_back({0, std::move(root), 0});
        while (!stack.empty()) {
            auto job = std::move(stack.back());
            stack.pop_back();
            auto children = split_node(job.node, job.samples, job.depth);
            if (!children) continue;
            auto& [left, right] = *children;
            stack.push_back({static_cast<std::size_t>(tree_.nodes[job.node].right), std::move(right), job.depth + 1});
            stack.push_back({static_cast<std::size_t>(tree_.nodes[job.node].left), std::move(left), job.depth + 1});
        }
        return std::move(tree_);
    }

    const std::vector<double>& importance() const { return importance_; }

private:
    struct Split {
        int feature = -1;
        double threshold = 0;
        double decrease = -std::numeric_limits<double>::infinity();
    };

    std::optional<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>>
    split_node(std::size_t node, const std::vector<std::uint32_t>& samples, int depth) {
        std::array<double, 2> counts{0, 0};
        for (auto i : samples) counts[static_cast<std::size_t>(x_.labels[i])] += weight_[i];
        tree_.nodes[node].leaf_counts = {static_cast<std::uint32_t>(counts[0]), static_cast<std::uint32_t>(counts[1])};
        const double total = counts[0] + counts[1];
        if (counts[0] == 0 || counts[1] == 0) return std::nullopt;
        if (params_.max_depth && depth >= *params_.max_depth) return std::nullopt;
        if (total < 2.0 * params_.min_samples_leaf) return std::nullopt;

        const double parent = weighted_gini(counts[0], counts[1]);
        Split best;
        auto consider = [&](std::size_t f) {
            if (x_.binary[f]) scan_binary(f, samples, counts, parent, best);
            else scan_sorted(f, samples, counts, parent, best);
        };
        if (per_split_ >= features_.size()) {
            for (std::size_t f = 0; f < features_.size(); ++f) consider(f);
        } else {
            for (std::size_t k = 0; k < per_split_; ++k) {
                std::swap(features_[k], features_[k + uniform_below(rng_, features_.size() - k)]);
                consider(features_[k]);
            }
        }
        if (best.feature < 0) return std::nullopt;

        std::vector<std::uint32_t> left, right;
        const double* col = x_.column(static_cast<std::size_t>(best.feature));
        for (auto i : samples) (col[i] <= best.threshold ? left : right).push_back(i);
        importance_[static_cast<std::size_t>(best.feature)] += std::max(0.0, best.decrease);

        auto& n = tree_.nodes[node];
        n.feature = best.feature;
        n.threshold = best.threshold;
        n.left = static_cast<int>(tree_.nodes.size());
        n.right = n.left + 1;
        tree_.nodes.emplace_back();
        tree_.nodes.emplace_back();
        return std::make_pair(std::move(left), std::move(right));
    }

    void offer(std::size_t f, double threshold, std::array<double, 2> left, const std::array<double, 2>& total,
               double parent, Split& best) const {
        const double wl = left[0] + left[1];
        const double wr = total[0] + total[1] - wl;
        if (wl < params_.min_samples_leaf || wr < params_.min_samples_leaf || wl <= 0 || wr <= 0) return;
        const double decrease =
            parent - weighted_gini(left[0], left[1]) - weighted_gini(total[0] - left[0], total[1] - left[1]);
        const bool better = decrease > best.decrease ||
                            (decrease == best.decrease && best.feature >= 0 &&
                             x_.name_rank[f] < x_.name_rank[static_cast<std::size_t>(best.feature)]);
        if (better) best = {static_cast<int>(f), threshold, decrease};
    }

    void scan_binary(std::size_t f, const std::vector<std::uint32_t>& samples, const std::array<double, 2>& total,
                     double parent, Split& best) const {
        const double* col = x_.column(f);
        std::array<double, 2> zeros{0, 0};
        for (auto i : samples)
            if (col[i] == 0.0) zeros[static_cast<std::size_t>(x_.labels[i])] += weight_[i];
        offer(f, 0.5, zeros, total, parent, best);
    }

    void scan_sorted(std::size_t f, const std::vector<std::uint32_t>& samples, const std::array<double, 2>& total,
                     double parent, Split& best) {
        const double* col = x_.column(f);
        order_.assign(samples.begin(), samples.end());
        std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
            return col[a] != col[b] ? col[a] < col[b] : a < b;
        });
        std::array<double, 2> left{0, 0};
        for (std::size_t k = 0; k + 1 < order_.size(); ++k) {
            const auto i = order_[k];
            left[static_cast<std::size_t>(x_.labels[i])] += weight_[i];
            const double lo = col[i], hi = col[order_[k + 1]];
            if (lo == hi) continue;
            double mid = lo + (hi - lo) / 2.0;
            if (!(mid < hi)) mid = lo;
            offer(f, mid, left, total, parent, best);
        }
    }

    const Matrix& x_;
    const ForestParams& params_;
    Rng rng_;
    DecisionTree tree_;
    std::vector<std::uint32_t> weight_;
    std::vector<std::size_t> features_;
    std::vector<std::uint32_t> order_;
    std::size_t per_split_ = 1;
    std::vector<double> importance_;
};

void check_classes(const std::vector<const LabeledRow*>& rows) {
    std::size_t pos = 0;
    for (const auto* r : rows) pos += r->label == 1;
    if (rows.empty() || pos == 0 || pos == rows.size()) throw InvalidArgument("degenerate-labels: both classes are required");
}

std::vector<const LabeledRow*> canonical_rows(const LabeledDataset& data) {
    std::vector<const LabeledRow*> rows;
    const auto width = data.spec.size();
    for (const auto& r : data.rows) {
        if (r.features.size() != width) throw InvalidArgument("row " + r.domain.str() + " does not match the feature spec");
        if (r.label != 0 && r.label != 1) throw InvalidArgument("labels must be 0 or 1");
        rows.push_back(&r);
    }
    std::sort(rows.begin(), rows.end(), [](const LabeledRow* a, const LabeledRow* b) { return a->domain < b->domain; });
    return rows;
}

ForestModel fit_rows(const std::vector<const LabeledRow*>& rows, const std::vector<std::string>& names,
                     const ForestParams& params, std::uint64_t master_seed, unsigned threads) {
    if (params.n_trees < 1 || params.min_samples_leaf < 1 || (params.max_depth && *params.max_depth < 1))
        throw InvalidArgument("forest hyperparameters out of range");
    if (rows.empty()) throw InvalidArgument("cannot fit a forest on zero rows");
    ForestModel model;
    model.params = params;
    model.master_seed = master_seed;
    model.feature_names = names;
    model.imputation = fit_imputation(rows, names.size());
    const Matrix x = make_matrix(rows, names, model.imputation);

    const auto n_trees = static_cast<std::size_t>(params.n_trees);
    model.trees.resize(n_trees);
    std::vector<std::vector<double>> per_tree(n_trees);
    parallel_for(n_trees, threads, [&](std::size_t t) {
        TreeBuilder builder(x, params, tree_seed(master_seed, t));
        model.trees[t] = builder.build();
        per_tree[t] = builder.importance();
    });

    model.importances.assign(names.size(), 0.0);
    for (auto& imp : per_tree) {
        const double sum = std::accumulate(imp.begin(), imp.end(), 0.0);
        if (sum <= 0) continue;
        for (std::size_t f = 0; f < imp.size(); ++f) model.importances[f] += imp[f] / sum;
    }
    const double total = std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
    if (total > 0)
        for (auto& v : model.importances) v /= total;
    return model;
}

double depth_key(const ForestParams& p) { return p.max_depth ? *p.max_depth : std::numeric_limits<double>::infinity(); }

} // namespace

ForestModel fit_forest(const LabeledDataset& data, const ForestParams& params, std::uint64_t master_seed, unsigned threads) {
    return fit_rows(canonical_rows(data), data.spec.column_names(), params, master_seed, resolve_threads(threads));
}

std::vector<ForestParams> sample_search_space(int count, std::uint64_t seed) {
    static const FeatureFraction fractions[] = {FeatureFraction::Sqrt, FeatureFraction::Log2, FeatureFraction::Quarter,
                                                FeatureFraction::Half};
    Rng rng(seed);
    std::vector<ForestParams> out;
    for (int i = 0; i < count; ++i) {
        ForestParams p;
        p.n_trees = 100 * static_cast<int>(1 + uniform_below(rng, 5));
        auto depth = uniform_below(rng, 20);  // 0..18 -> 2..20, 19 -> unlimited
        if (depth < 19) p.max_depth = static_cast<int>(depth) + 2;
        p.min_samples_leaf = static_cast<int>(1 + uniform_below(rng, 10));
        p.features_per_split = fractions[uniform_below(rng, 4)];
        out.push_back(p);
    }
    return out;
}

TrainResult train_random_forest(const LabeledDataset& data, const SearchOptions& options) {
    if (options.search_iters < 1 || options.folds < 2) throw InvalidArgument("need search_iters >= 1 and folds >= 2");
    const auto rows = canonical_rows(data);
    check_classes(rows);
    const auto folds = static_cast<std::size_t>(options.folds);

    // stratified fold assignment: shuffle each class, deal round-robin
    std::vector<std::size_t> fold_of(rows.size());
    for (int cls : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i]->label == cls) idx.push_back(i);
        if (idx.size() < folds)
            throw InvalidArgument("degenerate-labels: class " + std::to_string(cls) + " has fewer rows than folds");
        Rng rng(derive_seed(derive_seed(options.master_seed, kFoldStream), static_cast<std::uint64_t>(cls)));
        shuffle_in_place(idx, rng);
        for (std::size_t k = 0; k < idx.size(); ++k) fold_of[idx[k]] = k % folds;
    }

    const auto names = data.spec.column_names();
    TrainResult result;
    const auto candidates = sample_search_space(options.search_iters, derive_seed(options.master_seed, kSearchStream));
    struct FoldScore {
        double accuracy = 0, roc = 0, pr = 0;
    };
    std::vector<FoldScore> scores(candidates.size() * folds);
    parallel_for(scores.size(), resolve_threads(options.threads), [&](std::size_t task) {
        const std::size_t trial = task / folds, fold = task % folds;
        std::vector<const LabeledRow*> train, test;
        for (std::size_t i = 0; i < rows.size(); ++i) (fold_of[i] == fold ? test : train).push_back(rows[i]);
        const auto seed = derive_seed(derive_seed(options.master_seed, kTrialStream + trial), fold);
        const auto model = fit_rows(train, names, candidates[trial], seed, 1);
        std::vector<double> proba;
        std::vector<int> labels;
        std::size_t correct = 0;
        for (const auto* r : test) {
            proba.push_back(predict_proba(model, r->features));
            labels.push_back(r->label);
            correct += (proba.back() >= 0.5 ? 1 : 0) == r->label;
        }
        scores[task] = {static_cast<double>(correct) / static_cast<double>(test.size()), roc_auc(proba, labels),
                        pr_auc(proba, labels)};
    });

    for (std::size_t t = 0; t < candidates.size(); ++t) {
        SearchTrial trial{candidates[t]};
        for (std::size_t k = 0; k < folds; ++k) {
            trial.mean_accuracy += scores[t * folds + k].accuracy;
            trial.mean_roc_auc += scores[t * folds + k].roc;
            trial.mean_pr_auc += scores[t * folds + k].pr;
        }
        trial.mean_accuracy /= static_cast<double>(folds);
        trial.mean_roc_auc /= static_cast<double>(folds);
        trial.mean_pr_auc /= static_cast<double>(folds);
        result.trials.push_back(trial);
    }
    for (std::size_t t = 1; t < result.trials.size(); ++t) {
        const auto& c = result.trials[t];
        const auto& b = result.trials[result.best];
        if (c.mean_accuracy != b.mean_accuracy) {
            if (c.mean_accuracy > b.mean_accuracy) result.best = t;
        } else if (c.params.n_trees != b.params.n_trees) {
            if (c.params.n_trees < b.params.n_trees) result.best = t;
        } else if (depth_key(c.params) < depth_key(b.params)) {
            result.best = t;
        }
    }

    const auto& best = result.trials[result.best];
    result.model = fit_rows(rows, names, best.params, options.master_seed, resolve_threads(options.threads));
    result.model.cv = CvSummary{options.folds, options.search_iters, best.mean_accuracy, best.mean_roc_auc, best.mean_pr_auc};
    return result;
}

double predict_proba(const ForestModel& model, std::span<const double> x) {
    if (x.size() != model.feature_names.size())
        throw InvalidArgument("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                              std::to_string(model.feature_names.size()));
    if (model.trees.empty()) throw InvalidArgument("model has no trees");
    std::vector<double> filled;
    std::span<const double> input = x;
    if (std::any_of(x.begin(), x.end(), [](double v) { return std::isnan(v); })) {
        filled.assign(x.begin(), x.end());
        for (std::size_t f = 0; f < filled.size(); ++f)
            if (std::isnan(filled[f])) filled[f] = model.imputation[f];
        input = filled;
    }
    std::size_t votes = 0;
    for (const auto& t : model.trees) votes += static_cast<std::size_t>(t.predict(input));
    return static_cast<double>(votes) / static_cast<double>(model.trees.size());
}

const std::vector<double>& gini_importance(const ForestModel& model) { return model.importances; }

namespace {

using ojson = nlohmann::ordered_json;

ojson cv_to_json(const CvSummary& cv) {
    ojson j;
    j["folds"] = cv.folds;
    j["search_iters"] = cv.search_iters;
    j["mean_accuracy"] = cv.mean_accuracy;
    j["mean_roc_auc"] = cv.mean_roc_auc;
    j["mean_pr_auc"] = cv.mean_pr_auc;
    return j;
}

CvSummary cv_from_json(const nlohmann::json& j) {
    return {j.at("folds").get<int>(), j.at("search_iters").get<int>(), j.at("mean_accuracy").get<double>(),
            j.at("mean_roc_auc").get<double>(), j.at("mean_pr_auc").get<double>()};
}

} // namespace

std::string forest_to_json(const ForestModel& model) {
    ojson j;
    j["format"] = "forest v1";
    j["master_seed"] = model.master_seed;
    ojson hp;
    hp["n_trees"] = model.params.n_trees;
    hp["max_depth"] = model.params.max_depth ? ojson(*model.params.max_depth) : ojson(nullptr);
    hp["min_samples_leaf"] = model.params.min_samples_leaf;
    hp["features_per_split"] = to_string(model.params.features_per_split);
    hp["bootstrap"] = model.params.bootstrap;
    j["hyperparams"] = hp;
    j["feature_names"] = model.feature_names;
    j["imputation"] = model.imputation;
    j["importances"] = model.importances;
    if (model.cv) j["cv"] = cv_to_json(*model.cv);
    if (!model.holdout.empty()) {
        j["holdout"] = ojson::array();
        for (const auto& d : model.holdout) j["holdout"].push_back(d.str());
    }
    j["trees"] = ojson::array();
    for (const auto& t : model.trees) {
        ojson nodes;
        ojson feature = ojson::array(), threshold = ojson::array(), left = ojson::array(), right = ojson::array(),
              counts = ojson::array();
        for (const auto& n : t.nodes) {
            feature.push_back(n.feature);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            counts.push_back({n.leaf_counts[0], n.leaf_counts[1]});
        }
        nodes["feature"] = std::move(feature);
        nodes["threshold"] = std::move(threshold);
        nodes["left"] = std::move(left);
        nodes["right"] = std::move(right);
        nodes["leaf_counts"] = std::move(counts);
        ojson tree;
        tree["seed"] = t.seed;
        tree["nodes"] = std::move(nodes);
        j["trees"].push_back(std::move(tree));
    }
    return j.dump() + "\n";
}

ForestModel forest_from_json(std::string_view text) {
    ForestModel m;
    try {
        auto j = nlohmann::json::parse(text);
        if (j.at("format") != "forest v1") throw ParseError("model: unsupported format, expected forest v1");
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        const auto& hp = j.at("hyperparams");
        m.params.n_trees = hp.at("n_trees").get<int>();
        if (!hp.at("max_depth").is_null()) m.params.max_depth = hp.at("max_depth").get<int>();
        m.params.min_samples_leaf = hp.at("min_samples_leaf").get<int>();
        m.params.features_per_split = parse_feature_fraction(hp.at("features_per_split").get<std::string>());
        m.params.bootstrap = hp.at("bootstrap").get<bool>();
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        m.imputation = j.at("imputation").get<std::vector<double>>();
        m.importances = j.at("importances").get<std::vector<double>>();
        if (j.contains("cv")) m.cv = cv_from_json(j.at("cv"));
        if (j.contains("holdout"))
            for (const auto& d : j.at("holdout")) m.holdout.push_back(DomainKey::from_canonical(d.get<std::string>()));
        const auto width = m.feature_names.size();
        if (m.imputation.size() != width || m.importances.size() != width)
            throw ParseError("model: per-feature arrays disagree with feature_names");
        for (const auto& jt : j.at("trees")) {
            DecisionTree t;
            t.seed = jt.at("seed").get<std::uint64_t>();
            const auto& n = jt.at("nodes");
            auto feature = n.at("feature").get<std::vector<int>>();
            auto threshold = n.at("threshold").get<std::vector<double>>();
            auto left = n.at("left").get<std::vector<int>>();
            auto right = n.at("right").get<std::vector<int>>();
            auto counts = n.at("leaf_counts").get<std::vector<std::array<std::uint32_t, 2>>>();
            const auto size = feature.size();
            if (size == 0 || threshold.size() != size || left.size() != size || right.size() != size || counts.size() != size)
                throw ParseError("model: tree node arrays differ in length");
            for (std::size_t i = 0; i < size; ++i) {
                TreeNode node{feature[i], threshold[i], left[i], right[i], counts[i]};
                const bool leaf = node.feature < 0;
                const auto in_range = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(size); };
                if (leaf ? (node.feature != -1 || node.left != -1 || node.right != -1)
                         : (static_cast<std::size_t>(node.feature) >= width || !in_range(node.left) || !in_range(node.right)))
                    throw ParseError("model: malformed node " + std::to_string(i));
                t.nodes.push_back(node);
            }
            m.trees.push_back(std::move(t));
        }
        if (m.trees.size() != static_cast<std::size_t>(m.params.n_trees)) throw ParseError("model: tree count mismatch");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
    return m;
}

void save_forest(const std::string& path, const ForestModel& model) { write_file_atomic(path, forest_to_json(model)); }

ForestModel load_forest(const std::string& path) { return forest_from_json(read_file(path)); }

EvaluationReport evaluate_model(const ForestModel& model, const LabeledDataset& data, std::size_t top_n) {
    if (data.spec.column_names() != model.feature_names)
        throw InvalidArgument("dataset columns do not match the model's feature names");
    EvaluationReport r;
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& row : data.rows) {
        scores.push_back(predict_proba(model, row.features));
        labels.push_back(row.label);
    }
    r.rows = data.rows.size();
    r.positives = data.positives();
    r.roc_auc = roc_auc(scores, labels);
    r.pr_auc = pr_auc(scores, labels);
    r.roc_points = roc_curve(scores, labels);
    r.pr_points = pr_curve(scores, labels);
    std::vector<std::size_t> order(model.importances.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return model.importances[a] != model.importances[b] ? model.importances[a] > model.importances[b]
                                                            : model.feature_names[a] < model.feature_names[b];
    });
    for (std::size_t i = 0; i < order.size() && i < top_n; ++i)
        r.top_importances.emplace_back(model.feature_names[order[i]], model.importances[order[i]]);
    r.cv = model.cv;
    return r;
}

std::string evaluation_json(const EvaluationReport& report) {
    ojson j;
    j["rows"] = report.rows;
    j["positives"] = report.positives;
    j["roc_auc"] = report.roc_auc;
    j["pr_auc"] = report.pr_auc;
    ojson roc = ojson::array(), pr = ojson::array();
    for (const auto& p : report.roc_points)
        roc.push_back({{"fpr", p.x}, {"tpr", p.y}, {"threshold", std::isfinite(p.threshold) ? ojson(p.threshold) : ojson(nullptr)}});
    for (const auto& p : report.pr_points) pr.push_back({{"recall", p.x}, {"precision", p.y}, {"threshold", p.threshold}});
    j["curve_points"] = {{"roc", roc}, {"pr", pr}};
    j["importances_topN"] = ojson::array();
    for (const auto& [name, value] : report.top_importances)
        j["importances_topN"].push_back({{"feature", name}, {"importance", value}});
    if (report.cv) j["cv"] = cv_to_json(*report.cv);
    return j.dump(2) + "\n";
}

std::string curve_points_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "curve,x,y,threshold\n";
    for (const auto& p : report.roc_points)
        out << "roc," << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.threshold) << '\n';
    for (const auto& p : report.pr_points)
        out << "pr," << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.threshold) << '\n';
    return out.str();
}

} // namespace linkmap
