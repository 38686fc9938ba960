#include "linkmap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "linkmap/error.hpp"

namespace linkmap {

namespace {

struct Sorted {
    std::vector<std::size_t> order;  // by score descending
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

Sorted sort_checked(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw InvalidArgument("metrics: scores and labels differ in length");
    Sorted s;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw InvalidArgument("metrics: labels must be 0 or 1");
        if (std::isnan(scores[i])) throw InvalidArgument("metrics: NaN score");
        (labels[i] ? s.positives : s.negatives)++;
    }
    if (s.positives == 0 || s.negatives == 0) throw InvalidArgument("metrics: single-class labels");
    s.order.resize(scores.size());
    std::iota(s.order.begin(), s.order.end(), 0);
    std::stable_sort(s.order.begin(), s.order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return s;
}

/// Calls visit(threshold, tp, fp) after each block of equal scores.
template <class Visit>
void sweep(std::span<const double> scores, std::span<const int> labels, const Sorted& s, Visit visit) {
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < s.order.size();) {
        const double t = scores[s.order[i]];
        while (i < s.order.size() && scores[s.order[i]] == t) {
            (labels[s.order[i]] ? tp : fp)++;
            ++i;
        }
        visit(t, tp, fp);
    }
}

} // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    const auto s = sort_checked(scores, labels);
    // twice the pair count: 2 per positive above a negative, 1 per tie
    unsigned long long doubled = 0;
    std::size_t tp_before = 0, fp_before = 0;
    sweep(scores, labels, s, [&](double, std::size_t tp, std::size_t fp) {
        const std::size_t block_pos = tp - tp_before, block_neg = fp - fp_before;
        doubled += 2ULL * block_pos * (s.negatives - fp) + 1ULL * block_pos * block_neg;
        tp_before = tp;
        fp_before = fp;
    });
    return static_cast<double>(doubled) / (2.0 * static_cast<double>(s.positives) * static_cast<double>(s.negatives));
}

double pr_auc(std::span<const double> scores, std::span<const int> labels) {
    const auto s = sort_checked(scores, labels);
    double ap = 0, prev_recall = 0;
    sweep(scores, labels, s, [&](double, std::size_t tp, std::size_t fp) {
        const double recall = static_cast<double>(tp) / static_cast<double>(s.positives);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    });
    return ap;
}

std::vector<CurvePoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
    const auto s = sort_checked(scores, labels);
    std::vector<CurvePoint> out{{0, 0, std::numeric_limits<double>::infinity()}};
    sweep(scores, labels, s, [&](double t, std::size_t tp, std::size_t fp) {
        out.push_back({static_cast<double>(fp) / static_cast<double>(s.negatives),
                       static_cast<double>(tp) / static_cast<double>(s.positives), t});
    });
    return out;
}

std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const int> labels) {
    const auto s = sort_checked(scores, labels);
    std::vector<CurvePoint> out;
    sweep(scores, labels, s, [&](double t, std::size_t tp, std::size_t fp) {
        out.push_back({static_cast<double>(tp) / static_cast<double>(s.positives),
                       static_cast<double>(tp) / static_cast<double>(tp + fp), t});
    });
    return out;
}

} // namespace linkmap
