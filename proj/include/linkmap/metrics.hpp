#pragma once

#include <limits>
#include <span>
#include <vector>

namespace linkmap {

/// Labels are 0/1 with 1 the positive class. Every metric throws
/// InvalidArgument on a length mismatch, a label outside {0,1}, or labels
/// from a single class.

/// Probability that a random positive outscores a random negative, ties
/// counted 1/2.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Average precision: sum over distinct thresholds of
/// (recall_k - recall_{k-1}) * precision_k.
double pr_auc(std::span<const double> scores, std::span<const int> labels);

struct CurvePoint {
    double x = 0;
    double y = 0;
    double threshold = 0;  // predict positive when score >= threshold
};

/// (fpr, tpr) from (0, 0) at +inf down through every distinct score.
std::vector<CurvePoint> roc_curve(std::span<const double> scores, std::span<const int> labels);
/// (recall, precision) at every distinct score, highest threshold first.
std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const int> labels);

} // namespace linkmap
