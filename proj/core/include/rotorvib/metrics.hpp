#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rotorvib/signal.hpp"

namespace rotorvib {

/// counts[t][p] = number of examples with true class t predicted as p.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kNumClasses>, kNumClasses> counts{};

  std::int64_t total() const;
  std::int64_t trace() const;
};

ConfusionMatrix confusion(std::span<const int> preds,
                          std::span<const int> labels);

struct BinaryCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

/// One-vs-rest reduction for class c: TP = cm[c][c], FN = rest of row c,
/// FP = rest of column c, TN = everything else.
BinaryCounts one_vs_rest(const ConfusionMatrix& cm, int cls);

/// 0/0 cases return 0 so absent classes never score perfectly.
double accuracy(const BinaryCounts& b);
double precision(const BinaryCounts& b);
double recall(const BinaryCounts& b);
double f1_score(const BinaryCounts& b);
double f1_from_pr(double precision, double recall);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct Report {
  std::string model_label;
  ConfusionMatrix cm;
  std::array<ClassMetrics, kNumClasses> per_class{};
  double overall_accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

Report build_report(const ConfusionMatrix& cm, std::string model_label);

/// Row order used by the printed tables (the experiment's reporting order,
/// not the enum encoding).
inline constexpr std::array<FaultClass, kNumClasses> kReportClassOrder = {
    FaultClass::Normal, FaultClass::Rubbing, FaultClass::Unbalance,
    FaultClass::Misalignment};

/// Aligned per-class comparison table; one row per (class, model), values
/// printed with two decimals, macro summary appended per model.
std::string format_report_table(std::span<const Report> reports);

}  // namespace rotorvib
