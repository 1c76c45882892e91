#include "rotorvib/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace rotorvib {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts)
    for (const auto v : row) t += v;
  return t;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (int c = 0; c < kNumClasses; ++c) t += counts[c][c];
  return t;
}

ConfusionMatrix confusion(std::span<const int> preds,
                          std::span<const int> labels) {
  if (preds.size() != labels.size()) {
    throw std::invalid_argument("confusion: preds/labels length mismatch");
  }
  if (preds.empty()) throw std::invalid_argument("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= kNumClasses || preds[i] < 0 ||
        preds[i] >= kNumClasses) {
      throw std::out_of_range("confusion: class index out of range");
    }
    ++cm.counts[labels[i]][preds[i]];
  }
  return cm;
}

BinaryCounts one_vs_rest(const ConfusionMatrix& cm, int cls) {
  if (cls < 0 || cls >= kNumClasses) {
    throw std::out_of_range("one_vs_rest: class out of range");
  }
  BinaryCounts b;
  b.tp = cm.counts[cls][cls];
  for (int p = 0; p < kNumClasses; ++p) {
    if (p != cls) b.fn += cm.counts[cls][p];
  }
  for (int t = 0; t < kNumClasses; ++t) {
    if (t != cls) b.fp += cm.counts[t][cls];
  }
  b.tn = cm.total() - b.tp - b.fp - b.fn;
  return b;
}

double accuracy(const BinaryCounts& b) {
  const auto denom = b.tp + b.tn + b.fp + b.fn;
  return denom > 0 ? static_cast<double>(b.tp + b.tn) / denom : 0.0;
}

double precision(const BinaryCounts& b) {
  const auto denom = b.tp + b.fp;
  return denom > 0 ? static_cast<double>(b.tp) / denom : 0.0;
}

double recall(const BinaryCounts& b) {
  const auto denom = b.tp + b.fn;
  return denom > 0 ? static_cast<double>(b.tp) / denom : 0.0;
}

double f1_from_pr(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

double f1_score(const BinaryCounts& b) {
  return f1_from_pr(precision(b), recall(b));
}

Report build_report(const ConfusionMatrix& cm, std::string model_label) {
  Report r;
  r.model_label = std::move(model_label);
  r.cm = cm;
  const auto total = cm.total();
  r.overall_accuracy =
      total > 0 ? static_cast<double>(cm.trace()) / total : 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    const BinaryCounts b = one_vs_rest(cm, c);
    r.per_class[c] = {precision(b), recall(b), f1_score(b)};
    r.macro_precision += r.per_class[c].precision / kNumClasses;
    r.macro_recall += r.per_class[c].recall / kNumClasses;
    r.macro_f1 += r.per_class[c].f1 / kNumClasses;
  }
  return r;
}

std::string format_report_table(std::span<const Report> reports) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-14s%-24s%-10s%-11s%-8s%s\n", "Class",
                "Model", "Accuracy", "Precision", "Recall", "F1");
  out += line;
  for (const FaultClass cls : kReportClassOrder) {
    const int c = class_index(cls);
    for (const Report& r : reports) {
      std::snprintf(line, sizeof(line), "%-14s%-24s%-10.2f%-11.2f%-8.2f%.2f\n",
                    std::string(to_string(cls)).c_str(),
                    r.model_label.c_str(), r.overall_accuracy,
                    r.per_class[c].precision, r.per_class[c].recall,
                    r.per_class[c].f1);
      out += line;
    }
  }
  for (const Report& r : reports) {
    std::snprintf(line, sizeof(line), "%-14s%-24s%-10.2f%-11.2f%-8.2f%.2f\n",
                  "macro", r.model_label.c_str(), r.overall_accuracy,
                  r.macro_precision, r.macro_recall, r.macro_f1);
    out += line;
  }
  return out;
}

}  // namespace rotorvib
