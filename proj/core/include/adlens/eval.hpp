#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adlens/model.hpp"
#include "adlens/sampling.hpp"

namespace adlens::eval {

struct ConfusionMatrix {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;

  long long total() const { return tp + fp + fn + tn; }
  void add(int label, bool predicted_positive);
};

// Metrics for the positive (sponsored) class. A metric whose denominator
// is zero is reported as null rather than forced to a number.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

Metrics compute_metrics(const ConfusionMatrix& cm);

using Predictor = std::function<double(const sampling::LabeledExample&)>;
using Trainer = std::function<Predictor(const sampling::LabeledSet&)>;

ConfusionMatrix evaluate(const Predictor& predict, const sampling::LabeledSet& test,
                         double threshold);

struct FoldResult {
  ConfusionMatrix confusion;
  Metrics metrics;
  size_t test_size = 0;
};

struct CrossValResult {
  std::vector<FoldResult> folds;
  Metrics mean;
  Metrics stddev;
};

// Trains on k-1 folds and evaluates the held-out fold, k times. Fold
// membership comes from sampling::kfold_partition under the same seed.
// The trainer must refit any vocabulary/standardization itself, so no
// test-fold information can leak in.
CrossValResult cross_validate(const Trainer& trainer, const sampling::LabeledSet& set, int k,
                              uint64_t seed, double threshold = 0.5);

// One post that the rule-based labeler did NOT mark as sponsored.
struct HiddenCandidate {
  std::string id;
  TierLabel tier = TierLabel::Nano;
  std::vector<int> sequence;
  std::vector<double> numeric;  // standardized
};

struct TierAudit {
  size_t total = 0;
  size_t flagged = 0;

  double fraction() const { return total == 0 ? 0.0 : static_cast<double>(flagged) / static_cast<double>(total); }
};

struct HiddenAuditReport {
  double threshold = 0.5;
  std::map<TierLabel, TierAudit> per_tier;
  size_t total = 0;
  size_t flagged = 0;
  std::vector<std::string> flagged_ids;

  double global_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(flagged) / static_cast<double>(total);
  }
  std::string to_json_string() const;
};

// Flags every candidate whose predicted probability is >= threshold.
HiddenAuditReport detect_hidden(const std::function<double(const HiddenCandidate&)>& score,
                                const std::vector<HiddenCandidate>& candidates, double threshold);

std::string metrics_to_json(const Metrics& m);

// Aligned text table: one row per (model name, metrics).
std::string format_metrics_table(const std::vector<std::pair<std::string, Metrics>>& rows);

}  // namespace adlens::eval
