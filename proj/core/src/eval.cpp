#include "adlens/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "adlens/util.hpp"
#include "json.hpp"

namespace adlens::eval {

void ConfusionMatrix::add(int label, bool predicted_positive) {
  if (label == 1) {
    predicted_positive ? ++tp : ++fn;
  } else {
    predicted_positive ? ++fp : ++tn;
  }
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  long long n = cm.total();
  if (n == 0) throw DataError("cannot compute metrics over zero examples");
  Metrics m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(n);
  if (cm.tp + cm.fp > 0) {
    m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  }
  if (cm.tp + cm.fn > 0) {
    m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  }
  if (m.precision.has_value() && m.recall.has_value() && *m.precision + *m.recall > 0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

ConfusionMatrix evaluate(const Predictor& predict, const sampling::LabeledSet& test,
                         double threshold) {
  ConfusionMatrix cm;
  for (const auto& e : test.examples) {
    cm.add(e.label, predict(e) >= threshold);
  }
  return cm;
}

namespace {

struct Welford {
  double sum = 0, sum_sq = 0;
  size_t n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  std::optional<double> mean() const {
    return n == 0 ? std::nullopt : std::optional<double>(sum / static_cast<double>(n));
  }
  std::optional<double> stddev() const {
    if (n == 0) return std::nullopt;
    double m = sum / static_cast<double>(n);
    double var = std::max(0.0, sum_sq / static_cast<double>(n) - m * m);
    return std::sqrt(var);
  }
};

}  // namespace

CrossValResult cross_validate(const Trainer& trainer, const sampling::LabeledSet& set, int k,
                              uint64_t seed, double threshold) {
  auto folds = sampling::kfold_partition(set, k, seed);
  CrossValResult result;
  Welford acc, prec, rec, f1;

  for (size_t f = 0; f < folds.size(); ++f) {
    std::vector<bool> in_test(set.examples.size(), false);
    for (size_t idx : folds[f]) in_test[idx] = true;

    sampling::LabeledSet train, test;
    train.seed = test.seed = seed;
    for (size_t i = 0; i < set.examples.size(); ++i) {
      (in_test[i] ? test : train).examples.push_back(set.examples[i]);
    }
    if (train.count_label(0) == 0 || train.count_label(1) == 0) {
      throw DataError("fold " + std::to_string(f) + " leaves a training side with one class");
    }

    // Leakage guard: ids must not cross the fold boundary.
    std::vector<std::string> train_id_list = train.ids();
    std::set<std::string> train_ids(train_id_list.begin(), train_id_list.end());
    for (const std::string& id : test.ids()) {
      if (train_ids.contains(id)) {
        throw DataError("fold " + std::to_string(f) + " shares post '" + id + "' across sides");
      }
    }

    Predictor predictor = trainer(train);
    FoldResult fold;
    fold.confusion = evaluate(predictor, test, threshold);
    fold.metrics = compute_metrics(fold.confusion);
    fold.test_size = test.examples.size();
    if (fold.metrics.accuracy) acc.add(*fold.metrics.accuracy);
    if (fold.metrics.precision) prec.add(*fold.metrics.precision);
    if (fold.metrics.recall) rec.add(*fold.metrics.recall);
    if (fold.metrics.f1) f1.add(*fold.metrics.f1);
    result.folds.push_back(std::move(fold));
  }

  result.mean = {acc.mean(), prec.mean(), rec.mean(), f1.mean()};
  result.stddev = {acc.stddev(), prec.stddev(), rec.stddev(), f1.stddev()};
  return result;
}

HiddenAuditReport detect_hidden(const std::function<double(const HiddenCandidate&)>& score,
                                const std::vector<HiddenCandidate>& candidates, double threshold) {
  HiddenAuditReport report;
  report.threshold = threshold;
  for (const HiddenCandidate& c : candidates) {
    TierAudit& tier = report.per_tier[c.tier];
    ++tier.total;
    ++report.total;
    if (score(c) >= threshold) {
      ++tier.flagged;
      ++report.flagged;
      report.flagged_ids.push_back(c.id);
    }
  }
  std::sort(report.flagged_ids.begin(), report.flagged_ids.end());
  return report;
}

namespace {
nlohmann::json opt_to_json(const std::optional<double>& v) {
  return v.has_value() ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
}  // namespace

std::string HiddenAuditReport::to_json_string() const {
  nlohmann::json j;
  j["threshold"] = threshold;
  j["total_undeclared"] = total;
  j["flagged"] = flagged;
  j["flagged_fraction"] = global_fraction();
  nlohmann::json tiers = nlohmann::json::object();
  for (const auto& [tier, audit] : per_tier) {
    tiers[std::string(to_string(tier))] = {{"total", audit.total},
                                           {"flagged", audit.flagged},
                                           {"flagged_fraction", audit.fraction()}};
  }
  j["per_tier"] = std::move(tiers);
  j["flagged_ids"] = flagged_ids;
  return j.dump(2) + "\n";
}

std::string metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["accuracy"] = opt_to_json(m.accuracy);
  j["precision"] = opt_to_json(m.precision);
  j["recall"] = opt_to_json(m.recall);
  j["f1"] = opt_to_json(m.f1);
  return j.dump();
}

std::string format_metrics_table(const std::vector<std::pair<std::string, Metrics>>& rows) {
  size_t name_width = 5;
  for (const auto& [name, _] : rows) name_width = std::max(name_width, name.size());

  auto cell = [](const std::optional<double>& v) {
    if (!v.has_value()) return std::string("   n/a");
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%6.2f", *v);
    return std::string(buf);
  };

  std::ostringstream out;
  out << std::string(name_width, ' ') << "  Accuracy  Precision  Recall  F1\n";
  for (const auto& [name, m] : rows) {
    out << name << std::string(name_width - name.size(), ' ') << "  " << cell(m.accuracy)
        << "    " << cell(m.precision) << "   " << cell(m.recall) << "  " << cell(m.f1) << "\n";
  }
  return out.str();
}

}  // namespace adlens::eval
