#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adlens/pipeline.hpp"
#include "adlens/util.hpp"

namespace adlens::ml {

// Text sequence -> embedding -> gated recurrent cell -> final hidden state,
// concatenated with the numeric channel and pushed through two rectified
// dense layers into a logistic output.
struct ContextualConfig {
  size_t vocab_size = 5000;
  size_t embed_dim = 32;
  size_t max_len = 60;
  size_t hidden_size = 64;
  size_t dense1_size = 128;
  size_t dense2_size = 64;
  size_t numeric_dim = 11;

  size_t param_count() const;
};

struct TrainConfig {
  int epochs = 15;
  int batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double init_scale = 0.08;
  uint64_t seed = 0;
  // Worker threads for per-example gradients. Gradients are reduced in
  // example order, so the value never changes the result; 0 picks
  // automatically.
  int threads = 0;
};

// Gradient of one example: everything after the embedding block densely,
// plus the touched embedding rows sparsely.
struct ExampleGrad {
  std::vector<double> tail;
  std::vector<int> embed_tokens;
  std::vector<double> embed_grads;  // embed_tokens.size() * embed_dim values
};

class ContextualModel {
 public:
  ContextualConfig config;
  std::vector<double> params;

  static ContextualModel init(const ContextualConfig& cfg, double init_scale, uint64_t seed);

  // Probability of the positive class, in (0, 1).
  double forward(std::span<const int> sequence, std::span<const double> numeric) const;

  // Binary cross-entropy loss plus its gradient.
  double loss_and_gradient(std::span<const int> sequence, std::span<const double> numeric,
                           int label, ExampleGrad& grad) const;

  size_t tail_offset() const;  // first parameter after the embedding block

  // Flat-parameter offsets, for inspection and hand-constructed fixtures.
  // Gates are ordered input, forget, output, candidate.
  size_t embed_offset(size_t token, size_t k) const;
  size_t gate_w_offset(size_t gate, size_t row, size_t col) const;
  size_t gate_u_offset(size_t gate, size_t row, size_t col) const;
  size_t gate_b_offset(size_t gate, size_t row) const;
  size_t dense1_w_offset(size_t row, size_t col) const;
  size_t dense1_b_offset(size_t row) const;
  size_t dense2_w_offset(size_t row, size_t col) const;
  size_t dense2_b_offset(size_t row) const;
  size_t output_w_offset(size_t col) const;
  size_t output_b_offset() const;

  std::string to_json_string() const;
  static ContextualModel from_json_string(std::string_view text);
};

struct LossTraceEntry {
  int epoch = 0;
  int batch = 0;
  double loss = 0;
};

struct ContextualTrainResult {
  ContextualModel model;
  std::vector<LossTraceEntry> trace;
};

// Mini-batch gradient descent with momentum over binary cross-entropy.
// Deterministic under (data, config, seed); a non-finite loss aborts with
// an error naming the epoch and batch.
ContextualTrainResult train_contextual(const features::EncodedSet& train,
                                       const ContextualConfig& cfg, const TrainConfig& tcfg);

// Max relative error between the analytic gradient and central finite
// differences across every parameter of the model.
double gradient_check(ContextualModel model, std::span<const int> sequence,
                      std::span<const double> numeric, int label, double epsilon);

std::string loss_trace_to_csv(const std::vector<LossTraceEntry>& trace);

}  // namespace adlens::ml
