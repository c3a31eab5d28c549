#include "adlens/contextual.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace adlens::ml {

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double bce_loss(double p, int label) {
  constexpr double kEps = 1e-12;
  double clamped = std::clamp(p, kEps, 1.0 - kEps);
  return label == 1 ? -std::log(clamped) : -std::log(1.0 - clamped);
}

// Parameter layout offsets. Gate order: input, forget, output, candidate.
struct Layout {
  size_t embed, gate[4], w1, b1, w2, b2, w3, b3, total;
  size_t e, h, m, d1, d2, v;

  explicit Layout(const ContextualConfig& c) {
    v = c.vocab_size;
    e = c.embed_dim;
    h = c.hidden_size;
    m = c.numeric_dim;
    d1 = c.dense1_size;
    d2 = c.dense2_size;
    embed = 0;
    size_t gate_block = h * e + h * h + h;
    for (size_t g = 0; g < 4; ++g) gate[g] = v * e + g * gate_block;
    w1 = v * e + 4 * gate_block;
    b1 = w1 + d1 * (h + m);
    w2 = b1 + d1;
    b2 = w2 + d2 * d1;
    w3 = b2 + d2;
    b3 = w3 + d2;
    total = b3 + 1;
  }

  size_t gate_w(size_t g) const { return gate[g]; }
  size_t gate_u(size_t g) const { return gate[g] + h * e; }
  size_t gate_b(size_t g) const { return gate[g] + h * e + h * h; }
};

struct ForwardCache {
  // per time step, each hidden_size wide
  std::vector<double> i, f, o, g, c, h;
  std::vector<double> u;        // hidden + numeric
  std::vector<double> z1, a1;   // dense 1 pre/post activation
  std::vector<double> z2, a2;   // dense 2 pre/post activation
  double logit = 0;
  double p = 0;
};

void check_inputs(const ContextualConfig& cfg, std::span<const int> seq,
                  std::span<const double> numeric) {
  if (seq.size() != cfg.max_len) {
    throw DataError("sequence length " + std::to_string(seq.size()) + " does not match max_len " +
                    std::to_string(cfg.max_len));
  }
  if (numeric.size() != cfg.numeric_dim) {
    throw DataError("numeric width " + std::to_string(numeric.size()) + " does not match " +
                    std::to_string(cfg.numeric_dim));
  }
  for (int idx : seq) {
    if (idx < 0 || static_cast<size_t>(idx) >= cfg.vocab_size) {
      throw DataError("token index " + std::to_string(idx) + " out of vocabulary range");
    }
  }
}

ForwardCache run_forward(const ContextualConfig& cfg, const std::vector<double>& params,
                         std::span<const int> seq, std::span<const double> numeric) {
  check_inputs(cfg, seq, numeric);
  Layout L(cfg);
  size_t T = cfg.max_len, H = L.h, E = L.e;

  ForwardCache cache;
  cache.i.assign(T * H, 0);
  cache.f.assign(T * H, 0);
  cache.o.assign(T * H, 0);
  cache.g.assign(T * H, 0);
  cache.c.assign(T * H, 0);
  cache.h.assign(T * H, 0);

  std::vector<double> z(4 * H);
  const double* P = params.data();
  for (size_t t = 0; t < T; ++t) {
    auto token = static_cast<size_t>(seq[t]);
    const double* x = token == 0 ? nullptr : P + L.embed + token * E;  // index 0 embeds to zero
    const double* h_prev = t == 0 ? nullptr : cache.h.data() + (t - 1) * H;

    for (size_t g = 0; g < 4; ++g) {
      const double* W = P + L.gate_w(g);
      const double* U = P + L.gate_u(g);
      const double* b = P + L.gate_b(g);
      double* zg = z.data() + g * H;
      for (size_t r = 0; r < H; ++r) {
        double acc = b[r];
        if (x != nullptr) {
          const double* w_row = W + r * E;
          for (size_t k = 0; k < E; ++k) acc += w_row[k] * x[k];
        }
        if (h_prev != nullptr) {
          const double* u_row = U + r * H;
          for (size_t k = 0; k < H; ++k) acc += u_row[k] * h_prev[k];
        }
        zg[r] = acc;
      }
    }

    double* it = cache.i.data() + t * H;
    double* ft = cache.f.data() + t * H;
    double* ot = cache.o.data() + t * H;
    double* gt = cache.g.data() + t * H;
    double* ct = cache.c.data() + t * H;
    double* ht = cache.h.data() + t * H;
    const double* c_prev = t == 0 ? nullptr : cache.c.data() + (t - 1) * H;
    for (size_t r = 0; r < H; ++r) {
      it[r] = sigmoid(z[r]);
      ft[r] = sigmoid(z[H + r]);
      ot[r] = sigmoid(z[2 * H + r]);
      gt[r] = std::tanh(z[3 * H + r]);
      ct[r] = it[r] * gt[r] + (c_prev != nullptr ? ft[r] * c_prev[r] : 0.0);
      ht[r] = ot[r] * std::tanh(ct[r]);
    }
  }

  cache.u.resize(H + L.m);
  const double* h_last = cache.h.data() + (T - 1) * H;
  for (size_t r = 0; r < H; ++r) cache.u[r] = h_last[r];
  for (size_t j = 0; j < L.m; ++j) cache.u[H + j] = numeric[j];

  cache.z1.resize(L.d1);
  cache.a1.resize(L.d1);
  for (size_t r = 0; r < L.d1; ++r) {
    const double* w_row = P + L.w1 + r * (H + L.m);
    double acc = P[L.b1 + r];
    for (size_t k = 0; k < H + L.m; ++k) acc += w_row[k] * cache.u[k];
    cache.z1[r] = acc;
    cache.a1[r] = acc > 0 ? acc : 0.0;
  }
  cache.z2.resize(L.d2);
  cache.a2.resize(L.d2);
  for (size_t r = 0; r < L.d2; ++r) {
    const double* w_row = P + L.w2 + r * L.d1;
    double acc = P[L.b2 + r];
    for (size_t k = 0; k < L.d1; ++k) acc += w_row[k] * cache.a1[k];
    cache.z2[r] = acc;
    cache.a2[r] = acc > 0 ? acc : 0.0;
  }
  double logit = P[L.b3];
  for (size_t k = 0; k < L.d2; ++k) logit += P[L.w3 + k] * cache.a2[k];
  cache.logit = logit;
  cache.p = sigmoid(logit);
  return cache;
}

}  // namespace

size_t ContextualConfig::param_count() const { return Layout(*this).total; }

size_t ContextualModel::tail_offset() const {
  return config.vocab_size * config.embed_dim;
}

size_t ContextualModel::embed_offset(size_t token, size_t k) const {
  return Layout(config).embed + token * config.embed_dim + k;
}
size_t ContextualModel::gate_w_offset(size_t gate, size_t row, size_t col) const {
  return Layout(config).gate_w(gate) + row * config.embed_dim + col;
}
size_t ContextualModel::gate_u_offset(size_t gate, size_t row, size_t col) const {
  return Layout(config).gate_u(gate) + row * config.hidden_size + col;
}
size_t ContextualModel::gate_b_offset(size_t gate, size_t row) const {
  return Layout(config).gate_b(gate) + row;
}
size_t ContextualModel::dense1_w_offset(size_t row, size_t col) const {
  return Layout(config).w1 + row * (config.hidden_size + config.numeric_dim) + col;
}
size_t ContextualModel::dense1_b_offset(size_t row) const { return Layout(config).b1 + row; }
size_t ContextualModel::dense2_w_offset(size_t row, size_t col) const {
  return Layout(config).w2 + row * config.dense1_size + col;
}
size_t ContextualModel::dense2_b_offset(size_t row) const { return Layout(config).b2 + row; }
size_t ContextualModel::output_w_offset(size_t col) const { return Layout(config).w3 + col; }
size_t ContextualModel::output_b_offset() const { return Layout(config).b3; }

ContextualModel ContextualModel::init(const ContextualConfig& cfg, double init_scale,
                                      uint64_t seed) {
  ContextualModel m;
  m.config = cfg;
  Layout L(cfg);
  m.params.resize(L.total);
  Rng rng(seed);
  for (double& p : m.params) p = rng.uniform_real(-init_scale, init_scale);
  // padding row stays zero
  std::fill(m.params.begin(), m.params.begin() + static_cast<long>(cfg.embed_dim), 0.0);
  return m;
}

double ContextualModel::forward(std::span<const int> sequence,
                                std::span<const double> numeric) const {
  return run_forward(config, params, sequence, numeric).p;
}

double ContextualModel::loss_and_gradient(std::span<const int> sequence,
                                          std::span<const double> numeric, int label,
                                          ExampleGrad& grad) const {
  Layout L(config);
  size_t T = config.max_len, H = L.h, E = L.e;
  ForwardCache cache = run_forward(config, params, sequence, numeric);

  grad.tail.assign(L.total - L.v * L.e, 0.0);
  grad.embed_tokens.clear();
  grad.embed_grads.clear();

  const double* P = params.data();
  size_t tail_base = L.v * L.e;
  auto tail = [&](size_t abs_offset) -> double* { return grad.tail.data() + (abs_offset - tail_base); };

  double dlogit = cache.p - static_cast<double>(label);

  // output layer
  double* dw3 = tail(L.w3);
  for (size_t k = 0; k < L.d2; ++k) dw3[k] = dlogit * cache.a2[k];
  *tail(L.b3) = dlogit;

  // dense 2
  std::vector<double> dz2(L.d2);
  for (size_t r = 0; r < L.d2; ++r) {
    double da2 = dlogit * P[L.w3 + r];
    dz2[r] = cache.z2[r] > 0 ? da2 : 0.0;
  }
  double* dw2 = tail(L.w2);
  double* db2 = tail(L.b2);
  for (size_t r = 0; r < L.d2; ++r) {
    db2[r] = dz2[r];
    double* row = dw2 + r * L.d1;
    for (size_t k = 0; k < L.d1; ++k) row[k] = dz2[r] * cache.a1[k];
  }

  // dense 1
  std::vector<double> dz1(L.d1);
  for (size_t r = 0; r < L.d1; ++r) {
    double da1 = 0;
    for (size_t q = 0; q < L.d2; ++q) da1 += P[L.w2 + q * L.d1 + r] * dz2[q];
    dz1[r] = cache.z1[r] > 0 ? da1 : 0.0;
  }
  double* dw1 = tail(L.w1);
  double* db1 = tail(L.b1);
  for (size_t r = 0; r < L.d1; ++r) {
    db1[r] = dz1[r];
    double* row = dw1 + r * (H + L.m);
    for (size_t k = 0; k < H + L.m; ++k) row[k] = dz1[r] * cache.u[k];
  }

  // into the recurrent stack
  std::vector<double> dh(H, 0.0), dc(H, 0.0);
  for (size_t r = 0; r < H; ++r) {
    double acc = 0;
    for (size_t q = 0; q < L.d1; ++q) acc += P[L.w1 + q * (H + L.m) + r] * dz1[q];
    dh[r] = acc;
  }

  std::vector<double> dzi(H), dzf(H), dzo(H), dzg(H), dh_prev(H), dx(E);
  for (size_t t = T; t-- > 0;) {
    const double* it = cache.i.data() + t * H;
    const double* ft = cache.f.data() + t * H;
    const double* ot = cache.o.data() + t * H;
    const double* gt = cache.g.data() + t * H;
    const double* ct = cache.c.data() + t * H;
    const double* c_prev = t == 0 ? nullptr : cache.c.data() + (t - 1) * H;
    const double* h_prev = t == 0 ? nullptr : cache.h.data() + (t - 1) * H;

    for (size_t r = 0; r < H; ++r) {
      double tc = std::tanh(ct[r]);
      double do_r = dh[r] * tc;
      dzo[r] = do_r * ot[r] * (1.0 - ot[r]);
      double dc_r = dc[r] + dh[r] * ot[r] * (1.0 - tc * tc);
      double df_r = c_prev != nullptr ? dc_r * c_prev[r] : 0.0;
      double di_r = dc_r * gt[r];
      double dg_r = dc_r * it[r];
      dzf[r] = df_r * ft[r] * (1.0 - ft[r]);
      dzi[r] = di_r * it[r] * (1.0 - it[r]);
      dzg[r] = dg_r * (1.0 - gt[r] * gt[r]);
      dc[r] = dc_r * ft[r];  // flows to c_{t-1}
    }

    auto token = static_cast<size_t>(sequence[t]);
    const double* x = token == 0 ? nullptr : P + L.embed + token * E;
    const double* dzs[4] = {dzi.data(), dzf.data(), dzo.data(), dzg.data()};
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    std::fill(dx.begin(), dx.end(), 0.0);
    for (size_t g = 0; g < 4; ++g) {
      double* dW = tail(L.gate_w(g));
      double* dU = tail(L.gate_u(g));
      double* db = tail(L.gate_b(g));
      const double* W = P + L.gate_w(g);
      const double* U = P + L.gate_u(g);
      const double* dzv = dzs[g];
      for (size_t r = 0; r < H; ++r) {
        double d = dzv[r];
        if (d == 0.0) continue;
        db[r] += d;
        if (x != nullptr) {
          double* w_row = dW + r * E;
          const double* w_par = W + r * E;
          for (size_t k = 0; k < E; ++k) {
            w_row[k] += d * x[k];
            dx[k] += d * w_par[k];
          }
        }
        if (h_prev != nullptr) {
          double* u_row = dU + r * H;
          const double* u_par = U + r * H;
          for (size_t k = 0; k < H; ++k) {
            u_row[k] += d * h_prev[k];
            dh_prev[k] += d * u_par[k];
          }
        }
      }
    }
    if (token != 0) {
      grad.embed_tokens.push_back(static_cast<int>(token));
      grad.embed_grads.insert(grad.embed_grads.end(), dx.begin(), dx.end());
    }
    std::swap(dh, dh_prev);
    // dc already holds the value for t-1
  }

  return bce_loss(cache.p, label);
}

namespace {

void accumulate(const ContextualConfig& cfg, const ExampleGrad& g, std::vector<double>& full) {
  size_t tail_base = cfg.vocab_size * cfg.embed_dim;
  for (size_t i = 0; i < g.tail.size(); ++i) full[tail_base + i] += g.tail[i];
  size_t E = cfg.embed_dim;
  for (size_t n = 0; n < g.embed_tokens.size(); ++n) {
    size_t row = static_cast<size_t>(g.embed_tokens[n]) * E;
    const double* src = g.embed_grads.data() + n * E;
    for (size_t k = 0; k < E; ++k) full[row + k] += src[k];
  }
}

}  // namespace

ContextualTrainResult train_contextual(const features::EncodedSet& train,
                                       const ContextualConfig& cfg, const TrainConfig& tcfg) {
  size_t n = train.size();
  if (n == 0) throw DataError("empty training set");
  if (tcfg.epochs < 1) throw UsageError("epochs must be >= 1");
  if (tcfg.batch_size < 1) throw UsageError("batch_size must be >= 1");
  if (tcfg.learning_rate < 0) throw UsageError("learning rate must be >= 0");

  ContextualTrainResult result;
  result.model = ContextualModel::init(cfg, tcfg.init_scale, derive_seed(tcfg.seed, "init"));
  ContextualModel& model = result.model;

  size_t batch = std::min<size_t>(static_cast<size_t>(tcfg.batch_size), n);
  int threads = tcfg.threads > 0
                    ? tcfg.threads
                    : static_cast<int>(std::max(1u, std::min(std::thread::hardware_concurrency(), 4u)));

  std::vector<double> velocity(model.params.size(), 0.0);
  std::vector<double> batch_grad(model.params.size(), 0.0);
  std::vector<ExampleGrad> grads(batch);
  std::vector<double> losses(batch);

  Rng shuffle_rng(derive_seed(tcfg.seed, "shuffle"));
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    int batch_no = 0;
    for (size_t start = 0; start < n; start += batch) {
      size_t count = std::min(batch, n - start);
      ++batch_no;

      auto worker = [&](size_t worker_id) {
        for (size_t b = worker_id; b < count; b += static_cast<size_t>(threads)) {
          size_t idx = order[start + b];
          losses[b] = model.loss_and_gradient(
              train.sequences[idx],
              std::span<const double>(train.numeric.row(idx), cfg.numeric_dim),
              train.labels[idx], grads[b]);
        }
      };
      if (threads == 1 || count == 1) {
        worker(0);
      } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker, static_cast<size_t>(w));
        for (auto& th : pool) th.join();
      }

      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      double loss_sum = 0;
      for (size_t b = 0; b < count; ++b) {  // fixed order: thread count cannot change results
        accumulate(cfg, grads[b], batch_grad);
        loss_sum += losses[b];
      }
      double mean_loss = loss_sum / static_cast<double>(count);
      if (!std::isfinite(mean_loss)) {
        throw DataError("training diverged (epoch " + std::to_string(epoch) + ", batch " +
                        std::to_string(batch_no) + ")");
      }
      result.trace.push_back({epoch, batch_no, mean_loss});

      double scale = 1.0 / static_cast<double>(count);
      for (size_t i = 0; i < model.params.size(); ++i) {
        velocity[i] = tcfg.momentum * velocity[i] + batch_grad[i] * scale;
        model.params[i] -= tcfg.learning_rate * velocity[i];
      }
    }
  }
  return result;
}

double gradient_check(ContextualModel model, std::span<const int> sequence,
                      std::span<const double> numeric, int label, double epsilon) {
  if (!(epsilon >= 1e-6 && epsilon <= 1e-3)) {
    throw UsageError("epsilon must be within [1e-6, 1e-3]");
  }
  ExampleGrad grad;
  model.loss_and_gradient(sequence, numeric, label, grad);
  std::vector<double> analytic(model.params.size(), 0.0);
  accumulate(model.config, grad, analytic);

  double max_rel = 0;
  for (size_t i = 0; i < model.params.size(); ++i) {
    double saved = model.params[i];
    model.params[i] = saved + epsilon;
    double up = bce_loss(model.forward(sequence, numeric), label);
    model.params[i] = saved - epsilon;
    double down = bce_loss(model.forward(sequence, numeric), label);
    model.params[i] = saved;
    double numeric_grad = (up - down) / (2.0 * epsilon);
    double rel = std::abs(analytic[i] - numeric_grad) /
                 std::max(1e-6, std::abs(analytic[i]) + std::abs(numeric_grad));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

std::string ContextualModel::to_json_string() const {
  nlohmann::json j;
  j["type"] = "contextual";
  j["vocab_size"] = config.vocab_size;
  j["embed_dim"] = config.embed_dim;
  j["max_len"] = config.max_len;
  j["hidden_size"] = config.hidden_size;
  j["dense1_size"] = config.dense1_size;
  j["dense2_size"] = config.dense2_size;
  j["numeric_dim"] = config.numeric_dim;
  j["params"] = params;
  return j.dump();
}

ContextualModel ContextualModel::from_json_string(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || j.value("type", "") != "contextual") {
    throw DataError("invalid contextual model JSON");
  }
  ContextualModel m;
  m.config.vocab_size = j.at("vocab_size").get<size_t>();
  m.config.embed_dim = j.at("embed_dim").get<size_t>();
  m.config.max_len = j.at("max_len").get<size_t>();
  m.config.hidden_size = j.at("hidden_size").get<size_t>();
  m.config.dense1_size = j.at("dense1_size").get<size_t>();
  m.config.dense2_size = j.at("dense2_size").get<size_t>();
  m.config.numeric_dim = j.at("numeric_dim").get<size_t>();
  m.params = j.at("params").get<std::vector<double>>();
  if (m.params.size() != m.config.param_count()) {
    throw DataError("contextual model parameter count mismatch");
  }
  return m;
}

std::string loss_trace_to_csv(const std::vector<LossTraceEntry>& trace) {
  std::ostringstream out;
  out << "epoch,batch,loss\n";
  for (const LossTraceEntry& e : trace) {
    out << e.epoch << "," << e.batch << "," << format_double(e.loss) << "\n";
  }
  return out.str();
}

}  // namespace adlens::ml
