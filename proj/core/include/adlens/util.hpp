#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adlens {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Bad flags, unreadable input paths, inconsistent options. CLI exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or invariant-violating data. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

uint64_t fnv1a64(std::string_view bytes);
uint64_t splitmix64(uint64_t x);

// Stage seeds derive from one master seed so a single --seed flag pins
// every stochastic step of a multi-stage run.
uint64_t derive_seed(uint64_t master, std::string_view stage);

// mt19937_64 with hand-rolled samplers. The standard distributions are
// implementation-defined, so reproducibility claims would not survive a
// compiler change; these do.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Unbiased integer in [0, n). Lemire's multiply-shift with rejection.
  uint64_t below(uint64_t n);

  int64_t uniform_int(int64_t lo, int64_t hi);  // inclusive bounds
  double real01();                              // [0, 1)
  double uniform_real(double lo, double hi);
  bool bernoulli(double p);
  double exponential_with_median(double median);
  long long poisson(double mean);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices drawn from [0, n), in draw order.
  std::vector<size_t> sample_without_replacement(size_t n, size_t k);

 private:
  std::mt19937_64 eng_;
};

// Row-major dense matrix of doubles.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(size_t i) { return data.data() + i * cols; }
  const double* row(size_t i) const { return data.data() + i * cols; }
  double& at(size_t i, size_t j) { return data[i * cols + j]; }
  double at(size_t i, size_t j) const { return data[i * cols + j]; }
};

std::string base64_encode(std::string_view bytes);
std::optional<std::string> base64_decode(std::string_view text);

// Shortest round-trip decimal rendering; stable across runs.
std::string format_double(double v);

std::string lower_ascii(std::string_view s);
bool is_ascii_alnum(char c);
std::vector<std::string> split(std::string_view s, char sep);

// Count of UTF-8 code points (continuation bytes are skipped).
size_t utf8_length(std::string_view s);

std::optional<double> median_of_sorted(const std::vector<double>& sorted);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace adlens
