#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "adlens/forest.hpp"
#include "adlens/util.hpp"

using namespace adlens;
using namespace adlens::ml;

namespace {

// Two clusters separated on both features.
void separable_data(Matrix& x, std::vector<int>& y, size_t n, uint64_t seed) {
  Rng rng(seed);
  x = Matrix(n, 2);
  y.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    bool positive = i % 2 == 0;
    x.at(i, 0) = rng.uniform_real(0, 1) + (positive ? 2.0 : 0.0);
    x.at(i, 1) = rng.uniform_real(0, 1) + (positive ? 2.0 : 0.0);
    y[i] = positive ? 1 : 0;
  }
}

}  // namespace

TEST_CASE("single-label training predicts that label with probability one") {
  Matrix x(20, 3);
  Rng rng(3);
  for (double& v : x.data) v = rng.uniform_real(0, 1);
  std::vector<int> y(20, 1);
  ForestParams params;
  params.tree_count = 10;
  params.seed = 5;
  ForestModel model = train_forest(x, y, params);
  for (size_t i = 0; i < x.rows; ++i) {
    CHECK(predict_forest(model, std::span<const double>(x.row(i), x.cols)) == 1.0);
  }
}

TEST_CASE("separable data trains to perfect training accuracy") {
  Matrix x;
  std::vector<int> y;
  separable_data(x, y, 200, 9);
  ForestParams params;
  params.tree_count = 20;
  params.max_depth = 6;
  params.seed = 1;
  ForestModel model = train_forest(x, y, params);
  size_t correct = 0;
  for (size_t i = 0; i < x.rows; ++i) {
    double p = predict_forest(model, std::span<const double>(x.row(i), x.cols));
    correct += (p >= 0.5 ? 1 : 0) == y[i];
  }
  CHECK(correct == x.rows);
}

TEST_CASE("training is deterministic: same data and seed, identical trees") {
  Matrix x;
  std::vector<int> y;
  separable_data(x, y, 120, 4);
  ForestParams params;
  params.tree_count = 15;
  params.seed = 99;
  ForestModel a = train_forest(x, y, params);
  ForestModel b = train_forest(x, y, params);
  CHECK(a.to_json_string() == b.to_json_string());
}

TEST_CASE("prediction averages leaf probabilities and ignores tree order") {
  ForestModel model;
  model.feature_dim = 1;
  DecisionTree t1, t2;
  t1.nodes.push_back({-1, 0, -1, -1, 0.2});
  t2.nodes.push_back({-1, 0, -1, -1, 0.8});
  model.trees = {t1, t2};
  double v = 0.0;
  CHECK(predict_forest(model, std::span<const double>(&v, 1)) == doctest::Approx(0.5));

  std::swap(model.trees[0], model.trees[1]);
  CHECK(predict_forest(model, std::span<const double>(&v, 1)) == doctest::Approx(0.5));

  model.trees = {t1};
  CHECK(predict_forest(model, std::span<const double>(&v, 1)) == doctest::Approx(0.2));
}

TEST_CASE("probability stays within [0,1] for random inputs") {
  Matrix x;
  std::vector<int> y;
  separable_data(x, y, 150, 21);
  ForestParams params;
  params.tree_count = 25;
  params.seed = 7;
  ForestModel model = train_forest(x, y, params);

  Rng rng(100);
  for (int i = 0; i < 1000; ++i) {
    double row[2] = {rng.uniform_real(-50, 50), rng.uniform_real(-50, 50)};
    double p = predict_forest(model, std::span<const double>(row, 2));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("dimension mismatch is an error") {
  Matrix x;
  std::vector<int> y;
  separable_data(x, y, 50, 2);
  ForestParams params;
  params.tree_count = 3;
  ForestModel model = train_forest(x, y, params);
  double one = 0.5;
  CHECK_THROWS_AS(predict_forest(model, std::span<const double>(&one, 1)), DataError);
}

TEST_CASE("constant features yield a majority-class model") {
  Matrix x(30, 2);
  for (double& v : x.data) v = 1.0;
  std::vector<int> y(30, 0);
  for (size_t i = 0; i < 10; ++i) y[i] = 1;
  ForestParams params;
  params.tree_count = 8;
  params.bootstrap = false;  // keep class mix exact in every tree
  ForestModel model = train_forest(x, y, params);
  double row[2] = {1.0, 1.0};
  CHECK(predict_forest(model, std::span<const double>(row, 2)) ==
        doctest::Approx(10.0 / 30.0).epsilon(1e-12));
}

TEST_CASE("model JSON round trip preserves predictions") {
  Matrix x;
  std::vector<int> y;
  separable_data(x, y, 80, 13);
  ForestParams params;
  params.tree_count = 9;
  params.seed = 2;
  ForestModel model = train_forest(x, y, params);
  ForestModel loaded = ForestModel::from_json_string(model.to_json_string());
  for (size_t i = 0; i < x.rows; ++i) {
    std::span<const double> row(x.row(i), x.cols);
    CHECK(predict_forest(model, row) == predict_forest(loaded, row));
  }
}
