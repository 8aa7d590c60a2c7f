#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "mflda/bspline.hpp"
#include "mflda/rng.hpp"
#include "mflda/scatter.hpp"
#include "support/oracles.hpp"

using namespace mflda;

namespace {

CurveTensor random_tensor(Rng& rng, Index n, Index p, Index T, int G) {
  CurveTensor tensor;
  tensor.n_features = p;
  tensor.grid = Vector::LinSpaced(T, 1.0, double(T));
  tensor.values = Matrix(n, p * T);
  for (Index i = 0; i < n; ++i) {
    tensor.labels.push_back(int(i) % G);
    tensor.subjects.push_back(i);
    for (Index c = 0; c < p * T; ++c)
      tensor.values(i, c) = rng.normal(double(i % G), 1.0);
  }
  return tensor;
}

}  // namespace

TEST_CASE("hand-checked two-class scatter in one dimension") {
  // class 0: {0, 2}; class 1: {2, 4}. Means 1 and 3, grand mean 2.
  Matrix X(4, 1);
  X << 0.0, 2.0, 2.0, 4.0;
  std::vector<int> labels = {0, 0, 1, 1};
  Matrix Sb, Sp;
  cross_scatter(X, labels, 2, Sb, Sp);
  CHECK(Sb(0, 0) == doctest::Approx(4.0));  // 2*(1-2)^2 + 2*(3-2)^2
  CHECK(Sp(0, 0) == doctest::Approx(2.0));  // (1+1+1+1) / (4-2)
}

TEST_CASE("cross scatter matches the naive textbook sums") {
  Rng rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    Index n = 6 + Index(rng.bounded(10));
    Index d = 1 + Index(rng.bounded(6));
    int G = 2 + int(rng.bounded(2));
    Matrix X(n, d);
    std::vector<int> labels;
    for (Index i = 0; i < n; ++i) {
      labels.push_back(int(i) % G);
      for (Index j = 0; j < d; ++j) X(i, j) = rng.normal();
    }
    Matrix Sb, Sp, Sb_ref, Sp_ref;
    cross_scatter(X, labels, G, Sb, Sp);
    oracle::naive_scatter(X, labels, G, Sb_ref, Sp_ref);
    CHECK((Sb - Sb_ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((Sp - Sp_ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("tensor scatter blocks equal naive sums on the matching columns") {
  Rng rng(22);
  CurveTensor tensor = random_tensor(rng, 12, 3, 4, 2);

  ScatterPair dep = build_scatter_from_tensor(tensor, Mode::time_dependent);
  REQUIRE(dep.between.size() == 1);
  Matrix Sb_ref, Sp_ref;
  oracle::naive_scatter(tensor.values, tensor.labels, 2, Sb_ref, Sp_ref);
  CHECK((dep.between[0] - Sb_ref).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((dep.within[0] - Sp_ref).cwiseAbs().maxCoeff() < 1e-10);

  ScatterPair ind = build_scatter_from_tensor(tensor, Mode::time_independent);
  REQUIRE(ind.between.size() == 4);
  for (Index t = 0; t < 4; ++t) {
    Matrix block = tensor.values.middleCols(t * 3, 3);
    oracle::naive_scatter(block, tensor.labels, 2, Sb_ref, Sp_ref);
    CHECK((ind.between[t] - Sb_ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((ind.within[t] - Sp_ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("with one time point the two modes agree") {
  Rng rng(23);
  CurveTensor tensor = random_tensor(rng, 10, 4, 1, 2);
  ScatterPair dep = build_scatter_from_tensor(tensor, Mode::time_dependent);
  ScatterPair ind = build_scatter_from_tensor(tensor, Mode::time_independent);
  REQUIRE(dep.between.size() == 1);
  REQUIRE(ind.between.size() == 1);
  CHECK((dep.between[0] - ind.between[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((dep.within[0] - ind.within[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("model route and tensor route build the same operators") {
  // Noiseless linear curves so smoothing reproduces the values exactly.
  FunctionalDataSet data;
  data.feature_names = {"x", "y"};
  data.class_names = {"a", "b"};
  Rng rng(24);
  for (int s = 0; s < 8; ++s) {
    data.subject_ids.push_back("s" + std::to_string(s));
    data.labels.push_back(s % 2);
    double slope0 = rng.uniform(-1.0, 1.0), slope1 = rng.uniform(-1.0, 1.0);
    for (int t = 0; t <= 12; ++t) {
      data.observations.push_back({s, double(t), 0, slope0 * t + s});
      data.observations.push_back({s, double(t), 1, slope1 * t - s});
    }
  }
  validate_dataset(data);
  SplineBasis basis = make_basis(data.t_min, data.t_max, 3, 4);
  SmoothingResult sm = smooth_dataset(data, basis, 8);
  Vector grid = default_grid(data.t_min, data.t_max);

  ScatterPair from_model =
      build_scatter_from_model(sm.model, grid, Mode::time_independent);
  CurveTensor tensor = evaluate_on_grid(sm.model, grid);
  ScatterPair from_tensor =
      build_scatter_from_tensor(tensor, Mode::time_independent);

  REQUIRE(from_model.between.size() == from_tensor.between.size());
  for (std::size_t t = 0; t < from_model.between.size(); ++t) {
    CHECK((from_model.between[t] - from_tensor.between[t])
              .cwiseAbs()
              .maxCoeff() < 1e-9);
    CHECK((from_model.within[t] - from_tensor.within[t])
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("scatter blocks are symmetric positive semidefinite") {
  Rng rng(25);
  CurveTensor tensor = random_tensor(rng, 15, 3, 3, 3);
  for (Mode mode : {Mode::time_dependent, Mode::time_independent}) {
    ScatterPair sc = build_scatter_from_tensor(tensor, mode);
    for (const Matrix& M : sc.between) {
      CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix> es(M);
      CHECK(es.eigenvalues().minCoeff() > -1e-9);
    }
    for (const Matrix& M : sc.within) {
      CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix> es(M);
      CHECK(es.eigenvalues().minCoeff() > -1e-9);
    }
  }
}

TEST_CASE("default ridge follows the within trace") {
  Rng rng(26);
  CurveTensor tensor = random_tensor(rng, 12, 2, 3, 2);
  ScatterPair sc = build_scatter_from_tensor(tensor, Mode::time_dependent);
  double trace = sc.within[0].trace();
  CHECK(sc.ridge == doctest::Approx(1e-6 * trace / double(2 * 3)));

  ScatterPair fixed =
      build_scatter_from_tensor(tensor, Mode::time_dependent, 0.5);
  CHECK(fixed.ridge == 0.5);
  // The stored blocks never absorb the ridge.
  CHECK((fixed.within[0] - sc.within[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense dimension guardrail refuses oversized operators") {
  Rng rng(27);
  CurveTensor tensor = random_tensor(rng, 6, 4, 3, 2);
  CHECK_THROWS_AS(
      build_scatter_from_tensor(tensor, Mode::time_dependent, -1.0, 10),
      ConfigError);
  // Independent blocks are p x p and stay under the same cap.
  CHECK_NOTHROW(
      build_scatter_from_tensor(tensor, Mode::time_independent, -1.0, 10));
}

TEST_CASE("label vector sanity checks") {
  CHECK(n_classes_of({0, 1, 0, 2}) == 3);
  CHECK_THROWS_AS(n_classes_of({0, 0}), DataError);
  CHECK_THROWS_AS(n_classes_of({0, -1, 1}), DataError);
  CHECK_THROWS_AS(n_classes_of({}), DataError);
}

TEST_CASE("singleton classes leave within-class scatter unestimable") {
  Matrix X(2, 1);
  X << 0.0, 1.0;
  std::vector<int> labels = {0, 1};
  Matrix Sb, Sp;
  CHECK_THROWS_AS(cross_scatter(X, labels, 2, Sb, Sp), NumericError);
}
