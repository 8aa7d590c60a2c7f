#include "mflda/scatter.hpp"

#include <sstream>

#include "mflda/parallel.hpp"

namespace mflda {

int n_classes_of(const std::vector<int>& labels) {
  int g = 0;
  for (int k : labels) {
    if (k < 0) throw DataError("scatter operators need a labeled dataset");
    g = std::max(g, k + 1);
  }
  if (g < 2) throw DataError("scatter operators need at least two classes");
  return g;
}

namespace {

std::vector<Index> count_classes(const std::vector<int>& labels, int G) {
  std::vector<Index> counts(G, 0);
  for (int k : labels) ++counts[k];
  for (int k = 0; k < G; ++k)
    if (counts[k] == 0) {
      std::ostringstream msg;
      msg << "class " << k << " has no subjects";
      throw DataError(msg.str());
    }
  return counts;
}

void check_dense_dim(Mode mode, Index p, Index T, Index max_dense_dim) {
  if (mode == Mode::time_dependent && p * T > max_dense_dim) {
    std::ostringstream msg;
    msg << "dense time-dependent operator would be " << p * T << " x " << p * T
        << " which exceeds the limit " << max_dense_dim
        << "; use time_independent mode or raise the limit";
    throw ConfigError(msg.str());
  }
}

double default_ridge(const std::vector<Matrix>& within, Index p, Index T) {
  double tr = 0.0;
  for (const auto& block : within) tr += block.trace();
  return 1e-6 * tr / static_cast<double>(p * T);
}

}  // namespace

ClassMeans class_means(const SplineModel& model) {
  if (model.coef.empty()) throw DataError("spline model has no subjects");
  ClassMeans means;
  means.n_classes = n_classes_of(model.labels);
  means.counts = count_classes(model.labels, means.n_classes);
  Index m = model.basis.size();
  Index p = model.n_features;
  means.class_coef.assign(means.n_classes, Matrix::Zero(m, p));
  means.overall_coef = Matrix::Zero(m, p);
  for (std::size_t i = 0; i < model.coef.size(); ++i) {
    means.class_coef[model.labels[i]] += model.coef[i];
    means.overall_coef += model.coef[i];
  }
  for (int k = 0; k < means.n_classes; ++k)
    means.class_coef[k] /= static_cast<double>(means.counts[k]);
  means.overall_coef /= static_cast<double>(model.coef.size());
  return means;
}

void cross_scatter(const Matrix& X, const std::vector<int>& labels, int G,
                   Matrix& Sb, Matrix& Sp, std::vector<Index>* counts_out) {
  Index n = X.rows();
  Index d = X.cols();
  if (static_cast<Index>(labels.size()) != n)
    throw DataError("label count does not match row count");
  std::vector<Index> counts = count_classes(labels, G);

  Matrix mu = Matrix::Zero(G, d);
  for (Index i = 0; i < n; ++i) mu.row(labels[i]) += X.row(i);
  Vector overall = Vector::Zero(d);
  for (int k = 0; k < G; ++k) {
    overall += mu.row(k).transpose();
    mu.row(k) /= static_cast<double>(counts[k]);
  }
  overall /= static_cast<double>(n);

  Matrix H(d, G);
  for (int k = 0; k < G; ++k)
    H.col(k) = std::sqrt(static_cast<double>(counts[k])) *
               (mu.row(k).transpose() - overall);
  Sb.noalias() = H * H.transpose();

  Index denom = n - G;
  if (denom <= 0)
    throw NumericError("within-class scatter is not estimable: "
                       "every class is a singleton");
  Matrix centered(n, d);
  for (Index i = 0; i < n; ++i) centered.row(i) = X.row(i) - mu.row(labels[i]);
  Sp.noalias() = centered.transpose() * centered / static_cast<double>(denom);
  if (counts_out) *counts_out = counts;
}

ScatterPair build_scatter_from_tensor(const CurveTensor& tensor, Mode mode,
                                      double ridge, Index max_dense_dim) {
  Index p = tensor.n_features;
  Index T = tensor.n_times();
  check_dense_dim(mode, p, T, max_dense_dim);

  ScatterPair pair;
  pair.mode = mode;
  pair.n_features = p;
  pair.n_times = T;
  pair.n_classes = n_classes_of(tensor.labels);
  pair.counts = count_classes(tensor.labels, pair.n_classes);
  for (int k = 0; k < pair.n_classes; ++k)
    if (pair.counts[k] == 1) {
      std::ostringstream msg;
      msg << "class " << k << " is a singleton and contributes no "
          << "within-class variation";
      pair.warnings.push_back(msg.str());
    }

  if (mode == Mode::time_dependent) {
    pair.between.resize(1);
    pair.within.resize(1);
    cross_scatter(tensor.values, tensor.labels, pair.n_classes,
                  pair.between[0], pair.within[0]);
  } else {
    pair.between.resize(T);
    pair.within.resize(T);
    parallel_for(static_cast<std::size_t>(T), [&](std::size_t t) {
      Matrix block = tensor.values.middleCols(static_cast<Index>(t) * p, p);
      cross_scatter(block, tensor.labels, pair.n_classes, pair.between[t],
                    pair.within[t]);
    });
  }
  pair.ridge = ridge >= 0.0 ? ridge : default_ridge(pair.within, p, T);
  return pair;
}

ScatterPair build_scatter_from_model(const SplineModel& model,
                                     const Vector& grid, Mode mode,
                                     double ridge, Index max_dense_dim) {
  ClassMeans means = class_means(model);
  Index p = model.n_features;
  Index T = grid.size();
  check_dense_dim(mode, p, T, max_dense_dim);
  Matrix phi = evaluate_basis(model.basis, grid);  // T x m

  ScatterPair pair;
  pair.mode = mode;
  pair.n_features = p;
  pair.n_times = T;
  pair.n_classes = means.n_classes;
  pair.counts = means.counts;

  Index n = static_cast<Index>(model.coef.size());
  Index denom = n - means.n_classes;
  if (denom <= 0)
    throw NumericError("within-class scatter is not estimable: "
                       "every class is a singleton");
  for (int k = 0; k < means.n_classes; ++k)
    if (means.counts[k] == 1) {
      std::ostringstream msg;
      msg << "class " << k << " is a singleton and contributes no "
          << "within-class variation";
      pair.warnings.push_back(msg.str());
    }

  // Mean-difference and per-subject deviation curves on the grid; the
  // (t, s) block entries are phi(t)^T (c_a - c_b) outer products, assembled
  // here as outer products of the evaluated curves.
  auto vec_time_major = [p, T](const Matrix& curves /* T x p */) {
    Vector v(p * T);
    for (Index t = 0; t < T; ++t)
      v.segment(t * p, p) = curves.row(t).transpose();
    return v;
  };

  if (mode == Mode::time_dependent) {
    Matrix Sb = Matrix::Zero(p * T, p * T);
    for (int k = 0; k < means.n_classes; ++k) {
      Vector u = vec_time_major(phi * (means.class_coef[k] - means.overall_coef));
      Sb.noalias() += static_cast<double>(means.counts[k]) * u * u.transpose();
    }
    Matrix Sw = Matrix::Zero(p * T, p * T);
    for (Index i = 0; i < n; ++i) {
      int k = model.labels[i];
      Vector u = vec_time_major(phi * (model.coef[i] - means.class_coef[k]));
      Sw.noalias() += u * u.transpose();
    }
    Sw /= static_cast<double>(denom);
    pair.between.push_back(std::move(Sb));
    pair.within.push_back(std::move(Sw));
  } else {
    pair.between.assign(T, Matrix());
    pair.within.assign(T, Matrix());
    parallel_for(static_cast<std::size_t>(T), [&](std::size_t ti) {
      Index t = static_cast<Index>(ti);
      Matrix Sb = Matrix::Zero(p, p);
      for (int k = 0; k < means.n_classes; ++k) {
        Vector d = ((means.class_coef[k] - means.overall_coef).transpose() *
                    phi.row(t).transpose());
        Sb.noalias() += static_cast<double>(means.counts[k]) * d * d.transpose();
      }
      Matrix Sw = Matrix::Zero(p, p);
      for (Index i = 0; i < n; ++i) {
        int k = model.labels[i];
        Vector d = ((model.coef[i] - means.class_coef[k]).transpose() *
                    phi.row(t).transpose());
        Sw.noalias() += d * d.transpose();
      }
      Sw /= static_cast<double>(denom);
      pair.between[t] = std::move(Sb);
      pair.within[t] = std::move(Sw);
    });
  }
  pair.ridge = ridge >= 0.0 ? ridge : default_ridge(pair.within, p, T);
  return pair;
}

}  // namespace mflda
