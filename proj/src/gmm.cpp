#include "openset/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "openset/error.hpp"
#include "openset/rng.hpp"

namespace openset {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2*pi)
// Components holding less total responsibility than this are re-seeded.
constexpr double kEmptyComponentMass = 1e-8;

// Per-component log-density terms that do not depend on x.
struct Precomputed {
  Vector log_weight;  // k
  Vector log_norm;    // k: -0.5 * sum_d ln(2 pi var_d)
  Matrix inv_var;     // k x D
};

Precomputed precompute(const GmmModel& m) {
  const int k = m.num_components();
  Precomputed p{Vector(k), Vector(k), Matrix(k, m.dim())};
  for (int j = 0; j < k; ++j) {
    p.log_weight(j) = m.weights(j) > 0.0 ? std::log(m.weights(j)) : -std::numeric_limits<double>::infinity();
    p.log_norm(j) = -0.5 * (m.variances.row(j).array().log().sum() + kLog2Pi * m.dim());
    p.inv_var.row(j) = m.variances.row(j).array().inverse();
  }
  return p;
}

// n x k matrix of log(w_j) + log N(x_i; mu_j, var_j).
Matrix joint_log_prob(const GmmModel& m, const Precomputed& p, const Matrix& X) {
  const int k = m.num_components();
  Matrix out(X.rows(), k);
  for (int j = 0; j < k; ++j) {
    const auto maha = ((X.rowwise() - m.means.row(j)).array().square().rowwise() * p.inv_var.row(j).array())
                          .rowwise()
                          .sum();
    out.col(j) = (p.log_weight(j) + p.log_norm(j)) - 0.5 * maha;
  }
  return out;
}

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const double hi = v.maxCoeff();
  if (!std::isfinite(hi)) return hi;
  return hi + std::log((v.array() - hi).exp().sum());
}

struct EStep {
  double mean_log_likelihood;
  Vector row_log_likelihood;  // n
  Matrix resp;                // n x k
};

EStep e_step(const GmmModel& m, const Matrix& X) {
  const auto p = precompute(m);
  Matrix lp = joint_log_prob(m, p, X);
  Vector row_ll(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    row_ll(i) = log_sum_exp(lp.row(i));
    lp.row(i) = (lp.row(i).array() - row_ll(i)).exp();
  }
  return {row_ll.mean(), std::move(row_ll), std::move(lp)};
}

Eigen::RowVectorXd column_variance(const Matrix& X) {
  const Eigen::RowVectorXd mu = X.colwise().mean();
  return ((X.rowwise() - mu).array().square().colwise().sum() / static_cast<double>(X.rows()))
      .max(kGmmVarianceFloor);
}

// k-means++ seeding followed by a single hard-assignment pass.
GmmModel initialize(const Matrix& X, int k, Rng& rng) {
  const Eigen::Index n = X.rows();
  std::vector<Eigen::Index> centers;
  centers.reserve(k);
  centers.push_back(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng));
  Vector nearest = (X.rowwise() - X.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < k) {
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += nearest(i);
        if (u < acc && nearest(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    }
    centers.push_back(pick);
    nearest = nearest.cwiseMin((X.rowwise() - X.row(pick)).rowwise().squaredNorm());
  }

  Matrix C(k, X.cols());
  for (int j = 0; j < k; ++j) C.row(j) = X.row(centers[j]);

  std::vector<int> assign(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best;
    (C.rowwise() - X.row(i)).rowwise().squaredNorm().minCoeff(&best);
    assign[i] = static_cast<int>(best);
  }

  const Eigen::RowVectorXd global_var = column_variance(X);
  GmmModel m{Vector::Zero(k), Matrix::Zero(k, X.cols()), Matrix::Zero(k, X.cols())};
  Vector count = Vector::Zero(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    m.means.row(assign[i]) += X.row(i);
    count(assign[i]) += 1.0;
  }
  for (int j = 0; j < k; ++j) {
    if (count(j) > 0) {
      m.means.row(j) /= count(j);
    } else {
      m.means.row(j) = C.row(j);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    m.variances.row(assign[i]) += (X.row(i) - m.means.row(assign[i])).array().square().matrix();
  }
  for (int j = 0; j < k; ++j) {
    if (count(j) > 0) {
      m.variances.row(j) = (m.variances.row(j).array() / count(j)).max(kGmmVarianceFloor);
      m.weights(j) = count(j);
    } else {
      // A duplicate center claimed no rows; give it one row's worth of mass.
      m.variances.row(j) = global_var;
      m.weights(j) = 1.0;
    }
  }
  m.weights /= m.weights.sum();
  return m;
}

// Returns the updated model and the indices of (near-)empty components.
GmmModel m_step(const Matrix& X, const Matrix& resp, const GmmModel& prev, std::vector<int>& empty) {
  const int k = prev.num_components();
  const Vector mass = resp.colwise().sum();
  GmmModel m = prev;
  empty.clear();
  for (int j = 0; j < k; ++j) {
    if (mass(j) < kEmptyComponentMass) empty.push_back(j);
    if (mass(j) <= 0.0) {
      // No responsibility at all: location and spread do not affect the
      // likelihood, keep them.
      m.weights(j) = 0.0;
      continue;
    }
    m.means.row(j) = (resp.col(j).transpose() * X) / mass(j);
    m.variances.row(j) = ((X.rowwise() - m.means.row(j)).array().square().colwise() * resp.col(j).array())
                             .colwise()
                             .sum() /
                         mass(j);
    m.variances.row(j) = m.variances.row(j).array().max(kGmmVarianceFloor);
    m.weights(j) = mass(j);
  }
  m.weights /= m.weights.sum();
  return m;
}

GmmModel reseed(const Matrix& X, const GmmModel& m, const Vector& row_ll, const std::vector<int>& empty) {
  GmmModel out = m;
  Eigen::Index worst;
  row_ll.minCoeff(&worst);
  const Eigen::RowVectorXd global_var = column_variance(X);
  for (int j : empty) {
    out.means.row(j) = X.row(worst);
    out.variances.row(j) = global_var;
    out.weights(j) = 1.0 / static_cast<double>(X.rows());
  }
  out.weights /= out.weights.sum();
  return out;
}

}  // namespace

GmmFitResult gmm_fit_detailed(const Matrix& X, int k, const ScorerConfig& cfg) {
  if (k < 1) throw DataError("gmm: component count must be >= 1");
  if (X.rows() < k) {
    throw DataError("gmm: need at least " + std::to_string(k) + " rows, got " + std::to_string(X.rows()));
  }
  if (X.cols() == 0) throw DataError("gmm: zero-dimensional input");
  if (!X.allFinite()) throw DataError("gmm: non-finite input");

  GmmFitResult result;
  result.mean_log_likelihood = -std::numeric_limits<double>::infinity();
  const int restarts = std::max(1, cfg.em_restarts);
  std::vector<int> empty;

  for (int r = 0; r < restarts; ++r) {
    Rng rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(r)));
    GmmModel model = initialize(X, k, rng);
    EStep cur = e_step(model, X);
    std::vector<double> trace{cur.mean_log_likelihood};

    for (int it = 0; it < cfg.em_max_iters; ++it) {
      GmmModel next = m_step(X, cur.resp, model, empty);
      EStep nxt = e_step(next, X);
      if (!empty.empty()) {
        // Keep the re-seeded mixture only if it does not lose likelihood.
        GmmModel candidate = reseed(X, next, nxt.row_log_likelihood, empty);
        EStep cand = e_step(candidate, X);
        if (cand.mean_log_likelihood >= nxt.mean_log_likelihood) {
          next = std::move(candidate);
          nxt = std::move(cand);
        }
      }
      const double gain = nxt.mean_log_likelihood - cur.mean_log_likelihood;
      model = std::move(next);
      cur = std::move(nxt);
      trace.push_back(cur.mean_log_likelihood);
      if (std::abs(gain) < cfg.em_tolerance) break;
    }

    if (cur.mean_log_likelihood > result.mean_log_likelihood) {
      result.mean_log_likelihood = cur.mean_log_likelihood;
      result.model = std::move(model);
      result.best_restart = r;
    }
    result.restart_traces.push_back(std::move(trace));
  }
  return result;
}

double gmm_score(const GmmModel& model, const VectorRef& x) {
  if (x.size() != model.dim()) {
    throw DataError("gmm: dimension mismatch (model " + std::to_string(model.dim()) + ", input " +
                    std::to_string(x.size()) + ")");
  }
  const int k = model.num_components();
  Eigen::RowVectorXd terms(k);
  for (int j = 0; j < k; ++j) {
    const double lw = model.weights(j) > 0.0 ? std::log(model.weights(j)) : -std::numeric_limits<double>::infinity();
    const auto var = model.variances.row(j).transpose().array();
    const double maha = ((x.array() - model.means.row(j).transpose().array()).square() / var).sum();
    terms(j) = lw - 0.5 * (var.log().sum() + kLog2Pi * model.dim() + maha);
  }
  return log_sum_exp(terms);
}

Matrix gmm_responsibilities(const GmmModel& model, const Matrix& X) {
  if (X.cols() != model.dim()) throw DataError("gmm: dimension mismatch");
  return e_step(model, X).resp;
}

}  // namespace openset
