// SPDX-License-Identifier: Apache-2.0
#pragma once

// The integral operator (S psi)(y) = int_0^1 exp(-|y - s|) psi(s) ds on a midpoint
// grid, its singular system, spectral inversion, and decay diagnostics.

#include <illposed/common.hpp>
#include <illposed/function_space.hpp>
#include <illposed/xof.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <limits>
#include <span>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace illposed {

class DiscretizedOperator {
public:
   DiscretizedOperator(std::size_t n, Eigen::MatrixXd matrix) : m_n(n), m_matrix(std::move(matrix)) {
      detail::require(n >= 1, "operator grid size must be positive");
      detail::require(static_cast<std::size_t>(m_matrix.rows()) == n && static_cast<std::size_t>(m_matrix.cols()) == n,
                      "operator matrix must be n x n");
   }

   std::size_t size() const { return m_n; }
   const Eigen::MatrixXd& matrix() const { return m_matrix; }

private:
   std::size_t m_n;
   Eigen::MatrixXd m_matrix;
};

/// Columns of left/right are orthonormal in the Euclidean sense; singular values descend.
struct SvdFactors {
   Eigen::VectorXd singular_values;
   Eigen::MatrixXd left;
   Eigen::MatrixXd right;

   std::size_t size() const { return static_cast<std::size_t>(singular_values.size()); }

   /// k-th right singular vector (1-based) as a grid function with unit grid norm.
   GridFunction right_function(std::size_t k) const {
      const double scale = std::sqrt(static_cast<double>(size()));
      std::vector<double> v(size());
      for(std::size_t i = 0; i < size(); ++i) {
         v[i] = scale * right(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k - 1));
      }
      return GridFunction(std::move(v));
   }
};

enum class DecayKind { mild, severe };

inline const char* to_string(DecayKind k) {
   return k == DecayKind::mild ? "mild" : "severe";
}

struct DecayClassification {
   DecayKind kind = DecayKind::mild;
   double decay_exponent = 0.0;  // t in s_k ~ k^-t (from the log-log fit)
   double decay_rate = 0.0;      // r in s_k ~ exp(-r k) (from the log-linear fit)
   double fit_quality = 0.0;     // R^2 of the chosen fit
   double mild_r2 = 0.0;
   double severe_r2 = 0.0;
   bool low_confidence = false;  // the two R^2 values are within 0.01
   std::pair<std::size_t, std::size_t> fit_range{0, 0};  // 1-based, inclusive
};

struct AmplificationReport {
   std::size_t n = 0;
   std::size_t trials = 0;
   std::size_t trials_with_noise = 0;
   double noise_norm = 0.0;        // mean over trials
   double naive_error_norm = 0.0;  // mean over trials
   double naive_error_norm_max = 0.0;
   double amplification_factor = 0.0;  // mean ratio over trials with nonzero noise
   double amplification_max = 0.0;
   double amplification_min = 0.0;
};

inline double hso_kernel(double y, double s) {
   return std::exp(-std::abs(y - s));
}

inline DiscretizedOperator build_hso(std::size_t n) {
   detail::require(n >= 1, "build_hso: n must be positive");
   const double h = 1.0 / static_cast<double>(n);
   Eigen::MatrixXd m(n, n);
   for(std::size_t i = 0; i < n; ++i) {
      m(i, i) = h;
      for(std::size_t j = 0; j < i; ++j) {
         // |y_i - y_j| = (i - j) h on the midpoint grid
         const double v = h * std::exp(-static_cast<double>(i - j) * h);
         m(i, j) = v;
         m(j, i) = v;
      }
   }
   return DiscretizedOperator(n, std::move(m));
}

inline GridFunction apply(const DiscretizedOperator& op, const GridFunction& u) {
   detail::require_dims(op.size(), u.size(), "apply");
   Eigen::Map<const Eigen::VectorXd> x(u.values().data(), static_cast<Eigen::Index>(u.size()));
   const Eigen::VectorXd y = op.matrix() * x;
   return GridFunction(std::vector<double>(y.data(), y.data() + y.size()));
}

/// The operator is symmetric positive definite, so its eigen-decomposition is its SVD.
inline SvdFactors svd(const DiscretizedOperator& op) {
   Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op.matrix());
   if(eig.info() != Eigen::Success) {
      throw Error("svd: eigen-decomposition did not converge for n=" + std::to_string(op.size()));
   }
   const auto n = static_cast<Eigen::Index>(op.size());
   SvdFactors f;
   f.singular_values.resize(n);
   f.left.resize(n, n);
   for(Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index src = n - 1 - k;
      const double s = eig.eigenvalues()(src);
      if(!(s > 0.0)) {
         throw Error("svd: operator is not positive definite at n=" + std::to_string(op.size()));
      }
      f.singular_values(k) = s;
      Eigen::VectorXd col = eig.eigenvectors().col(src);
      // sign convention: first component with magnitude above noise is positive
      Eigen::Index pivot = 0;
      col.cwiseAbs().maxCoeff(&pivot);
      if(col(pivot) < 0) {
         col = -col;
      }
      f.left.col(k) = col;
   }
   f.right = f.left;
   return f;
}

/// Max-norm distance of the Gram matrix of the columns from the identity.
inline double orthonormality_defect(const Eigen::MatrixXd& columns) {
   const Eigen::MatrixXd g = columns.transpose() * columns;
   return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

inline double reconstruction_defect(const DiscretizedOperator& op, const SvdFactors& f) {
   const Eigen::MatrixXd r = f.left * f.singular_values.asDiagonal() * f.right.transpose();
   return (op.matrix() - r).cwiseAbs().maxCoeff();
}

/// sum_k filter(s_k, k) <v, alpha_k> beta_k, with k 1-based.
inline GridFunction spectral_filter_apply(const SvdFactors& f, const GridFunction& v,
                                         const std::function<double(double, std::size_t)>& filter) {
   detail::require_dims(f.size(), v.size(), "spectral_filter_apply");
   Eigen::Map<const Eigen::VectorXd> x(v.values().data(), static_cast<Eigen::Index>(v.size()));
   Eigen::VectorXd coeff = f.left.transpose() * x;
   for(Eigen::Index k = 0; k < coeff.size(); ++k) {
      coeff(k) *= filter(f.singular_values(k), static_cast<std::size_t>(k + 1));
   }
   const Eigen::VectorXd y = f.right * coeff;
   return GridFunction(std::vector<double>(y.data(), y.data() + y.size()));
}

/// Spectral inverse truncated to the k_max largest singular values (all of them by default).
inline GridFunction naive_inverse_apply(const SvdFactors& f, const GridFunction& v,
                                        std::optional<std::size_t> k_max = std::nullopt) {
   const std::size_t kk = k_max.value_or(f.size());
   detail::require(kk >= 1 && kk <= f.size(), "naive_inverse_apply: k_max must lie in [1, n]");
   return spectral_filter_apply(f, v, [kk](double s, std::size_t k) { return k <= kk ? 1.0 / s : 0.0; });
}

namespace detail {

struct LineFit {
   double slope = 0.0;
   double intercept = 0.0;
   double r2 = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
   const double m = static_cast<double>(x.size());
   double mx = 0.0;
   double my = 0.0;
   for(std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += y[i];
   }
   mx /= m;
   my /= m;
   double sxx = 0.0;
   double sxy = 0.0;
   double syy = 0.0;
   for(std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
      syy += (y[i] - my) * (y[i] - my);
   }
   LineFit fit;
   fit.slope = sxy / sxx;
   fit.intercept = my - fit.slope * mx;
   double ss_res = 0.0;
   for(std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += r * r;
   }
   fit.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
   return fit;
}

}  // namespace detail

/// Excludes the preasymptotic head and the grid-distorted tail.
inline std::pair<std::size_t, std::size_t> default_fit_range(std::size_t n) {
   return {5, std::min<std::size_t>(50, n / 4)};
}

/// Compares log s_k ~ log k (mild) against log s_k ~ k (severe) over a 1-based inclusive range.
inline DecayClassification classify_decay(std::span<const double> singular_values,
                                          std::pair<std::size_t, std::size_t> fit_range) {
   const auto [first, last] = fit_range;
   if(first < 1 || last > singular_values.size() || last < first || last - first + 1 < 5) {
      throw Error("classify_decay: fit range [" + std::to_string(first) + ", " + std::to_string(last) +
                  "] must lie within 1.." + std::to_string(singular_values.size()) + " and hold at least 5 points");
   }
   std::vector<double> log_k;
   std::vector<double> k_lin;
   std::vector<double> log_s;
   for(std::size_t k = first; k <= last; ++k) {
      const double s = singular_values[k - 1];
      if(!(s > 0.0) || !std::isfinite(s)) {
         throw Error("classify_decay: singular value " + std::to_string(k) + " is not positive");
      }
      log_k.push_back(std::log(static_cast<double>(k)));
      k_lin.push_back(static_cast<double>(k));
      log_s.push_back(std::log(s));
   }
   const auto mild = detail::least_squares_line(log_k, log_s);
   const auto severe = detail::least_squares_line(k_lin, log_s);

   DecayClassification c;
   c.fit_range = fit_range;
   c.decay_exponent = -mild.slope;
   c.decay_rate = -severe.slope;
   c.mild_r2 = mild.r2;
   c.severe_r2 = severe.r2;
   c.low_confidence = std::abs(mild.r2 - severe.r2) < 0.01;
   c.kind = (c.low_confidence || mild.r2 >= severe.r2) ? DecayKind::mild : DecayKind::severe;
   c.fit_quality = c.kind == DecayKind::mild ? mild.r2 : severe.r2;
   const double chosen = c.kind == DecayKind::mild ? c.decay_exponent : c.decay_rate;
   if(!(chosen > 0.0)) {
      throw Error("classify_decay: values do not decay over the fit range");
   }
   return c;
}

/// One noisy-data inversion: returns (||E||, ||S^-1(S psi + E) - psi||).
inline std::pair<double, double> measure_naive_inversion(const DiscretizedOperator& op, const SvdFactors& f,
                                                          const GridFunction& psi, const GridFunction& noise) {
   const GridFunction data = apply(op, psi) + noise;
   const GridFunction recovered = naive_inverse_apply(f, data);
   return {norm(noise), norm(recovered - psi)};
}

inline AmplificationReport noise_amplification_experiment(const DiscretizedOperator& op, const SvdFactors& f,
                                                          const GridFunction& psi, double noise_scale,
                                                          std::size_t trials, std::span<const std::uint8_t> seed) {
   detail::require(trials >= 1, "amplification experiment needs at least one trial");
   detail::require(noise_scale >= 0.0 && std::isfinite(noise_scale), "noise scale must be nonnegative");
   detail::require_dims(op.size(), psi.size(), "noise_amplification_experiment");

   const Rng base("illposed.amplify", seed);
   AmplificationReport rep;
   rep.n = op.size();
   rep.trials = trials;
   rep.amplification_min = std::numeric_limits<double>::infinity();
   double ratio_sum = 0.0;
   for(std::size_t t = 0; t < trials; ++t) {
      Rng rng = base.derive("trial", t);
      std::vector<double> e(op.size());
      for(auto& x : e) {
         x = noise_scale * rng.normal();
      }
      const auto [noise_norm, err_norm] = measure_naive_inversion(op, f, psi, GridFunction(std::move(e)));
      rep.noise_norm += noise_norm;
      rep.naive_error_norm += err_norm;
      rep.naive_error_norm_max = std::max(rep.naive_error_norm_max, err_norm);
      if(noise_norm > 0.0) {
         const double ratio = err_norm / noise_norm;
         ++rep.trials_with_noise;
         ratio_sum += ratio;
         rep.amplification_max = std::max(rep.amplification_max, ratio);
         rep.amplification_min = std::min(rep.amplification_min, ratio);
      }
   }
   rep.noise_norm /= static_cast<double>(trials);
   rep.naive_error_norm /= static_cast<double>(trials);
   if(rep.trials_with_noise > 0) {
      rep.amplification_factor = ratio_sum / static_cast<double>(rep.trials_with_noise);
   } else {
      rep.amplification_min = 0.0;
   }
   return rep;
}

inline AmplificationReport noise_amplification_experiment(const DiscretizedOperator& op, const GridFunction& psi,
                                                          double noise_scale, std::size_t trials,
                                                          std::span<const std::uint8_t> seed) {
   return noise_amplification_experiment(op, svd(op), psi, noise_scale, trials, seed);
}

/// Operator and singular system for one grid size, built once per process.
struct HsoSystem {
   DiscretizedOperator op;
   SvdFactors factors;
};

inline std::shared_ptr<const HsoSystem> hso_system(std::size_t n) {
   static std::mutex mutex;
   static std::map<std::size_t, std::shared_ptr<const HsoSystem>> cache;
   {
      std::lock_guard lock(mutex);
      if(auto it = cache.find(n); it != cache.end()) {
         return it->second;
      }
   }
   auto op = build_hso(n);
   auto factors = svd(op);
   auto sys = std::make_shared<const HsoSystem>(HsoSystem{std::move(op), std::move(factors)});
   std::lock_guard lock(mutex);
   return cache.emplace(n, std::move(sys)).first->second;
}

}  // namespace illposed
