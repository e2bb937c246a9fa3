/*
 * Copyright 2026 The asne authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "asne/eda.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

namespace asne {
namespace {

constexpr double kAlphaZeroTol = 1e-9;

// (exp(t * d) - 1) / t, continued through t = 0 where it equals d.  Keeps
// expressions like (mu^t - u^t) / t exact near the t -> 0 limit.
double expm1_ratio(double t, double d) {
  if (t == 0.0) return d;
  return std::expm1(t * d) / t;
}

void check_positive_pair(const Vector& v, const Vector& m) {
  if (v.size() != m.size()) {
    throw std::invalid_argument("vector lengths differ: " + std::to_string(v.size()) +
                                " vs " + std::to_string(m.size()));
  }
  if (v.size() == 0) {
    throw std::invalid_argument("vectors must be non-empty");
  }
  if (!(v.array() > 0.0).all() || !(m.array() > 0.0).all()) {
    throw std::invalid_argument("vectors must be strictly positive");
  }
}

void check_density_domain(double u, double mu, const EdaParams& params) {
  if (!(u > 0.0) || !(mu > 0.0)) {
    throw std::invalid_argument("density arguments must be positive, got u = " +
                                std::to_string(u) + ", mu = " + std::to_string(mu));
  }
  if (!(params.phi > 0.0)) {
    throw std::invalid_argument("dispersion must be positive, got " +
                                std::to_string(params.phi));
  }
}

double positive_alpha_checked(double alpha) {
  if (!(alpha > kAlphaZeroTol)) {
    throw std::invalid_argument("alpha must be positive and away from 0, got " +
                                std::to_string(alpha));
  }
  return alpha;
}

// -D_beta(u||mu), the divergence part of the density exponent, in a form
// stable for every real beta (the 0 and -1 limits included).
double neg_beta_divergence(double u, double mu, double beta) {
  const double log_u = std::log(u);
  const double d = std::log(mu) - log_u;
  const double term1 = u * std::exp(beta * log_u) * expm1_ratio(beta, d);
  const double term2 = -std::exp((beta + 1.0) * log_u) * expm1_ratio(beta + 1.0, d);
  return term1 + term2;
}

}  // namespace

double beta_from_alpha(double alpha) {
  if (!(std::abs(alpha) > kAlphaZeroTol)) {
    throw std::invalid_argument("alpha too close to 0 for beta = 1/alpha - 1");
  }
  return 1.0 / alpha - 1.0;
}

Vector transform_to_beta(const Vector& v, double alpha) {
  positive_alpha_checked(alpha);
  if (v.size() == 0 || !(v.array() > 0.0).all()) {
    throw std::invalid_argument("transform requires a non-empty, strictly positive vector");
  }
  // u = v^alpha / alpha^(2 alpha), computed in log space.
  const double log_scale = 2.0 * alpha * std::log(alpha);
  return (alpha * v.array().log() - log_scale).exp().matrix();
}

double alpha_divergence_positive(double v, double m, double alpha) {
  if (!(v > 0.0) || !(m > 0.0)) {
    throw std::invalid_argument("divergence arguments must be positive");
  }
  if (std::abs(alpha - 1.0) < kAlphaZeroTol) {
    return v * std::log(v / m) - v + m;
  }
  if (std::abs(alpha) < kAlphaZeroTol) {
    return m * std::log(m / v) - m + v;
  }
  const double mixed = std::exp(alpha * std::log(v) + (1.0 - alpha) * std::log(m));
  return (mixed - alpha * v + (alpha - 1.0) * m) / (alpha * (alpha - 1.0));
}

double alpha_divergence_positive(const Vector& v, const Vector& m, double alpha) {
  check_positive_pair(v, m);
  double total = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    total += alpha_divergence_positive(v(i), m(i), alpha);
  }
  return total;
}

double eda_log_density_unnormalized(double u, double mu, const EdaParams& params) {
  check_density_domain(u, mu, params);
  return 0.5 * (params.beta - 1.0) * std::log(u) +
         neg_beta_divergence(u, mu, params.beta) / params.phi;
}

double eda_score(double u, double mu, const EdaParams& params) {
  check_density_domain(u, mu, params);
  // d/du of the exponent: (beta-1)/(2u) + (mu^beta - u^beta)/(beta phi).
  const double d = std::log(mu) - std::log(u);
  const double diff = std::exp(params.beta * std::log(u)) * expm1_ratio(params.beta, d);
  return 0.5 * (params.beta - 1.0) / u + diff / params.phi;
}

double eda_score_derivative(double u, double mu, const EdaParams& params) {
  check_density_domain(u, mu, params);
  return -0.5 * (params.beta - 1.0) / (u * u) -
         std::exp((params.beta - 1.0) * std::log(u)) / params.phi;
}

double eda_log_normalizer(const EdaParams& params, double mu, double rel_tol) {
  if (!(mu > 0.0) || !(params.phi > 0.0)) {
    throw std::invalid_argument("normalizer requires mu > 0 and phi > 0");
  }
  if (!(rel_tol > 0.0)) {
    throw std::invalid_argument("relative tolerance must be positive");
  }
  const double beta = params.beta;
  const double phi = params.phi;
  const double log_mu = std::log(mu);

  // Z = ∫_0^∞ exp(g(u)) du = ∫_ℝ exp(h(t)) dt with t = log u and
  // h(t) = g(e^t) + t; the substitution removes the u -> 0 endpoint
  // singularity.  h is unimodal with h' = (beta+1)/2 at t = log mu.
  const auto h = [&](double t) {
    return 0.5 * (beta + 1.0) * t + neg_beta_divergence(std::exp(t), mu, beta) / phi;
  };
  const auto h_prime = [&](double t) {
    return 0.5 * (beta + 1.0) +
           std::exp((beta + 1.0) * t) * expm1_ratio(beta, log_mu - t) / phi;
  };

  // Locate the mode by expanding from log mu toward the sign change of h',
  // then bisecting.
  constexpr int kMaxExpand = 120;
  double t_star = log_mu;
  const double slope_at_mu = h_prime(log_mu);
  if (slope_at_mu != 0.0) {
    const double direction = slope_at_mu > 0.0 ? 1.0 : -1.0;
    double step = 1.0;
    double inner = log_mu;
    double outer = log_mu + direction * step;
    int tries = 0;
    while (h_prime(outer) * slope_at_mu > 0.0) {
      inner = outer;
      step *= 2.0;
      outer = log_mu + direction * step;
      if (++tries > kMaxExpand) {
        throw std::runtime_error("normalizer integrand has no interior mode (beta = " +
                                 std::to_string(beta) + ", phi = " + std::to_string(phi) +
                                 ", mu = " + std::to_string(mu) + ")");
      }
    }
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (inner + outer);
      if (h_prime(mid) * slope_at_mu > 0.0) {
        inner = mid;
      } else {
        outer = mid;
      }
    }
    t_star = 0.5 * (inner + outer);
  }
  const double h_star = h(t_star);

  // Widen [t_lo, t_hi] around the mode until the integrand has fallen to
  // max * 1e-16; a tail that refuses to decay marks a divergent integral.
  const double drop = std::log(1e-16);
  const auto expand_bound = [&](double direction) {
    double step = 1.0;
    int tries = 0;
    double t = t_star + direction * step;
    while (!(h(t) - h_star < drop)) {
      step *= 2.0;
      t = t_star + direction * step;
      if (++tries > kMaxExpand) {
        throw std::runtime_error("normalizer integrand tail does not decay (beta = " +
                                 std::to_string(beta) + ", phi = " + std::to_string(phi) +
                                 ", mu = " + std::to_string(mu) + ")");
      }
    }
    return t;
  };
  const double t_hi = expand_bound(1.0);
  const double t_lo = expand_bound(-1.0);

  const auto integrand = [&](double t) { return std::exp(h(t) - h_star); };
  double error_estimate = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, t_lo, t_hi, 15, rel_tol, &error_estimate);
  if (!std::isfinite(integral) || !(integral > 0.0)) {
    throw std::runtime_error("normalizer quadrature failed (beta = " + std::to_string(beta) +
                             ", phi = " + std::to_string(phi) + ", mu = " +
                             std::to_string(mu) + ")");
  }
  return h_star + std::log(integral);
}

double eda_normalizer(const EdaParams& params, double mu, double rel_tol) {
  return std::exp(eda_log_normalizer(params, mu, rel_tol));
}

double eda_log_likelihood(const Vector& v, const Vector& m, double alpha, double phi) {
  check_positive_pair(v, m);
  positive_alpha_checked(alpha);
  if (!(phi > 0.0)) {
    throw std::invalid_argument("dispersion must be positive, got " + std::to_string(phi));
  }
  const double beta = beta_from_alpha(alpha);
  if (std::abs(beta + 1.0) < 1e-12) {
    throw std::invalid_argument("beta = -1 leaves the change of variables undefined");
  }
  const EdaParams params{beta, phi};
  const Vector u = transform_to_beta(v, alpha);
  const Vector mu = transform_to_beta(m, alpha);

  // log Z depends only on mu (beta, phi fixed here); repeated mu values are
  // common when the output kernel has near-uniform rows, so memoize.
  std::unordered_map<std::uint64_t, double> log_z_cache;
  const auto log_z = [&](double value) {
    const std::uint64_t key = std::bit_cast<std::uint64_t>(value);
    const auto it = log_z_cache.find(key);
    if (it != log_z_cache.end()) return it->second;
    const double z = eda_log_normalizer(params, value);
    log_z_cache.emplace(key, z);
    return z;
  };

  double total = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    total += eda_log_density_unnormalized(u(i), mu(i), params) - log_z(mu(i)) -
             beta * std::log(u(i));
  }
  total += static_cast<double>(u.size()) * std::log(std::abs(beta + 1.0));
  return total;
}

double score_matching_objective(const Vector& v, const Vector& m, double alpha,
                                double phi) {
  check_positive_pair(v, m);
  positive_alpha_checked(alpha);
  if (!(phi > 0.0)) {
    throw std::invalid_argument("dispersion must be positive, got " + std::to_string(phi));
  }
  const EdaParams params{beta_from_alpha(alpha), phi};
  const Vector u = transform_to_beta(v, alpha);
  const Vector mu = transform_to_beta(m, alpha);
  double total = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    const double psi = eda_score(u(i), mu(i), params);
    const double psi_prime = eda_score_derivative(u(i), mu(i), params);
    const double ui = u(i);
    total += 2.0 * ui * psi + ui * ui * psi_prime + 0.5 * ui * ui * psi * psi;
  }
  return total;
}

double score_matching_objective_raw(const Vector& v, const Vector& m, double alpha,
                                    double phi) {
  check_positive_pair(v, m);
  positive_alpha_checked(alpha);
  if (!(phi > 0.0)) {
    throw std::invalid_argument("dispersion must be positive, got " + std::to_string(phi));
  }
  const EdaParams params{beta_from_alpha(alpha), phi};
  const Vector u = transform_to_beta(v, alpha);
  const Vector mu = transform_to_beta(m, alpha);
  // Density of v itself: log p_v(v) = log p_u(u(v)) + log(du/dv) with
  // du/dv = alpha u / v, so with t = psi_u + 1/u,
  //   psi_v(v)  = (alpha u / v) t - 1/v
  //   psi_v'(v) = (alpha u / v^2) ((alpha - 1) t + alpha u t') + 1/v^2,
  // t' = psi_u' - 1/u^2.
  double total = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    const double ui = u(i);
    const double vi = v(i);
    const double t = eda_score(ui, mu(i), params) + 1.0 / ui;
    const double t_prime = eda_score_derivative(ui, mu(i), params) - 1.0 / (ui * ui);
    const double psi = (alpha * ui / vi) * t - 1.0 / vi;
    const double psi_prime =
        (alpha * ui / (vi * vi)) * ((alpha - 1.0) * t + alpha * ui * t_prime) +
        1.0 / (vi * vi);
    total += 2.0 * vi * psi + vi * vi * psi_prime + 0.5 * vi * vi * psi * psi;
  }
  return total;
}

DispersionFit fit_dispersion(const Vector& v, const Vector& m, double alpha,
                             EstimationMethod method) {
  constexpr double kLogPhiLo = -12.0;
  constexpr double kLogPhiHi = 4.0;
  constexpr double kTol = 1e-6;
  const double inv_phi_ratio = 0.5 * (std::sqrt(5.0) - 1.0);

  // Minimized objective; non-finite values are treated as +inf so the
  // search backs away from pathological dispersion values.
  const auto objective = [&](double log_phi) {
    const double phi = std::exp(log_phi);
    double value = (method == EstimationMethod::kScoreMatching)
                       ? score_matching_objective_raw(v, m, alpha, phi)
                       : -eda_log_likelihood(v, m, alpha, phi);
    return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
  };

  double lo = kLogPhiLo;
  double hi = kLogPhiHi;
  double c = hi - inv_phi_ratio * (hi - lo);
  double d = lo + inv_phi_ratio * (hi - lo);
  double fc = objective(c);
  double fd = objective(d);
  while (hi - lo > kTol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi_ratio * (hi - lo);
      fc = objective(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi_ratio * (hi - lo);
      fd = objective(d);
    }
  }
  const double log_phi = 0.5 * (lo + hi);
  const double minimized = objective(log_phi);
  DispersionFit fit;
  fit.phi = std::exp(log_phi);
  fit.objective =
      (method == EstimationMethod::kMaxLikelihood) ? -minimized : minimized;
  return fit;
}

Vector offdiagonal_vector(const Matrix& m) {
  const Index n = m.rows();
  if (n < 2 || m.cols() != n) {
    throw std::invalid_argument("off-diagonal vectorization needs a square matrix, n >= 2");
  }
  Vector out(n * (n - 1));
  Index idx = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) out(idx++) = m(i, j);
    }
  }
  return out;
}

EdaFit estimate_alpha(const NeighborProbabilities& input,
                      const std::function<Embedding(double)>& embed,
                      const std::vector<double>& grid, EstimationMethod method) {
  if (grid.empty()) {
    throw std::invalid_argument("candidate grid must be non-empty");
  }
  for (double alpha : grid) {
    if (!(alpha > 1e-6 && alpha <= 1.0)) {
      throw std::invalid_argument("grid entries must lie in (1e-6, 1], got " +
                                  std::to_string(alpha));
    }
  }
  if (!embed) {
    throw std::invalid_argument("embed callback must be set");
  }

  const Vector v = offdiagonal_vector(input.probs());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  EdaFit fit;
  fit.method = method;
  fit.grid = grid;
  fit.objectives.assign(grid.size(), nan);
  fit.phis.assign(grid.size(), nan);
  fit.alt_objectives.assign(grid.size(), nan);
  fit.failed.assign(grid.size(), 0);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double alpha = grid[i];
    try {
      const Embedding embedding = embed(alpha);
      const NeighborProbabilities output = output_probabilities(embedding);
      const Vector m = offdiagonal_vector(output.probs());
      const DispersionFit candidate = fit_dispersion(v, m, alpha, method);
      fit.objectives[i] = candidate.objective;
      fit.phis[i] = candidate.phi;
      if (method == EstimationMethod::kScoreMatching) {
        fit.alt_objectives[i] =
            score_matching_objective(v, m, alpha, candidate.phi);
      }
    } catch (const std::exception&) {
      fit.failed[i] = 1;
    }
  }

  const bool maximize = method == EstimationMethod::kMaxLikelihood;
  int best = -1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (fit.failed[i] || !std::isfinite(fit.objectives[i])) continue;
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    const double current = fit.objectives[i];
    const double incumbent = fit.objectives[static_cast<std::size_t>(best)];
    if (maximize ? current > incumbent : current < incumbent) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    throw std::runtime_error("every candidate alpha failed during estimation");
  }
  fit.selected_alpha = grid[static_cast<std::size_t>(best)];
  return fit;
}

}  // namespace asne
