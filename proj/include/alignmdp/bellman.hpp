// Copyright 2026 The alignmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "alignmdp/error.hpp"
#include "alignmdp/mdp.hpp"
#include "alignmdp/solver.hpp"

namespace alignmdp {

/// Sampling distribution D over S°×A.
class StateActionDistribution {
 public:
  StateActionDistribution(const Mdp& mdp, MatrixXd weights) : weights_(std::move(weights)) {
    if (weights_.rows() != static_cast<Eigen::Index>(mdp.n_states()) ||
        weights_.cols() != static_cast<Eigen::Index>(mdp.n_actions())) {
      throw InvalidArgument("distribution shape must be n_states x n_actions");
    }
    if ((weights_.array() < 0.0).any() || !weights_.allFinite()) {
      throw InvalidArgument("distribution weights must be finite and non-negative");
    }
    for (StateIndex s : mdp.terminal()) {
      if (weights_.row(static_cast<Eigen::Index>(s)).sum() != 0.0) {
        throw InvalidArgument("distribution support must lie in the non-terminal states");
      }
    }
    if (std::abs(weights_.sum() - 1.0) > 1e-12) {
      throw InvalidArgument("distribution weights must sum to 1");
    }
  }

  static StateActionDistribution uniform(const Mdp& mdp) {
    MatrixXd w = MatrixXd::Zero(static_cast<Eigen::Index>(mdp.n_states()),
                                static_cast<Eigen::Index>(mdp.n_actions()));
    const double mass =
        1.0 / static_cast<double>(mdp.nonterminal().size() * mdp.n_actions());
    for (StateIndex s : mdp.nonterminal()) w.row(static_cast<Eigen::Index>(s)).setConstant(mass);
    return {mdp, std::move(w)};
  }

  const MatrixXd& weights() const { return weights_; }
  double operator()(StateIndex s, ActionIndex a) const {
    return weights_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
  }

 private:
  MatrixXd weights_;
};

// Per-transition: E_{(s,a)~D, s'~P}[(q - r - γM(s'))²], the squared residual
// sampled jointly with s'. MeanInside: E_D[(q - E_{s'}[r + γM(s')])²].
enum class ResidualForm { kPerTransition, kMeanInside };

inline std::string to_string(ResidualForm f) {
  return f == ResidualForm::kPerTransition ? "per-transition" : "mean-inside";
}

namespace detail {

inline void check_shapes(const Mdp& mdp, const QTable& q) {
  if (q.n_states() != mdp.n_states() || q.n_actions() != mdp.n_actions()) {
    throw InvalidArgument("Q table shape must be n_states x n_actions");
  }
}

// The loss is a quadratic a - 2bγ + cγ² in the evaluation discount; this
// returns its coefficients so every quantity below is exact in γ.
struct LossPolynomial {
  double constant = 0.0;  // a
  double linear = 0.0;    // b
  double quadratic = 0.0; // c

  double at(double g) const { return constant - 2.0 * linear * g + quadratic * g * g; }
};

inline LossPolynomial loss_polynomial(const Mdp& mdp, const QTable& q,
                                      const StateActionDistribution& dist, ResidualForm form) {
  check_shapes(mdp, q);
  VectorXd m(static_cast<Eigen::Index>(mdp.n_states()));
  for (StateIndex s = 0; s < mdp.n_states(); ++s) m(static_cast<Eigen::Index>(s)) = row_max(q.q, s);

  LossPolynomial poly;
  for (StateIndex s : mdp.nonterminal()) {
    for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
      const double w = dist(s, a);
      if (w == 0.0) continue;
      if (form == ResidualForm::kPerTransition) {
        for (StateIndex t = 0; t < mdp.n_states(); ++t) {
          const double p = mdp.P(s, a, t);
          if (p == 0.0) continue;
          const double u = q(s, a) - mdp.R(s, a, t);
          const double mt = m(static_cast<Eigen::Index>(t));
          poly.constant += w * p * u * u;
          poly.linear += w * p * u * mt;
          poly.quadratic += w * p * mt * mt;
        }
      } else {
        double rbar = 0.0, mbar = 0.0;
        for (StateIndex t = 0; t < mdp.n_states(); ++t) {
          rbar += mdp.P(s, a, t) * mdp.R(s, a, t);
          mbar += mdp.P(s, a, t) * m(static_cast<Eigen::Index>(t));
        }
        const double u = q(s, a) - rbar;
        poly.constant += w * u * u;
        poly.linear += w * u * mbar;
        poly.quadratic += w * mbar * mbar;
      }
    }
  }
  return poly;
}

}  // namespace detail

// Direct evaluation of the squared Bellman optimality residual at
// discount gamma_eval; gamma_eval = 1 gives the undiscounted loss.
inline double bellman_loss(const Mdp& mdp, const QTable& q, const StateActionDistribution& dist,
                           double gamma_eval,
                           ResidualForm form = ResidualForm::kPerTransition) {
  detail::check_shapes(mdp, q);
  double loss = 0.0;
  for (StateIndex s : mdp.nonterminal()) {
    for (ActionIndex a = 0; a < mdp.n_actions(); ++a) {
      const double w = dist(s, a);
      if (w == 0.0) continue;
      if (form == ResidualForm::kPerTransition) {
        double acc = 0.0;
        for (StateIndex t = 0; t < mdp.n_states(); ++t) {
          const double p = mdp.P(s, a, t);
          if (p == 0.0) continue;
          const double e = q(s, a) - mdp.R(s, a, t) - gamma_eval * row_max(q.q, t);
          acc += p * e * e;
        }
        loss += w * acc;
      } else {
        double target = 0.0;
        for (StateIndex t = 0; t < mdp.n_states(); ++t) {
          target += mdp.P(s, a, t) * (mdp.R(s, a, t) + gamma_eval * row_max(q.q, t));
        }
        const double e = q(s, a) - target;
        loss += w * e * e;
      }
    }
  }
  return loss;
}

struct LossDerivatives {
  double d1 = 0.0;
  double d2 = 0.0;
};

/// First and second derivatives of the loss in the discount.
///
/// With e = q(s,a) - r - γM(s') and M(s') = max_a' q(s',a'):
/// d1 = -2 E[M e], d2 = 2 E[M²]; d2 does not depend on γ.
inline LossDerivatives loss_gamma_derivatives(const Mdp& mdp, const QTable& q,
                                              const StateActionDistribution& dist,
                                              double gamma,
                                              ResidualForm form = ResidualForm::kPerTransition) {
  const auto poly = detail::loss_polynomial(mdp, q, dist, form);
  return {-2.0 * poly.linear + 2.0 * poly.quadratic * gamma, 2.0 * poly.quadratic};
}

// |L(q,1) - L(q,γ) - d1(1-γ) - d2(1-γ)²/2|; zero up to rounding because the
// loss is exactly quadratic in the discount.
inline double taylor_residual(const Mdp& mdp, const QTable& q,
                              const StateActionDistribution& dist, double gamma,
                              ResidualForm form = ResidualForm::kPerTransition) {
  const double at_one = bellman_loss(mdp, q, dist, 1.0, form);
  const double at_gamma = bellman_loss(mdp, q, dist, gamma, form);
  const auto d = loss_gamma_derivatives(mdp, q, dist, gamma, form);
  const double h = 1.0 - gamma;
  return std::abs(at_one - at_gamma - d.d1 * h - 0.5 * d.d2 * h * h);
}

struct BoundInputs {
  std::uint64_t m = 1;       // network width per action
  double gamma = 1.0;        // in (0,1]
  double z = 0.0;            // sup-norm bound on state embeddings
  std::uint64_t horizon = 1; // H
  double concentrability = 1.0;
  double barron_norm = 0.0;  // ||Q*_γ||_B, supplied by the caller
};

inline void check(const BoundInputs& b) {
  auto finite = [](double x) { return std::isfinite(x); };
  if (b.m < 1) throw InvalidArgument("width m must be >= 1");
  if (!(b.gamma > 0.0 && b.gamma <= 1.0)) throw InvalidArgument("gamma must lie in (0,1]");
  if (!(finite(b.z) && b.z >= 0.0)) throw InvalidArgument("Z must be finite and >= 0");
  if (b.horizon < 1) throw InvalidArgument("H must be >= 1");
  if (!(finite(b.concentrability) && b.concentrability >= 1.0)) {
    throw InvalidArgument("concentrability must be >= 1");
  }
  if (!(finite(b.barron_norm) && b.barron_norm >= 0.0)) {
    throw InvalidArgument("Barron norm must be finite and >= 0");
  }
}

// 2H sqrt(𝒞 (12/m + 2(1-γ)Z sqrt(12/m) + (1-γ)² Z)) ||Q*_γ||_B
inline double suboptimality_bound(const BoundInputs& b) {
  check(b);
  const double width_term = 12.0 / static_cast<double>(b.m);
  const double h = 1.0 - b.gamma;
  const double bracket = width_term + 2.0 * h * b.z * std::sqrt(width_term) + h * h * b.z;
  return 2.0 * static_cast<double>(b.horizon) * std::sqrt(b.concentrability * bracket) * b.barron_norm;
}

}  // namespace alignmdp
