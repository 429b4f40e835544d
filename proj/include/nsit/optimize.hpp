// Derivative-free maximization over pure states, and the channel-distance
// searches built on it (induced trace-norm distance, diamond-norm distance).
//
// The search is a seeded multi-restart hill climb: states are parameterized by
// unnormalized complex vectors, candidate moves are Gaussian perturbations of
// the current vector, and the step size decays geometrically (factor 0.7)
// after every 10 consecutive rejected moves.  Restarts use independent
// substreams of the seed, so results are reproducible bit for bit.
#pragma once

#include <functional>
#include <limits>
#include <optional>

#include "nsit/channels.hpp"
#include "nsit/qops.hpp"
#include "nsit/random.hpp"

namespace nsit {

struct SearchConfig {
  int restarts = 64;
  int max_iters = 2000;     // perturbation trials per restart
  double step_init = 0.5;
  double step_decay = 0.7;
  int fail_streak = 10;     // rejects before the step shrinks
  double tol = 1e-6;        // step size at which a restart counts as converged
  std::uint64_t seed = 1234;
};

struct Optimum {
  double value = -std::numeric_limits<double>::infinity();
  Vector argmax_ket;               // normalized
  std::optional<Effect> effect;    // Helstrom effect at the argmax, when defined
  bool converged = false;
  long evaluations = 0;
};

namespace detail {

inline Optimum search_pure_states(const std::function<double(const Vector&)>& objective, int dim,
                                  const SearchConfig& config,
                                  const std::vector<Vector>& warm_starts) {
  if (dim < 1) throw std::invalid_argument("search_pure_states: dimension must be positive");
  if (config.restarts < 1 || config.max_iters < 0 || config.step_init <= 0.0 ||
      config.step_decay <= 0.0 || config.step_decay >= 1.0 || config.fail_streak < 1 ||
      config.tol <= 0.0)
    throw std::invalid_argument("search_pure_states: invalid search configuration");
  Optimum best;
  long evaluations = 0;
  for (int restart = 0; restart < config.restarts; ++restart) {
    Rng rng = make_rng(config.seed, static_cast<std::uint64_t>(restart));
    Vector v;
    if (restart < static_cast<int>(warm_starts.size()) &&
        warm_starts[static_cast<size_t>(restart)].size() == dim) {
      v = warm_starts[static_cast<size_t>(restart)].normalized();
    } else {
      v = random_pure_ket(dim, rng);
    }
    double value = objective(v);
    ++evaluations;
    double step = config.step_init;
    int rejects = 0;
    bool converged = false;
    for (int iter = 0; iter < config.max_iters; ++iter) {
      if (step < config.tol) {
        converged = true;
        break;
      }
      Vector candidate = v + step * random_gaussian_ket(dim, rng);
      double n = candidate.norm();
      if (n < 1e-12) continue;
      candidate /= n;
      double candidate_value = objective(candidate);
      ++evaluations;
      if (candidate_value > value) {
        v = candidate;
        value = candidate_value;
        rejects = 0;
      } else if (++rejects >= config.fail_streak) {
        step *= config.step_decay;
        rejects = 0;
      }
    }
    if (value > best.value) {
      best.value = value;
      best.argmax_ket = v;
      best.converged = converged;
    }
  }
  // Certificate: the reported value is the objective re-evaluated at the
  // stored argmax, never a stale running maximum.
  best.value = objective(best.argmax_ket);
  ++evaluations;
  best.evaluations = evaluations;
  return best;
}

}  // namespace detail

inline Optimum max_over_pure_states(const std::function<double(const Vector&)>& objective, int dim,
                                    const SearchConfig& config = SearchConfig{}) {
  return detail::search_pure_states(objective, dim, config, {});
}

// Best effect for a Hermitian score operator: the projector onto its strictly
// positive eigenspace, with value tr(M delta).
struct EffectOptimum {
  Effect effect;
  double value;
};

inline EffectOptimum optimal_effect(const Matrix& delta) {
  Effect m = positive_part_projector(delta);
  double value = (m.matrix() * delta).trace().real();
  return EffectOptimum{std::move(m), value};
}

namespace detail {

inline double map_difference_objective(const KrausChannel& a, const KrausChannel& b,
                                       const Vector& ket) {
  const Matrix rho = ket * ket.adjoint();
  return 0.5 * trace_norm(a.act(rho) - b.act(rho));
}

}  // namespace detail

// max over pure rho of || a(rho) - b(rho) ||_tr / 2.  Convexity puts the
// maximum on pure states, so the pure-state search is exhaustive in principle.
inline Optimum induced_trace_norm_distance(const KrausChannel& a, const KrausChannel& b,
                                           const SearchConfig& config = SearchConfig{}) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    throw std::invalid_argument("induced_trace_norm_distance: channel shapes differ");
  auto objective = [&](const Vector& ket) { return detail::map_difference_objective(a, b, ket); };
  Optimum opt = max_over_pure_states(objective, a.dim_in(), config);
  const Matrix rho = opt.argmax_ket * opt.argmax_ket.adjoint();
  opt.effect = positive_part_projector(hermitize(a.act(rho) - b.act(rho)));
  return opt;
}

// Diamond-norm distance || a - b ||_diamond / 2: the induced distance of the
// channels extended by an ancilla of the input dimension (which is known to
// suffice).  The first restart is warm-started from the best ancilla-free
// state, so the result never falls below the plain induced distance.
inline Optimum diamond_distance(const KrausChannel& a, const KrausChannel& b,
                                const SearchConfig& config = SearchConfig{}) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    throw std::invalid_argument("diamond_distance: channel shapes differ");
  const int d = a.dim_in();
  const KrausChannel lifted_a = tensor_channels(a, identity_channel(d));
  const KrausChannel lifted_b = tensor_channels(b, identity_channel(d));
  const Optimum plain = induced_trace_norm_distance(a, b, config);
  const Vector warm = tensor(plain.argmax_ket, basis_ket(d, 0));
  auto objective = [&](const Vector& ket) {
    return detail::map_difference_objective(lifted_a, lifted_b, ket);
  };
  Optimum opt = detail::search_pure_states(objective, d * d, config, {warm});
  const Matrix rho = opt.argmax_ket * opt.argmax_ket.adjoint();
  opt.effect = positive_part_projector(hermitize(lifted_a.act(rho) - lifted_b.act(rho)));
  return opt;
}

}  // namespace nsit
