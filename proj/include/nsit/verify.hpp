// Named end-to-end verification checks.  Each check pits one closed-form
// claim of the witness framework against an independent numerical route and
// reports pass/fail together with the measured numbers.  The same suite backs
// the command-line `verify` command and the acceptance test binary.
#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "nsit/optimize.hpp"
#include "nsit/scenarios.hpp"
#include "nsit/witness.hpp"

namespace nsit {

enum class Relation { Equal, AtLeast, AtMost };

struct CheckDetail {
  std::string label;
  double measured;
  double expected;
  double tolerance;
  Relation relation;
  bool pass;
};

struct CheckResult {
  std::string name;
  bool pass = true;
  std::vector<CheckDetail> details;

  void add(const std::string& label, double measured, double expected, double tolerance,
           Relation relation = Relation::Equal) {
    bool ok = false;
    switch (relation) {
      case Relation::Equal: ok = std::abs(measured - expected) <= tolerance; break;
      case Relation::AtLeast: ok = measured >= expected - tolerance; break;
      case Relation::AtMost: ok = measured <= expected + tolerance; break;
    }
    details.push_back({label, measured, expected, tolerance, relation, ok});
    pass = pass && ok;
  }
};

using ToleranceOverrides = std::map<std::string, double>;

namespace detail {

inline double tol_for(const ToleranceOverrides& overrides, const std::string& name,
                      double fallback) {
  auto it = overrides.find(name);
  return it == overrides.end() ? fallback : it->second;
}

inline std::string dim_label(const std::string& prefix, int d) {
  return prefix + " d=" + std::to_string(d);
}

// -- check implementations ----------------------------------------------------

// Search maximum of R(rho)/2 over pure states vs the closed form 1 - 1/d.
inline CheckResult check_isolated_max(std::uint64_t seed, const ToleranceOverrides& ovr) {
  CheckResult res{"isolated-max"};
  const double search_tol = tol_for(ovr, "isolated-max", 1e-3);
  for (int d = 2; d <= 5; ++d) {
    SearchConfig cfg;
    cfg.restarts = 24;
    cfg.max_iters = 1500;
    cfg.tol = 1e-7;
    cfg.seed = mix_seed(seed, 100 + static_cast<std::uint64_t>(d));
    auto objective = [](const Vector& ket) {
      return 0.5 * trace_norm(coherence_part(ket * ket.adjoint()));
    };
    const Optimum opt = max_over_pure_states(objective, d, cfg);
    const double closed_form = 1.0 - 1.0 / static_cast<double>(d);
    res.add(dim_label("search", d), opt.value, closed_form, search_tol);
    res.add(dim_label("at max-coherent state", d), 0.5 * r_monotone(maximally_coherent_state(d)),
            closed_form, 1e-12);
  }
  return res;
}

// Diamond distance between the identity and classicalisation vs 1 - 1/d.
inline CheckResult check_diamond_norm(std::uint64_t seed, const ToleranceOverrides& ovr) {
  CheckResult res{"diamond-norm"};
  const double search_tol = tol_for(ovr, "diamond-norm", 1e-3);
  for (int d = 2; d <= 4; ++d) {
    SearchConfig cfg;
    cfg.restarts = 16;
    cfg.max_iters = 2500;
    cfg.tol = 1e-7;
    cfg.seed = mix_seed(seed, 200 + static_cast<std::uint64_t>(d));
    const KrausChannel id = identity_channel(d);
    const KrausChannel gamma = classicalise(d);
    const Optimum opt = diamond_distance(id, gamma, cfg);
    const double closed_form = 1.0 - 1.0 / static_cast<double>(d);
    res.add(dim_label("search", d), opt.value, closed_form, search_tol);

    // Two states that are known to attain the maximum, evaluated directly.
    const KrausChannel lifted_id = tensor_channels(id, identity_channel(d));
    const KrausChannel lifted_gamma = tensor_channels(gamma, identity_channel(d));
    const Matrix entangled = maximally_entangled_state(d).matrix();
    const double at_entangled =
        0.5 * trace_norm(lifted_id.act(entangled) - lifted_gamma.act(entangled));
    res.add(dim_label("at entangled input", d), at_entangled, closed_form, 1e-12);
    Rng rng = make_rng(seed, 210 + static_cast<std::uint64_t>(d));
    const Matrix product = tensor(maximally_coherent_state(d).matrix(),
                                  random_density(d, rng).matrix());
    const double at_product =
        0.5 * trace_norm(lifted_id.act(product) - lifted_gamma.act(product));
    res.add(dim_label("at coherent product input", d), at_product, closed_form, 1e-12);
  }
  return res;
}

// The ancilla does not change the distance between identity and Gamma.
inline CheckResult check_ancilla_no_help(std::uint64_t seed, const ToleranceOverrides& ovr) {
  CheckResult res{"ancilla-no-help"};
  const double agree_tol = tol_for(ovr, "ancilla-no-help", 2e-4);
  for (int d = 2; d <= 4; ++d) {
    SearchConfig cfg;
    cfg.restarts = 24;
    cfg.max_iters = 3000;
    cfg.tol = 1e-7;
    cfg.seed = mix_seed(seed, 300 + static_cast<std::uint64_t>(d));
    const KrausChannel id = identity_channel(d);
    const KrausChannel gamma = classicalise(d);
    const Optimum plain = induced_trace_norm_distance(id, gamma, cfg);
    const Optimum lifted = diamond_distance(id, gamma, cfg);
    res.add(dim_label("|diamond - induced|", d), std::abs(lifted.value - plain.value), 0.0,
            agree_tol);
  }
  return res;
}

inline void add_expected_details(CheckResult& res, const NamedScenario& ns, double tol_override) {
  for (const ExpectedValue& e : ns.expected) {
    const double tolerance = tol_override > 0.0 ? tol_override : e.tolerance;
    res.add(e.quantity, evaluate_quantity(ns, e.quantity), e.value, tolerance);
  }
}

inline CheckResult check_bell(std::uint64_t, const ToleranceOverrides& ovr) {
  CheckResult res{"bell"};
  const NamedScenario ns = bell_scenario();
  add_expected_details(res, ns, detail::tol_for(ovr, "bell", 0.0));
  res.add("w_a_superchannel", evaluate_quantity(ns, "w_a_superchannel"), 0.5, 1e-12);
  return res;
}

inline CheckResult check_epsilon_mixture(std::uint64_t, const ToleranceOverrides& ovr) {
  CheckResult res{"epsilon-mixture"};
  const double tolerance = tol_for(ovr, "epsilon-mixture", 1e-12);
  for (int d = 2; d <= 3; ++d)
    for (int k = 0; k <= 6; ++k) {
      const double eps = 0.05 * k;
      const NamedScenario ns = epsilon_mixture_scenario(d, eps);
      const double w = evaluate_quantity(ns, "w_a");
      char label[64];
      std::snprintf(label, sizeof(label), "w_a d=%d eps=%.2f", d, eps);
      res.add(label, w, eps * (1.0 - 1.0 / static_cast<double>(d)), tolerance);
      if (d == 2) {
        std::snprintf(label, sizeof(label), "ppt min eig d=2 eps=%.2f", eps);
        res.add(label, evaluate_quantity(ns, "ppt_min_eig"), 0.0, 1e-12, Relation::AtLeast);
      }
    }
  return res;
}

inline CheckResult check_classical_false_positive(std::uint64_t, const ToleranceOverrides& ovr) {
  CheckResult res{"classical-false-positive"};
  add_expected_details(res, classical_false_positive_scenario(),
                       detail::tol_for(ovr, "classical-false-positive", 0.0));
  return res;
}

// Faithfulness of the IQ distance: zero on the IQ set, bounded away from zero
// on visibly non-IQ states.
inline CheckResult check_iq_faithfulness(std::uint64_t seed, const ToleranceOverrides& ovr) {
  CheckResult res{"iq-faithfulness"};
  const double zero_tol = tol_for(ovr, "iq-faithfulness", 1e-10);
  for (int d : {2, 3}) {
    BipartiteLayout layout(d, d);
    Rng rng = make_rng(seed, 400 + static_cast<std::uint64_t>(d));
    double max_on_iq = 0.0;
    double min_on_perturbed = 1e300;
    std::uniform_real_distribution<double> eps_draw(0.05, 0.3);
    for (int k = 0; k < 100; ++k) {
      const DensityMatrix iq = random_iq_state(layout, rng);
      max_on_iq = std::max(max_on_iq, iq_distance(iq, layout));
      const double eps = eps_draw(rng);
      Matrix perturbed = (1.0 - eps) * random_iq_state(layout, rng).matrix() +
                         eps * maximally_entangled_state(d).matrix();
      min_on_perturbed =
          std::min(min_on_perturbed, iq_distance(DensityMatrix(hermitize(perturbed)), layout));
    }
    res.add(dim_label("max distance on 100 IQ states", d), max_on_iq, 0.0, zero_tol,
            Relation::AtMost);
    res.add(dim_label("min distance on 100 perturbed states", d), min_on_perturbed, 1e-3, 0.0,
            Relation::AtLeast);
  }
  return res;
}

// Coherence lower bounds from w_a and w_b on random scenarios, and the
// measurement-map drift bound (whose lhs is itself a search).
inline CheckResult check_bound_suite(std::uint64_t seed, const ToleranceOverrides& ovr) {
  CheckResult res{"bound-suite"};
  const double slack_tol = tol_for(ovr, "bound-suite", 1e-9);
  const std::vector<BipartiteLayout> layouts = {BipartiteLayout(2, 2), BipartiteLayout(2, 3),
                                                BipartiteLayout(3, 2)};
  for (size_t li = 0; li < layouts.size(); ++li) {
    Rng rng = make_rng(seed, 500 + static_cast<std::uint64_t>(li));
    double min_wa_slack = 1e300;
    double min_wb_slack = 1e300;
    for (int k = 0; k < 500; ++k) {
      const Scenario sc = random_scenario(layouts[li], rng);
      const WitnessReport rep = witness_suite(sc);
      min_wa_slack = std::min(min_wa_slack, rep.wa_bound.slack);
      min_wb_slack = std::min(min_wb_slack, rep.wb_bound.slack);
    }
    char label[96];
    std::snprintf(label, sizeof(label), "w_a bound min slack (%d,%d) over 500",
                  layouts[li].dim_s, layouts[li].dim_e);
    res.add(label, min_wa_slack, 0.0, slack_tol, Relation::AtLeast);
    std::snprintf(label, sizeof(label), "w_b bound min slack (%d,%d) over 500",
                  layouts[li].dim_s, layouts[li].dim_e);
    res.add(label, min_wb_slack, 0.0, slack_tol, Relation::AtLeast);
  }

  // Measurement-map drift bound on 100 random scenarios; the searched lhs can
  // only underestimate, which keeps the inequality check sound.
  const double map_tol = tol_for(ovr, "bound-suite-map", 1e-6);
  Rng rng = make_rng(seed, 510);
  SearchConfig cfg;
  cfg.restarts = 64;
  cfg.max_iters = 300;
  cfg.step_init = 0.4;
  cfg.tol = 1e-5;
  double min_slack = 1e300;
  for (int k = 0; k < 100; ++k) {
    cfg.seed = mix_seed(seed, 520 + static_cast<std::uint64_t>(k));
    const Scenario sc = random_scenario(BipartiteLayout(2, 2), rng);
    min_slack = std::min(min_slack, measurement_map_bound(sc, cfg).slack);
  }
  res.add("map bound min slack over 100", min_slack, 0.0, map_tol, Relation::AtLeast);

  // The classically correlated flip dynamics saturates the drift bound.
  SearchConfig eq_cfg;
  eq_cfg.seed = mix_seed(seed, 530);
  const Scenario cfp = std::get<Scenario>(classical_false_positive_scenario().payload);
  const BoundRecord rec = measurement_map_bound(cfp, eq_cfg);
  res.add("map bound saturation |lhs - rhs|", std::abs(rec.lhs - rec.rhs), 0.0, map_tol);
  return res;
}

// Superchannel route vs direct propagation for the fast witness.
inline CheckResult check_superchannel_oracle(std::uint64_t seed, const ToleranceOverrides& ovr) {
  CheckResult res{"superchannel-oracle"};
  const double tolerance = tol_for(ovr, "superchannel-oracle", 1e-10);
  const std::vector<BipartiteLayout> layouts = {BipartiteLayout(2, 2), BipartiteLayout(2, 3),
                                                BipartiteLayout(3, 2)};
  Rng rng = make_rng(seed, 600);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Scenario sc = random_scenario(layouts[static_cast<size_t>(k) % layouts.size()], rng);
    const double direct = fast_witness(sc);
    worst = std::max(worst, std::abs(w_a_superchannel(sc) - direct));
  }
  res.add("max |superchannel - direct| over 500", worst, 0.0, tolerance, Relation::AtMost);
  return res;
}

// The two classicalisation constructions (random dephasing with independent
// per-level pi-flips, blind measurement) define the same channel.
inline CheckResult check_gamma_equivalence(std::uint64_t, const ToleranceOverrides& ovr) {
  CheckResult res{"gamma-equivalence"};
  const double tolerance = tol_for(ovr, "gamma-equivalence", 1e-12);
  for (int d = 2; d <= 4; ++d) {
    const Matrix lhs = choi(dephase(phase_flip_distribution(d)));
    const Matrix rhs = choi(classicalise(d));
    res.add(dim_label("max Choi difference", d), (lhs - rhs).cwiseAbs().maxCoeff(), 0.0, tolerance,
            Relation::AtMost);
  }
  return res;
}

inline CheckResult check_partial_summation(std::uint64_t seed, const ToleranceOverrides& ovr) {
  CheckResult res{"partial-summation"};
  const double tolerance = tol_for(ovr, "partial-summation", 1e-12);
  const PreferredBasis basis2(2);

  // Zero-witness pair must run to completion (the early stop never fires).
  const DensityMatrix one(projector(basis_ket(2, 1)));
  const Effect plus2(maximally_coherent_state(2).matrix());
  const auto never = partial_summation(one, plus2, basis2);
  res.add("zero-witness stop index (-1 = none)", never.stop_index ? *never.stop_index : -1.0, -1.0,
          0.1);
  res.add("zero-witness |w|", never.witness_abs, 0.0, tolerance);

  // Random diagonal states have zero witness for any effect: no stop, ever.
  Rng rng = make_rng(seed, 700);
  int stops = 0;
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 3;
    std::vector<double> w = random_weights(d, rng);
    Matrix diag = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) diag(i, i) = w[static_cast<size_t>(i)];
    const auto trace = partial_summation(DensityMatrix(diag), random_effect(d, rng),
                                         PreferredBasis(d));
    if (trace.stop_index) ++stops;
  }
  res.add("stops on 100 diagonal states", stops, 0.0, 0.1);

  // Maximally coherent pair: the complement rule stops immediately, the
  // unbounded form never stops, and at d=4 every summand is equal.
  const DensityMatrix plus_state2 = maximally_coherent_state(2);
  const auto with_complement = partial_summation(plus_state2, plus2, basis2);
  res.add("complement used", with_complement.complement_used ? 1.0 : 0.0, 1.0, 0.1);
  res.add("complement stop index", with_complement.stop_index ? *with_complement.stop_index : -1.0,
          0.0, 0.1);
  const auto without = partial_summation(plus_state2, plus2, basis2, tol::decomposition, false);
  res.add("no-complement stop index (-1 = none)", without.stop_index ? *without.stop_index : -1.0,
          -1.0, 0.1);

  const DensityMatrix plus4 = maximally_coherent_state(4);
  const Effect plus4_eff(plus4.matrix());
  const auto maximizing = partial_summation(plus4, plus4_eff, PreferredBasis(4));
  double lo = 1e300, hi = -1e300;
  for (double t : maximizing.terms) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  res.add("maximizing pair term spread d=4", hi - lo, 0.0, tolerance);
  res.add("maximizing pair |w| d=4", maximizing.witness_abs, 0.75, tolerance);

  // On random pairs: a stop in either form certifies a nonzero witness, and a
  // positive witness with a large target is caught by the complement form
  // alone (the direct running sum stays below its target there).
  int false_alarms = 0;
  int complement_misses = 0;
  for (int k = 0; k < 200; ++k) {
    const DensityMatrix rho = random_pure_state(4, rng);
    const Effect m = random_effect(4, rng);
    const auto a = partial_summation(rho, m, PreferredBasis(4), tol::decomposition, true);
    const auto b = partial_summation(rho, m, PreferredBasis(4), tol::decomposition, false);
    if ((a.stop_index || b.stop_index) && a.witness_abs <= tol::decomposition) ++false_alarms;
    const double w_signed = b.target - b.running_sums.back();
    if (b.target > 0.5 + 1e-9 && w_signed > tol::decomposition)
      if (!a.complement_used || !a.stop_index || b.stop_index) ++complement_misses;
  }
  res.add("false alarms on 200 random pairs", false_alarms, 0.0, 0.1);
  res.add("complement misses on positive-witness large-target pairs", complement_misses, 0.0, 0.1);
  return res;
}

// Classical preparations bound the witness; a coherent preparation escapes the
// interval, a classical mixture never does.
inline CheckResult check_device_independence(std::uint64_t seed, const ToleranceOverrides& ovr) {
  CheckResult res{"device-independence"};
  const double margin_req = tol_for(ovr, "device-independence", 0.49);

  // Coherence-revealing qubit dynamics: prepare, rotate by Hadamard, read out.
  BipartiteLayout iso(2, 1);
  const DensityMatrix env(Matrix::Identity(1, 1));
  const Matrix eye = Matrix::Identity(2, 2);
  const Effect m0(projector(basis_ket(2, 0)));
  auto make = [&](const DensityMatrix& rho0) {
    return Scenario(iso, rho0, env, eye, hadamard(), m0);
  };
  std::vector<Scenario> family;
  for (int i = 0; i < 2; ++i) family.push_back(make(DensityMatrix(projector(basis_ket(2, i)))));
  const BaselineInterval plus_test = baseline_interval(family, make(maximally_coherent_state(2)));
  res.add("max-coherent test violated", plus_test.violated ? 1.0 : 0.0, 1.0, 0.1);
  const double margin = std::max(plus_test.min_w - plus_test.w_test,
                                 plus_test.w_test - plus_test.max_w);
  res.add("violation margin", margin, margin_req, 1e-12, Relation::AtLeast);

  // Convex mixtures of classical preparations never violate, under the fixed
  // dynamics above and under random dynamics draws.
  Rng rng = make_rng(seed, 800);
  int violations = 0;
  for (int draw = 0; draw < 5; ++draw) {
    const int d = (draw % 2 == 0) ? 2 : 3;
    const BipartiteLayout layout(d, draw < 2 ? 1 : 2);
    const DensityMatrix env0 = (layout.dim_e == 1)
                                   ? DensityMatrix(Matrix::Identity(1, 1))
                                   : DensityMatrix(projector(basis_ket(layout.dim_e, 0)));
    const Matrix u1 = (draw == 0) ? Matrix(Matrix::Identity(layout.joint_dim(), layout.joint_dim()))
                                  : random_unitary(layout.joint_dim(), rng);
    const Matrix u2 = (draw == 0 && d == 2) ? tensor(hadamard(), Matrix::Identity(1, 1))
                                            : random_unitary(layout.joint_dim(), rng);
    const Effect m = (draw == 0) ? Effect(projector(basis_ket(d, 0))) : random_effect(d, rng);
    auto scen = [&](const DensityMatrix& rho0) {
      return Scenario(layout, rho0, env0, u1, u2, m);
    };
    std::vector<Scenario> fam;
    for (int i = 0; i < d; ++i) fam.push_back(scen(DensityMatrix(projector(basis_ket(d, i)))));
    for (int k = 0; k < 100; ++k) {
      std::vector<double> w = random_weights(d, rng);
      Matrix mix = Matrix::Zero(d, d);
      for (int i = 0; i < d; ++i) mix(i, i) = w[static_cast<size_t>(i)];
      if (baseline_interval(fam, scen(DensityMatrix(mix))).violated) ++violations;
    }
  }
  res.add("violations by 500 classical mixtures", violations, 0.0, 0.1);
  return res;
}

// With a spectator environment the fast, slow and reduced-state witnesses all
// coincide.
inline CheckResult check_born_unification(std::uint64_t seed, const ToleranceOverrides& ovr) {
  CheckResult res{"born-unification"};
  const double tolerance = tol_for(ovr, "born-unification", 1e-10);
  Rng rng = make_rng(seed, 900);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int d = (k % 2 == 0) ? 2 : 3;
    const Matrix u_s = random_unitary(d, rng);
    const NamedScenario ns = born_scenario(u_s, k % 4 < 2, random_effect(d, rng));
    const WitnessReport rep = witness_suite(std::get<Scenario>(ns.payload));
    worst = std::max({worst, std::abs(rep.w_a - rep.w_b), std::abs(rep.w_b - rep.w_c),
                      std::abs(rep.w_c - rep.w_isolated)});
  }
  res.add("max witness disagreement over 50 draws", worst, 0.0, tolerance, Relation::AtMost);
  return res;
}

}  // namespace detail

// Registry of every named check, in report order.
inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "isolated-max",       "diamond-norm",      "ancilla-no-help",
      "bell",               "epsilon-mixture",   "classical-false-positive",
      "iq-faithfulness",    "bound-suite",       "superchannel-oracle",
      "gamma-equivalence",  "partial-summation", "device-independence",
      "born-unification"};
  return names;
}

inline CheckResult run_check(const std::string& name, std::uint64_t seed,
                             const ToleranceOverrides& overrides = {}) {
  if (name == "isolated-max") return detail::check_isolated_max(seed, overrides);
  if (name == "diamond-norm") return detail::check_diamond_norm(seed, overrides);
  if (name == "ancilla-no-help") return detail::check_ancilla_no_help(seed, overrides);
  if (name == "bell") return detail::check_bell(seed, overrides);
  if (name == "epsilon-mixture") return detail::check_epsilon_mixture(seed, overrides);
  if (name == "classical-false-positive")
    return detail::check_classical_false_positive(seed, overrides);
  if (name == "iq-faithfulness") return detail::check_iq_faithfulness(seed, overrides);
  if (name == "bound-suite") return detail::check_bound_suite(seed, overrides);
  if (name == "superchannel-oracle") return detail::check_superchannel_oracle(seed, overrides);
  if (name == "gamma-equivalence") return detail::check_gamma_equivalence(seed, overrides);
  if (name == "partial-summation") return detail::check_partial_summation(seed, overrides);
  if (name == "device-independence") return detail::check_device_independence(seed, overrides);
  if (name == "born-unification") return detail::check_born_unification(seed, overrides);
  throw std::invalid_argument("run_check: unknown check '" + name + "'");
}

// Runs every check whose name contains `only` (all checks when empty).
inline std::vector<CheckResult> run_checks(std::uint64_t seed,
                                           const ToleranceOverrides& overrides = {},
                                           const std::string& only = "") {
  std::vector<CheckResult> results;
  for (const std::string& name : check_names())
    if (only.empty() || name.find(only) != std::string::npos)
      results.push_back(run_check(name, seed, overrides));
  return results;
}

inline std::string relation_symbol(Relation r) {
  switch (r) {
    case Relation::Equal: return "==";
    case Relation::AtLeast: return ">=";
    case Relation::AtMost: return "<=";
  }
  return "?";
}

inline std::string render_check_line(const CheckResult& res) {
  std::string line = (res.pass ? "PASS " : "FAIL ") + res.name;
  // Surface the tightest detail so the margin is visible at a glance; list
  // every failing detail explicitly.
  const CheckDetail* tightest = nullptr;
  double tightest_margin = 1e300;
  for (const CheckDetail& d : res.details) {
    double margin = 0.0;
    switch (d.relation) {
      case Relation::Equal: margin = d.tolerance - std::abs(d.measured - d.expected); break;
      case Relation::AtLeast: margin = d.measured - (d.expected - d.tolerance); break;
      case Relation::AtMost: margin = (d.expected + d.tolerance) - d.measured; break;
    }
    if (margin < tightest_margin) {
      tightest_margin = margin;
      tightest = &d;
    }
    if (!d.pass) {
      char buf[192];
      std::snprintf(buf, sizeof(buf), "  [%s: %.12g %s %.12g tol %.3g]", d.label.c_str(),
                    d.measured, relation_symbol(d.relation).c_str(), d.expected, d.tolerance);
      line += buf;
    }
  }
  if (res.pass && tightest) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), " (tightest: %s, %.12g %s %.12g tol %.3g)",
                  tightest->label.c_str(), tightest->measured,
                  relation_symbol(tightest->relation).c_str(), tightest->expected,
                  tightest->tolerance);
    line += buf;
  }
  return line;
}

}  // namespace nsit
