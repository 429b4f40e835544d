#include <catch2/catch_amalgamated.hpp>

#include "nsit/scenarios.hpp"

using namespace nsit;

TEST_CASE("every catalogue entry passes its own expectations") {
  for (const std::string& name : scenario_names()) {
    const NamedScenario ns = named_scenario(name);
    const auto failures = check_expected(ns);
    for (const auto& f : failures)
      UNSCOPED_INFO(name << "." << f.quantity << " measured " << f.measured << " expected "
                         << f.expected);
    REQUIRE(failures.empty());
  }
  REQUIRE_THROWS_AS(named_scenario("no-such"), std::invalid_argument);
}

TEST_CASE("catalogue variants keep their closed forms") {
  for (int d = 2; d <= 4; ++d) {
    REQUIRE(check_expected(isolated_max_coherent_scenario(d)).empty());
    REQUIRE(check_expected(epsilon_mixture_scenario(d, 0.15)).empty());
  }
  REQUIRE_THROWS_AS(epsilon_mixture_scenario(2, 1.5), std::invalid_argument);
  REQUIRE_THROWS_AS(evaluate_quantity(bell_scenario(), "no-such-quantity"),
                    std::invalid_argument);
}

TEST_CASE("spectator-environment scenarios unify all witnesses") {
  Rng rng = make_rng(61);
  for (int k = 0; k < 10; ++k) {
    const NamedScenario ns = born_scenario(random_unitary(2, rng), k % 2 == 0);
    const Scenario& sc = std::get<Scenario>(ns.payload);
    const WitnessReport rep = witness_suite(sc);
    REQUIRE(std::abs(rep.w_a - rep.w_b) < 1e-10);
    REQUIRE(std::abs(rep.w_b - rep.w_c) < 1e-10);
    REQUIRE(std::abs(rep.wa_terms.correlation_term) < 1e-10);
    REQUIRE(std::abs(rep.wb_terms.chi_term) < 1e-10);
    REQUIRE(std::abs(rep.wb_terms.map_mismatch_term) < 1e-10);
  }

  // diagonal-preserving system dynamics on a diagonal start yield no witness
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  NamedScenario ns = born_scenario(z, true);
  Scenario sc = std::get<Scenario>(ns.payload);
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 0.7;
  diag(1, 1) = 0.3;
  const Scenario quiet(sc.layout, DensityMatrix(diag), sc.env0, sc.u_tau0, sc.u_T_tau, sc.m);
  const WitnessReport rep = witness_suite(quiet);
  REQUIRE(std::abs(rep.w_a) < 1e-12);
  REQUIRE(std::abs(rep.w_b) < 1e-12);
  REQUIRE(std::abs(rep.w_c) < 1e-12);
}

TEST_CASE("partial summation runs to completion exactly when the witness vanishes") {
  const PreferredBasis basis(2);
  const Effect plus(maximally_coherent_state(2).matrix());

  const auto quiet = partial_summation(DensityMatrix(projector(basis_ket(2, 1))), plus, basis);
  REQUIRE(std::abs(quiet.target - 0.5) < 1e-12);
  REQUIRE_FALSE(quiet.stop_index.has_value());
  REQUIRE_FALSE(quiet.complement_used);
  REQUIRE(std::abs(quiet.witness_abs) < 1e-12);
  REQUIRE(quiet.terms.size() == 2);
  REQUIRE(std::abs(quiet.running_sums.back() - 0.5) < 1e-12);

  const auto loud = partial_summation(maximally_coherent_state(2), plus, basis);
  REQUIRE(loud.complement_used);
  REQUIRE(loud.stop_index.has_value());
  REQUIRE(*loud.stop_index == 0);
  REQUIRE(std::abs(loud.witness_abs - 0.5) < 1e-12);

  const auto blind = partial_summation(maximally_coherent_state(2), plus, basis,
                                       tol::decomposition, false);
  REQUIRE_FALSE(blind.stop_index.has_value());

  // maximizing pair at d=4: every complement summand equals 3/16
  const DensityMatrix plus4 = maximally_coherent_state(4);
  const auto equal_terms = partial_summation(plus4, Effect(plus4.matrix()), PreferredBasis(4));
  for (double t : equal_terms.terms) REQUIRE(std::abs(t - 3.0 / 16.0) < 1e-12);
  REQUIRE(std::abs(equal_terms.witness_abs - 0.75) < 1e-12);

  // running sums never decrease
  Rng rng = make_rng(62);
  for (int k = 0; k < 50; ++k) {
    const auto trace =
        partial_summation(random_pure_state(3, rng), random_effect(3, rng), PreferredBasis(3));
    for (size_t i = 1; i < trace.running_sums.size(); ++i)
      REQUIRE(trace.running_sums[i] >= trace.running_sums[i - 1] - 1e-15);
  }
}

TEST_CASE("scenario-level partial summation requires a spectator environment") {
  const NamedScenario born = born_hadamard_scenario();
  const auto trace = partial_summation(std::get<Scenario>(born.payload));
  REQUIRE(trace.complement_used);
  REQUIRE(std::abs(trace.witness_abs - 0.5) < 1e-10);

  const NamedScenario bell = bell_scenario();
  REQUIRE_THROWS_AS(partial_summation(std::get<Scenario>(bell.payload)), std::invalid_argument);
}

TEST_CASE("sampled partial summation converges with shot count") {
  const PreferredBasis basis(2);
  const DensityMatrix plus = maximally_coherent_state(2);
  const Effect plus_eff(plus.matrix());
  Rng rng = make_rng(63);
  const auto noisy = sampled_partial_summation(plus, plus_eff, basis, 200000, rng);
  REQUIRE(std::abs(noisy.witness_abs - 0.5) < 0.02);
  Rng rng2 = make_rng(63);
  const auto again = sampled_partial_summation(plus, plus_eff, basis, 200000, rng2);
  REQUIRE(noisy.witness_abs == again.witness_abs);  // same seed, same draws
  REQUIRE_THROWS_AS(sampled_partial_summation(plus, plus_eff, basis, 0, rng),
                    std::invalid_argument);
}

TEST_CASE("baseline interval flags coherent preparations only") {
  BipartiteLayout iso(2, 1);
  const DensityMatrix env(Matrix::Identity(1, 1));
  const Matrix eye = Matrix::Identity(2, 2);
  const Effect m0(projector(basis_ket(2, 0)));
  auto make = [&](const DensityMatrix& rho0) {
    return Scenario(iso, rho0, env, eye, hadamard(), m0);
  };
  std::vector<Scenario> family = {make(DensityMatrix(projector(basis_ket(2, 0)))),
                                  make(DensityMatrix(projector(basis_ket(2, 1))))};

  const BaselineInterval coherent = baseline_interval(family, make(maximally_coherent_state(2)));
  REQUIRE(coherent.violated);
  REQUIRE(std::abs(coherent.w_test - 0.5) < 1e-12);
  REQUIRE(std::abs(coherent.min_w) < 1e-12);
  REQUIRE(std::abs(coherent.max_w) < 1e-12);

  Rng rng = make_rng(64);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> w = random_weights(2, rng);
    Matrix mix = Matrix::Zero(2, 2);
    mix(0, 0) = w[0];
    mix(1, 1) = w[1];
    REQUIRE_FALSE(baseline_interval(family, make(DensityMatrix(mix))).violated);
  }

  // degenerate dynamics: the interval collapses and diagonal tests never violate
  auto still = [&](const DensityMatrix& rho0) { return Scenario(iso, rho0, env, eye, eye, m0); };
  std::vector<Scenario> flat = {still(DensityMatrix(projector(basis_ket(2, 0)))),
                                still(DensityMatrix(projector(basis_ket(2, 1))))};
  const BaselineInterval collapsed =
      baseline_interval(flat, still(DensityMatrix(0.5 * Matrix::Identity(2, 2))));
  REQUIRE(std::abs(collapsed.min_w) < 1e-12);
  REQUIRE(std::abs(collapsed.max_w) < 1e-12);
  REQUIRE_FALSE(collapsed.violated);

  // family must enumerate every basis preparation
  std::vector<Scenario> short_family = {family[0]};
  REQUIRE_THROWS_AS(baseline_interval(short_family, make(maximally_coherent_state(2))),
                    std::invalid_argument);
  std::vector<Scenario> wrong_family = {family[1], family[0]};
  REQUIRE_THROWS_AS(baseline_interval(wrong_family, make(maximally_coherent_state(2))),
                    std::invalid_argument);
}

TEST_CASE("generalized witness against an arbitrary reference channel") {
  const DensityMatrix plus = maximally_coherent_state(2);
  const Effect plus_eff(plus.matrix());

  REQUIRE(std::abs(generalized_witness_v(plus, plus_eff, classicalise(2)) -
                   w_isolated(plus, plus_eff)) < 1e-12);
  REQUIRE(std::abs(generalized_witness_v(plus, plus_eff, identity_channel(2))) < 1e-15);

  // a channel that flips the phase of superpositions while fixing the basis
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  const KrausChannel phase_flip(2, 2, {z});
  REQUIRE(std::abs(generalized_witness_v(plus, plus_eff, phase_flip) - 1.0) < 1e-12);

  Rng rng = make_rng(65);
  for (int k = 0; k < 100; ++k) {
    const DensityMatrix rho = random_density(2, rng);
    const Effect m = random_effect(2, rng);
    const double v = generalized_witness_v(rho, m, phase_flip);
    REQUIRE(v <= trace_norm(rho.matrix() - phase_flip.act(rho.matrix())) + 1e-12);
  }
}

TEST_CASE("experiment budgets by interruption kind") {
  for (int d = 2; d <= 6; ++d) {
    REQUIRE(budget(InterruptionKind::DoNothing, d).experiment_count == 2);
    REQUIRE(budget(InterruptionKind::DynamicallyClassicalise, d).experiment_count == 2);
    REQUIRE(budget(InterruptionKind::PiecewiseClassicalise, d).experiment_count == d + 1);
    REQUIRE(budget(InterruptionKind::ResetEnvironment, d).experiment_count == d * d + 1);
  }
  REQUIRE(budget(InterruptionKind::PiecewiseClassicalise, 4).experiment_count == 5);
  REQUIRE(budget(InterruptionKind::ResetEnvironment, 2).experiment_count == 5);
}

TEST_CASE("state-probe evaluation quantities") {
  const NamedScenario probe = epsilon_mixture_scenario(2, 0.2);
  REQUIRE(std::abs(evaluate_quantity(probe, "w_a") - 0.1) < 1e-12);
  REQUIRE(std::abs(evaluate_quantity(probe, "iq_distance") - 0.1) < 1e-12);
  REQUIRE(std::abs(evaluate_quantity(probe, "ppt_min_eig") - 0.1) < 1e-12);
  const NamedScenario pure = epsilon_mixture_scenario(2, 1.0);
  REQUIRE(std::abs(evaluate_quantity(pure, "w_a") - 0.5) < 1e-12);
  REQUIRE(std::abs(evaluate_quantity(pure, "ppt_min_eig") + 0.5) < 1e-12);
}
