// Coherence-witness engine for a system coupled to an environment.
//
// A Scenario fixes the joint dynamics  rho_S(0) (x) env0  --U(tau,0)-->
// rho_SE(tau) --[interruption]--> --U(T,tau)--> measurement of the system
// effect M.  Comparing the outcome probability with and without a
// classicalising interruption witnesses coherence (and, in the non-isolated
// case, system-environment correlations) at time tau.
//
// Probability labels: p1..p4 correspond to the interruptions
//   1 do nothing, 2 classicalise the system, 3 reset the environment,
//   4 classicalise and reset ("piecewise classical" reference).
// Witnesses: w_a = p1 - p2, w_b = p1 - p4, w_c = p3 - p4.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "nsit/channels.hpp"
#include "nsit/optimize.hpp"
#include "nsit/qops.hpp"
#include "nsit/random.hpp"

namespace nsit {

struct Scenario {
  BipartiteLayout layout;
  DensityMatrix rho_s0;
  DensityMatrix env0;
  Matrix u_tau0;   // joint unitary, time 0 -> tau
  Matrix u_T_tau;  // joint unitary, time tau -> T
  Effect m;        // system effect measured at T
  PreferredBasis basis;

  Scenario(const BipartiteLayout& l, DensityMatrix rho0, DensityMatrix env,
           Matrix u_early, Matrix u_late, Effect effect, PreferredBasis b)
      : layout(l),
        rho_s0(std::move(rho0)),
        env0(std::move(env)),
        u_tau0(std::move(u_early)),
        u_T_tau(std::move(u_late)),
        m(std::move(effect)),
        basis(std::move(b)) {
    if (rho_s0.dim() != layout.dim_s)
      throw std::invalid_argument("Scenario: system state does not match layout");
    if (env0.dim() != layout.dim_e)
      throw std::invalid_argument("Scenario: environment state does not match layout");
    if (u_tau0.rows() != layout.joint_dim() || u_T_tau.rows() != layout.joint_dim())
      throw std::invalid_argument("Scenario: unitary does not match layout");
    if (!is_unitary(u_tau0, tol::channel) || !is_unitary(u_T_tau, tol::channel))
      throw std::invalid_argument("Scenario: dynamics is not unitary");
    if (m.dim() != layout.dim_s)
      throw std::invalid_argument("Scenario: effect does not match system dimension");
    if (basis.dim != layout.dim_s)
      throw std::invalid_argument("Scenario: preferred basis does not match system dimension");
  }

  Scenario(const BipartiteLayout& l, DensityMatrix rho0, DensityMatrix env,
           Matrix u_early, Matrix u_late, Effect effect)
      : Scenario(l, std::move(rho0), std::move(env), std::move(u_early), std::move(u_late),
                 std::move(effect), PreferredBasis(l.dim_s)) {}
};

// --- state propagation -----------------------------------------------------

inline DensityMatrix joint_initial(const Scenario& sc) { return tensor(sc.rho_s0, sc.env0); }

inline DensityMatrix rho_se_tau(const Scenario& sc) {
  return DensityMatrix(hermitize(sc.u_tau0 * joint_initial(sc).matrix() * sc.u_tau0.adjoint()));
}

inline DensityMatrix rho_s_tau(const Scenario& sc) {
  return partial_trace(rho_se_tau(sc), sc.layout, Subsystem::System);
}

inline DensityMatrix rho_e_tau(const Scenario& sc) {
  return partial_trace(rho_se_tau(sc), sc.layout, Subsystem::Environment);
}

// Off-diagonal ("coherence") part in the preferred basis: m - Gamma(m).
inline Matrix coherence_part(const Matrix& m) {
  Matrix out = m;
  for (int i = 0; i < m.rows(); ++i) out(i, i) = 0.0;
  return out;
}

// Gamma (x) identity applied to a joint operator: keeps the system-diagonal
// blocks, zeroes the rest.
inline Matrix block_classical_part(const Matrix& m, const BipartiteLayout& layout) {
  if (m.rows() != layout.joint_dim() || m.cols() != layout.joint_dim())
    throw std::invalid_argument("block_classical_part: matrix does not match layout");
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int i = 0; i < layout.dim_s; ++i)
    out.block(i * layout.dim_e, i * layout.dim_e, layout.dim_e, layout.dim_e) =
        m.block(i * layout.dim_e, i * layout.dim_e, layout.dim_e, layout.dim_e);
  return out;
}

// Outcome probability of the effect at time T under the given interruption.
inline double probability(const Scenario& sc, const Interruption& intr) {
  if (!(intr.layout == sc.layout))
    throw std::invalid_argument("probability: interruption layout mismatch");
  const Matrix rho_tau = rho_se_tau(sc).matrix();
  const Matrix interrupted = interruption_channel(intr).act(rho_tau);
  const Matrix rho_T = sc.u_T_tau * interrupted * sc.u_T_tau.adjoint();
  const Matrix m_joint = tensor(sc.m.matrix(), Matrix::Identity(sc.layout.dim_e, sc.layout.dim_e));
  return (m_joint * rho_T).trace().real();
}

// Relaxing interruptions re-equilibrate the environment to the scenario's
// initial environment state.
inline double probability(const Scenario& sc, InterruptionKind kind) {
  return probability(sc, Interruption(kind, sc.layout, sc.env0));
}

// --- witnesses on states ----------------------------------------------------

// Witness value of an isolated system at time tau under the effective
// measurement m_eff (the Heisenberg-evolved effect): tr(m_eff [rho - Gamma rho]).
inline double w_isolated(const DensityMatrix& rho_tau, const Effect& m_eff) {
  if (rho_tau.dim() != m_eff.dim())
    throw std::invalid_argument("w_isolated: dimension mismatch");
  return (m_eff.matrix() * coherence_part(rho_tau.matrix())).trace().real();
}

// Vulnerability of coherence R(rho) = || rho - Gamma(rho) ||_tr.
inline double r_monotone(const DensityMatrix& rho) {
  return trace_norm(coherence_part(rho.matrix()));
}

// Smallest Hilbert-space dimension compatible with an observed witness value:
// d >= 1 / (1 - |w|).
inline int dimension_lower_bound(double w) {
  if (std::abs(w) >= 1.0)
    throw std::invalid_argument("dimension_lower_bound: |w| must be below 1");
  double v = 1.0 / (1.0 - std::abs(w));
  return static_cast<int>(std::ceil(v - 1e-9));
}

// --- correlation structure ---------------------------------------------------

struct CorrelationSplit {
  DensityMatrix rho_s;
  DensityMatrix rho_e;
  Matrix chi;  // rho_se - rho_s (x) rho_e, traceless
};

inline CorrelationSplit correlation_split(const DensityMatrix& rho_se,
                                          const BipartiteLayout& layout) {
  DensityMatrix rs = partial_trace(rho_se, layout, Subsystem::System);
  DensityMatrix re = partial_trace(rho_se, layout, Subsystem::Environment);
  Matrix chi = rho_se.matrix() - tensor(rs.matrix(), re.matrix());
  return CorrelationSplit{std::move(rs), std::move(re), std::move(chi)};
}

// Distance of a joint state from the incoherent-quantum (IQ) set
// { sum_i p_i |i><i| (x) rho_E^i }:  || rho - (Gamma (x) id) rho ||_tr / 2.
// Faithful: zero exactly on IQ states.
inline double iq_distance(const DensityMatrix& rho_se, const BipartiteLayout& layout) {
  return 0.5 * trace_norm(rho_se.matrix() - block_classical_part(rho_se.matrix(), layout));
}

inline bool is_iq(const DensityMatrix& rho_se, const BipartiteLayout& layout,
                  double tolerance = 1e-10) {
  return iq_distance(rho_se, layout) <= tolerance;
}

// --- measurement maps --------------------------------------------------------

// Reduced system maps induced by the joint dynamics:
//   prepare   rho_S(0) -> rho_S(tau)     (environment in env0, early unitary)
//   measure_1 uses the actual reduced environment state at tau,
//   measure_4 uses the re-equilibrated environment (reset target).
// The piecewise-classical branch factorizes exactly as
//   rho_S^(4)(T) = measure_4( Gamma( prepare(rho_S(0)) ) ).
struct MeasurementMaps {
  KrausChannel prepare;
  KrausChannel measure_1;
  KrausChannel measure_4;
};

inline MeasurementMaps measurement_maps(const Scenario& sc) {
  return MeasurementMaps{
      kraus_from_joint_unitary(sc.u_tau0, sc.env0, sc.layout),
      kraus_from_joint_unitary(sc.u_T_tau, rho_e_tau(sc), sc.layout),
      kraus_from_joint_unitary(sc.u_T_tau, sc.env0, sc.layout),
  };
}

// --- witness decompositions ---------------------------------------------------

// w_a = tr(M~ [rho_S - Gamma rho_S]) + tr((M (x) 1) U [(id - Gamma (x) id) chi] U^dag)
// with M~ the Heisenberg image of M under the reduced map measure_1.  The first
// term is the coherence content of the reduced state, the second the
// contribution of system-environment correlations.
struct WaDecomposition {
  double coherence_term;
  double correlation_term;
};

inline WaDecomposition decompose_w_a(const Scenario& sc) {
  const CorrelationSplit split = correlation_split(rho_se_tau(sc), sc.layout);
  const KrausChannel measure_1 = kraus_from_joint_unitary(sc.u_T_tau, split.rho_e, sc.layout);
  const Matrix m_tilde = dual(measure_1).act(sc.m.matrix());
  const double coherence =
      (m_tilde * coherence_part(split.rho_s.matrix())).trace().real();
  const Matrix chi_coherent = split.chi - block_classical_part(split.chi, sc.layout);
  const Matrix m_joint = tensor(sc.m.matrix(), Matrix::Identity(sc.layout.dim_e, sc.layout.dim_e));
  const double correlation =
      (m_joint * sc.u_T_tau * chi_coherent * sc.u_T_tau.adjoint()).trace().real();
  return WaDecomposition{coherence, correlation};
}

// w_b = chi propagation + dual-map coherence + measurement-map mismatch:
//   tr(M tr_E(U chi U^dag))
//   + tr(measure_4^dag(M) [rho_S - Gamma rho_S])
//   + tr([measure_1^dag - measure_4^dag](M) rho_S).
struct WbDecomposition {
  double chi_term;
  double coherence_term;
  double map_mismatch_term;
};

inline WbDecomposition decompose_w_b(const Scenario& sc) {
  const CorrelationSplit split = correlation_split(rho_se_tau(sc), sc.layout);
  const MeasurementMaps maps = measurement_maps(sc);
  const Matrix m_joint = tensor(sc.m.matrix(), Matrix::Identity(sc.layout.dim_e, sc.layout.dim_e));
  const double chi_term =
      (m_joint * sc.u_T_tau * split.chi * sc.u_T_tau.adjoint()).trace().real();
  const Matrix m1 = dual(maps.measure_1).act(sc.m.matrix());
  const Matrix m4 = dual(maps.measure_4).act(sc.m.matrix());
  const double coherence = (m4 * coherence_part(split.rho_s.matrix())).trace().real();
  const double mismatch = ((m1 - m4) * split.rho_s.matrix()).trace().real();
  return WbDecomposition{chi_term, coherence, mismatch};
}

// --- bounds -------------------------------------------------------------------

struct BoundRecord {
  double lhs;
  double rhs;
  double slack;  // nonnegative when the bound holds
};

// R(rho_S(tau)) >= 2|w_a| - 2 ||chi||_tr.
inline BoundRecord coherence_bound_from_wa(const Scenario& sc);
// R(rho_S(tau)) >= 2|w_b| - 2 ||chi||_tr - 2 || rho_E(tau) - env0 ||_tr.
inline BoundRecord coherence_bound_from_wb(const Scenario& sc);

// --- full report ---------------------------------------------------------------

struct WitnessReport {
  double p1, p2, p3, p4;
  double w_a, w_b, w_c;
  double w_isolated;  // reduced-state route to w_c (cross-check)
  double r_monotone;
  WaDecomposition wa_terms;
  WbDecomposition wb_terms;
  double chi_trace_norm;
  double iq_distance;
  BoundRecord wa_bound;
  BoundRecord wb_bound;
};

inline WitnessReport witness_suite(const Scenario& sc) {
  WitnessReport rep{};
  rep.p1 = probability(sc, InterruptionKind::DoNothing);
  rep.p2 = probability(sc, InterruptionKind::DynamicallyClassicalise);
  rep.p3 = probability(sc, InterruptionKind::ResetEnvironment);
  rep.p4 = probability(sc, InterruptionKind::PiecewiseClassicalise);
  rep.w_a = rep.p1 - rep.p2;
  rep.w_b = rep.p1 - rep.p4;
  rep.w_c = rep.p3 - rep.p4;

  const DensityMatrix rho_tau = rho_se_tau(sc);
  const CorrelationSplit split = correlation_split(rho_tau, sc.layout);
  const KrausChannel measure_4 = kraus_from_joint_unitary(sc.u_T_tau, sc.env0, sc.layout);
  const Matrix m_eff = hermitize(dual(measure_4).act(sc.m.matrix()));
  rep.w_isolated = (m_eff * coherence_part(split.rho_s.matrix())).trace().real();
  rep.r_monotone = r_monotone(split.rho_s);
  rep.wa_terms = decompose_w_a(sc);
  rep.wb_terms = decompose_w_b(sc);
  rep.chi_trace_norm = trace_norm(split.chi);
  rep.iq_distance = iq_distance(rho_tau, sc.layout);

  rep.wa_bound.lhs = rep.r_monotone;
  rep.wa_bound.rhs = 2.0 * std::abs(rep.w_a) - 2.0 * rep.chi_trace_norm;
  rep.wa_bound.slack = rep.wa_bound.lhs - rep.wa_bound.rhs;

  const double env_drift = trace_norm(split.rho_e.matrix() - sc.env0.matrix());
  rep.wb_bound.lhs = rep.r_monotone;
  rep.wb_bound.rhs = 2.0 * std::abs(rep.w_b) - 2.0 * rep.chi_trace_norm - 2.0 * env_drift;
  rep.wb_bound.slack = rep.wb_bound.lhs - rep.wb_bound.rhs;
  return rep;
}

inline BoundRecord coherence_bound_from_wa(const Scenario& sc) {
  return witness_suite(sc).wa_bound;
}

inline BoundRecord coherence_bound_from_wb(const Scenario& sc) {
  return witness_suite(sc).wb_bound;
}

// Induced-trace-norm distance of the two measurement maps is bounded by the
// drift of the reduced environment state away from equilibrium:
//   max_rho || (measure_1 - measure_4)(rho) ||_tr <= || rho_E(tau) - env0 ||_tr.
// The lhs is a derivative-free search (an under-estimate, which keeps the
// inequality check sound).
inline BoundRecord measurement_map_bound(const Scenario& sc,
                                         const SearchConfig& config = SearchConfig{}) {
  const MeasurementMaps maps = measurement_maps(sc);
  const Optimum opt = induced_trace_norm_distance(maps.measure_1, maps.measure_4, config);
  BoundRecord rec{};
  rec.lhs = 2.0 * opt.value;
  rec.rhs = trace_norm(rho_e_tau(sc).matrix() - sc.env0.matrix());
  rec.slack = rec.rhs - rec.lhs;
  return rec;
}

// --- superchannel ---------------------------------------------------------------

// Process tensor of the two-step dynamics: contracting with the transfer
// tensor of a system channel applied at tau yields the final system state,
//   rho_{rs}(T) = sum S[r r' r'' s s' s''] E[r' r'' s' s''],
//   E[r' r'' s' s''] = sum_k K_k[r', r''] conj(K_k[s', s'']).
class Superchannel {
 public:
  Superchannel(int dim_s, std::vector<Complex> data) : dim_(dim_s), data_(std::move(data)) {
    const size_t expected = static_cast<size_t>(std::pow(dim_, 6) + 0.5);
    if (dim_ < 1 || data_.size() != expected)
      throw std::invalid_argument("Superchannel: data size does not match dimension");
  }

  int dim() const { return dim_; }

  const Complex& at(int r, int rp, int rpp, int s, int sp, int spp) const {
    return data_[flat(r, rp, rpp, s, sp, spp)];
  }
  Complex& at(int r, int rp, int rpp, int s, int sp, int spp) {
    return data_[flat(r, rp, rpp, s, sp, spp)];
  }

 private:
  size_t flat(int r, int rp, int rpp, int s, int sp, int spp) const {
    return static_cast<size_t>(((((r * dim_ + rp) * dim_ + rpp) * dim_ + s) * dim_ + sp)) *
               static_cast<size_t>(dim_) +
           static_cast<size_t>(spp);
  }

  int dim_;
  std::vector<Complex> data_;
};

inline Superchannel build_superchannel(const Scenario& sc) {
  const int ds = sc.layout.dim_s;
  const int de = sc.layout.dim_e;
  const Matrix rho_tau = rho_se_tau(sc).matrix();
  const Matrix& u = sc.u_T_tau;
  std::vector<Complex> data(static_cast<size_t>(std::pow(ds, 6) + 0.5), Complex(0.0, 0.0));
  Superchannel s(ds, std::move(data));
  for (int r = 0; r < ds; ++r)
    for (int rp = 0; rp < ds; ++rp)
      for (int rpp = 0; rpp < ds; ++rpp)
        for (int ss = 0; ss < ds; ++ss)
          for (int sp = 0; sp < ds; ++sp)
            for (int spp = 0; spp < ds; ++spp) {
              Complex sum(0.0, 0.0);
              for (int a = 0; a < de; ++a)
                for (int b = 0; b < de; ++b)
                  for (int e = 0; e < de; ++e)
                    sum += u(sc.layout.index(r, e), sc.layout.index(rp, a)) *
                           rho_tau(sc.layout.index(rpp, a), sc.layout.index(spp, b)) *
                           std::conj(u(sc.layout.index(ss, e), sc.layout.index(sp, b)));
              s.at(r, rp, rpp, ss, sp, spp) = sum;
            }
  return s;
}

inline DensityMatrix apply_superchannel(const Superchannel& s, const KrausChannel& system_channel) {
  const int d = s.dim();
  if (system_channel.dim_in() != d || system_channel.dim_out() != d)
    throw std::invalid_argument("apply_superchannel: channel dimension mismatch");
  // Transfer tensor E[r' r'' s' s''].
  std::vector<Complex> transfer(static_cast<size_t>(d * d * d * d), Complex(0.0, 0.0));
  auto tidx = [d](int rp, int rpp, int sp, int spp) {
    return static_cast<size_t>(((rp * d + rpp) * d + sp) * d + spp);
  };
  for (const Matrix& k : system_channel.kraus())
    for (int rp = 0; rp < d; ++rp)
      for (int rpp = 0; rpp < d; ++rpp)
        for (int sp = 0; sp < d; ++sp)
          for (int spp = 0; spp < d; ++spp)
            transfer[tidx(rp, rpp, sp, spp)] += k(rp, rpp) * std::conj(k(sp, spp));
  Matrix rho_T = Matrix::Zero(d, d);
  for (int r = 0; r < d; ++r)
    for (int ss = 0; ss < d; ++ss) {
      Complex sum(0.0, 0.0);
      for (int rp = 0; rp < d; ++rp)
        for (int rpp = 0; rpp < d; ++rpp)
          for (int sp = 0; sp < d; ++sp)
            for (int spp = 0; spp < d; ++spp)
              sum += s.at(r, rp, rpp, ss, sp, spp) * transfer[tidx(rp, rpp, sp, spp)];
      rho_T(r, ss) = sum;
    }
  return DensityMatrix(hermitize(rho_T));
}

// w_a evaluated through the superchannel route: tr(M [S . id - S . Gamma]).
inline double w_a_superchannel(const Scenario& sc) {
  const Superchannel s = build_superchannel(sc);
  const Matrix with_id = apply_superchannel(s, identity_channel(sc.layout.dim_s)).matrix();
  const Matrix with_gamma = apply_superchannel(s, classicalise(sc.basis)).matrix();
  return (sc.m.matrix() * (with_id - with_gamma)).trace().real();
}

// --- random scenario drafts (testing / verification plumbing) -------------------

inline Scenario random_scenario(const BipartiteLayout& layout, Rng& rng) {
  DensityMatrix rho0 = random_density(layout.dim_s, rng);
  DensityMatrix env0(projector(basis_ket(layout.dim_e, 0)));
  Matrix u1 = random_unitary(layout.joint_dim(), rng);
  Matrix u2 = random_unitary(layout.joint_dim(), rng);
  Effect m = random_effect(layout.dim_s, rng);
  return Scenario(layout, std::move(rho0), std::move(env0), std::move(u1), std::move(u2),
                  std::move(m));
}

// Random member of the IQ set: sum_i p_i |i><i| (x) rho_E^i.
inline DensityMatrix random_iq_state(const BipartiteLayout& layout, Rng& rng) {
  std::vector<double> p = random_weights(layout.dim_s, rng);
  Matrix rho = Matrix::Zero(layout.joint_dim(), layout.joint_dim());
  for (int i = 0; i < layout.dim_s; ++i) {
    Matrix block = random_density(layout.dim_e, rng).matrix();
    rho.block(i * layout.dim_e, i * layout.dim_e, layout.dim_e, layout.dim_e) = p[static_cast<size_t>(i)] * block;
  }
  return DensityMatrix(hermitize(rho));
}

}  // namespace nsit
