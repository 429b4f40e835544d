// Quantum channels in Kraus form: classicalisation (coherence erasure in the
// preferred basis), random-phase dephasing, environment relaxation, and the
// four interruption operations used by the witness protocols.
#pragma once

#include <utility>
#include <vector>

#include "nsit/qops.hpp"

namespace nsit {

// Completely positive map given by Kraus operators.  Channels constructed by
// the library are trace preserving (sum K^dag K = 1 within 1e-10); dual()
// returns the Heisenberg-picture adjoint, which is unital instead, so the
// completeness check is skipped for it.
class KrausChannel {
 public:
  KrausChannel(int dim_in, int dim_out, std::vector<Matrix> kraus_ops)
      : KrausChannel(dim_in, dim_out, std::move(kraus_ops), /*require_trace_preserving=*/true) {}

  static KrausChannel adjoint_family(int dim_in, int dim_out, std::vector<Matrix> kraus_ops) {
    return KrausChannel(dim_in, dim_out, std::move(kraus_ops), false);
  }

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  const std::vector<Matrix>& kraus() const { return ops_; }

  // Raw linear action sum_k K x K^dag on an arbitrary operator.
  Matrix act(const Matrix& x) const {
    if (x.rows() != dim_in_ || x.cols() != dim_in_)
      throw std::invalid_argument("KrausChannel: operator does not match input dimension");
    Matrix out = Matrix::Zero(dim_out_, dim_out_);
    for (const Matrix& k : ops_) out += k * x * k.adjoint();
    return out;
  }

 private:
  KrausChannel(int dim_in, int dim_out, std::vector<Matrix> kraus_ops, bool require_trace_preserving)
      : dim_in_(dim_in), dim_out_(dim_out), ops_(std::move(kraus_ops)) {
    if (dim_in_ < 1 || dim_out_ < 1)
      throw std::invalid_argument("KrausChannel: dimensions must be positive");
    if (ops_.empty()) throw std::invalid_argument("KrausChannel: empty Kraus family");
    for (const Matrix& k : ops_)
      if (k.rows() != dim_out_ || k.cols() != dim_in_)
        throw std::invalid_argument("KrausChannel: Kraus operator has wrong shape");
    if (require_trace_preserving) {
      Matrix completeness = Matrix::Zero(dim_in_, dim_in_);
      for (const Matrix& k : ops_) completeness += k.adjoint() * k;
      if (!approx_equal(completeness, Matrix::Identity(dim_in_, dim_in_), tol::channel))
        throw std::invalid_argument("KrausChannel: Kraus family is not trace preserving");
    }
  }

  int dim_in_;
  int dim_out_;
  std::vector<Matrix> ops_;
};

inline DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho) {
  return DensityMatrix(hermitize(ch.act(rho.matrix())));
}

inline KrausChannel identity_channel(int dim) {
  return KrausChannel(dim, dim, {Matrix::Identity(dim, dim)});
}

// Coherence erasure: rho -> sum_i |i><i| rho |i><i| in the preferred basis.
inline KrausChannel classicalise(const PreferredBasis& basis) {
  std::vector<Matrix> ops;
  ops.reserve(static_cast<size_t>(basis.dim));
  for (int i : basis.ordering) {
    Matrix p = Matrix::Zero(basis.dim, basis.dim);
    p(i, i) = 1.0;
    ops.push_back(p);
  }
  return KrausChannel(basis.dim, basis.dim, std::move(ops));
}

inline KrausChannel classicalise(int dim) { return classicalise(PreferredBasis(dim)); }

// Finitely supported distribution over per-level phase vectors.
struct PhaseDistribution {
  struct Atom {
    std::vector<double> phases;  // one phase per basis level
    double weight;
  };
  int dim = 0;
  std::vector<Atom> atoms;

  PhaseDistribution(int d, std::vector<Atom> a) : dim(d), atoms(std::move(a)) {
    if (d < 1) throw std::invalid_argument("PhaseDistribution: dimension must be positive");
    if (atoms.empty()) throw std::invalid_argument("PhaseDistribution: no atoms");
    double sum = 0.0;
    for (const Atom& atom : atoms) {
      if (atom.phases.size() != static_cast<size_t>(d))
        throw std::invalid_argument("PhaseDistribution: phase vector has wrong length");
      if (atom.weight < 0.0)
        throw std::invalid_argument("PhaseDistribution: negative weight");
      sum += atom.weight;
    }
    if (std::abs(sum - 1.0) > tol::algebraic)
      throw std::invalid_argument("PhaseDistribution: weights do not sum to 1");
  }
};

// Random dephasing rho -> E_theta[ e^{i diag(theta)} rho e^{-i diag(theta)} ]
// realised with one Kraus operator sqrt(w) diag(e^{i theta}) per atom.
inline KrausChannel dephase(const PhaseDistribution& dist) {
  std::vector<Matrix> ops;
  ops.reserve(dist.atoms.size());
  for (const auto& atom : dist.atoms) {
    Matrix k = Matrix::Zero(dist.dim, dist.dim);
    for (int i = 0; i < dist.dim; ++i)
      k(i, i) = std::sqrt(atom.weight) * std::exp(Complex(0.0, atom.phases[static_cast<size_t>(i)]));
    ops.push_back(k);
  }
  return KrausChannel(dist.dim, dist.dim, std::move(ops));
}

// Independent {0, pi} phase flip on each level with probability 1/2: the 2^d
// equal-weight atoms whose dephasing equals classicalise(d) exactly.
inline PhaseDistribution phase_flip_distribution(int dim) {
  if (dim < 1 || dim > 20)
    throw std::invalid_argument("phase_flip_distribution: dimension out of range");
  std::vector<PhaseDistribution::Atom> atoms;
  const int count = 1 << dim;
  const double weight = 1.0 / static_cast<double>(count);
  const double pi = 3.14159265358979323846;
  atoms.reserve(static_cast<size_t>(count));
  for (int mask = 0; mask < count; ++mask) {
    PhaseDistribution::Atom atom;
    atom.weight = weight;
    atom.phases.resize(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) atom.phases[static_cast<size_t>(i)] = (mask >> i) & 1 ? pi : 0.0;
    atoms.push_back(std::move(atom));
  }
  return PhaseDistribution(dim, std::move(atoms));
}

// Constant channel rho -> target.  Kraus: sqrt(q_m) |v_m><j| over the target's
// eigenpairs (q_m, v_m) and basis kets |j>; eigenvalues below 1e-12 dropped.
inline KrausChannel relax_environment(const DensityMatrix& target) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(target.matrix());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("relax_environment: eigensolver failed");
  const int d = target.dim();
  std::vector<Matrix> ops;
  for (int m = 0; m < d; ++m) {
    double q = solver.eigenvalues()(m);
    if (q < tol::algebraic) continue;
    for (int j = 0; j < d; ++j) {
      Matrix k = Matrix::Zero(d, d);
      k.col(j) = std::sqrt(q) * solver.eigenvectors().col(m);
      ops.push_back(std::move(k));
    }
  }
  return KrausChannel(d, d, std::move(ops));
}

// a after b.
inline KrausChannel compose(const KrausChannel& a, const KrausChannel& b) {
  if (a.dim_in() != b.dim_out())
    throw std::invalid_argument("compose: intermediate dimensions do not match");
  std::vector<Matrix> ops;
  ops.reserve(a.kraus().size() * b.kraus().size());
  for (const Matrix& ka : a.kraus())
    for (const Matrix& kb : b.kraus()) ops.push_back(ka * kb);
  return KrausChannel(b.dim_in(), a.dim_out(), std::move(ops));
}

inline KrausChannel tensor_channels(const KrausChannel& a, const KrausChannel& b) {
  std::vector<Matrix> ops;
  ops.reserve(a.kraus().size() * b.kraus().size());
  for (const Matrix& ka : a.kraus())
    for (const Matrix& kb : b.kraus()) ops.push_back(tensor(ka, kb));
  return KrausChannel(a.dim_in() * b.dim_in(), a.dim_out() * b.dim_out(), std::move(ops));
}

// Heisenberg-picture adjoint (daggered Kraus family); unital, not trace
// preserving in general.
inline KrausChannel dual(const KrausChannel& ch) {
  std::vector<Matrix> ops;
  ops.reserve(ch.kraus().size());
  for (const Matrix& k : ch.kraus()) ops.push_back(k.adjoint());
  return KrausChannel::adjoint_family(ch.dim_out(), ch.dim_in(), std::move(ops));
}

// Choi matrix sum_ij |i><j| (x) ch(|i><j|) on the (input, output) layout.
// Channel equality is decided by comparing these entrywise.
inline Matrix choi(const KrausChannel& ch) {
  const int din = ch.dim_in();
  const int dout = ch.dim_out();
  Matrix c = Matrix::Zero(din * dout, din * dout);
  BipartiteLayout layout(din, dout);
  for (int i = 0; i < din; ++i)
    for (int j = 0; j < din; ++j) {
      Matrix eij = Matrix::Zero(din, din);
      eij(i, j) = 1.0;
      Matrix block = ch.act(eij);
      for (int r = 0; r < dout; ++r)
        for (int s = 0; s < dout; ++s) c(layout.index(i, r), layout.index(j, s)) = block(r, s);
    }
  return c;
}

inline bool same_channel(const KrausChannel& a, const KrausChannel& b,
                         double tolerance = tol::algebraic) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out()) return false;
  return approx_equal(choi(a), choi(b), tolerance);
}

// The four protocol interruptions applied to the joint state at time tau:
//   DoNothing               identity (x) identity
//   DynamicallyClassicalise classicalise (x) identity
//   ResetEnvironment        identity (x) relax
//   PiecewiseClassicalise   classicalise (x) relax
enum class InterruptionKind { DoNothing, DynamicallyClassicalise, ResetEnvironment, PiecewiseClassicalise };

struct Interruption {
  InterruptionKind kind;
  BipartiteLayout layout;
  DensityMatrix env_reset_target;  // used by the two relaxing kinds

  Interruption(InterruptionKind k, const BipartiteLayout& l, DensityMatrix target)
      : kind(k), layout(l), env_reset_target(std::move(target)) {
    if (env_reset_target.dim() != layout.dim_e)
      throw std::invalid_argument("Interruption: reset target does not match environment dimension");
  }
  // Default reset target: first basis vector of the environment.
  Interruption(InterruptionKind k, const BipartiteLayout& l)
      : Interruption(k, l, DensityMatrix(projector(basis_ket(l.dim_e, 0)))) {}
};

inline KrausChannel interruption_channel(const Interruption& intr) {
  const KrausChannel sys_id = identity_channel(intr.layout.dim_s);
  const KrausChannel env_id = identity_channel(intr.layout.dim_e);
  switch (intr.kind) {
    case InterruptionKind::DoNothing:
      return tensor_channels(sys_id, env_id);
    case InterruptionKind::DynamicallyClassicalise:
      return tensor_channels(classicalise(intr.layout.dim_s), env_id);
    case InterruptionKind::ResetEnvironment:
      return tensor_channels(sys_id, relax_environment(intr.env_reset_target));
    case InterruptionKind::PiecewiseClassicalise:
      return tensor_channels(classicalise(intr.layout.dim_s), relax_environment(intr.env_reset_target));
  }
  throw std::logic_error("interruption_channel: unknown kind");
}

// Reduced system dynamics of a joint unitary with the environment prepared in
// env_state: Kraus family K_{ik} = sqrt(p_i) <e_k| U |v_i> over the
// eigenpairs (p_i, v_i) of env_state and computational bras <e_k|.  For a pure
// env_state this collapses to the single-index family <e_k| U |e_0'>.
inline KrausChannel kraus_from_joint_unitary(const Matrix& u, const DensityMatrix& env_state,
                                             const BipartiteLayout& layout) {
  if (u.rows() != layout.joint_dim() || u.cols() != layout.joint_dim())
    throw std::invalid_argument("kraus_from_joint_unitary: unitary does not match layout");
  if (!is_unitary(u, tol::channel))
    throw std::invalid_argument("kraus_from_joint_unitary: matrix is not unitary");
  if (env_state.dim() != layout.dim_e)
    throw std::invalid_argument("kraus_from_joint_unitary: environment state has wrong dimension");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(env_state.matrix());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("kraus_from_joint_unitary: eigensolver failed");
  std::vector<Matrix> ops;
  for (int i = 0; i < layout.dim_e; ++i) {
    double p = solver.eigenvalues()(i);
    if (p < tol::algebraic) continue;
    const Vector v = solver.eigenvectors().col(i);
    for (int k = 0; k < layout.dim_e; ++k) {
      Matrix op = Matrix::Zero(layout.dim_s, layout.dim_s);
      for (int r = 0; r < layout.dim_s; ++r)
        for (int c = 0; c < layout.dim_s; ++c) {
          Complex sum = 0.0;
          for (int b = 0; b < layout.dim_e; ++b) sum += u(layout.index(r, k), layout.index(c, b)) * v(b);
          op(r, c) = sum;
        }
      ops.push_back(std::sqrt(p) * op);
    }
  }
  return KrausChannel(layout.dim_s, layout.dim_s, std::move(ops));
}

}  // namespace nsit
