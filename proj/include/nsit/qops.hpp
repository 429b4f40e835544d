// Dense complex linear algebra for small bipartite quantum systems: validated
// state/effect types, tensor products, partial traces, trace norms.
//
// Conventions used throughout the library:
//   * a joint bipartite index pair (i, a) maps to the flat index i*dim_e + a,
//     i.e. system index major, environment index minor;
//   * the preferred basis is the computational basis; a PreferredBasis only
//     carries a label ordering for bookkeeping (summation order), it never
//     changes which projectors define classicalisation.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Named tolerances backing the numerical contracts of the library.
namespace tol {
inline constexpr double algebraic = 1e-12;      // algebraic identities
inline constexpr double channel = 1e-10;        // unitarity / Kraus completeness
inline constexpr double decomposition = 1e-9;   // multi-step decompositions
inline constexpr double optimizer = 1e-6;       // derivative-free searches
inline constexpr double tie = 1e-10;            // eigenvalue tie breaking
}  // namespace tol

inline Matrix dagger(const Matrix& m) { return m.adjoint(); }

inline bool approx_equal(const Matrix& a, const Matrix& b, double tolerance) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.size() == 0) return true;
  return (a - b).cwiseAbs().maxCoeff() <= tolerance;
}

inline bool is_hermitian(const Matrix& m, double tolerance = tol::algebraic) {
  return m.rows() == m.cols() && approx_equal(m, m.adjoint(), tolerance);
}

inline bool is_unitary(const Matrix& m, double tolerance = tol::channel) {
  if (m.rows() != m.cols()) return false;
  Matrix eye = Matrix::Identity(m.rows(), m.cols());
  return approx_equal(m.adjoint() * m, eye, tolerance);
}

// Discards the anti-Hermitian round-off of a nominally Hermitian result.
inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline Vector basis_ket(int dim, int index) {
  if (dim < 1) throw std::invalid_argument("basis_ket: dimension must be positive");
  if (index < 0 || index >= dim) throw std::invalid_argument("basis_ket: index out of range");
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return v;
}

inline Matrix projector(const Vector& ket) {
  double n2 = ket.squaredNorm();
  if (n2 <= 0.0) throw std::invalid_argument("projector: zero vector");
  return (ket * ket.adjoint()) / n2;
}

// Dimensions of a system (+) environment split with the flat index i*dim_e + a.
struct BipartiteLayout {
  int dim_s = 0;
  int dim_e = 0;

  BipartiteLayout() = default;
  BipartiteLayout(int s, int e) : dim_s(s), dim_e(e) {
    if (s < 1 || e < 1) throw std::invalid_argument("BipartiteLayout: dimensions must be positive");
  }
  int joint_dim() const { return dim_s * dim_e; }
  int index(int i, int a) const { return i * dim_e + a; }
  bool operator==(const BipartiteLayout& o) const {
    return dim_s == o.dim_s && dim_e == o.dim_e;
  }
};

// Label ordering of the distinguished (computational) basis.  The ordering is
// pure bookkeeping: it fixes the order of summands in sequential protocols.
struct PreferredBasis {
  int dim = 0;
  std::vector<int> ordering;  // permutation of 0..dim-1

  PreferredBasis() = default;
  explicit PreferredBasis(int d) : dim(d) {
    if (d < 1) throw std::invalid_argument("PreferredBasis: dimension must be positive");
    ordering.resize(d);
    for (int i = 0; i < d; ++i) ordering[i] = i;
  }
  PreferredBasis(int d, std::vector<int> order) : dim(d), ordering(std::move(order)) {
    if (d < 1) throw std::invalid_argument("PreferredBasis: dimension must be positive");
    std::vector<bool> seen(static_cast<size_t>(d), false);
    if (ordering.size() != static_cast<size_t>(d))
      throw std::invalid_argument("PreferredBasis: ordering size mismatch");
    for (int x : ordering) {
      if (x < 0 || x >= d || seen[static_cast<size_t>(x)])
        throw std::invalid_argument("PreferredBasis: ordering is not a permutation");
      seen[static_cast<size_t>(x)] = true;
    }
  }
};

namespace detail {
inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
  return solver.eigenvalues();
}
}  // namespace detail

// Unit-trace positive semidefinite operator.  Validation tolerances are part
// of the type's contract: Hermiticity and trace within 1e-12, eigenvalues
// above -1e-12.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() < 1)
      throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
    if (!is_hermitian(mat_, tol::algebraic))
      throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    if (std::abs(mat_.trace().real() - 1.0) > tol::algebraic ||
        std::abs(mat_.trace().imag()) > tol::algebraic)
      throw std::invalid_argument("DensityMatrix: trace is not 1");
    if (detail::hermitian_eigenvalues(mat_).minCoeff() < -tol::algebraic)
      throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
  }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }

 private:
  Matrix mat_;
};

// POVM effect: Hermitian with spectrum inside [0, 1] (within 1e-12).
class Effect {
 public:
  explicit Effect(Matrix m) : mat_(std::move(m)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() < 1)
      throw std::invalid_argument("Effect: matrix must be square and non-empty");
    if (!is_hermitian(mat_, tol::algebraic))
      throw std::invalid_argument("Effect: matrix is not Hermitian");
    Eigen::VectorXd ev = detail::hermitian_eigenvalues(mat_);
    if (ev.minCoeff() < -tol::algebraic || ev.maxCoeff() > 1.0 + tol::algebraic)
      throw std::invalid_argument("Effect: spectrum outside [0, 1]");
  }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }

 private:
  Matrix mat_;
};

inline bool approx_equal(const DensityMatrix& a, const DensityMatrix& b, double tolerance) {
  return approx_equal(a.matrix(), b.matrix(), tolerance);
}

inline bool approx_equal(const Effect& a, const Effect& b, double tolerance) {
  return approx_equal(a.matrix(), b.matrix(), tolerance);
}

// Kronecker product honouring the system-major flat index convention.
inline Matrix tensor(const Matrix& a, const Matrix& b) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("tensor: empty factor");
  return Eigen::kroneckerProduct(a, b).eval();
}

inline Vector tensor(const Vector& a, const Vector& b) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("tensor: empty factor");
  return Eigen::kroneckerProduct(a, b).eval();
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(tensor(a.matrix(), b.matrix()));
}

enum class Subsystem { System, Environment };

// Partial trace over the factor NOT kept.
inline Matrix partial_trace(const Matrix& m, const BipartiteLayout& layout, Subsystem keep) {
  if (m.rows() != layout.joint_dim() || m.cols() != layout.joint_dim())
    throw std::invalid_argument("partial_trace: matrix does not match layout");
  if (keep == Subsystem::System) {
    Matrix out = Matrix::Zero(layout.dim_s, layout.dim_s);
    for (int i = 0; i < layout.dim_s; ++i)
      for (int j = 0; j < layout.dim_s; ++j)
        for (int a = 0; a < layout.dim_e; ++a)
          out(i, j) += m(layout.index(i, a), layout.index(j, a));
    return out;
  }
  Matrix out = Matrix::Zero(layout.dim_e, layout.dim_e);
  for (int a = 0; a < layout.dim_e; ++a)
    for (int b = 0; b < layout.dim_e; ++b)
      for (int i = 0; i < layout.dim_s; ++i)
        out(a, b) += m(layout.index(i, a), layout.index(i, b));
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& m, const BipartiteLayout& layout,
                                   Subsystem keep) {
  return DensityMatrix(hermitize(partial_trace(m.matrix(), layout, keep)));
}

// Sum of singular values; for Hermitian input the cheaper absolute-eigenvalue
// route gives the same number.
inline double trace_norm(const Matrix& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("trace_norm: matrix must be square");
  if (is_hermitian(m, tol::algebraic))
    return detail::hermitian_eigenvalues(hermitize(m)).cwiseAbs().sum();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

// Projector onto the strictly positive eigenspace (eigenvalues above the tie
// tolerance).  For traceless Hermitian h this is the optimal effect:
// tr(P h) = ||h||_tr / 2.
inline Effect positive_part_projector(const Matrix& h, double tie_tolerance = tol::tie) {
  if (!is_hermitian(h, tol::algebraic))
    throw std::invalid_argument("positive_part_projector: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(h));
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("positive_part_projector: eigensolver failed");
  Matrix p = Matrix::Zero(h.rows(), h.cols());
  for (int k = 0; k < solver.eigenvalues().size(); ++k)
    if (solver.eigenvalues()(k) > tie_tolerance)
      p += solver.eigenvectors().col(k) * solver.eigenvectors().col(k).adjoint();
  return Effect(hermitize(p));
}

inline Vector maximally_coherent_ket(int dim) {
  if (dim < 1) throw std::invalid_argument("maximally_coherent_ket: dimension must be positive");
  return Vector::Constant(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
}

// |+><+| with |+> = sum_i |i> / sqrt(d).
inline DensityMatrix maximally_coherent_state(int dim) {
  return DensityMatrix(projector(maximally_coherent_ket(dim)));
}

inline Vector maximally_entangled_ket(int dim) {
  if (dim < 1) throw std::invalid_argument("maximally_entangled_ket: dimension must be positive");
  BipartiteLayout layout(dim, dim);
  Vector v = Vector::Zero(layout.joint_dim());
  for (int i = 0; i < dim; ++i) v(layout.index(i, i)) = 1.0 / std::sqrt(static_cast<double>(dim));
  return v;
}

// |Psi><Psi| with |Psi> = sum_i |ii> / sqrt(d) on a (d, d) layout.
inline DensityMatrix maximally_entangled_state(int dim) {
  return DensityMatrix(projector(maximally_entangled_ket(dim)));
}

// Transpose of the environment factor only.
inline Matrix partial_transpose(const Matrix& m, const BipartiteLayout& layout) {
  if (m.rows() != layout.joint_dim() || m.cols() != layout.joint_dim())
    throw std::invalid_argument("partial_transpose: matrix does not match layout");
  Matrix out(m.rows(), m.cols());
  for (int i = 0; i < layout.dim_s; ++i)
    for (int j = 0; j < layout.dim_s; ++j)
      for (int a = 0; a < layout.dim_e; ++a)
        for (int b = 0; b < layout.dim_e; ++b)
          out(layout.index(i, a), layout.index(j, b)) = m(layout.index(i, b), layout.index(j, a));
  return out;
}

inline double min_eigenvalue(const Matrix& hermitian) {
  if (!is_hermitian(hermitian, tol::algebraic))
    throw std::invalid_argument("min_eigenvalue: matrix is not Hermitian");
  return detail::hermitian_eigenvalues(hermitize(hermitian)).minCoeff();
}

}  // namespace nsit
