#include <catch2/catch_amalgamated.hpp>

#include "nsit/qops.hpp"
#include "nsit/random.hpp"

using namespace nsit;

namespace {

Matrix pauli_x2() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  m(1, 0) = 1;
  return m;
}

}  // namespace

TEST_CASE("tensor product follows the (i,a) -> i*dim_e + a index convention") {
  const Matrix i2 = Matrix::Identity(2, 2);
  REQUIRE(approx_equal(tensor(i2, i2), Matrix(Matrix::Identity(4, 4)), 1e-15));

  const Matrix p0 = projector(basis_ket(2, 0));
  const Matrix p1 = projector(basis_ket(2, 1));
  const Matrix t = tensor(p0, p1);
  REQUIRE(t.rows() == 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      REQUIRE(std::abs(t(r, c) - ((r == 1 && c == 1) ? 1.0 : 0.0)) < 1e-15);

  const Vector flipped = tensor(pauli_x2(), pauli_x2()) * tensor(basis_ket(2, 0), basis_ket(2, 0));
  REQUIRE((flipped - tensor(basis_ket(2, 1), basis_ket(2, 1))).norm() < 1e-15);
}

TEST_CASE("partial trace recovers marginals") {
  BipartiteLayout layout(2, 2);
  const DensityMatrix ent = maximally_entangled_state(2);
  const Matrix half = 0.5 * Matrix::Identity(2, 2);
  REQUIRE(approx_equal(partial_trace(ent, layout, Subsystem::System).matrix(), half, 1e-12));
  REQUIRE(approx_equal(partial_trace(ent, layout, Subsystem::Environment).matrix(), half, 1e-12));
}

TEST_CASE("partial trace of a product recovers the kept factor") {
  Rng rng = make_rng(11);
  for (const auto& [ds, de] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 3}}) {
    BipartiteLayout layout(ds, de);
    for (int k = 0; k < 200; ++k) {
      const DensityMatrix a = random_density(ds, rng);
      const DensityMatrix b = random_density(de, rng);
      const DensityMatrix joint = tensor(a, b);
      REQUIRE(approx_equal(partial_trace(joint, layout, Subsystem::System).matrix(), a.matrix(),
                           1e-12));
      REQUIRE(approx_equal(partial_trace(joint, layout, Subsystem::Environment).matrix(),
                           b.matrix(), 1e-12));
      REQUIRE(std::abs(partial_trace(joint.matrix(), layout, Subsystem::System).trace().real() -
                       1.0) < 1e-12);
    }
  }
}

TEST_CASE("trace norm on known inputs") {
  REQUIRE(trace_norm(Matrix(Matrix::Zero(3, 3))) == 0.0);
  for (int d = 2; d <= 5; ++d)
    REQUIRE(std::abs(trace_norm(Matrix(Matrix::Identity(d, d))) - d) < 1e-12);
  Matrix hollow(2, 2);
  hollow << 0.0, 0.5, 0.5, 0.0;
  REQUIRE(std::abs(trace_norm(hollow) - 1.0) < 1e-12);
  REQUIRE_THROWS_AS(trace_norm(Matrix(Matrix::Zero(2, 3))), std::invalid_argument);
}

TEST_CASE("trace norm is a norm") {
  Rng rng = make_rng(12);
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + k % 3;
    const Matrix a = hermitize(random_density(d, rng).matrix() - random_density(d, rng).matrix());
    const Matrix b = hermitize(random_density(d, rng).matrix() - random_density(d, rng).matrix());
    const double na = trace_norm(a);
    const double nb = trace_norm(b);
    REQUIRE(na >= 0.0);
    REQUIRE(std::abs(trace_norm(Matrix(-2.5 * a)) - 2.5 * na) < 1e-9);
    REQUIRE(trace_norm(Matrix(a + b)) <= na + nb + 1e-9);
  }
}

TEST_CASE("Helstrom bound: effects never exceed half the trace norm on traceless operators") {
  Rng rng = make_rng(13);
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 3;
    Matrix a = hermitize(random_density(d, rng).matrix() - random_density(d, rng).matrix());
    const Effect m = random_effect(d, rng);
    REQUIRE(2.0 * (m.matrix() * a).trace().real() <= trace_norm(a) + 1e-9);
    // the positive-eigenspace projector saturates it
    const Effect best = positive_part_projector(a);
    REQUIRE(std::abs(2.0 * (best.matrix() * a).trace().real() - trace_norm(a)) < 1e-9);
  }
}

TEST_CASE("positive part projector on known inputs") {
  Matrix hollow(2, 2);
  hollow << 0.0, 0.5, 0.5, 0.0;
  const Effect plus = positive_part_projector(hollow);
  REQUIRE(approx_equal(plus.matrix(), maximally_coherent_state(2).matrix(), 1e-12));
  REQUIRE(std::abs((plus.matrix() * hollow).trace().real() - 0.5) < 1e-12);

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 1;
  diag(1, 1) = -1;
  REQUIRE(approx_equal(positive_part_projector(diag).matrix(), projector(basis_ket(2, 0)), 1e-12));

  REQUIRE(trace_norm(positive_part_projector(Matrix(Matrix::Zero(3, 3))).matrix()) < 1e-12);
  REQUIRE_THROWS_AS(positive_part_projector(pauli_x2() * Complex(0, 1)), std::invalid_argument);
}

TEST_CASE("maximally coherent state") {
  REQUIRE(approx_equal(maximally_coherent_state(1).matrix(), Matrix(Matrix::Identity(1, 1)),
                       1e-15));
  const Matrix d2 = maximally_coherent_state(2).matrix();
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) REQUIRE(std::abs(d2(r, c) - 0.5) < 1e-15);
  for (int d = 2; d <= 6; ++d) {
    Matrix hollow = maximally_coherent_state(d).matrix();
    hollow.diagonal().setZero();
    REQUIRE(std::abs(0.5 * trace_norm(hollow) - (1.0 - 1.0 / d)) < 1e-12);
  }
}

TEST_CASE("maximally entangled state") {
  const DensityMatrix ent = maximally_entangled_state(2);
  Matrix expected = Matrix::Zero(4, 4);
  for (int r : {0, 3})
    for (int c : {0, 3}) expected(r, c) = 0.5;
  REQUIRE(approx_equal(ent.matrix(), expected, 1e-15));
  for (int d = 2; d <= 4; ++d) {
    const DensityMatrix e = maximally_entangled_state(d);
    BipartiteLayout layout(d, d);
    REQUIRE(approx_equal(partial_trace(e, layout, Subsystem::System).matrix(),
                         Matrix(Matrix::Identity(d, d) / d), 1e-12));
    REQUIRE(std::abs((e.matrix() * e.matrix()).trace().real() - 1.0) < 1e-12);
  }
}

TEST_CASE("partial transpose") {
  BipartiteLayout layout(2, 2);
  Rng rng = make_rng(14);

  // product states stay positive with the environment factor transposed
  const DensityMatrix a = random_density(2, rng);
  const DensityMatrix b = random_density(2, rng);
  const Matrix pt = partial_transpose(tensor(a, b).matrix(), layout);
  REQUIRE(approx_equal(pt, tensor(a.matrix(), Matrix(b.matrix().transpose())), 1e-12));
  REQUIRE(min_eigenvalue(pt) > -1e-12);

  REQUIRE(std::abs(min_eigenvalue(partial_transpose(maximally_entangled_state(2).matrix(), layout)) -
                   (-0.5)) < 1e-12);

  for (int k = 0; k < 100; ++k) {
    const BipartiteLayout l = (k % 2 == 0) ? BipartiteLayout(2, 2) : BipartiteLayout(2, 3);
    const DensityMatrix rho = random_density(l.joint_dim(), rng);
    REQUIRE(approx_equal(partial_transpose(partial_transpose(rho.matrix(), l), l), rho.matrix(),
                         1e-12));
  }
}

TEST_CASE("density matrix and effect validation") {
  Matrix bad_trace = 0.7 * Matrix::Identity(2, 2);
  REQUIRE_THROWS_AS(DensityMatrix(bad_trace), std::invalid_argument);

  Matrix not_hermitian(2, 2);
  not_hermitian << 0.5, 0.3, 0.1, 0.5;
  REQUIRE_THROWS_AS(DensityMatrix(not_hermitian), std::invalid_argument);

  Matrix negative(2, 2);
  negative << 1.5, 0.0, 0.0, -0.5;
  REQUIRE_THROWS_AS(DensityMatrix(negative), std::invalid_argument);

  REQUIRE_THROWS_AS(Effect(Matrix(1.5 * Matrix::Identity(2, 2))), std::invalid_argument);
  REQUIRE_THROWS_AS(Effect(Matrix(-0.1 * Matrix::Identity(2, 2))), std::invalid_argument);
  REQUIRE_NOTHROW(Effect(Matrix(Matrix::Identity(2, 2))));
  REQUIRE_NOTHROW(Effect(Matrix(Matrix::Zero(2, 2))));
}

TEST_CASE("layout and basis bookkeeping") {
  BipartiteLayout layout(3, 2);
  REQUIRE(layout.joint_dim() == 6);
  REQUIRE(layout.index(2, 1) == 5);
  REQUIRE(layout.index(1, 0) == 2);
  REQUIRE_THROWS_AS(BipartiteLayout(0, 2), std::invalid_argument);

  const PreferredBasis basis(3);
  REQUIRE(basis.ordering == std::vector<int>({0, 1, 2}));
  REQUIRE_NOTHROW(PreferredBasis(3, {2, 0, 1}));
  REQUIRE_THROWS_AS(PreferredBasis(3, {0, 0, 1}), std::invalid_argument);
  REQUIRE_THROWS_AS(PreferredBasis(3, {0, 1}), std::invalid_argument);
}

TEST_CASE("projector and small helpers") {
  REQUIRE_THROWS_AS(projector(Vector(Vector::Zero(2))), std::invalid_argument);
  Vector unnormalized(2);
  unnormalized << 3.0, 0.0;
  REQUIRE(approx_equal(projector(unnormalized), projector(basis_ket(2, 0)), 1e-15));

  Matrix g(2, 2);
  g << Complex(1, 1), Complex(0, 2), Complex(2, 0), Complex(0, -1);
  REQUIRE(is_hermitian(hermitize(g), 1e-15));
  REQUIRE(approx_equal(dagger(g), Matrix(g.adjoint()), 1e-15));
}
