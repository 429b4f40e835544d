// Seeded random states, unitaries and effects.  Every draw is a pure function
// of the generator state, so a fixed seed reproduces byte-identical results.
#pragma once

#include <cstdint>
#include <random>

#include "nsit/qops.hpp"

namespace nsit {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent substreams from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(seed, stream));
}

inline Vector random_gaussian_ket(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("random_gaussian_ket: dimension must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) {
    double re = normal(rng);
    double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return v;
}

// Haar-distributed pure state (normalized complex Gaussian vector).
inline Vector random_pure_ket(int dim, Rng& rng) {
  Vector v = random_gaussian_ket(dim, rng);
  while (v.norm() < 1e-12) v = random_gaussian_ket(dim, rng);
  return v / v.norm();
}

inline DensityMatrix random_pure_state(int dim, Rng& rng) {
  return DensityMatrix(projector(random_pure_ket(dim, rng)));
}

// Haar-distributed unitary: QR of a complex Ginibre matrix with the phase
// convention fixed by the diagonal of R.
inline Matrix random_unitary(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("random_unitary: dimension must be positive");
  Matrix g(dim, dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    Complex phase = (std::abs(d) > 0.0) ? d / std::abs(d) : Complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

// Full-rank random mixed state G G^dag / tr(G G^dag).
inline DensityMatrix random_density(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("random_density: dimension must be positive");
  Matrix g(dim, dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(hermitize(rho));
}

// Random effect with spectrum stretched to fill [0, 1].
inline Effect random_effect(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("random_effect: dimension must be positive");
  Matrix g(dim, dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  Matrix h = hermitize(g);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  double lo = solver.eigenvalues().minCoeff();
  double hi = solver.eigenvalues().maxCoeff();
  if (hi - lo < 1e-12) return Effect(0.5 * Matrix::Identity(dim, dim));
  Matrix m = (h - lo * Matrix::Identity(dim, dim)) / (hi - lo);
  return Effect(hermitize(m));
}

// Random convex weights (flat Dirichlet).
inline std::vector<double> random_weights(int count, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(static_cast<size_t>(count));
  double sum = 0.0;
  for (auto& x : w) {
    x = expo(rng);
    sum += x;
  }
  for (auto& x : w) x /= sum;
  return w;
}

}  // namespace nsit
