#pragma once

#include <Eigen/Eigenvalues>

#include "qmetro/common.hpp"
#include "qmetro/distribution.hpp"

namespace qmetro {

// Dense density operator. Construction validates Hermiticity, unit trace and
// positivity (eigenvalues >= -1e-10, then clipped to zero); the stored matrix
// is the Hermitized input. The eigenvalue spectrum is computed once and kept.
class DensityOperator {
 public:
  explicit DensityOperator(const Matrix& m) {
    require(m.rows() == m.cols(), "density: matrix not square");
    require(m.rows() >= 1, "density: empty matrix");
    require(is_hermitian(m), "density: not Hermitian within 1e-12");
    mat_ = 0.5 * (m + m.adjoint());
    const double tr = mat_.trace().real();
    require(std::abs(tr - 1.0) <= 1e-9, "density: trace != 1");
    mat_ /= tr;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(mat_,
                                                 Eigen::EigenvaluesOnly);
    eigs_ = solver.eigenvalues();
    for (Eigen::Index i = 0; i < eigs_.size(); ++i) {
      require(eigs_[i] >= -tol::psd, "density: negative eigenvalue");
      if (eigs_[i] < 0.0) eigs_[i] = 0.0;
    }
  }

  static DensityOperator pure(const Vector& psi) {
    const double n = psi.norm();
    require(n > 0.0, "pure state: zero vector");
    const Vector v = psi / n;
    return DensityOperator(v * v.adjoint());
  }

  static DensityOperator maximally_mixed(int dim) {
    return DensityOperator(Matrix::Identity(dim, dim) /
                           static_cast<double>(dim));
  }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& matrix() const { return mat_; }
  // Ascending, clipped to [0,1].
  const RealVector& eigenvalues() const { return eigs_; }

  double purity() const { return (mat_ * mat_).trace().real(); }

 private:
  Matrix mat_;
  RealVector eigs_;
};

// Von Neumann entropy in bits; eigenvalues below the spectral floor count as
// exact zeros.
inline double von_neumann_entropy(const DensityOperator& rho) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < rho.eigenvalues().size(); ++i) {
    const double lam = rho.eigenvalues()[i];
    if (lam <= tol::eigenvalue_floor) continue;
    h -= lam * std::log2(lam);
  }
  return h;
}

// S(rho1||rho2) in bits; +inf when rho1 has weight outside the support of
// rho2 (support cut at the spectral floor).
inline double quantum_relative_entropy(const DensityOperator& rho1,
                                       const DensityOperator& rho2) {
  require(rho1.dim() == rho2.dim(), "relative entropy: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho2.matrix());
  const RealVector& mu = solver.eigenvalues();
  const Matrix& v = solver.eigenvectors();
  double cross = 0.0;
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    const double w =
        (v.col(j).adjoint() * rho1.matrix() * v.col(j))(0, 0).real();
    if (mu[j] <= tol::eigenvalue_floor) {
      if (w > tol::eigenvalue_floor) return inf;
      continue;
    }
    cross -= w * std::log2(mu[j]);
  }
  return cross - von_neumann_entropy(rho1);
}

// Ensemble volume 2^H: the number of distinguishable configurations carried
// by H bits (a length when the variable lives on a line or circle).
inline double ensemble_volume(double entropy_bits) {
  return std::exp2(entropy_bits);
}

// Trace out factor `which` (0-based) of a tensor-product space with the given
// factor dimensions, row-major index convention (last factor fastest).
inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const std::vector<int>& dims, int which) {
  long long total = 1;
  for (int d : dims) {
    require(d >= 1, "partial trace: bad factor dimension");
    total *= d;
  }
  require(total == rho.dim(), "partial trace: dims do not factor the space");
  require(which >= 0 && which < static_cast<int>(dims.size()),
          "partial trace: factor index out of range");

  long long right = 1;  // stride of the traced factor
  for (std::size_t f = which + 1; f < dims.size(); ++f) right *= dims[f];
  const long long dt = dims[which];
  const long long left = total / (right * dt);
  const long long kept = left * right;

  Matrix out = Matrix::Zero(kept, kept);
  for (long long li = 0; li < left; ++li)
    for (long long ri = 0; ri < right; ++ri)
      for (long long lj = 0; lj < left; ++lj)
        for (long long rj = 0; rj < right; ++rj) {
          complex acc(0.0, 0.0);
          for (long long k = 0; k < dt; ++k)
            acc += rho.matrix()((li * dt + k) * right + ri,
                                (lj * dt + k) * right + rj);
          out(li * right + ri, lj * right + rj) = acc;
        }
  return DensityOperator(out);
}

// Standard purification on dim^2: |Psi> = sum_i sqrt(lam_i) |e_i> (x) |i>.
// Tracing the second factor recovers rho.
inline DensityOperator purify(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix());
  const int d = rho.dim();
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) {
    const double lam = std::max(solver.eigenvalues()[i], 0.0);
    if (lam <= 0.0) continue;
    const double root = std::sqrt(lam);
    for (int a = 0; a < d; ++a)
      psi[static_cast<Eigen::Index>(a) * d + i] +=
          root * solver.eigenvectors()(a, i);
  }
  return DensityOperator::pure(psi);
}

// Ginibre-induced random state of the given rank; byte-identical output for
// equal seeds (fill order is row-major, two normals per entry).
inline DensityOperator random_density(int dim, int rank, Rng& rng) {
  require(dim >= 1 && rank >= 1 && rank <= dim, "random density: bad rank");
  Matrix g(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = rng.normal_complex();
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityOperator(m);
}

inline Vector random_pure_vector(int dim, Rng& rng) {
  Vector psi(dim);
  for (int i = 0; i < dim; ++i) psi[i] = rng.normal_complex();
  return psi / psi.norm();
}

// Haar unitary via QR of a Ginibre matrix with the standard phase fix.
inline Matrix random_unitary(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal_complex();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const complex rjj = r(j, j);
    const double a = std::abs(rjj);
    q.col(j) *= (a > 0.0) ? rjj / a : complex(1.0, 0.0);
  }
  return q;
}

}  // namespace qmetro
