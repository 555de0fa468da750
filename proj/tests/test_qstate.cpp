#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "qmetro/qstate.hpp"

using namespace qmetro;
using Catch::Approx;

namespace {
double binary_entropy(double p) {
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}
}  // namespace

TEST_CASE("qstate: constructor validation", "[qstate]") {
  SECTION("non-square rejected") {
    REQUIRE_THROWS_AS(DensityOperator(Matrix::Ones(2, 3)),
                      std::invalid_argument);
  }
  SECTION("non-Hermitian rejected") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 0.5;
    m(1, 1) = 0.5;
    m(0, 1) = complex(0.1, 0.0);  // no conjugate partner
    REQUIRE_THROWS_AS(DensityOperator(m), std::invalid_argument);
  }
  SECTION("trace far from one rejected") {
    REQUIRE_THROWS_AS(DensityOperator(Matrix::Identity(2, 2)),
                      std::invalid_argument);
  }
  SECTION("genuinely negative eigenvalue rejected") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    REQUIRE_THROWS_AS(DensityOperator(m), std::invalid_argument);
  }
  SECTION("eigenvalue clipping moves the trace by <= 1e-9") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0 + 3e-11;
    m(1, 1) = -3e-11;  // within the PSD budget, clipped to zero
    const DensityOperator rho(m);
    double eig_sum = 0.0;
    for (Eigen::Index i = 0; i < rho.eigenvalues().size(); ++i)
      eig_sum += rho.eigenvalues()[i];
    REQUIRE(std::abs(eig_sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("qstate: entropy closed forms", "[qstate]") {
  SECTION("pure states carry zero entropy") {
    Vector psi(3);
    psi << complex(0.3, 0.4), complex(0.0, 0.5), complex(0.7, 0.1);
    REQUIRE(von_neumann_entropy(DensityOperator::pure(psi)) ==
            Approx(0.0).margin(1e-10));
  }
  SECTION("maximally mixed carries log2 d") {
    for (int d : {2, 3, 8})
      REQUIRE(von_neumann_entropy(DensityOperator::maximally_mixed(d)) ==
              Approx(std::log2(double(d))).margin(1e-12));
  }
  SECTION("diagonal qubit reproduces the binary entropy") {
    for (double p : {0.1, 0.25, 0.5, 0.9}) {
      Matrix m = Matrix::Zero(2, 2);
      m(0, 0) = p;
      m(1, 1) = 1.0 - p;
      REQUIRE(von_neumann_entropy(DensityOperator(m)) ==
              Approx(binary_entropy(p)).margin(1e-12));
    }
  }
  SECTION("entropy is invariant under unitary conjugation") {
    Rng rng(11);
    const DensityOperator rho = random_density(5, 3, rng);
    const Matrix u = random_unitary(5, rng);
    const DensityOperator rotated(u * rho.matrix() * u.adjoint());
    REQUIRE(von_neumann_entropy(rotated) ==
            Approx(von_neumann_entropy(rho)).margin(1e-9));
  }
}

TEST_CASE("qstate: relative entropy", "[qstate]") {
  Rng rng(5);
  SECTION("vanishes on identical states") {
    const DensityOperator rho = random_density(4, 4, rng);
    REQUIRE(quantum_relative_entropy(rho, rho) == Approx(0.0).margin(1e-9));
  }
  SECTION("commuting diagonals reduce to the classical value") {
    Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
    const std::vector<double> pa{0.5, 0.3, 0.2}, pb{0.2, 0.5, 0.3};
    for (int i = 0; i < 3; ++i) {
      a(i, i) = pa[i];
      b(i, i) = pb[i];
    }
    const double classical = classical_relative_entropy(
        Distribution(std::vector<double>(pa)),
        Distribution(std::vector<double>(pb)));
    REQUIRE(quantum_relative_entropy(DensityOperator(a),
                                     DensityOperator(b)) ==
            Approx(classical).margin(1e-10));
  }
  SECTION("nonnegative on random full-rank pairs") {
    for (int trial = 0; trial < 20; ++trial) {
      const DensityOperator r1 = random_density(4, 4, rng);
      const DensityOperator r2 = random_density(4, 4, rng);
      REQUIRE(quantum_relative_entropy(r1, r2) >= -1e-9);
    }
  }
  SECTION("support violation gives +inf") {
    Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
    e0[0] = 1.0;
    e1[1] = 1.0;
    const DensityOperator p0 = DensityOperator::pure(e0);
    const DensityOperator p1 = DensityOperator::pure(e1);
    REQUIRE(std::isinf(quantum_relative_entropy(p0, p1)));
  }
  SECTION("dimension mismatch rejected") {
    REQUIRE_THROWS_AS(
        quantum_relative_entropy(DensityOperator::maximally_mixed(2),
                                 DensityOperator::maximally_mixed(3)),
        std::invalid_argument);
  }
}

TEST_CASE("qstate: partial trace", "[qstate]") {
  Rng rng(17);
  SECTION("product states reduce to their factors") {
    const DensityOperator a = random_density(2, 2, rng);
    const DensityOperator b = random_density(3, 3, rng);
    const DensityOperator ab(kron(a.matrix(), b.matrix()));
    REQUIRE(frobenius_distance(partial_trace(ab, {2, 3}, 1).matrix(),
                               a.matrix()) <= 1e-12);
    REQUIRE(frobenius_distance(partial_trace(ab, {2, 3}, 0).matrix(),
                               b.matrix()) <= 1e-12);
  }
  SECTION("three factors, middle traced") {
    const DensityOperator a = random_density(2, 1, rng);
    const DensityOperator b = random_density(2, 2, rng);
    const DensityOperator c = random_density(3, 1, rng);
    const DensityOperator abc(
        kron(kron(a.matrix(), b.matrix()), c.matrix()));
    REQUIRE(frobenius_distance(partial_trace(abc, {2, 2, 3}, 1).matrix(),
                               kron(a.matrix(), c.matrix())) <= 1e-12);
  }
  SECTION("dims must factor the space") {
    const DensityOperator rho = DensityOperator::maximally_mixed(6);
    REQUIRE_THROWS_AS(partial_trace(rho, {2, 2}, 0), std::invalid_argument);
  }
}

TEST_CASE("qstate: purification", "[qstate]") {
  Rng rng(23);
  const DensityOperator rho = random_density(4, 3, rng);
  const DensityOperator psi = purify(rho);
  REQUIRE(psi.dim() == 16);
  REQUIRE(psi.purity() == Approx(1.0).margin(1e-10));
  SECTION("tracing the ancilla recovers the state") {
    REQUIRE(frobenius_distance(partial_trace(psi, {4, 4}, 1).matrix(),
                               rho.matrix()) <= 1e-10);
  }
  SECTION("both marginals carry the same entropy") {
    const double ha = von_neumann_entropy(partial_trace(psi, {4, 4}, 1));
    const double hb = von_neumann_entropy(partial_trace(psi, {4, 4}, 0));
    REQUIRE(ha == Approx(hb).margin(1e-9));
    REQUIRE(ha == Approx(von_neumann_entropy(rho)).margin(1e-9));
  }
}

TEST_CASE("qstate: random generation", "[qstate]") {
  SECTION("random densities are valid and respect the rank") {
    Rng rng(3);
    const DensityOperator rho = random_density(6, 2, rng);
    REQUIRE(rho.matrix().trace().real() == Approx(1.0).margin(1e-12));
    int above_floor = 0;
    for (Eigen::Index i = 0; i < rho.eigenvalues().size(); ++i)
      if (rho.eigenvalues()[i] > 1e-9) ++above_floor;
    REQUIRE(above_floor == 2);
  }
  SECTION("equal seeds give byte-identical states") {
    Rng r1(42), r2(42);
    const DensityOperator a = random_density(5, 3, r1);
    const DensityOperator b = random_density(5, 3, r2);
    REQUIRE((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("different seeds differ") {
    Rng r1(1), r2(2);
    const DensityOperator a = random_density(5, 3, r1);
    const DensityOperator b = random_density(5, 3, r2);
    REQUIRE(frobenius_distance(a.matrix(), b.matrix()) > 1e-3);
  }
  SECTION("random unitaries are unitary") {
    Rng rng(9);
    const Matrix u = random_unitary(7, rng);
    REQUIRE(max_abs(u.adjoint() * u - Matrix::Identity(7, 7)) <= 1e-12);
  }
  SECTION("bad rank rejected") {
    Rng rng(1);
    REQUIRE_THROWS_AS(random_density(3, 4, rng), std::invalid_argument);
  }
}

TEST_CASE("qstate: ensemble volume", "[qstate]") {
  REQUIRE(ensemble_volume(0.0) == 1.0);
  REQUIRE(ensemble_volume(3.0) == 8.0);
  REQUIRE(ensemble_volume(std::log2(two_pi)) ==
          Approx(two_pi).margin(1e-12));
}
