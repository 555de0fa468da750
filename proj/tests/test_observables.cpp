#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "qmetro/observables.hpp"

using namespace qmetro;
using Catch::Approx;

TEST_CASE("observables: povm validation", "[observables]") {
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  SECTION("a complete projective set passes") {
    const Povm povm({p0, p1});
    REQUIRE(povm.completeness_residual <= 1e-15);
    REQUIRE(povm.outcome_labels == std::vector<double>{0.0, 1.0});
  }
  SECTION("incomplete sets rejected") {
    REQUIRE_THROWS_AS(Povm({p0}), std::invalid_argument);
  }
  SECTION("non-PSD elements rejected") {
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = 0.5;
    bad(1, 0) = 0.5;  // eigenvalues +-1/2
    Matrix rest = Matrix::Identity(2, 2) - bad;
    REQUIRE_THROWS_AS(Povm({bad, rest}), std::invalid_argument);
  }
  SECTION("non-Hermitian elements rejected") {
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = 0.5;
    REQUIRE_THROWS_AS(Povm({bad, Matrix::Identity(2, 2) - bad}),
                      std::invalid_argument);
  }
  SECTION("tensoring with the identity keeps completeness") {
    const Povm wide = Povm({p0, p1}).tensor_identity(3);
    REQUIRE(wide.dim() == 6);
    REQUIRE(wide.completeness_residual <= 1e-12);
  }
}

TEST_CASE("observables: grid phase measurement", "[observables]") {
  SECTION("two angles complete a qubit exactly") {
    const Povm povm = canonical_phase_povm(2, 2);
    REQUIRE(povm.completeness_residual <= 1e-12);
  }
  SECTION("grids below the dimension are rejected") {
    REQUIRE_THROWS_AS(canonical_phase_povm(16, 15), std::invalid_argument);
  }
  SECTION("equal superposition gives the fringe law 1 + cos") {
    const int m = 64;
    Vector psi(2);
    psi << 1.0, 1.0;
    const Distribution p =
        measure(DensityOperator::pure(psi), canonical_phase_povm(2, m));
    for (int k = 0; k < m; ++k) {
      const double theta = two_pi * k / m;
      REQUIRE(p.probs[k] ==
              Approx((1.0 + std::cos(theta)) / m).margin(1e-14));
      REQUIRE(p.labels[k] == Approx(theta).margin(1e-14));
    }
    REQUIRE(p.cell_width == Approx(two_pi / m).margin(1e-15));
  }
  SECTION("number eigenstates give the flat phase profile") {
    Vector e3 = Vector::Zero(8);
    e3[3] = 1.0;
    const Distribution p =
        measure(DensityOperator::pure(e3), canonical_phase_povm(8, 32));
    for (double v : p.probs) REQUIRE(v == Approx(1.0 / 32).margin(1e-14));
    REQUIRE(shannon_entropy(p) == Approx(std::log2(two_pi)).margin(1e-12));
  }
}

TEST_CASE("observables: conjugate basis pair", "[observables]") {
  const int d = 12;
  const MubPair mub = mub_pair_dft(d);
  SECTION("all cross overlaps share modulus 1/sqrt(d)") {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const complex ov =
            (mub.basis_a.col(a).adjoint() * mub.basis_b.col(b))(0, 0);
        REQUIRE(std::abs(ov) == Approx(1.0 / std::sqrt(double(d)))
                                    .margin(1e-12));
      }
  }
  SECTION("the partner basis advances by modulation") {
    for (int b = 0; b + 1 < d; ++b)
      for (int a = 0; a < d; ++a) {
        const double ang = two_pi * a / d;
        const complex expect =
            mub.basis_b(a, b) * complex(std::cos(ang), std::sin(ang));
        REQUIRE(std::abs(mub.basis_b(a, b + 1) - expect) <= 1e-12);
      }
  }
  SECTION("overlap constant") {
    REQUIRE(mub.log2_c() == Approx(std::log2(12.0)).margin(1e-14));
  }
}

TEST_CASE("observables: basis-pair uncertainty slack", "[observables]") {
  const MubPair mub = mub_pair_dft(5);
  SECTION("an eigenstate of the first basis sits at exact equality") {
    Vector e2 = Vector::Zero(5);
    e2[2] = 1.0;
    const EurReport rep = mub_eur_slack(DensityOperator::pure(e2), mub);
    REQUIRE(rep.h_a == Approx(0.0).margin(1e-12));
    REQUIRE(rep.h_b == Approx(std::log2(5.0)).margin(1e-12));
    REQUIRE(rep.slack == Approx(0.0).margin(1e-12));
  }
  SECTION("the flat state sits at exact equality") {
    const EurReport rep =
        mub_eur_slack(DensityOperator::maximally_mixed(5), mub);
    REQUIRE(rep.slack == Approx(0.0).margin(1e-12));
  }
  SECTION("random states satisfy the bound") {
    Rng rng(43);
    for (int trial = 0; trial < 30; ++trial) {
      const DensityOperator rho = random_density(5, 1 + (trial % 5), rng);
      REQUIRE(mub_eur_slack(rho, mub).slack >= -1e-9);
    }
  }
}

TEST_CASE("observables: number-phase uncertainty slack", "[observables]") {
  SECTION("number eigenstates sit at exact equality") {
    Vector e1 = Vector::Zero(4);
    e1[1] = 1.0;
    const EurReport rep =
        number_phase_eur_slack(DensityOperator::pure(e1), 128);
    REQUIRE(rep.h_a == Approx(0.0).margin(1e-12));
    REQUIRE(rep.h_b == Approx(std::log2(two_pi)).margin(1e-12));
    REQUIRE(rep.slack == Approx(0.0).margin(1e-12));
  }
  SECTION("random states respect the bound within the grid budget") {
    Rng rng(47);
    for (int trial = 0; trial < 20; ++trial) {
      const DensityOperator rho = random_density(6, 1 + (trial % 6), rng);
      REQUIRE(number_phase_eur_slack(rho, 128).slack >= -5e-3);
    }
  }
  SECTION("the grid defect shrinks when the grid doubles") {
    Rng rng(53);
    const DensityOperator rho = random_density(6, 1, rng);
    const double ref = number_phase_eur_slack(rho, 8192).slack;
    const double d128 =
        std::abs(number_phase_eur_slack(rho, 128).slack - ref);
    const double d256 =
        std::abs(number_phase_eur_slack(rho, 256).slack - ref);
    REQUIRE(d256 <= 0.5 * d128 + 1e-12);
  }
}

TEST_CASE("observables: conjugate-pair discretization", "[observables]") {
  const double hbar = 1.0;
  const QpSystem sys = qp_discretization(101, 10.0, hbar);
  SECTION("cell areas tile the phase-space quantum") {
    REQUIRE(sys.dq * sys.dp * sys.d ==
            Approx(two_pi * hbar).epsilon(1e-14));
  }
  SECTION("the two bases are mutually unbiased") {
    for (int a : {0, 17, 50, 100}) {
      Vector q_col = Vector::Zero(101);
      q_col[a] = 1.0;
      for (int b : {0, 33, 100}) {
        const complex ov =
            (q_col.adjoint() * sys.p_povm.elements[b] * q_col)(0, 0);
        REQUIRE(std::abs(ov) == Approx(1.0 / 101.0).margin(1e-12));
      }
    }
  }
  SECTION("even dimensions rejected") {
    REQUIRE_THROWS_AS(qp_discretization(100, 10.0), std::invalid_argument);
  }
}

TEST_CASE("observables: gaussian conjugate-pair entropies", "[observables]") {
  // Minimum-uncertainty state with matched q/p resolution: sigma_q chosen so
  // both marginals span the same number of cells.
  const double hbar = 1.0;
  const double length = 10.0;
  const QpSystem sys = qp_discretization(101, length, hbar);
  const double sigma_q = length / (2.0 * std::sqrt(pi));
  const DensityOperator rho = gaussian_qp_state(sys, sigma_q);
  const QpEurReport rep = qp_eur_slack(rho, sys);

  SECTION("differential sum reproduces the continuum value within 1%") {
    const double target = std::log2(std::exp(1.0) * pi * hbar);
    REQUIRE(rep.differential.h_a + rep.differential.h_b ==
            Approx(target).epsilon(0.01));
  }
  SECTION("differential bound holds") {
    REQUIRE(rep.differential.h_a + rep.differential.h_b >=
            std::log2(two_pi * hbar) - 1e-9);
  }
  SECTION("discrete slack is exactly nonnegative") {
    REQUIRE(rep.discrete.slack >= -1e-9);
    REQUIRE(rep.discrete.log2_c == Approx(std::log2(101.0)).margin(1e-12));
  }
  SECTION("discrete and differential slack agree") {
    // Same inequality in two unit systems: cell widths shift both sides
    // equally, so the slacks must match to roundoff.
    REQUIRE(rep.discrete.slack ==
            Approx(rep.differential.slack).margin(1e-9));
  }
}

TEST_CASE("observables: mixed states raise the conjugate-pair floor",
          "[observables]") {
  Rng rng(59);
  const QpSystem sys = qp_discretization(21, 6.0);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityOperator rho = random_density(21, 1 + (4 * trial) % 21, rng);
    const QpEurReport rep = qp_eur_slack(rho, sys);
    REQUIRE(rep.discrete.slack >= -1e-9);
  }
}

TEST_CASE("observables: degenerate-generator corrections", "[observables]") {
  Rng rng(61);
  const int mode = 4, aux = 3, m_grid = 256;
  SECTION("product states reduce to the single-system slack") {
    const DensityOperator mode_state = random_density(mode, 2, rng);
    const DensityOperator aux_state = random_density(aux, 3, rng);
    const DensityOperator joint(
        kron(mode_state.matrix(), aux_state.matrix()));
    const DegenerateEurReport deg =
        degenerate_eur_slack(joint, mode, aux, m_grid);
    const EurReport single = number_phase_eur_slack(mode_state, m_grid);
    REQUIRE(deg.slack == Approx(single.slack).margin(1e-9));
    REQUIRE(deg.conditional_correction ==
            Approx(von_neumann_entropy(aux_state)).margin(1e-9));
  }
  SECTION("correlated states respect the corrected bound") {
    for (int trial = 0; trial < 10; ++trial) {
      const DensityOperator rho =
          random_density(mode * aux, 1 + (trial % 4), rng);
      REQUIRE(degenerate_eur_slack(rho, mode, aux, m_grid).slack >= -5e-3);
    }
  }
  SECTION("bad factorization rejected") {
    REQUIRE_THROWS_AS(
        degenerate_eur_slack(DensityOperator::maximally_mixed(10), 4, 3, 64),
        std::invalid_argument);
  }
}

TEST_CASE("observables: oscillator energy-time pair", "[observables]") {
  Rng rng(67);
  const DensityOperator rho = random_density(5, 2, rng);
  const int m_grid = 256;
  SECTION("the slack does not depend on the frequency") {
    const double s1 = oscillator_energy_time_slack(rho, 1.0, m_grid).slack;
    const double s2 = oscillator_energy_time_slack(rho, 2.7, m_grid).slack;
    REQUIRE(std::abs(s1 - s2) <= 1e-12);
  }
  SECTION("the slack equals the number-phase slack") {
    const double et = oscillator_energy_time_slack(rho, 3.1, m_grid).slack;
    const double np = number_phase_eur_slack(rho, m_grid).slack;
    REQUIRE(et == Approx(np).margin(1e-12));
  }
  SECTION("energy labels scale with the frequency") {
    const EnergyTimeReport rep =
        oscillator_energy_time_slack(rho, 2.0, m_grid, 1.0);
    REQUIRE(rep.log2_tau == Approx(std::log2(pi)).margin(1e-12));
  }
}

TEST_CASE("observables: almost-periodic time entropy", "[observables]") {
  SECTION("a single stationary level carries zero entropy rate") {
    REQUIRE(almost_periodic_entropy({complex(1.0, 0.0)}, {2.5}, 50.0, 501) ==
            Approx(0.0).margin(1e-12));
  }
  SECTION("commensurate spectra reduce to the periodic value") {
    // Two levels, splitting 1: the window average over 10^3 periods must
    // match the one-period canonical time entropy minus log2(period).
    const double r = 1.0 / std::sqrt(2.0);
    const std::vector<complex> amps{complex(r, 0.0), complex(r, 0.0)};
    const double h_ap = almost_periodic_entropy(amps, {0.0, 1.0},
                                                1000.0 * two_pi, 2000001);
    Vector psi(2);
    psi << r, r;
    const Distribution phase =
        measure(DensityOperator::pure(psi), canonical_phase_povm(2, 4096));
    const double h_t = shannon_entropy(phase);  // differential, one period
    REQUIRE(h_ap == Approx(h_t - std::log2(two_pi)).margin(1e-3));
  }
  SECTION("incommensurate spectra keep the energy-time sum nonnegative") {
    const double r = 1.0 / std::sqrt(3.0);
    const std::vector<complex> amps(3, complex(r, 0.0));
    const std::vector<double> energies{0.0, 1.0, std::sqrt(2.0)};
    const double h_ap =
        almost_periodic_entropy(amps, energies, 1000.0, 20001);
    const double h_e = std::log2(3.0);
    REQUIRE(h_e + h_ap >= -1e-2);
  }
  SECTION("unnormalized amplitudes rejected") {
    REQUIRE_THROWS_AS(
        almost_periodic_entropy({complex(1.0, 0.0), complex(1.0, 0.0)},
                                {0.0, 1.0}, 10.0, 101),
        std::invalid_argument);
  }
}
