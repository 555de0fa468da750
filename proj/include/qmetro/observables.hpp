#pragma once

#include "qmetro/qstate.hpp"

namespace qmetro {

// Finite POVM. Elements are validated PSD; completeness is checked against
// the stated residual budget (exact constructions pass 1e-10, quadrature
// based ones carry their measured residual).
struct Povm {
  std::vector<Matrix> elements;
  std::vector<double> outcome_labels;
  double cell_width = 0.0;
  double completeness_residual = 0.0;

  Povm(std::vector<Matrix> elems, std::vector<double> labels = {},
       double cell = 0.0, double residual_budget = tol::completeness)
      : elements(std::move(elems)),
        outcome_labels(std::move(labels)),
        cell_width(cell) {
    require(!elements.empty(), "povm: no elements");
    const Eigen::Index d = elements.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& e : elements) {
      require(e.rows() == d && e.cols() == d, "povm: ragged elements");
      require(is_hermitian(e, 1e-10), "povm: element not Hermitian");
      Eigen::SelfAdjointEigenSolver<Matrix> s(e, Eigen::EigenvaluesOnly);
      require(s.eigenvalues().minCoeff() >= -tol::psd,
              "povm: element not PSD");
      sum += e;
    }
    completeness_residual = max_abs(sum - Matrix::Identity(d, d));
    require(completeness_residual <= residual_budget,
            "povm: completeness residual " +
                std::to_string(completeness_residual) + " over budget");
    if (outcome_labels.empty()) {
      outcome_labels.resize(elements.size());
      for (std::size_t a = 0; a < elements.size(); ++a)
        outcome_labels[a] = static_cast<double>(a);
    }
    require(outcome_labels.size() == elements.size(),
            "povm: label count mismatch");
  }

  int dim() const { return static_cast<int>(elements.front().rows()); }
  std::size_t size() const { return elements.size(); }

  // Same outcomes acting on system (x) identity(aux).
  Povm tensor_identity(int aux_dim) const {
    const Matrix id = Matrix::Identity(aux_dim, aux_dim);
    std::vector<Matrix> elems;
    elems.reserve(elements.size());
    for (const auto& e : elements) elems.push_back(kron(e, id));
    return Povm(std::move(elems), outcome_labels, cell_width,
                std::max(completeness_residual * 2.0, tol::completeness));
  }
};

// Projective POVM from the columns of a unitary.
inline Povm basis_povm(const Matrix& basis, std::vector<double> labels = {},
                       double cell = 0.0) {
  std::vector<Matrix> elems;
  elems.reserve(basis.cols());
  for (Eigen::Index c = 0; c < basis.cols(); ++c)
    elems.push_back(basis.col(c) * basis.col(c).adjoint());
  return Povm(std::move(elems), std::move(labels), cell);
}

inline Distribution measure(const DensityOperator& rho, const Povm& povm) {
  require(povm.dim() == rho.dim(), "measure: dimension mismatch");
  std::vector<double> p(povm.size());
  double sum = 0.0;
  for (std::size_t a = 0; a < povm.size(); ++a) {
    p[a] = (povm.elements[a] * rho.matrix()).trace().real();
    if (p[a] < 0.0 && p[a] >= -1e-12) p[a] = 0.0;
    sum += p[a];
  }
  require(std::abs(sum - 1.0) <= povm.completeness_residual + 1e-9,
          "measure: outcome mass deviates beyond completeness budget");
  for (double& v : p) v /= sum;
  return Distribution(std::move(p), povm.outcome_labels, povm.cell_width);
}

// Covariant phase measurement discretized on M grid angles theta_k = 2pi k/M:
// E_k = |v_k><v_k| / M with v_k(n) = e^{i n theta_k}. Complete exactly when
// M >= d. Outcomes carry the angle label and cell width 2pi/M.
inline Povm canonical_phase_povm(int d, int m_grid) {
  require(d >= 1, "phase povm: bad dimension");
  require(m_grid >= d, "phase povm: grid must have at least dim points");
  std::vector<Matrix> elems;
  std::vector<double> labels;
  elems.reserve(m_grid);
  for (int k = 0; k < m_grid; ++k) {
    const double theta = two_pi * k / m_grid;
    Vector v(d);
    for (int n = 0; n < d; ++n)
      v[n] = complex(std::cos(n * theta), std::sin(n * theta));
    elems.push_back(v * v.adjoint() / static_cast<double>(m_grid));
    labels.push_back(theta);
  }
  return Povm(std::move(elems), std::move(labels), two_pi / m_grid);
}

// Mutually unbiased pair: computational basis A and its discrete-Fourier
// partner B with <b|a> = d^{-1/2} e^{-2pi i a b / d}. The overlap constant is
// c = d, entering the uncertainty bound as log2(d).
struct MubPair {
  Matrix basis_a;
  Matrix basis_b;
  int d;
  double log2_c() const { return std::log2(static_cast<double>(d)); }
};

inline MubPair mub_pair_dft(int d) {
  require(d >= 2, "mub pair: dimension >= 2");
  Matrix f(d, d);
  const double root = 1.0 / std::sqrt(static_cast<double>(d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const double ang = two_pi * a * b / d;
      f(a, b) = root * complex(std::cos(ang), std::sin(ang));
    }
  return MubPair{Matrix::Identity(d, d), std::move(f), d};
}

// H(A) + H(B) >= S(rho) + log2 c. Slack must be nonnegative up to the
// caller's discretization budget.
struct EurReport {
  double h_a;
  double h_b;
  double entropy;
  double log2_c;
  double slack;
};

inline EurReport eur_slack(const DensityOperator& rho, const Povm& povm_a,
                           const Povm& povm_b, double log2_c) {
  const double ha = shannon_entropy(measure(rho, povm_a));
  const double hb = shannon_entropy(measure(rho, povm_b));
  const double s = von_neumann_entropy(rho);
  return EurReport{ha, hb, s, log2_c, ha + hb - s - log2_c};
}

inline EurReport mub_eur_slack(const DensityOperator& rho,
                               const MubPair& mub) {
  return eur_slack(rho, basis_povm(mub.basis_a), basis_povm(mub.basis_b),
                   mub.log2_c());
}

// Number-phase pair on a d-level mode: discrete number entropy vs
// differential phase entropy, bound log2(2pi).
inline EurReport number_phase_eur_slack(const DensityOperator& rho,
                                        int m_grid) {
  const Povm number = basis_povm(Matrix::Identity(rho.dim(), rho.dim()));
  const Povm phase = canonical_phase_povm(rho.dim(), m_grid);
  return eur_slack(rho, number, phase, std::log2(two_pi));
}

// ---------------------------------------------------------------------------
// Position / momentum discretization
// ---------------------------------------------------------------------------

// Odd-dimensional discretization of a continuous conjugate pair on length
// scale L: q_m = m L / sqrt(d), p_n = n 2pi hbar / (L sqrt(d)) for
// m, n = -r..r, d = 2r+1. The bases form a DFT MUB pair and the cell areas
// obey dq * dp = 2 pi hbar / d, so the discrete bound log2 d and the
// differential bound log2(2 pi hbar) are the same statement.
struct QpSystem {
  int d;
  double length;
  double hbar;
  double dq;
  double dp;
  Povm q_povm;
  Povm p_povm;
};

inline QpSystem qp_discretization(int d, double length, double hbar = 1.0) {
  require(d >= 3 && d % 2 == 1, "qp: odd dimension >= 3 required");
  require(length > 0.0 && hbar > 0.0, "qp: positive scales required");
  const int r = (d - 1) / 2;
  const double rd = std::sqrt(static_cast<double>(d));
  const double dq = length / rd;
  const double dp = two_pi * hbar / (length * rd);

  std::vector<double> q_labels(d), p_labels(d);
  for (int i = 0; i < d; ++i) {
    q_labels[i] = (i - r) * dq;
    p_labels[i] = (i - r) * dp;
  }

  Matrix p_basis(d, d);
  const double root = 1.0 / rd;
  for (int im = 0; im < d; ++im)
    for (int in = 0; in < d; ++in) {
      const double ang = two_pi * (im - r) * (in - r) / d;
      p_basis(im, in) = root * complex(std::cos(ang), std::sin(ang));
    }

  Povm q_povm = basis_povm(Matrix::Identity(d, d), q_labels, dq);
  Povm p_povm = basis_povm(p_basis, p_labels, dp);
  return QpSystem{d,  length, hbar, dq, dp, std::move(q_povm),
                  std::move(p_povm)};
}

// Discretized minimum-uncertainty Gaussian, sigma_q * sigma_p = hbar / 2.
inline DensityOperator gaussian_qp_state(const QpSystem& sys, double sigma_q) {
  require(sigma_q > 0.0, "gaussian: bad width");
  const int r = (sys.d - 1) / 2;
  Vector psi(sys.d);
  for (int i = 0; i < sys.d; ++i) {
    const double q = (i - r) * sys.dq;
    psi[i] = std::exp(-q * q / (4.0 * sigma_q * sigma_q));
  }
  return DensityOperator::pure(psi);
}

// Differential-entropy report for the discretized pair.
struct QpEurReport {
  EurReport differential;  // cell-width entropies, bound log2(2 pi hbar)
  EurReport discrete;      // counting entropies, bound log2 d
};

inline QpEurReport qp_eur_slack(const DensityOperator& rho,
                                const QpSystem& sys) {
  const EurReport diff =
      eur_slack(rho, sys.q_povm, sys.p_povm, std::log2(two_pi * sys.hbar));
  Povm q_disc(sys.q_povm.elements, {}, 0.0);
  Povm p_disc(sys.p_povm.elements, {}, 0.0);
  const EurReport disc = eur_slack(rho, q_disc, p_disc,
                                   std::log2(static_cast<double>(sys.d)));
  return QpEurReport{diff, disc};
}

// ---------------------------------------------------------------------------
// Degenerate-generator uncertainty relation
// ---------------------------------------------------------------------------

// Mode (x) auxiliary system, number read on the mode only, phase measured on
// the mode only. The conditional auxiliary entropies repair the bound:
// H(N) + H(Phi) >= log2(2pi) + S(rho) - sum_n p_n S(rho_aux|n).
struct DegenerateEurReport {
  double h_number;
  double h_phase;
  double entropy;
  double conditional_correction;
  double slack;
};

inline DegenerateEurReport degenerate_eur_slack(const DensityOperator& rho,
                                                int mode_dim, int aux_dim,
                                                int m_grid) {
  require(mode_dim * aux_dim == rho.dim(), "degenerate eur: bad factorization");
  const Povm phase =
      canonical_phase_povm(mode_dim, m_grid).tensor_identity(aux_dim);
  const double h_phi = shannon_entropy(measure(rho, phase));

  std::vector<double> p_n(mode_dim, 0.0);
  double correction = 0.0;
  for (int n = 0; n < mode_dim; ++n) {
    Matrix block(aux_dim, aux_dim);
    for (int a = 0; a < aux_dim; ++a)
      for (int b = 0; b < aux_dim; ++b)
        block(a, b) = rho.matrix()(n * aux_dim + a, n * aux_dim + b);
    p_n[n] = block.trace().real();
    if (p_n[n] < 0.0 && p_n[n] >= -1e-12) p_n[n] = 0.0;
    if (p_n[n] > tol::eigenvalue_floor)
      correction +=
          p_n[n] * von_neumann_entropy(DensityOperator(block / p_n[n]));
  }
  const double h_n = shannon_entropy(Distribution(p_n));
  const double s = von_neumann_entropy(rho);
  const double slack = h_n + h_phi - std::log2(two_pi) - s + correction;
  return DegenerateEurReport{h_n, h_phi, s, correction, slack};
}

// ---------------------------------------------------------------------------
// Oscillator energy-time pair
// ---------------------------------------------------------------------------

// Energies hbar*omega*n, time = phase/omega on one period tau = 2pi/omega.
// The slack is omega-independent and equals the number-phase slack.
struct EnergyTimeReport {
  double h_energy;
  double h_time;
  double entropy;
  double log2_tau;
  double slack;
};

inline EnergyTimeReport oscillator_energy_time_slack(
    const DensityOperator& rho, double omega, int m_grid, double hbar = 1.0) {
  require(omega > 0.0, "energy-time: omega > 0");
  const Povm number = basis_povm(Matrix::Identity(rho.dim(), rho.dim()));
  Distribution energies = measure(rho, number);
  for (std::size_t n = 0; n < energies.labels.size(); ++n)
    energies.labels[n] *= hbar * omega;
  const double h_e = shannon_entropy(energies);

  Distribution phase = measure(rho, canonical_phase_povm(rho.dim(), m_grid));
  phase.cell_width /= omega;  // t = theta / omega
  for (double& t : phase.labels) t /= omega;
  const double h_t = shannon_entropy(phase);

  const double log2_tau = std::log2(two_pi / omega);
  const double s = von_neumann_entropy(rho);
  return EnergyTimeReport{h_e, h_t, s, log2_tau, h_e + h_t - s - log2_tau};
}

// ---------------------------------------------------------------------------
// Almost-periodic time entropy
// ---------------------------------------------------------------------------

// For a pure superposition sum_n c_n |e_n> the time density
// p(t) = |sum_n c_n e^{-i e_n t / hbar}|^2 has unit time average; the entropy
// rate -avg(p log2 p) is approximated on a symmetric window with midpoint
// sampling. For commensurate spectra it reproduces H(T) - log2 tau.
inline double almost_periodic_entropy(const std::vector<complex>& amplitudes,
                                      const std::vector<double>& energies,
                                      double window, long long samples,
                                      double hbar = 1.0) {
  require(amplitudes.size() == energies.size(), "ap entropy: size mismatch");
  require(window > 0.0 && samples >= 2, "ap entropy: bad window");
  double norm = 0.0;
  for (const complex& c : amplitudes) norm += std::norm(c);
  require(std::abs(norm - 1.0) <= 1e-9, "ap entropy: amplitudes not normal");

  const double dt = 2.0 * window / static_cast<double>(samples);
  double avg = 0.0;
  std::vector<double> density(samples);
  for (long long i = 0; i < samples; ++i) {
    const double t = -window + (static_cast<double>(i) + 0.5) * dt;
    complex amp(0.0, 0.0);
    for (std::size_t n = 0; n < amplitudes.size(); ++n) {
      const double ang = -energies[n] * t / hbar;
      amp += amplitudes[n] * complex(std::cos(ang), std::sin(ang));
    }
    density[i] = std::norm(amp);
    avg += density[i];
  }
  avg /= static_cast<double>(samples);

  double h = 0.0;
  for (long long i = 0; i < samples; ++i) h -= xlog2x(density[i] / avg);
  return h / static_cast<double>(samples);
}

}  // namespace qmetro
