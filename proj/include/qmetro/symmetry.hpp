#pragma once

#include <map>

#include "qmetro/holevo.hpp"

namespace qmetro {

// Diagonal integer-valued observable: value_per_index[i] is the eigenvalue
// attached to computational basis index i. Degeneracy (several indices with
// one value) is the general case, e.g. a mode number operator on a composite
// space.
struct NumberObservable {
  std::vector<long long> value_per_index;

  explicit NumberObservable(std::vector<long long> v)
      : value_per_index(std::move(v)) {
    require(!value_per_index.empty(), "number observable: empty");
  }

  int dim() const { return static_cast<int>(value_per_index.size()); }

  // Single mode of dimension d: eigenvalue n on |n>.
  static NumberObservable single_mode(int d) {
    std::vector<long long> v(d);
    for (int n = 0; n < d; ++n) v[n] = n;
    return NumberObservable(std::move(v));
  }

  // Photon number of one designated mode on a product space, row-major index
  // convention (last factor fastest).
  static NumberObservable mode_number(const std::vector<int>& dims,
                                      int which) {
    long long total = 1;
    for (int d : dims) total *= d;
    require(which >= 0 && which < static_cast<int>(dims.size()),
            "mode number: bad mode index");
    long long right = 1;
    for (std::size_t f = which + 1; f < dims.size(); ++f) right *= dims[f];
    std::vector<long long> v(total);
    for (long long i = 0; i < total; ++i)
      v[i] = (i / right) % dims[which];
    return NumberObservable(std::move(v));
  }

  // Total photon number across all factors.
  static NumberObservable total_number(const std::vector<int>& dims) {
    long long total = 1;
    for (int d : dims) total *= d;
    std::vector<long long> v(total, 0);
    for (long long i = 0; i < total; ++i) {
      long long rest = i;
      for (std::size_t f = dims.size(); f-- > 0;) {
        v[i] += rest % dims[f];
        rest /= dims[f];
      }
    }
    return NumberObservable(std::move(v));
  }

  // Custom labels, e.g. photon numbers 2^n or shifted spin projections.
  static NumberObservable with_values(std::vector<long long> v) {
    return NumberObservable(std::move(v));
  }

  std::vector<long long> sorted_distinct() const {
    std::map<long long, bool> seen;
    for (long long v : value_per_index) seen[v] = true;
    std::vector<long long> out;
    out.reserve(seen.size());
    for (const auto& [v, _] : seen) out.push_back(v);
    return out;
  }
};

// Distribution of the observable's value: p(n) = tr[Pi_n rho].
inline Distribution number_distribution(const DensityOperator& rho,
                                        const NumberObservable& n) {
  require(n.dim() == rho.dim(), "number distribution: dimension mismatch");
  const std::vector<long long> values = n.sorted_distinct();
  std::map<long long, std::size_t> slot;
  for (std::size_t k = 0; k < values.size(); ++k) slot[values[k]] = k;
  std::vector<double> p(values.size(), 0.0);
  for (int i = 0; i < rho.dim(); ++i) {
    double w = rho.matrix()(i, i).real();
    if (w < 0.0 && w >= -1e-12) w = 0.0;
    p[slot[n.value_per_index[i]]] += w;
  }
  std::vector<double> labels(values.size());
  for (std::size_t k = 0; k < values.size(); ++k)
    labels[k] = static_cast<double>(values[k]);
  return Distribution(std::move(p), std::move(labels));
}

// Dephasing in the eigenbasis of n: rho_Phi = sum_n Pi_n rho Pi_n. Kills all
// coherences between distinct eigenvalues; idempotent and unital.
inline DensityOperator phase_twirl(const DensityOperator& rho,
                                   const NumberObservable& n) {
  require(n.dim() == rho.dim(), "phase twirl: dimension mismatch");
  Matrix m = rho.matrix();
  for (int i = 0; i < rho.dim(); ++i)
    for (int j = 0; j < rho.dim(); ++j)
      if (n.value_per_index[i] != n.value_per_index[j]) m(i, j) = 0.0;
  return DensityOperator(m);
}

// Phase-shifted state e^{-i n theta} rho e^{+i n theta}.
inline DensityOperator phase_shift(const DensityOperator& rho,
                                   const NumberObservable& n, double theta) {
  Matrix m = rho.matrix();
  for (int i = 0; i < rho.dim(); ++i)
    for (int j = 0; j < rho.dim(); ++j) {
      const double ang =
          -theta * static_cast<double>(n.value_per_index[i] -
                                       n.value_per_index[j]);
      m(i, j) *= complex(std::cos(ang), std::sin(ang));
    }
  return DensityOperator(m);
}

// Phase shift by the grid angle 2 pi k / m, reduced in exact integer
// arithmetic modulo m. Sparse spectra with huge values (2^40) keep full
// precision here where the real-angle path loses ~2^-9 rad to floating
// argument reduction.
inline DensityOperator phase_shift_grid(const DensityOperator& rho,
                                        const NumberObservable& n,
                                        long long k, long long m) {
  require(m >= 1, "phase shift grid: m >= 1");
  k = ((k % m) + m) % m;
  Matrix mat = rho.matrix();
  for (int i = 0; i < rho.dim(); ++i)
    for (int j = 0; j < rho.dim(); ++j) {
      const long long dv = n.value_per_index[i] - n.value_per_index[j];
      const long long r = (((-k * (((dv % m) + m) % m)) % m) + m) % m;
      const double ang = two_pi * static_cast<double>(r) / m;
      mat(i, j) *= complex(std::cos(ang), std::sin(ang));
    }
  return DensityOperator(mat);
}

// A_G for the phase group: entropy gained by erasing phase information.
inline double g_asymmetry_u1(const DensityOperator& rho,
                             const NumberObservable& n) {
  return von_neumann_entropy(phase_twirl(rho, n)) - von_neumann_entropy(rho);
}

struct AsymmetryBoundCheck {
  double asymmetry;
  double number_entropy;
  double slack;  // number_entropy - asymmetry, >= -1e-9
};

// A_G <= H(N|rho): erasing which-phase information cannot add more entropy
// than the number distribution holds.
inline AsymmetryBoundCheck asymmetry_number_entropy_bound_check(
    const DensityOperator& rho, const NumberObservable& n) {
  const double a = g_asymmetry_u1(rho, n);
  const double h = shannon_entropy(number_distribution(rho, n));
  return AsymmetryBoundCheck{a, h, h - a};
}

// Twirling the phase-shift ensemble average equals twirling the bare state:
// the residual Frobenius distance must vanish for any shift set and prior.
inline double ensemble_twirl_identity_check(const DensityOperator& rho,
                                            const NumberObservable& n,
                                            const std::vector<double>& thetas,
                                            const Distribution& prior) {
  require(thetas.size() == prior.size(),
          "twirl identity: prior size mismatch");
  Matrix avg = Matrix::Zero(rho.dim(), rho.dim());
  for (std::size_t k = 0; k < thetas.size(); ++k)
    avg += prior.probs[k] * phase_shift(rho, n, thetas[k]).matrix();
  const DensityOperator rho_e{avg};
  return frobenius_distance(phase_twirl(rho_e, n).matrix(),
                            phase_twirl(rho, n).matrix());
}

// Named construction: the two-mode superposition 2^{-1/2}(|n,0> + |0,n>) on
// (n+1)x(n+1), paired with the number operator of the shifted (first) mode,
// whose value distribution is {n: 1/2, 0: 1/2}.
struct NoonSystem {
  DensityOperator state;
  NumberObservable generator;
};

inline NoonSystem noon_system(int n) {
  require(n >= 1, "noon: n >= 1 required");
  const int d = n + 1;
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  psi[static_cast<Eigen::Index>(n) * d + 0] = 1.0 / std::sqrt(2.0);
  psi[0 * d + n] = 1.0 / std::sqrt(2.0);
  return NoonSystem{DensityOperator::pure(psi),
                    NumberObservable::mode_number({d, d}, 0)};
}

// ---------------------------------------------------------------------------
// Rotation group sector
// ---------------------------------------------------------------------------

// Block structure of a rotation representation: ordered blocks of spin j
// (stored as two_j) with a multiplicity each. Basis convention: blocks in
// declared order; within a block, multiplicity copies consecutively, each
// copy carrying 2j+1 states with m = j, j-1, ..., -j.
struct SpinBlock {
  int two_j;
  int multiplicity;
};

struct SpinDecomposition {
  std::vector<SpinBlock> blocks;

  explicit SpinDecomposition(std::vector<SpinBlock> b) : blocks(std::move(b)) {
    require(!blocks.empty(), "spin decomposition: empty");
    for (const auto& blk : blocks)
      require(blk.two_j >= 0 && blk.multiplicity >= 1,
              "spin decomposition: bad block");
  }

  int dim() const {
    int d = 0;
    for (const auto& b : blocks) d += (b.two_j + 1) * b.multiplicity;
    return d;
  }

  bool multiplicity_free() const {
    for (const auto& b : blocks)
      if (b.multiplicity != 1) return false;
    return true;
  }

  static SpinDecomposition single(int two_j) {
    return SpinDecomposition({SpinBlock{two_j, 1}});
  }
};

// Weight per block: p_b = tr[Pi_b rho] over the block's full span
// (multiplicity included). Labels carry two_j.
inline Distribution block_distribution(const DensityOperator& rho,
                                       const SpinDecomposition& dec) {
  require(dec.dim() == rho.dim(), "block distribution: dimension mismatch");
  std::vector<double> p(dec.blocks.size(), 0.0);
  std::vector<double> labels(dec.blocks.size());
  int offset = 0;
  for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
    const int span = (dec.blocks[b].two_j + 1) * dec.blocks[b].multiplicity;
    for (int i = 0; i < span; ++i) {
      double w = rho.matrix()(offset + i, offset + i).real();
      if (w < 0.0 && w >= -1e-12) w = 0.0;
      p[b] += w;
    }
    labels[b] = static_cast<double>(dec.blocks[b].two_j);
    offset += span;
  }
  return Distribution(std::move(p), std::move(labels));
}

// Rotation-group twirl for multiplicity-free representations:
// rho_G = sum_j p_j Pi_j / (2j+1). Representations with repeated copies of a
// spin are rejected rather than silently averaged.
inline DensityOperator so3_twirl(const DensityOperator& rho,
                                 const SpinDecomposition& dec) {
  require(dec.dim() == rho.dim(), "rotation twirl: dimension mismatch");
  require(dec.multiplicity_free(),
          "rotation twirl: unsupported multiplicity > 1");
  const Distribution pj = block_distribution(rho, dec);
  Matrix m = Matrix::Zero(rho.dim(), rho.dim());
  int offset = 0;
  for (std::size_t b = 0; b < dec.blocks.size(); ++b) {
    const int span = dec.blocks[b].two_j + 1;
    for (int i = 0; i < span; ++i)
      m(offset + i, offset + i) = pj.probs[b] / static_cast<double>(span);
    offset += span;
  }
  return DensityOperator(m);
}

// Closed form A_G = H(J-block) + <log2(2j+1)> - S(rho). For multiplicity-free
// representations this equals S(so3_twirl(rho)) - S(rho) exactly; for blocks
// with multiplicity it evaluates the same block-spectrum expression.
inline double g_asymmetry_so3(const DensityOperator& rho,
                              const SpinDecomposition& dec) {
  const Distribution pj = block_distribution(rho, dec);
  double avg_log_dim = 0.0;
  for (std::size_t b = 0; b < dec.blocks.size(); ++b)
    avg_log_dim +=
        pj.probs[b] * std::log2(static_cast<double>(dec.blocks[b].two_j + 1));
  return shannon_entropy(pj) + avg_log_dim - von_neumann_entropy(rho);
}

struct JmaxBoundCheck {
  double bound;      // log2(j_max+1)^2 - S(rho)
  double asymmetry;  // A_G
  double slack;      // bound - asymmetry, >= -1e-9
  bool equality;     // |slack| <= 1e-9 (p_j proportional to 2j+1 over a full
                     // integer chain from j = 0)
};

// A_G <= log2(j_max+1)^2 - S(rho), with j_max the largest spin carrying
// weight above the spectral floor.
inline JmaxBoundCheck jmax_asymmetry_bound(const DensityOperator& rho,
                                           const SpinDecomposition& dec) {
  const Distribution pj = block_distribution(rho, dec);
  double jmax = 0.0;
  for (std::size_t b = 0; b < dec.blocks.size(); ++b)
    if (pj.probs[b] > tol::eigenvalue_floor)
      jmax = std::max(jmax, 0.5 * static_cast<double>(dec.blocks[b].two_j));
  const double bound =
      2.0 * std::log2(jmax + 1.0) - von_neumann_entropy(rho);
  const double a = g_asymmetry_so3(rho, dec);
  const double slack = bound - a;
  return JmaxBoundCheck{bound, a, slack, std::abs(slack) <= 1e-9};
}

// Named construction: singlet of two qubits with only the first member
// rotated. The representation U (x) I decomposes as spin-1/2 with
// multiplicity 2; the basis is already block-ordered (irrep index slow,
// multiplicity fast) because U (x) I acts on the first tensor factor.
struct OneSidedSinglet {
  DensityOperator state;
  SpinDecomposition decomposition;
};

inline OneSidedSinglet one_sided_singlet() {
  Vector psi = Vector::Zero(4);
  psi[1] = 1.0 / std::sqrt(2.0);   // |0 1>
  psi[2] = -1.0 / std::sqrt(2.0);  // |1 0>
  return OneSidedSinglet{DensityOperator::pure(psi),
                         SpinDecomposition({SpinBlock{1, 2}})};
}

// ---------------------------------------------------------------------------
// Coupling of M qubits (M <= 4) to total-spin blocks
// ---------------------------------------------------------------------------

struct SpinCoupling {
  Matrix basis_change;  // columns: coupled basis vectors in product basis
  SpinDecomposition decomposition;
};

// Recursive Clebsch-Gordan construction, one qubit at a time. Blocks come out
// sorted by descending two_j; copies of equal j are merged into one block
// with the corresponding multiplicity, copies ordered as produced.
inline SpinCoupling couple_qubits(int m_qubits) {
  require(m_qubits >= 1 && m_qubits <= 4, "couple_qubits: supports 1..4");

  // Irrep under construction: two_j plus column vectors for m = j ... -j.
  struct Irrep {
    int two_j;
    std::vector<Vector> columns;
  };

  std::vector<Irrep> irreps;
  {
    Irrep base{1, {Vector::Zero(2), Vector::Zero(2)}};
    base.columns[0][0] = 1.0;  // |1/2, +1/2> = |0>
    base.columns[1][1] = 1.0;  // |1/2, -1/2> = |1>
    irreps.push_back(std::move(base));
  }

  for (int added = 1; added < m_qubits; ++added) {
    const int new_dim = 1 << (added + 1);
    std::vector<Irrep> next;
    for (const Irrep& ir : irreps) {
      const double j = 0.5 * ir.two_j;
      auto embed = [&](const Vector& v, int spin_up) {
        Vector out = Vector::Zero(new_dim);
        for (int i = 0; i < v.size(); ++i) out[2 * i + spin_up] = v[i];
        return out;
      };
      // j + 1/2 block always exists.
      {
        Irrep up{ir.two_j + 1, {}};
        for (int k = 0; k <= ir.two_j + 1; ++k) {
          const double m = j + 0.5 - k;
          Vector col = Vector::Zero(new_dim);
          const double cu = (j + m + 0.5) / (2.0 * j + 1.0);
          const double cd = (j - m + 0.5) / (2.0 * j + 1.0);
          if (k > 0)  // component |j, m - 1/2> (x) |down>... see below
            col += std::sqrt(cd) * embed(ir.columns[k - 1], 1);
          if (k <= ir.two_j)
            col += std::sqrt(cu) * embed(ir.columns[k], 0);
          up.columns.push_back(col);
        }
        next.push_back(std::move(up));
      }
      // j - 1/2 block for j > 0.
      if (ir.two_j >= 1) {
        Irrep down{ir.two_j - 1, {}};
        for (int k = 0; k <= ir.two_j - 1; ++k) {
          const double m = j - 0.5 - k;
          const double cu = (j + m + 0.5) / (2.0 * j + 1.0);
          const double cd = (j - m + 0.5) / (2.0 * j + 1.0);
          Vector col = -std::sqrt(cd) * embed(ir.columns[k + 1], 0) +
                       std::sqrt(cu) * embed(ir.columns[k], 1);
          down.columns.push_back(col);
        }
        next.push_back(std::move(down));
      }
    }
    irreps = std::move(next);
  }

  std::stable_sort(irreps.begin(), irreps.end(),
                   [](const Irrep& a, const Irrep& b) {
                     return a.two_j > b.two_j;
                   });

  const int dim = 1 << m_qubits;
  Matrix u(dim, dim);
  std::vector<SpinBlock> blocks;
  int col = 0;
  for (const Irrep& ir : irreps) {
    if (!blocks.empty() && blocks.back().two_j == ir.two_j)
      ++blocks.back().multiplicity;
    else
      blocks.push_back(SpinBlock{ir.two_j, 1});
    for (const Vector& v : ir.columns) u.col(col++) = v;
  }
  return SpinCoupling{std::move(u), SpinDecomposition(std::move(blocks))};
}

}  // namespace qmetro
