#pragma once

#include <algorithm>
#include <map>

#include "qmetro/common.hpp"

namespace qmetro {

// A discrete probability distribution. `labels` carries the numeric value of
// each outcome (photon number, angle, ...) and defaults to the index.
// `cell_width > 0` marks the distribution as a discretization of a continuous
// density with that cell size; entropies then report the differential value
// H_discrete + log2(cell_width).
struct Distribution {
  std::vector<double> probs;
  std::vector<double> labels;
  double cell_width = 0.0;

  Distribution() = default;

  explicit Distribution(std::vector<double> p, std::vector<double> l = {},
                        double cell = 0.0)
      : probs(std::move(p)), labels(std::move(l)), cell_width(cell) {
    if (labels.empty()) {
      labels.resize(probs.size());
      for (std::size_t i = 0; i < probs.size(); ++i)
        labels[i] = static_cast<double>(i);
    }
    require(labels.size() == probs.size(),
            "distribution: labels/probs size mismatch");
    double sum = 0.0;
    for (double& v : probs) {
      if (v < 0.0) {
        require(v >= -tol::prob_sum, "distribution: negative probability");
        v = 0.0;
      }
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-9,
            "distribution: probabilities sum to " + std::to_string(sum));
    // Accumulated roundoff from long measurement sums is divided out so that
    // downstream sums-to-one checks hold at machine precision.
    for (double& v : probs) v /= sum;
  }

  std::size_t size() const { return probs.size(); }

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) m += probs[i] * labels[i];
    return m;
  }

  double variance() const {
    const double m = mean();
    double v = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i)
      v += probs[i] * sq(labels[i] - m);
    return v;
  }

  double mean_abs() const {
    double m = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i)
      m += probs[i] * std::abs(labels[i]);
    return m;
  }

  bool integer_labels(double tolerance = 1e-9) const {
    for (std::size_t i = 0; i < probs.size(); ++i)
      if (probs[i] > 0.0 &&
          std::abs(labels[i] - std::round(labels[i])) > tolerance)
        return false;
    return true;
  }
};

// Entropy in bits. 0*log0 terms are skipped by branch. For cell_width > 0 the
// differential entropy H + log2(cell) is returned.
inline double shannon_entropy(const Distribution& d) {
  double h = 0.0;
  for (double p : d.probs) h -= xlog2x(p);
  if (d.cell_width > 0.0) h += std::log2(d.cell_width);
  return h;
}

// Relative entropy H(p||q) in bits; +inf when p puts weight where q has none
// (support detected via the spectral floor).
inline double classical_relative_entropy(const Distribution& p,
                                         const Distribution& q) {
  require(p.size() == q.size(), "relative entropy: size mismatch");
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.probs[i] <= tol::eigenvalue_floor) continue;
    if (q.probs[i] <= tol::eigenvalue_floor) return inf;
    h += p.probs[i] * std::log2(p.probs[i] / q.probs[i]);
  }
  return h;
}

inline Distribution uniform_distribution(std::size_t n, double cell = 0.0) {
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)), {},
                      cell);
}

inline Distribution point_mass(std::size_t n, std::size_t at) {
  std::vector<double> p(n, 0.0);
  p.at(at) = 1.0;
  return Distribution(std::move(p));
}

inline Distribution binomial_distribution(int m, double q) {
  require(m >= 1 && q > 0.0 && q < 1.0, "binomial: bad parameters");
  // Log-space evaluation: the direct recurrence underflows to an all-zero
  // vector once (1-q)^m drops below the smallest double (m ~ 1000, q ~ 0.9).
  std::vector<double> p(static_cast<std::size_t>(m) + 1);
  const double lg_m = std::lgamma(m + 1.0);
  const double lq = std::log(q), l1q = std::log1p(-q);
  for (int k = 0; k <= m; ++k)
    p[k] = std::exp(lg_m - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) +
                    k * lq + (m - k) * l1q);
  return Distribution(std::move(p));
}

// Geometric-type distribution p_n = (1-r) r^n truncated at n_max and
// renormalized by the (tiny) tail.
inline Distribution geometric_distribution(double r, int n_max) {
  require(r > 0.0 && r < 1.0 && n_max >= 1, "geometric: bad parameters");
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
  double sum = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    p[n] = (1.0 - r) * std::pow(r, n);
    sum += p[n];
  }
  for (double& v : p) v /= sum;
  return Distribution(std::move(p));
}

// Convolution of independent integer-valued distributions (labels must be
// consecutive integers starting at their minimum).
inline Distribution convolve(const Distribution& a, const Distribution& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] += a.probs[i] * b.probs[j];
  std::vector<double> labels(out.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    labels[k] = a.labels.front() + b.labels.front() + static_cast<double>(k);
  return Distribution(std::move(out), std::move(labels));
}

}  // namespace qmetro
