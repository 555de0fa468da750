#pragma once

#include "qmetro/qstate.hpp"

namespace qmetro {

// Classical-quantum signal source: state rho_x sent with probability
// prior(x). All states share one dimension.
struct SignalEnsemble {
  std::vector<DensityOperator> states;
  Distribution prior;

  SignalEnsemble(std::vector<DensityOperator> s, Distribution p)
      : states(std::move(s)), prior(std::move(p)) {
    require(!states.empty(), "ensemble: no states");
    require(prior.size() == states.size(), "ensemble: prior size mismatch");
    for (const auto& st : states)
      require(st.dim() == states.front().dim(),
              "ensemble: mixed dimensions");
  }

  int dim() const { return states.front().dim(); }
};

inline DensityOperator ensemble_state(const SignalEnsemble& e) {
  Matrix m = Matrix::Zero(e.dim(), e.dim());
  for (std::size_t x = 0; x < e.states.size(); ++x)
    m += e.prior.probs[x] * e.states[x].matrix();
  return DensityOperator(m);
}

// chi = S(rho_E) - sum_x p(x) S(rho_x). Upper-bounds the information any
// measurement can extract about x.
inline double holevo_chi(const SignalEnsemble& e) {
  double avg = 0.0;
  for (std::size_t x = 0; x < e.states.size(); ++x)
    avg += e.prior.probs[x] * von_neumann_entropy(e.states[x]);
  return von_neumann_entropy(ensemble_state(e)) - avg;
}

// Joint distribution p(x,a) of signal index x and outcome a, stored dense.
struct JointDistribution {
  RealMatrix p;  // rows: x, cols: a

  explicit JointDistribution(RealMatrix m) : p(std::move(m)) {
    double sum = 0.0;
    for (Eigen::Index x = 0; x < p.rows(); ++x)
      for (Eigen::Index a = 0; a < p.cols(); ++a) {
        if (p(x, a) < 0.0) {
          require(p(x, a) >= -tol::prob_sum, "joint: negative entry");
          p(x, a) = 0.0;
        }
        sum += p(x, a);
      }
    require(std::abs(sum - 1.0) <= 1e-9, "joint: entries do not sum to 1");
    p /= sum;
  }

  Distribution marginal_x() const {
    std::vector<double> m(p.rows());
    for (Eigen::Index x = 0; x < p.rows(); ++x) m[x] = p.row(x).sum();
    return Distribution(std::move(m));
  }

  Distribution marginal_a() const {
    std::vector<double> m(p.cols());
    for (Eigen::Index a = 0; a < p.cols(); ++a) m[a] = p.col(a).sum();
    return Distribution(std::move(m));
  }
};

// Joint from a prior and conditional outcome rows p(a|x).
inline JointDistribution joint_from_conditionals(
    const Distribution& prior, const std::vector<Distribution>& conditional) {
  require(conditional.size() == prior.size(), "joint: row count mismatch");
  const Eigen::Index cols =
      static_cast<Eigen::Index>(conditional.front().size());
  RealMatrix m(static_cast<Eigen::Index>(prior.size()), cols);
  for (std::size_t x = 0; x < prior.size(); ++x) {
    require(conditional[x].size() == static_cast<std::size_t>(cols),
            "joint: ragged conditionals");
    for (Eigen::Index a = 0; a < cols; ++a)
      m(static_cast<Eigen::Index>(x), a) =
          prior.probs[x] * conditional[x].probs[a];
  }
  return JointDistribution(std::move(m));
}

// Mutual information computed along two independent routes; both are kept so
// the agreement invariant stays checkable by callers.
struct MutualInformation {
  double entropy_route;       // H(X) + H(A) - H(X,A)
  double relative_entropy_route;  // sum_x p(x) H(p(a|x) || p(a))
  double value() const { return entropy_route; }
  double route_gap() const {
    return std::abs(entropy_route - relative_entropy_route);
  }
};

inline MutualInformation mutual_information(const JointDistribution& j) {
  const Distribution px = j.marginal_x();
  const Distribution pa = j.marginal_a();
  double h_joint = 0.0;
  for (Eigen::Index x = 0; x < j.p.rows(); ++x)
    for (Eigen::Index a = 0; a < j.p.cols(); ++a) h_joint -= xlog2x(j.p(x, a));
  const double route_a =
      shannon_entropy(px) + shannon_entropy(pa) - h_joint;

  double route_b = 0.0;
  for (Eigen::Index x = 0; x < j.p.rows(); ++x) {
    const double w = px.probs[x];
    if (w <= 0.0) continue;
    for (Eigen::Index a = 0; a < j.p.cols(); ++a) {
      const double cond = j.p(x, a) / w;
      if (cond <= 0.0) continue;
      // p(a) > 0 is implied by p(x,a) > 0.
      route_b += w * cond * std::log2(cond / pa.probs[a]);
    }
  }
  return MutualInformation{route_a, route_b};
}

// Outcome distribution of a POVM given as raw elements (plumbing shared with
// the measurement layer; tiny negative traces are clipped).
inline Distribution outcome_probabilities(const DensityOperator& rho,
                                          const std::vector<Matrix>& elements,
                                          std::vector<double> labels = {},
                                          double cell_width = 0.0) {
  std::vector<double> p(elements.size());
  for (std::size_t a = 0; a < elements.size(); ++a) {
    require(elements[a].rows() == rho.dim() &&
                elements[a].cols() == rho.dim(),
            "measure: element dimension mismatch");
    p[a] = (elements[a] * rho.matrix()).trace().real();
    if (p[a] < 0.0 && p[a] >= -1e-12) p[a] = 0.0;
  }
  return Distribution(std::move(p), std::move(labels), cell_width);
}

struct DataProcessingCheck {
  double quantum;    // S(rho1 || rho2)
  double classical;  // H(p1 || p2) after the POVM
  double slack;      // quantum - classical, >= -1e-9 (inf - inf treated as 0)
};

// Measurements cannot increase distinguishability: H(p1||p2) <= S(rho1||rho2).
inline DataProcessingCheck data_processing_check(
    const DensityOperator& rho1, const DensityOperator& rho2,
    const std::vector<Matrix>& povm_elements) {
  const double q = quantum_relative_entropy(rho1, rho2);
  const Distribution p1 = outcome_probabilities(rho1, povm_elements);
  const Distribution p2 = outcome_probabilities(rho2, povm_elements);
  const double c = classical_relative_entropy(p1, p2);
  double slack;
  if (std::isinf(q))
    slack = std::isinf(c) ? 0.0 : inf;
  else
    slack = q - c;  // c = +inf with finite q is a genuine violation: -inf
  return DataProcessingCheck{q, c, slack};
}

}  // namespace qmetro
