#pragma once

// JSON/CSV serialization for reports and input objects. Kept out of the core
// headers so the library itself has no serialization dependency; consumers
// need vendor/json.hpp on their include path.

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "qmetro/holevo.hpp"
#include "qmetro/metrology.hpp"
#include "qmetro/observables.hpp"

namespace qmetro {

using json = nlohmann::json;  // std::map storage: keys serialize sorted

// ---------------------------------------------------------------------------
// Matrices and states: complex entries as [re, im], data row-major.
// ---------------------------------------------------------------------------

inline json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      data.push_back({m(r, c).real(), m(r, c).imag()});
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

inline Matrix matrix_from_json(const json& j) {
  require(j.is_object() && j.contains("rows") && j.contains("cols") &&
              j.contains("data"),
          "matrix json: need rows/cols/data");
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  require(data.is_array() &&
              data.size() == static_cast<std::size_t>(rows * cols),
          "matrix json: data length mismatch");
  Matrix m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c, ++i) {
      const json& e = data[i];
      if (e.is_array()) {
        require(e.size() == 2, "matrix json: entry must be [re, im]");
        m(r, c) = complex(e[0].get<double>(), e[1].get<double>());
      } else {
        m(r, c) = complex(e.get<double>(), 0.0);
      }
    }
  return m;
}

inline json vector_to_json(const Vector& v) {
  json data = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    data.push_back({v[i].real(), v[i].imag()});
  return data;
}

inline Vector vector_from_json(const json& j) {
  require(j.is_array(), "vector json: expected array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (e.is_array()) {
      require(e.size() == 2, "vector json: entry must be [re, im]");
      v[static_cast<Eigen::Index>(i)] =
          complex(e[0].get<double>(), e[1].get<double>());
    } else {
      v[static_cast<Eigen::Index>(i)] = complex(e.get<double>(), 0.0);
    }
  }
  return v;
}

inline json to_json(const DensityOperator& rho) {
  return matrix_to_json(rho.matrix());
}

// Accepts either a density matrix object or a pure-state vector.
inline DensityOperator density_from_json(const json& j) {
  if (j.is_array()) return DensityOperator::pure(vector_from_json(j));
  return DensityOperator(matrix_from_json(j));
}

inline json to_json(const Distribution& d) {
  return json{{"cell_width", d.cell_width},
              {"labels", d.labels},
              {"probs", d.probs}};
}

inline Distribution distribution_from_json(const json& j) {
  std::vector<double> probs = j.at("probs").get<std::vector<double>>();
  std::vector<double> labels =
      j.contains("labels") ? j.at("labels").get<std::vector<double>>()
                           : std::vector<double>{};
  const double cell = j.value("cell_width", 0.0);
  if (labels.empty()) return Distribution(std::move(probs));
  return Distribution(std::move(probs), std::move(labels), cell);
}

inline json to_json(const SignalEnsemble& ens) {
  json states = json::array();
  for (const DensityOperator& rho : ens.states) states.push_back(to_json(rho));
  return json{{"prior", ens.prior.probs}, {"states", states}};
}

inline SignalEnsemble ensemble_from_json(const json& j) {
  std::vector<double> prior = j.at("prior").get<std::vector<double>>();
  std::vector<DensityOperator> states;
  for (const json& s : j.at("states")) states.push_back(density_from_json(s));
  return SignalEnsemble(std::move(states), Distribution(std::move(prior)));
}

inline json to_json(const Povm& p) {
  json elems = json::array();
  for (const Matrix& e : p.elements) elems.push_back(matrix_to_json(e));
  return json{{"cell_width", p.cell_width},
              {"completeness_residual", p.completeness_residual},
              {"elements", elems},
              {"outcome_labels", p.outcome_labels}};
}

inline Povm povm_from_json(const json& j, double residual_budget = 1e-6) {
  std::vector<Matrix> elems;
  for (const json& e : j.at("elements")) elems.push_back(matrix_from_json(e));
  std::vector<double> labels =
      j.contains("outcome_labels")
          ? j.at("outcome_labels").get<std::vector<double>>()
          : std::vector<double>{};
  return Povm(std::move(elems), std::move(labels), j.value("cell_width", 0.0),
              residual_budget);
}

inline json to_json(const SpinDecomposition& dec) {
  json blocks = json::array();
  for (const SpinBlock& b : dec.blocks)
    blocks.push_back(json{{"multiplicity", b.multiplicity},
                          {"two_j", b.two_j}});
  return json{{"blocks", blocks}};
}

inline SpinDecomposition spin_decomposition_from_json(const json& j) {
  std::vector<SpinBlock> blocks;
  for (const json& b : j.at("blocks"))
    blocks.push_back(SpinBlock{b.at("two_j").get<int>(),
                               b.at("multiplicity").get<int>()});
  return SpinDecomposition(std::move(blocks));
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json to_json(const CheckEntry& c) {
  return json{{"bound", c.bound},     {"name", c.name},
              {"pass", c.pass},       {"slack", c.slack},
              {"tolerance", c.tolerance}, {"value", c.value}};
}

inline json checks_to_json(const std::vector<CheckEntry>& checks) {
  json arr = json::array();
  for (const CheckEntry& c : checks) arr.push_back(to_json(c));
  return arr;
}

inline json to_json(const MutualInformation& mi) {
  return json{{"entropy_route", mi.entropy_route},
              {"relative_entropy_route", mi.relative_entropy_route},
              {"route_gap", mi.route_gap()}};
}

inline json to_json(const EstimationReport& r) {
  return json{{"asymmetry", r.asymmetry},
              {"checks", checks_to_json(r.checks)},
              {"chi_ensemble", r.chi_ensemble},
              {"h_err_unwrapped", r.h_err_unwrapped},
              {"h_err_wrapped", r.h_err_wrapped},
              {"h_number", r.h_number},
              {"h_prior", r.h_prior},
              {"l0", r.l0},
              {"l_err", r.l_err},
              {"mi_route_gap", r.mi_route_gap},
              {"mutual_info", r.mutual_info},
              {"rmse", r.rmse},
              {"wrap_differs", r.wrap_differs}};
}

inline json to_json(const RotationReport& r) {
  return json{{"asymmetry", r.asymmetry},
              {"checks", checks_to_json(r.checks)},
              {"chi_ensemble", r.chi_ensemble},
              {"completeness_residual", r.completeness_residual},
              {"h_err", r.h_err},
              {"h_err_inverse", r.h_err_inverse},
              {"h_prior", r.h_prior},
              {"mi_route_gap", r.mi_route_gap},
              {"mutual_info", r.mutual_info},
              {"v0", r.v0},
              {"v_err", r.v_err}};
}

inline json to_json(const RmsBoundReport& r) {
  return json{{"bound_entropy", r.bound_entropy},
              {"bound_mean", r.bound_mean},
              {"h_number", r.h_number},
              {"mean_number", r.mean_number},
              {"rmse", r.rmse},
              {"slack_entropy", r.slack_entropy},
              {"slack_mean", r.slack_mean}};
}

inline json to_json(const MowBoundReport& r) {
  return json{{"bound", r.bound},
              {"h", r.h},
              {"slack", r.slack},
              {"variance", r.variance}};
}

inline json to_json(const MultimodeBoundReport& r) {
  return json{{"h_total", r.h_total},
              {"mean_mode_sigma", r.mean_mode_sigma},
              {"modes", r.modes},
              {"sigma_total", r.sigma_total},
              {"vol_clt", r.vol_clt},
              {"vol_correlated", r.vol_correlated},
              {"vol_exact", r.vol_exact},
              {"vol_product", r.vol_product}};
}

inline json to_json(const FieldBoundReport& r) {
  return json{{"asymmetry", r.asymmetry},
              {"b_pi", r.b_pi},
              {"d_err_bound", r.d_err_bound},
              {"h_prior", r.h_prior},
              {"t_err_bound", r.t_err_bound},
              {"t_err_uniform_coeff", r.t_err_uniform_coeff},
              {"v0", r.v0}};
}

inline json to_json(const ScalingFit& f) {
  return json{{"m_values", f.m_values},
              {"t_err_bounds", f.t_err_bounds},
              {"t_err_slope", f.t_err_slope},
              {"volume_bounds", f.volume_bounds},
              {"volume_slope", f.volume_slope}};
}

inline json to_json(const EurReport& r) {
  return json{{"entropy", r.entropy},
              {"h_a", r.h_a},
              {"h_b", r.h_b},
              {"log2_c", r.log2_c},
              {"slack", r.slack}};
}

inline json to_json(const QpEurReport& r) {
  return json{{"differential", to_json(r.differential)},
              {"discrete", to_json(r.discrete)}};
}

inline json to_json(const DegenerateEurReport& r) {
  return json{{"conditional_correction", r.conditional_correction},
              {"entropy", r.entropy},
              {"h_number", r.h_number},
              {"h_phase", r.h_phase},
              {"slack", r.slack}};
}

inline json to_json(const EnergyTimeReport& r) {
  return json{{"entropy", r.entropy},
              {"h_energy", r.h_energy},
              {"h_time", r.h_time},
              {"log2_tau", r.log2_tau},
              {"slack", r.slack}};
}

inline json to_json(const DataProcessingCheck& r) {
  return json{{"classical", r.classical},
              {"quantum", r.quantum},
              {"slack", r.slack}};
}

inline json to_json(const AsymmetryBoundCheck& r) {
  return json{{"asymmetry", r.asymmetry},
              {"number_entropy", r.number_entropy},
              {"slack", r.slack}};
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open " + path);
  json j;
  in >> j;
  return j;
}

// Reports are written whole-or-not-at-all: tmp file in the target directory,
// then rename.
inline void atomic_write(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), "cannot write " + tmp.string());
    out << text;
    require(out.good(), "short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

inline std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

// Determinism comparisons must ignore the wall-clock stamp.
inline json strip_timestamp(json j) {
  j.erase("timestamp");
  return j;
}

// Minimal CSV table: header row plus one row per record. Fields containing
// separators are not expected and not quoted.
inline std::string csv_table(const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof(buf), "%.12g", row[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace qmetro
