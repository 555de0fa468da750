// qmetro: experiment runner. Every subcommand evaluates one family of
// information/uncertainty inequalities exactly on grids and emits a JSON
// report whose check entries alone determine the exit status:
//   0  all slacks >= -tolerance
//   1  configuration error
//   2  at least one violated inequality
// Reports are deterministic for a fixed config+seed up to the timestamp
// field.

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "qmetro/serialize.hpp"

namespace qm = qmetro;
using qm::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kSchema = "1";

// Subcommand -> verified quantity, printed by --list-experiments.
constexpr const char* kManifest[][2] = {
    {"chi", "Holevo information bound: chi = S(rho_E) - sum p(x) S(rho_x); "
            "measured mutual information <= chi"},
    {"mutual-info", "Shannon mutual information, dual-route (entropy sums vs "
                    "relative entropy), route agreement <= 1e-9"},
    {"asymmetry", "group asymmetry A_G = S(twirl(rho)) - S(rho) and its "
                  "resource bounds (number entropy / block dimension)"},
    {"phase-sim", "exact Bayesian phase estimation on a grid: information vs "
                  "asymmetry bound chain, error entropy, Gaussian RMSE link"},
    {"rotation-sim", "rotation estimation with a covariant seed measurement: "
                     "entropy drop <= asymmetry, inverse-error symmetry"},
    {"rotation-bounds", "field-direction error-volume and per-axis RMSE "
                        "floors; scaling slopes in the particle number"},
    {"mmode-bounds", "multimode total-number entropy floors: exact "
                     "convolution vs product/correlated/CLT envelopes"},
    {"eur-sweep", "entropic uncertainty relations: mub | number-phase | qp | "
                  "degenerate | oscillator | almost-periodic"},
    {"mow-check", "integer-variable entropy <= (1/2) log2(2 pi e (Var + "
                  "1/12))"},
    {"rms-check", "RMSE Heisenberg floors sqrt(2pi/e) 2^-H(N) and "
                  "sqrt(2pi/e^3)/(<N>+1) against simulated estimators"},
};

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Exit status must be derivable from the report alone: count every check
// object carrying "pass": false, at any depth.
int count_violations(const json& j) {
  int n = 0;
  if (j.is_object()) {
    if (j.contains("pass") && j.at("pass").is_boolean() &&
        !j.at("pass").get<bool>())
      ++n;
    for (const auto& kv : j.items()) n += count_violations(kv.value());
  } else if (j.is_array()) {
    for (const json& e : j) n += count_violations(e);
  }
  return n;
}

struct Output {
  std::string out_path;  // empty: stdout
  std::string csv_path;
};

void add_output_flags(CLI::App* cmd, Output& out) {
  cmd->add_option("--out", out.out_path,
                  "write the JSON report to this file (atomic)");
  cmd->add_option("--csv", out.csv_path, "write sweep rows as CSV");
}

std::string resolve_out(const std::string& path) {
  if (path.empty()) return path;
  const char* dir = std::getenv("QMETRO_OUT_DIR");
  if (dir != nullptr && *dir != '\0' &&
      !std::filesystem::path(path).is_absolute())
    return (std::filesystem::path(dir) / path).string();
  return path;
}

int emit(const std::string& command, json parameters, json results,
         const Output& out) {
  const int violations = count_violations(results);
  json report{{"command", command},
              {"library_version", kVersion},
              {"parameters", std::move(parameters)},
              {"results", std::move(results)},
              {"schema_version", kSchema},
              {"timestamp", now_iso8601()},
              {"violations", violations}};
  const std::string text = qm::dump_report(report);
  if (out.out_path.empty()) {
    std::cout << text;
  } else {
    qm::atomic_write(resolve_out(out.out_path), text);
  }
  return violations == 0 ? 0 : 2;
}

void write_csv(const Output& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (out.csv_path.empty()) return;
  qm::atomic_write(resolve_out(out.csv_path), qm::csv_table(header, rows));
}

json check_json(const std::string& name, double value, double bound,
                double slack, double tolerance) {
  return qm::to_json(qm::make_check(name, value, bound, slack, tolerance));
}

// ---------------------------------------------------------------------------
// Shared constructions
// ---------------------------------------------------------------------------

qm::SignalEnsemble bb84_ensemble() {
  auto ket = [](double a0, double a1) {
    qm::Vector v(2);
    v << qm::complex(a0, 0), qm::complex(a1, 0);
    return qm::DensityOperator::pure(v);
  };
  const double s = 1.0 / std::sqrt(2.0);
  return qm::SignalEnsemble(
      {ket(1, 0), ket(0, 1), ket(s, s), ket(s, -s)},
      qm::Distribution({0.25, 0.25, 0.25, 0.25}));
}

struct ProbeSpec {
  std::string kind = "uniform";  // uniform|number|noon|random|doubling|file
  int d = 8;
  int n = 4;        // noon excitation / number level
  int levels = 41;  // doubling: values 2^0 .. 2^{levels-1}
  int rank = 1;
  std::uint64_t seed = 1;
  std::string file;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--state,--probe", kind,
                    "uniform|number|noon|random|doubling|singlet|file")
        ->default_val(kind);
    cmd->add_option("--d", d, "single-mode dimension");
    cmd->add_option("--n", n, "noon excitation count / number level");
    cmd->add_option("--levels", levels, "doubling probe level count");
    cmd->add_option("--rank", rank, "random probe rank");
    cmd->add_option("--seed", seed, "random probe seed");
    cmd->add_option("--state-file", file, "JSON state file");
  }

  std::pair<qm::DensityOperator, qm::NumberObservable> build() const {
    if (kind == "noon") {
      qm::NoonSystem sys = qm::noon_system(n);
      return {std::move(sys.state), std::move(sys.generator)};
    }
    if (kind == "uniform") {
      qm::Vector v = qm::Vector::Constant(d, qm::complex(1.0, 0.0));
      return {qm::DensityOperator::pure(v),
              qm::NumberObservable::single_mode(d)};
    }
    if (kind == "number") {
      qm::require(n >= 0 && n < d, "probe: level outside dimension");
      qm::Vector v = qm::Vector::Zero(d);
      v[n] = 1.0;
      return {qm::DensityOperator::pure(v),
              qm::NumberObservable::single_mode(d)};
    }
    if (kind == "random") {
      qm::Rng rng(seed);
      return {qm::random_density(d, rank, rng),
              qm::NumberObservable::single_mode(d)};
    }
    if (kind == "doubling") {
      // Amplitudes sqrt(3)/2 * 2^-k on number levels 2^k: divergent number
      // variance with mean 3/2, the canonical poor-resolution probe.
      qm::require(levels >= 1 && levels <= 41, "probe: levels in 1..41");
      qm::Vector v(levels);
      std::vector<long long> values(levels);
      for (int k = 0; k < levels; ++k) {
        v[k] = std::sqrt(0.75) * std::pow(2.0, -k);
        values[k] = 1LL << k;
      }
      return {qm::DensityOperator::pure(v),
              qm::NumberObservable::with_values(std::move(values))};
    }
    if (kind == "file") {
      const json j = qm::read_json_file(file);
      qm::DensityOperator rho = qm::density_from_json(
          j.contains("state") ? j.at("state") : j);
      qm::NumberObservable gen =
          j.contains("values")
              ? qm::NumberObservable::with_values(
                    j.at("values").get<std::vector<long long>>())
              : qm::NumberObservable::single_mode(rho.dim());
      return {std::move(rho), std::move(gen)};
    }
    qm::fail("probe: unknown kind " + kind);
  }

  json echo() const {
    return json{{"probe", kind},   {"d", d},       {"n", n},
                {"levels", levels}, {"rank", rank}, {"seed", seed},
                {"state_file", file}};
  }
};

qm::Estimator parse_estimator(const std::string& s) {
  if (s == "identity") return qm::Estimator::identity;
  if (s == "map") return qm::Estimator::map;
  if (s == "posterior-mean") return qm::Estimator::posterior_mean;
  qm::fail("unknown estimator " + s);
}

qm::Distribution named_distribution(const std::string& family, int d,
                                    double q, double r, int nmax) {
  if (family == "point")
    return qm::point_mass(static_cast<std::size_t>(std::max(d, 1)), 0);
  if (family == "uniform") return qm::uniform_distribution(d);
  if (family == "binomial") return qm::binomial_distribution(d - 1, q);
  if (family == "geometric") return qm::geometric_distribution(r, nmax);
  qm::fail("unknown distribution family " + family);
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

int run_chi(const std::string& ensemble_file, const std::string& named,
            const std::string& povm_file, const Output& out) {
  qm::require(!named.empty() || !ensemble_file.empty(),
              "chi: need --ensemble or --named");
  qm::require(named.empty() || named == "bb84",
              "chi: unknown named ensemble " + named);
  qm::SignalEnsemble ens =
      named == "bb84"
          ? bb84_ensemble()
          : qm::ensemble_from_json(qm::read_json_file(ensemble_file));
  const double chi = qm::holevo_chi(ens);
  const qm::DensityOperator rho_e = qm::ensemble_state(ens);

  json results{{"chi", chi},
               {"ensemble_entropy", qm::von_neumann_entropy(rho_e)}};
  json per_state = json::array();
  for (const auto& s : ens.states)
    per_state.push_back(qm::von_neumann_entropy(s));
  results["state_entropies"] = per_state;

  json checks = json::array();
  if (!povm_file.empty()) {
    const qm::Povm povm =
        qm::povm_from_json(qm::read_json_file(povm_file), 1e-6);
    std::vector<qm::Distribution> conds;
    conds.reserve(ens.states.size());
    for (const auto& s : ens.states) conds.push_back(qm::measure(s, povm));
    const qm::JointDistribution joint =
        qm::joint_from_conditionals(ens.prior, conds);
    const qm::MutualInformation mi = qm::mutual_information(joint);
    results["mutual_information"] = qm::to_json(mi);
    checks.push_back(check_json("information_vs_chi", mi.value(), chi,
                                chi - mi.value(), 1e-9));
    checks.push_back(check_json("route_agreement", mi.route_gap(), 1e-9,
                                1e-9 - mi.route_gap(), 0.0));
  }
  results["checks"] = checks;
  json params{{"ensemble_file", ensemble_file},
              {"named", named},
              {"povm_file", povm_file}};
  return emit("chi", params, results, out);
}

int run_mutual_info(const std::string& joint_file,
                    const std::string& ensemble_file,
                    const std::string& povm_file, const Output& out) {
  qm::JointDistribution joint = [&] {
    if (!joint_file.empty()) {
      const qm::Matrix m = qm::matrix_from_json(qm::read_json_file(joint_file));
      return qm::JointDistribution(m.real());
    }
    qm::require(!ensemble_file.empty() && !povm_file.empty(),
                "mutual-info: need --joint or --ensemble + --povm");
    const qm::SignalEnsemble ens =
        qm::ensemble_from_json(qm::read_json_file(ensemble_file));
    const qm::Povm povm =
        qm::povm_from_json(qm::read_json_file(povm_file), 1e-6);
    std::vector<qm::Distribution> conds;
    for (const auto& s : ens.states) conds.push_back(qm::measure(s, povm));
    return qm::joint_from_conditionals(ens.prior, conds);
  }();
  const qm::MutualInformation mi = qm::mutual_information(joint);
  json results{{"mutual_information", qm::to_json(mi)}};
  results["checks"] = json::array({check_json("route_agreement",
                                              mi.route_gap(), 1e-9,
                                              1e-9 - mi.route_gap(), 0.0)});
  json params{{"joint_file", joint_file},
              {"ensemble_file", ensemble_file},
              {"povm_file", povm_file}};
  return emit("mutual-info", params, results, out);
}

int run_asymmetry(const std::string& group, const ProbeSpec& probe,
                  int two_j, const std::string& blocks_file,
                  const Output& out) {
  json results;
  if (group == "u1") {
    auto [rho, gen] = probe.build();
    const qm::AsymmetryBoundCheck chk =
        qm::asymmetry_number_entropy_bound_check(rho, gen);
    results["asymmetry"] = chk.asymmetry;
    results["number_entropy"] = chk.number_entropy;
    results["state_entropy"] = qm::von_neumann_entropy(rho);
    results["checks"] = json::array(
        {check_json("asymmetry_vs_number_entropy", chk.asymmetry,
                    chk.number_entropy, chk.slack, 1e-9)});
  } else if (group == "so3") {
    qm::DensityOperator rho = [&] {
      if (probe.kind == "singlet") return qm::one_sided_singlet().state;
      if (probe.kind == "file")
        return qm::density_from_json(qm::read_json_file(probe.file));
      // pure |j, j> by default
      qm::Vector v = qm::Vector::Zero(two_j + 1);
      v[0] = 1.0;
      return qm::DensityOperator::pure(v);
    }();
    const qm::SpinDecomposition dec = [&] {
      if (probe.kind == "singlet") return qm::one_sided_singlet().decomposition;
      if (!blocks_file.empty())
        return qm::spin_decomposition_from_json(
            qm::read_json_file(blocks_file));
      return qm::SpinDecomposition::single(two_j);
    }();
    const double asym = qm::g_asymmetry_so3(rho, dec);
    results["asymmetry"] = asym;
    results["state_entropy"] = qm::von_neumann_entropy(rho);
    const qm::JmaxBoundCheck jb = qm::jmax_asymmetry_bound(rho, dec);
    results["jmax_bound"] = jb.bound;
    results["checks"] = json::array(
        {check_json("asymmetry_vs_jmax_dimension", asym, jb.bound, jb.slack,
                    1e-9)});
  } else {
    qm::fail("asymmetry: group must be u1 or so3");
  }
  json params = probe.echo();
  params["group"] = group;
  params["two_j"] = two_j;
  params["blocks_file"] = blocks_file;
  return emit("asymmetry", params, results, out);
}

int run_phase_sim(const ProbeSpec& probe, int prior_grid, int povm_grid,
                  double sigma, const std::string& estimator, int threads,
                  double link_tol, const Output& out) {
  auto [rho, gen] = probe.build();
  qm::PhaseEstimationTask task(std::move(rho), std::move(gen), prior_grid,
                               povm_grid, sigma, parse_estimator(estimator),
                               link_tol);
  task.threads = threads;
  const qm::EstimationReport rep = qm::simulate_phase_estimation(task);
  json params = probe.echo();
  params["prior_grid"] = prior_grid;
  params["povm_grid"] = povm_grid;
  params["prior_sigma"] = sigma;
  params["estimator"] = estimator;
  params["link_tolerance"] = link_tol;
  params["threads"] = threads;
  return emit("phase-sim", params, qm::to_json(rep), out);
}

int run_rotation_sim(int two_j, int prior_n, int povm_n,
                     const std::string& estimator, int threads,
                     double link_tol, const std::string& state_file,
                     const Output& out) {
  qm::DensityOperator rho = [&] {
    if (!state_file.empty())
      return qm::density_from_json(qm::read_json_file(state_file));
    qm::Vector psi = qm::Vector::Zero(two_j + 1);
    psi[0] = 1.0;  // |j, j>
    return qm::DensityOperator::pure(psi);
  }();
  qm::RotationTask task(two_j, std::move(rho), qm::GroupGrid(prior_n, prior_n, prior_n),
                        qm::GroupGrid(povm_n, povm_n, povm_n),
                        parse_estimator(estimator), link_tol);
  task.threads = threads;
  const qm::RotationReport rep = qm::simulate_rotation_estimation(task);
  json params{{"two_j", two_j},        {"prior_grid", prior_n},
              {"povm_grid", povm_n},   {"estimator", estimator},
              {"link_tolerance", link_tol}, {"threads", threads},
              {"state_file", state_file}};
  return emit("rotation-sim", params, qm::to_json(rep), out);
}

int run_rotation_bounds(double mu, double t_int, int two_j, int m_spins,
                        int sweep_max, const Output& out) {
  json results;
  const qm::FieldBoundReport rep = qm::magnetic_field_bounds(
      qm::MagneticFieldSpec{mu, t_int, two_j, m_spins});
  results["bounds"] = qm::to_json(rep);
  // The uniform-ball coefficient has the closed form (pi e^3 / 6)^{-1/6}.
  const double coeff_exact =
      std::pow(qm::pi * std::exp(3.0) / 6.0, -1.0 / 6.0);
  results["checks"] = json::array(
      {check_json("uniform_ball_coefficient", rep.t_err_uniform_coeff,
                  coeff_exact,
                  -std::abs(rep.t_err_uniform_coeff - coeff_exact), 5e-5)});
  std::vector<std::vector<double>> rows;
  if (sweep_max >= 2) {
    std::vector<int> ms(sweep_max);
    for (int i = 0; i < sweep_max; ++i) ms[i] = i + 1;
    const qm::ScalingFit fit = qm::field_bound_scaling(mu, t_int, two_j, ms);
    results["scaling"] = qm::to_json(fit);
    for (std::size_t i = 0; i < ms.size(); ++i)
      rows.push_back({static_cast<double>(ms[i]), fit.volume_bounds[i],
                      fit.t_err_bounds[i]});
    write_csv(out, {"m_spins", "volume_bound", "t_err_bound"}, rows);
  }
  json params{{"mu", mu},
              {"t_int", t_int},
              {"two_j", two_j},
              {"m_spins", m_spins},
              {"sweep_max", sweep_max}};
  return emit("rotation-bounds", params, results, out);
}

int run_mmode_bounds(const std::string& family, int d, double q, double r,
                     int nmax, int modes, const Output& out) {
  const qm::Distribution per_mode = named_distribution(family, d, q, r, nmax);
  const qm::MultimodeBoundReport rep = qm::multimode_bounds(per_mode, modes);
  json results = qm::to_json(rep);
  const qm::MowBoundReport mow = qm::mow_bound_check(
      [&] {
        qm::Distribution total = per_mode;
        for (int m = 1; m < modes; ++m) total = qm::convolve(total, per_mode);
        return total;
      }());
  json checks = json::array();
  checks.push_back(check_json("total_entropy_vs_variance_cap", mow.h,
                              mow.bound, mow.slack, 1e-9));
  checks.push_back(check_json("product_vs_correlated_floor_order",
                              rep.vol_correlated, rep.vol_product,
                              rep.vol_product - rep.vol_correlated, 1e-15));
  results["checks"] = checks;
  json params{{"family", family}, {"d", d},       {"q", q},
              {"r", r},           {"nmax", nmax}, {"modes", modes}};
  return emit("mmode-bounds", params, results, out);
}

int run_mow_check(const std::string& family, int d, double q, double r,
                  int nmax, const std::string& file, const Output& out) {
  const qm::Distribution dist =
      file.empty() ? named_distribution(family, d, q, r, nmax)
                   : qm::distribution_from_json(qm::read_json_file(file));
  const qm::MowBoundReport rep = qm::mow_bound_check(dist);
  json results = qm::to_json(rep);
  results["checks"] = json::array({check_json(
      "entropy_vs_variance_cap", rep.h, rep.bound, rep.slack, 1e-9)});
  json params{{"family", family}, {"d", d},       {"q", q},
              {"r", r},           {"nmax", nmax}, {"dist_file", file}};
  return emit("mow-check", params, results, out);
}

int run_rms_check(const ProbeSpec& probe, int grid, int threads,
                  const Output& out) {
  auto [rho, gen] = probe.build();
  const qm::Distribution number = qm::number_distribution(rho, gen);
  json estimators = json::array();
  json checks = json::array();
  for (const char* est : {"identity", "map", "posterior-mean"}) {
    qm::PhaseEstimationTask task(rho, gen, grid, grid, 0.0,
                                 parse_estimator(est), 5e-2);
    task.threads = threads;
    const qm::EstimationReport rep = qm::simulate_phase_estimation(task);
    const qm::RmsBoundReport rms = qm::rms_heisenberg_check(number, rep.rmse);
    json entry = qm::to_json(rms);
    entry["estimator"] = est;
    estimators.push_back(entry);
    checks.push_back(check_json(std::string("rmse_vs_entropy_floor_") + est,
                                rms.rmse, rms.bound_entropy,
                                rms.slack_entropy, 0.0));
    checks.push_back(check_json(std::string("rmse_vs_mean_floor_") + est,
                                rms.rmse, rms.bound_mean, rms.slack_mean,
                                0.0));
  }
  json results{{"h_number", qm::shannon_entropy(number)},
               {"mean_number", number.mean()},
               {"estimators", estimators},
               {"checks", checks}};
  json params = probe.echo();
  params["grid"] = grid;
  params["threads"] = threads;
  return emit("rms-check", params, results, out);
}

int run_eur_sweep(const std::string& pair, int d, int samples,
                  std::uint64_t seed, int grid, int aux, double omega,
                  double length, double window, int time_samples,
                  double tolerance, const Output& out) {
  json results;
  std::vector<std::vector<double>> rows;  // seed, d, M, slack
  double min_slack = qm::inf;
  std::uint64_t min_slack_seed = seed;  // identifies the offending state
  json extra_checks = json::array();

  auto record = [&](std::uint64_t s, int dim, int m, double slack) {
    rows.push_back({static_cast<double>(s), static_cast<double>(dim),
                    static_cast<double>(m), slack});
    if (slack < min_slack) {
      min_slack = slack;
      min_slack_seed = s;
    }
  };

  if (pair == "mub") {
    if (tolerance < 0) tolerance = 1e-9;
    const qm::MubPair mub = qm::mub_pair_dft(d);
    for (int i = 0; i < samples; ++i) {
      const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
      qm::Rng rng(s);
      const auto rho = qm::random_density(d, 1 + (i % d), rng);
      record(s, d, d, qm::mub_eur_slack(rho, mub).slack);
    }
  } else if (pair == "number-phase") {
    if (tolerance < 0) tolerance = 5e-3;
    const int m = grid > 0 ? grid : 16 * d;
    for (int i = 0; i < samples; ++i) {
      const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
      qm::Rng rng(s);
      const auto rho = qm::random_density(d, 1 + (i % d), rng);
      record(s, d, m, qm::number_phase_eur_slack(rho, m).slack);
    }
  } else if (pair == "qp") {
    if (tolerance < 0) tolerance = 1e-3;
    qm::require(d % 2 == 1, "eur-sweep qp: d must be odd");
    const double L = length > 0 ? length : std::sqrt(qm::two_pi);
    const qm::QpSystem sys = qm::qp_discretization(d, L);
    double min_discrete = qm::inf;
    for (int i = 0; i < samples; ++i) {
      const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
      qm::Rng rng(s);
      const auto rho = qm::random_density(d, 1 + (i % d), rng);
      const qm::QpEurReport rep = qm::qp_eur_slack(rho, sys);
      record(s, d, d, rep.differential.slack);
      min_discrete = std::min(min_discrete, rep.discrete.slack);
    }
    extra_checks.push_back(check_json("min_discrete_slack", min_discrete,
                                      -1e-9, min_discrete + 1e-9, 0.0));
  } else if (pair == "degenerate") {
    if (tolerance < 0) tolerance = 5e-3;
    const int m = grid > 0 ? grid : 16 * d;
    for (int i = 0; i < samples; ++i) {
      const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
      qm::Rng rng(s);
      const auto rho = qm::random_density(d * aux, 1 + (i % (d * aux)), rng);
      record(s, d, m, qm::degenerate_eur_slack(rho, d, aux, m).slack);
    }
  } else if (pair == "oscillator") {
    if (tolerance < 0) tolerance = 5e-3;
    const int m = grid > 0 ? grid : 16 * d;
    double max_omega_dependence = 0.0;
    for (int i = 0; i < samples; ++i) {
      const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
      qm::Rng rng(s);
      const auto rho = qm::random_density(d, 1 + (i % d), rng);
      const auto rep = qm::oscillator_energy_time_slack(rho, omega, m);
      const auto rep2 =
          qm::oscillator_energy_time_slack(rho, 2.0 * omega, m);
      max_omega_dependence =
          std::max(max_omega_dependence, std::abs(rep.slack - rep2.slack));
      record(s, d, m, rep.slack);
    }
    extra_checks.push_back(check_json("omega_independence",
                                      max_omega_dependence, 1e-12,
                                      1e-12 - max_omega_dependence, 0.0));
  } else if (pair == "almost-periodic") {
    if (tolerance < 0) tolerance = 1e-2;
    // Pure three-level states on the incommensurate spectrum {0, 1, sqrt 2}:
    // H(E) + H_ap >= S = 0.
    const std::vector<double> energies{0.0, 1.0, std::numbers::sqrt2};
    for (int i = 0; i < samples; ++i) {
      const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
      qm::Rng rng(s);
      qm::Vector c = qm::random_pure_vector(3, rng);
      std::vector<qm::complex> amps{c[0], c[1], c[2]};
      const double h_ap = qm::almost_periodic_entropy(
          amps, energies, window, time_samples);
      std::vector<double> probs{std::norm(c[0]), std::norm(c[1]),
                                std::norm(c[2])};
      const double h_e = qm::shannon_entropy(qm::Distribution(probs));
      record(s, 3, time_samples, h_e + h_ap);
    }
  } else {
    qm::fail("eur-sweep: unknown pair " + pair);
  }

  write_csv(out, {"seed", "d", "m", "slack"}, rows);
  results["min_slack"] = min_slack;
  results["min_slack_seed"] = min_slack_seed;
  results["samples"] = samples;
  results["tolerance"] = tolerance;
  json checks = json::array({check_json("min_slack_vs_tolerance", min_slack,
                                        -tolerance, min_slack + tolerance,
                                        0.0)});
  for (const json& c : extra_checks) checks.push_back(c);
  results["checks"] = checks;
  json params{{"pair", pair},       {"d", d},
              {"samples", samples}, {"seed", seed},
              {"grid", grid},       {"aux", aux},
              {"omega", omega},     {"length", length},
              {"window", window},   {"time_samples", time_samples}};
  return emit("eur-sweep", params, results, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"information bounds and uncertainty-relation experiment "
               "runner"};
  app.require_subcommand(0, 1);
  bool list_experiments = false;
  app.add_flag("--list-experiments", list_experiments,
               "print the subcommand -> verified-quantity manifest");

  // chi
  auto* chi = app.add_subcommand("chi", "Holevo information bound");
  std::string chi_ensemble, chi_named, chi_povm;
  Output chi_out;
  chi->add_option("--ensemble", chi_ensemble, "ensemble JSON file");
  chi->add_option("--named", chi_named, "named ensemble: bb84");
  chi->add_option("--povm", chi_povm, "POVM JSON file (adds MI check)");
  add_output_flags(chi, chi_out);

  // mutual-info
  auto* mi = app.add_subcommand("mutual-info", "dual-route MI");
  std::string mi_joint, mi_ensemble, mi_povm;
  Output mi_out;
  mi->add_option("--joint", mi_joint, "joint distribution JSON (matrix)");
  mi->add_option("--ensemble", mi_ensemble, "ensemble JSON file");
  mi->add_option("--povm", mi_povm, "POVM JSON file");
  add_output_flags(mi, mi_out);

  // asymmetry
  auto* asym = app.add_subcommand("asymmetry", "group asymmetry A_G");
  std::string asym_group = "u1", asym_blocks;
  int asym_two_j = 1;
  ProbeSpec asym_probe;
  Output asym_out;
  asym->add_option("--group", asym_group, "u1|so3")->default_val("u1");
  asym->add_option("--two-j", asym_two_j, "doubled spin for so3");
  asym->add_option("--blocks", asym_blocks, "spin decomposition JSON");
  asym_probe.add_flags(asym);
  add_output_flags(asym, asym_out);

  // phase-sim
  auto* ps = app.add_subcommand("phase-sim", "exact phase estimation");
  ProbeSpec ps_probe;
  int ps_prior = 256, ps_povm = 256, ps_threads = 1;
  double ps_sigma = 0.0, ps_link = 5e-2;
  std::string ps_estimator = "identity";
  Output ps_out;
  ps_probe.add_flags(ps);
  ps->add_option("--prior-grid", ps_prior, "prior grid size K");
  ps->add_option("--povm-grid", ps_povm, "measurement grid size M");
  ps->add_option("--prior-sigma", ps_sigma,
                 "truncated-Gaussian prior width (0 = uniform)");
  ps->add_option("--estimator", ps_estimator,
                 "identity|map|posterior-mean");
  ps->add_option("--threads", ps_threads, "worker threads");
  ps->add_option("--link-tol", ps_link, "binning tolerance for off-grid "
                                        "estimators");
  add_output_flags(ps, ps_out);

  // rotation-sim
  auto* rs = app.add_subcommand("rotation-sim", "SO(3) estimation");
  int rs_two_j = 1, rs_prior = 8, rs_povm = 16, rs_threads = 1;
  double rs_link = 5e-2;
  std::string rs_estimator = "map", rs_state;
  Output rs_out;
  rs->add_option("--two-j", rs_two_j, "doubled spin (1..4)");
  rs->add_option("--prior-grid", rs_prior, "prior Euler grid n (n^3 cells)");
  rs->add_option("--povm-grid", rs_povm, "POVM Euler grid n");
  rs->add_option("--estimator", rs_estimator, "identity|map");
  rs->add_option("--threads", rs_threads, "worker threads");
  rs->add_option("--link-tol", rs_link, "grid tolerance for entropy links");
  rs->add_option("--state-file", rs_state, "probe vector JSON");
  add_output_flags(rs, rs_out);

  // rotation-bounds
  auto* rb = app.add_subcommand("rotation-bounds", "field bound calculator");
  double rb_mu = 1.0, rb_t = 1.0;
  int rb_two_j = 1, rb_m = 1, rb_sweep = 0;
  Output rb_out;
  rb->add_option("--mu", rb_mu, "gyromagnetic scale");
  rb->add_option("--t-int", rb_t, "interrogation time");
  rb->add_option("--two-j", rb_two_j, "doubled per-particle spin");
  rb->add_option("--m-spins", rb_m, "particle count");
  rb->add_option("--sweep-max", rb_sweep,
                 "also sweep m = 1..sweep-max and fit slopes");
  add_output_flags(rb, rb_out);

  // mmode-bounds
  auto* mm = app.add_subcommand("mmode-bounds", "multimode volume floors");
  std::string mm_family = "binomial";
  int mm_d = 2, mm_nmax = 64, mm_modes = 8;
  double mm_q = 0.5, mm_r = 0.5;
  Output mm_out;
  mm->add_option("--family", mm_family, "point|uniform|binomial|geometric");
  mm->add_option("--d", mm_d, "per-mode dimension");
  mm->add_option("--q", mm_q, "binomial success probability");
  mm->add_option("--r", mm_r, "geometric ratio");
  mm->add_option("--nmax", mm_nmax, "geometric truncation");
  mm->add_option("--modes", mm_modes, "mode count M");
  add_output_flags(mm, mm_out);

  // eur-sweep
  auto* eur = app.add_subcommand("eur-sweep", "uncertainty-relation sweeps");
  std::string eur_pair = "mub";
  int eur_d = 8, eur_samples = 100, eur_grid = 0, eur_aux = 2,
      eur_tsamples = 20001;
  std::uint64_t eur_seed = 7;
  double eur_omega = 1.0, eur_length = 0.0, eur_window = 1000.0,
         eur_tol = -1.0;
  Output eur_out;
  eur->add_option("--pair", eur_pair,
                  "mub|number-phase|qp|degenerate|oscillator|almost-periodic");
  eur->add_option("--dim", eur_d, "state dimension");
  eur->add_option("--samples", eur_samples, "random states to draw");
  eur->add_option("--seed", eur_seed, "base seed (state i uses seed + i)");
  eur->add_option("--grid", eur_grid, "phase grid M (default 16 d)");
  eur->add_option("--aux", eur_aux, "auxiliary dimension (degenerate)");
  eur->add_option("--omega", eur_omega, "oscillator frequency");
  eur->add_option("--length", eur_length, "Q/P box length (default "
                                          "sqrt(2 pi))");
  eur->add_option("--window", eur_window, "almost-periodic time window");
  eur->add_option("--time-samples", eur_tsamples,
                  "almost-periodic grid points");
  eur->add_option("--tolerance", eur_tol,
                  "slack gate (default per pair)");
  add_output_flags(eur, eur_out);

  // mow-check
  auto* mow = app.add_subcommand("mow-check", "entropy-variance inequality");
  std::string mow_family = "geometric", mow_file;
  int mow_d = 16, mow_nmax = 1024;
  double mow_q = 0.5, mow_r = 0.5;
  Output mow_out;
  mow->add_option("--family", mow_family, "point|uniform|binomial|geometric");
  mow->add_option("--d", mow_d, "uniform/binomial size");
  mow->add_option("--q", mow_q, "binomial success probability");
  mow->add_option("--r", mow_r, "geometric ratio");
  mow->add_option("--nmax", mow_nmax, "geometric truncation");
  mow->add_option("--dist-file", mow_file, "distribution JSON file");
  add_output_flags(mow, mow_out);

  // rms-check
  auto* rms = app.add_subcommand("rms-check", "RMSE Heisenberg floors");
  ProbeSpec rms_probe;
  rms_probe.kind = "doubling";
  int rms_grid = 1021, rms_threads = 1;
  Output rms_out;
  rms_probe.add_flags(rms);
  rms->add_option("--grid", rms_grid,
                  "phase grid (values must stay distinct mod grid)");
  rms->add_option("--threads", rms_threads, "worker threads");
  add_output_flags(rms, rms_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error message
    return code == 0 ? 0 : 1;     // any command-line mistake is a config error
  }

  if (list_experiments) {
    for (const auto& row : kManifest)
      std::cout << row[0] << "\t" << row[1] << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 0;
  }

  try {
    if (chi->parsed())
      return run_chi(chi_ensemble, chi_named, chi_povm, chi_out);
    if (mi->parsed())
      return run_mutual_info(mi_joint, mi_ensemble, mi_povm, mi_out);
    if (asym->parsed())
      return run_asymmetry(asym_group, asym_probe, asym_two_j, asym_blocks,
                           asym_out);
    if (ps->parsed())
      return run_phase_sim(ps_probe, ps_prior, ps_povm, ps_sigma,
                           ps_estimator, ps_threads, ps_link, ps_out);
    if (rs->parsed())
      return run_rotation_sim(rs_two_j, rs_prior, rs_povm, rs_estimator,
                              rs_threads, rs_link, rs_state, rs_out);
    if (rb->parsed())
      return run_rotation_bounds(rb_mu, rb_t, rb_two_j, rb_m, rb_sweep,
                                 rb_out);
    if (mm->parsed())
      return run_mmode_bounds(mm_family, mm_d, mm_q, mm_r, mm_nmax, mm_modes,
                              mm_out);
    if (eur->parsed())
      return run_eur_sweep(eur_pair, eur_d, eur_samples, eur_seed, eur_grid,
                           eur_aux, eur_omega, eur_length, eur_window,
                           eur_tsamples, eur_tol, eur_out);
    if (mow->parsed())
      return run_mow_check(mow_family, mow_d, mow_q, mow_r, mow_nmax,
                           mow_file, mow_out);
    if (rms->parsed())
      return run_rms_check(rms_probe, rms_grid, rms_threads, rms_out);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
