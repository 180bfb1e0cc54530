#include "fbent/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fbent/dynamics.hpp"
#include "fbent/feedback.hpp"
#include "fbent/io.hpp"
#include "fbent/parametric.hpp"
#include "fbent/symplectic.hpp"
#include "json.hpp"

namespace fbent::cli {

namespace {

using nlohmann::json;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<std::size_t> modes;
  std::optional<double> chi;
  std::string chi_range;
  std::string bipartitions;
  std::string drift_file;
  std::string hamiltonian_file;
  std::string sigma_file;
  std::string out;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  bool json = false;
};

std::string num(double v) { return io::format_number(v); }

// Line-oriented report that doubles as a JSON object with --json.
class Report {
 public:
  explicit Report(bool as_json) : as_json_(as_json) {}

  void field(const std::string& key, double v) {
    doc_[key] = v;
    lines_ << key << " = " << num(v) << '\n';
  }
  void field(const std::string& key, const std::string& v) {
    doc_[key] = v;
    lines_ << key << " = " << v << '\n';
  }
  void check(const std::string& name, bool pass, double value) {
    doc_["checks"].push_back({{"name", name}, {"pass", pass}, {"value", value}});
    lines_ << (pass ? "PASS " : "FAIL ") << name << " (" << num(value) << ")\n";
  }
  void emit(std::ostream& out) const {
    if (as_json_)
      out << doc_.dump(2) << '\n';
    else
      out << lines_.str();
  }

 private:
  bool as_json_;
  json doc_ = json::object();
  std::ostringstream lines_;
};

std::size_t require_modes(const RunConfig& c) {
  if (!c.modes) throw InputError("--modes is required");
  if (*c.modes < 2) throw InputError("--modes must be at least 2");
  return *c.modes;
}

double require_chi(const RunConfig& c) {
  if (!c.chi) throw InputError("--chi is required");
  if (!(*c.chi >= 0.0)) throw InputError("--chi must be non-negative");
  return *c.chi;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_bipartitions(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const auto b = Bipartition::parse(item);
      out.emplace_back(b.size_a(), b.size_b());
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  if (out.empty()) throw InputError("--bipartitions is empty");
  return out;
}

// Single split for free/optimal/local; defaults to the balanced one.
std::pair<std::size_t, std::size_t> split_for(const RunConfig& c, std::size_t modes) {
  if (c.bipartitions.empty()) return {modes / 2, modes - modes / 2};
  const auto all = parse_bipartitions(c.bipartitions);
  if (all.size() != 1) throw InputError("this command takes a single bipartition");
  if (all[0].first + all[0].second != modes) throw InputError("bipartition sizes must add up to --modes");
  return all[0];
}

Matrix drift_from_files(const RunConfig& c) {
  if (!c.drift_file.empty() && !c.hamiltonian_file.empty())
    throw InputError("give only one of --drift and --hamiltonian");
  if (!c.drift_file.empty()) return io::read_matrix_json(c.drift_file);
  try {
    return drift_from_hamiltonian(HamiltonianMatrix(io::read_matrix_json(c.hamiltonian_file))).matrix();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

bool has_matrix_source(const RunConfig& c) { return !c.drift_file.empty() || !c.hamiltonian_file.empty(); }

// U is stored in (q..., p...) block order; files use qpqp.
Matrix block_to_qpqp(const Matrix& u) {
  const std::size_t modes = u.rows() / 2;
  auto idx = [modes](std::size_t k) { return k < modes ? 2 * k : 2 * (k - modes) + 1; };
  Matrix out(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < u.cols(); ++j) out(idx(i), idx(j)) = u(i, j);
  return out;
}

// ---------------------------------------------------------------------------

int cmd_bound(const RunConfig& c, std::ostream& out) {
  Matrix a;
  Report r(c.json);
  if (has_matrix_source(c)) {
    a = drift_from_files(c);
    r.field("source", !c.drift_file.empty() ? c.drift_file : c.hamiltonian_file);
  } else {
    const auto modes = require_modes(c);
    const double chi = require_chi(c);
    require_below_threshold(modes, chi);
    a = full_drift(modes, chi).matrix();
    r.field("modes", static_cast<double>(modes));
    r.field("chi", chi);
  }
  const auto b = entanglement_bound(a);
  r.field("alpha1", b.alpha1);
  r.field("alpha2", b.alpha2);
  r.field("nu_sq_bound", b.nu_sq_bound);
  r.field("en_bound", b.en_bound);
  r.emit(out);
  return kOk;
}

int cmd_free(const RunConfig& c, std::ostream& out) {
  const auto modes = require_modes(c);
  const double chi = require_chi(c);
  require_below_threshold(modes, chi);
  const auto [m, n] = split_for(c, modes);
  const DriftMatrix a = full_drift(modes, chi);
  const CovarianceMatrix sigma = steady_state_cm(a);
  const auto split = Bipartition::leading(m, modes);
  const double nu = pt_min_symplectic(sigma, split);

  Report r(c.json);
  r.field("modes", static_cast<double>(modes));
  r.field("chi", chi);
  r.field("bipartition", split.label());
  r.field("nu_sq", nu * nu);
  r.field("log_negativity", log_negativity(sigma, split));
  if (m == n) r.field("closed_form", free_logneg(modes, chi));
  if (!c.out.empty()) {
    io::write_matrix_json(c.out + ".sigma.json", sigma.matrix());
    io::write_matrix_json(c.out + ".drift.json", a.matrix());
    r.field("written", c.out + ".sigma.json, " + c.out + ".drift.json");
  }
  r.emit(out);
  return kOk;
}

int cmd_optimal(const RunConfig& c, std::ostream& out) {
  const auto modes = require_modes(c);
  const double chi = require_chi(c);
  require_below_threshold(modes, chi);
  const auto [m, n] = split_for(c, modes);
  const DriftMatrix a = reduced_drift(m, n, chi);
  const OptimalState opt = optimal_cm(a);
  const UnravellingMatrix u = optimal_unravelling(a, opt.sigma);

  Report r(c.json);
  r.field("modes", static_cast<double>(modes));
  r.field("chi", chi);
  r.field("bipartition", Bipartition::leading(m, modes).label());
  r.field("log_negativity", opt.log_negativity);
  r.field("en_bound", parametric_bound(modes, chi));
  r.field("attains_bound", opt.attains_bound ? "yes" : "no");
  r.field("riccati_margin", opt.riccati_margin);
  r.field("physical_margin", opt.physical_margin);
  if (!c.out.empty()) {
    io::write_matrix_json(c.out + ".sigma.json", opt.sigma.matrix());
    io::write_matrix_json(c.out + ".drift.json", a.matrix());
    io::write_matrix_json(c.out + ".unravelling.json", block_to_qpqp(u.matrix()));
    r.field("written", c.out + ".sigma.json, " + c.out + ".drift.json, " + c.out + ".unravelling.json");
  }
  r.emit(out);
  return kOk;
}

int cmd_local(const RunConfig& c, std::ostream& out) {
  const auto modes = require_modes(c);
  const double chi = require_chi(c);
  require_below_threshold(modes, chi);
  const auto [m, n] = split_for(c, modes);
  const auto opt = optimize_local_feedback(m, n, chi);

  Report r(c.json);
  r.field("modes", static_cast<double>(modes));
  r.field("chi", chi);
  r.field("bipartition", Bipartition::leading(m, modes).label());
  r.field("mu1_star", opt.mu1_star);
  r.field("mu2_star", local_scheme(m, n, opt.mu1_star).mu2);
  r.field("mu1_stable_lo", opt.mu1_lo);
  r.field("mu1_stable_hi", opt.mu1_hi);
  r.field("nu_sq", opt.nu_sq_min);
  r.field("log_negativity", std::max(0.0, -0.5 * std::log2(opt.nu_sq_min)));
  r.emit(out);
  return kOk;
}

std::vector<double> parse_chi_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ':')) {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    }
  } catch (const std::exception&) {
    throw InputError("--chi-range must look like START:STOP:STEPS, got '" + text + "'");
  }
  if (parts.size() != 3 || parts[2] < 1 || parts[2] != std::floor(parts[2]))
    throw InputError("--chi-range must look like START:STOP:STEPS, got '" + text + "'");
  return linspace(parts[0], parts[1], static_cast<std::size_t>(parts[2]));
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  const auto splits = parse_bipartitions(c.bipartitions.empty() ? "3:3" : c.bipartitions);
  const std::size_t modes = c.modes ? *c.modes : splits.front().first + splits.front().second;
  for (const auto& [m, n] : splits)
    if (m + n != modes) throw InputError("every bipartition must cover --modes modes");
  std::vector<double> grid;
  if (!c.chi_range.empty()) {
    grid = parse_chi_range(c.chi_range);
  } else {
    const double threshold = 1.0 / (2.0 * static_cast<double>(modes - 1));
    grid = linspace(0.001, threshold - 0.001, 60);
  }

  std::vector<std::pair<std::string, std::vector<SweepRow>>> runs;
  std::size_t total = 0, ok = 0;
  for (const auto& [m, n] : splits) {
    auto rows = sweep_chi(m, n, grid);
    for (const auto& row : rows) {
      ++total;
      ok += row.status == "ok";
    }
    runs.emplace_back(std::to_string(m) + ":" + std::to_string(n), std::move(rows));
  }

  if (c.out.empty()) {
    io::write_combined_sweep_csv(out, runs);
  } else {
    std::filesystem::create_directories(c.out);
    for (const auto& [label, rows] : runs) {
      auto name = label;
      name[name.find(':')] = '-';
      std::ofstream f(std::filesystem::path(c.out) / ("sweep_" + name + ".csv"));
      io::write_sweep_csv(f, rows);
    }
    std::ofstream f(std::filesystem::path(c.out) / "sweep_all.csv");
    io::write_combined_sweep_csv(f, runs);
    out << "wrote " << runs.size() << " sweep file(s) and sweep_all.csv to " << c.out << '\n';
  }
  return 10 * ok >= 9 * total ? kOk : kCheckFailed;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  if (c.sigma_file.empty()) throw InputError("--sigma is required");
  if (!has_matrix_source(c)) throw InputError("--drift or --hamiltonian is required");
  const Matrix sigma_m = io::read_matrix_json(c.sigma_file);
  const Matrix a = drift_from_files(c);
  if (a.rows() != sigma_m.rows()) throw InputError("--sigma and the drift have different sizes");
  const CovarianceMatrix sigma(sigma_m);
  const std::size_t modes = sigma.n_modes();

  Report r(c.json);
  bool all = true;
  auto check = [&](const std::string& name, bool pass, double value) {
    r.check(name, pass, value);
    all = all && pass;
  };

  const auto phys = check_physical(sigma, c.tol);
  check("physical: min eig of sigma + i Omega", phys.physical, phys.min_embedding_eig);
  const auto stab = is_stabilising_solution(sigma, a, c.tol);
  check("stabilising: min eig of A sigma + sigma A^T + 1", stab.riccati_margin >= -c.tol, stab.riccati_margin);
  if (!phys.physical) {
    r.emit(out);
    return kCheckFailed;
  }
  const auto poincare = poincare_check(sigma, c.tol);
  check("eigenvalue products lambda_up[k] lambda_down[k] >= 1", poincare.holds, poincare.value);

  const auto st = is_stable(a);
  if (modes >= 2) {
    std::optional<BoundReport> bound;
    if (st.stable) bound = entanglement_bound(a);
    for (std::size_t k = 0; k < modes; ++k) {
      const Bipartition split(modes, {k});
      const auto pt_spectrum = pt_spectrum_check(sigma, split, c.tol);
      check("pt eigenvalue vs sigma spectrum, split " + std::to_string(k + 1) + "|rest", pt_spectrum.holds, pt_spectrum.value);
      if (bound) {
        const double nu = pt_min_symplectic(sigma, split);
        const double slack = nu * nu - bound->nu_sq_bound;
        check("feedback bound nu_pt^2 >= alpha1 alpha2, split " + std::to_string(k + 1) + "|rest", slack >= -c.tol,
              slack);
      }
    }
    if (!bound) check("drift stable for the feedback bound", false, st.margin);
  }
  r.emit(out);
  return all ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steady-state Gaussian entanglement under continuous-measurement feedback"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_common = [&c](CLI::App* sub) {
    sub->add_option("--modes", c.modes, "number of modes N");
    sub->add_option("--chi", c.chi, "interaction strength over loss rate");
    sub->add_option("--bipartitions", c.bipartitions, "m:n[,m:n...]");
    sub->add_option("--drift", c.drift_file, "drift matrix JSON file");
    sub->add_option("--hamiltonian", c.hamiltonian_file, "Hamiltonian matrix JSON file");
    sub->add_option("--out", c.out, "output path or prefix");
    sub->add_option("--tol", c.tol, "check tolerance")->capture_default_str();
    sub->add_option("--seed", c.seed, "random seed (all current commands are deterministic)");
    sub->add_flag("--json", c.json, "machine-readable report");
  };

  auto* bound = app.add_subcommand("bound", "feedback entanglement bound");
  auto* free = app.add_subcommand("free", "free steady-state entanglement");
  auto* optimal = app.add_subcommand("optimal", "bound-attaining state and optimal unravelling");
  auto* local = app.add_subcommand("local", "optimized local direct feedback");
  auto* sweep = app.add_subcommand("sweep", "chi sweep of free, local and bound values to CSV");
  auto* verify = app.add_subcommand("verify", "check a covariance matrix against a drift");
  for (auto* sub : {bound, free, optimal, local, sweep, verify}) add_common(sub);
  sweep->add_option("--chi-range", c.chi_range, "START:STOP:STEPS");
  verify->add_option("--sigma", c.sigma_file, "covariance matrix JSON file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (*bound) return cmd_bound(c, out);
    if (*free) return cmd_free(c, out);
    if (*optimal) return cmd_optimal(c, out);
    if (*local) return cmd_local(c, out);
    if (*sweep) return cmd_sweep(c, out);
    if (*verify) return cmd_verify(c, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const UnstableError& e) {
    err << "unstable: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kInputError;
}

}  // namespace fbent::cli
