#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fgnls/analysis.hpp"

using namespace fgnls;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config;
  std::string out;
  std::string format = "csv";
  unsigned long long seed = 0;
  double tol = 1e-7;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config, "config JSON path")->required();
  cmd->add_option("--out", opts.out, "output path (default stdout)");
  cmd->add_option("--format", opts.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", opts.seed, "rng seed recorded in report metadata");
  cmd->add_option("--tol", opts.tol, "invariant tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", opts.threads, "worker threads (0 = auto)");
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("FGNLS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  return json::parse(in);
}

Surface surface_from_json(const json& j) {
  SurfaceSpec spec;
  const std::string mode = j.value("mode", "focusing");
  if (mode == "focusing") {
    spec.mode = CutMode::Focusing;
    for (const auto& a : j.at("alphas"))
      spec.alphas.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  } else if (mode == "defocusing") {
    spec.mode = CutMode::Defocusing;
    for (const auto& b : j.at("bands"))
      spec.bands.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
  } else {
    throw std::runtime_error("unknown mode: " + mode);
  }
  return Surface::validate(spec);
}

// Writes to the chosen sink; stdout when no path was given.
void emit(const CommonOpts& opts, const std::string& text) {
  if (opts.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opts.out);
  if (!out) throw std::runtime_error("cannot open output: " + opts.out);
  out << text;
}

json matrix_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back({v(i).real(), v(i).imag()});
  return out;
}

int cmd_periods(const CommonOpts& opts) {
  const json cfg = load_config(opts.config);
  const Surface s = surface_from_json(cfg.at("surface"));
  const PeriodData pd = build_period_data(s);
  const int g = s.genus();

  const Eigen::MatrixXcd& tau = pd.tau;
  const double sym = (tau - tau.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tau.imag());
  const bool spd = es.eigenvalues().minCoeff() > 0.0;
  double re_dev = 0.0;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const double want = s.mode() == CutMode::Focusing
                              ? (i == j ? 1.0 : 0.5)
                              : 0.0;
      re_dev = std::max(re_dev, std::abs(tau(i, j).real() - want));
    }

  json doc;
  doc["genus"] = g;
  doc["mode"] = s.mode() == CutMode::Focusing ? "focusing" : "defocusing";
  doc["tau"] = matrix_json(tau);
  doc["u_infinity"] = vector_json(pd.u_inf);
  doc["V"] = std::vector<double>(pd.sk.V.data(), pd.sk.V.data() + g);
  doc["W"] = std::vector<double>(pd.sk.W.data(), pd.sk.W.data() + g);
  doc["p_const"] = {pd.sk.p_const.real(), pd.sk.p_const.imag()};
  doc["q_const"] = {pd.sk.q_const.real(), pd.sk.q_const.imag()};
  doc["cond_A"] = pd.cond_A;
  doc["invariants"] = {{"tau_symmetric", sym < 1e-8},
                       {"im_tau_positive_definite", spd},
                       {"re_tau_pattern", re_dev < opts.tol}};
  doc["seed"] = opts.seed;
  emit(opts, doc.dump(2) + "\n");

  const bool ok = sym < 1e-8 && spd && re_dev < opts.tol;
  return ok ? 0 : 2;
}

int cmd_fgrid(const CommonOpts& opts) {
  const json cfg = load_config(opts.config);
  const Surface s = surface_from_json(cfg.at("surface"));
  const AmplitudeContext ctx(s, build_period_data(s));
  const int n = cfg.value("n", 64);
  if (n < 1) throw std::runtime_error("grid size must be positive");
  int ai = 0, aj = 1;
  if (cfg.contains("axes")) {
    ai = cfg["axes"].at(0).get<int>();
    aj = cfg["axes"].at(1).get<int>();
  }
  Eigen::VectorXd base = Eigen::VectorXd::Zero(s.genus());
  if (cfg.contains("base"))
    for (int i = 0; i < s.genus(); ++i)
      base(i) = cfg["base"].at(static_cast<std::size_t>(i)).get<double>();

  const FieldGrid grid =
      f_grid(ctx, ai, aj, n, base, resolve_threads(opts.threads));
  std::ostringstream text;
  if (opts.format == "csv")
    write_field_csv(grid, text);
  else
    write_field_json(grid, text);
  emit(opts, text.str());
  return 0;
}

int cmd_psigrid(const CommonOpts& opts) {
  const json cfg = load_config(opts.config);
  const Surface s = surface_from_json(cfg.at("surface"));
  const AmplitudeContext ctx(s, build_period_data(s));
  const auto& xr = cfg.at("x");
  const auto& tr = cfg.at("t");
  Eigen::VectorXd om0 = Eigen::VectorXd::Zero(s.genus());
  if (cfg.contains("omega0"))
    for (int i = 0; i < s.genus(); ++i)
      om0(i) = cfg["omega0"].at(static_cast<std::size_t>(i)).get<double>();

  const FieldGrid grid = psi_grid(
      ctx, xr.at(0).get<double>(), xr.at(1).get<double>(), xr.at(2).get<int>(),
      tr.at(0).get<double>(), tr.at(1).get<double>(), tr.at(2).get<int>(),
      PhasePoint(om0), resolve_threads(opts.threads));
  std::ostringstream text;
  if (opts.format == "csv")
    write_field_csv(grid, text);
  else
    write_field_json(grid, text);
  emit(opts, text.str());
  return 0;
}

int cmd_check(const CommonOpts& opts) {
  const json cfg = load_config(opts.config);
  const Surface s = surface_from_json(cfg.at("surface"));
  std::ostringstream report;
  const bool ok = run_check(s, report, cfg.value("grid", 8),
                            cfg.value("refine", 3));
  emit(opts, report.str());
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-gap NLS amplitude toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* periods = app.add_subcommand("periods", "period data + invariants");
  CLI::App* fgrid = app.add_subcommand("fgrid", "|f| over a torus slice");
  CLI::App* psigrid = app.add_subcommand("psigrid", "psi over an (x,t) window");
  CLI::App* check = app.add_subcommand("check", "full certification suite");
  for (CLI::App* cmd : {periods, fgrid, psigrid, check}) add_common(cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (periods->parsed()) return cmd_periods(opts);
    if (fgrid->parsed()) return cmd_fgrid(opts);
    if (psigrid->parsed()) return cmd_psigrid(opts);
    return cmd_check(opts);
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
