// g2flow: command-line driver for calibration, check suites, symbol probes,
// flow runs and diffeomorphism pullbacks. Every run writes manifest.json.

#include <openssl/evp.h>

#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "g2flow/flow.hpp"
#include "g2flow/kernels.hpp"
#include "g2flow/linearization.hpp"
#include "g2flow/parallel.hpp"
#include "g2flow/torsion.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace g2flow;

namespace {

enum Exit { kOk = 0, kConfig = 1, kBreakdown = 2, kCheckFailed = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, text.data(), text.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string period_label(int k) {
  std::array<int, 7> idx{};
  const int n = Basis::indices(Basis::get().masks[3][static_cast<std::size_t>(k)], idx);
  std::string s = "p_";
  for (int i = 0; i < n; ++i) s += std::to_string(idx[static_cast<std::size_t>(i)] + 1);
  return s;
}

class Run {
 public:
  Run(std::string command, fs::path out) : command_(std::move(command)), out_(std::move(out)) {
    fs::create_directories(out_);
    start_ = std::chrono::steady_clock::now();
  }
  const fs::path& out() const { return out_; }
  std::ofstream open(const std::string& name) const {
    std::ofstream f(out_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out_ / name).string());
    return f;
  }
  void finish(const json& config, std::uint64_t seed, std::optional<double> A, const std::string& outcome) const {
    json m;
    m["command"] = command_;
    m["config_digest"] = "sha256:" + sha256_hex(config.dump());
    m["seed"] = seed;
    m["A"] = A ? json(*A) : json(nullptr);
    m["version"] = G2FLOW_VERSION;
    m["simd"] = std::string(kernels::active().name);
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    m["outcome"] = outcome;
    open("manifest.json") << m.dump(2) << "\n";
  }

 private:
  std::string command_;
  fs::path out_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// calibrate-a

int cmd_calibrate(const fs::path& out, std::uint64_t seed, int samples, int n, std::vector<int> axes,
                  int max_mode) {
  CalibrationOptions opts;
  opts.n = n;
  opts.max_mode = max_mode;
  opts.axes.clear();
  for (int a : axes) {
    if (a < 1 || a > 7) throw ConfigError("axes are 1..7");
    opts.axes.push_back(a - 1);
  }
  const json config = {{"samples", samples}, {"n", n}, {"axes", axes}, {"max_mode", max_mode}};
  Run run("calibrate-a", out);
  const CalibrationReport r = calibrate_A(seed, samples, opts);
  json j = {{"A", r.A}, {"samples", r.samples}, {"relative_spread", r.relative_spread},
            {"site_residual", r.site_residual}, {"per_sample", r.per_sample}};
  std::cout << j.dump() << "\n";
  run.open("calibration.json") << j.dump(2) << "\n";
  run.finish(config, seed, r.A, "ok");
  return kOk;
}

// ---------------------------------------------------------------------------
// check

json variation_json(const std::string& name, const VariationReport& r) {
  return {{"check", name},          {"formula", r.formula},       {"fd_value", r.fd_value},
          {"closed_form", r.closed_form}, {"rel_error", r.rel_error}, {"scale", r.scale},
          {"steps", r.steps},       {"errors", r.errors},         {"quadratic", r.quadratic},
          {"roundtrip", r.roundtrip}, {"tolerance", r.tolerance}, {"sixth_ratio", r.sixth_ratio},
          {"pass", r.pass()}};
}

PForm random_pform(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PForm p(degree);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = u(rng);
  return p;
}

std::vector<json> suite_variation(std::uint64_t seed) {
  std::vector<json> out;
  std::mt19937_64 rng(seed);
  const PForm phi = standard_phi();
  const PForm sigma = phi + 0.05 * random_pform(rng, 3);
  out.push_back(variation_json("metric_conformal", check_metric_variation(phi, 3.0 * phi)));
  out.push_back(variation_json("metric_seven",
                               check_metric_variation(phi, G2Point(phi).star(wedge(random_pform(rng, 1), phi)))));
  out.push_back(variation_json("metric_random", check_metric_variation(sigma, random_pform(rng, 3))));
  out.push_back(variation_json("dual_conformal", check_dual_variation(phi, 3.0 * phi)));
  const G2Point p(phi);
  out.push_back(variation_json("dual_27", check_dual_variation(phi, p.split3(random_pform(rng, 3)).twentyseven)));
  out.push_back(variation_json("dual_random", check_dual_variation(sigma, random_pform(rng, 3))));

  const LatticeSpec spec = LatticeSpec::make({0, 1}, 16);
  const FormField base = FormField::constant(spec, phi);
  const FormField s0 = base + random_exact_3form(spec, 0.05, 1, seed ^ 0x51u);
  const FormField ds = random_exact_3form(spec, 1.0, 2, seed ^ 0x52u);
  out.push_back(variation_json("hitchin_zero", check_hitchin_variation(s0, FormField(spec, 3))));
  out.push_back(variation_json("hitchin_flat", check_hitchin_variation(base, ds)));
  out.push_back(variation_json("hitchin_random", check_hitchin_variation(s0, ds)));
  out.push_back(variation_json("T_random", check_T_variation(s0, ds)));
  return out;
}

std::vector<json> suite_symbol(std::uint64_t seed) {
  const ParabolicityReport r = parabolicity_certificate(seed, 10);
  json grid = json::array();
  for (const GridPoint& g : r.grid)
    grid.push_back({{"lambda", g.lambda}, {"mu", g.mu}, {"max_real_eig", g.max_real_eig}, {"parabolic", g.parabolic}});
  json j = {{"check", "parabolicity"},
            {"probes", r.probes},
            {"max_deviation", r.max_deviation},
            {"p_alone_max_eig", r.p_alone_max_eig},
            {"p_alone_negative_definite", r.p_alone_negative_definite},
            {"gauge_deviation", r.gauge_deviation},
            {"homogeneity_exponent", r.homogeneity_exponent},
            {"max_fit_residual", r.max_fit_residual},
            {"max_k_variation", r.max_k_variation},
            {"target_in_region", r.target_in_region},
            {"grid", grid},
            {"rel_error", std::max({r.max_deviation, r.gauge_deviation, std::abs(r.homogeneity_exponent - 2.0)})},
            {"pass", r.pass()}};
  return {j};
}

std::vector<json> suite_identities(std::uint64_t seed) {
  std::vector<json> out;
  auto add = [&](const std::vector<IdentityReport>& rs, double tol) {
    for (const IdentityReport& r : rs)
      out.push_back({{"check", r.name}, {"rel_error", r.residual}, {"scale", r.scale}, {"tolerance", tol},
                     {"pass", r.residual <= tol}});
  };
  const LatticeSpec spec = LatticeSpec::make({0, 1, 2}, 12);
  const FormField phi = FormField::constant(spec, standard_phi());
  add(closed_structure_identities(phi, random_exact_3form(spec, 1.0, 2, seed ^ 0x11u)), 1e-8);
  add(one_form_identities(phi, random_smooth_form(spec, 1, 2, seed ^ 0x12u)), 1e-8);
  add(vanishing_operators(phi, seed ^ 0x13u), 1e-8);

  const LatticeSpec t2 = LatticeSpec::make({0, 1}, 16);
  const FormField s = FormField::constant(t2, standard_phi()) + random_exact_3form(t2, 1e-2, 1, seed ^ 0x14u);
  const TorsionComponents tc = torsion_components(s);
  const auto pts = g2_points(s);
  const double t2n = l2_norm(pts, tc.tau2);
  const double others = std::max({l2_norm(pts, tc.tau0), l2_norm(pts, tc.tau1), l2_norm(pts, tc.tau3)});
  const double res = std::max(tc.residual_dsigma, tc.residual_dstar);
  out.push_back({{"check", "closed_torsion"},
                 {"tau2_l2", t2n},
                 {"other_l2", others},
                 {"reconstruction_residual", res},
                 {"rel_error", std::max(res, others / std::max(t2n, 1e-300))},
                 {"pass", others <= 1e-7 * t2n + 1e-10 && res <= 1e-8}});

  const CalibrationReport c = calibrate_A(seed, 2);
  out.push_back({{"check", "calibrate_A"},
                 {"A", c.A},
                 {"rel_error", c.relative_spread},
                 {"pass", c.relative_spread <= 1e-6}});
  return out;
}

int cmd_check(const fs::path& out, const std::string& suite, std::uint64_t seed) {
  const json config = {{"suite", suite}};
  std::vector<json> reports;
  Run run("check", out);
  if (suite == "variation")
    reports = suite_variation(seed);
  else if (suite == "symbol")
    reports = suite_symbol(seed);
  else if (suite == "identities")
    reports = suite_identities(seed);
  else
    throw ConfigError("unknown suite '" + suite + "'");
  auto f = run.open("check_" + suite + ".jsonl");
  bool ok = true;
  double worst = 0.0;
  for (const json& r : reports) {
    std::cout << r.dump() << "\n";
    f << r.dump() << "\n";
    ok = ok && r["pass"].get<bool>();
    worst = std::max(worst, r["rel_error"].get<double>());
  }
  const std::string summary = std::string(ok ? "PASS" : "FAIL") + " max_rel_err=" + fmt(worst);
  std::cout << summary << "\n";
  f << summary << "\n";
  run.finish(config, seed, std::nullopt, ok ? "pass" : "fail");
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// symbol

int cmd_symbol(const fs::path& out, double lambda, double mu, const std::vector<double>& xi_in,
               const std::string& op_name, std::uint64_t seed, double A, bool full) {
  if (xi_in.size() != 7) throw ConfigError("--xi needs 7 comma-separated components");
  SymbolOp op;
  if (op_name == "P+Q") op = SymbolOp::PQ;
  else if (op_name == "P") op = SymbolOp::P;
  else if (op_name == "Q") op = SymbolOp::Q;
  else if (op_name == "laplacian") op = SymbolOp::laplacian;
  else if (op_name == "gauge") op = SymbolOp::gauge_flow;
  else throw ConfigError("unknown operator '" + op_name + "'");
  SymbolProbe probe;
  for (int i = 0; i < 7; ++i) probe.xi(i) = xi_in[static_cast<std::size_t>(i)];
  if (probe.xi.norm() == 0.0) throw ConfigError("--xi must be nonzero");
  probe.frame_seed = seed;
  if (full) probe.subspace = SymbolSubspace::full;
  const json config = {{"lambda", lambda}, {"mu", mu}, {"xi", xi_in}, {"op", op_name}, {"A", A}, {"full", full}};
  Run run("symbol", out);
  const SymbolResult r = symbol_matrix(op, probe, lambda, mu, A);
  std::ostringstream os;
  os << "row";
  for (const auto& l : r.basis_labels) os << "," << l;
  os << "\n";
  for (Eigen::Index i = 0; i < r.matrix.rows(); ++i) {
    os << r.basis_labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < r.matrix.cols(); ++j) os << "," << fmt(r.matrix(i, j));
    os << "\n";
  }
  // eigenvalues sorted for a stable listing
  std::vector<std::complex<double>> ev(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size());
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  os << "\neigenvalue,real,imag\n";
  for (std::size_t i = 0; i < ev.size(); ++i) os << i << "," << fmt(ev[i].real()) << "," << fmt(ev[i].imag()) << "\n";
  std::cout << os.str();
  run.open("symbol.csv") << os.str();
  run.open("symbol_report.json") << json{{"fit_residual", r.fit_residual},
                                         {"k_variation", r.k_variation},
                                         {"leakage", r.leakage},
                                         {"xi_norm2", r.xi_norm2}}
                                        .dump(2)
                                 << "\n";
  run.finish(config, seed, A, r.fit_residual <= 1e-6 ? "ok" : "ill-formed probe");
  return r.fit_residual <= 1e-6 ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// flow and pullback

struct FlowSetup {
  FlowConfig cfg;
  std::uint64_t seed = 0;
  bool calibrated = false;
  json config;
};

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

FlowSetup load_flow_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  FlowSetup s;
  try {
    s.config = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  const json& c = s.config;
  static const std::set<std::string> known{"seed",   "axes",          "n",         "period",     "epsilon",
                                           "max_mode", "initial",     "dt_safety", "t_end",      "fixed_steps",
                                           "gauge",  "lambda",        "mu",        "A",          "snapshot_every"};
  for (auto it = c.begin(); it != c.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
  if (!c.contains("seed")) throw ConfigError("config needs a seed");
  try {
    s.seed = c.at("seed").get<std::uint64_t>();
    std::vector<int> axes;
    for (int a : get_or<std::vector<int>>(c, "axes", {1, 2})) {
      if (a < 1 || a > 7) throw ConfigError("axes are 1..7");
      axes.push_back(a - 1);
    }
    const int n = get_or(c, "n", 16);
    const double period = get_or(c, "period", 2.0 * std::numbers::pi);
    if (c.contains("initial")) {
      fs::path ip = c.at("initial").get<std::string>();
      if (ip.is_relative()) ip = path.parent_path() / ip;
      s.cfg.sigma0 = read_snapshot(ip.string());
    } else {
      const LatticeSpec spec = LatticeSpec::make(axes, n, period);
      s.cfg.sigma0 = FormField::constant(spec, standard_phi()) +
                     random_exact_3form(spec, get_or(c, "epsilon", 1e-2), get_or(c, "max_mode", 2), s.seed);
    }
    s.cfg.dt_safety = get_or(c, "dt_safety", 0.1);
    s.cfg.t_end = get_or(c, "t_end", 0.1);
    if (c.contains("fixed_steps")) s.cfg.fixed_steps = c.at("fixed_steps").get<int>();
    s.cfg.snapshot_every = get_or(c, "snapshot_every", 1);
    const std::string gauge = get_or<std::string>(c, "gauge", "deturck");
    if (gauge == "deturck")
      s.cfg.gauge = Gauge::deturck_gauge(get_or(c, "lambda", -5.0), get_or(c, "mu", -1.0));
    else if (gauge == "plain")
      s.cfg.gauge = Gauge::plain();
    else
      throw ConfigError("gauge must be 'deturck' or 'plain'");
    if (c.contains("A")) {
      s.cfg.A = c.at("A").get<double>();
    } else {
      s.cfg.A = calibrate_A(s.seed, 2).A;
      s.calibrated = true;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

std::string diag_header() {
  std::string h = "t,V,tau2_l2,dsigma_l2,dt,min_metric_eig";
  for (int k = 0; k < 35; ++k) h += "," + period_label(k);
  return h + "\n";
}

std::string diag_row(const FlowDiagnostics& d) {
  std::string r = fmt(d.t) + "," + fmt(d.hitchin_V) + "," + fmt(d.tau2_l2) + "," + fmt(d.dsigma_l2) + "," +
                  fmt(d.dt_used) + "," + fmt(d.min_metric_eig);
  for (double p : d.periods) r += "," + fmt(p);
  return r + "\n";
}

void write_states(const Run& run, const std::string& prefix, const Trajectory& traj, int every) {
  fs::create_directories(run.out() / "snapshots");
  const std::size_t m = traj.states.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (i % static_cast<std::size_t>(every) != 0 && i + 1 != m) continue;
    char name[64];
    std::snprintf(name, sizeof name, "snapshots/%s_%05zu.g2f1", prefix.c_str(), i);
    write_snapshot((run.out() / name).string(), traj.states[i]);
  }
}

FlowResult run_logged(const Run& run, const FlowConfig& cfg, const std::string& csv) {
  auto f = run.open(csv);
  f << diag_header();
  return run_flow(cfg, [&](const FlowDiagnostics& d) {
    f << diag_row(d);
    f.flush();
  });
}

int cmd_flow(const fs::path& out, const fs::path& config_path) {
  FlowSetup s = load_flow_config(config_path);
  Run run("flow", out);
  FlowResult r;
  try {
    r = run_logged(run, s.cfg, "diagnostics.csv");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const DefinitenessError& e) {
    throw ConfigError(e.what());
  }
  write_states(run, "state", r.trajectory, s.cfg.snapshot_every);
  if (r.breakdown) std::cerr << r.message << "\n";
  std::cout << (r.breakdown ? "breakdown" : "ok") << " steps=" << r.steps
            << " t=" << fmt(r.diagnostics.empty() ? 0.0 : r.diagnostics.back().t) << "\n";
  run.finish(s.config, s.seed, s.cfg.A, r.breakdown ? "breakdown" : "ok");
  return r.breakdown ? kBreakdown : kOk;
}

int cmd_pullback(const fs::path& out, const fs::path& config_path, const std::string& interp) {
  FlowSetup s = load_flow_config(config_path);
  if (!s.cfg.gauge.deturck) throw ConfigError("pullback needs a DeTurck run (gauge = deturck)");
  InterpolationScheme scheme;
  if (interp == "fourier") scheme = InterpolationScheme::fourier;
  else if (interp == "cubic") scheme = InterpolationScheme::cubic;
  else throw ConfigError("interpolation must be 'fourier' or 'cubic'");
  Run run("pullback", out);
  FlowResult r;
  try {
    r = run_logged(run, s.cfg, "diagnostics.csv");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const DefinitenessError& e) {
    throw ConfigError(e.what());
  }
  if (r.breakdown) {
    std::cerr << r.message << "\n";
    run.finish(s.config, s.seed, s.cfg.A, "breakdown");
    return kBreakdown;
  }
  const PullbackResult pb = diffeo_pullback(r.trajectory, scheme);
  write_states(run, "pulled", pb.trajectory, s.cfg.snapshot_every);
  {
    auto f = run.open("pulled_diagnostics.csv");
    f << diag_header();
    for (std::size_t i = 0; i < pb.trajectory.states.size(); ++i)
      f << diag_row(diagnose(pb.trajectory.states[i], pb.trajectory.times[i], 0.0));
  }
  json rep = {{"max_displacement", pb.max_displacement}, {"states", pb.trajectory.states.size()}};
  if (s.cfg.fixed_steps && pb.trajectory.states.size() >= 5)
    rep["plain_flow_residual"] = plain_flow_residual(pb.trajectory);
  else
    rep["plain_flow_residual"] = nullptr;
  std::cout << rep.dump() << "\n";
  run.open("pullback.json") << rep.dump(2) << "\n";
  run.finish(s.config, s.seed, s.cfg.A, "ok");
  return kOk;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in list");
    }
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"g2flow: closed G2-structures on flat tori"};
  app.require_subcommand(1);
  std::string out = "g2flow-out";
  int threads = 0;
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (0 = all cores)");

  std::uint64_t seed = 0;
  auto* cal = app.add_subcommand("calibrate-a", "fit the divergence constant A");
  int samples = 4, n = 16, max_mode = 2;
  std::vector<int> axes{1, 2};
  cal->add_option("--seed", seed)->required();
  cal->add_option("--samples", samples)->check(CLI::Range(1, 1000));
  cal->add_option("--n", n)->check(CLI::Range(4, 1024));
  cal->add_option("--axes", axes)->delimiter(',');
  cal->add_option("--max-mode", max_mode)->check(CLI::Range(1, 64));

  auto* chk = app.add_subcommand("check", "run a check suite");
  std::string suite;
  chk->add_option("--suite", suite)->required()->check(CLI::IsMember({"variation", "symbol", "identities"}));
  chk->add_option("--seed", seed)->required();

  auto* sym = app.add_subcommand("symbol", "print a principal symbol matrix");
  double lambda = -5.0, mu = -1.0, A = -0.5;
  std::string xi = "1,0,0,0,0,0,0", op = "P+Q";
  bool full = false;
  sym->add_option("--lambda", lambda)->capture_default_str();
  sym->add_option("--mu", mu)->capture_default_str();
  sym->add_option("--xi", xi, "7 comma-separated components")->capture_default_str();
  sym->add_option("--op", op)->check(CLI::IsMember({"P+Q", "P", "Q", "laplacian", "gauge"}))->capture_default_str();
  sym->add_option("--A", A)->capture_default_str();
  sym->add_option("--seed", seed, "background frame seed");
  sym->add_flag("--full", full, "all 35 directions instead of the closed 15");

  auto* flw = app.add_subcommand("flow", "integrate the flow from a JSON config");
  std::string config;
  flw->add_option("--config", config)->required();
  auto* pbk = app.add_subcommand("pullback", "DeTurck run followed by the diffeomorphism pullback");
  std::string interp = "fourier";
  pbk->add_option("--config", config)->required();
  pbk->add_option("--interp", interp)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  if (threads < 0) {
    std::cerr << "error: --threads must be >= 0\n";
    return kConfig;
  }
  set_thread_count(threads);

  try {
    if (*cal) return cmd_calibrate(out, seed, samples, n, axes, max_mode);
    if (*chk) return cmd_check(out, suite, seed);
    if (*sym) return cmd_symbol(out, lambda, mu, parse_list(xi), op, seed, A, full);
    if (*flw) return cmd_flow(out, config);
    if (*pbk) return cmd_pullback(out, config, interp);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kConfig;
}
