#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>

#include "CLI11.hpp"
#include "outpost/io.hpp"

namespace outpost::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string model;
  std::vector<int> n;
  std::uint64_t seed = 1;
  std::string out = "out";
  double tol = 0.1;
  std::string sign = "minus_c";
  int threads = 0;
};

void add_common(CLI::App* sub, Common& c, std::vector<int> default_n) {
  c.n = std::move(default_n);
  sub->add_option("--model", c.model, "model file (key=value lines)")->check(CLI::ExistingFile);
  sub->add_option("--n", c.n, "comma-separated list of n")->delimiter(',')->check(CLI::Range(1, 4096));
  sub->add_option("--seed", c.seed, "base seed");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--tol", c.tol, "tolerance override (Szego ratio budget at the largest n)")->check(CLI::PositiveNumber);
  sub->add_option("--sign", c.sign, "sign of c in the droplet-side Szego weight")
      ->check(CLI::IsMember({"minus_c", "plus_c", "auto"}));
  sub->add_option("--threads", c.threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
}

json common_json(const Common& c) {
  return {{"model", c.model}, {"n", c.n}, {"seed", c.seed}, {"out", c.out},
          {"tol", c.tol},     {"sign", c.sign}, {"threads", c.threads}};
}

SignConvention flip(SignConvention s) {
  return s == SignConvention::MinusC ? SignConvention::PlusC : SignConvention::MinusC;
}

struct Signs {
  SignConvention kernel = kKernelSign, mu = kMuSign, b2 = kB2Sign;
  json provenance;
};

// The mu and b2 families are tied to the kernel weight sign. "auto" arbitrates on the
// radial reference model with c = 1, where the two signs are distinguishable.
Signs resolve_signs(const std::string& sign) {
  Signs s;
  if (sign == "plus_c") {
    s.kernel = flip(kKernelSign), s.mu = flip(kMuSign), s.b2 = flip(kB2Sign);
  } else if (sign == "auto") {
    KernelSet ref(build_radial_model(1.5, std::exp(2.0)));
    const SignResolution res = resolve_sign_convention(ref, 64, true);
    for (const auto& f : res.families) {
      SignConvention& slot = f.family == "kernel" ? s.kernel : f.family == "mu" ? s.mu : s.b2;
      slot = *f.verdict;
      s.provenance[f.family] = {{"err_minus_c", f.err_minus}, {"err_plus_c", f.err_plus}};
    }
  }
  s.provenance["kernel"]["sign"] = sign_name(s.kernel);
  s.provenance["mu"]["sign"] = sign_name(s.mu);
  s.provenance["b2"]["sign"] = sign_name(s.b2);
  return s;
}

Model load_model(const Common& c) {
  require(!c.model.empty(), ErrorCode::ConfigError, "--model is required");
  return build_model(load_model_file(c.model));
}

json model_json(const Model& m) { return {{"file_text", model_params_text(m.params())}}; }

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  void write(const std::string& name, const std::string& content) {
    write_file_atomic(dir_ / name, content);
    names_.push_back(name);
  }
  void manifest(const std::string& command, const json& config) { write_manifest(dir_, command, config, names_); }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

std::string tag(int n) { return "_n" + std::to_string(n); }

// ---------------- commands ----------------

int cmd_model(const Common& c, int points, std::ostream& out) {
  const Model m = load_model(c);
  const Signs s = resolve_signs(c.sign);
  Outputs o(c.out);
  json summary = model_summary(m, s.mu);
  o.write("boundary_C1.csv", boundary_csv(m, Curve::C1, points).str());
  if (m.has_outpost()) o.write("boundary_C2.csv", boundary_csv(m, Curve::C2, points).str());
  o.write("model.json", summary.dump(2) + "\n");
  json cfg = common_json(c);
  cfg["points"] = points;
  cfg["model_params"] = model_json(m);
  cfg["signs"] = s.provenance;
  o.manifest("model", cfg);
  out << summary.dump(2) << "\n";
  return kOk;
}

int cmd_kernel(const Common& c, int grid, double extent, const std::vector<double>& w_fixed, std::ostream& out) {
  const Model m = load_model(c);
  const Signs s = resolve_signs(c.sign);
  require(grid >= 2, ErrorCode::InvalidParameter, "--grid must be at least 2");
  const double e = extent > 0 ? extent : 1.05 * m.outer_radius();
  KernelSet ks(m);
  Outputs o(c.out);
  for (int n : c.n) {
    const KernelEvaluator& K = ks.at(n);
    std::vector<std::pair<cplx, cplx>> pairs;
    pairs.reserve(static_cast<std::size_t>(grid) * grid);
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        const cplx z(-e + 2 * e * j / (grid - 1), -e + 2 * e * i / (grid - 1));
        pairs.emplace_back(z, w_fixed.empty() ? z : cplx(w_fixed[0], w_fixed[1]));
      }
    o.write("kernel" + tag(n) + ".csv", kernel_csv(kernel_points(K, pairs)).str());
    if (m.has_outpost()) {
      std::vector<double> tg;
      for (int k = -60; k <= 60; ++k) tg.push_back(0.05 * k);
      const DensityProfile p = outpost_profile(K, curve_point(m, Curve::C2, 0.0), tg, s.mu);
      o.write("profile" + tag(n) + ".csv", profile_csv(p.t, p.value, p.prediction).str());
    }
    out << "n = " << n << ": trace " << format_double(K.trace()) << "\n";
  }
  json cfg = common_json(c);
  cfg["grid"] = grid;
  cfg["extent"] = e;
  cfg["w"] = w_fixed.empty() ? json("diagonal") : json(w_fixed);
  cfg["model_params"] = model_json(m);
  cfg["signs"] = s.provenance;
  o.manifest("kernel", cfg);
  return kOk;
}

struct SampleOpts {
  int samples = 100;
  std::string method = "dpp";
  long mcmc_steps = 200000;
  long mcmc_burn_in = 20000;
  int mcmc_thin = 1;
  double margin = 1.2;
};

int cmd_sample(const Common& c, const SampleOpts& so, std::ostream& out) {
  const Model m = load_model(c);
  const Signs s = resolve_signs(c.sign);
  require(so.samples > 0, ErrorCode::InvalidParameter, "--samples must be positive");
  KernelSet ks(m);
  Outputs o(c.out);
  json stats = json::object();
  for (int n : c.n) {
    std::vector<std::vector<cplx>> pts;
    json st = {{"n", n}, {"method", so.method}};
    if (so.method == "dpp") {
      SampleConfig cfg;
      cfg.n_samples = so.samples;
      cfg.seed = c.seed;
      cfg.threads = c.threads;
      cfg.envelope_margin = so.margin;
      long proposals = 0, violations = 0;
      for (auto& smp : DppSampler(ks.at(n), cfg).draw_all()) {
        proposals += smp.proposals;
        violations += smp.envelope_violations;
        pts.push_back(std::move(smp.points));
      }
      st["proposals"] = proposals;
      st["envelope_violations"] = violations;
    } else {
      McmcConfig cfg;
      cfg.steps = so.mcmc_steps;
      cfg.burn_in = so.mcmc_burn_in;
      cfg.thin = so.mcmc_thin;
      cfg.seed = c.seed;
      McmcResult r = sample_gibbs_mcmc(m, n, cfg);
      st["acceptance"] = r.acceptance;
      st["step"] = r.step;
      st["chain_states"] = r.samples.size();
      const std::size_t keep = std::min<std::size_t>(r.samples.size(), so.samples);
      // evenly spaced states of the chain
      for (std::size_t i = 0; i < keep; ++i) pts.push_back(r.samples[i * r.samples.size() / keep]);
    }
    o.write("samples" + tag(n) + ".csv", samples_csv(pts).str());
    if (m.has_outpost()) {
      const OutlierStats x = outlier_stats(pts, m, neighbourhood_window(m));
      const OutlierStats y = outlier_stats(pts, m, belt_window(m, n));
      o.write("count_X" + tag(n) + ".csv", histogram_csv(x.histogram).str());
      o.write("count_Y" + tag(n) + ".csv", histogram_csv(y.histogram).str());
      st["X"] = {{"mean", x.mean}, {"variance", x.variance}};
      st["Y"] = {{"mean", y.mean}, {"variance", y.variance}};
      st["mu"] = mu_series(m.frame().r1(), m.frame().r2(), m.c(), s.mu);
      st["heine_mean"] = heine_mean(heine_dist(m.frame().r1(), m.frame().r2(), m.c()));
    }
    stats[std::to_string(n)] = st;
    out << "n = " << n << ": " << pts.size() << " samples\n";
  }
  o.write("sample_stats.json", stats.dump(2) + "\n");
  json cfg = common_json(c);
  cfg["samples"] = so.samples;
  cfg["method"] = so.method;
  cfg["envelope_margin"] = so.margin;
  if (so.method == "mcmc") cfg["mcmc"] = {{"steps", so.mcmc_steps}, {"burn_in", so.mcmc_burn_in}, {"thin", so.mcmc_thin}};
  cfg["model_params"] = model_json(m);
  cfg["signs"] = s.provenance;
  o.manifest("sample", cfg);
  return kOk;
}

struct VerifyOpts {
  std::vector<std::string> theorems{"all"};
  double eta = 0.3;
  double belt_m = 3.0;
};

int cmd_verify(const Common& c, const VerifyOpts& vo, std::ostream& out) {
  const Model m = load_model(c);
  const Signs s = resolve_signs(c.sign);
  VerifyOptions opts;
  opts.tol = c.tol;
  opts.eta = vo.eta;
  opts.M = vo.belt_m;
  opts.kernel_sign = s.kernel, opts.mu_sign = s.mu, opts.b2_sign = s.b2;
  std::vector<std::string> names;
  bool sign_check = false;
  for (const auto& t : vo.theorems) {
    if (t == "all") names = check_names();
    else if (t == "sign_convention") sign_check = true;
    else names.push_back(t);
  }
  KernelSet ks(m);
  std::vector<TheoremReport> reports = run_checks(ks, c.n, names, opts);
  if (sign_check) reports.push_back(resolve_sign_convention(ks, 64, false).report());
  Outputs o(c.out);
  std::map<std::string, int> seen;
  json summary = json::array();
  bool all_pass = true;
  for (const auto& r : reports) {
    // per-n checks are named by n, repeated multi-n checks by their index
    const int k = seen[r.theorem]++;
    std::string suffix = k ? "_" + std::to_string(k) : "";
    if (r.theorem == "berezin" && r.n.size() == 1) suffix = tag(r.n.front());
    const std::string file = "report_" + r.theorem + suffix + ".json";
    o.write(file, report_json(r).dump(2) + "\n");
    summary.push_back({{"theorem", r.theorem}, {"file", file}, {"pass", r.pass}});
    all_pass = all_pass && r.pass;
    out << (r.pass ? "PASS " : "FAIL ") << r.theorem << " max deviation " << format_double(r.max_deviation) << "\n";
  }
  o.write("summary.json", json{{"pass", all_pass}, {"reports", summary}}.dump(2) + "\n");
  json cfg = common_json(c);
  cfg["theorems"] = vo.theorems;
  cfg["eta"] = vo.eta;
  cfg["belt_M"] = vo.belt_m;
  cfg["model_params"] = model_json(m);
  cfg["signs"] = s.provenance;
  o.manifest("verify", cfg);
  return all_pass ? kOk : kCheckFailed;
}

int cmd_berezin(const Common& c, const std::vector<double>& radii, std::ostream& out) {
  const Model m = load_model(c);
  const Signs s = resolve_signs(c.sign);
  require(m.has_outpost(), ErrorCode::PreconditionViolated, "model has no outpost");
  VerifyOptions opts;
  opts.kernel_sign = s.kernel, opts.mu_sign = s.mu, opts.b2_sign = s.b2;
  KernelSet ks(m);
  std::vector<BerezinMass> rows;
  for (int n : c.n)
    for (double r : radii) {
      require(r > 1.0, ErrorCode::InvalidParameter, "Berezin radii |phi2(z)| must exceed 1");
      rows.push_back(berezin_mass(ks, n, m.frame().map().f(r * m.frame().ratio()), opts));
    }
  Outputs o(c.out);
  o.write("berezin.csv", berezin_csv(rows).str());
  json cfg = common_json(c);
  cfg["radii"] = radii;
  cfg["model_params"] = model_json(m);
  cfg["signs"] = s.provenance;
  o.manifest("berezin", cfg);
  out << rows.size() << " Berezin rows\n";
  return kOk;
}

struct HeineOpts {
  double r1 = 1.0, r2 = 1.5, c = 1.0;
  int kmax = 20;
};

int cmd_heine(const Common& c, HeineOpts ho, bool from_model, std::ostream& out) {
  std::optional<Model> m;
  if (from_model) {
    m = load_model(c);
    require(m->has_outpost(), ErrorCode::PreconditionViolated, "model has no outpost");
    ho.r1 = m->frame().r1(), ho.r2 = m->frame().r2(), ho.c = m->c();
  }
  require(ho.kmax >= 0, ErrorCode::InvalidParameter, "--kmax must be non-negative");
  const Signs s = resolve_signs(c.sign);
  const HeineDist h = heine_dist(ho.r1, ho.r2, ho.c);
  std::vector<double> pmf;
  for (int k = 0; k <= ho.kmax; ++k) pmf.push_back(heine_pmf(h, k));
  const double sum = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  Outputs o(c.out);
  o.write("heine.csv", pmf_csv(pmf).str());
  json info = {{"theta", h.theta}, {"q", h.q}, {"mean", heine_mean(h)}, {"pmf_sum", sum},
               {"mu", mu_series(ho.r1, ho.r2, ho.c, s.mu)}};
  // exact finite-n law of the outpost count for rotation-invariant models
  if (m && m->is_radial())
    for (int n : c.n) {
      const auto law = exact_count_law(*m, n, neighbourhood_window(*m));
      o.write("exact_count" + tag(n) + ".csv", pmf_csv(law).str());
      std::vector<double> he(std::max(law.size(), pmf.size()), 0.0);
      for (std::size_t k = 0; k < he.size(); ++k) he[k] = heine_pmf(h, static_cast<int>(k));
      info["total_variation"][std::to_string(n)] = total_variation(law, he);
    }
  o.write("heine.json", info.dump(2) + "\n");
  json cfg = common_json(c);
  cfg["r1"] = ho.r1, cfg["r2"] = ho.r2, cfg["c"] = ho.c, cfg["kmax"] = ho.kmax;
  if (m) cfg["model_params"] = model_json(*m);
  cfg["signs"] = s.provenance;
  o.manifest("heine", cfg);
  out << info.dump(2) << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Outpost ensembles: kernels, sampling and asymptotic checks", "outpost"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with option values; unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_version_flag("--version", std::string(kVersion));

  Common c_model, c_kernel, c_sample, c_verify, c_berezin, c_heine;

  auto* model = app.add_subcommand("model", "model summary and boundary curves");
  add_common(model, c_model, {});
  int points = 512;
  model->add_option("--points", points, "points per boundary curve")->check(CLI::PositiveNumber);

  auto* kernel = app.add_subcommand("kernel", "kernel grids and the outpost density profile");
  add_common(kernel, c_kernel, {64});
  int grid = 64;
  double extent = 0.0;
  std::vector<double> w_fixed;
  kernel->add_option("--grid", grid, "grid points per axis");
  kernel->add_option("--extent", extent, "half-width of the square grid (default: 1.05 x outer radius)");
  kernel->add_option("--w", w_fixed, "fixed second point re,im (default: the diagonal)")->delimiter(',')->expected(2);

  auto* sample = app.add_subcommand("sample", "draw ensembles");
  add_common(sample, c_sample, {32});
  SampleOpts so;
  sample->add_option("--samples", so.samples, "samples per n");
  sample->add_option("--method", so.method, "dpp or mcmc")->check(CLI::IsMember({"dpp", "mcmc"}));
  sample->add_option("--mcmc-steps", so.mcmc_steps, "MCMC single-site updates after burn-in");
  sample->add_option("--mcmc-burn-in", so.mcmc_burn_in, "MCMC burn-in updates");
  sample->add_option("--mcmc-thin", so.mcmc_thin, "record every thin * n updates");
  sample->add_option("--envelope-margin", so.margin, "DPP envelope margin")->check(CLI::Range(1.0, 100.0));

  auto* verify = app.add_subcommand("verify", "asymptotic checks with JSON reports");
  add_common(verify, c_verify, {32, 64, 128});
  VerifyOpts vo;
  std::vector<std::string> choices = check_names();
  choices.push_back("all");
  choices.push_back("sign_convention");
  verify->add_option("--theorem", vo.theorems, "checks to run")->delimiter(',')->check(CLI::IsMember(choices));
  verify->add_option("--eta", vo.eta, "minimum separation of same-curve pairs")->check(CLI::PositiveNumber);
  verify->add_option("--belt-m", vo.belt_m, "belt constant M")->check(CLI::PositiveNumber);

  auto* berezin = app.add_subcommand("berezin", "Berezin mass table against |phi2(z)|");
  add_common(berezin, c_berezin, {64});
  std::vector<double> radii{1.25, 1.5, 2.0, 3.0, 5.0};
  berezin->add_option("--r", radii, "values of |phi2(z)|")->delimiter(',');

  auto* heine = app.add_subcommand("heine", "Heine pmf of the outpost count");
  add_common(heine, c_heine, {});
  HeineOpts ho;
  heine->add_option("--r1", ho.r1)->check(CLI::PositiveNumber);
  heine->add_option("--r2", ho.r2)->check(CLI::PositiveNumber);
  heine->add_option("--c", ho.c);
  heine->add_option("--kmax", ho.kmax);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (model->parsed()) return cmd_model(c_model, points, out);
    if (kernel->parsed()) return cmd_kernel(c_kernel, grid, extent, w_fixed, out);
    if (sample->parsed()) return cmd_sample(c_sample, so, out);
    if (verify->parsed()) return cmd_verify(c_verify, vo, out);
    if (berezin->parsed()) return cmd_berezin(c_berezin, radii, out);
    if (heine->parsed()) {
      require(c_heine.model.empty() || (heine->count("--r1") + heine->count("--r2") + heine->count("--c")) == 0,
              ErrorCode::ConfigError, "--model and --r1/--r2/--c are exclusive");
      return cmd_heine(c_heine, ho, !c_heine.model.empty(), out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kUsage : kModuleError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kModuleError;
  }
  return kUsage;
}

}  // namespace outpost::cli
