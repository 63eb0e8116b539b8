// mhdbl: command-line front end.
//
//   mhdbl classify | profile | spectrum | evolve | energy  [options]
//   mhdbl config-dump <command> [options]
//
// Exit codes: 0 success (a detected blow-up included), 2 configuration
// errors, 3 numerical failures.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "mhdbl/closed_form.hpp"
#include "mhdbl/energy.hpp"
#include "mhdbl/evolve.hpp"
#include "mhdbl/io.hpp"
#include "mhdbl/regimes.hpp"
#include "mhdbl/shear.hpp"
#include "mhdbl/stability.hpp"

namespace fs = std::filesystem;
using namespace mhdbl;
using io::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options that live both on the command line and in JSON config files.
class Params {
 public:
  using Target = std::variant<double*, int*, std::string*, bool*, std::uint64_t*, std::vector<int>*,
                              std::vector<double>*>;

  explicit Params(CLI::App* app) : app_(app) {}

  // hashed = false keeps a key out of the config hash (output location).
  template <class T>
  void add(const std::string& key, T& target, const std::string& help, bool hashed = true) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt = nullptr;
    if constexpr (std::is_same_v<T, bool>) {
      opt = app_->add_flag(flag, target, help);
    } else {
      opt = app_->add_option(flag, target, help);
      if constexpr (std::is_same_v<T, std::vector<int>> || std::is_same_v<T, std::vector<double>>)
        opt->delimiter(',');
    }
    opt->capture_default_str();
    entries_.push_back({key, &target, opt, hashed});
  }

  json to_json(bool hashed_only) const {
    json j = json::object();
    for (const auto& e : entries_) {
      if (hashed_only && !e.hashed) continue;
      std::visit([&](auto* p) { j[e.key] = *p; }, e.target);
    }
    return j;
  }

  // Values from a config object; the command line wins over the file.
  void merge(const json& obj) {
    if (!obj.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
      auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.key == key; });
      if (it == entries_.end()) throw ConfigError("config: unknown key '" + key + "' for '" + app_->get_name() + "'");
      if (it->opt->count() > 0) continue;
      try {
        std::visit([&](auto* p) { *p = value.get<std::remove_pointer_t<decltype(p)>>(); }, it->target);
      } catch (const json::exception&) {
        throw ConfigError("config: key '" + key + "' has the wrong type");
      }
    }
  }

 private:
  struct Entry {
    std::string key;
    Target target;
    CLI::Option* opt;
    bool hashed;
  };
  CLI::App* app_;
  std::vector<Entry> entries_;
};

std::string default_out_dir() {
  const char* env = std::getenv("MHDBL_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : ".";
}

Stretching parse_stretching(const std::string& kind, double beta) {
  if (kind == "uniform") return Stretching::uniform();
  if (kind == "tanh") return Stretching::tanh_cluster(beta);
  throw InvalidParameter("unknown stretching '" + kind + "' (expected uniform|tanh)");
}

ShearFlow load_shear(const std::string& spec, double amplitude) {
  if (spec.size() > 4 && spec.substr(spec.size() - 4) == ".csv") return load_profile_csv(spec);
  return builtin_profile(spec, amplitude);
}

constexpr int kNormSamples = 4000;

// ---------------------------------------------------------------------------

struct IoConfig {
  std::string out = default_out_dir();
  std::string format = "csv";
};

void add_io(Params& p, IoConfig& io) {
  p.add("out", io.out, "output directory (default from MHDBL_OUT_DIR)", false);
  p.add("format", io.format, "data file format: csv|json");
}

struct ClassifyConfig {
  double re = 0.0, rm = 0.0, s = 0.0, ha = 0.0;
  std::string orientation = "transverse";
  double big = 100.0, same = 10.0;
};

struct ProfileConfig {
  std::string model = "hartmann";
  double uinf = 1.0;
  double zmax = 20.0;
  int n = 256;
  std::string stretch = "uniform";
  double beta = 2.0;
  double binf_re = 1.0, binf_im = 0.0;
  std::vector<double> xi{1.0};
  IoConfig io;
};

struct SpectrumConfig {
  std::string model = "lp";
  std::string profile = "critical-bump";
  double amplitude = 1024.0;
  int kmin = 16, kmax = 256;
  std::vector<int> k;
  int n = 400;
  double zmax = 20.0;
  std::string stretch = "tanh";
  double beta = 2.0;
  double nu = 1.0, kappa = 0.0, s = 1.0, eta = 1.0;
  bool refine = true;
  IoConfig io;
};

struct EvolveConfig {
  std::string model = "lsp";
  std::string profile = "critical-bump";
  double amplitude = 64.0;
  int n = 200;
  double zmax = 20.0;
  std::string stretch = "tanh";
  double beta = 2.0;
  int modes = 8;
  double tend = 1.0, dt = 1e-3;
  bool fixed_dt = false;
  double kappa = 1.0, nu = 1.0, s = 1.0, eta = 1.0;
  double uinf = 0.0, binf = 1.0;
  int init_kmax = 2;
  double init_amplitude = 1.0;
  int record_every = 10;
  int snapshot_every = 0;
  std::uint64_t seed = 1;
  IoConfig io;
};

struct EnergyConfig {
  std::string trajectory;
  double rel_tol = 1e-3;
  IoConfig io;
};

struct Context {
  std::string hash;
  fs::path out;
  io::Format format = io::Format::Csv;
};

Context make_context(const IoConfig& io, const std::string& command, const Params& p) {
  Context c;
  c.hash = io::config_hash(json{{"command", command}, {"config", p.to_json(true)}});
  c.format = io::format_from_string(io.format);
  c.out = io.out;
  io::ensure_directory(c.out);
  return c;
}

json summary_head(const std::string& kind, const std::string& hash) { return io::envelope(kind, hash); }

// ---------------------------------------------------------------------------

int cmd_classify(const ClassifyConfig& c, const Params& p) {
  const Orientation o = orientation_from_string(c.orientation);
  const bool has_s = c.s != 0.0, has_ha = c.ha != 0.0;
  if (has_s == has_ha) throw InvalidParameter("classify: give exactly one of --s and --ha");
  const Parameters par = has_ha ? Parameters::from_hartmann(c.re, c.rm, c.ha, o) : Parameters{c.re, c.rm, c.s, o};
  const RegimeReport r = classify(par, RatioThresholds{c.big, c.same});
  json j = summary_head("regime_report", io::config_hash(json{{"command", "classify"}, {"config", p.to_json(true)}}));
  j["regime"] = std::string(to_string(r.regime));
  j["lambda"] = r.lambda;
  j["delta"] = r.delta ? json(*r.delta) : json(nullptr);
  j["orientation"] = std::string(to_string(r.orientation));
  j["re"] = par.re;
  j["rm"] = par.rm;
  j["s"] = par.s;
  j["ha"] = r.ha;
  json checks = json::array();
  for (const auto& ch : r.constraints_checked)
    checks.push_back({{"name", ch.name}, {"ratio", ch.ratio}, {"relation", std::string(to_string(ch.verdict))}});
  j["constraints"] = checks;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_profile(const ProfileConfig& c, const Params& p) {
  const Context ctx = make_context(c.io, "profile", p);
  const Grid g(c.n, c.zmax, parse_stretching(c.stretch, c.beta));
  json j = summary_head("profile_summary", ctx.hash);
  j["model"] = c.model;
  if (c.model == "hartmann") {
    const HartmannProfile prof{c.uinf};
    io::TableWriter w(ctx.out / "profile", ctx.format, ctx.hash, "profile", {"z", "u", "b", "du", "d2u"});
    for (int i = 0; i < g.n(); ++i) {
      const double z = g.z(i);
      const auto v = prof(z);
      w.row(std::vector<double>{z, v.u, v.b, prof.du(z), prof.d2u(z)});
    }
    w.close();
    const auto ra = hartmann_residual(prof, g, DerivativeMode::Analytic);
    const auto rf = hartmann_residual(prof, g, DerivativeMode::FiniteDifference);
    j["u_wall"] = prof(0.0).u;
    j["residual_analytic"] = ra.max();
    j["residual_fd"] = rf.max();
    j["files"] = {w.path().string()};
  } else if (c.model == "shercliff") {
    if (c.xi.empty()) throw InvalidParameter("profile: --xi needs at least one frequency");
    const ShercliffProfile prof{cplx{c.binf_re, c.binf_im}};
    io::TableWriter w(ctx.out / "profile", ctx.format, ctx.hash, "profile",
                      {"xi", "z", "u_re", "u_im", "b_re", "b_im"});
    json per_xi = json::array();
    for (double xi : c.xi) {
      for (int i = 0; i < g.n(); ++i) {
        const auto v = prof(xi, g.z(i));
        w.row(std::vector<double>{xi, g.z(i), v.u_hat.real(), v.u_hat.imag(), v.b_hat.real(), v.b_hat.imag()});
      }
      per_xi.push_back({{"xi", xi},
                        {"residual_analytic", shercliff_residual(prof, xi, g, DerivativeMode::Analytic).max()},
                        {"residual_fd", shercliff_residual(prof, xi, g, DerivativeMode::FiniteDifference).max()}});
    }
    w.close();
    j["frequencies"] = per_xi;
    j["files"] = {w.path().string()};
  } else {
    throw InvalidParameter("profile: unknown model '" + c.model + "' (expected hartmann|shercliff)");
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

std::vector<int> wavenumbers(const SpectrumConfig& c) {
  if (!c.k.empty()) return c.k;
  if (c.kmin <= 0 || c.kmax < c.kmin) throw InvalidParameter("spectrum: need 0 < kmin <= kmax");
  std::vector<int> ks;
  for (long k = c.kmin; k <= c.kmax; k *= 2) ks.push_back(static_cast<int>(k));
  return ks;
}

int cmd_spectrum(const SpectrumConfig& c, const Params& p) {
  const Context ctx = make_context(c.io, "spectrum", p);
  const ScanModel model = scan_model_from_string(c.model);
  const ShearFlow U = load_shear(c.profile, c.amplitude);
  const std::vector<int> ks = wavenumbers(c);
  const Stretching st = parse_stretching(c.stretch, c.beta);
  const Grid g(c.n, c.zmax, st);
  std::unique_ptr<Grid> g2;
  if (c.refine) g2 = std::make_unique<Grid>(2 * c.n, 2.0 * c.zmax, st);
  const ScanCoefficients coef{c.nu, c.kappa, c.s, c.eta};

  // validate the list before any output is produced
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] <= 0 || (i > 0 && ks[i] <= ks[i - 1]))
      throw InvalidParameter("spectrum: wavenumbers must be positive and strictly increasing");

  io::TableWriter w(ctx.out / "spectrum", ctx.format, ctx.hash, "spectrum", {"k", "rate", "rate_refined"});
  SpectrumScan coarse, fine;
  coarse.model = fine.model = model;
  coarse.profile = fine.profile = U.name();
  for (int k : ks) {
    const double r = scan_rate(model, U, k, g, coef);
    const double r2 = g2 ? scan_rate(model, U, k, *g2, coef) : std::numeric_limits<double>::quiet_NaN();
    coarse.k_list.push_back(k);
    coarse.rates.push_back(r);
    fine.k_list.push_back(k);
    fine.rates.push_back(r2);
    w.row(std::vector<double>{static_cast<double>(k), r, r2});
  }
  w.close();
  coarse.fit = fit_power_law(coarse.k_list, coarse.rates);
  if (g2) fine.fit = fit_power_law(fine.k_list, fine.rates);

  double bound = std::numeric_limits<double>::infinity();
  json constants = nullptr;
  if (model == ScanModel::LSP || model == ScanModel::LMHDBL) {
    const ShearNorms norms = weighted_norms(U, c.zmax, kNormSamples);
    if (model == ScanModel::LSP) {
      const LspConstants k = constants_lsp(norms, c.nu);
      bound = k.c_prime;
      constants = {{"c", k.c}, {"alpha", k.alpha}, {"c_prime", k.c_prime}};
    } else {
      const LmhdblConstants k = constants_lmhdbl(norms, c.s, c.eta);
      bound = k.c_prime;
      constants = {{"a", k.a}, {"b", k.b}, {"c_prime", k.c_prime}};
    }
  }
  const Verdict v = verdict(coarse, bound, {}, g2 ? &fine : nullptr);

  json j = summary_head("spectrum_summary", ctx.hash);
  j["model"] = std::string(to_string(model));
  j["profile"] = U.name();
  j["k"] = ks;
  j["rates"] = coarse.rates;
  j["fit"] = {{"p", io::number(coarse.fit.p)},
              {"c", io::number(coarse.fit.c)},
              {"residual", io::number(coarse.fit.residual)},
              {"n_points", coarse.fit.n_points}};
  if (g2) {
    j["refined_fit_p"] = io::number(fine.fit.p);
    j["max_relative_change"] = max_relative_change(coarse, fine);
  }
  j["max_rate"] = *std::max_element(coarse.rates.begin(), coarse.rates.end());
  j["bound"] = io::number(bound);
  j["constants"] = constants;
  j["verdict"] = std::string(to_string(v));
  j["files"] = {w.path().string()};
  std::cout << j.dump(2) << '\n';
  return 0;
}

json trajectory_document(const Context& ctx, const EvolveConfig& c, const SimState& st,
                         const std::optional<ShearFlow>& U, const std::vector<EnergyRecord>& records,
                         const RunSummary& sum, const std::string& status) {
  json j = io::envelope("trajectory", ctx.hash);
  j["status"] = status;
  j["model"] = std::string(to_string(st.model));
  j["coefficients"] = {{"kappa", c.kappa}, {"nu", c.nu}, {"s", c.s}, {"eta", c.eta}};
  j["grid"] = {{"n", c.n}, {"zmax", c.zmax}, {"stretch", c.stretch}, {"beta", c.beta}, {"modes", c.modes}};
  j["seed"] = c.seed;
  if (U) {
    j["profile"] = {{"name", U->name()}, {"amplitude", U->amplitude()}};
    j["shear_norms"] = io::shear_norms_to_json(weighted_norms(*U, c.zmax, kNormSamples));
  } else {
    j["profile"] = nullptr;
    j["shear_norms"] = nullptr;
  }
  j["summary"] = {{"steps", sum.steps},
                  {"t_final", st.t},
                  {"blowup", sum.blowup},
                  {"dt_min", io::number(sum.dt_min)},
                  {"dt_max", sum.dt_max}};
  j["records"] = io::records_to_json(records);
  return j;
}

int cmd_evolve(const EvolveConfig& c, const Params& p) {
  const Context ctx = make_context(c.io, "evolve", p);
  const EvolveModel model = evolve_model_from_string(c.model);
  if (c.record_every < 1) throw InvalidParameter("evolve: record_every must be >= 1");
  if (c.snapshot_every < 0) throw InvalidParameter("evolve: snapshot_every must be >= 0");
  auto g = std::make_shared<const Grid>(c.n, c.zmax, parse_stretching(c.stretch, c.beta), c.modes);
  std::optional<ShearFlow> U;
  if (is_linear(model)) U = load_shear(c.profile, c.amplitude);

  FarField far;
  if (!is_linear(model)) {
    const double ui = c.uinf, bi = c.binf;
    if (ui != 0.0) far.u_inf = [ui](double, double) { return ui; };
    far.b_inf = [bi](double, double) { return bi; };
  }
  const EvolveCoefficients coef{c.kappa, c.nu, c.s, c.eta};
  SimState st = make_state(model, g, random_smooth_initial(*g, model, c.seed, c.init_kmax, c.init_amplitude), coef,
                           far, U);

  EnergyRecorder rec(c.record_every);
  rec.start(st);
  std::vector<std::string> files;
  int step_count = 0;
  auto snap = [&](const SimState& s, const StepReport&) {
    ++step_count;
    if (c.snapshot_every > 0 && step_count % c.snapshot_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%06d", step_count);
      io::write_snapshot(ctx.out / name, ctx.format, ctx.hash, *g, s.field, s.t);
    }
  };

  DtPolicy policy;
  policy.dt_max = c.dt;
  policy.fixed = c.fixed_dt;
  RunSummary sum;
  try {
    sum = run(st, c.tend, policy, {std::ref(rec), snap});
  } catch (const NumericalError&) {
    rec.finish(st);
    sum.steps = step_count;
    io::write_json(ctx.out / "trajectory.json", trajectory_document(ctx, c, st, U, rec.records(), sum, "failed"));
    throw;
  }
  rec.finish(st);

  const fs::path traj = ctx.out / "trajectory.json";
  io::write_json(traj, trajectory_document(ctx, c, st, U, rec.records(), sum, sum.blowup ? "blowup" : "ok"));
  files.push_back(traj.string());
  if (ctx.format == io::Format::Csv) {
    io::write_records_table(ctx.out / "trajectory", ctx.format, ctx.hash, rec.records());
    files.push_back((ctx.out / "trajectory.csv").string());
  }
  io::write_snapshot(ctx.out / "snapshot_final", ctx.format, ctx.hash, *g, st.field, st.t);
  files.push_back((ctx.out / (ctx.format == io::Format::Csv ? "snapshot_final.csv" : "snapshot_final.json")).string());

  json j = summary_head("evolve_summary", ctx.hash);
  j["model"] = std::string(to_string(model));
  j["steps"] = sum.steps;
  j["t_final"] = st.t;
  j["blowup"] = sum.blowup;
  j["dt_min"] = io::number(sum.dt_min);
  j["dt_max"] = sum.dt_max;
  j["cfl_advective"] = sum.last.cfl_advective;
  j["cfl_magnetic"] = sum.last.cfl_magnetic;
  json mx = json::object();
  for (const auto& [k, v] : sum.last.max_norms) mx[k] = io::number(v);
  j["max_norms"] = mx;
  j["records"] = rec.records().size();
  j["files"] = files;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_energy(const EnergyConfig& c, const Params& p) {
  const Context ctx = make_context(c.io, "energy", p);
  const fs::path in = c.trajectory.empty() ? ctx.out / "trajectory.json" : fs::path(c.trajectory);
  const json doc = io::read_json(in);
  std::vector<EnergyRecord> records;
  EvolveModel model;
  double nu = 1.0, s = 1.0, eta = 1.0;
  std::optional<ShearNorms> norms;
  try {
    if (doc.at("schema_version").get<int>() != io::kSchemaVersion)
      throw ConfigError("energy: unsupported trajectory schema_version");
    model = evolve_model_from_string(doc.at("model").get<std::string>());
    records = io::records_from_json(doc.at("records"));
    const json& k = doc.at("coefficients");
    nu = k.at("nu").get<double>();
    s = k.at("s").get<double>();
    eta = k.at("eta").get<double>();
    if (!doc.at("shear_norms").is_null()) norms = io::shear_norms_from_json(doc.at("shear_norms"));
  } catch (const json::exception& e) {
    throw ConfigError("energy: malformed trajectory '" + in.string() + "': " + e.what());
  }
  if (records.size() < 2) throw InvalidParameter("energy: trajectory needs at least two records");

  InequalityTolerance tol;
  tol.rel = c.rel_tol;
  json j = summary_head("energy_summary", ctx.hash);
  j["model"] = std::string(to_string(model));
  j["trajectory_hash"] = doc.value("config_hash", "");
  j["records"] = records.size();

  io::TableWriter w(ctx.out / "energy", ctx.format, ctx.hash, "energy", {"t", "check", "lhs", "rhs", "pass"});
  json checks = json::array(), gronwall = json::array();
  bool all = true;
  auto emit = [&](const std::string& name, const std::vector<IntervalVerdict>& v) {
    int fails = 0;
    for (const auto& x : v) {
      w.row({x.t, name, x.lhs, x.rhs, x.pass});
      fails += x.pass ? 0 : 1;
    }
    checks.push_back({{"name", name}, {"intervals", v.size()}, {"failures", fails}, {"pass", fails == 0}});
    all = all && fails == 0;
  };
  auto fit = [&](GronwallForm f) {
    const GronwallResult r = check_gronwall(records, f, std::nullopt, nu);
    gronwall.push_back({{"form", std::string(to_string(f))},
                        {"m", r.m_used},
                        {"margin", io::number(r.margin)},
                        {"pass", r.pass}});
    all = all && r.pass;
  };

  if (model == EvolveModel::LSP) {
    if (!norms) throw ConfigError("energy: trajectory lacks shear norms");
    const LspConstants k = constants_lsp(*norms, nu);
    j["constants"] = {{"c", k.c}, {"alpha", k.alpha}, {"c_prime", k.c_prime}};
    emit("ineq_omega", check_ineq_omega(records, nu, k.c, tol));
    fit(GronwallForm::LspVorticity);
    fit(GronwallForm::LspTimeDerivative);
  } else if (model == EvolveModel::LMHDBL) {
    if (!norms) throw ConfigError("energy: trajectory lacks shear norms");
    const LmhdblConstants k = constants_lmhdbl(*norms, s, eta);
    j["constants"] = {{"a", k.a}, {"b", k.b}, {"c_prime", k.c_prime}};
    emit("lmhdbl_differential", check_lmhdbl_differential(records, k.c_prime, s, eta, tol));
    fit(GronwallForm::LmhdblModified);
    fit(GronwallForm::LmhdblPrimitive);
  } else {
    j["constants"] = nullptr;
  }
  w.close();
  j["applicable"] = model == EvolveModel::LSP || model == EvolveModel::LMHDBL;
  j["checks"] = checks;
  j["gronwall"] = gronwall;
  j["all_pass"] = all;
  j["files"] = {w.path().string()};
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  bool dump = false;
  if (!args.empty() && args[0] == "config-dump") {
    dump = true;
    args.erase(args.begin());
    if (args.empty()) {
      std::cerr << "config-dump: name a command (classify|profile|spectrum|evolve|energy)\n";
      return kExitConfig;
    }
  }

  CLI::App app{"MHD boundary-layer laboratory"};
  app.require_subcommand(1);
  app.footer("mhdbl config-dump <command> [options] prints the effective configuration as JSON.");

  std::string config_path;
  auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config_path, "JSON configuration file"); };

  ClassifyConfig cc;
  auto* s_classify = app.add_subcommand("classify", "classify a parameter set into a boundary-layer regime");
  Params pc(s_classify);
  pc.add("re", cc.re, "Reynolds number Re");
  pc.add("rm", cc.rm, "magnetic Reynolds number Rm");
  pc.add("s", cc.s, "coupling parameter S (0: derive from --ha)");
  pc.add("ha", cc.ha, "Hartmann number (0: derive from --s)");
  pc.add("orientation", cc.orientation, "field orientation: transverse|tangent");
  pc.add("big", cc.big, "ratio counted as >>");
  pc.add("same", cc.same, "ratio band counted as ~");
  add_config(s_classify);

  ProfileConfig cp;
  auto* s_profile = app.add_subcommand("profile", "tabulate Hartmann or Shercliff layer profiles");
  Params pp(s_profile);
  pp.add("model", cp.model, "hartmann|shercliff");
  pp.add("uinf", cp.uinf, "far-field velocity (hartmann)");
  pp.add("zmax", cp.zmax, "truncation height");
  pp.add("n", cp.n, "number of z-nodes");
  pp.add("stretch", cp.stretch, "node distribution: uniform|tanh");
  pp.add("beta", cp.beta, "tanh clustering strength");
  pp.add("binf_re", cp.binf_re, "far-field magnetic mode, real part (shercliff)");
  pp.add("binf_im", cp.binf_im, "far-field magnetic mode, imaginary part (shercliff)");
  pp.add("xi", cp.xi, "tangential frequencies (shercliff), comma separated");
  add_io(pp, cp.io);
  add_config(s_profile);

  SpectrumConfig cs;
  auto* s_spectrum = app.add_subcommand("spectrum", "growth rates of a linearized model over wavenumbers");
  Params ps(s_spectrum);
  ps.add("model", cs.model, "lp|damped-lp|lsp|lmhdbl");
  ps.add("profile", cs.profile, "shear profile: hartmann-like|critical-bump|linear|<file>.csv");
  ps.add("amplitude", cs.amplitude, "profile amplitude");
  ps.add("kmin", cs.kmin, "smallest wavenumber of the doubling list");
  ps.add("kmax", cs.kmax, "largest wavenumber of the doubling list");
  ps.add("k", cs.k, "explicit wavenumber list (overrides kmin/kmax)");
  ps.add("n", cs.n, "number of z-nodes");
  ps.add("zmax", cs.zmax, "truncation height");
  ps.add("stretch", cs.stretch, "node distribution: uniform|tanh");
  ps.add("beta", cs.beta, "tanh clustering strength");
  ps.add("nu", cs.nu, "magnetic diffusivity nu (lsp)");
  ps.add("kappa", cs.kappa, "damping kappa (damped-lp)");
  ps.add("s", cs.s, "coupling S (lmhdbl)");
  ps.add("eta", cs.eta, "resistivity ratio eta (lmhdbl)");
  ps.add("refine", cs.refine, "repeat the scan with (2n, 2 zmax) and require agreement");
  add_io(ps, cs.io);
  add_config(s_spectrum);

  EvolveConfig ce;
  auto* s_evolve = app.add_subcommand("evolve", "time-integrate a model from random smooth data");
  Params pe(s_evolve);
  pe.add("model", ce.model, "damped-prandtl|mixed-ps|mhdbl|lp|lsp|lmhdbl");
  pe.add("profile", ce.profile, "background shear for linear models");
  pe.add("amplitude", ce.amplitude, "profile amplitude");
  pe.add("n", ce.n, "number of z-nodes");
  pe.add("zmax", ce.zmax, "truncation height");
  pe.add("stretch", ce.stretch, "node distribution: uniform|tanh");
  pe.add("beta", ce.beta, "tanh clustering strength");
  pe.add("modes", ce.modes, "number of x-modes (even)");
  pe.add("tend", ce.tend, "final time");
  pe.add("dt", ce.dt, "time step (upper bound unless --fixed-dt)");
  pe.add("fixed_dt", ce.fixed_dt, "use dt as given, skipping the CFL control");
  pe.add("kappa", ce.kappa, "damping kappa (damped-prandtl)");
  pe.add("nu", ce.nu, "diffusivity nu (mixed-ps, lsp)");
  pe.add("s", ce.s, "coupling S (mhdbl, lmhdbl)");
  pe.add("eta", ce.eta, "resistivity ratio eta (mhdbl, lmhdbl)");
  pe.add("uinf", ce.uinf, "constant far-field velocity (nonlinear models)");
  pe.add("binf", ce.binf, "constant far-field magnetic field (nonlinear models)");
  pe.add("init_kmax", ce.init_kmax, "highest wavenumber of the initial data");
  pe.add("init_amplitude", ce.init_amplitude, "initial data amplitude");
  pe.add("record_every", ce.record_every, "steps between energy records");
  pe.add("snapshot_every", ce.snapshot_every, "steps between field snapshots (0: final only)");
  pe.add("seed", ce.seed, "random seed of the initial data");
  add_io(pe, ce.io);
  add_config(s_evolve);

  EnergyConfig cn;
  auto* s_energy = app.add_subcommand("energy", "check the energy inequalities along a trajectory");
  Params pn(s_energy);
  pn.add("trajectory", cn.trajectory, "trajectory.json from evolve (default: <out>/trajectory.json)");
  pn.add("rel_tol", cn.rel_tol, "relative tolerance of the per-interval checks");
  add_io(pn, cn.io);
  add_config(s_energy);

  app.add_subcommand("config-dump", "print the effective configuration of a command")->allow_extras();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  struct Command {
    CLI::App* app;
    Params* params;
  };
  const std::vector<Command> commands{
      {s_classify, &pc}, {s_profile, &pp}, {s_spectrum, &ps}, {s_evolve, &pe}, {s_energy, &pn}};
  const auto it = std::find_if(commands.begin(), commands.end(), [](const Command& c) { return c.app->parsed(); });
  if (it == commands.end()) {
    std::cerr << "config-dump: name a command (classify|profile|spectrum|evolve|energy)\n";
    return kExitConfig;
  }
  const std::string name = it->app->get_name();

  try {
    if (!config_path.empty()) {
      json cfg = io::read_json(config_path);
      if (cfg.is_object() && cfg.contains("config")) {
        if (cfg.value("command", name) != name)
          throw ConfigError("config: file is for '" + cfg.value("command", std::string()) + "', not '" + name + "'");
        cfg = cfg.at("config");
      }
      it->params->merge(cfg);
    }
    if (dump) {
      json j;
      j["schema_version"] = io::kSchemaVersion;
      j["tool_version"] = io::kToolVersion;
      j["command"] = name;
      j["config"] = it->params->to_json(false);
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (name == "classify") return cmd_classify(cc, pc);
    if (name == "profile") return cmd_profile(cp, pp);
    if (name == "spectrum") return cmd_spectrum(cs, ps);
    if (name == "evolve") return cmd_evolve(ce, pe);
    return cmd_energy(cn, pn);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
