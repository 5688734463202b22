// crossreg: command-line front end. Exit codes: 0 success, 1 analysis
// failure, 2 input error.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "crossreg/config.hpp"
#include "crossreg/report.hpp"

using namespace crossreg;

namespace {

constexpr int kOk = 0, kAnalysisFailure = 1, kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string file;
  std::vector<std::string> params;
  std::string output;
  std::optional<double> mu;
};

void add_common(CLI::App* c, Common& o) {
  c->add_option("file", o.file, "system file (YAML)")->required();
  c->add_option("--param", o.params, "parameter override k=v (repeatable)");
  c->add_option("--mu", o.mu, "shorthand for --param mu=v");
  c->add_option("-o,--output", o.output, "write the report here instead of stdout");
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("bad number '" + s + "' in " + what);
  }
}

ParamMap overrides(const Common& o) {
  ParamMap m;
  for (const std::string& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--param expects k=v, got '" + kv + "'");
    m[kv.substr(0, eq)] = parse_number(kv.substr(eq + 1), "--param");
  }
  if (o.mu) m["mu"] = *o.mu;
  return m;
}

// Writes to the output file or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void emit(const Json& j, const std::string& path) {
  Sink s(path);
  s.os() << j.dump(2) << "\n";
}

Json header(const SystemConfig& c, const ParamMap& over) {
  Json j;
  j["system"] = c.name.empty() ? c.source : c.name;
  ParamMap p = c.params;
  for (const auto& [k, v] : over) p[k] = v;
  Json pj = Json::object();
  for (const auto& [k, v] : p) pj[k] = number(v);
  j["params"] = pj;
  return j;
}

int cmd_classify(const Common& o) {
  const SystemConfig c = load_config(o.file);
  const ParamMap over = overrides(o);
  Json j = header(c, over);
  const ClassificationResult r = classify_origin(c.system(over));
  j.update(to_json(r));
  emit(j, o.output);
  return kOk;
}

struct RegularizeOpts {
  int grid = 200;
  double half = 0.0;
  int dump_grid = 0;
  double box = 0.0;
};

int dump_grid(const RegularizedField& f, const RegularizeOpts& ro, const std::string& out) {
  const auto& sp = f.spec();
  const double box = ro.box > 0 ? ro.box : 4.0 * std::max(sp.epsilon, sp.eta);
  Sink s(out);
  std::ostream& os = s.os();
  os << "x1,x2,Z1,Z2,norm\n";
  char buf[160];
  const int n = ro.dump_grid;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Point p{-box + 2.0 * box * (i + 0.5) / n, -box + 2.0 * box * (k + 0.5) / n};
      const Vec2 z = f(p);
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g\n", p[0], p[1], z[0], z[1], std::hypot(z[0], z[1]));
      os << buf;
    }
  return kOk;
}

int cmd_regularize(const Common& o, const RegularizeOpts& ro) {
  const SystemConfig c = load_config(o.file);
  const ParamMap over = overrides(o);
  const RegularizedField f = c.regularized(over);
  if (ro.dump_grid > 0) return dump_grid(f, ro, o.output);

  Json j = header(c, over);
  const auto& sp = f.spec();
  j["regularization"] = {{"epsilon", sp.epsilon}, {"eta", sp.eta}, {"xi", sp.xi},
                         {"phi", sp.phi.name()},  {"psi", sp.psi.name()}, {"G", sp.g.family}};
  const std::vector<Equilibrium> eq = find_equilibria(f, ro.half);
  j["equilibria"] = to_json(eq);
  bool at_origin = false;
  for (const auto& e : eq) at_origin = at_origin || std::hypot(e.p[0], e.p[1]) < 1e-9;
  j["origin_is_equilibrium"] = at_origin;

  const OriginData d = origin_data(f);
  Json origin = {{"data", to_json(d)}};
  try {
    origin["closed_form"] = to_json(origin_jacobian_closed_form(d));
  } catch (const PreconditionError& e) {
    origin["closed_form"] = {{"error", e.what()}};
  }
  try {
    origin["hyperbolicity"] = to_json(tables_decision(f));
  } catch (const PreconditionError& e) {
    origin["hyperbolicity"] = {{"error", e.what()}};
  }
  j["origin"] = origin;
  j["equilibrium_scan"] = to_json(equilibrium_scan(f, ro.grid, ro.half));
  emit(j, o.output);
  return kOk;
}

struct Sweep {
  std::string param;
  double lo = 0, hi = 0;
  int n = 0;
};

Sweep parse_sweep(const std::string& s) {
  // name=lo:hi:n
  Sweep w;
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw InputError("--sweep expects name=lo:hi:n");
  w.param = s.substr(0, eq);
  std::stringstream rest(s.substr(eq + 1));
  std::string a, b, n;
  if (!std::getline(rest, a, ':') || !std::getline(rest, b, ':') || !std::getline(rest, n))
    throw InputError("--sweep expects name=lo:hi:n");
  w.lo = parse_number(a, "--sweep");
  w.hi = parse_number(b, "--sweep");
  w.n = static_cast<int>(parse_number(n, "--sweep"));
  if (!(w.lo < w.hi) || w.n < 2) throw InputError("--sweep needs lo < hi and n >= 2");
  return w;
}

int cmd_bifurcate(const Common& o, const std::string& sweep_s) {
  const SystemConfig c = load_config(o.file);
  if (!c.bifurcation) throw InputError(o.file + ": no bifurcation block");
  const BifurcationConfig& b = *c.bifurcation;
  const ParamMap over = overrides(o);
  Json j = header(c, over);
  BifurcationKind kind = BifurcationKind::None;
  try {
    if (b.kind == "transcritical") {
      const auto r = certify_family_transcritical(b.signs, c.regularization->build());
      kind = r.cert.kind;
      j.update(to_json(r));
    } else if (b.kind == "saddlenode") {
      const auto r = certify_family_saddlenode(b.signs, c.regularization->build());
      kind = r.cert.kind;
      j.update(to_json(r));
    } else if (b.kind == "fixed_eta") {
      const auto r = certify_fixed_eta_saddlenode(b.signs, c.regularization->build());
      kind = r.cert.kind;
      j.update(to_json(r));
    } else if (b.kind == "sotomayor") {
      const auto r = sotomayor_check({expr_param_field(b.g[0], b.g[1]), b.u0, b.mu0});
      kind = r.kind;
      j.update(to_json(r));
    } else {  // hopf
      Sweep w{b.param, b.lo, b.hi, 0};
      if (!sweep_s.empty()) w = parse_sweep(sweep_s);
      const RegularizedField f = c.regularized(over);
      const HopfAnalysis h = hopf_analysis(f, w.param, w.lo, w.hi);
      kind = BifurcationKind::Hopf;
      j.update(to_json(h));
      if (w.n > 0) {
        Json rows = Json::array();
        for (int k = 0; k < w.n; ++k) {
          const double mu = w.lo + (w.hi - w.lo) * k / (w.n - 1);
          ParamMap p = over;
          p[w.param] = mu;
          const RegularizedField fm = c.regularized(p);
          const auto J = fm.jacobian({0, 0});
          const auto ev = eigenvalues(J);
          const Vec2 z = fm({0, 0});
          rows.push_back({{w.param, number(mu)},
                          {"tr", number(J[0] + J[3])},
                          {"det", number(J[0] * J[3] - J[1] * J[2])},
                          {"re_lambda", number(ev[0].real())},
                          {"residual", number(std::hypot(z[0], z[1]))}});
        }
        j["sweep"] = rows;
      }
    }
  } catch (const BifurcationError& e) {
    j["kind"] = "None";
    j["error"] = e.what();
  } catch (const PreconditionError& e) {
    j["kind"] = "None";
    j["error"] = e.what();
  }
  emit(j, o.output);
  if (kind == BifurcationKind::None) {
    std::cerr << "crossreg: no bifurcation certified\n";
    return kAnalysisFailure;
  }
  return kOk;
}

struct PortraitOpts {
  std::vector<std::string> seeds;
  double t = 3.0;
  bool regularized = false;
  double box = 0.0;
  std::string events;
};

std::vector<Point> parse_seeds(const std::vector<std::string>& specs, double box) {
  std::vector<Point> out;
  for (const std::string& s : specs) {
    if (s.rfind("grid:", 0) == 0) {
      const std::string dims = s.substr(5);
      const auto x = dims.find('x');
      if (x == std::string::npos) throw InputError("seed grid expects grid:NxM");
      const int nx = static_cast<int>(parse_number(dims.substr(0, x), "--seeds"));
      const int ny = static_cast<int>(parse_number(dims.substr(x + 1), "--seeds"));
      if (nx < 1 || ny < 1) throw InputError("seed grid needs positive sizes");
      // cell centers, so no seed lands on the cross for odd sizes
      for (int i = 0; i < nx; ++i)
        for (int k = 0; k < ny; ++k)
          out.push_back({-box + 2 * box * (i + 0.5) / nx + box * 1e-3, -box + 2 * box * (k + 0.5) / ny + box * 2e-3});
    } else {
      const auto comma = s.find(',');
      if (comma == std::string::npos) throw InputError("seed expects x1,x2 or grid:NxM");
      out.push_back({parse_number(s.substr(0, comma), "--seeds"), parse_number(s.substr(comma + 1), "--seeds")});
    }
  }
  return out;
}

int cmd_portrait(const Common& o, const PortraitOpts& po) {
  const SystemConfig c = load_config(o.file);
  const ParamMap over = overrides(o);
  if (!(po.t > 0)) throw InputError("--t must be positive");
  const PiecewiseSystem sys = c.system(over);
  std::optional<RegularizedField> f;
  if (po.regularized) f = c.regularized(over);
  double box = po.box;
  if (!(box > 0)) box = f ? 6.0 * std::max(f->spec().epsilon, f->spec().eta) : 0.8 * sys.domain_radius();
  const std::vector<Point> seeds = parse_seeds(po.seeds.empty() ? std::vector<std::string>{"grid:5x5"} : po.seeds, box);

  Sink s(o.output);
  s.os() << "id,t,x1,x2,regime\n";
  Json events = Json::array();
  int failed = 0;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const Trajectory tr = f ? integrate_smooth(*f, seeds[k], po.t) : integrate_filippov(sys, seeds[k], po.t);
    write_csv(s.os(), tr, static_cast<int>(k));
    failed += tr.failed;
    Json e = to_json(tr);
    e["id"] = k;
    e["seed"] = Json::array({seeds[k][0], seeds[k][1]});
    events.push_back(e);
  }
  if (!po.events.empty()) emit(events, po.events);
  std::cerr << "crossreg: " << seeds.size() << " trajectories, " << failed << " failed\n";
  return failed ? kAnalysisFailure : kOk;
}

int cmd_verify(const std::vector<std::string>& only, bool list, std::uint64_t seed, const std::string& json_out) {
  if (list) {
    for (int id = 1; id <= 10; ++id) std::cout << id << " " << criterion_name(id) << "\n";
    return kOk;
  }
  std::vector<CriterionResult> res;
  if (only.empty()) {
    res = run_acceptance(seed);
  } else {
    for (const auto& n : only) {
      const int id = criterion_id(n);
      if (!id) throw InputError("unknown check '" + n + "' (see verify --list)");
      res.push_back(acceptance_criterion(id, seed));
    }
  }
  int passed = 0;
  for (const auto& r : res) {
    std::printf("%s %2d %-24s %7.3fs  %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds, r.detail.c_str());
    passed += r.pass;
  }
  std::printf("%d/%zu checks passed\n", passed, res.size());
  if (!json_out.empty()) emit(to_json(res), json_out);
  return passed == static_cast<int>(res.size()) ? kOk : kAnalysisFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double regularization of planar fields switching on x1 x2 = 0"};
  app.require_subcommand(1);

  Common co;
  RegularizeOpts ro;
  PortraitOpts po;
  std::string sweep;
  std::vector<std::string> only;
  bool list = false;
  std::uint64_t seed = 20240611;
  std::string verify_json;

  CLI::App* classify = app.add_subcommand("classify", "classify the origin of Z = (X, Y)");
  add_common(classify, co);

  CLI::App* regularize = app.add_subcommand("regularize", "equilibria and hyperbolicity of Z^R");
  add_common(regularize, co);
  regularize->add_option("--grid", ro.grid, "scan grid size")->check(CLI::PositiveNumber);
  regularize->add_option("--half", ro.half, "half-width of the search box (default domain_radius)");
  regularize->add_option("--dump-grid", ro.dump_grid, "write an NxN CSV of Z^R instead of the report")
      ->check(CLI::PositiveNumber);
  regularize->add_option("--box", ro.box, "half-width of the dumped grid (default 4 max(eps, eta))");

  CLI::App* bifurcate = app.add_subcommand("bifurcate", "certify the bifurcation named in the system file");
  add_common(bifurcate, co);
  bifurcate->add_option("--sweep", sweep, "Hopf parameter sweep name=lo:hi:n");

  CLI::App* portrait = app.add_subcommand("portrait", "trajectory CSV for a set of seeds");
  add_common(portrait, co);
  portrait->add_option("--seeds", po.seeds, "grid:NxM or x1,x2 (repeatable)");
  portrait->add_option("--t", po.t, "integration time");
  portrait->add_flag("--regularized", po.regularized, "integrate Z^R instead of the Filippov flow");
  portrait->add_option("--box", po.box, "half-width of the seed grid");
  portrait->add_option("--events", po.events, "write per-trajectory events as JSON");

  CLI::App* verify = app.add_subcommand("verify", "run the acceptance checks");
  verify->add_option("--only", only, "check name or id (repeatable)");
  verify->add_flag("--list", list, "list check ids");
  verify->add_option("--seed", seed, "seed of the randomized checks");
  verify->add_option("--json", verify_json, "also write results as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*classify) return cmd_classify(co);
    if (*regularize) return cmd_regularize(co, ro);
    if (*bifurcate) return cmd_bifurcate(co, sweep);
    if (*portrait) return cmd_portrait(co, po);
    if (*verify) return cmd_verify(only, list, seed, verify_json);
  } catch (const ConfigError& e) {
    std::cerr << "crossreg: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "crossreg: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "crossreg: " << e.what() << "\n";
    return kAnalysisFailure;
  }
  return kInputError;
}
