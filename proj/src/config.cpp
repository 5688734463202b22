#include "crossreg/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace crossreg {

ConfigError::ConfigError(const std::string& msg, std::string f, int l)
    : std::runtime_error(f.empty() ? msg : f + (l > 0 ? ":" + std::to_string(l) : std::string()) + ": " + msg),
      file(std::move(f)),
      line(l) {}

namespace {

const char* kFieldNames[4] = {"X1", "X2", "Y1", "Y2"};

bool is_family_kind(const std::string& k) {
  return k == "transcritical" || k == "saddlenode" || k == "fixed_eta";
}

// Map node reader that rejects keys nobody asked for.
class Reader {
 public:
  Reader(const YAML::Node& n, std::string src, std::string where)
      : node_(n), src_(std::move(src)), where_(std::move(where)) {
    if (!n.IsMap()) fail(n, where_ + " must be a mapping");
  }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    throw ConfigError(msg, src_, n.Mark().line >= 0 ? n.Mark().line + 1 : 0);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(node_, msg); }

  bool has(const std::string& k) {
    seen_.insert(k);
    return static_cast<bool>(node_[k]);
  }
  YAML::Node get(const std::string& k) {
    seen_.insert(k);
    return node_[k];
  }
  YAML::Node need(const std::string& k) {
    YAML::Node n = get(k);
    if (!n) fail(where_ + ": missing key '" + k + "'");
    return n;
  }

  template <class T>
  T as(const YAML::Node& n, const std::string& what) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, where_ + ": bad value for '" + what + "'");
    }
  }
  template <class T>
  T opt(const std::string& k, T def) {
    YAML::Node n = get(k);
    return n ? as<T>(n, k) : def;
  }
  double positive(const std::string& k, double def) {
    const double v = opt<double>(k, def);
    if (!(v > 0.0) || !std::isfinite(v)) fail(get(k), where_ + ": '" + k + "' must be positive");
    return v;
  }

  // Call after reading every known key.
  void done() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const std::string k = it->first.as<std::string>();
      if (!seen_.count(k)) fail(it->first, where_ + ": unknown key '" + k + "'");
    }
  }

  const std::string& src() const { return src_; }

 private:
  YAML::Node node_;
  std::string src_, where_;
  std::set<std::string> seen_;
};

std::map<std::string, double> read_number_map(const YAML::Node& n, const Reader& r, const std::string& what) {
  if (!n.IsMap()) r.fail(n, what + " must be a mapping of numbers");
  std::map<std::string, double> out;
  for (auto it = n.begin(); it != n.end(); ++it) out[it->first.as<std::string>()] = r.as<double>(it->second, what);
  return out;
}

TransitionConfig read_transition(const YAML::Node& n, const std::string& src, const std::string& where) {
  TransitionConfig t;
  if (n.IsScalar()) {
    t.builtin = n.as<std::string>();
  } else {
    Reader r(n, src, where);
    if (r.has("builtin")) {
      t.builtin = r.as<std::string>(r.get("builtin"), "builtin");
    } else {
      t.name = r.opt<std::string>("name", where);
      t.monotone = r.opt<bool>("monotone", true);
      t.sotomayor_teixeira = r.opt<bool>("sotomayor_teixeira", false);
      const YAML::Node ps = r.need("pieces");
      if (!ps.IsSequence() || ps.size() == 0) r.fail(ps, where + ": pieces must be a non-empty list");
      for (const auto& p : ps) {
        Reader pr(p, src, where + " piece");
        PieceSpec s;
        s.lo = pr.as<double>(pr.need("lo"), "lo");
        s.hi = pr.as<double>(pr.need("hi"), "hi");
        s.expr = pr.as<std::string>(pr.need("expr"), "expr");
        s.closed_hi = pr.opt<bool>("closed_hi", false);
        pr.done();
        t.pieces.push_back(s);
      }
    }
    r.done();
  }
  try {
    t.build();
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what(), src, n.Mark().line + 1);
  }
  return t;
}

PowMode read_mode(const std::string& m, const Reader& r, const YAML::Node& n) {
  if (m == "power") return PowMode::Power;
  if (m == "abs") return PowMode::Abs;
  if (m == "signed_abs") return PowMode::SignedAbs;
  r.fail(n, "pow mode must be power, abs or signed_abs");
}

const char* mode_name(PowMode m) {
  switch (m) {
    case PowMode::Power: return "power";
    case PowMode::Abs: return "abs";
    case PowMode::SignedAbs: return "signed_abs";
  }
  return "power";
}

GConfig read_g(const YAML::Node& n, const std::string& src) {
  Reader r(n, src, "G");
  GConfig g;
  g.kind = r.opt<std::string>("kind", "zero");
  if (r.has("degrees")) {
    const YAML::Node d = r.get("degrees");
    if (!d.IsSequence() || d.size() != 2) r.fail(d, "G: degrees must be [m1, m2]");
    g.m1 = r.as<int>(d[0], "degrees");
    g.m2 = r.as<int>(d[1], "degrees");
  }
  if (r.has("free")) g.free = read_number_map(r.get("free"), r, "G free");
  if (r.has("terms")) {
    Reader tr(r.get("terms"), src, "G terms");
    const char* comps[2] = {"G1", "G2"};
    for (int c = 0; c < 2; ++c) {
      if (!tr.has(comps[c])) continue;
      const YAML::Node list = tr.get(comps[c]);
      if (!list.IsSequence()) tr.fail(list, std::string("G terms: ") + comps[c] + " must be a list");
      for (const auto& t : list) {
        Reader er(t, src, "G term");
        GTerm gt;
        gt.coef = er.as<double>(er.need("coef"), "coef");
        gt.p = er.opt<double>("p", 0.0);
        gt.q = er.opt<double>("q", 0.0);
        gt.mode_r = read_mode(er.opt<std::string>("mode_r", "power"), er, t);
        gt.mode_s = read_mode(er.opt<std::string>("mode_s", "power"), er, t);
        gt.name = er.opt<std::string>("name", "");
        er.done();
        g.terms[c].push_back(gt);
      }
    }
    tr.done();
  }
  if (r.has("custom")) {
    const YAML::Node c = r.get("custom");
    if (!c.IsSequence() || c.size() != 2) r.fail(c, "G: custom must be [G1, G2]");
    g.custom = {r.as<std::string>(c[0], "custom"), r.as<std::string>(c[1], "custom")};
  }
  g.hopf_equilibrium = r.opt<bool>("hopf_equilibrium", false);
  r.done();
  try {
    g.build();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("G: ") + e.what(), src, n.Mark().line + 1);
  }
  return g;
}

RegularizationConfig read_regularization(const YAML::Node& n, const std::string& src) {
  Reader r(n, src, "regularization");
  RegularizationConfig c;
  c.epsilon = r.positive("epsilon", 0.015);
  c.eta = r.positive("eta", 0.012);
  c.xi = r.opt<double>("xi", 0.0);
  c.phi = read_transition(r.need("phi"), src, "phi");
  c.psi = read_transition(r.need("psi"), src, "psi");
  if (r.has("G")) c.g = read_g(r.get("G"), src);
  r.done();
  return c;
}

SignTuple read_signs(const YAML::Node& n, const Reader& r) {
  if (!n.IsSequence() || n.size() != 4) r.fail(n, "bifurcation: signs must be [a, b, c1, c2]");
  int v[4];
  for (int k = 0; k < 4; ++k) {
    v[k] = r.as<int>(n[k], "signs");
    if (v[k] != 1 && v[k] != -1) r.fail(n[k], "bifurcation: signs must be +1 or -1");
  }
  return {v[0], v[1], v[2], v[3]};
}

BifurcationConfig read_bifurcation(const YAML::Node& n, const std::string& src) {
  Reader r(n, src, "bifurcation");
  BifurcationConfig b;
  b.kind = r.as<std::string>(r.need("kind"), "kind");
  if (!is_family_kind(b.kind) && b.kind != "hopf" && b.kind != "sotomayor")
    r.fail(r.get("kind"), "bifurcation: kind must be transcritical, saddlenode, fixed_eta, hopf or sotomayor");
  if (r.has("signs")) b.signs = read_signs(r.get("signs"), r);
  b.param = r.opt<std::string>("param", "mu");
  if (r.has("range")) {
    const YAML::Node g = r.get("range");
    if (!g.IsSequence() || g.size() != 2) r.fail(g, "bifurcation: range must be [lo, hi]");
    b.lo = r.as<double>(g[0], "range");
    b.hi = r.as<double>(g[1], "range");
    if (!(b.lo < b.hi)) r.fail(g, "bifurcation: range needs lo < hi");
  }
  if (r.has("g")) {
    const YAML::Node g = r.get("g");
    if (!g.IsSequence() || g.size() != 2) r.fail(g, "bifurcation: g must be [g1, g2]");
    b.g = {r.as<std::string>(g[0], "g"), r.as<std::string>(g[1], "g")};
    try {
      expr_param_field(b.g[0], b.g[1]);
    } catch (const std::exception& e) {
      r.fail(g, std::string("bifurcation g: ") + e.what());
    }
  } else if (b.kind == "sotomayor") {
    r.fail("bifurcation: sotomayor needs g: [g1, g2]");
  }
  if (r.has("u0")) {
    const YAML::Node u = r.get("u0");
    if (!u.IsSequence() || u.size() != 2) r.fail(u, "bifurcation: u0 must be [x1, x2]");
    b.u0 = {r.as<double>(u[0], "u0"), r.as<double>(u[1], "u0")};
  }
  b.mu0 = r.opt<double>("mu0", 0.0);
  r.done();
  return b;
}

SystemConfig from_node(const YAML::Node& root, const std::string& src) {
  if (!root || root.IsNull()) throw ConfigError("empty system file", src, 0);
  Reader r(root, src, "system file");
  SystemConfig c;
  c.source = src;
  c.name = r.opt<std::string>("name", "");
  c.description = r.opt<std::string>("description", "");
  if (r.has("params")) c.params = read_number_map(r.get("params"), r, "params");
  c.domain_radius = r.positive("domain_radius", 1.0);
  if (r.has("tau_rel")) c.tau_rel = r.positive("tau_rel", 1e-9);
  if (r.has("regularization")) c.regularization = read_regularization(r.get("regularization"), src);
  if (r.has("bifurcation")) c.bifurcation = read_bifurcation(r.get("bifurcation"), src);
  int given = 0;
  for (int k = 0; k < 4; ++k)
    if (r.has(kFieldNames[k])) {
      c.fields[k] = r.as<std::string>(r.get(kFieldNames[k]), kFieldNames[k]);
      ++given;
    }
  const bool family = c.bifurcation && is_family_kind(c.bifurcation->kind);
  if (given != 4 && !(given == 0 && family)) r.fail("system file needs X1, X2, Y1, Y2");
  if (family && !c.regularization) r.fail("bifurcation kind '" + c.bifurcation->kind + "' needs a regularization block");
  if (c.bifurcation && c.bifurcation->kind == "hopf" && !c.regularization)
    r.fail("bifurcation kind 'hopf' needs a regularization block");
  r.done();
  std::vector<std::string> names = {"x1", "x2"};
  for (const auto& kv : c.params) names.push_back(kv.first);
  for (int k = 0; k < 4 && given; ++k) {
    try {
      parse_with_variables(c.fields[k], names);
    } catch (const std::exception& e) {
      throw ConfigError(std::string(kFieldNames[k]) + ": " + e.what(), src, root[kFieldNames[k]].Mark().line + 1);
    }
  }
  try {
    c.system();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what(), src, 0);
  }
  return c;
}

void emit_transition(YAML::Emitter& out, const TransitionConfig& t) {
  out << YAML::BeginMap;
  if (!t.builtin.empty()) {
    out << YAML::Key << "builtin" << YAML::Value << t.builtin;
  } else {
    out << YAML::Key << "name" << YAML::Value << t.name;
    out << YAML::Key << "monotone" << YAML::Value << t.monotone;
    out << YAML::Key << "sotomayor_teixeira" << YAML::Value << t.sotomayor_teixeira;
    out << YAML::Key << "pieces" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : t.pieces) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "lo" << YAML::Value << p.lo << YAML::Key << "hi"
          << YAML::Value << p.hi << YAML::Key << "expr" << YAML::Value << YAML::DoubleQuoted << p.expr;
      if (p.closed_hi) out << YAML::Key << "closed_hi" << YAML::Value << true;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
}

void emit_numbers(YAML::Emitter& out, const std::map<std::string, double>& m) {
  out << YAML::BeginMap;
  for (const auto& [k, v] : m) out << YAML::Key << k << YAML::Value << v;
  out << YAML::EndMap;
}

void emit_g(YAML::Emitter& out, const GConfig& g) {
  out << YAML::BeginMap << YAML::Key << "kind" << YAML::Value << g.kind;
  if (g.m1 || g.m2) out << YAML::Key << "degrees" << YAML::Value << YAML::Flow << YAML::BeginSeq << g.m1 << g.m2 << YAML::EndSeq;
  if (!g.free.empty()) {
    out << YAML::Key << "free" << YAML::Value;
    emit_numbers(out, g.free);
  }
  if (!g.terms[0].empty() || !g.terms[1].empty()) {
    out << YAML::Key << "terms" << YAML::Value << YAML::BeginMap;
    const char* comps[2] = {"G1", "G2"};
    for (int c = 0; c < 2; ++c) {
      if (g.terms[c].empty()) continue;
      out << YAML::Key << comps[c] << YAML::Value << YAML::BeginSeq;
      for (const auto& t : g.terms[c]) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "coef" << YAML::Value << t.coef << YAML::Key << "p"
            << YAML::Value << t.p << YAML::Key << "q" << YAML::Value << t.q;
        if (t.mode_r != PowMode::Power) out << YAML::Key << "mode_r" << YAML::Value << mode_name(t.mode_r);
        if (t.mode_s != PowMode::Power) out << YAML::Key << "mode_s" << YAML::Value << mode_name(t.mode_s);
        if (!t.name.empty()) out << YAML::Key << "name" << YAML::Value << t.name;
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    out << YAML::EndMap;
  }
  if (!g.custom[0].empty() || !g.custom[1].empty())
    out << YAML::Key << "custom" << YAML::Value << YAML::Flow << YAML::BeginSeq << YAML::DoubleQuoted << g.custom[0]
        << YAML::DoubleQuoted << g.custom[1] << YAML::EndSeq;
  if (g.hopf_equilibrium) out << YAML::Key << "hopf_equilibrium" << YAML::Value << true;
  out << YAML::EndMap;
}

}  // namespace

TransitionFunction TransitionConfig::build() const {
  if (!builtin.empty()) return crossreg::builtin(builtin);
  return TransitionFunction(name, pieces, monotone, sotomayor_teixeira);
}

GSpec GConfig::build() const {
  if (hopf_equilibrium) {
    const HopfGCoefficients h = hopf_g_equilibrium_coefficients(kind, free);
    if (!h.ok) throw GConstraintError("could not place G(2, 7/4) = 0");
    return h.g;
  }
  GTemplate t;
  t.family = kind;
  t.m1 = m1;
  t.m2 = m2;
  t.free = free;
  t.terms = terms;
  t.custom = custom;
  return solve_g_constraints(t);
}

RegularizationSpec RegularizationConfig::build() const {
  RegularizationSpec s;
  s.epsilon = epsilon;
  s.eta = eta;
  s.xi = xi;
  s.phi = phi.build();
  s.psi = psi.build();
  s.g = g.build();
  return s;
}

PiecewiseSystem SystemConfig::system(const ParamMap& overrides) const {
  PiecewiseSystem sys;
  if (fields[0].empty() && bifurcation && is_family_kind(bifurcation->kind)) {
    sys = bifurcation->kind == "saddlenode" ? saddlenode_family(bifurcation->signs)
                                            : transcritical_family(bifurcation->signs);
  } else {
    sys = PiecewiseSystem(fields[0], fields[1], fields[2], fields[3], params, domain_radius);
  }
  for (const auto& [k, v] : overrides)
    if (!sys.params().count(k)) throw ConfigError("unknown parameter '" + k + "'", source, 0);
  if (!overrides.empty()) sys = sys.with_params(overrides);
  if (tau_rel) sys.set_tau_rel(*tau_rel);
  return sys;
}

RegularizedField SystemConfig::regularized(const ParamMap& overrides) const {
  if (!regularization) throw ConfigError("system file has no regularization block", source, 0);
  return RegularizedField(system(overrides), regularization->build());
}

SystemConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, source, e.mark.line + 1);
  }
  return from_node(root, source);
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open system file", path, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string dump_config(const SystemConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  if (!c.name.empty()) out << YAML::Key << "name" << YAML::Value << c.name;
  if (!c.description.empty()) out << YAML::Key << "description" << YAML::Value << c.description;
  if (!c.fields[0].empty())
    for (int k = 0; k < 4; ++k) out << YAML::Key << kFieldNames[k] << YAML::Value << YAML::DoubleQuoted << c.fields[k];
  if (!c.params.empty()) {
    out << YAML::Key << "params" << YAML::Value;
    emit_numbers(out, c.params);
  }
  out << YAML::Key << "domain_radius" << YAML::Value << c.domain_radius;
  if (c.tau_rel) out << YAML::Key << "tau_rel" << YAML::Value << *c.tau_rel;
  if (c.regularization) {
    const auto& r = *c.regularization;
    out << YAML::Key << "regularization" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "epsilon" << YAML::Value << r.epsilon;
    out << YAML::Key << "eta" << YAML::Value << r.eta;
    out << YAML::Key << "xi" << YAML::Value << r.xi;
    out << YAML::Key << "phi" << YAML::Value;
    emit_transition(out, r.phi);
    out << YAML::Key << "psi" << YAML::Value;
    emit_transition(out, r.psi);
    out << YAML::Key << "G" << YAML::Value;
    emit_g(out, r.g);
    out << YAML::EndMap;
  }
  if (c.bifurcation) {
    const auto& b = *c.bifurcation;
    out << YAML::Key << "bifurcation" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << b.kind;
    out << YAML::Key << "signs" << YAML::Value << YAML::Flow << YAML::BeginSeq << b.signs.a << b.signs.b << b.signs.c1
        << b.signs.c2 << YAML::EndSeq;
    out << YAML::Key << "param" << YAML::Value << b.param;
    out << YAML::Key << "range" << YAML::Value << YAML::Flow << YAML::BeginSeq << b.lo << b.hi << YAML::EndSeq;
    if (!b.g[0].empty())
      out << YAML::Key << "g" << YAML::Value << YAML::Flow << YAML::BeginSeq << YAML::DoubleQuoted << b.g[0]
          << YAML::DoubleQuoted << b.g[1] << YAML::EndSeq;
    out << YAML::Key << "u0" << YAML::Value << YAML::Flow << YAML::BeginSeq << b.u0[0] << b.u0[1] << YAML::EndSeq;
    out << YAML::Key << "mu0" << YAML::Value << b.mu0;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

bool operator==(const SystemConfig& a, const SystemConfig& b) { return dump_config(a) == dump_config(b); }

}  // namespace crossreg
