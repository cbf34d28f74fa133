#include "relaxdamp/config.hpp"

#include "relaxdamp/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace relaxdamp {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& why) {
  fail(ErrorKind::ValidationError, path + ": " + why);
}

// Object view that records which keys were read so leftovers can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k);
  }
  const json& raw(const std::string& k) {
    seen_.insert(k);
    return j_.at(k);
  }

  double number(const std::string& k, double def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number()) invalid(key(k), "expected a number");
    return v.get<double>();
  }
  int integer(const std::string& k, int def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number_integer()) invalid(key(k), "expected an integer");
    return v.get<int>();
  }
  std::string string(const std::string& k, const std::string& def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_string()) invalid(key(k), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& k, std::vector<double> def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_array()) invalid(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) invalid(key(k), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) invalid(key(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& why) {
  if (!ok) invalid(path, why);
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

// [[coef, e_1, ..., e_N], ...]
Polynomial parse_poly(const json& j, int dim, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected a list of [coef, exponents...] terms");
  Polynomial p(dim);
  for (const auto& term : j) {
    if (!term.is_array() || static_cast<int>(term.size()) != dim + 1) {
      invalid(path, "each term must be [coef, e_1, ..., e_" + std::to_string(dim) + "]");
    }
    if (!term[0].is_number()) invalid(path, "term coefficient must be a number");
    std::array<int, kMaxDim> e{};
    for (int k = 0; k < dim; ++k) {
      const json& ek = term[static_cast<size_t>(k + 1)];
      if (!ek.is_number_integer() || ek.get<int>() < 0) invalid(path, "exponents must be non-negative integers");
      e[static_cast<size_t>(k)] = ek.get<int>();
    }
    p.add_term(term[0].get<double>(), e);
  }
  return p;
}

PolyMatrix parse_poly_matrix(const json& j, int dim, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) invalid(path, "expected " + std::to_string(dim) + " rows");
  PolyMatrix m(dim, dim, dim);
  for (int r = 0; r < dim; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      invalid(path, "row " + std::to_string(r) + " must have " + std::to_string(dim) + " entries");
    }
    for (int c = 0; c < dim; ++c) {
      m.at(r, c) = parse_poly(row[static_cast<size_t>(c)], dim,
                              path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

ModelConfig parse_model(const json& j) {
  Section s(j, "model");
  ModelConfig mc;
  mc.kind = s.string("kind", "jinxin");
  if (mc.kind == "jinxin") {
    mc.a = s.number("a", mc.a);
    require(mc.a > 0.0, "model.a", "must be positive");
    mc.eps = s.number("eps", mc.eps);
    require(mc.eps > 0.0, "model.eps", "must be positive");
    mc.flux = s.numbers("flux", mc.flux);
    require(!mc.flux.empty(), "model.flux", "must list at least one coefficient");
    mc.u_minus_scalar = s.number("u_minus", mc.u_minus_scalar);
    mc.u_plus_scalar = s.number("u_plus", mc.u_plus_scalar);
    require(mc.u_minus_scalar != mc.u_plus_scalar, "model.u_plus", "must differ from model.u_minus");
  } else if (mc.kind == "custom") {
    mc.name = s.string("name", mc.name);
    require(mc.name != "jinxin", "model.name", "reserved for the built-in model");
    mc.dim = s.integer("dim", 0);
    require(mc.dim >= 1 && mc.dim <= kMaxDim, "model.dim", "must lie in [1, " + std::to_string(kMaxDim) + "]");
    require(s.has("A"), "model.A", "required for custom models");
    mc.A = parse_poly_matrix(s.raw("A"), mc.dim, "model.A");
    require(s.has("q"), "model.q", "required for custom models");
    const json& q = s.raw("q");
    if (!q.is_array() || static_cast<int>(q.size()) != mc.dim) invalid("model.q", "expected one entry per component");
    PolyVector qv(mc.dim, mc.dim);
    for (int i = 0; i < mc.dim; ++i) {
      qv.at(i) = parse_poly(q[static_cast<size_t>(i)], mc.dim, "model.q[" + std::to_string(i) + "]");
    }
    mc.q = qv;
    if (s.has("Q")) mc.Q = parse_poly_matrix(s.raw("Q"), mc.dim, "model.Q");
    const auto um = s.numbers("u_minus", {});
    const auto up = s.numbers("u_plus", {});
    require(static_cast<int>(um.size()) == mc.dim, "model.u_minus", "expected " + std::to_string(mc.dim) + " entries");
    require(static_cast<int>(up.size()) == mc.dim, "model.u_plus", "expected " + std::to_string(mc.dim) + " entries");
    mc.u_minus = to_vec(um);
    mc.u_plus = to_vec(up);
    mc.shock_speed = s.number("shock_speed", 0.0);
  } else {
    invalid("model.kind", "must be \"jinxin\" or \"custom\"");
  }
  s.finish();
  return mc;
}

ProfileConfig parse_profile(const json& j) {
  Section s(j, "profile");
  ProfileConfig pc;
  pc.X = s.number("X", pc.X);
  require(pc.X > 0.0, "profile.X", "must be positive");
  pc.n = s.integer("n", pc.n);
  require(pc.n >= 11, "profile.n", "must be at least 11");
  pc.tol = s.number("tol", pc.tol);
  require(pc.tol > 0.0 && pc.tol <= 1e-2, "profile.tol", "must lie in (0, 1e-2]");
  pc.method = s.string("method", pc.method);
  require(pc.method == "shoot" || pc.method == "exact", "profile.method", "must be \"shoot\" or \"exact\"");
  s.finish();
  return pc;
}

SpectralConfig parse_spectral(const json& j) {
  Section s(j, "spectral");
  SpectralConfig sc;
  sc.xi_min = s.number("xi_min", sc.xi_min);
  require(sc.xi_min > 0.0, "spectral.xi_min", "must be positive");
  sc.xi_max = s.number("xi_max", sc.xi_max);
  require(sc.xi_max > sc.xi_min, "spectral.xi_max", "must exceed spectral.xi_min");
  sc.n_xi = s.integer("n_xi", sc.n_xi);
  require(sc.n_xi >= 100, "spectral.n_xi", "must be at least 100");
  sc.margin = s.number("margin", sc.margin);
  require(sc.margin > 0.0, "spectral.margin", "must be positive");
  sc.c_min = s.number("c_min", sc.c_min);
  require(sc.c_min >= 0.0, "spectral.c_min", "must be non-negative");
  s.finish();
  return sc;
}

PerturbationSpec parse_perturbation(const json& j) {
  Section s(j, "dynamics.perturbation");
  PerturbationSpec p;
  const std::string kind = s.string("kind", "gaussian");
  if (kind == "zero") {
    p = PerturbationSpec::zero();
  } else if (kind == "gaussian") {
    p = PerturbationSpec::gaussian(s.number("amplitude", 1e-2), s.number("width", 2.0), s.number("center", 0.0),
                                   to_vec(s.numbers("direction", {})));
    require(p.width > 0.0, "dynamics.perturbation.width", "must be positive");
  } else if (kind == "offset") {
    p = PerturbationSpec::offset(to_vec(s.numbers("d_minus", {})), to_vec(s.numbers("d_plus", {})),
                                 s.number("blend_width", 2.0));
    require(p.blend_width > 0.0, "dynamics.perturbation.blend_width", "must be positive");
  } else if (kind == "shift_difference") {
    p = PerturbationSpec::shift_difference(s.number("h", 0.0));
  } else {
    invalid("dynamics.perturbation.kind", "must be zero, gaussian, offset or shift_difference");
  }
  s.finish();
  return p;
}

ShiftSpec parse_shift(const json& j) {
  Section s(j, "dynamics.shift");
  const std::string kind = s.string("kind", "zero");
  ShiftSpec sh;
  if (kind == "zero") {
    sh = ShiftSpec::zero();
  } else if (kind == "linear") {
    sh = ShiftSpec::linear(s.number("rate", 0.0));
  } else if (kind == "sinusoid") {
    sh = ShiftSpec::sinusoid(s.number("amplitude", 0.0), s.number("frequency", 0.0));
  } else {
    invalid("dynamics.shift.kind", "must be zero, linear or sinusoid");
  }
  s.finish();
  return sh;
}

DynamicsConfig parse_dynamics(const json& j) {
  Section s(j, "dynamics");
  DynamicsConfig dc;
  if (s.has("perturbation")) dc.perturbation = parse_perturbation(s.raw("perturbation"));
  if (s.has("shift")) dc.shift = parse_shift(s.raw("shift"));
  dc.T = s.number("T", dc.T);
  require(dc.T > 0.0, "dynamics.T", "must be positive");
  const std::string backend = s.string("backend", "moc");
  require(backend == "moc" || backend == "reference", "dynamics.backend", "must be \"moc\" or \"reference\"");
  dc.backend = backend == "moc" ? Backend::Moc : Backend::Reference;
  dc.dx = s.number("dx", dc.dx);
  require(dc.dx > 0.0, "dynamics.dx", "must be positive");
  dc.cfl = s.number("cfl", dc.cfl);
  require(dc.cfl > 0.0 && dc.cfl <= 0.9, "dynamics.cfl", "must lie in (0, 0.9]");
  dc.n_out = s.integer("n_out", dc.n_out);
  require(dc.n_out >= 4, "dynamics.n_out", "must be at least 4");
  dc.eps_budget = s.number("eps_budget", dc.eps_budget);
  require(dc.eps_budget > 0.0, "dynamics.eps_budget", "must be positive");
  dc.perturbation.eps_budget = dc.eps_budget;
  s.finish();
  return dc;
}

VerifyConfig parse_verify(const json& j) {
  Section s(j, "verify");
  VerifyConfig vc;
  vc.theta_grid = s.numbers("theta_grid", {});
  for (double t : vc.theta_grid) require(t > 0.0, "verify.theta_grid", "rates must be positive");
  vc.C_cap = s.number("C_cap", vc.C_cap);
  require(vc.C_cap > 0.0, "verify.C_cap", "must be positive");
  if (s.has("norms")) {
    const json& n = s.raw("norms");
    if (!n.is_array() || n.empty()) invalid("verify.norms", "expected a non-empty list");
    vc.norms.clear();
    for (const auto& e : n) {
      if (!e.is_string()) invalid("verify.norms", "expected strings");
      const std::string k = e.get<std::string>();
      require(k == "C0" || k == "C1" || k == "C2" || k == "L2" || k == "H2", "verify.norms",
              "unknown norm kind \"" + k + "\"");
      vc.norms.push_back(k);
    }
  }
  vc.n_paths = s.integer("n_paths", vc.n_paths);
  require(vc.n_paths >= 10, "verify.n_paths", "must be at least 10");
  vc.substeps = s.integer("substeps", vc.substeps);
  require(vc.substeps >= 1, "verify.substeps", "must be positive");
  vc.lipschitz_samples = s.integer("lipschitz_samples", vc.lipschitz_samples);
  require(vc.lipschitz_samples >= 1, "verify.lipschitz_samples", "must be positive");
  if (s.has("C_alpha")) {
    vc.C_alpha = s.number("C_alpha", 0.0);
    require(*vc.C_alpha > 0.0, "verify.C_alpha", "must be positive");
  }
  if (s.has("c_alpha")) {
    vc.c_alpha = s.number("c_alpha", 0.0);
    require(*vc.c_alpha > 0.0, "verify.c_alpha", "must be positive");
  }
  vc.csv_time_stride = s.integer("csv_time_stride", vc.csv_time_stride);
  require(vc.csv_time_stride >= 1, "verify.csv_time_stride", "must be positive");
  vc.csv_node_stride = s.integer("csv_node_stride", vc.csv_node_stride);
  require(vc.csv_node_stride >= 1, "verify.csv_node_stride", "must be positive");
  s.finish();
  return vc;
}

}  // namespace

Config parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
  }
  Section root(j, "");
  Config c;
  if (!root.has("model")) invalid("model", "required");
  c.model = parse_model(root.raw("model"));
  if (root.has("profile")) c.profile = parse_profile(root.raw("profile"));
  if (root.has("spectral")) c.spectral = parse_spectral(root.raw("spectral"));
  if (root.has("dynamics")) c.dynamics = parse_dynamics(root.raw("dynamics"));
  if (root.has("verify")) c.verify = parse_verify(root.raw("verify"));
  c.output = root.string("output", c.output);
  if (root.has("seed")) {
    const json& s = root.raw("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      invalid("seed", "expected a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  root.finish();

  // Cross-field checks.
  const int dim = c.model.kind == "jinxin" ? 2 : c.model.dim;
  const PerturbationSpec& p = c.dynamics.perturbation;
  if (p.kind == PerturbationSpec::Kind::Gaussian && p.direction.size() != 0 && p.direction.size() != dim) {
    invalid("dynamics.perturbation.direction", "expected " + std::to_string(dim) + " entries");
  }
  if (p.kind == PerturbationSpec::Kind::Offset && (p.d_minus.size() != dim || p.d_plus.size() != dim)) {
    invalid("dynamics.perturbation.d_minus", "offset vectors need " + std::to_string(dim) + " entries");
  }
  const double cells = 2.0 * c.profile.X / c.dynamics.dx;
  if (std::abs(cells - std::round(cells)) > 1e-9 * cells || std::round(cells) < 10) {
    invalid("dynamics.dx", "must divide 2 * profile.X into at least 10 cells");
  }
  if (c.profile.method == "exact" && c.model.kind != "jinxin") {
    invalid("profile.method", "\"exact\" needs the jinxin model");
  }
  return c;
}

Config parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ModelSpec build_model(const ModelConfig& mc) {
  if (mc.kind == "jinxin") return build_jinxin(mc.a, mc.eps, mc.flux, mc.u_minus_scalar, mc.u_plus_scalar);
  return ModelSpec(mc.name, mc.dim, *mc.A, *mc.q, mc.u_minus, mc.u_plus, mc.shock_speed, {}, mc.Q);
}

}  // namespace relaxdamp
