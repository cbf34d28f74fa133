#include "relaxdamp/pipeline.hpp"

#include "relaxdamp/characteristics.hpp"
#include "relaxdamp/damping.hpp"
#include "relaxdamp/eigenframe.hpp"
#include "relaxdamp/errors.hpp"
#include "relaxdamp/numerics.hpp"
#include "relaxdamp/profile.hpp"
#include "relaxdamp/spectral.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

namespace relaxdamp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// JSON has no infinity; non-finite numbers become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  Csv& cell(double v) {
    sep();
    out_ << fmt(v);
    return *this;
  }
  Csv& cell(const std::string& s) {
    sep();
    out_ << s;
    return *this;
  }
  Csv& cell(int v) {
    sep();
    out_ << v;
    return *this;
  }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ostringstream out_;
  bool first_ = true;
};

std::vector<std::string> indexed(const std::string& base, int n) {
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back(base + std::to_string(i));
  return v;
}

bool certification_kind(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotStrictlyHyperbolic:
    case ErrorKind::Characteristic:
    case ErrorKind::NotDissipative:
    case ErrorKind::NoUnstableDirection:
    case ErrorKind::NoConnection:
    case ErrorKind::EmptyFeasible:
    case ErrorKind::NotBounded:
    case ErrorKind::EpsilonTooLarge:
      return true;
    default:
      return false;
  }
}

json error_json(const Error& e) { return {{"kind", to_string(e.kind())}, {"message", e.what()}}; }

class Pipeline {
 public:
  Pipeline(const Config& c, std::string out) : cfg_(c), out_(std::move(out)) {}

  int profile_stage();
  int check_stage();
  int evolve_stage();
  int verify_stage();

  std::string stage = "setup";

 private:
  const ModelSpec& model() {
    if (!model_) model_ = std::make_unique<ModelSpec>(build_model(cfg_.model));
    return *model_;
  }
  ProfileRep make_profile(const Grid& g) {
    if (cfg_.profile.method == "exact") return exact_jinxin_profile(model(), g);
    return solve_profile_on(model(), g, cfg_.profile.tol);
  }
  const ProfileRep& profile() {
    if (!profile_) profile_ = std::make_unique<ProfileRep>(make_profile(Grid::symmetric(cfg_.profile.X, cfg_.profile.n)));
    return *profile_;
  }
  const ProfileRep& dyn_profile() {
    if (!dyn_profile_) {
      const Grid g = Grid::with_spacing(cfg_.profile.X, cfg_.dynamics.dx);
      if (profile_ && profile_->grid == g) {
        dyn_profile_ = std::make_unique<ProfileRep>(*profile_);
      } else {
        dyn_profile_ = std::make_unique<ProfileRep>(make_profile(g));
      }
    }
    return *dyn_profile_;
  }
  const Trajectory& trajectory() {
    if (!traj_) {
      EvolveOptions o;
      o.T = cfg_.dynamics.T;
      o.backend = cfg_.dynamics.backend;
      o.cfl = cfg_.dynamics.cfl;
      o.n_out = cfg_.dynamics.n_out;
      traj_ = std::make_unique<Trajectory>(
          evolve(model(), dyn_profile(), cfg_.dynamics.perturbation, cfg_.dynamics.shift, o));
    }
    return *traj_;
  }
  std::vector<Mat> thetas(const ProfileRep& p) {
    const FrameSeries fs = frame_along_profile(model(), p);
    const ProfileSource src = source_along_profile(model(), p, fs);
    std::vector<Mat> th;
    for (const auto& s : src.splits) th.push_back(s.Theta);
    return th;
  }
  void write(const std::string& name, const std::string& content) {
    fs::create_directories(out_);
    write_atomic((fs::path(out_) / name).string(), content);
  }
  void write(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  json model_json() {
    const ModelSpec& m = model();
    json params = json::object();
    for (const auto& [k, v] : m.params()) params[k] = v;
    return {{"name", m.name()}, {"dim", m.dim()}, {"u_minus", to_json(m.u_minus())},
            {"u_plus", to_json(m.u_plus())}, {"shock_speed", m.shock_speed()}, {"params", params}};
  }

  const Config& cfg_;
  std::string out_;
  std::unique_ptr<ModelSpec> model_;
  std::unique_ptr<ProfileRep> profile_;
  std::unique_ptr<ProfileRep> dyn_profile_;
  std::unique_ptr<Trajectory> traj_;
};

int Pipeline::profile_stage() {
  stage = "profile";
  const ModelSpec& m = model();
  const ProfileRep& p = profile();
  const int dim = m.dim();

  std::vector<std::string> header{"x"};
  for (const auto& h : indexed("U_", dim)) header.push_back(h);
  for (const auto& h : indexed("dU_", dim)) header.push_back(h);
  Csv csv(header);
  for (int i = 0; i < p.grid.n; ++i) {
    csv.cell(p.grid.x(i));
    for (int k = 0; k < dim; ++k) csv.cell(p.values(k, i));
    for (int k = 0; k < dim; ++k) csv.cell(p.d1(k, i));
    csv.end_row();
  }

  json decay = json::array();
  for (int side = 0; side < 2; ++side) {
    for (int k = 0; k < 3; ++k) {
      const DecayFit& f = p.decay[static_cast<size_t>(side)][static_cast<size_t>(k)];
      decay.push_back({{"side", side == 0 ? "minus" : "plus"}, {"k", k}, {"amplitude", num(f.amplitude)},
                       {"rate", num(f.rate)}, {"lower_bound", f.lower_bound}});
    }
  }
  const TailConstants tc = tail_constants(p);
  const double scale = 1.0 + std::max(max_abs(m.u_minus()), max_abs(m.u_plus()));
  json j = {{"model", model_json()},
            {"method", cfg_.profile.method},
            {"grid", {{"x_min", p.grid.x_min}, {"dx", p.grid.dx}, {"n", p.grid.n}}},
            {"residual", residual(m, p)},
            {"residual_scale", scale},
            {"endpoint_gap",
             {{"minus", max_abs(Vec(p.value(0) - m.u_minus()))}, {"plus", max_abs(Vec(p.value(p.grid.n - 1) - m.u_plus()))}}},
            {"pinning", {{"x", 0.0}, {"u1", p.interpolate(0.0, 0)[0]},
                         {"target", 0.5 * (m.u_minus()[0] + m.u_plus()[0])}}},
            {"decay", decay},
            {"tail_constants", {{"C_tail", tc.amplitude}, {"theta_tilde", tc.rate}}}};
  write("profile.csv", csv.str());
  write("profile.json", j);
  return exit_code::kPass;
}

int Pipeline::check_stage() {
  stage = "check";
  const ModelSpec& m = model();
  const SpectralConfig& sc = cfg_.spectral;
  json failures = json::array();
  json a1, a2, a3;

  // Dissipativity first: it needs the endstates only.
  DampingRate rate;
  rate.E_minus = diagonal_source(m, m.u_minus());
  rate.E_plus = diagonal_source(m, m.u_plus());
  const double worst = std::max(rate.E_minus.maxCoeff(), rate.E_plus.maxCoeff());
  bool dissipative = true;
  try {
    rate = damping_rate(m);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotDissipative) throw;
    dissipative = false;
    failures.push_back(error_json(e));
  }
  const SpectralCertificate cert = dissipativity_certificate(m, sc.xi_max, sc.n_xi, sc.margin, sc.xi_min);
  json cert_j = {{"certified", cert.certified}, {"xi_min", sc.xi_min}, {"xi_max", sc.xi_max},
                 {"n_xi", sc.n_xi}, {"margin", sc.margin}, {"conjugate_error", cert.conjugate_error}};
  if (cert.certified) {
    cert_j["C"] = cert.C;
    cert_j["c"] = cert.c;
  } else {
    cert_j["witness"] = {{"side", to_string(cert.witness_side)}, {"xi", cert.witness_xi}, {"max_re_mu", cert.witness_re}};
    failures.push_back({{"kind", "SpectralCertificate"},
                        {"message", "Re sigma(i xi A + Q) > -margin at the largest scanned frequency"}});
  }
  json expansion = json::object();
  for (Side sd : {Side::Minus, Side::Plus}) {
    try {
      const EigenFrame f = decompose(m.A(sd == Side::Minus ? m.u_minus() : m.u_plus()));
      const double base = 10.0 * std::max(f.lambdas.cwiseAbs().maxCoeff(), 1e-3);
      const ExpansionCheck ex = expansion_check(m, sd, {base, 2 * base, 4 * base, 8 * base});
      json rem = json::array();
      for (size_t k = 0; k < ex.xi.size(); ++k) rem.push_back({{"xi", ex.xi[k]}, {"remainder", to_json(ex.remainder[k])}});
      expansion[to_string(sd)] = {{"constant", ex.constant}, {"samples", rem}};
    } catch (const Error& e) {
      expansion[to_string(sd)] = {{"error", error_json(e)}};
    }
  }
  const bool a3_ok = dissipative && cert.certified;
  a3 = {{"certified", a3_ok},
        {"E_minus", to_json(rate.E_minus)},
        {"E_plus", to_json(rate.E_plus)},
        {"theta_E", -0.5 * worst},
        {"theta_E_signed", 0.5 * worst},
        {"dissipative", dissipative},
        {"certificate", cert_j},
        {"expansion", expansion}};

  // Profile and hyperbolicity checks along the profile.
  bool a1_ok = false, a2_ok = false;
  std::string frames_csv;
  try {
    const ProfileRep& p = profile();
    const double res = residual(m, p);
    const double scale = 1.0 + std::max(max_abs(m.u_minus()), max_abs(m.u_plus()));
    bool rates_ok = true;
    for (const auto& side : p.decay) {
      for (const auto& f : side) rates_ok = rates_ok && std::isfinite(f.rate) && f.rate > 0.0;
    }
    a1_ok = res <= 1e-8 * scale && rates_ok;
    a1 = {{"certified", a1_ok}, {"residual", res}, {"decay_rates_positive", rates_ok}};

    const HyperbolicityReport hr = hyperbolicity_scan(m, p, sc.c_min);
    a2_ok = hr.pass;
    a2 = {{"certified", a2_ok}, {"c_min", sc.c_min}, {"c_nonchar", hr.min_abs_lambda},
          {"gap_min", hr.min_gap}, {"x_min_abs_lambda", hr.x_min_abs_lambda}};
    if (!a2_ok) failures.push_back({{"kind", "Characteristic"}, {"message", "min |lambda| below c_min"}});

    const FrameSeries fs = frame_along_profile(m, p);
    const ProfileSource src = source_along_profile(m, p, fs);
    a2["lipschitz"] = fs.lipschitz;
    a2["max_commutator_residual"] = src.max_commutator_residual;
    a2["max_theta"] = src.max_theta;
    const int dim = m.dim();
    std::vector<std::string> header{"x"};
    for (const auto& h : indexed("lambda_", dim)) header.push_back(h);
    for (const auto& h : indexed("E_", dim)) header.push_back(h);
    header.push_back("F_inf");
    header.push_back("Theta_inf");
    Csv csv(header);
    for (int i = 0; i < p.grid.n; ++i) {
      const auto& f = fs.frames[static_cast<size_t>(i)];
      const auto& s = src.splits[static_cast<size_t>(i)];
      csv.cell(p.grid.x(i));
      for (int k = 0; k < dim; ++k) csv.cell(f.lambdas[k]);
      for (int k = 0; k < dim; ++k) csv.cell(s.E(k, k));
      csv.cell(inf_norm(s.F)).cell(inf_norm(s.Theta));
      csv.end_row();
    }
    frames_csv = csv.str();
  } catch (const Error& e) {
    if (!certification_kind(e.kind())) throw;
    failures.push_back(error_json(e));
    if (a1.is_null()) a1 = {{"certified", false}, {"error", error_json(e)}};
    if (a2.is_null()) a2 = {{"certified", false}, {"error", error_json(e)}};
  }

  Csv spec({"side", "xi", "j", "re_mu", "im_mu"});
  for (const auto& scan : cert.scans) {
    for (int sign : {-1, 1}) {
      for (size_t kk = 0; kk < scan.xi.size(); ++kk) {
        const size_t k = sign < 0 ? scan.xi.size() - 1 - kk : kk;
        CVec mu = sign < 0 ? CVec(scan.spectra[k].conjugate()) : scan.spectra[k];
        for (Eigen::Index j = 0; j < mu.size(); ++j) {
          spec.cell(std::string(to_string(scan.side))).cell(sign * scan.xi[k]).cell(static_cast<int>(j + 1));
          spec.cell(mu[j].real()).cell(mu[j].imag());
          spec.end_row();
        }
      }
    }
  }
  const bool ok = a1_ok && a2_ok && a3_ok;
  json j = {{"model", model_json()},
            {"certified", ok},
            {"assumption1_profile", a1},
            {"assumption2_hyperbolicity", a2},
            {"assumption3_dissipativity", a3},
            {"failures", failures}};
  if (!frames_csv.empty()) write("frames.csv", frames_csv);
  write("spectrum.csv", spec.str());
  write("assumptions.json", j);
  return ok ? exit_code::kPass : exit_code::kCertification;
}

int Pipeline::evolve_stage() {
  stage = "evolve";
  const Trajectory& tr = trajectory();
  const ProfileRep& p = dyn_profile();
  const std::vector<Mat> th = thetas(p);
  const int dim = model().dim();
  const VerifyConfig& vc = cfg_.verify;

  std::vector<std::string> header{"t", "x"};
  for (const auto& h : indexed("U_", dim)) header.push_back(h);
  for (const auto& h : indexed("Phi_", dim)) header.push_back(h);
  for (const auto& h : indexed("Psi_", dim)) header.push_back(h);
  Csv traj_csv(header);
  for (size_t m = 0; m < tr.snaps.size(); m += static_cast<size_t>(vc.csv_time_stride)) {
    const Snapshot& s = tr.snaps[m];
    const DiagonalVars d = diagonal_vars(tr.model, p, s, th);
    for (int i = 0; i < tr.grid.n; i += vc.csv_node_stride) {
      traj_csv.cell(s.t).cell(tr.grid.x(i));
      for (int k = 0; k < dim; ++k) traj_csv.cell(s.U(k, i));
      for (int k = 0; k < dim; ++k) traj_csv.cell(d.Phi(k, i));
      for (int k = 0; k < dim; ++k) traj_csv.cell(d.Psi(k, i));
      traj_csv.end_row();
    }
  }
  const NormSeries ns = norm_series(tr);
  Csv norms({"t", "C0", "C1", "C2", "L2", "H1", "H2", "abs_delta_dot"});
  for (size_t m = 0; m < ns.t.size(); ++m) {
    norms.cell(ns.t[m]).cell(ns.c0[m]).cell(ns.c1[m]).cell(ns.c2[m]).cell(ns.l2[m]).cell(ns.h1[m]).cell(ns.h2[m]);
    norms.cell(std::abs(ns.delta_dot[m]));
    norms.end_row();
  }
  const int mid = static_cast<int>(tr.snaps.size()) / 2;
  json j = {{"backend", to_string(tr.backend)},
            {"T", tr.T()},
            {"n_out", static_cast<int>(tr.snaps.size()) - 1},
            {"steps", tr.n_steps},
            {"max_cfl", tr.max_cfl},
            {"eps_budget", tr.eps_budget},
            {"eps_delta", tr.shift.eps_delta()},
            {"budget_violated", tr.budget_violated},
            {"first_violation_t", tr.first_violation_t},
            {"max_c1", tr.max_c1},
            {"initial", {{"C0", ns.c0.front()}, {"C1", ns.c1.front()}, {"C2", ns.c2.front()}, {"L2", ns.l2.front()}}},
            {"final", {{"C0", ns.c0.back()}, {"C1", ns.c1.back()}, {"C2", ns.c2.back()}, {"L2", ns.l2.back()}}},
            {"w_equation_residual_mid", w_equation_residual(tr, std::max(1, mid))}};
  write("trajectory.csv", traj_csv.str());
  write("norms.csv", norms.str());
  write("evolve.json", j);
  return exit_code::kPass;
}

int Pipeline::verify_stage() {
  stage = "verify";
  const ModelSpec& m = model();
  const ProfileRep& p = dyn_profile();
  const VerifyConfig& vc = cfg_.verify;
  const Trajectory& tr = trajectory();
  const std::vector<double> grid = vc.theta_grid.empty() ? default_theta_grid() : vc.theta_grid;
  bool ok = true;

  const DampingRate rate = damping_rate(m);
  const double theta_E = rate.theta_E;
  const FrameSeries fs = frame_along_profile(m, p);
  const double eps_delta = tr.shift.eps_delta();

  // No-damping radius and characteristics.
  json hb;
  NoDampingRadius ndr;
  bool have_R = true;
  try {
    ndr = no_damping_radius(m, p, cfg_.dynamics.eps_budget, cfg_.seed, vc.lipschitz_samples);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EpsilonTooLarge) throw;
    have_R = false;
    ok = false;
    hb["radius_error"] = error_json(e);
  }
  const double half_width = std::min(-tr.grid.x_min, tr.grid.x_max());
  const double span = have_R ? std::min(2.0 * ndr.R, half_width) : 0.5 * half_width;
  const std::vector<CharPath> paths = trace_family_set(tr, vc.n_paths, std::max(span, tr.grid.dx), vc.substeps);
  const TailConstants tc = tail_constants(p);
  try {
    const HBoundReport r = verify_H_bound(paths, theta_E, fs.min_abs_lambda, tc.amplitude, tc.rate, m.dim());
    hb["C_emp"] = r.C_emp;
    hb["C_emp_half_horizon"] = r.C_half;
    hb["C_family"] = r.C_family;
    hb["relative_change"] = r.relative_change;
    hb["analytic_bound"] = num(r.analytic_bound);
    hb["bounded"] = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotBounded) throw;
    hb["bounded"] = false;
    hb["error"] = error_json(e);
    ok = false;
  }
  double max_exit = 0.0, duhamel = 0.0;
  bool exits_ok = true;
  int undecided = 0;
  const double exit_bound = have_R ? 2.0 * ndr.R / (fs.min_abs_lambda - eps_delta) : 0.0;
  for (const auto& path : paths) {
    duhamel = std::max(duhamel, duhamel_error(tr, path));
    if (have_R && std::abs(path.x0) <= ndr.R && ndr.R > 0.0) {
      const double te = exit_time(path, ndr.R);
      // A path still inside at the horizon only counts against the bound if
      // the horizon is long enough to decide.
      if (te < 0.0) {
        if (tr.T() >= exit_bound) exits_ok = false;
        ++undecided;
      } else {
        if (te > exit_bound) exits_ok = false;
        max_exit = std::max(max_exit, te);
      }
    }
  }
  hb["theta_E"] = theta_E;
  hb["theta_E_signed"] = rate.theta_E_signed;
  hb["n_paths"] = static_cast<int>(paths.size());
  hb["duhamel_max_error"] = duhamel;
  if (have_R) {
    hb["R"] = ndr.R;
    hb["C_tail"] = ndr.C_tail;
    hb["theta_tilde"] = ndr.theta_tilde;
    hb["C_lip"] = ndr.C_lip;
    hb["eps_budget"] = ndr.eps_budget;
    hb["max_diag_source_outside_R"] = max_diag_source_outside(tr, ndr.R);
    hb["exit"] = {{"bound", exit_bound}, {"max_exit_time", max_exit}, {"all_within_bound", exits_ok},
                  {"undecided_at_horizon", undecided}};
  }

  Csv chars({"j", "x0", "s", "X", "H"});
  for (const auto& path : paths) {
    const int n_out = static_cast<int>(tr.snaps.size()) - 1;
    for (int mm = 0; mm <= n_out; mm += vc.csv_time_stride) {
      const size_t k = path.at_output(mm);
      chars.cell(path.family + 1).cell(path.x0).cell(path.s[k]).cell(path.X[k]).cell(path.H[k]);
      chars.end_row();
    }
  }

  // Norm fits.
  const bool localized = cfg_.dynamics.perturbation.kind != PerturbationSpec::Kind::Offset;
  const NormSeries ns = norm_series(tr);
  json fits = json::object();
  for (const auto& name : vc.norms) {
    const NormKind kind = name == "C0" ? NormKind::C0
                          : name == "C1" ? NormKind::C1
                          : name == "C2" ? NormKind::C2
                          : name == "L2" ? NormKind::L2
                                         : NormKind::H2;
    if (!localized && (kind == NormKind::L2 || kind == NormKind::H2)) {
      fits[name] = {{"skipped", "offset perturbations are not square integrable"}};
      continue;
    }
    try {
      const DampingFit f = fit_damping(ns, kind, grid, vc.C_cap);
      json curve = json::array();
      for (size_t k = 0; k < f.theta.size(); ++k) {
        curve.push_back({{"theta", f.theta[k]}, {"C_min", num(f.C_min[k])}, {"feasible", static_cast<bool>(f.feasible[k])}});
      }
      fits[name] = {{"feasible", true}, {"max_feasible_theta", f.max_feasible_theta}, {"C_at_max", f.C_at_max},
                    {"degenerate", f.degenerate}, {"curve", curve}};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyFeasible) throw;
      fits[name] = {{"feasible", false}, {"error", error_json(e)}};
      ok = false;
    }
  }

  // Slaving of the commutator-corrected derivatives.
  json slaving;
  {
    std::vector<Mat> th;
    const ProfileSource src = source_along_profile(m, p, fs);
    for (const auto& s : src.splits) th.push_back(s.Theta);
    try {
      const SlavingReport sr = slaving_check(tr, th, grid, vc.C_cap);
      slaving = {{"feasible", true},
                 {"psi_tilde", {{"max_feasible_theta", sr.psi_tilde.max_feasible_theta}, {"C_at_max", sr.psi_tilde.C_at_max}}},
                 {"ups_tilde", {{"max_feasible_theta", sr.ups_tilde.max_feasible_theta}, {"C_at_max", sr.ups_tilde.C_at_max}}}};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptyFeasible) throw;
      slaving = {{"feasible", false}, {"error", error_json(e)}};
    }
  }

  // Weighted L2 energies.
  json weights_j = json::array();
  std::string energies_csv;
  json energy_j;
  if (localized) {
    // The tail constant here bounds the profile terms of the energy identity,
    // not the profile itself. A zero envelope still needs positive constants.
    const double C_w = tc.rate > 0.0 ? weight_tail_constant(m, p, tc.rate) : 0.0;
    const double C_alpha = vc.C_alpha ? *vc.C_alpha : (C_w > 0.0 ? 4.0 * C_w : 1.0);
    const double c_alpha = vc.c_alpha ? *vc.c_alpha : (tc.rate > 0.0 ? 0.5 * tc.rate : 0.125);
    std::vector<WeightFn> ws;
    for (int j = 0; j < m.dim(); ++j) {
      ws.push_back(weight_fn(j, m, p, C_alpha, c_alpha, fs.min_abs_lambda));
      weights_j.push_back({{"family", j + 1}, {"C_alpha", C_alpha}, {"C_weight_tail", C_w}, {"c_alpha", c_alpha},
                           {"min_alpha", ws.back().min_alpha}, {"lower_bound", ws.back().lower_bound},
                           {"residual", ws.back().residual}});
    }
    double lq = 0.0;
    for (int i = 0; i < p.grid.n; ++i) lq = std::max(lq, max_abs(Vec(fs.frames[static_cast<size_t>(i)].L * p.d1.col(i))));
    EnergyCheckOptions eo;
    eo.theta_E = theta_E;
    eo.C_delta = 2.0 * lq * std::sqrt(2.0 * half_width);
    // Off-diagonal coupling enters each family's identity with at most twice
    // the largest row of F.
    double f_max = 0.0;
    for (const auto& sp : source_along_profile(m, p, fs).splits) f_max = std::max(f_max, inf_norm(sp.F));
    eo.C_phi = 2.0 * f_max;
    const EnergySeries es = weighted_energy_series(tr, ws, eo);
    std::vector<std::string> header{"t"};
    for (int j = 1; j <= m.dim(); ++j) {
      header.push_back("e_" + std::to_string(j));
      header.push_back("edot_" + std::to_string(j));
    }
    Csv csv(header);
    for (size_t k = 0; k < es.t.size(); ++k) {
      csv.cell(es.t[k]);
      for (int j = 0; j < m.dim(); ++j) csv.cell(es.e[static_cast<size_t>(j)][k]).cell(es.edot[static_cast<size_t>(j)][k]);
      csv.end_row();
    }
    energies_csv = csv.str();
    json fam = json::array();
    for (int j = 0; j < m.dim(); ++j) {
      const auto& e = es.e[static_cast<size_t>(j)];
      const double ratio = e.front() > 0.0 ? e.back() / e.front() : 0.0;
      fam.push_back({{"family", j + 1}, {"ratio", ratio}, {"target", std::exp(-theta_E * tr.T())},
                     {"decayed", ratio <= std::exp(-theta_E * tr.T())}, {"flagged_intervals", es.flagged[static_cast<size_t>(j)]}});
    }
    energy_j = fam;
  }

  json damping = {{"theta_E", theta_E}, {"C_cap", vc.C_cap}, {"fits", fits}, {"slaving", slaving},
                  {"weights", weights_j}, {"energies", energy_j}, {"localized", localized},
                  {"eps_budget_violated", tr.budget_violated}};
  write("characteristics.csv", chars.str());
  write("h_bound.json", hb);
  write("damping.json", damping);
  if (!energies_csv.empty()) write("energies.csv", energies_csv);
  return ok ? exit_code::kPass : exit_code::kCertification;
}

}  // namespace

std::optional<Subcommand> parse_subcommand(const std::string& name) {
  if (name == "profile") return Subcommand::Profile;
  if (name == "check") return Subcommand::Check;
  if (name == "evolve") return Subcommand::Evolve;
  if (name == "verify") return Subcommand::Verify;
  if (name == "all") return Subcommand::All;
  return std::nullopt;
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::Io, "failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot move report into place at '" + path + "'");
  }
}

int run(Subcommand cmd, const Config& config, const std::string& out_dir) {
  Pipeline pl(config, out_dir);
  auto report_error = [&](const std::string& kind, const std::string& message) {
    json j = {{"error", {{"kind", kind}, {"message", message}, {"stage", pl.stage}}}};
    try {
      fs::create_directories(out_dir);
      write_atomic((fs::path(out_dir) / "error.json").string(), j.dump(2) + "\n");
    } catch (...) {
    }
  };
  try {
    switch (cmd) {
      case Subcommand::Profile: return pl.profile_stage();
      case Subcommand::Check: return pl.check_stage();
      case Subcommand::Evolve: return pl.evolve_stage();
      case Subcommand::Verify: return pl.verify_stage();
      case Subcommand::All: {
        pl.profile_stage();
        const int c = pl.check_stage();
        if (c != exit_code::kPass) return c;
        pl.evolve_stage();
        return pl.verify_stage();
      }
    }
  } catch (const Error& e) {
    report_error(std::string(to_string(e.kind())), e.what());
    return exit_code::kCrash;
  } catch (const std::exception& e) {
    report_error("Internal", e.what());
    return exit_code::kCrash;
  }
  return exit_code::kCrash;
}

}  // namespace relaxdamp
