#pragma once

#include "relaxdamp/dynamics.hpp"
#include "relaxdamp/model.hpp"
#include "relaxdamp/polynomial.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace relaxdamp {

struct ModelConfig {
  std::string kind = "jinxin";
  // jinxin
  double a = 2.0;
  double eps = 1.0;
  std::vector<double> flux{0.0, 0.0, 0.5};
  double u_minus_scalar = 1.0;
  double u_plus_scalar = -1.0;
  // custom
  std::string name = "custom";
  int dim = 0;
  std::optional<PolyMatrix> A;
  std::optional<PolyVector> q;
  std::optional<PolyMatrix> Q;
  Vec u_minus;
  Vec u_plus;
  double shock_speed = 0.0;
};

struct ProfileConfig {
  double X = 40.0;
  int n = 4001;
  double tol = 1e-8;
  std::string method = "shoot";  // shoot | exact
};

struct SpectralConfig {
  double xi_min = 0.01;
  double xi_max = 100.0;
  int n_xi = 400;
  double margin = 0.1;
  double c_min = 1e-3;  // required non-characteristic bound
};

struct DynamicsConfig {
  PerturbationSpec perturbation = PerturbationSpec::gaussian(1e-2, 2.0);
  ShiftSpec shift;
  double T = 80.0;
  Backend backend = Backend::Moc;
  double dx = 0.02;
  double cfl = 0.45;
  int n_out = 200;
  double eps_budget = 1e-2;
};

struct VerifyConfig {
  std::vector<double> theta_grid;  // empty: default grid
  double C_cap = 1000.0;
  std::vector<std::string> norms{"C2", "H2"};
  int n_paths = 20;
  int substeps = 8;
  int lipschitz_samples = 512;
  std::optional<double> C_alpha;
  std::optional<double> c_alpha;
  int csv_time_stride = 5;   // trajectory/characteristics output thinning
  int csv_node_stride = 20;
};

struct Config {
  ModelConfig model;
  ProfileConfig profile;
  SpectralConfig spectral;
  DynamicsConfig dynamics;
  VerifyConfig verify;
  std::string output = "out";
  std::uint64_t seed = 7;
};

/// Reads and validates a JSON config. ParseError for malformed JSON or an
/// unreadable file, ValidationError (message starts with the key path) for
/// unknown keys and out-of-range values.
Config parse_config(const std::string& path);
Config parse_config_text(const std::string& text);

ModelSpec build_model(const ModelConfig& mc);

}  // namespace relaxdamp
