// relaxdamp: profile, certify and verify damping of perturbed relaxation shocks.
#include "relaxdamp/config.hpp"
#include "relaxdamp/errors.hpp"
#include "relaxdamp/pipeline.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>

int main(int argc, char** argv) {
  using namespace relaxdamp;

  CLI::App app{"Damping estimates for perturbed relaxation shock profiles"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  const char* names[][2] = {
      {"profile", "Solve the traveling-wave profile"},
      {"check", "Certify hyperbolicity and dissipativity assumptions"},
      {"evolve", "Evolve a perturbation of the shifted profile"},
      {"verify", "Check the characteristic and damping estimates"},
      {"all", "Run every stage in order"},
  };
  for (const auto& n : names) {
    CLI::App* sub = app.add_subcommand(n[0], n[1]);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::kConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Config config;
  try {
    config = parse_config(config_path);
  } catch (const Error& e) {
    std::cerr << "relaxdamp: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code::kConfig;
  }
  if (out_dir.empty()) out_dir = config.output;

  const int rc = run(*parse_subcommand(name), config, out_dir);
  if (rc == exit_code::kCrash) {
    std::cerr << "relaxdamp: " << name << " failed, see " << out_dir << "/error.json\n";
  } else if (rc == exit_code::kCertification) {
    std::cerr << "relaxdamp: " << name << ": certification failed\n";
  }
  return rc;
}
