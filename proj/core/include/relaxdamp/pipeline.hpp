#pragma once

#include "relaxdamp/config.hpp"

#include <optional>
#include <string>

namespace relaxdamp {

enum class Subcommand { Profile, Check, Evolve, Verify, All };

std::optional<Subcommand> parse_subcommand(const std::string& name);

namespace exit_code {
inline constexpr int kPass = 0;
inline constexpr int kCrash = 1;
inline constexpr int kConfig = 2;
inline constexpr int kCertification = 3;
}  // namespace exit_code

/// Runs one pipeline stage (or all of them) and writes its artifacts into
/// out_dir. Module errors are written to error.json and give exit code 1;
/// falsified assumptions or empty feasibility sets give 3.
int run(Subcommand cmd, const Config& config, const std::string& out_dir);

/// Writes content to path through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace relaxdamp
