#pragma once

#include <string>
#include <vector>

namespace mgw::cli {

// Parsed command line for one invocation; round-trips through JSON so runs
// are replayable from the emitted reports.
struct RunConfig {
  std::string subcommand;
  std::string law_path;
  std::string regime;          // verify
  std::string measure = "base";  // sample
  std::string kind = "moment";   // asymptotics: moment | gf
  std::string target = "auto";   // asymptotics moment: auto|critical|supercritical
  std::string out_path;
  int ell = 1;
  double s = 0.5;
  double t = 0.5;
  int depth = 2;
  int p_max = 0;  // 0 = per-regime default
  std::uint64_t count = 1;
  std::uint64_t seed = 20240101;
  bool exact = false;
  bool zero_mark = false;

  std::string to_json_text() const;
  static RunConfig from_json_text(const std::string& text);
  bool operator==(const RunConfig&) const = default;
};

// Executes one CLI invocation. argv[0] is the program name. Returns the
// process exit code: 0 success, 1 verification failure, 2 usage error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // without program name

}  // namespace mgw::cli
