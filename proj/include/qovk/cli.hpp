#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qovk/experiment.hpp"

namespace qovk::cli {

enum class Subcommand { GenData, Train, Eval, ReproduceTable1, CircuitVerify, KernelEval, EmitHeatmap };

std::string to_string(Subcommand s);

/// Settings that only some subcommands read.
struct ToolOptions {
  std::string data;    // train: dataset.json (default <out>/dataset.json)
  std::string model;   // eval
  std::string state;   // eval
  std::string variant = "entangled_kraus_pauli";
  double ridge = 1e-3;
  int instances = 50;  // circuit-verify
  int t = 1;
  int s = 1;
};

struct Command {
  Subcommand subcommand = Subcommand::ReproduceTable1;
  std::optional<std::filesystem::path> config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::uint64_t seed = 42;
  std::filesystem::path out_dir = "qovk_out";
  unsigned threads = 0;
  std::optional<long> shots;
  bool quiet = false;

  /// Defaults, then the config file, then --set overrides, then --seed.
  ExperimentConfig experiment;
  ToolOptions tool;
};

struct ParseExit {
  int code = 0;
};

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

/// args excludes the program name. Usage errors print to err and yield code 2;
/// --help prints to out and yields code 0.
std::variant<Command, ParseExit> parse_args(const std::vector<std::string>& args, std::ostream& out,
                                            std::ostream& err);

/// Fully resolved configuration as echoed to <out>/config.json.
nlohmann::json resolved_config(const Command& cmd);

int run(const Command& cmd, std::ostream& out, std::ostream& err);

/// parse_args + run.
int main_entry(int argc, char** argv);

}  // namespace qovk::cli
