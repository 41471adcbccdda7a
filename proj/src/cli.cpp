#include "qovk/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "qovk/circuit.hpp"

namespace qovk::cli {

namespace {

constexpr std::pair<Subcommand, const char*> kSubcommands[] = {
    {Subcommand::GenData, "gen-data"},
    {Subcommand::Train, "train"},
    {Subcommand::Eval, "eval"},
    {Subcommand::ReproduceTable1, "reproduce-table1"},
    {Subcommand::CircuitVerify, "circuit-verify"},
    {Subcommand::KernelEval, "kernel-eval"},
    {Subcommand::EmitHeatmap, "emit-heatmap"},
};

const char* describe(Subcommand s) {
  switch (s) {
    case Subcommand::GenData: return "Generate a random Pauli channel and a noisy training set";
    case Subcommand::Train: return "Fit one kernel variant on a saved training set";
    case Subcommand::Eval: return "Predict the output state of a saved model on a saved input state";
    case Subcommand::ReproduceTable1: return "Run the channel-recovery experiment for every kernel variant";
    case Subcommand::CircuitVerify: return "Check the simulated swap-test kernel circuit against closed forms";
    case Subcommand::KernelEval: return "Assemble a Gram matrix on random states and report psd diagnostics";
    case Subcommand::EmitHeatmap: return "Write Choi-matrix heatmaps for one learned channel";
  }
  return "";
}

std::string json_value_to_override(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!joined.empty()) joined += ',';
      joined += item.is_string() ? item.get<std::string>() : item.dump();
    }
    return joined;
  }
  return v.dump();
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used == value.size()) return d;
  } catch (const std::exception&) {
  }
  throw DomainError(key + ": expected a number, got \"" + value + "\"");
}

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int i = std::stoi(value, &used);
    if (used == value.size()) return i;
  } catch (const std::exception&) {
  }
  throw DomainError(key + ": expected an integer, got \"" + value + "\"");
}

/// Returns false when the key is not a tool option.
bool apply_tool_override(ToolOptions& t, const std::string& key, const std::string& value) {
  if (key == "data") t.data = value;
  else if (key == "model") t.model = value;
  else if (key == "state") t.state = value;
  else if (key == "variant") t.variant = value;
  else if (key == "ridge") t.ridge = to_double(key, value);
  else if (key == "instances") t.instances = to_int(key, value);
  else if (key == "t") t.t = to_int(key, value);
  else if (key == "s") t.s = to_int(key, value);
  else return false;
  return true;
}

void apply_key(Command& cmd, const std::string& key, const std::string& value) {
  if (apply_tool_override(cmd.tool, key, value)) return;
  apply_override(cmd.experiment, key, value);
}

void validate_tool(const ToolOptions& t) {
  kernel_variant_from_string(t.variant);
  if (!(t.ridge > 0.0)) throw DomainError("ridge: must be positive");
  if (t.instances < 1) throw DomainError("instances: must be positive");
  if (t.t < 1 || t.s < 1 || 1 + 2 * t.t + t.s > circuit::kMaxQubits) {
    throw DomainError("t, s: need positive register sizes within the qubit cap");
  }
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

void configure_logging(bool quiet) {
  static auto logger = [] {
    auto l = spdlog::stderr_color_mt("qovk");
    l->set_pattern("[%l] %v");
    return l;
  }();
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("QOVK_LOG")) {
    const std::string v(env);
    if (v == "error") level = spdlog::level::err;
    else if (v == "debug") level = spdlog::level::debug;
  }
  if (quiet) level = spdlog::level::err;
  logger->set_level(level);
}

std::shared_ptr<spdlog::logger> log() { return spdlog::get("qovk"); }

/// Error annotated with the pipeline stage that raised it.
struct StageError : std::runtime_error {
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what) {}
};

template <typename F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

int cmd_gen_data(const Command& cmd, std::ostream& out) {
  const ExperimentConfig& cfg = cmd.experiment;
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(cfg.seed >> 32)};
  Rng rng(seq);
  const QuantumChannel channel = stage("channel", [&] { return random_pauli_channel(cfg.qubit_dim, rng); });
  const TrainingSet ts = stage("dataset", [&] { return generate_dataset(cfg, channel, rng); });
  write_json(cmd.out_dir / "channel.json", channel_to_json(channel));
  write_json(cmd.out_dir / "dataset.json", training_set_to_json(ts));
  out << "wrote " << ts.inputs.size() << " samples to " << (cmd.out_dir / "dataset.json").string() << '\n';
  return kExitOk;
}

int cmd_train(const Command& cmd, std::ostream& out) {
  const std::filesystem::path data =
      cmd.tool.data.empty() ? cmd.out_dir / "dataset.json" : std::filesystem::path(cmd.tool.data);
  const TrainingSet ts = stage("load", [&] { return training_set_from_json(read_json(data)); });
  const Eigen::Index a = ts.inputs.front().dim();
  std::seed_seq seq{static_cast<std::uint32_t>(cmd.experiment.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(cmd.experiment.seed >> 32)};
  Rng rng(seq);
  const KernelChoice kernel =
      stage("kernel", [&] { return build_kernel(kernel_variant_from_string(cmd.tool.variant), a, rng); });
  const RegressionModel model = stage("fit", [&] { return fit(ts, kernel, cmd.tool.ridge); });
  write_json(cmd.out_dir / "model.json", model_to_json(model));
  out << "trained " << cmd.tool.variant << " on " << ts.inputs.size()
      << " samples (relative residual " << model.relative_residual << ")\n";
  return kExitOk;
}

int cmd_eval(const Command& cmd, std::ostream& out) {
  if (cmd.tool.model.empty() || cmd.tool.state.empty()) {
    throw StageError("eval", "both model=<path> and state=<path> must be set");
  }
  const RegressionModel model = stage("load", [&] { return model_from_json(read_json(cmd.tool.model)); });
  const DensityMatrix rho = stage("load", [&] { return density_from_json(read_json(cmd.tool.state)); });
  const ComplexMatrix prediction = stage("predict", [&] {
    const ComplexVector v = predict(model, rho);
    const auto b = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    return unvectorize(v, b);
  });
  nlohmann::json j = matrix_to_json(prediction);
  j["kind"] = "matrix";
  write_json(cmd.out_dir / "prediction.json", j);
  out << j.dump() << '\n';
  return kExitOk;
}

void print_summary(const TrialResult& r, std::ostream& out) {
  out << "variant                  mean_error    std\n";
  for (const auto& [v, s] : r.summaries) {
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(4);
    line << to_string(v);
    std::string name = line.str();
    name.resize(25, ' ');
    std::ostringstream nums;
    nums.setf(std::ios::fixed);
    nums.precision(4);
    nums << s.mean << " +- " << s.std << (s.degenerate_std ? " (single channel)" : "");
    out << name << nums.str() << '\n';
  }
}

void heatmaps_for_first_channel(const TrialResult& r, const std::filesystem::path& dir) {
  const ChannelOutcome& first = r.channels.front();
  std::vector<std::pair<std::string, ComplexMatrix>> learned;
  for (const auto& vo : first.variants) learned.emplace_back(to_string(vo.variant), vo.learned.choi);
  emit_heatmaps(to_choi(first.channel), learned, dir);
}

int cmd_reproduce(const Command& cmd, std::ostream& out) {
  const ExperimentConfig& cfg = cmd.experiment;
  log()->info("running {} channels with {} thread(s)", cfg.n_channels, cmd.threads);
  const TrialResult r = stage("trial", [&] { return run_trial(cfg, cfg.seed, cmd.threads); });
  stage("write", [&] {
    write_results(r, cfg, cmd.out_dir);
    heatmaps_for_first_channel(r, cmd.out_dir);
  });
  if (!cmd.quiet) print_summary(r, out);
  const auto scalar = r.summaries.find(KernelVariant::ScalarBaseline);
  const auto entangled = r.summaries.find(KernelVariant::EntangledKrausPauli);
  if (scalar == r.summaries.end() || entangled == r.summaries.end()) {
    log()->error("ordering check needs both scalar_baseline and entangled_kraus_pauli");
    return kExitRuntime;
  }
  const bool ordered = entangled->second.mean < scalar->second.mean;
  if (!ordered) log()->error("entangled_kraus_pauli mean error is not below scalar_baseline");
  return ordered ? kExitOk : kExitRuntime;
}

int cmd_circuit_verify(const Command& cmd, std::ostream& out) {
  std::seed_seq seq{static_cast<std::uint32_t>(cmd.experiment.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(cmd.experiment.seed >> 32)};
  Rng rng(seq);
  const circuit::VerificationReport rep = stage("simulate", [&] {
    return circuit::verify_kernel_circuit(cmd.tool.instances, cmd.tool.t, cmd.tool.s, rng);
  });
  nlohmann::json j = circuit::report_to_json(rep);
  j["tolerance"] = 1e-10;
  if (cmd.shots) {
    const Eigen::Index d = Eigen::Index{1} << cmd.tool.t;
    const PureState x = random_pure_state(d, rng);
    const PureState z = random_pure_state(d, rng);
    const PureState phi = random_pure_state(Eigen::Index{1} << cmd.tool.s, rng);
    const auto run = circuit::run_ovk_circuit(x, z, phi, haar_random_unitary(d << cmd.tool.s, rng));
    const auto shots = circuit::sample_shots(run.psi4, "a", *cmd.shots, rng);
    j["shots"] = {{"shots", shots.shots},
                  {"zeros", shots.zeros},
                  {"frequency", shots.frequency},
                  {"exact_probability", run.p0},
                  {"standard_error_bound", 0.5 / std::sqrt(static_cast<double>(shots.shots))}};
  }
  write_json(cmd.out_dir / "circuit_report.json", j);
  out << j.dump(2) << '\n';
  return rep.worst() < 1e-10 && rep.all_states_valid ? kExitOk : kExitRuntime;
}

int cmd_kernel_eval(const Command& cmd, std::ostream& out) {
  const ExperimentConfig& cfg = cmd.experiment;
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu),
                    static_cast<std::uint32_t>(cfg.seed >> 32)};
  Rng rng(seq);
  const KernelVariant v = kernel_variant_from_string(cmd.tool.variant);
  std::vector<DensityMatrix> data;
  for (int i = 0; i < cfg.n_train; ++i) data.push_back(random_density(cfg.qubit_dim, cfg.qubit_dim, rng));
  const KernelChoice kernel = stage("kernel", [&] { return build_kernel(v, cfg.qubit_dim, rng); });
  const BlockGram g = stage("gram", [&] { return gram(kernel, data); });
  const auto probes = random_probes(g.n(), g.p(), 32, rng);
  const PsdReport rep = validate_psd(g, probes);
  nlohmann::json j = {{"variant", cmd.tool.variant},
                      {"n", g.n()},
                      {"p", g.p()},
                      {"min_eigenvalue", rep.min_eigenvalue},
                      {"min_quadratic_form", rep.min_quadratic_form},
                      {"hermitian_deviation", rep.hermitian_deviation},
                      {"violation", rep.violation},
                      {"gram", matrix_to_json(g.flatten())}};
  write_json(cmd.out_dir / "gram.json", j);
  nlohmann::json brief = j;
  brief.erase("gram");
  out << brief.dump(2) << '\n';
  return kExitOk;
}

int cmd_emit_heatmap(const Command& cmd, std::ostream& out) {
  ExperimentConfig cfg = cmd.experiment;
  cfg.n_channels = 1;
  const TrialResult r = stage("trial", [&] { return run_trial(cfg, cfg.seed, 1); });
  stage("write", [&] { heatmaps_for_first_channel(r, cmd.out_dir); });
  out << "wrote heatmaps to " << cmd.out_dir.string() << '\n';
  return kExitOk;
}

}  // namespace

std::string to_string(Subcommand s) {
  for (const auto& [sub, name] : kSubcommands)
    if (sub == s) return name;
  return "unknown";
}

std::variant<Command, ParseExit> parse_args(const std::vector<std::string>& args, std::ostream& out,
                                            std::ostream& err) {
  CLI::App app{"Quantum operator-valued kernel laboratory", "qovk"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "qovk_out";
  unsigned threads = 0;
  std::optional<long> shots;
  bool quiet = false;

  std::vector<std::pair<Subcommand, CLI::App*>> subs;
  for (const auto& [sub, name] : kSubcommands) {
    CLI::App* sc = app.add_subcommand(name, describe(sub));
    sc->add_option("--config", config_path, "JSON configuration file");
    sc->add_option("--seed", seed, "Random seed (default 42)");
    sc->add_option("--out", out_dir, "Output directory; every file is written below it");
    sc->add_option("--threads", threads, "Worker threads (default: hardware concurrency)");
    sc->add_option("--set", sets, "Configuration override key=value (repeatable)")->allow_extra_args(false);
    sc->add_option("--shots", shots, "Add a finite-shot estimate (circuit-verify)");
    sc->add_flag("--quiet", quiet, "Only log errors");
    subs.emplace_back(sub, sc);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ParseExit{kExitOk};
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ParseExit{kExitOk};
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return ParseExit{kExitUsage};
  }

  Command cmd;
  for (const auto& [sub, sc] : subs)
    if (sc->parsed()) cmd.subcommand = sub;
  cmd.out_dir = out_dir;
  cmd.threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  cmd.shots = shots;
  cmd.quiet = quiet;
  if (shots && *shots < 1) {
    err << "usage error: --shots must be >= 1\n";
    return ParseExit{kExitUsage};
  }

  try {
    if (!config_path.empty()) {
      cmd.config_path = config_path;
      if (!std::filesystem::exists(config_path)) {
        err << "config not found: " << config_path << '\n';
        return ParseExit{kExitUsage};
      }
      nlohmann::json j;
      try {
        j = read_json(config_path);
      } catch (const nlohmann::json::exception& e) {
        err << "config is not valid JSON: " << e.what() << '\n';
        return ParseExit{kExitUsage};
      }
      if (!j.is_object()) throw DomainError("config: expected a JSON object");
      for (const auto& [key, value] : j.items()) apply_key(cmd, key, json_value_to_override(value));
    }
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw DomainError("--set expects key=value, got \"" + kv + "\"");
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      cmd.overrides.emplace_back(key, value);
      apply_key(cmd, key, value);
    }
    if (seed) cmd.experiment.seed = *seed;
    cmd.seed = cmd.experiment.seed;
    cmd.experiment.validate();
    validate_tool(cmd.tool);
  } catch (const std::exception& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return ParseExit{kExitUsage};
  }
  return cmd;
}

nlohmann::json resolved_config(const Command& cmd) {
  nlohmann::json j = config_to_json(cmd.experiment);
  j["subcommand"] = to_string(cmd.subcommand);
  j["data"] = cmd.tool.data;
  j["model"] = cmd.tool.model;
  j["state"] = cmd.tool.state;
  j["variant"] = cmd.tool.variant;
  j["ridge"] = cmd.tool.ridge;
  j["instances"] = cmd.tool.instances;
  j["t"] = cmd.tool.t;
  j["s"] = cmd.tool.s;
  if (cmd.shots) j["shots"] = *cmd.shots;
  return j;
}

int run(const Command& cmd, std::ostream& out, std::ostream& err) {
  configure_logging(cmd.quiet);
  try {
    std::filesystem::create_directories(cmd.out_dir);
    write_json(cmd.out_dir / "config.json", resolved_config(cmd));
    switch (cmd.subcommand) {
      case Subcommand::GenData: return cmd_gen_data(cmd, out);
      case Subcommand::Train: return cmd_train(cmd, out);
      case Subcommand::Eval: return cmd_eval(cmd, out);
      case Subcommand::ReproduceTable1: return cmd_reproduce(cmd, out);
      case Subcommand::CircuitVerify: return cmd_circuit_verify(cmd, out);
      case Subcommand::KernelEval: return cmd_kernel_eval(cmd, out);
      case Subcommand::EmitHeatmap: return cmd_emit_heatmap(cmd, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  auto parsed = parse_args(args, std::cout, std::cerr);
  if (const auto* exit = std::get_if<ParseExit>(&parsed)) return exit->code;
  return run(std::get<Command>(parsed), std::cout, std::cerr);
}

}  // namespace qovk::cli
