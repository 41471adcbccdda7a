#include "qovk/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace qovk {

namespace {

constexpr KernelVariant kAllVariants[] = {
    KernelVariant::ScalarBaseline, KernelVariant::SeparableOVK, KernelVariant::EntangledUnitary,
    KernelVariant::EntangledKrausPauli};

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw DomainError(key + ": expected a number, got \"" + value + "\"");
  return v;
}

long parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw DomainError(key + ": expected an integer, got \"" + value + "\"");
  return v;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string canonical_key(const std::string& key) {
  if (key == "noise_λ" || key == "noise") return "noise_lambda";
  return key;
}

}  // namespace

std::string to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::ScalarBaseline: return "scalar_baseline";
    case KernelVariant::SeparableOVK: return "separable_ovk";
    case KernelVariant::EntangledUnitary: return "entangled_unitary";
    case KernelVariant::EntangledKrausPauli: return "entangled_kraus_pauli";
  }
  return "unknown";
}

KernelVariant kernel_variant_from_string(const std::string& name) {
  for (KernelVariant v : kAllVariants)
    if (to_string(v) == name) return v;
  throw DomainError("unknown kernel variant \"" + name + "\"");
}

void ExperimentConfig::validate() const {
  if (channel_kind != "pauli") throw DomainError("channel_kind: only \"pauli\" is supported");
  if (qubit_dim != 2 && qubit_dim != 4) throw DomainError("qubit_dim: must be 2 or 4");
  if (n_train < 1) throw DomainError("n_train: must be positive");
  if (n_channels < 1) throw DomainError("n_channels: must be positive");
  if (n_probe < 1) throw DomainError("n_probe: must be positive");
  if (!(noise_lambda >= 0.0 && noise_lambda <= 1.0)) {
    throw DomainError("noise_lambda: must lie in [0, 1], got " + std::to_string(noise_lambda));
  }
  if (ridge_grid.empty()) throw DomainError("ridge_grid: must not be empty");
  for (double r : ridge_grid)
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("ridge_grid: values must be positive");
  if (kernel_variants.empty()) throw DomainError("kernel_variants: must not be empty");
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  std::vector<std::string> variants;
  for (KernelVariant v : cfg.kernel_variants) variants.push_back(to_string(v));
  return {{"channel_kind", cfg.channel_kind}, {"qubit_dim", cfg.qubit_dim},
          {"n_train", cfg.n_train},           {"n_channels", cfg.n_channels},
          {"noise_lambda", cfg.noise_lambda}, {"ridge_grid", cfg.ridge_grid},
          {"kernel_variants", variants},      {"n_probe", cfg.n_probe},
          {"seed", cfg.seed}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (!j.is_object()) throw DomainError("config: expected a JSON object");
  for (const auto& [raw_key, value] : j.items()) {
    const std::string key = canonical_key(raw_key);
    if (key == "channel_kind") cfg.channel_kind = value.get<std::string>();
    else if (key == "qubit_dim") cfg.qubit_dim = value.get<int>();
    else if (key == "n_train") cfg.n_train = value.get<int>();
    else if (key == "n_channels") cfg.n_channels = value.get<int>();
    else if (key == "noise_lambda") cfg.noise_lambda = value.get<double>();
    else if (key == "ridge_grid") cfg.ridge_grid = value.get<std::vector<double>>();
    else if (key == "n_probe") cfg.n_probe = value.get<int>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "kernel_variants") {
      cfg.kernel_variants.clear();
      for (const auto& v : value) cfg.kernel_variants.push_back(kernel_variant_from_string(v.get<std::string>()));
    } else {
      throw DomainError("config: unknown key \"" + raw_key + "\"");
    }
  }
  return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& raw_key, const std::string& value) {
  const std::string key = canonical_key(raw_key);
  if (key == "channel_kind") cfg.channel_kind = value;
  else if (key == "qubit_dim") cfg.qubit_dim = static_cast<int>(parse_int(key, value));
  else if (key == "n_train") cfg.n_train = static_cast<int>(parse_int(key, value));
  else if (key == "n_channels") cfg.n_channels = static_cast<int>(parse_int(key, value));
  else if (key == "noise_lambda") cfg.noise_lambda = parse_double(key, value);
  else if (key == "n_probe") cfg.n_probe = static_cast<int>(parse_int(key, value));
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "ridge_grid") {
    cfg.ridge_grid.clear();
    for (const auto& item : split_list(value)) cfg.ridge_grid.push_back(parse_double(key, item));
  } else if (key == "kernel_variants") {
    cfg.kernel_variants.clear();
    for (const auto& item : split_list(value)) cfg.kernel_variants.push_back(kernel_variant_from_string(item));
  } else {
    throw DomainError("unknown config key \"" + raw_key + "\"");
  }
}

KernelChoice build_kernel(KernelVariant v, Eigen::Index a, Rng& rng) {
  const Eigen::Index p = a * a;
  const DensityMatrix rho_y = DensityMatrix::maximally_mixed(p);
  switch (v) {
    case KernelVariant::ScalarBaseline:
      return ScalarKernel{};
    case KernelVariant::SeparableOVK:
      return OVKernelSpec::unitary(FeatureRule::Product, ComplexMatrix::Identity(p * a, p * a), rho_y);
    case KernelVariant::EntangledUnitary:
      return OVKernelSpec::unitary(FeatureRule::Product, sample_entangled_unitary(p, a, rng), rho_y);
    case KernelVariant::EntangledKrausPauli:
      return OVKernelSpec::kraus(FeatureRule::VectorizedOuter, pauli_superoperator_kraus_set(a));
  }
  throw DomainError("build_kernel: unknown variant");
}

TrainingSet generate_dataset(const ExperimentConfig& cfg, const QuantumChannel& channel, Rng& rng) {
  cfg.validate();
  const Eigen::Index a = cfg.qubit_dim;
  if (channel.in_dim() != a) throw ShapeError("generate_dataset: channel input dimension differs from qubit_dim");
  TrainingSet ts;
  for (int i = 0; i < cfg.n_train; ++i) {
    DensityMatrix rho = random_density(a, a, rng);
    const DensityMatrix out = depolarize(apply(channel, rho), cfg.noise_lambda);
    ts.labels.push_back(vectorize(out.matrix()));
    ts.inputs.push_back(std::move(rho));
  }
  return ts;
}

ChannelOutcome run_channel(const ExperimentConfig& cfg, int index, Rng& rng) {
  cfg.validate();
  const Eigen::Index a = cfg.qubit_dim;
  QuantumChannel channel = random_pauli_channel(a, rng);
  const TrainingSet ts = generate_dataset(cfg, channel, rng);

  std::vector<DensityMatrix> probes;
  std::vector<ComplexVector> probe_truth;
  for (int k = 0; k < cfg.n_probe; ++k) {
    probes.push_back(random_density(a, a, rng));
    probe_truth.push_back(vectorize(apply(channel, probes.back()).matrix()));
  }

  const ChannelCandidate truth = as_candidate(channel);
  ChannelOutcome outcome{index, channel, {}};
  for (KernelVariant v : cfg.kernel_variants) {
    const KernelChoice kernel = build_kernel(v, a, rng);
    std::optional<VariantOutcome> best;
    for (double ridge : cfg.ridge_grid) {
      RegressionModel model = fit(ts, kernel, ridge);
      double err = 0.0;
      for (std::size_t k = 0; k < probes.size(); ++k)
        err += (predict(model, probes[k]) - probe_truth[k]).squaredNorm();
      if (!best || err < best->probe_error) {
        best = VariantOutcome{v, ridge, err, 0.0, ChannelCandidate{}, std::move(model)};
      }
    }
    const RegressionModel& model = best->model;
    best->learned = reconstruct_channel(
        [&model, a](const DensityMatrix& rho) { return unvectorize(predict(model, rho), a); }, a);
    best->recovery_error = recovery_error(truth, best->learned);
    outcome.variants.push_back(std::move(*best));
  }
  return outcome;
}

TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t seed, unsigned threads) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_channels);
  std::vector<std::optional<ChannelOutcome>> slots(n);

  auto work = [&cfg, seed](int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(index)};
    Rng rng(seq);
    return run_channel(cfg, index, rng);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) slots[i] = work(static_cast<int>(i));
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next++; i < n; i = next++) slots[i] = work(static_cast<int>(i));
      }));
    }
    for (auto& f : pool) f.get();
  }

  TrialResult result;
  for (auto& s : slots) result.channels.push_back(std::move(*s));
  for (KernelVariant v : cfg.kernel_variants) {
    VariantSummary sum;
    for (const auto& ch : result.channels)
      for (const auto& vo : ch.variants)
        if (vo.variant == v) {
          sum.errors.push_back(vo.recovery_error);
          sum.ridges.push_back(vo.ridge);
        }
    const auto k = static_cast<double>(sum.errors.size());
    sum.mean = std::accumulate(sum.errors.begin(), sum.errors.end(), 0.0) / k;
    if (sum.errors.size() < 2) {
      sum.std = 0.0;
      sum.degenerate_std = true;
    } else {
      double ss = 0.0;
      for (double e : sum.errors) ss += (e - sum.mean) * (e - sum.mean);
      sum.std = std::sqrt(ss / (k - 1.0));
    }
    result.summaries.emplace(v, std::move(sum));
  }
  return result;
}

std::vector<std::string> experiment_decisions() {
  return {
      "Choi matrices use the unnormalized input-factor-first convention sum_ij |i><j| (x) Phi(|i><j|).",
      "Learned channels come from linear tomography of the trained predictor on the per-qubit probes "
      "|0>, |1>, |+>, |+i>; the Choi estimate is not projected onto CPTP maps.",
      "The ridge is chosen per variant and channel from ridge_grid by squared prediction error on "
      "n_probe noiseless held-out states.",
      "Training and probe inputs are full-rank Hilbert-Schmidt random density matrices.",
      "Labels are column-major vectorizations of depolarized channel outputs; regression is over the complex field.",
      "Operator-valued variants use rho_Y = I/p; separable_ovk uses U = I, entangled_unitary a Haar U "
      "resampled if it is a product operator.",
      "entangled_kraus_pauli uses sigma = vec(rho_x) vec(rho_z)^dagger with Kraus operators "
      "conj(P) (x) P / sqrt(r) over the Paulis P.",
      "Summaries report the mean and the sample standard deviation over channels.",
  };
}

nlohmann::json results_to_json(const TrialResult& r, const ExperimentConfig& cfg) {
  nlohmann::json variants = nlohmann::json::object();
  for (const auto& [v, s] : r.summaries) {
    variants[to_string(v)] = {{"errors", s.errors},
                              {"ridges", s.ridges},
                              {"mean", s.mean},
                              {"std", s.std},
                              {"std_degenerate", s.degenerate_std}};
  }
  return {{"variants", variants}, {"config", config_to_json(cfg)}, {"decisions", experiment_decisions()}};
}

std::string results_to_csv(const TrialResult& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "channel,variant,recovery_error,ridge,probe_error\n";
  for (const auto& ch : r.channels)
    for (const auto& vo : ch.variants)
      os << ch.index << ',' << to_string(vo.variant) << ',' << vo.recovery_error << ',' << vo.ridge
         << ',' << vo.probe_error << '\n';
  return os.str();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string grid_csv(const Eigen::MatrixXd& g) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) os << (j ? "," : "") << g(i, j);
    os << '\n';
  }
  return os.str();
}

std::string grid_pgm(const Eigen::MatrixXd& g, HeatmapScale scale) {
  std::ostringstream os;
  os << "P2\n" << g.cols() << ' ' << g.rows() << "\n255\n";
  const double span = scale.max - scale.min;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double t = span > 0.0 ? (g(i, j) - scale.min) / span : 0.0;
      const long px = std::lround(std::clamp(t, 0.0, 1.0) * 255.0);
      os << (j ? " " : "") << px;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

std::vector<std::filesystem::path> emit_heatmaps(
    const ComplexMatrix& true_choi, const std::vector<std::pair<std::string, ComplexMatrix>>& learned,
    const std::filesystem::path& dir, HeatmapScale* scale_out) {
  std::vector<std::pair<std::string, Eigen::MatrixXd>> grids;
  auto add = [&grids](const std::string& name, const ComplexMatrix& m) {
    grids.emplace_back(name + "_real", m.real());
    grids.emplace_back(name + "_abs", m.cwiseAbs());
  };
  add("true", true_choi);
  for (const auto& [name, m] : learned) add(name, m);

  HeatmapScale scale{grids.front().second.minCoeff(), grids.front().second.maxCoeff()};
  for (const auto& [name, g] : grids) {
    scale.min = std::min(scale.min, g.minCoeff());
    scale.max = std::max(scale.max, g.maxCoeff());
  }
  if (scale_out) *scale_out = scale;

  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  for (const auto& [name, g] : grids) {
    const auto csv = dir / ("heatmap_" + name + ".csv");
    const auto pgm = dir / ("heatmap_" + name + ".pgm");
    write_text(csv, grid_csv(g));
    write_text(pgm, grid_pgm(g, scale));
    files.push_back(csv);
    files.push_back(pgm);
  }
  return files;
}

void write_results(const TrialResult& r, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "results.json", results_to_json(r, cfg).dump(2) + "\n");
  write_text(dir / "results.csv", results_to_csv(r));
}

}  // namespace qovk
