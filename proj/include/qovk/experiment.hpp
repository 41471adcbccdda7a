#pragma once

// Channel-estimation experiment: learn a random Pauli channel from noisy
// state pairs with each kernel variant and score the reconstructed Choi
// matrix against the truth.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qovk/channels.hpp"
#include "qovk/ovkrr.hpp"
#include "qovk/qkernels.hpp"

namespace qovk {

enum class KernelVariant { ScalarBaseline, SeparableOVK, EntangledUnitary, EntangledKrausPauli };

std::string to_string(KernelVariant v);
KernelVariant kernel_variant_from_string(const std::string& name);

struct ExperimentConfig {
  std::string channel_kind = "pauli";
  /// Side a = b of the channel's input and output matrices (2 or 4).
  int qubit_dim = 2;
  int n_train = 10;
  int n_channels = 10;
  double noise_lambda = 0.1;
  std::vector<double> ridge_grid{1e-4, 1e-3, 1e-2};
  std::vector<KernelVariant> kernel_variants{
      KernelVariant::ScalarBaseline, KernelVariant::SeparableOVK,
      KernelVariant::EntangledUnitary, KernelVariant::EntangledKrausPauli};
  /// Noiseless held-out states used to pick the ridge per variant.
  int n_probe = 20;
  std::uint64_t seed = 42;

  /// Throws DomainError on out-of-range values.
  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Keys absent from j keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Apply one "key=value" override.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Kernel for a variant on a x a inputs with vectorized a x a labels.
KernelChoice build_kernel(KernelVariant v, Eigen::Index a, Rng& rng);

/// Full-rank random inputs; labels vec(depolarize(channel(rho), noise_lambda)).
TrainingSet generate_dataset(const ExperimentConfig& cfg, const QuantumChannel& channel, Rng& rng);

struct VariantOutcome {
  KernelVariant variant;
  double ridge = 0.0;
  double probe_error = 0.0;
  double recovery_error = 0.0;
  ChannelCandidate learned;
  RegressionModel model;
};

struct ChannelOutcome {
  int index = 0;
  QuantumChannel channel;
  std::vector<VariantOutcome> variants;
};

/// One channel end to end; the rng drives channel, data, probes and U.
ChannelOutcome run_channel(const ExperimentConfig& cfg, int index, Rng& rng);

struct VariantSummary {
  std::vector<double> errors;
  std::vector<double> ridges;
  double mean = 0.0;
  /// Sample standard deviation; 0 with degenerate_std set when only one channel ran.
  double std = 0.0;
  bool degenerate_std = false;
};

struct TrialResult {
  std::map<KernelVariant, VariantSummary> summaries;
  std::vector<ChannelOutcome> channels;

  double mean_error(KernelVariant v) const { return summaries.at(v).mean; }
};

/// Independent per-channel rng streams derived from (seed, channel index),
/// so results do not depend on `threads`.
TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t seed, unsigned threads = 1);

/// Notes describing protocol choices, echoed into results.json.
std::vector<std::string> experiment_decisions();

nlohmann::json results_to_json(const TrialResult& r, const ExperimentConfig& cfg);
std::string results_to_csv(const TrialResult& r);
void write_results(const TrialResult& r, const ExperimentConfig& cfg,
                   const std::filesystem::path& dir);

struct HeatmapScale {
  double min = 0.0;
  double max = 0.0;
};

/// Writes heatmap_<name>_{real,abs}.{csv,pgm} for the truth and every learned
/// Choi matrix, all PGMs sharing one linear min/max scale. Returns the files.
std::vector<std::filesystem::path> emit_heatmaps(
    const ComplexMatrix& true_choi,
    const std::vector<std::pair<std::string, ComplexMatrix>>& learned,
    const std::filesystem::path& dir, HeatmapScale* scale_out = nullptr);

}  // namespace qovk
