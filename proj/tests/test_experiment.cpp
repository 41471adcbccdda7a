#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qovk/error.hpp"
#include "qovk/experiment.hpp"

using namespace qovk;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("qovk_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n_channels = 3;
  return cfg;
}

}  // namespace

TEST(Config, DefaultsAndValidation) {
  ExperimentConfig cfg;
  EXPECT_EQ(cfg.n_train, 10);
  EXPECT_EQ(cfg.n_channels, 10);
  EXPECT_DOUBLE_EQ(cfg.noise_lambda, 0.1);
  EXPECT_EQ(cfg.ridge_grid, (std::vector<double>{1e-4, 1e-3, 1e-2}));
  EXPECT_EQ(cfg.kernel_variants.size(), 4u);
  EXPECT_NO_THROW(cfg.validate());
  cfg.noise_lambda = 2.0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Config, OverridesAndJson) {
  ExperimentConfig cfg;
  apply_override(cfg, "noise_λ", "0.25");
  apply_override(cfg, "ridge_grid", "0.1,0.2");
  apply_override(cfg, "kernel_variants", "scalar_baseline,entangled_kraus_pauli");
  apply_override(cfg, "n_train", "12");
  EXPECT_DOUBLE_EQ(cfg.noise_lambda, 0.25);
  EXPECT_EQ(cfg.ridge_grid, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(cfg.kernel_variants.size(), 2u);
  EXPECT_EQ(cfg.n_train, 12);
  EXPECT_THROW(apply_override(cfg, "bogus", "1"), DomainError);
  EXPECT_THROW(apply_override(cfg, "n_train", "ten"), DomainError);
  const ExperimentConfig back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(config_to_json(back), config_to_json(cfg));
  EXPECT_THROW(config_from_json({{"nonsense", 1}}), DomainError);
}

TEST(Variants, NamesRoundTrip) {
  for (auto v : {KernelVariant::ScalarBaseline, KernelVariant::SeparableOVK, KernelVariant::EntangledUnitary,
                 KernelVariant::EntangledKrausPauli})
    EXPECT_EQ(kernel_variant_from_string(to_string(v)), v);
  EXPECT_THROW(kernel_variant_from_string("nope"), DomainError);
}

TEST(BuildKernel, ShapesAndEntanglement) {
  Rng rng(110);
  EXPECT_EQ(block_dim(build_kernel(KernelVariant::ScalarBaseline, 2, rng)), 1);
  for (auto v : {KernelVariant::SeparableOVK, KernelVariant::EntangledUnitary, KernelVariant::EntangledKrausPauli})
    EXPECT_EQ(block_dim(build_kernel(v, 2, rng)), 4);
  const auto ent = std::get<OVKernelSpec>(build_kernel(KernelVariant::EntangledUnitary, 2, rng));
  EXPECT_FALSE(is_product_operator(std::get<UnitaryDilation>(ent.coupling()).unitary, 4, 2));
}

TEST(Dataset, NoiseEndpointsAndDeterminism) {
  ExperimentConfig cfg;
  Rng rng(111);
  const auto ch = random_pauli_channel(2, rng);
  cfg.noise_lambda = 0.0;
  Rng r0(5);
  const auto clean = generate_dataset(cfg, ch, r0);
  for (std::size_t i = 0; i < clean.inputs.size(); ++i)
    EXPECT_LT((clean.labels[i] - vectorize(apply(ch, clean.inputs[i]).matrix())).norm(), 1e-14);
  cfg.noise_lambda = 1.0;
  Rng r1(5);
  for (const auto& y : generate_dataset(cfg, ch, r1).labels)
    EXPECT_LT((y - vectorize(0.5 * ComplexMatrix::Identity(2, 2))).norm(), 1e-15);
  Rng a(6), b(6);
  EXPECT_EQ(generate_dataset(cfg, ch, a).labels, generate_dataset(cfg, ch, b).labels);
  EXPECT_EQ(clean.inputs.size(), 10u);
  for (const auto& x : clean.inputs) EXPECT_LT(x.purity(), 1.0 - 1e-6);
}

TEST(Trial, DeterministicAcrossThreadCounts) {
  const auto cfg = small_config();
  const auto a = run_trial(cfg, 7, 1), b = run_trial(cfg, 7, 3);
  EXPECT_EQ(results_to_json(a, cfg).dump(), results_to_json(b, cfg).dump());
  EXPECT_EQ(results_to_csv(a), results_to_csv(b));
}

TEST(Trial, SummariesAreConsistent) {
  const auto cfg = small_config();
  const auto r = run_trial(cfg, 8, 1);
  ASSERT_EQ(r.summaries.size(), 4u);
  for (const auto& [v, s] : r.summaries) {
    ASSERT_EQ(s.errors.size(), 3u);
    double mean = 0.0;
    for (double e : s.errors) {
      EXPECT_GE(e, 0.0);
      mean += e / 3.0;
    }
    EXPECT_NEAR(s.mean, mean, 1e-15);
    EXPECT_FALSE(s.degenerate_std);
    for (double ridge : s.ridges) EXPECT_NE(std::find(cfg.ridge_grid.begin(), cfg.ridge_grid.end(), ridge), cfg.ridge_grid.end());
  }
}

TEST(Trial, SingleChannelHasDegenerateStd) {
  ExperimentConfig cfg;
  cfg.n_channels = 1;
  const auto r = run_trial(cfg, 9, 1);
  for (const auto& [v, s] : r.summaries) {
    EXPECT_EQ(s.std, 0.0);
    EXPECT_TRUE(s.degenerate_std);
  }
}

TEST(Trial, SeparableMatchesScalarUpToRidgeRescaling) {
  // With rho_Y = I/p the separable kernel is the scalar kernel divided by p;
  // the ridge grids differ by that factor, so errors are close but not identical.
  const auto r = run_trial(small_config(), 10, 1);
  EXPECT_NEAR(r.mean_error(KernelVariant::SeparableOVK), r.mean_error(KernelVariant::ScalarBaseline), 0.05);
}

TEST(Trial, NoiselessEntangledRecovery) {
  ExperimentConfig cfg;
  cfg.noise_lambda = 0.0;
  cfg.n_train = 16;
  cfg.kernel_variants = {KernelVariant::EntangledKrausPauli};
  const auto r = run_trial(cfg, 11, 1);
  for (double e : r.summaries.at(KernelVariant::EntangledKrausPauli).errors) EXPECT_LT(e, 0.05);
}

TEST(Trial, ErrorGrowsWithNoise) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ExperimentConfig lo = small_config(), hi = small_config();
    lo.noise_lambda = 0.05;
    hi.noise_lambda = 0.3;
    const auto a = run_trial(lo, seed, 1), b = run_trial(hi, seed, 1);
    for (auto v : lo.kernel_variants) EXPECT_GE(b.mean_error(v), a.mean_error(v));
  }
}

TEST(Output, ResultsFilesAndSchema) {
  const auto cfg = small_config();
  const auto r = run_trial(cfg, 12, 1);
  const auto dir = fresh_dir("results");
  write_results(r, cfg, dir);
  const auto j = nlohmann::json::parse(slurp(dir / "results.json"));
  for (const char* key : {"variants", "config", "decisions"}) EXPECT_TRUE(j.contains(key));
  EXPECT_EQ(j["variants"]["entangled_kraus_pauli"]["errors"].size(), 3u);
  const std::string csv = slurp(dir / "results.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3 * 4);
}

TEST(Heatmaps, SharedScaleAndHeaders) {
  Rng rng(113);
  const auto ch = random_pauli_channel(2, rng);
  const ComplexMatrix truth = to_choi(ch);
  const auto dir = fresh_dir("heatmaps");
  HeatmapScale scale;
  const auto files = emit_heatmaps(truth, {{"same", truth}, {"scaled", 2.0 * truth}}, dir, &scale);
  EXPECT_FALSE(files.empty());
  EXPECT_EQ(slurp(dir / "heatmap_true_real.csv"), slurp(dir / "heatmap_same_real.csv"));
  int max_pixel_files = 0;
  for (const auto& f : files) {
    if (f.extension() != ".pgm") continue;
    std::istringstream in(slurp(f));
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    EXPECT_EQ(magic, "P2");
    EXPECT_EQ(w, 4);
    EXPECT_EQ(h, 4);
    EXPECT_EQ(maxval, 255);
    int px = 0, biggest = 0;
    while (in >> px) biggest = std::max(biggest, px);
    if (biggest == 255) ++max_pixel_files;
  }
  EXPECT_GE(max_pixel_files, 1);
  EXPECT_LE(scale.min, scale.max);
}
