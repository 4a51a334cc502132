#ifndef CAKE_PIPELINE_HPP
#define CAKE_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cake/flow.hpp"
#include "cake/masks.hpp"
#include "cake/metrics.hpp"
#include "cake/scene.hpp"
#include "cake/solvers.hpp"

namespace cake {

// One config file drives every stage. Line-based key=value with [section]
// headers; '#' starts a comment; 'object=' lines accumulate.
struct ExperimentConfig {
  SamplingGeometry geometry;
  SceneSpec scene;

  std::vector<MaskFamily> families;  // chains to generate/acquire
  std::uint64_t mask_seed = 0;
  double alpha = 0.383, beta = 0.924;

  Downsampler downsampler = Downsampler::Subsample;
  std::uint64_t demod_seed = 0;
  NoiseModel noise;

  TvL1Params tvl1;
  FlowConstrainedParams flow_solver;
  FlowParams flow_estimation;

  RectRegion roi;
  int discount_blocks = 1;

  // ripcheck stage
  int rip_trials = 1000;
  double rip_delta_d = 0.2;
  double rip_delta_o = 0.6;
  int rip_s = 2;
  SamplingGeometry rip_geometry;
  std::uint64_t rip_seed = 1;

  std::string out_dir = "out";

  // seed override (--seed): derives every stage seed from one base value
  std::optional<std::uint64_t> seed_override;

  std::uint64_t scene_seed() const;
  std::uint64_t family_seed(MaskFamily f) const;
  std::uint64_t noise_seed() const;
  bool has_family(MaskFamily f) const;
};

ExperimentConfig load_config(const std::string& path);  // throws ConfigError
ExperimentConfig default_config();  // the default synthetic experiment

// Stage entry points. Each reads its inputs from cfg.out_dir, writes its
// artifacts there, updates manifest.json, and returns a short human-readable
// status line. Missing upstream files raise StageDependencyError.
std::string cmd_synth(const ExperimentConfig& cfg, bool dump_pgm = false);
std::string cmd_masks(const ExperimentConfig& cfg);
std::string cmd_acquire(const ExperimentConfig& cfg);
std::string cmd_coarse(const ExperimentConfig& cfg);
std::string cmd_flow(const ExperimentConfig& cfg);
std::string cmd_recon(const ExperimentConfig& cfg, const std::string& method,
                      bool dump_pgm = false);
std::string cmd_metrics(const ExperimentConfig& cfg);
std::string cmd_ripcheck(const ExperimentConfig& cfg);

// Artifact names inside the output directory.
std::string family_tag(MaskFamily f);
std::string scene_path(const ExperimentConfig&);
std::string masks_path(const ExperimentConfig&, MaskFamily f);
std::string measurement_path(const ExperimentConfig&, MaskFamily f);
std::string coarse_path(const ExperimentConfig&);
std::string coarse_up_path(const ExperimentConfig&);
std::string flow_path(const ExperimentConfig&);
std::string recon_path(const ExperimentConfig&, const std::string& label);
std::string metrics_path(const ExperimentConfig&);

std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace cake

#endif
