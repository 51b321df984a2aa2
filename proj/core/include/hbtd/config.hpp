#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbtd {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class HierarchyKind { none, trees, pam };
enum class Composition { cartesian, level };
enum class SamplerVariant { collapsed, noncollapsed };
enum class PhiSupportMode { support, restrict_full };

struct SamplerConfig {
  SamplerVariant variant = SamplerVariant::collapsed;
  int burn_in = 500;
  int total_sweeps = 2000;
  int thin = 10;
  int chains = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Full model description: tensor shape, topic structure, hierarchy choice and
// hyperparameters. Parsed from the key = value config format (see
// parse_config); unknown keys are hard errors.
struct ModelConfig {
  int p = 2;
  std::vector<std::int32_t> dims;      // d_0 .. d_p
  std::vector<std::int32_t> k_dims;    // K_1 .. K_p (non-hierarchical)

  HierarchyKind hierarchy = HierarchyKind::none;
  std::vector<int> levels;             // per mode for trees; single value for pam
  double gamma = 1.0;                  // CRP concentration / PAM Dirichlet prior
  std::vector<std::vector<int>> tau;   // pam: [level][mode] topic counts
  int dominant_mode = 1;               // 1-based feature mode
  Composition composition = Composition::cartesian;
  // pam mode-dependency edges, 1-based (parent, child); default chain
  // dominant -> others
  std::vector<std::pair<int, int>> mode_deps;
  std::vector<int> independent_modes;  // mixed models: these modes get trees

  double alpha = 1.0;                  // symmetric; alpha_full overrides
  std::vector<double> alpha_full;      // optional length-K vector
  std::vector<double> beta;            // per-mode symmetric value
  PhiSupportMode phi_support = PhiSupportMode::support;

  std::vector<std::int64_t> lambda;    // generate: per-sample totals (or scalar broadcast)

  SamplerConfig sampler;

  // modes that belong to the pam component (1-based), in declaration order
  std::vector<int> pam_modes() const;
  bool mode_is_independent(int mode1based) const;
  void validate() const;
};

ModelConfig parse_config(const std::string& path);

}  // namespace hbtd
