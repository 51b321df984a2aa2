#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hbtd/config.hpp"
#include "hbtd/count_tensor.hpp"
#include "hbtd/hierarchy.hpp"
#include "hbtd/model.hpp"
#include "hbtd/rng.hpp"

namespace hbtd {

struct SweepDiagnostics {
  int chain = 0;
  int sweep = 0;
  double log_score = 0.0;        // variant-dependent model log score
  std::int64_t active_topics = 0;  // distinct topic tuples in use
  std::int64_t hierarchy_nodes = 0;  // live nodes across modes (0 for flat)
};

// Materialized parameters under a dense topic layout; phi/psi are posterior
// means for the collapsed sampler and the instantiated values otherwise.
struct PosteriorDraw {
  int chain = 0;
  int sweep = 0;
  TopicLayout layout;
  std::vector<std::int32_t> k_dims;
  std::vector<std::vector<double>> phi;               // [x][flat]
  std::vector<std::vector<std::vector<double>>> psi;  // [j][k][v]
  std::vector<std::vector<std::int64_t>> support;     // [x] flat ids; empty = full
  std::vector<std::vector<std::int64_t>> z;           // [x][i] flat
};

// One MCMC chain. Topic components are tracked internally by hierarchy level,
// so a sample's core distribution is untouched when its paths move; for flat
// models "level" means the topic index itself.
class GibbsChain {
 public:
  GibbsChain(const ModelConfig& cfg, const CountTensor& data);

  void init(Rng& rng);
  void sweep(Rng& rng);

  const ModelConfig& config() const { return cfg_; }
  const TopicIndexMap& level_map() const { return lmap_; }
  const HierarchyState* hierarchy() const {
    return h_ ? &*h_ : nullptr;
  }
  // per-item assignments as flat level indices
  const std::vector<std::vector<std::int64_t>>& z() const { return zlev_; }
  // replaces every assignment and rebuilds the stats (test hook)
  void force_z(const std::vector<std::vector<std::int64_t>>& zlev);

  // normalized full conditional of item (x, i) over the admissible flat level
  // indices, with the item held out; same weights the sweep uses
  std::vector<double> conditional_z(int x, std::size_t i) const;
  const std::vector<std::int64_t>& admissible() const { return support_; }

  double log_score() const;
  std::int64_t active_topics() const;
  PosteriorDraw snapshot(int chain, int sweep) const;

  bool audit(std::string* why = nullptr) const;

  // global per-mode node identifier carrying the level-l component of sample x
  int node_of(int x, int mode0, int level0) const;

 private:
  ModelConfig cfg_;
  bool collapsed_;
  std::vector<std::vector<IndexTuple>> obs_;  // [x][i]
  TopicIndexMap lmap_;                        // levels per mode (or K_j, flat)
  std::vector<std::int64_t> support_;         // admissible flat level indices
  std::vector<IndexTuple> support_tuples_;

  std::optional<HierarchyState> h_;
  std::vector<std::vector<std::int64_t>> zlev_;   // [x][i] flat level index
  std::vector<std::vector<std::int64_t>> nstat_;  // [x][flat level]
  // per mode: node id -> per-value counts, and row totals
  std::vector<std::map<int, std::vector<std::int64_t>>> mstat_;
  std::vector<std::map<int, std::int64_t>> mrow_;

  // explicit parameters (non-collapsed only)
  std::vector<std::vector<double>> phi_;               // [x][flat level]
  std::vector<std::map<int, std::vector<double>>> psi_;  // [mode][node][v]

  void add_item(int x, std::size_t i, std::int64_t lev, int sign);
  void rebuild_stats();
  void sweep_z(Rng& rng);
  void resample_params(Rng& rng);
  void resample_paths_trees(int x, int mode1, Rng& rng);
  void resample_paths_pam(int x, Rng& rng);
  double row_dm_log_ratio(int mode0, int node, bool is_new,
                          const std::vector<std::int64_t>& add) const;
  std::vector<std::int64_t> mode_level_counts(int x, int mode0, int level0) const;
};

struct FitResult {
  std::vector<SweepDiagnostics> diagnostics;
  std::vector<PosteriorDraw> draws;
  std::vector<std::shared_ptr<GibbsChain>> chains;  // final states
};

// Runs cfg.sampler.chains chains (in parallel when > 1) with substreamed RNG;
// output ordering depends only on the configuration.
FitResult fit(const ModelConfig& cfg, const CountTensor& data);

}  // namespace hbtd
