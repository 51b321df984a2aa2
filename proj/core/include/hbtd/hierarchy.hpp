#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hbtd/config.hpp"
#include "hbtd/count_tensor.hpp"
#include "hbtd/rng.hpp"

namespace hbtd {

// P(table i) = n_i / (gamma + n), P(new) = gamma / (gamma + n) with n the
// number of customers already seated, so the first customer opens a new
// table with probability 1. The "new table" entry is last.
std::vector<double> crp_next_probs(std::span<const std::int64_t> counts,
                                   double gamma);

struct TreeNode {
  int parent = -1;
  int level = 1;  // root = 1
  std::int64_t customers = 0;
  std::vector<int> children;
  bool alive = true;
};

// One mode's nCRP tree of fixed depth. Node ids are stable and never reused
// after pruning.
class ModeTree {
 public:
  explicit ModeTree(int depth);

  int depth() const { return depth_; }
  int root() const { return 0; }
  const TreeNode& node(int id) const { return nodes_[id]; }
  bool alive(int id) const {
    return id >= 0 && id < static_cast<int>(nodes_.size()) && nodes_[id].alive;
  }
  std::vector<int> alive_node_ids() const;

  int alloc_child(int parent);

  // Root-to-depth path drawn level-by-level via crp_next_probs; allocates
  // nodes on new-table draws and seats the customer.
  std::vector<int> draw_path(double gamma, Rng& rng);

  void add_path(std::span<const int> path);
  // Decrements customers along the path and prunes emptied nodes.
  void remove_path(std::span<const int> path);

  // log CRP probability of seating a new customer along `path` given current
  // counts; path entries of -1 denote brand-new nodes.
  double path_log_prior(std::span<const int> path, double gamma) const;

  bool audit(std::string* why = nullptr) const;
  std::int64_t total_customers() const { return nodes_[0].customers; }

 private:
  std::vector<TreeNode> nodes_;
  int depth_;
};

// Leveled PAM DAG shared by the non-independent modes. Node (level l, k) of
// mode m has global per-mode index offset(m, l) + k.
class PamState {
 public:
  PamState(const ModelConfig& cfg);

  int levels() const { return L_; }
  const std::vector<int>& pam_modes() const { return pam_modes_; }
  int tau(int level, int mode1) const { return tau_[level - 1][mode1 - 1]; }
  int node_offset(int mode1, int level) const;
  int topics_per_mode(int mode1) const;

  // conditioning (level, mode) pairs for the choice at (level, mode)
  const std::vector<std::pair<int, int>>& cond_parents(int level, int mode1) const;

  // key into the transition table from a full path (choices[mode-1][level-1])
  std::vector<int> parent_key(int level, int mode1,
                              const std::vector<std::vector<int>>& choices) const;

  std::int64_t count(int level, int mode1, const std::vector<int>& key, int k) const;
  void add_count(int level, int mode1, const std::vector<int>& key, int k,
                 std::int64_t delta);
  const std::vector<std::int64_t>& counts_row(int level, int mode1,
                                              const std::vector<int>& key) const;

  bool has_transitions() const { return has_probs_; }
  const std::vector<double>& probs_row(int level, int mode1,
                                       const std::vector<int>& key) const;
  // P_i^(l,m) ~ Dir(gamma + n_i) for every row (Alg. 6 refresh); with
  // from_prior the counts are ignored.
  void draw_transitions(double gamma, Rng& rng, bool from_prior = false);
  // gamma-smoothed count means, used for predictive draws
  std::vector<double> mean_row(int level, int mode1, const std::vector<int>& key,
                               double gamma) const;

  // Walks levels 1..L, modes in topological order; uses probs if present,
  // else the collapsed (gamma + n) weights. Does not seat the customer.
  std::vector<std::vector<int>> draw_path(double gamma, Rng& rng) const;

  void add_path(const std::vector<std::vector<int>>& choices);
  void remove_path(const std::vector<std::vector<int>>& choices);

  double path_log_prior(const std::vector<std::vector<int>>& choices,
                        double gamma) const;

  // log probability of all seated paths with the transition rows integrated
  // out: a Dirichlet-multinomial term per parent-key row
  double collapsed_log_prior(double gamma) const;

  const std::vector<int>& topo_order() const { return topo_order_; }
  bool is_root_mode(int mode1) const;

  bool audit(std::int64_t expected_customers, std::string* why = nullptr) const;

 private:
  struct Table {
    std::map<std::vector<int>, std::vector<std::int64_t>> counts;
    std::map<std::vector<int>, std::vector<double>> probs;
  };
  int L_;
  int p_;
  std::vector<int> pam_modes_;
  std::vector<std::vector<int>> tau_;
  std::vector<int> topo_order_;                     // pam modes, 1-based
  std::vector<int> roots_, sinks_;
  // cond_[level-1][mode-1]
  std::vector<std::vector<std::vector<std::pair<int, int>>>> cond_;
  std::vector<std::vector<Table>> tables_;          // [level-1][mode-1]
  bool has_probs_ = false;

  void enumerate_keys();
};

// Per-sample topic paths plus the shared structure. Mixed models: modes in
// cfg.independent_modes get trees, the rest share the PAM DAG.
class HierarchyState {
 public:
  HierarchyState(const ModelConfig& cfg);

  HierarchyKind kind() const { return kind_; }
  int num_samples() const { return static_cast<int>(paths_.size()); }
  const ModelConfig& config() const { return cfg_; }

  // Draws every sample's path from the prior, sequentially (CRP counts are
  // order-coupled). For pam, transition distributions are drawn from Dir(gamma)
  // first when non_collapsed.
  void init_from_prior(int num_samples, Rng& rng, bool non_collapsed);

  bool mode_uses_tree(int mode1) const;
  ModeTree& tree(int mode1) { return trees_[mode1 - 1]; }
  const ModeTree& tree(int mode1) const { return trees_[mode1 - 1]; }
  PamState& pam() { return *pam_; }
  const PamState& pam() const { return *pam_; }
  bool has_pam() const { return pam_.has_value(); }

  // path of sample x in a tree mode: node ids, one per level
  const std::vector<int>& tree_path(int x, int mode1) const;
  void set_tree_path(int x, int mode1, std::vector<int> path);
  // pam choices of sample x: [pam-mode position][level] within-level index
  const std::vector<std::vector<int>>& pam_choices(int x) const;
  std::vector<std::vector<int>>& pam_choices_mut(int x);

  // visited topics of sample x in a mode, as per-mode global identifiers
  // (tree node ids / pam offset+k), one per level
  std::vector<int> visited(int x, int mode1) const;

  // log P(T_x | gamma) with x's own path excluded from all counts
  double path_log_prior(int x) const;

  // redraws x's path(s) from the prior given the other customers; caller has
  // already removed x from the counts
  void draw_path_trees(int x, int mode1, Rng& rng);
  void draw_path_pam(int x, Rng& rng);

  // prior/posterior-predictive path for a pseudo-sample, restricted to
  // existing nodes (new-table mass renormalized away); read-only
  std::vector<std::vector<int>> predictive_visited(Rng& rng) const;

  bool audit(std::string* why = nullptr) const;

  int pam_mode_pos(int mode1) const;  // position of mode in pam_modes, -1 if none

 private:
  ModelConfig cfg_;
  HierarchyKind kind_;
  std::vector<ModeTree> trees_;            // slot per mode; unused slots depth 0 skipped
  std::optional<PamState> pam_;
  // tree paths: [x][mode-1] node ids; pam choices: [x][pam pos][level]
  std::vector<std::vector<std::vector<int>>> paths_;
  std::vector<std::vector<std::vector<int>>> pam_paths_;
};

// Maps per-mode global node identifiers to dense topic indices for the
// decomposition sweep. Rebuilt after every hierarchy sweep.
struct TopicLayout {
  std::vector<std::vector<int>> nodes;        // per mode: dense idx -> node id
  std::vector<std::map<int, int>> to_dense;   // per mode: node id -> dense idx

  static TopicLayout from_hierarchy(const HierarchyState& h);
  static TopicLayout dense(const std::vector<std::int32_t>& k_dims);
  std::vector<std::int32_t> k_dims() const;
};

// Admissible topic tuples of sample x as flat indices under `layout`,
// sorted ascending. Level composition pairs same-level topics; cartesian
// takes all combinations of the per-mode visited lists.
std::vector<std::int64_t> topic_set_flat(const HierarchyState& h, int x,
                                         const TopicLayout& layout,
                                         Composition comp);

}  // namespace hbtd
