#include "hbtd/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hbtd {

std::vector<double> crp_next_probs(std::span<const std::int64_t> counts,
                                   double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("crp_next_probs: gamma <= 0");
  std::int64_t n = 0;
  for (auto c : counts) {
    if (c < 0) throw std::invalid_argument("crp_next_probs: negative count");
    n += c;
  }
  std::vector<double> out(counts.size() + 1);
  const double den = gamma + static_cast<double>(n);
  for (std::size_t i = 0; i < counts.size(); ++i)
    out[i] = static_cast<double>(counts[i]) / den;
  out.back() = gamma / den;
  return out;
}

// ---------------------------------------------------------------- ModeTree

ModeTree::ModeTree(int depth) : depth_(depth) {
  if (depth < 1) throw std::invalid_argument("tree depth must be >= 1");
  nodes_.push_back(TreeNode{});  // root, level 1
}

std::vector<int> ModeTree::alive_node_ids() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
    if (nodes_[i].alive) out.push_back(i);
  return out;
}

int ModeTree::alloc_child(int parent) {
  TreeNode nd;
  nd.parent = parent;
  nd.level = nodes_[parent].level + 1;
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(nd);
  nodes_[parent].children.push_back(id);
  return id;
}

std::vector<int> ModeTree::draw_path(double gamma, Rng& rng) {
  std::vector<int> path{root()};
  nodes_[root()].customers += 1;
  int cur = root();
  for (int level = 2; level <= depth_; ++level) {
    const auto& kids = nodes_[cur].children;
    std::vector<std::int64_t> counts(kids.size());
    for (std::size_t i = 0; i < kids.size(); ++i)
      counts[i] = nodes_[kids[i]].customers;
    const auto probs = crp_next_probs(counts, gamma);
    const std::size_t pick = rng.categorical(probs);
    int next;
    if (pick == kids.size()) {
      next = alloc_child(cur);
    } else {
      next = kids[pick];
    }
    nodes_[next].customers += 1;
    path.push_back(next);
    cur = next;
  }
  return path;
}

void ModeTree::add_path(std::span<const int> path) {
  for (int id : path) nodes_[id].customers += 1;
}

void ModeTree::remove_path(std::span<const int> path) {
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    TreeNode& nd = nodes_[*it];
    if (nd.customers <= 0) throw std::logic_error("tree count underflow");
    nd.customers -= 1;
    if (nd.customers == 0 && *it != root()) {
      nd.alive = false;
      auto& sib = nodes_[nd.parent].children;
      sib.erase(std::find(sib.begin(), sib.end(), *it));
    }
  }
}

double ModeTree::path_log_prior(std::span<const int> path, double gamma) const {
  // counts exclude the entering customer; -1 entries are new nodes
  double lp = 0.0;
  int cur = root();
  for (std::size_t d = 1; d < path.size(); ++d) {
    const auto& kids = nodes_[cur].children;
    std::int64_t n = 0;
    for (int k : kids) n += nodes_[k].customers;
    const double den = gamma + static_cast<double>(n);
    const int id = path[d];
    if (id < 0 || !alive(id)) {
      lp += std::log(gamma / den);
      cur = id < 0 ? cur : id;  // new nodes have no children to descend into
      if (id < 0) {
        // remaining levels are all new: each is gamma/gamma = 1
        for (std::size_t d2 = d + 1; d2 < path.size(); ++d2)
          if (path[d2] >= 0 && alive(path[d2]))
            throw std::logic_error("alive node below a new node");
        return lp;
      }
    } else {
      lp += std::log(static_cast<double>(nodes_[id].customers) / den);
      cur = id;
    }
  }
  return lp;
}

bool ModeTree::audit(std::string* why) const {
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    const TreeNode& nd = nodes_[i];
    if (!nd.alive) continue;
    if (nd.customers < 0) {
      if (why) *why = "negative customers";
      return false;
    }
    if (nd.level < depth_) {
      std::int64_t s = 0;
      for (int k : nd.children) {
        if (!nodes_[k].alive) {
          if (why) *why = "dead child referenced";
          return false;
        }
        s += nodes_[k].customers;
      }
      if (s != nd.customers) {
        if (why) *why = "children customers do not sum to parent";
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------- PamState

PamState::PamState(const ModelConfig& cfg)
    : L_(cfg.levels.at(0)), p_(cfg.p), pam_modes_(cfg.pam_modes()), tau_(cfg.tau) {
  // topological order (Kahn, smallest mode first for determinism)
  std::vector<int> indeg(p_ + 1, 0);
  std::vector<std::vector<int>> adj(p_ + 1), radj(p_ + 1);
  for (auto [a, b] : cfg.mode_deps) {
    adj[a].push_back(b);
    radj[b].push_back(a);
    indeg[b]++;
  }
  std::vector<int> avail;
  for (int m : pam_modes_)
    if (indeg[m] == 0) avail.push_back(m);
  std::vector<bool> done(p_ + 1, false);
  while (!avail.empty()) {
    std::sort(avail.begin(), avail.end());
    const int m = avail.front();
    avail.erase(avail.begin());
    topo_order_.push_back(m);
    done[m] = true;
    for (int v : adj[m])
      if (--indeg[v] == 0) avail.push_back(v);
  }
  for (int m : pam_modes_) {
    if (!done[m]) throw ConfigError("mode dependency graph is cyclic");
    if (radj[m].empty()) roots_.push_back(m);
    if (adj[m].empty()) sinks_.push_back(m);
  }

  cond_.assign(L_, std::vector<std::vector<std::pair<int, int>>>(p_));
  for (int l = 1; l <= L_; ++l) {
    for (int m : pam_modes_) {
      auto& c = cond_[l - 1][m - 1];
      if (!radj[m].empty()) {
        for (int pm : radj[m]) c.emplace_back(l, pm);
      } else if (l > 1) {
        for (int s : sinks_) c.emplace_back(l - 1, s);
      }
      std::sort(c.begin(), c.end());
    }
  }
  tables_.assign(L_, std::vector<Table>(p_));
  enumerate_keys();
}

void PamState::enumerate_keys() {
  for (int l = 1; l <= L_; ++l) {
    for (int m : pam_modes_) {
      const auto& c = cond_[l - 1][m - 1];
      std::vector<std::vector<int>> keys{{}};
      for (auto [plev, pmode] : c) {
        std::vector<std::vector<int>> next;
        for (const auto& k : keys)
          for (int v = 0; v < tau(plev, pmode); ++v) {
            auto k2 = k;
            k2.push_back(v);
            next.push_back(std::move(k2));
          }
        keys = std::move(next);
      }
      auto& tbl = tables_[l - 1][m - 1];
      for (auto& k : keys)
        tbl.counts[k] = std::vector<std::int64_t>(tau(l, m), 0);
    }
  }
}

int PamState::node_offset(int mode1, int level) const {
  int off = 0;
  for (int l = 1; l < level; ++l) off += tau(l, mode1);
  return off;
}

int PamState::topics_per_mode(int mode1) const {
  return node_offset(mode1, L_ + 1);
}

const std::vector<std::pair<int, int>>& PamState::cond_parents(int level,
                                                               int mode1) const {
  return cond_[level - 1][mode1 - 1];
}

std::vector<int> PamState::parent_key(
    int level, int mode1, const std::vector<std::vector<int>>& choices) const {
  std::vector<int> key;
  for (auto [plev, pmode] : cond_[level - 1][mode1 - 1]) {
    int pos = 0;
    while (pam_modes_[pos] != pmode) ++pos;
    key.push_back(choices[pos][plev - 1]);
  }
  return key;
}

std::int64_t PamState::count(int level, int mode1, const std::vector<int>& key,
                             int k) const {
  return tables_[level - 1][mode1 - 1].counts.at(key)[k];
}

void PamState::add_count(int level, int mode1, const std::vector<int>& key,
                         int k, std::int64_t delta) {
  auto& v = tables_[level - 1][mode1 - 1].counts.at(key)[k];
  v += delta;
  if (v < 0) throw std::logic_error("pam count underflow");
}

const std::vector<std::int64_t>& PamState::counts_row(
    int level, int mode1, const std::vector<int>& key) const {
  return tables_[level - 1][mode1 - 1].counts.at(key);
}

const std::vector<double>& PamState::probs_row(int level, int mode1,
                                               const std::vector<int>& key) const {
  return tables_[level - 1][mode1 - 1].probs.at(key);
}

void PamState::draw_transitions(double gamma, Rng& rng, bool from_prior) {
  for (int l = 1; l <= L_; ++l) {
    for (int m : pam_modes_) {
      auto& tbl = tables_[l - 1][m - 1];
      for (auto& [key, counts] : tbl.counts) {
        std::vector<double> a(counts.size(), gamma);
        if (!from_prior)
          for (std::size_t i = 0; i < counts.size(); ++i)
            a[i] += static_cast<double>(counts[i]);
        tbl.probs[key] = rng.dirichlet(a);
      }
    }
  }
  has_probs_ = true;
}

std::vector<double> PamState::mean_row(int level, int mode1,
                                       const std::vector<int>& key,
                                       double gamma) const {
  const auto& counts = counts_row(level, mode1, key);
  std::vector<double> out(counts.size());
  double tot = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = gamma + static_cast<double>(counts[i]);
    tot += out[i];
  }
  for (double& v : out) v /= tot;
  return out;
}

std::vector<std::vector<int>> PamState::draw_path(double gamma, Rng& rng) const {
  std::vector<std::vector<int>> choices(pam_modes_.size(),
                                        std::vector<int>(L_, -1));
  for (int l = 1; l <= L_; ++l) {
    for (int m : topo_order_) {
      int pos = 0;
      while (pam_modes_[pos] != m) ++pos;
      const auto key = parent_key(l, m, choices);
      std::size_t pick;
      if (has_probs_) {
        pick = rng.categorical(probs_row(l, m, key));
      } else {
        const auto& counts = counts_row(l, m, key);
        std::vector<double> w(counts.size());
        for (std::size_t i = 0; i < w.size(); ++i)
          w[i] = gamma + static_cast<double>(counts[i]);
        pick = rng.categorical(w);
      }
      choices[pos][l - 1] = static_cast<int>(pick);
    }
  }
  return choices;
}

void PamState::add_path(const std::vector<std::vector<int>>& choices) {
  for (int l = 1; l <= L_; ++l)
    for (std::size_t pos = 0; pos < pam_modes_.size(); ++pos)
      add_count(l, pam_modes_[pos], parent_key(l, pam_modes_[pos], choices),
                choices[pos][l - 1], +1);
}

void PamState::remove_path(const std::vector<std::vector<int>>& choices) {
  for (int l = 1; l <= L_; ++l)
    for (std::size_t pos = 0; pos < pam_modes_.size(); ++pos)
      add_count(l, pam_modes_[pos], parent_key(l, pam_modes_[pos], choices),
                choices[pos][l - 1], -1);
}

double PamState::path_log_prior(const std::vector<std::vector<int>>& choices,
                                double gamma) const {
  // counts exclude the customer in the collapsed case
  double lp = 0.0;
  for (int l = 1; l <= L_; ++l) {
    for (std::size_t pos = 0; pos < pam_modes_.size(); ++pos) {
      const int m = pam_modes_[pos];
      const auto key = parent_key(l, m, choices);
      const int k = choices[pos][l - 1];
      if (has_probs_) {
        lp += std::log(probs_row(l, m, key)[k]);
      } else {
        const auto& counts = counts_row(l, m, key);
        double tot = 0.0;
        for (auto c : counts) tot += gamma + static_cast<double>(c);
        lp += std::log((gamma + static_cast<double>(counts[k])) / tot);
      }
    }
  }
  return lp;
}

double PamState::collapsed_log_prior(double gamma) const {
  double lp = 0.0;
  for (int l = 1; l <= L_; ++l) {
    for (int m : pam_modes_) {
      const double g0 = gamma * static_cast<double>(tau(l, m));
      for (const auto& [key, counts] : tables_[l - 1][m - 1].counts) {
        std::int64_t tot = 0;
        for (auto c : counts) {
          tot += c;
          if (c > 0)
            lp += std::lgamma(gamma + static_cast<double>(c)) -
                  std::lgamma(gamma);
        }
        if (tot > 0)
          lp += std::lgamma(g0) - std::lgamma(g0 + static_cast<double>(tot));
      }
    }
  }
  return lp;
}

bool PamState::is_root_mode(int mode1) const {
  return std::find(roots_.begin(), roots_.end(), mode1) != roots_.end();
}

bool PamState::audit(std::int64_t expected_customers, std::string* why) const {
  for (int l = 1; l <= L_; ++l) {
    for (int m : pam_modes_) {
      std::int64_t tot = 0;
      for (const auto& [key, counts] : tables_[l - 1][m - 1].counts)
        for (auto c : counts) {
          if (c < 0) {
            if (why) *why = "negative pam count";
            return false;
          }
          tot += c;
        }
      if (tot != expected_customers) {
        if (why)
          *why = "pam level/mode customer total mismatch at level " +
                 std::to_string(l) + " mode " + std::to_string(m);
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------- HierarchyState

HierarchyState::HierarchyState(const ModelConfig& cfg)
    : cfg_(cfg), kind_(cfg.hierarchy) {
  if (kind_ == HierarchyKind::none)
    throw std::invalid_argument("HierarchyState: hierarchy = none");
  for (int m = 1; m <= cfg_.p; ++m) {
    if (mode_uses_tree(m)) {
      const int depth = kind_ == HierarchyKind::trees ? cfg_.levels[m - 1]
                                                      : cfg_.levels[0];
      trees_.emplace_back(depth);
    } else {
      trees_.emplace_back(1);  // placeholder, unused
    }
  }
  if (kind_ == HierarchyKind::pam) pam_.emplace(cfg_);
}

bool HierarchyState::mode_uses_tree(int mode1) const {
  if (kind_ == HierarchyKind::trees) return true;
  return cfg_.mode_is_independent(mode1);
}

int HierarchyState::pam_mode_pos(int mode1) const {
  if (!pam_) return -1;
  const auto& pm = pam_->pam_modes();
  for (std::size_t i = 0; i < pm.size(); ++i)
    if (pm[i] == mode1) return static_cast<int>(i);
  return -1;
}

void HierarchyState::init_from_prior(int num_samples, Rng& rng,
                                     bool non_collapsed) {
  paths_.assign(num_samples, std::vector<std::vector<int>>(cfg_.p));
  pam_paths_.assign(num_samples, {});
  if (pam_ && non_collapsed) pam_->draw_transitions(cfg_.gamma, rng, true);
  for (int x = 0; x < num_samples; ++x) {
    for (int m = 1; m <= cfg_.p; ++m)
      if (mode_uses_tree(m))
        paths_[x][m - 1] = trees_[m - 1].draw_path(cfg_.gamma, rng);
    if (pam_) {
      pam_paths_[x] = pam_->draw_path(cfg_.gamma, rng);
      pam_->add_path(pam_paths_[x]);
    }
  }
}

const std::vector<int>& HierarchyState::tree_path(int x, int mode1) const {
  return paths_[x][mode1 - 1];
}

void HierarchyState::set_tree_path(int x, int mode1, std::vector<int> path) {
  paths_[x][mode1 - 1] = std::move(path);
}

const std::vector<std::vector<int>>& HierarchyState::pam_choices(int x) const {
  return pam_paths_[x];
}

std::vector<std::vector<int>>& HierarchyState::pam_choices_mut(int x) {
  return pam_paths_[x];
}

std::vector<int> HierarchyState::visited(int x, int mode1) const {
  if (mode_uses_tree(mode1)) return paths_[x][mode1 - 1];
  const int pos = pam_mode_pos(mode1);
  std::vector<int> out;
  const auto& ch = pam_paths_[x][pos];
  for (int l = 1; l <= pam_->levels(); ++l)
    out.push_back(pam_->node_offset(mode1, l) + ch[l - 1]);
  return out;
}

double HierarchyState::path_log_prior(int x) const {
  double lp = 0.0;
  for (int m = 1; m <= cfg_.p; ++m) {
    if (!mode_uses_tree(m)) continue;
    // leave-one-out by structural remove/re-add is avoided: subtract x's own
    // seat from every count along its path
    const auto& path = paths_[x][m - 1];
    const ModeTree& t = trees_[m - 1];
    int cur = t.root();
    for (std::size_t d = 1; d < path.size(); ++d) {
      std::int64_t n = 0;
      for (int k : t.node(cur).children) n += t.node(k).customers;
      n -= 1;  // x itself sits below cur
      const double den = cfg_.gamma + static_cast<double>(n);
      const std::int64_t c = t.node(path[d]).customers - 1;
      lp += std::log((c > 0 ? static_cast<double>(c) : cfg_.gamma) / den);
      cur = path[d];
    }
  }
  if (pam_) {
    if (pam_->has_transitions()) {
      lp += pam_->path_log_prior(pam_paths_[x], cfg_.gamma);
    } else {
      const auto& ch = pam_paths_[x];
      for (int l = 1; l <= pam_->levels(); ++l) {
        for (std::size_t pos = 0; pos < pam_->pam_modes().size(); ++pos) {
          const int m = pam_->pam_modes()[pos];
          const auto key = pam_->parent_key(l, m, ch);
          const auto& counts = pam_->counts_row(l, m, key);
          double tot = -1.0;  // exclude x from the denominator
          for (auto c : counts) tot += cfg_.gamma + static_cast<double>(c);
          lp += std::log(
              (cfg_.gamma + static_cast<double>(counts[ch[pos][l - 1]] - 1)) /
              tot);
        }
      }
    }
  }
  return lp;
}

void HierarchyState::draw_path_trees(int x, int mode1, Rng& rng) {
  paths_[x][mode1 - 1] = trees_[mode1 - 1].draw_path(cfg_.gamma, rng);
}

void HierarchyState::draw_path_pam(int x, Rng& rng) {
  pam_paths_[x] = pam_->draw_path(cfg_.gamma, rng);
  pam_->add_path(pam_paths_[x]);
}

std::vector<std::vector<int>> HierarchyState::predictive_visited(Rng& rng) const {
  std::vector<std::vector<int>> out(cfg_.p);
  for (int m = 1; m <= cfg_.p; ++m) {
    if (!mode_uses_tree(m)) continue;
    const ModeTree& t = trees_[m - 1];
    int cur = t.root();
    out[m - 1].push_back(cur);
    for (int l = 2; l <= t.depth(); ++l) {
      const auto& kids = t.node(cur).children;
      if (kids.empty()) throw std::logic_error("predictive path hit a leaf early");
      std::vector<double> w(kids.size());
      for (std::size_t i = 0; i < kids.size(); ++i)
        w[i] = static_cast<double>(t.node(kids[i]).customers);
      cur = kids[rng.categorical(w)];
      out[m - 1].push_back(cur);
    }
  }
  if (pam_) {
    std::vector<std::vector<int>> choices(pam_->pam_modes().size(),
                                          std::vector<int>(pam_->levels(), -1));
    for (int l = 1; l <= pam_->levels(); ++l) {
      for (int m : pam_->topo_order()) {
        int pos = pam_mode_pos(m);
        const auto key = pam_->parent_key(l, m, choices);
        const auto w = pam_->mean_row(l, m, key, cfg_.gamma);
        choices[pos][l - 1] = static_cast<int>(rng.categorical(w));
      }
    }
    for (std::size_t pos = 0; pos < pam_->pam_modes().size(); ++pos) {
      const int m = pam_->pam_modes()[pos];
      for (int l = 1; l <= pam_->levels(); ++l)
        out[m - 1].push_back(pam_->node_offset(m, l) + choices[pos][l - 1]);
    }
  }
  return out;
}

bool HierarchyState::audit(std::string* why) const {
  const auto d0 = static_cast<std::int64_t>(paths_.size());
  for (int m = 1; m <= cfg_.p; ++m) {
    if (!mode_uses_tree(m)) continue;
    const ModeTree& t = trees_[m - 1];
    if (!t.audit(why)) return false;
    if (t.total_customers() != d0) {
      if (why) *why = "tree root customers != number of samples";
      return false;
    }
    // per-node customers equal the number of paths through the node
    std::map<int, std::int64_t> through;
    for (int x = 0; x < d0; ++x)
      for (int id : paths_[x][m - 1]) through[id] += 1;
    for (int id : t.alive_node_ids()) {
      if (t.node(id).customers != through[id]) {
        if (why) *why = "node customers disagree with stored paths";
        return false;
      }
    }
  }
  if (pam_) {
    if (!pam_->audit(d0, why)) return false;
    // counts equal tallies recomputed from the stored paths
    for (int l = 1; l <= pam_->levels(); ++l) {
      for (std::size_t pos = 0; pos < pam_->pam_modes().size(); ++pos) {
        const int m = pam_->pam_modes()[pos];
        std::map<std::pair<std::vector<int>, int>, std::int64_t> tally;
        for (int x = 0; x < d0; ++x)
          tally[{pam_->parent_key(l, m, pam_paths_[x]),
                 pam_paths_[x][pos][l - 1]}] += 1;
        for (const auto& [kk, c] : tally) {
          if (pam_->count(l, m, kk.first, kk.second) != c) {
            if (why) *why = "pam counts disagree with stored paths";
            return false;
          }
        }
      }
    }
  }
  return true;
}

// ------------------------------------------------------------- TopicLayout

TopicLayout TopicLayout::from_hierarchy(const HierarchyState& h) {
  TopicLayout out;
  const auto& cfg = h.config();
  out.nodes.resize(cfg.p);
  out.to_dense.resize(cfg.p);
  for (int m = 1; m <= cfg.p; ++m) {
    if (h.mode_uses_tree(m)) {
      out.nodes[m - 1] = h.tree(m).alive_node_ids();
    } else {
      const int K = h.pam().topics_per_mode(m);
      out.nodes[m - 1].resize(K);
      std::iota(out.nodes[m - 1].begin(), out.nodes[m - 1].end(), 0);
    }
    for (int i = 0; i < static_cast<int>(out.nodes[m - 1].size()); ++i)
      out.to_dense[m - 1][out.nodes[m - 1][i]] = i;
  }
  return out;
}

TopicLayout TopicLayout::dense(const std::vector<std::int32_t>& k_dims) {
  TopicLayout out;
  out.nodes.resize(k_dims.size());
  out.to_dense.resize(k_dims.size());
  for (std::size_t m = 0; m < k_dims.size(); ++m) {
    out.nodes[m].resize(k_dims[m]);
    std::iota(out.nodes[m].begin(), out.nodes[m].end(), 0);
    for (int i = 0; i < k_dims[m]; ++i) out.to_dense[m][i] = i;
  }
  return out;
}

std::vector<std::int32_t> TopicLayout::k_dims() const {
  std::vector<std::int32_t> out;
  for (const auto& v : nodes) out.push_back(static_cast<std::int32_t>(v.size()));
  return out;
}

std::vector<std::int64_t> topic_set_flat(const HierarchyState& h, int x,
                                         const TopicLayout& layout,
                                         Composition comp) {
  const auto& cfg = h.config();
  TopicIndexMap map(layout.k_dims());
  std::vector<std::vector<int>> dense(cfg.p);
  for (int m = 1; m <= cfg.p; ++m)
    for (int id : h.visited(x, m))
      dense[m - 1].push_back(layout.to_dense[m - 1].at(id));

  std::vector<std::int64_t> out;
  if (comp == Composition::level) {
    const std::size_t L = dense[0].size();
    for (const auto& d : dense)
      if (d.size() != L)
        throw std::logic_error("level composition needs equal path lengths");
    IndexTuple t(cfg.p);
    for (std::size_t l = 0; l < L; ++l) {
      for (int m = 0; m < cfg.p; ++m) t[m] = dense[m][l];
      out.push_back(map.flat(t));
    }
  } else {
    IndexTuple t(cfg.p);
    std::vector<std::size_t> it(cfg.p, 0);
    for (;;) {
      for (int m = 0; m < cfg.p; ++m) t[m] = dense[m][it[m]];
      out.push_back(map.flat(t));
      int m = 0;
      while (m < cfg.p && ++it[m] == dense[m].size()) it[m++] = 0;
      if (m == cfg.p) break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace hbtd
