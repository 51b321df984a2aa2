#include "hbtd/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <thread>

namespace hbtd {

namespace {

std::vector<std::int32_t> level_dims(const ModelConfig& cfg) {
  if (cfg.hierarchy == HierarchyKind::none) return cfg.k_dims;
  std::vector<std::int32_t> out(cfg.p);
  for (int m = 1; m <= cfg.p; ++m)
    out[m - 1] = cfg.hierarchy == HierarchyKind::trees ? cfg.levels[m - 1]
                                                       : cfg.levels[0];
  return out;
}

}  // namespace

GibbsChain::GibbsChain(const ModelConfig& cfg, const CountTensor& data)
    : cfg_(cfg), collapsed_(cfg.sampler.variant == SamplerVariant::collapsed) {
  cfg_.validate();
  if (data.p() != cfg_.p || data.dims() != cfg_.dims)
    throw DataError("data shape does not match the configuration");
  if (cfg_.hierarchy == HierarchyKind::trees && !collapsed_)
    throw ConfigError("trees hierarchy requires the collapsed sampler");
  if (cfg_.hierarchy != HierarchyKind::none && !cfg_.alpha_full.empty())
    throw ConfigError("hierarchical models need a scalar alpha");

  obs_ = expand_observations(data);
  lmap_ = TopicIndexMap(level_dims(cfg_));
  if (cfg_.composition == Composition::level) {
    const auto& kd = lmap_.k_dims();
    for (auto d : kd)
      if (d != kd[0])
        throw ConfigError("level composition needs equal level counts");
    IndexTuple t(cfg_.p);
    for (std::int32_t l = 0; l < kd[0]; ++l) {
      std::fill(t.begin(), t.end(), l);
      support_.push_back(lmap_.flat(t));
    }
  } else {
    support_.resize(lmap_.total());
    std::iota(support_.begin(), support_.end(), 0);
  }
  for (auto s : support_) support_tuples_.push_back(lmap_.tuple(s));
}

int GibbsChain::node_of(int x, int mode0, int level0) const {
  if (!h_) return level0;
  if (h_->mode_uses_tree(mode0 + 1)) return h_->tree_path(x, mode0 + 1)[level0];
  const int pos = h_->pam_mode_pos(mode0 + 1);
  return h_->pam().node_offset(mode0 + 1, level0 + 1) +
         h_->pam_choices(x)[pos][level0];
}

void GibbsChain::add_item(int x, std::size_t i, std::int64_t lev, int sign) {
  zlev_[x][i] = lev;
  nstat_[x][lev] += sign;
  const IndexTuple t = lmap_.tuple(lev);
  for (int j = 0; j < cfg_.p; ++j) {
    const int node = node_of(x, j, t[j]);
    auto& row = mstat_[j][node];
    if (row.empty()) row.assign(cfg_.dims[j + 1], 0);
    row[obs_[x][i][j]] += sign;
    mrow_[j][node] += sign;
  }
}

void GibbsChain::rebuild_stats() {
  const std::int32_t d0 = cfg_.dims[0];
  nstat_.assign(d0, std::vector<std::int64_t>(lmap_.total(), 0));
  mstat_.assign(cfg_.p, {});
  mrow_.assign(cfg_.p, {});
  for (std::int32_t x = 0; x < d0; ++x)
    for (std::size_t i = 0; i < obs_[x].size(); ++i)
      add_item(x, i, zlev_[x][i], +1);
}

void GibbsChain::init(Rng& rng) {
  const std::int32_t d0 = cfg_.dims[0];
  if (cfg_.hierarchy != HierarchyKind::none) {
    h_.emplace(cfg_);
    h_->init_from_prior(d0, rng, !collapsed_);
  }
  zlev_.assign(d0, {});
  for (std::int32_t x = 0; x < d0; ++x)
    zlev_[x].assign(obs_[x].size(), support_[0]);
  nstat_.assign(d0, std::vector<std::int64_t>(lmap_.total(), 0));
  mstat_.assign(cfg_.p, {});
  mrow_.assign(cfg_.p, {});

  if (!collapsed_) resample_params(rng);

  const auto alpha = alpha_flat(cfg_, lmap_.total());
  // collapsed: sequential prior-predictive; non-collapsed: draw given params
  for (std::int32_t x = 0; x < d0; ++x) {
    for (std::size_t i = 0; i < obs_[x].size(); ++i) {
      std::vector<double> w(support_.size());
      for (std::size_t s = 0; s < support_.size(); ++s) {
        const auto& tt = support_tuples_[s];
        if (collapsed_) {
          double v = alpha[support_[s]] +
                     static_cast<double>(nstat_[x][support_[s]]);
          for (int j = 0; j < cfg_.p; ++j) {
            const int node = node_of(x, j, tt[j]);
            const auto it = mstat_[j].find(node);
            const std::int64_t c = it == mstat_[j].end() ? 0 : it->second[obs_[x][i][j]];
            const std::int64_t rt = it == mstat_[j].end() ? 0 : mrow_[j][node];
            v *= (cfg_.beta[j] + static_cast<double>(c)) /
                 (cfg_.beta[j] * cfg_.dims[j + 1] + static_cast<double>(rt));
          }
          w[s] = v;
        } else {
          double v = phi_[x][support_[s]];
          for (int j = 0; j < cfg_.p; ++j)
            v *= psi_[j].at(node_of(x, j, tt[j]))[obs_[x][i][j]];
          w[s] = v;
        }
      }
      add_item(x, i, support_[rng.categorical(w)], +1);
    }
  }
}

void GibbsChain::force_z(const std::vector<std::vector<std::int64_t>>& zlev) {
  if (static_cast<std::int32_t>(zlev.size()) != cfg_.dims[0])
    throw DataError("force_z: wrong number of samples");
  for (std::int32_t x = 0; x < cfg_.dims[0]; ++x) {
    if (zlev[x].size() != obs_[x].size())
      throw DataError("force_z: wrong item count");
    for (auto v : zlev[x])
      if (!std::binary_search(support_.begin(), support_.end(), v))
        throw DataError("force_z: value outside the admissible set");
  }
  zlev_ = zlev;
  rebuild_stats();
}

std::vector<double> GibbsChain::conditional_z(int x, std::size_t i) const {
  const auto alpha = alpha_flat(cfg_, lmap_.total());
  const std::int64_t cur = zlev_[x][i];
  const IndexTuple curt = lmap_.tuple(cur);
  std::vector<int> ex_node(cfg_.p);
  for (int j = 0; j < cfg_.p; ++j) ex_node[j] = node_of(x, j, curt[j]);

  std::vector<double> w(support_.size());
  for (std::size_t s = 0; s < support_.size(); ++s) {
    const auto& tt = support_tuples_[s];
    if (collapsed_) {
      double v = alpha[support_[s]] +
                 static_cast<double>(nstat_[x][support_[s]] -
                                     (support_[s] == cur ? 1 : 0));
      for (int j = 0; j < cfg_.p; ++j) {
        const int node = node_of(x, j, tt[j]);
        const auto it = mstat_[j].find(node);
        std::int64_t c = it == mstat_[j].end() ? 0 : it->second[obs_[x][i][j]];
        std::int64_t rt = it == mstat_[j].end() ? 0 : mrow_[j].at(node);
        if (node == ex_node[j]) {
          c -= 1;
          rt -= 1;
        }
        v *= (cfg_.beta[j] + static_cast<double>(c)) /
             (cfg_.beta[j] * cfg_.dims[j + 1] + static_cast<double>(rt));
      }
      w[s] = v;
    } else {
      double v = phi_[x][support_[s]];
      for (int j = 0; j < cfg_.p; ++j)
        v *= psi_[j].at(node_of(x, j, tt[j]))[obs_[x][i][j]];
      w[s] = v;
    }
  }
  double tot = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= tot;
  return w;
}

void GibbsChain::sweep_z(Rng& rng) {
  const auto alpha = alpha_flat(cfg_, lmap_.total());
  std::vector<double> w(support_.size());
  for (std::int32_t x = 0; x < cfg_.dims[0]; ++x) {
    for (std::size_t i = 0; i < obs_[x].size(); ++i) {
      add_item(x, i, zlev_[x][i], -1);
      for (std::size_t s = 0; s < support_.size(); ++s) {
        const auto& tt = support_tuples_[s];
        if (collapsed_) {
          double v = alpha[support_[s]] +
                     static_cast<double>(nstat_[x][support_[s]]);
          for (int j = 0; j < cfg_.p; ++j) {
            const int node = node_of(x, j, tt[j]);
            const auto it = mstat_[j].find(node);
            const std::int64_t c =
                it == mstat_[j].end() ? 0 : it->second[obs_[x][i][j]];
            const std::int64_t rt =
                it == mstat_[j].end() ? 0 : mrow_[j].at(node);
            v *= (cfg_.beta[j] + static_cast<double>(c)) /
                 (cfg_.beta[j] * cfg_.dims[j + 1] + static_cast<double>(rt));
          }
          w[s] = v;
        } else {
          double v = phi_[x][support_[s]];
          for (int j = 0; j < cfg_.p; ++j)
            v *= psi_[j].at(node_of(x, j, tt[j]))[obs_[x][i][j]];
          w[s] = v;
        }
      }
      add_item(x, i, support_[rng.categorical(w)], +1);
    }
  }
}

void GibbsChain::resample_params(Rng& rng) {
  const std::int32_t d0 = cfg_.dims[0];
  const auto alpha = alpha_flat(cfg_, lmap_.total());
  phi_.assign(d0, std::vector<double>(lmap_.total(), 0.0));
  for (std::int32_t x = 0; x < d0; ++x) {
    std::vector<double> a(support_.size());
    for (std::size_t s = 0; s < support_.size(); ++s)
      a[s] = alpha[support_[s]] +
             static_cast<double>(nstat_.empty() ? 0 : nstat_[x][support_[s]]);
    const auto draw = rng.dirichlet(a);
    for (std::size_t s = 0; s < support_.size(); ++s)
      phi_[x][support_[s]] = draw[s];
  }
  psi_.assign(cfg_.p, {});
  for (int j = 0; j < cfg_.p; ++j) {
    const int universe = h_ ? h_->pam().topics_per_mode(j + 1) : cfg_.k_dims[j];
    for (int node = 0; node < universe; ++node) {
      std::vector<double> b(cfg_.dims[j + 1], cfg_.beta[j]);
      const auto it = mstat_[j].find(node);
      if (it != mstat_[j].end())
        for (std::int32_t v = 0; v < cfg_.dims[j + 1]; ++v)
          b[v] += static_cast<double>(it->second[v]);
      psi_[j][node] = rng.dirichlet(b);
    }
  }
  if (h_ && h_->has_pam()) h_->pam().draw_transitions(cfg_.gamma, rng, false);
}

std::vector<std::int64_t> GibbsChain::mode_level_counts(int x, int mode0,
                                                        int level0) const {
  std::vector<std::int64_t> c(cfg_.dims[mode0 + 1], 0);
  for (std::size_t i = 0; i < obs_[x].size(); ++i)
    if (lmap_.tuple(zlev_[x][i])[mode0] == level0) c[obs_[x][i][mode0]] += 1;
  return c;
}

double GibbsChain::row_dm_log_ratio(int mode0, int node, bool is_new,
                                    const std::vector<std::int64_t>& add) const {
  const double b = cfg_.beta[mode0];
  const double b0 = b * static_cast<double>(cfg_.dims[mode0 + 1]);
  const std::vector<std::int64_t>* row = nullptr;
  std::int64_t rt = 0;
  if (!is_new) {
    const auto it = mstat_[mode0].find(node);
    if (it != mstat_[mode0].end()) {
      row = &it->second;
      rt = mrow_[mode0].at(node);
    }
  }
  double lp = 0.0;
  std::int64_t at = 0;
  for (std::size_t v = 0; v < add.size(); ++v) {
    if (add[v] == 0) continue;
    at += add[v];
    const double base = b + static_cast<double>(row ? (*row)[v] : 0);
    lp += std::lgamma(base + static_cast<double>(add[v])) - std::lgamma(base);
  }
  lp += std::lgamma(b0 + static_cast<double>(rt)) -
        std::lgamma(b0 + static_cast<double>(rt + at));
  return lp;
}

void GibbsChain::resample_paths_trees(int x, int mode1, Rng& rng) {
  const int mode0 = mode1 - 1;
  ModeTree& tree = h_->tree(mode1);
  const int depth = tree.depth();

  std::vector<std::vector<std::int64_t>> cnts(depth);
  for (int l = 0; l < depth; ++l) cnts[l] = mode_level_counts(x, mode0, l);

  const std::vector<int> old_path = h_->tree_path(x, mode1);
  for (int l = 0; l < depth; ++l) {
    auto& row = mstat_[mode0][old_path[l]];
    for (std::size_t v = 0; v < cnts[l].size(); ++v) row[v] -= cnts[l][v];
    mrow_[mode0][old_path[l]] -=
        std::accumulate(cnts[l].begin(), cnts[l].end(), std::int64_t{0});
  }
  tree.remove_path(old_path);

  std::vector<std::vector<int>> cands;
  std::vector<int> cur;
  std::function<void(int)> dfs = [&](int node) {
    cur.push_back(node);
    if (static_cast<int>(cur.size()) == depth) {
      cands.push_back(cur);
    } else {
      for (int c : tree.node(node).children) dfs(c);
      auto fresh = cur;
      fresh.resize(depth, -1);
      cands.push_back(std::move(fresh));
    }
    cur.pop_back();
  };
  dfs(tree.root());

  std::vector<double> lp(cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c) {
    double v = tree.path_log_prior(cands[c], cfg_.gamma);
    for (int l = 0; l < depth; ++l)
      v += row_dm_log_ratio(mode0, cands[c][l], cands[c][l] < 0, cnts[l]);
    lp[c] = v;
  }
  std::vector<int> pick = cands[rng.categorical_log(lp)];
  for (int l = 0; l < depth; ++l)
    if (pick[l] < 0) pick[l] = tree.alloc_child(pick[l - 1]);
  tree.add_path(pick);
  h_->set_tree_path(x, mode1, pick);

  for (int l = 0; l < depth; ++l) {
    auto& row = mstat_[mode0][pick[l]];
    if (row.empty()) row.assign(cfg_.dims[mode0 + 1], 0);
    for (std::size_t v = 0; v < cnts[l].size(); ++v) row[v] += cnts[l][v];
    mrow_[mode0][pick[l]] +=
        std::accumulate(cnts[l].begin(), cnts[l].end(), std::int64_t{0});
  }
}

void GibbsChain::resample_paths_pam(int x, Rng& rng) {
  PamState& pam = h_->pam();
  auto choices = h_->pam_choices(x);
  pam.remove_path(choices);

  for (int l = 1; l <= pam.levels(); ++l) {
    for (int m : pam.topo_order()) {
      const int pos = h_->pam_mode_pos(m);
      const int tau = pam.tau(l, m);
      const int off = pam.node_offset(m, l);
      const auto c = mode_level_counts(x, m - 1, l - 1);
      const std::int64_t ct =
          std::accumulate(c.begin(), c.end(), std::int64_t{0});

      const int old_node = off + choices[pos][l - 1];
      auto& old_row = mstat_[m - 1][old_node];
      if (!old_row.empty()) {
        for (std::size_t v = 0; v < c.size(); ++v) old_row[v] -= c[v];
        mrow_[m - 1][old_node] -= ct;
      } else if (ct != 0) {
        throw std::logic_error("missing stats row for an occupied node");
      }

      std::vector<double> lp(tau);
      for (int k = 0; k < tau; ++k) {
        choices[pos][l - 1] = k;
        double v = pam.path_log_prior(choices, cfg_.gamma);
        if (collapsed_) {
          v += row_dm_log_ratio(m - 1, off + k, false, c);
        } else {
          const auto& psi = psi_[m - 1].at(off + k);
          for (std::size_t y = 0; y < c.size(); ++y)
            if (c[y] > 0) v += static_cast<double>(c[y]) * std::log(psi[y]);
        }
        lp[k] = v;
      }
      const int k = static_cast<int>(rng.categorical_log(lp));
      choices[pos][l - 1] = k;
      auto& row = mstat_[m - 1][off + k];
      if (row.empty()) row.assign(cfg_.dims[m], 0);
      for (std::size_t v = 0; v < c.size(); ++v) row[v] += c[v];
      mrow_[m - 1][off + k] += ct;
    }
  }
  pam.add_path(choices);
  h_->pam_choices_mut(x) = choices;
}

void GibbsChain::sweep(Rng& rng) {
  if (collapsed_) {
    sweep_z(rng);
    if (h_) {
      for (std::int32_t x = 0; x < cfg_.dims[0]; ++x) {
        for (int m = 1; m <= cfg_.p; ++m)
          if (h_->mode_uses_tree(m)) resample_paths_trees(x, m, rng);
        if (h_->has_pam()) resample_paths_pam(x, rng);
      }
    }
  } else {
    if (h_ && h_->has_pam())
      for (std::int32_t x = 0; x < cfg_.dims[0]; ++x)
        resample_paths_pam(x, rng);
    resample_params(rng);
    sweep_z(rng);
  }
}

double GibbsChain::log_score() const {
  const auto alpha = alpha_flat(cfg_, lmap_.total());
  double lp = 0.0;
  if (collapsed_) {
    for (std::int32_t x = 0; x < cfg_.dims[0]; ++x) {
      double a0 = 0.0;
      for (auto s : support_) {
        a0 += alpha[s];
        if (nstat_[x][s] > 0)
          lp += std::lgamma(alpha[s] + static_cast<double>(nstat_[x][s])) -
                std::lgamma(alpha[s]);
      }
      lp += std::lgamma(a0) -
            std::lgamma(a0 + static_cast<double>(obs_[x].size()));
    }
    for (int j = 0; j < cfg_.p; ++j) {
      const double b = cfg_.beta[j];
      const double b0 = b * static_cast<double>(cfg_.dims[j + 1]);
      for (const auto& [node, row] : mstat_[j]) {
        std::int64_t rt = 0;
        for (auto c : row) {
          rt += c;
          if (c > 0)
            lp += std::lgamma(b + static_cast<double>(c)) - std::lgamma(b);
        }
        lp += std::lgamma(b0) - std::lgamma(b0 + static_cast<double>(rt));
      }
    }
  } else {
    for (std::int32_t x = 0; x < cfg_.dims[0]; ++x)
      for (std::size_t i = 0; i < obs_[x].size(); ++i) {
        lp += std::log(phi_[x][zlev_[x][i]]);
        const IndexTuple t = lmap_.tuple(zlev_[x][i]);
        for (int j = 0; j < cfg_.p; ++j)
          lp += std::log(psi_[j].at(node_of(x, j, t[j]))[obs_[x][i][j]]);
      }
  }
  if (h_) {
    // collapsed seating probability of the hierarchy itself
    const double g = cfg_.gamma;
    for (int m = 1; m <= cfg_.p; ++m) {
      if (!h_->mode_uses_tree(m)) continue;
      const ModeTree& t = h_->tree(m);
      for (int id : t.alive_node_ids()) {
        const TreeNode& nd = t.node(id);
        if (nd.level >= t.depth() || nd.customers == 0) continue;
        lp += static_cast<double>(nd.children.size()) * std::log(g);
        for (int c : nd.children)
          lp += std::lgamma(static_cast<double>(t.node(c).customers));
        lp += std::lgamma(g) - std::lgamma(g + static_cast<double>(nd.customers));
      }
    }
    if (h_->has_pam()) {
      const PamState& pam = h_->pam();
      if (pam.has_transitions()) {
        for (std::int32_t x = 0; x < cfg_.dims[0]; ++x)
          lp += pam.path_log_prior(h_->pam_choices(x), g);
      } else {
        lp += pam.collapsed_log_prior(g);
      }
    }
  }
  return lp;
}

std::int64_t GibbsChain::active_topics() const {
  std::set<std::vector<int>> used;
  for (std::int32_t x = 0; x < cfg_.dims[0]; ++x)
    for (std::size_t i = 0; i < obs_[x].size(); ++i) {
      const IndexTuple t = lmap_.tuple(zlev_[x][i]);
      std::vector<int> nodes(cfg_.p);
      for (int j = 0; j < cfg_.p; ++j) nodes[j] = node_of(x, j, t[j]);
      used.insert(std::move(nodes));
    }
  return static_cast<std::int64_t>(used.size());
}

PosteriorDraw GibbsChain::snapshot(int chain, int sweep) const {
  PosteriorDraw out;
  out.chain = chain;
  out.sweep = sweep;
  out.layout = h_ ? TopicLayout::from_hierarchy(*h_)
                  : TopicLayout::dense(cfg_.k_dims);
  out.k_dims = out.layout.k_dims();
  const TopicIndexMap kmap(out.k_dims);
  const auto alpha = alpha_flat(cfg_, lmap_.total());

  out.psi.assign(cfg_.p, {});
  for (int j = 0; j < cfg_.p; ++j) {
    out.psi[j].resize(out.k_dims[j]);
    const double b = cfg_.beta[j];
    const double b0 = b * static_cast<double>(cfg_.dims[j + 1]);
    for (std::int32_t k = 0; k < out.k_dims[j]; ++k) {
      const int node = out.layout.nodes[j][k];
      if (!collapsed_) {
        out.psi[j][k] = psi_[j].at(node);
        continue;
      }
      const auto it = mstat_[j].find(node);
      std::int64_t rt = 0;
      if (it != mstat_[j].end())
        rt = std::accumulate(it->second.begin(), it->second.end(),
                             std::int64_t{0});
      out.psi[j][k].resize(cfg_.dims[j + 1]);
      for (std::int32_t v = 0; v < cfg_.dims[j + 1]; ++v) {
        const std::int64_t c = it == mstat_[j].end() ? 0 : it->second[v];
        out.psi[j][k][v] =
            (b + static_cast<double>(c)) / (b0 + static_cast<double>(rt));
      }
    }
  }

  const std::int32_t d0 = cfg_.dims[0];
  out.phi.assign(d0, std::vector<double>(kmap.total(), 0.0));
  out.support.assign(d0, {});
  out.z.assign(d0, {});
  for (std::int32_t x = 0; x < d0; ++x) {
    double a0 = 0.0;
    for (auto s : support_) a0 += alpha[s];
    IndexTuple kt(cfg_.p);
    for (std::size_t s = 0; s < support_.size(); ++s) {
      const auto& tt = support_tuples_[s];
      for (int j = 0; j < cfg_.p; ++j)
        kt[j] = out.layout.to_dense[j].at(node_of(x, j, tt[j]));
      const std::int64_t f = kmap.flat(kt);
      if (h_) out.support[x].push_back(f);
      if (collapsed_) {
        out.phi[x][f] =
            (alpha[support_[s]] + static_cast<double>(nstat_[x][support_[s]])) /
            (a0 + static_cast<double>(obs_[x].size()));
      } else {
        out.phi[x][f] = phi_[x][support_[s]];
      }
    }
    std::sort(out.support[x].begin(), out.support[x].end());
    for (std::size_t i = 0; i < obs_[x].size(); ++i) {
      const IndexTuple t = lmap_.tuple(zlev_[x][i]);
      for (int j = 0; j < cfg_.p; ++j)
        kt[j] = out.layout.to_dense[j].at(node_of(x, j, t[j]));
      out.z[x].push_back(kmap.flat(kt));
    }
  }
  return out;
}

bool GibbsChain::audit(std::string* why) const {
  if (h_ && !h_->audit(why)) return false;
  const std::int32_t d0 = cfg_.dims[0];
  std::vector<std::vector<std::int64_t>> n(d0,
      std::vector<std::int64_t>(lmap_.total(), 0));
  std::vector<std::map<int, std::vector<std::int64_t>>> m(cfg_.p);
  for (std::int32_t x = 0; x < d0; ++x) {
    if (zlev_[x].size() != obs_[x].size()) {
      if (why) *why = "obs/z length mismatch";
      return false;
    }
    for (std::size_t i = 0; i < obs_[x].size(); ++i) {
      const std::int64_t lev = zlev_[x][i];
      if (!std::binary_search(support_.begin(), support_.end(), lev)) {
        if (why) *why = "assignment outside the admissible set";
        return false;
      }
      n[x][lev] += 1;
      const IndexTuple t = lmap_.tuple(lev);
      for (int j = 0; j < cfg_.p; ++j) {
        auto& row = m[j][node_of(x, j, t[j])];
        if (row.empty()) row.assign(cfg_.dims[j + 1], 0);
        row[obs_[x][i][j]] += 1;
      }
    }
  }
  if (n != nstat_) {
    if (why) *why = "n stats disagree with a fresh tally";
    return false;
  }
  for (int j = 0; j < cfg_.p; ++j) {
    for (const auto& [node, row] : m[j]) {
      const auto it = mstat_[j].find(node);
      if (it == mstat_[j].end() || it->second != row) {
        if (why) *why = "m stats disagree with a fresh tally";
        return false;
      }
      std::int64_t rt = std::accumulate(row.begin(), row.end(), std::int64_t{0});
      if (mrow_[j].at(node) != rt) {
        if (why) *why = "row totals disagree with a fresh tally";
        return false;
      }
    }
    for (const auto& [node, row] : mstat_[j]) {
      if (m[j].count(node)) continue;
      for (auto c : row)
        if (c != 0) {
          if (why) *why = "stale nonzero stats row";
          return false;
        }
    }
  }
  return true;
}

FitResult fit(const ModelConfig& cfg, const CountTensor& data) {
  cfg.validate();
  cfg.sampler.validate();
  const int C = cfg.sampler.chains;
  std::vector<std::vector<SweepDiagnostics>> diag(C);
  std::vector<std::vector<PosteriorDraw>> draws(C);
  std::vector<std::shared_ptr<GibbsChain>> chains(C);

  auto run_one = [&](int c) {
    Rng rng = Rng::substream(cfg.sampler.seed, static_cast<std::uint64_t>(c));
    auto chain = std::make_shared<GibbsChain>(cfg, data);
    chain->init(rng);
    for (int s = 1; s <= cfg.sampler.total_sweeps; ++s) {
      chain->sweep(rng);
      SweepDiagnostics d;
      d.chain = c;
      d.sweep = s;
      d.log_score = chain->log_score();
      d.active_topics = chain->active_topics();
      if (const auto* h = chain->hierarchy()) {
        std::int64_t nodes = 0;
        for (int m = 1; m <= cfg.p; ++m)
          if (h->mode_uses_tree(m))
            nodes += static_cast<std::int64_t>(h->tree(m).alive_node_ids().size());
        if (h->has_pam())
          for (int m : h->pam().pam_modes())
            nodes += h->pam().topics_per_mode(m);
        d.hierarchy_nodes = nodes;
      }
      diag[c].push_back(d);
      if (s > cfg.sampler.burn_in &&
          (s - cfg.sampler.burn_in) % cfg.sampler.thin == 0)
        draws[c].push_back(chain->snapshot(c, s));
    }
    chains[c] = std::move(chain);
  };

  if (C == 1) {
    run_one(0);
  } else {
    std::vector<std::thread> threads;
    for (int c = 0; c < C; ++c) threads.emplace_back(run_one, c);
    for (auto& t : threads) t.join();
  }

  FitResult out;
  for (int c = 0; c < C; ++c) {
    out.diagnostics.insert(out.diagnostics.end(), diag[c].begin(), diag[c].end());
    out.draws.insert(out.draws.end(), draws[c].begin(), draws[c].end());
    out.chains.push_back(chains[c]);
  }
  return out;
}

}  // namespace hbtd
