#include "hbtd/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hbtd {

bool DecompositionState::in_support(int x, std::int64_t flat) const {
  if (support[x].empty()) return true;
  return std::binary_search(support[x].begin(), support[x].end(), flat);
}

std::vector<double> alpha_flat(const ModelConfig& cfg, std::int64_t total) {
  if (!cfg.alpha_full.empty()) {
    if (static_cast<std::int64_t>(cfg.alpha_full.size()) != total)
      throw ConfigError("alpha vector length does not match the topic count");
    return cfg.alpha_full;
  }
  return std::vector<double>(total, cfg.alpha);
}

void recompute_stats(DecompositionState& s) {
  const std::int64_t K = s.kmap.total();
  s.n.assign(s.dims[0], std::vector<std::int64_t>(K, 0));
  s.m.assign(s.p, {});
  for (int j = 0; j < s.p; ++j)
    s.m[j].assign(s.k_dims[j], std::vector<std::int64_t>(s.dims[j + 1], 0));
  for (std::int32_t x = 0; x < s.dims[0]; ++x) {
    for (std::size_t i = 0; i < s.obs[x].size(); ++i) {
      const std::int64_t k = s.z[x][i];
      s.n[x][k] += 1;
      const IndexTuple kt = s.kmap.tuple(k);
      for (int j = 0; j < s.p; ++j) s.m[j][kt[j]][s.obs[x][i][j]] += 1;
    }
  }
}

bool audit_stats(const DecompositionState& s, std::string* why) {
  for (std::int32_t x = 0; x < s.dims[0]; ++x) {
    if (s.obs[x].size() != s.z[x].size()) {
      if (why) *why = "obs/z length mismatch";
      return false;
    }
    for (std::size_t i = 0; i < s.obs[x].size(); ++i) {
      if (s.z[x][i] < 0 || s.z[x][i] >= s.kmap.total()) {
        if (why) *why = "z out of range";
        return false;
      }
      if (!s.in_support(x, s.z[x][i])) {
        if (why) *why = "z outside the sample's support";
        return false;
      }
      for (int j = 0; j < s.p; ++j)
        if (s.obs[x][i][j] < 0 || s.obs[x][i][j] >= s.dims[j + 1]) {
          if (why) *why = "observation out of range";
          return false;
        }
    }
  }
  DecompositionState fresh = s;
  recompute_stats(fresh);
  if (fresh.n != s.n) {
    if (why) *why = "n disagrees with a fresh tally";
    return false;
  }
  if (fresh.m != s.m) {
    if (why) *why = "m disagrees with a fresh tally";
    return false;
  }
  return true;
}

Generated generate(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (cfg.lambda.empty())
    throw ConfigError("generate needs lambda (scalar or one value per sample)");
  const std::int32_t d0 = cfg.dims[0];
  std::vector<std::int64_t> lambda;
  if (cfg.lambda.size() == 1) {
    lambda.assign(d0, cfg.lambda[0]);
  } else if (static_cast<std::int32_t>(cfg.lambda.size()) == d0) {
    lambda = cfg.lambda;
  } else {
    throw ConfigError("lambda must be scalar or one value per sample");
  }
  for (auto l : lambda)
    if (l < 0) throw ConfigError("lambda must be nonnegative");

  Generated out;
  Rng global = Rng::substream(seed, 0);

  if (cfg.hierarchy != HierarchyKind::none) {
    out.hierarchy.emplace(cfg);
    out.hierarchy->init_from_prior(d0, global, /*non_collapsed=*/true);
    out.layout = TopicLayout::from_hierarchy(*out.hierarchy);
  } else {
    out.layout = TopicLayout::dense(cfg.k_dims);
  }

  DecompositionState& s = out.state;
  s.p = cfg.p;
  s.dims = cfg.dims;
  s.k_dims = out.layout.k_dims();
  s.kmap = TopicIndexMap(s.k_dims);
  s.obs.assign(d0, {});
  s.z.assign(d0, {});
  s.support.assign(d0, {});
  if (out.hierarchy)
    for (std::int32_t x = 0; x < d0; ++x)
      s.support[x] =
          topic_set_flat(*out.hierarchy, x, out.layout, cfg.composition);

  s.psi.assign(cfg.p, {});
  for (int j = 0; j < cfg.p; ++j) {
    s.psi[j].resize(s.k_dims[j]);
    const std::vector<double> b(cfg.dims[j + 1], cfg.beta[j]);
    for (std::int32_t k = 0; k < s.k_dims[j]; ++k)
      s.psi[j][k] = global.dirichlet(b);
  }

  const auto alpha = alpha_flat(cfg, s.kmap.total());
  out.counts = CountTensor(cfg.p, cfg.dims);
  s.phi.assign(d0, std::vector<double>(s.kmap.total(), 0.0));
  IndexTuple idx(cfg.p + 1);
  for (std::int32_t x = 0; x < d0; ++x) {
    Rng rx = Rng::substream(seed, static_cast<std::uint64_t>(x) + 1);
    std::vector<std::int64_t> sup = s.support[x];
    if (sup.empty()) {
      sup.resize(s.kmap.total());
      std::iota(sup.begin(), sup.end(), 0);
    }
    std::vector<double> a(sup.size());
    for (std::size_t i = 0; i < sup.size(); ++i) a[i] = alpha[sup[i]];
    const auto draw = rx.dirichlet(a);
    for (std::size_t i = 0; i < sup.size(); ++i) s.phi[x][sup[i]] = draw[i];

    idx[0] = x;
    for (std::int64_t t = 0; t < lambda[x]; ++t) {
      const std::int64_t k = sup[rx.categorical(draw)];
      const IndexTuple kt = s.kmap.tuple(k);
      IndexTuple y(cfg.p);
      for (int j = 0; j < cfg.p; ++j) {
        y[j] = static_cast<std::int32_t>(rx.categorical(s.psi[j][kt[j]]));
        idx[j + 1] = y[j];
      }
      s.z[x].push_back(k);
      s.obs[x].push_back(y);
      out.counts.add(idx, 1);
    }
  }
  recompute_stats(s);
  return out;
}

std::vector<std::vector<IndexTuple>> expand_observations(const CountTensor& t) {
  std::vector<std::vector<IndexTuple>> obs(t.num_samples());
  for (const auto& [idx, b] : t.entries()) {
    IndexTuple y(idx.begin() + 1, idx.end());
    for (std::int64_t c = 0; c < b; ++c) obs[idx[0]].push_back(y);
  }
  return obs;
}

CountTensor counts_from_state(const DecompositionState& s) {
  CountTensor t(s.p, s.dims);
  IndexTuple idx(s.p + 1);
  for (std::int32_t x = 0; x < s.dims[0]; ++x) {
    idx[0] = x;
    for (const auto& y : s.obs[x]) {
      for (int j = 0; j < s.p; ++j) idx[j + 1] = y[j];
      t.add(idx, 1);
    }
  }
  return t;
}

double log_dirichlet_pdf(std::span<const double> x, std::span<const double> alpha) {
  double a0 = 0.0, lp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    a0 += alpha[i];
    lp -= std::lgamma(alpha[i]);
    lp += (alpha[i] - 1.0) * std::log(x[i]);
  }
  return lp + std::lgamma(a0);
}

double log_joint_noncollapsed(const DecompositionState& s, const ModelConfig& cfg) {
  const auto alpha = alpha_flat(cfg, s.kmap.total());
  double lp = 0.0;
  for (std::int32_t x = 0; x < s.dims[0]; ++x) {
    std::vector<std::int64_t> sup = s.support[x];
    if (sup.empty()) {
      sup.resize(s.kmap.total());
      std::iota(sup.begin(), sup.end(), 0);
    }
    std::vector<double> a(sup.size()), v(sup.size());
    for (std::size_t i = 0; i < sup.size(); ++i) {
      a[i] = alpha[sup[i]];
      v[i] = s.phi[x][sup[i]];
    }
    lp += log_dirichlet_pdf(v, a);
  }
  for (int j = 0; j < s.p; ++j) {
    const std::vector<double> b(s.dims[j + 1], cfg.beta[j]);
    for (const auto& row : s.psi[j]) lp += log_dirichlet_pdf(row, b);
  }
  for (std::int32_t x = 0; x < s.dims[0]; ++x) {
    for (std::size_t i = 0; i < s.obs[x].size(); ++i) {
      const std::int64_t k = s.z[x][i];
      lp += std::log(s.phi[x][k]);
      const IndexTuple kt = s.kmap.tuple(k);
      for (int j = 0; j < s.p; ++j)
        lp += std::log(s.psi[j][kt[j]][s.obs[x][i][j]]);
    }
  }
  return lp;
}

double log_collapsed_joint(const DecompositionState& s, const ModelConfig& cfg) {
  const auto alpha = alpha_flat(cfg, s.kmap.total());
  double lp = 0.0;
  for (std::int32_t x = 0; x < s.dims[0]; ++x) {
    std::vector<std::int64_t> sup = s.support[x];
    if (sup.empty()) {
      sup.resize(s.kmap.total());
      std::iota(sup.begin(), sup.end(), 0);
    }
    double a0 = 0.0;
    for (auto k : sup) {
      a0 += alpha[k];
      lp += std::lgamma(alpha[k] + static_cast<double>(s.n[x][k])) -
            std::lgamma(alpha[k]);
    }
    lp += std::lgamma(a0) -
          std::lgamma(a0 + static_cast<double>(s.obs[x].size()));
  }
  for (int j = 0; j < s.p; ++j) {
    const double b0 = cfg.beta[j] * static_cast<double>(s.dims[j + 1]);
    for (std::int32_t k = 0; k < s.k_dims[j]; ++k) {
      std::int64_t rowtot = 0;
      for (std::int32_t v = 0; v < s.dims[j + 1]; ++v) {
        const std::int64_t c = s.m[j][k][v];
        rowtot += c;
        if (c > 0)
          lp += std::lgamma(cfg.beta[j] + static_cast<double>(c)) -
                std::lgamma(cfg.beta[j]);
      }
      lp += std::lgamma(b0) - std::lgamma(b0 + static_cast<double>(rowtot));
    }
  }
  return lp;
}

std::vector<std::vector<std::vector<double>>> psi_mean(const DecompositionState& s,
                                                       const ModelConfig& cfg) {
  std::vector<std::vector<std::vector<double>>> out(s.p);
  for (int j = 0; j < s.p; ++j) {
    out[j].resize(s.k_dims[j]);
    const double b0 = cfg.beta[j] * static_cast<double>(s.dims[j + 1]);
    for (std::int32_t k = 0; k < s.k_dims[j]; ++k) {
      std::int64_t rowtot = 0;
      for (auto c : s.m[j][k]) rowtot += c;
      out[j][k].resize(s.dims[j + 1]);
      for (std::int32_t v = 0; v < s.dims[j + 1]; ++v)
        out[j][k][v] = (cfg.beta[j] + static_cast<double>(s.m[j][k][v])) /
                       (b0 + static_cast<double>(rowtot));
    }
  }
  return out;
}

std::vector<std::vector<double>> phi_mean(const DecompositionState& s,
                                          const ModelConfig& cfg) {
  const auto alpha = alpha_flat(cfg, s.kmap.total());
  std::vector<std::vector<double>> out(s.dims[0],
                                       std::vector<double>(s.kmap.total(), 0.0));
  for (std::int32_t x = 0; x < s.dims[0]; ++x) {
    std::vector<std::int64_t> sup = s.support[x];
    if (sup.empty()) {
      sup.resize(s.kmap.total());
      std::iota(sup.begin(), sup.end(), 0);
    }
    double tot = 0.0;
    for (auto k : sup) tot += alpha[k] + static_cast<double>(s.n[x][k]);
    for (auto k : sup)
      out[x][k] = (alpha[k] + static_cast<double>(s.n[x][k])) / tot;
  }
  return out;
}

}  // namespace hbtd
