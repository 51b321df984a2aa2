#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "hbtd/gibbs.hpp"
#include "test_util.hpp"

using namespace hbtd;
namespace tt = hbtd::test;

namespace {

// builds the flat decomposition state for one full z assignment so the
// integrated joint can be evaluated independently of the chain internals
double joint_of(const ModelConfig& cfg, const CountTensor& data,
                const std::vector<std::vector<std::int64_t>>& z) {
  DecompositionState s;
  s.p = cfg.p;
  s.dims = cfg.dims;
  s.k_dims = cfg.k_dims;
  s.kmap = TopicIndexMap(cfg.k_dims);
  s.obs = expand_observations(data);
  s.z = z;
  s.support.assign(cfg.dims[0], {});
  recompute_stats(s);
  return log_collapsed_joint(s, cfg);
}

void enumerate_z(const std::vector<std::size_t>& item_counts, std::int64_t K,
                 const std::function<void(
                     const std::vector<std::vector<std::int64_t>>&)>& fn) {
  std::vector<std::vector<std::int64_t>> z(item_counts.size());
  for (std::size_t x = 0; x < item_counts.size(); ++x)
    z[x].assign(item_counts[x], 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t x,
                                                          std::size_t i) {
    if (x == z.size()) {
      fn(z);
      return;
    }
    if (i == z[x].size()) {
      rec(x + 1, 0);
      return;
    }
    for (std::int64_t k = 0; k < K; ++k) {
      z[x][i] = k;
      rec(x, i + 1);
    }
  };
  rec(0, 0);
}

}  // namespace

TEST_CASE("collapsed conditional equals integrated-joint ratios exhaustively") {
  ModelConfig cfg = tt::flat_config({1, 2, 2}, {2, 2});
  cfg.alpha = 0.7;
  cfg.beta = {0.5, 1.25};
  const CountTensor data = tt::make_tensor(
      {1, 2, 2}, {{{0, 0, 0}, 1}, {{0, 0, 1}, 1}, {{0, 1, 1}, 1}});
  GibbsChain chain(cfg, data);
  Rng rng(1);
  chain.init(rng);

  double max_err = 0.0;
  enumerate_z({3}, 4, [&](const std::vector<std::vector<std::int64_t>>& z) {
    chain.force_z(z);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto cond = chain.conditional_z(0, i);
      std::vector<double> lp(4);
      auto zz = z;
      for (std::int64_t k = 0; k < 4; ++k) {
        zz[0][i] = k;
        lp[k] = joint_of(cfg, data, zz);
      }
      const double lmax = *std::max_element(lp.begin(), lp.end());
      double tot = 0.0;
      for (auto& v : lp) {
        v = std::exp(v - lmax);
        tot += v;
      }
      for (std::int64_t k = 0; k < 4; ++k)
        max_err = std::max(max_err, std::fabs(cond[k] - lp[k] / tot));
    }
  });
  CHECK(max_err <= 1e-10);
}

TEST_CASE("first observation sees a uniform conditional under symmetry") {
  ModelConfig cfg = tt::flat_config({1, 2, 2}, {2, 2});
  const CountTensor data = tt::make_tensor({1, 2, 2}, {{{0, 0, 0}, 1}});
  GibbsChain chain(cfg, data);
  Rng rng(1);
  chain.init(rng);
  const auto cond = chain.conditional_z(0, 0);
  for (double v : cond) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("collapsed weights match the worked single-mode example") {
  // held-out stats n = (2,0), m_k1 = (3,1), m_k2 = (0,0), observed y = 1:
  // unnormalized (3*3.5/5, 1*0.5/1) -> (0.8077, 0.1923)
  ModelConfig cfg = tt::flat_config({2, 2}, {2});
  cfg.beta = {0.5};
  const CountTensor data = tt::make_tensor(
      {2, 2}, {{{0, 0}, 2}, {{1, 0}, 2}, {{1, 1}, 1}});
  GibbsChain chain(cfg, data);
  Rng rng(1);
  chain.init(rng);
  chain.force_z({{0, 0}, {0, 0, 0}});
  const auto cond = chain.conditional_z(1, 0);
  CHECK(cond[0] == doctest::Approx(0.8077).epsilon(1e-4));
  CHECK(cond[1] == doctest::Approx(0.1923).epsilon(1e-4));
}

TEST_CASE("single-topic posterior psi is the smoothed empirical frequency") {
  ModelConfig cfg = tt::flat_config({2, 3}, {1});
  cfg.beta = {2.0};
  cfg.sampler.burn_in = 1;
  cfg.sampler.total_sweeps = 5;
  cfg.sampler.thin = 1;
  const CountTensor data = tt::make_tensor(
      {2, 3}, {{{0, 0}, 3}, {{0, 2}, 1}, {{1, 1}, 2}});
  const FitResult r = fit(cfg, data);
  REQUIRE_FALSE(r.draws.empty());
  const std::vector<double> expect = {(2.0 + 3.0) / 12.0, (2.0 + 2.0) / 12.0,
                                      (2.0 + 1.0) / 12.0};
  for (const auto& draw : r.draws)
    for (int v = 0; v < 3; ++v)
      CHECK(draw.psi[0][0][v] == doctest::Approx(expect[v]).epsilon(1e-12));
}

TEST_CASE("fits are deterministic per seed") {
  ModelConfig cfg = tt::flat_config({3, 3, 3}, {2, 2});
  cfg.lambda = {12};
  cfg.sampler.burn_in = 5;
  cfg.sampler.total_sweeps = 25;
  cfg.sampler.thin = 5;
  cfg.sampler.seed = 42;
  const Generated g = generate(cfg, 2);
  const FitResult a = fit(cfg, g.counts);
  const FitResult b = fit(cfg, g.counts);
  REQUIRE(a.diagnostics.size() == b.diagnostics.size());
  for (std::size_t i = 0; i < a.diagnostics.size(); ++i)
    CHECK(a.diagnostics[i].log_score == b.diagnostics[i].log_score);
  REQUIRE(a.draws.size() == b.draws.size());
  for (std::size_t i = 0; i < a.draws.size(); ++i) CHECK(a.draws[i].z == b.draws[i].z);

  ModelConfig other = cfg;
  other.sampler.seed = 43;
  const FitResult c = fit(other, g.counts);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.diagnostics.size(); ++i)
    any_diff = any_diff || a.diagnostics[i].log_score != c.diagnostics[i].log_score;
  CHECK(any_diff);
}

TEST_CASE("multi-chain output ordering is stable") {
  ModelConfig cfg = tt::flat_config({2, 2, 2}, {2, 2});
  cfg.lambda = {6};
  cfg.sampler.burn_in = 2;
  cfg.sampler.total_sweeps = 10;
  cfg.sampler.thin = 2;
  cfg.sampler.chains = 3;
  const Generated g = generate(cfg, 3);
  const FitResult a = fit(cfg, g.counts);
  const FitResult b = fit(cfg, g.counts);
  REQUIRE(a.draws.size() == b.draws.size());
  for (std::size_t i = 0; i < a.draws.size(); ++i) {
    CHECK(a.draws[i].chain == b.draws[i].chain);
    CHECK(a.draws[i].sweep == b.draws[i].sweep);
    CHECK(a.draws[i].z == b.draws[i].z);
  }
  // chains are ordered, sweeps ascending within a chain
  for (std::size_t i = 1; i < a.draws.size(); ++i)
    CHECK((a.draws[i].chain > a.draws[i - 1].chain ||
           a.draws[i].sweep > a.draws[i - 1].sweep));
}

TEST_CASE("audits stay clean across sweeps for every model family") {
  auto run = [](ModelConfig cfg, std::uint64_t seed) {
    cfg.lambda = {8};
    const Generated g = generate(cfg, seed);
    GibbsChain chain(cfg, g.counts);
    Rng rng(seed + 1);
    chain.init(rng);
    std::string why;
    REQUIRE_MESSAGE(chain.audit(&why), why);
    for (int s = 0; s < 30; ++s) {
      chain.sweep(rng);
      REQUIRE_MESSAGE(chain.audit(&why), why);
      CHECK(std::isfinite(chain.log_score()));
      CHECK(chain.active_topics() >= 1);
    }
  };

  SUBCASE("flat collapsed") { run(tt::flat_config({3, 3, 3}, {2, 2}), 1); }
  SUBCASE("flat non-collapsed") {
    ModelConfig cfg = tt::flat_config({3, 3, 3}, {2, 2});
    cfg.sampler.variant = SamplerVariant::noncollapsed;
    run(cfg, 2);
  }
  SUBCASE("independent trees") {
    ModelConfig cfg;
    cfg.p = 2;
    cfg.dims = {4, 3, 3};
    cfg.hierarchy = HierarchyKind::trees;
    cfg.levels = {2, 2};
    cfg.beta = {1.0, 1.0};
    run(cfg, 3);
  }
  SUBCASE("pam collapsed") {
    ModelConfig cfg;
    cfg.p = 2;
    cfg.dims = {4, 3, 3};
    cfg.hierarchy = HierarchyKind::pam;
    cfg.levels = {2};
    cfg.tau = {{1, 2}, {2, 2}};
    cfg.mode_deps = {{1, 2}};
    cfg.beta = {1.0, 1.0};
    run(cfg, 4);
  }
  SUBCASE("pam non-collapsed, level composition") {
    ModelConfig cfg;
    cfg.p = 2;
    cfg.dims = {4, 3, 3};
    cfg.hierarchy = HierarchyKind::pam;
    cfg.levels = {2};
    cfg.tau = {{1, 2}, {2, 2}};
    cfg.mode_deps = {{1, 2}};
    cfg.composition = Composition::level;
    cfg.sampler.variant = SamplerVariant::noncollapsed;
    cfg.beta = {1.0, 1.0};
    run(cfg, 5);
  }
  SUBCASE("mixed p = 3") {
    ModelConfig cfg;
    cfg.p = 3;
    cfg.dims = {4, 3, 3, 3};
    cfg.hierarchy = HierarchyKind::pam;
    cfg.levels = {2};
    cfg.tau = {{1, 1, 2}, {2, 1, 2}};
    cfg.independent_modes = {2};
    cfg.mode_deps = {{1, 3}};
    cfg.beta = {1.0, 1.0, 1.0};
    run(cfg, 6);
  }
}

TEST_CASE("unsupported combinations are rejected") {
  const CountTensor data = tt::make_tensor({2, 2, 2}, {{{0, 0, 0}, 1}});
  ModelConfig trees;
  trees.p = 2;
  trees.dims = {2, 2, 2};
  trees.hierarchy = HierarchyKind::trees;
  trees.levels = {2, 2};
  trees.beta = {1.0, 1.0};
  trees.sampler.variant = SamplerVariant::noncollapsed;
  CHECK_THROWS_AS(GibbsChain(trees, data), ConfigError);

  trees.sampler.variant = SamplerVariant::collapsed;
  trees.alpha_full = {1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(GibbsChain(trees, data), ConfigError);

  ModelConfig flat = tt::flat_config({3, 2, 2}, {2, 2});
  CHECK_THROWS_AS(GibbsChain(flat, data), DataError);
}

TEST_CASE("snapshots materialize a consistent dense view") {
  ModelConfig cfg;
  cfg.p = 2;
  cfg.dims = {4, 3, 3};
  cfg.hierarchy = HierarchyKind::trees;
  cfg.levels = {2, 2};
  cfg.beta = {1.0, 1.0};
  cfg.lambda = {7};
  const Generated g = generate(cfg, 12);
  GibbsChain chain(cfg, g.counts);
  Rng rng(9);
  chain.init(rng);
  for (int s = 0; s < 10; ++s) chain.sweep(rng);
  const PosteriorDraw draw = chain.snapshot(0, 10);
  const TopicIndexMap kmap(draw.k_dims);
  for (int j = 0; j < 2; ++j)
    for (const auto& row : draw.psi[j])
      CHECK(std::accumulate(row.begin(), row.end(), 0.0) ==
            doctest::Approx(1.0).epsilon(1e-9));
  for (int x = 0; x < 4; ++x) {
    CHECK(std::accumulate(draw.phi[x].begin(), draw.phi[x].end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::is_sorted(draw.support[x].begin(), draw.support[x].end()));
    for (auto f : draw.z[x]) {
      CHECK(f >= 0);
      CHECK(f < kmap.total());
      CHECK(std::binary_search(draw.support[x].begin(), draw.support[x].end(), f));
    }
    for (auto f : draw.support[x]) CHECK(draw.phi[x][f] > 0.0);
  }
}

TEST_CASE("identical samples with a sharp likelihood share a tree leaf") {
  // both samples emit only feature 0; with beta = 0.01 the marginal strongly
  // favors pooling their counts in one leaf
  ModelConfig cfg;
  cfg.p = 1;
  cfg.dims = {2, 4};
  cfg.hierarchy = HierarchyKind::trees;
  cfg.levels = {2};
  cfg.beta = {0.01};
  cfg.gamma = 1.0;
  const CountTensor data = tt::make_tensor({2, 4}, {{{0, 0}, 6}, {{1, 0}, 6}});
  GibbsChain chain(cfg, data);
  Rng rng(15);
  chain.init(rng);
  int shared = 0, total = 0;
  for (int s = 0; s < 400; ++s) {
    chain.sweep(rng);
    if (s < 100) continue;  // burn in
    const auto* h = chain.hierarchy();
    shared += h->tree_path(0, 1)[1] == h->tree_path(1, 1)[1] ? 1 : 0;
    total += 1;
  }
  CHECK(static_cast<double>(shared) / total > 0.6);
}
