#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "hbtd/evaluation.hpp"
#include "hbtd/model.hpp"
#include "test_util.hpp"

using namespace hbtd;
namespace tt = hbtd::test;

namespace {

PosteriorDraw flat_draw(const ModelConfig& cfg,
                        std::vector<std::vector<std::vector<double>>> psi) {
  PosteriorDraw d;
  d.layout = TopicLayout::dense(cfg.k_dims);
  d.k_dims = cfg.k_dims;
  d.psi = std::move(psi);
  const TopicIndexMap kmap(cfg.k_dims);
  d.phi.assign(cfg.dims[0],
               std::vector<double>(kmap.total(), 1.0 / kmap.total()));
  d.support.assign(cfg.dims[0], {});
  d.z.assign(cfg.dims[0], {});
  return d;
}

}  // namespace

TEST_CASE("single multinomial pseudo-sample gives 2 log 1/2") {
  ModelConfig cfg = tt::flat_config({1, 2}, {1});
  const CountTensor heldout = tt::make_tensor({1, 2}, {{{0, 0}, 1}, {{0, 1}, 1}});
  EvalConfig ecfg;
  ecfg.G = 1;
  const auto d = flat_draw(cfg, {{{0.5, 0.5}}});
  const EvalResult r = empirical_log_likelihood(cfg, d, nullptr, heldout, ecfg);
  REQUIRE(r.per_sample.size() == 1);
  CHECK(r.per_sample[0] == doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-12));
  CHECK(r.total == doctest::Approx(r.per_sample[0]).epsilon(1e-12));
}

TEST_CASE("empty held-out samples contribute zero") {
  ModelConfig cfg = tt::flat_config({2, 2}, {1});
  const CountTensor heldout = tt::make_tensor({2, 2}, {{{0, 0}, 3}});
  EvalConfig ecfg;
  ecfg.G = 4;
  const auto d = flat_draw(cfg, {{{0.5, 0.5}}});
  const EvalResult r = empirical_log_likelihood(cfg, d, nullptr, heldout, ecfg);
  CHECK(r.per_sample[1] == 0.0);
  CHECK(r.total == doctest::Approx(r.per_sample[0]).epsilon(1e-12));
}

TEST_CASE("zero-probability tuples are floored at epsilon") {
  ModelConfig cfg = tt::flat_config({1, 2}, {1});
  const CountTensor heldout = tt::make_tensor({1, 2}, {{{0, 1}, 1}});
  EvalConfig ecfg;
  ecfg.G = 3;
  const auto d = flat_draw(cfg, {{{1.0, 0.0}}});  // one-hot row misses feature 2
  const EvalResult r = empirical_log_likelihood(cfg, d, nullptr, heldout, ecfg);
  CHECK(std::isfinite(r.per_sample[0]));
  CHECK(r.per_sample[0] == doctest::Approx(std::log(ecfg.epsilon)).epsilon(1e-9));
}

TEST_CASE("evaluation seeds are reproducible") {
  ModelConfig cfg = tt::flat_config({2, 3, 3}, {2, 2});
  cfg.lambda = {10, 10};
  const Generated g = generate(cfg, 4);
  cfg.sampler.burn_in = 2;
  cfg.sampler.total_sweeps = 10;
  cfg.sampler.thin = 2;
  const FitResult fr = fit(cfg, g.counts);
  EvalConfig ecfg;
  ecfg.G = 50;
  ecfg.seed = 5;
  const auto a =
      empirical_log_likelihood(cfg, fr.draws.back(), nullptr, g.counts, ecfg);
  const auto b =
      empirical_log_likelihood(cfg, fr.draws.back(), nullptr, g.counts, ecfg);
  CHECK(a.total == b.total);
  ecfg.seed = 6;
  const auto c =
      empirical_log_likelihood(cfg, fr.draws.back(), nullptr, g.counts, ecfg);
  CHECK(a.total != c.total);
}

TEST_CASE("dimension mismatches are data errors") {
  ModelConfig cfg = tt::flat_config({1, 3}, {2});
  const CountTensor heldout = tt::make_tensor({1, 2}, {{{0, 0}, 1}});
  EvalConfig ecfg;
  const auto d = flat_draw(cfg, {{{0.4, 0.3, 0.3}, {0.2, 0.2, 0.6}}});
  CHECK_THROWS_AS(empirical_log_likelihood(cfg, d, nullptr, heldout, ecfg),
                  DataError);
}

TEST_CASE("hierarchical evaluation uses the trained hierarchy") {
  ModelConfig cfg;
  cfg.p = 2;
  cfg.dims = {4, 3, 3};
  cfg.hierarchy = HierarchyKind::trees;
  cfg.levels = {2, 2};
  cfg.beta = {1.0, 1.0};
  cfg.lambda = {8};
  cfg.sampler.burn_in = 2;
  cfg.sampler.total_sweeps = 10;
  cfg.sampler.thin = 2;
  const Generated g = generate(cfg, 8);
  const FitResult fr = fit(cfg, g.counts);
  EvalConfig ecfg;
  ecfg.G = 20;
  const EvalResult r = empirical_log_likelihood(
      cfg, fr.draws.back(), fr.chains[0]->hierarchy(), g.counts, ecfg);
  CHECK(std::isfinite(r.total));
  CHECK(r.total < 0.0);
}

TEST_CASE("fold assignment partitions the non-test samples") {
  EvalConfig ecfg;
  ecfg.folds = 4;
  ecfg.seed = 9;
  std::vector<std::int32_t> test;
  const auto folds = cv_fold_assignment(20, ecfg, &test);
  REQUIRE(folds.size() == 20);
  CHECK(test.size() == 6);  // 30% of 20
  std::vector<int> per_fold(4, 0);
  for (std::int32_t x = 0; x < 20; ++x) {
    const bool is_test =
        std::find(test.begin(), test.end(), x) != test.end();
    if (is_test) {
      CHECK(folds[x] == -1);
    } else {
      REQUIRE(folds[x] >= 0);
      REQUIRE(folds[x] < 4);
      per_fold[folds[x]] += 1;
    }
  }
  int lo = 99, hi = 0;
  for (int c : per_fold) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(hi - lo <= 1);

  // depends only on (seed, number of samples)
  const auto again = cv_fold_assignment(20, ecfg, nullptr);
  CHECK(again == folds);
  ecfg.seed = 10;
  CHECK(cv_fold_assignment(20, ecfg, nullptr) != folds);
}

TEST_CASE("cross_validate emits the expected schema") {
  ModelConfig cfg = tt::flat_config({24, 4, 3}, {2, 2});
  cfg.lambda = {15};
  const Generated g = generate(cfg, 17);
  cfg.sampler.burn_in = 2;
  cfg.sampler.total_sweeps = 8;
  cfg.sampler.thin = 2;
  EvalConfig ecfg;
  ecfg.G = 20;
  ecfg.folds = 3;
  const auto rows = cross_validate(g.counts, {cfg}, ecfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].topic_model == "tucker");
  CHECK(rows[0].gene_topics == 2);
  CHECK(rows[0].pathway_topics == 2);
  CHECK(rows[0].total_topics == rows[0].gene_topics * rows[0].pathway_topics);
  CHECK(std::isfinite(rows[0].mean));
  CHECK(rows[0].stdev >= 0.0);

  const auto dir = tt::scratch_dir("cv_out");
  write_cv_csv(rows, (dir / "cv.csv").string());
  std::istringstream in(tt::slurp(dir / "cv.csv"));
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "topic_model,dominant_mode,topic_set,gamma,tau,levels,mean,stdev,"
        "gene_topics,pathway_topics,total_topics");
  std::string row;
  REQUIRE(std::getline(in, row));
  CHECK(row.find("tucker") == 0);

  write_plot_json(rows, (dir / "plot.json").string());
  const std::string js = tt::slurp(dir / "plot.json");
  CHECK(js.find("total_topics") != std::string::npos);
  CHECK(js.find("label") != std::string::npos);
}

TEST_CASE("cross_validate is deterministic and rejects undersized pools") {
  ModelConfig cfg = tt::flat_config({24, 3, 3}, {2, 2});
  cfg.lambda = {10};
  const Generated g = generate(cfg, 19);
  cfg.sampler.burn_in = 1;
  cfg.sampler.total_sweeps = 4;
  cfg.sampler.thin = 1;
  EvalConfig ecfg;
  ecfg.G = 10;
  ecfg.folds = 3;
  const auto a = cross_validate(g.counts, {cfg}, ecfg);
  const auto b = cross_validate(g.counts, {cfg}, ecfg);
  CHECK(a[0].mean == b[0].mean);
  CHECK(a[0].stdev == b[0].stdev);

  EvalConfig bad = ecfg;
  bad.folds = 20;  // only ~17 train samples remain
  CHECK_THROWS_AS(cross_validate(g.counts, {cfg}, bad), DataError);
}

TEST_CASE("eval config bounds are validated") {
  EvalConfig e;
  e.G = 0;
  CHECK_THROWS(e.validate());
  e.G = 1;
  e.folds = 1;
  CHECK_THROWS(e.validate());
  e.folds = 2;
  e.heldout_fraction = 1.0;
  CHECK_THROWS(e.validate());
  e.heldout_fraction = 0.3;
  CHECK_NOTHROW(e.validate());
}
