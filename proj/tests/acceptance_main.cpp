#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "hbtd/count_tensor.hpp"
#include "hbtd/evaluation.hpp"
#include "hbtd/gibbs.hpp"
#include "hbtd/model.hpp"
#include "hbtd/properties.hpp"
#include "hbtd/rng.hpp"

using namespace hbtd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ModelConfig flat_config(std::vector<std::int32_t> dims,
                        std::vector<std::int32_t> k_dims) {
  ModelConfig cfg;
  cfg.p = static_cast<int>(k_dims.size());
  cfg.dims = std::move(dims);
  cfg.k_dims = std::move(k_dims);
  cfg.beta.assign(cfg.p, 1.0);
  return cfg;
}

// two samples, two counts each, one feature mode with two values
CountTensor small_instance() {
  CountTensor t(1, {2, 2});
  t.add({0, 0}, 2);
  t.add({1, 0}, 1);
  t.add({1, 1}, 1);
  return t;
}

double joint_of(const ModelConfig& cfg, const CountTensor& data,
                const std::vector<std::vector<std::int64_t>>& z) {
  DecompositionState s;
  s.p = cfg.p;
  s.dims = data.dims();
  s.k_dims = cfg.k_dims;
  s.kmap = TopicIndexMap(cfg.k_dims);
  s.obs = expand_observations(data);
  s.z = z;
  s.support.assign(data.num_samples(), {});
  recompute_stats(s);
  return log_collapsed_joint(s, cfg);
}

// exact posterior over every full assignment of the small instance
std::vector<double> exact_posterior_16(const ModelConfig& cfg,
                                       const CountTensor& data) {
  std::vector<double> lp(16);
  for (int code = 0; code < 16; ++code) {
    const std::vector<std::vector<std::int64_t>> z = {
        {(code >> 0) & 1, (code >> 1) & 1}, {(code >> 2) & 1, (code >> 3) & 1}};
    lp[code] = joint_of(cfg, data, z);
  }
  const double mx = *std::max_element(lp.begin(), lp.end());
  double total = 0.0;
  for (double& v : lp) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : lp) v /= total;
  return lp;
}

double total_variation(const std::vector<double>& a,
                       const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::fabs(a[i] - b[i]);
  return 0.5 * tv;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return num / std::sqrt(va * vb);
}

// best min-row correlation over topic permutations of one mode
double best_permutation_min_corr(
    const std::vector<std::vector<double>>& est,
    const std::vector<std::vector<double>>& truth) {
  std::vector<int> perm(est.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  do {
    double mn = 1.0;
    for (std::size_t k = 0; k < est.size(); ++k)
      mn = std::min(mn, pearson(est[perm[k]], truth[k]));
    best = std::max(best, mn);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool ac1_collapsed_exactness(std::string& why) {
  const auto t0 = Clock::now();
  ModelConfig cfg = flat_config({2, 2}, {2});
  const CountTensor data = small_instance();
  const auto exact = exact_posterior_16(cfg, data);

  GibbsChain chain(cfg, data);
  Rng rng(11);
  chain.init(rng);
  const int sweeps = 1000000;
  std::vector<double> emp(16, 0.0);
  for (int s = 0; s < sweeps; ++s) {
    chain.sweep(rng);
    const auto& z = chain.z();
    const int code = static_cast<int>(z[0][0]) | (static_cast<int>(z[0][1]) << 1) |
                     (static_cast<int>(z[1][0]) << 2) |
                     (static_cast<int>(z[1][1]) << 3);
    emp[code] += 1.0;
  }
  for (double& v : emp) v /= sweeps;
  const double tv = total_variation(emp, exact);
  const double secs = seconds_since(t0);
  why = "TV " + std::to_string(tv) + ", " + std::to_string(secs) + " s";
  return tv <= 0.01 && secs < 60.0;
}

bool ac2_sampler_equivalence(std::string& why) {
  ModelConfig cfg = flat_config({2, 2}, {2});
  const CountTensor data = small_instance();
  const int sweeps = 300000;
  // empirical P(z = 1) per item under each sampler variant
  auto marginals = [&](SamplerVariant v, std::uint64_t seed) {
    ModelConfig c = cfg;
    c.sampler.variant = v;
    GibbsChain chain(c, data);
    Rng rng(seed);
    chain.init(rng);
    std::vector<double> m(4, 0.0);
    for (int s = 0; s < sweeps; ++s) {
      chain.sweep(rng);
      const auto& z = chain.z();
      m[0] += static_cast<double>(z[0][0]);
      m[1] += static_cast<double>(z[0][1]);
      m[2] += static_cast<double>(z[1][0]);
      m[3] += static_cast<double>(z[1][1]);
    }
    for (double& x : m) x /= sweeps;
    return m;
  };
  const auto mc = marginals(SamplerVariant::collapsed, 21);
  const auto mn = marginals(SamplerVariant::noncollapsed, 22);
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    worst = std::max(worst, std::fabs(mc[i] - mn[i]));
  why = "max marginal TV " + std::to_string(worst);
  return worst <= 0.02;
}

bool ac3_conditional_oracle(std::string& why) {
  ModelConfig cfg = flat_config({1, 2, 2}, {2, 2});
  cfg.alpha = 0.7;
  cfg.beta = {0.5, 1.25};
  CountTensor data(2, {1, 2, 2});
  data.add({0, 0, 0}, 1);
  data.add({0, 0, 1}, 1);
  data.add({0, 1, 1}, 1);

  GibbsChain chain(cfg, data);
  Rng rng(1);
  chain.init(rng);
  double worst = 0.0;
  std::vector<std::vector<std::int64_t>> z = {{0, 0, 0}};
  for (int code = 0; code < 64; ++code) {
    z[0][0] = code & 3;
    z[0][1] = (code >> 2) & 3;
    z[0][2] = (code >> 4) & 3;
    chain.force_z(z);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto cond = chain.conditional_z(0, i);
      std::vector<double> lp(4);
      auto zi = z;
      for (std::int64_t k = 0; k < 4; ++k) {
        zi[0][i] = k;
        lp[k] = joint_of(cfg, data, zi);
      }
      const double mx = *std::max_element(lp.begin(), lp.end());
      double tot = 0.0;
      for (double& v : lp) {
        v = std::exp(v - mx);
        tot += v;
      }
      for (std::int64_t k = 0; k < 4; ++k)
        worst = std::max(worst, std::fabs(cond[k] - lp[k] / tot));
    }
  }
  why = "max |conditional - joint ratio| " + std::to_string(worst);
  return worst <= 1e-10;
}

bool ac4_pam_partition_property(std::string& why) {
  const auto t0 = Clock::now();
  for (int n = 2; n <= 5; ++n) {
    if (!check_partition_property(AssignmentModel::pam_node({1, 1}, {1, 1}), n,
                                  PartitionFlavor::loose)
             .holds ||
        !check_partition_property(
             AssignmentModel::pam_node({Rat(1, 2), Rat(1, 2)}, {2, 2}), n,
             PartitionFlavor::loose)
             .holds) {
      why = "symmetric case failed at n = " + std::to_string(n);
      return false;
    }
  }
  const auto asym = check_partition_property(
      AssignmentModel::pam_node({1, 2}, {1, 1}), 3, PartitionFlavor::loose);
  const auto [orig, swapped] = dirichlet_swap_scores(1, 2, 1, 2);
  const double secs = seconds_since(t0);
  why = "witness " + orig.str() + " vs " + swapped.str() + ", " +
        std::to_string(secs) + " s";
  return !asym.holds && orig == Rat(1, 8) && swapped == Rat(1, 9) && secs < 10.0;
}

bool ac5_swap_witness_and_grid(std::string& why) {
  const ImpossibilityReport rep = impossibility_witness();
  why = "omega " + rep.omega.str() + ", nu " + rep.nu.str() + ", grid " +
        std::to_string(rep.grid_passing) + "/" + std::to_string(rep.grid_cells);
  return rep.omega == Rat(2, 3) && rep.nu == Rat(2, 3) && rep.witness_ok &&
         rep.grid_cells == 100 && rep.grid_passing == 0 && rep.trees_all_pass;
}

bool ac6_independent_trees(std::string& why) {
  const auto m = AssignmentModel::independent_crp(1, 1);
  for (int n = 2; n <= 5; ++n) {
    if (!check_exchangeability(m, n).holds ||
        !check_partition_property(m, n, PartitionFlavor::loose).holds ||
        !check_rich_get_richer(m, n, RgrFlavor::independent).holds) {
      why = "failed at n = " + std::to_string(n);
      return false;
    }
  }
  why = "all three checks hold for n <= 5";
  return true;
}

bool ac7_synthetic_recovery(std::string& why) {
  const auto t0 = Clock::now();
  int successes = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ModelConfig cfg = flat_config({50, 20, 15}, {3, 2});
    cfg.lambda = {200};
    const Generated g = generate(cfg, seed);
    cfg.sampler.burn_in = 200;
    cfg.sampler.total_sweeps = 400;
    cfg.sampler.thin = 20;
    cfg.sampler.seed = seed;
    const FitResult fr = fit(cfg, g.counts);

    // posterior mean of psi across retained draws
    std::vector<std::vector<std::vector<double>>> mean = fr.draws[0].psi;
    for (std::size_t d = 1; d < fr.draws.size(); ++d)
      for (std::size_t j = 0; j < mean.size(); ++j)
        for (std::size_t k = 0; k < mean[j].size(); ++k)
          for (std::size_t v = 0; v < mean[j][k].size(); ++v)
            mean[j][k][v] += fr.draws[d].psi[j][k][v];
    for (auto& modem : mean)
      for (auto& row : modem)
        for (double& v : row) v /= static_cast<double>(fr.draws.size());

    double worst = 1.0;
    for (int j = 0; j < 2; ++j)
      worst = std::min(worst,
                       best_permutation_min_corr(mean[j], g.state.psi[j]));
    if (worst >= 0.9) ++successes;
  }
  const double secs = seconds_since(t0);
  why = std::to_string(successes) + "/10 seeds, " + std::to_string(secs) + " s";
  return successes >= 8 && secs < 600.0;
}

bool ac8_evaluation_stability(std::string& why) {
  ModelConfig cfg = flat_config({100, 10, 8}, {2, 2});
  cfg.lambda = {30};
  const Generated train = generate(cfg, 3);
  const Generated heldout = generate(cfg, 4);
  cfg.sampler.burn_in = 50;
  cfg.sampler.total_sweeps = 150;
  cfg.sampler.thin = 10;
  const FitResult fr = fit(cfg, train.counts);
  EvalConfig ecfg;
  ecfg.G = 1000;
  ecfg.seed = 1;
  const auto a = empirical_log_likelihood(cfg, fr.draws.back(), nullptr,
                                          heldout.counts, ecfg);
  ecfg.seed = 2;
  const auto b = empirical_log_likelihood(cfg, fr.draws.back(), nullptr,
                                          heldout.counts, ecfg);
  const double rel = std::fabs(a.total - b.total) / std::fabs(a.total);
  why = "relative difference " + std::to_string(rel);
  return rel < 0.005;
}

int run_cli(const std::string& args) {
  const int status = std::system(
      (std::string(HBTD_BIN) + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

bool dirs_equal(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> rel;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), a));
  if (rel.empty()) {
    why = "no outputs in " + a.string();
    return false;
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  for (const auto& r : rel) {
    if (!fs::exists(b / r) || slurp(a / r) != slurp(b / r)) {
      why = "mismatch at " + r.string();
      return false;
    }
  }
  return true;
}

bool ac9_cli_determinism(std::string& why) {
  const fs::path root = "acceptance_scratch";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "m.cfg") << "schema_version = 1\n"
                                   "p = 2\n"
                                   "dims = 20 5 4\n"
                                   "topics = 2 2\n"
                                   "lambda = 15\n"
                                   "seed = 5\n"
                                   "burn_in = 2\n"
                                   "total_sweeps = 10\n"
                                   "thin = 2\n";
  const std::string cfg = (root / "m.cfg").string();
  const std::string gen = (root / "gen").string();
  if (run_cli("generate --config " + cfg + " --out-dir " + gen) != 0) {
    why = "generate failed";
    return false;
  }
  const std::string data = gen + "/counts.tsv";
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"generate", "generate --config " + cfg},
      {"fit", "fit --config " + cfg + " --data " + data},
      {"evaluate", "evaluate --config " + cfg + " --train " + data +
                       " --heldout " + data + " --pseudo-samples 50"},
      {"cv", "cv --config " + cfg + " --data " + data +
                 " --folds 3 --pseudo-samples 20 --emit-plot-data"},
      {"properties", "properties --model independent-crp --n 4"},
      {"audit", "audit --config " + cfg + " --data " + data + " --sweeps 20"},
  };
  for (const auto& [name, args] : runs) {
    const fs::path d1 = root / (name + "_1");
    const fs::path d2 = root / (name + "_2");
    if (run_cli(args + " --out-dir " + d1.string()) != 0 ||
        run_cli(args + " --out-dir " + d2.string()) != 0) {
      why = name + " exited nonzero";
      return false;
    }
    if (!dirs_equal(d1, d2, why)) {
      why = name + ": " + why;
      return false;
    }
  }
  why = "6 subcommands byte-identical";
  return true;
}

bool ac10_audit_fuzz(std::string& why) {
  std::vector<ModelConfig> cfgs;
  {
    ModelConfig c = flat_config({4, 3, 3}, {2, 2});
    cfgs.push_back(c);
    c.sampler.variant = SamplerVariant::noncollapsed;
    cfgs.push_back(c);
  }
  {
    ModelConfig c;
    c.p = 2;
    c.dims = {4, 3, 3};
    c.hierarchy = HierarchyKind::trees;
    c.levels = {2, 2};
    c.beta = {1.0, 1.0};
    cfgs.push_back(c);
  }
  {
    ModelConfig c;
    c.p = 2;
    c.dims = {4, 3, 3};
    c.hierarchy = HierarchyKind::pam;
    c.levels = {2};
    c.tau = {{1, 2}, {2, 2}};
    c.beta = {1.0, 1.0};
    cfgs.push_back(c);
  }
  int sweeps_done = 0;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    ModelConfig cfg = cfgs[i];
    cfg.lambda = {10};
    ModelConfig gen_cfg = flat_config({4, 3, 3}, {3, 3});
    gen_cfg.lambda = {10};
    const Generated g = generate(gen_cfg, 40 + i);
    GibbsChain chain(cfg, g.counts);
    Rng rng(50 + i);
    chain.init(rng);
    for (int s = 0; s < 250; ++s) {
      chain.sweep(rng);
      std::string audit_why;
      if (!chain.audit(&audit_why)) {
        why = "model " + std::to_string(i) + " sweep " + std::to_string(s) +
              ": " + audit_why;
        return false;
      }
      ++sweeps_done;
    }
  }
  why = std::to_string(sweeps_done) + " sweeps audited, zero mismatches";
  return sweeps_done == 1000;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<bool(std::string&)>>>
      criteria = {
          {"AC1 collapsed sampler matches the exact posterior", ac1_collapsed_exactness},
          {"AC2 collapsed and non-collapsed marginals agree", ac2_sampler_equivalence},
          {"AC3 conditional weights equal integrated-joint ratios", ac3_conditional_oracle},
          {"AC4 symmetric pam loose partition + asymmetric witness", ac4_pam_partition_property},
          {"AC5 exact swap witness and exhaustive grid scan", ac5_swap_witness_and_grid},
          {"AC6 independent trees pass all three properties", ac6_independent_trees},
          {"AC7 synthetic parameter recovery across seeds", ac7_synthetic_recovery},
          {"AC8 empirical likelihood stable across eval seeds", ac8_evaluation_stability},
          {"AC9 every subcommand is byte-deterministic", ac9_cli_determinism},
          {"AC10 incremental stats audit over 1000 fuzz sweeps", ac10_audit_fuzz},
      };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    std::string why;
    bool ok = false;
    try {
      ok = fn(why);
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::cout << name << ": " << (ok ? "pass" : "FAIL") << " (" << why << ")\n"
              << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
