#include "hbtd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace hbtd {

void EvalConfig::validate() const {
  if (G < 1) throw ConfigError("G must be >= 1");
  if (epsilon <= 0.0) throw ConfigError("epsilon must be > 0");
  if (heldout_fraction <= 0.0 || heldout_fraction >= 1.0)
    throw ConfigError("heldout_fraction must be in (0, 1)");
  if (folds < 2) throw ConfigError("folds must be >= 2");
}

namespace {

double logsumexp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// flat topic-tuple ids composed from per-mode dense topic lists
std::vector<std::int64_t> compose_flat(
    const std::vector<std::vector<int>>& dense, const TopicIndexMap& kmap,
    Composition comp) {
  const int p = static_cast<int>(dense.size());
  std::vector<std::int64_t> out;
  IndexTuple t(p);
  if (comp == Composition::level) {
    for (std::size_t l = 0; l < dense[0].size(); ++l) {
      for (int j = 0; j < p; ++j) t[j] = dense[j][l];
      out.push_back(kmap.flat(t));
    }
  } else {
    std::vector<std::size_t> it(p, 0);
    for (;;) {
      for (int j = 0; j < p; ++j) t[j] = dense[j][it[j]];
      out.push_back(kmap.flat(t));
      int j = 0;
      while (j < p && ++it[j] == dense[j].size()) it[j++] = 0;
      if (j == p) break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

EvalResult empirical_log_likelihood(const ModelConfig& cfg,
                                    const PosteriorDraw& draw,
                                    const HierarchyState* trained_hierarchy,
                                    const CountTensor& heldout,
                                    const EvalConfig& ecfg) {
  ecfg.validate();
  if (heldout.p() != cfg.p)
    throw DataError("held-out tensor arity does not match the model");
  for (int j = 0; j < cfg.p; ++j) {
    if (draw.psi[j].empty() ||
        static_cast<std::int32_t>(draw.psi[j][0].size()) !=
            heldout.dims()[j + 1])
      throw DataError("psi dimensions do not match the held-out tensor");
  }

  const TopicIndexMap kmap(draw.k_dims);
  const auto alpha = alpha_flat(cfg, kmap.total());
  const std::int32_t d0 = heldout.num_samples();

  // distinct observed feature tuples and per-sample (tuple, count) lists
  std::map<IndexTuple, std::size_t> tuple_idx;
  std::vector<IndexTuple> tuples;
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> rows(d0);
  for (const auto& [idx, b] : heldout.entries()) {
    IndexTuple v(idx.begin() + 1, idx.end());
    auto [it, inserted] = tuple_idx.emplace(v, tuples.size());
    if (inserted) tuples.push_back(v);
    rows[idx[0]].emplace_back(it->second, b);
  }

  Rng rng = Rng::substream(ecfg.seed, 0);
  std::vector<std::vector<double>> terms(d0, std::vector<double>(ecfg.G, 0.0));
  std::vector<std::int64_t> full(kmap.total());
  std::iota(full.begin(), full.end(), 0);

  for (int g = 0; g < ecfg.G; ++g) {
    std::vector<std::int64_t> sup;
    if (trained_hierarchy) {
      const auto visited = trained_hierarchy->predictive_visited(rng);
      std::vector<std::vector<int>> dense(cfg.p);
      for (int j = 0; j < cfg.p; ++j)
        for (int id : visited[j]) dense[j].push_back(draw.layout.to_dense[j].at(id));
      sup = compose_flat(dense, kmap, cfg.composition);
    } else {
      sup = full;
    }
    std::vector<double> a(sup.size());
    for (std::size_t s = 0; s < sup.size(); ++s) a[s] = alpha[sup[s]];
    const auto phi = rng.dirichlet(a);

    std::vector<double> logpi(tuples.size());
    for (std::size_t v = 0; v < tuples.size(); ++v) {
      double pi = 0.0;
      for (std::size_t s = 0; s < sup.size(); ++s) {
        const IndexTuple kt = kmap.tuple(sup[s]);
        double w = phi[s];
        for (int j = 0; j < cfg.p; ++j) w *= draw.psi[j][kt[j]][tuples[v][j]];
        pi += w;
      }
      logpi[v] = std::log(std::max(pi, ecfg.epsilon));
    }
    for (std::int32_t x = 0; x < d0; ++x) {
      double t = 0.0;
      for (const auto& [v, b] : rows[x]) t += static_cast<double>(b) * logpi[v];
      terms[x][g] = t;
    }
  }

  EvalResult out;
  out.per_sample.resize(d0);
  const double logG = std::log(static_cast<double>(ecfg.G));
  for (std::int32_t x = 0; x < d0; ++x) {
    out.per_sample[x] = logsumexp(terms[x]) - logG;
    out.total += out.per_sample[x];
  }
  return out;
}

std::vector<int> cv_fold_assignment(std::int32_t num_samples,
                                    const EvalConfig& ecfg,
                                    std::vector<std::int32_t>* test_out) {
  Rng rng = Rng::substream(ecfg.seed, static_cast<std::uint64_t>(num_samples));
  std::vector<std::int32_t> perm(num_samples);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::int32_t i = num_samples - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.uniform_below(static_cast<std::uint64_t>(i + 1))]);

  const auto tc = static_cast<std::int32_t>(
      std::llround(ecfg.heldout_fraction * num_samples));
  std::vector<int> fold(num_samples, -1);
  for (std::int32_t i = tc; i < num_samples; ++i)
    fold[perm[i]] = static_cast<int>((i - tc) % ecfg.folds);
  if (test_out) {
    test_out->clear();
    for (std::int32_t i = 0; i < tc; ++i) test_out->push_back(perm[i]);
    std::sort(test_out->begin(), test_out->end());
  }
  return fold;
}

namespace {

CountTensor subset(const CountTensor& t, const std::vector<std::int32_t>& keep) {
  std::map<std::int32_t, std::int32_t> remap;
  for (std::size_t i = 0; i < keep.size(); ++i)
    remap[keep[i]] = static_cast<std::int32_t>(i);
  auto dims = t.dims();
  dims[0] = static_cast<std::int32_t>(keep.size());
  CountTensor out(t.p(), dims);
  for (const auto& [idx, b] : t.entries()) {
    const auto it = remap.find(idx[0]);
    if (it == remap.end()) continue;
    IndexTuple nidx = idx;
    nidx[0] = it->second;
    out.add(nidx, b);
  }
  return out;
}

std::string join_ints(const std::vector<int>& v, const char* sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
  return os.str();
}

std::string model_label(const ModelConfig& cfg) {
  switch (cfg.hierarchy) {
    case HierarchyKind::none:
      return "F";
    case HierarchyKind::trees:
      return "T^" + join_ints(cfg.levels, ",");
    case HierarchyKind::pam: {
      std::string dom = cfg.dominant_mode == 1   ? "G"
                        : cfg.dominant_mode == 2 ? "P"
                                                 : std::to_string(cfg.dominant_mode);
      return "P^" + std::to_string(cfg.levels[0]) + "_" + dom +
             (cfg.composition == Composition::cartesian ? "C" : "L");
    }
  }
  return "?";
}

}  // namespace

std::vector<CvRow> cross_validate(const CountTensor& t,
                                  const std::vector<ModelConfig>& cfgs,
                                  const EvalConfig& ecfg) {
  ecfg.validate();
  const std::int32_t d0 = t.num_samples();
  std::vector<std::int32_t> test;
  const auto fold = cv_fold_assignment(d0, ecfg, &test);
  const std::int32_t pool = d0 - static_cast<std::int32_t>(test.size());
  if (pool < ecfg.folds)
    throw DataError("too few samples for " + std::to_string(ecfg.folds) +
                    " folds after the held-out split");

  std::vector<CvRow> rows;
  for (const auto& base : cfgs) {
    std::vector<double> totals;
    std::vector<double> gsum, psum;
    for (int f = 0; f < ecfg.folds; ++f) {
      std::vector<std::int32_t> train_ids, val_ids;
      for (std::int32_t x = 0; x < d0; ++x) {
        if (fold[x] < 0) continue;
        (fold[x] == f ? val_ids : train_ids).push_back(x);
      }
      const CountTensor train = subset(t, train_ids);
      const CountTensor val = subset(t, val_ids);

      ModelConfig cfg = base;
      cfg.dims[0] = train.num_samples();
      const FitResult fr = fit(cfg, train);
      const auto& chain = *fr.chains.front();
      const PosteriorDraw draw = chain.snapshot(0, cfg.sampler.total_sweeps);

      const EvalResult ev = empirical_log_likelihood(
          cfg, draw, chain.hierarchy(), val, ecfg);
      totals.push_back(ev.total);

      const double g = static_cast<double>(draw.k_dims[0]);
      double pw = 1.0;
      for (std::size_t j = 1; j < draw.k_dims.size(); ++j)
        pw *= static_cast<double>(draw.k_dims[j]);
      gsum.push_back(g);
      psum.push_back(pw);
    }

    CvRow row;
    row.topic_model = base.hierarchy == HierarchyKind::none ? "tucker"
                      : base.hierarchy == HierarchyKind::trees
                          ? "independent_trees"
                          : "pam";
    row.label = model_label(base);
    row.dominant_mode =
        base.hierarchy == HierarchyKind::pam ? base.dominant_mode : 0;
    row.topic_set = base.hierarchy == HierarchyKind::none
                        ? "-"
                        : (base.composition == Composition::cartesian
                               ? "cartesian"
                               : "level");
    row.gamma = base.gamma;
    if (base.hierarchy == HierarchyKind::pam) {
      std::ostringstream os;
      for (std::size_t l = 0; l < base.tau.size(); ++l)
        os << (l ? ";" : "") << join_ints(base.tau[l], " ");
      row.tau = os.str();
    }
    row.levels = join_ints(base.levels, " ");
    const double n = static_cast<double>(totals.size());
    row.mean = std::accumulate(totals.begin(), totals.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : totals) ss += (v - row.mean) * (v - row.mean);
    row.stdev = std::sqrt(ss / (n - 1.0));
    row.gene_topics = std::llround(
        std::accumulate(gsum.begin(), gsum.end(), 0.0) / n);
    row.pathway_topics = std::llround(
        std::accumulate(psum.begin(), psum.end(), 0.0) / n);
    row.total_topics = row.gene_topics * row.pathway_topics;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_cv_csv(const std::vector<CvRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "topic_model,dominant_mode,topic_set,gamma,tau,levels,mean,stdev,"
         "gene_topics,pathway_topics,total_topics\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.topic_model << ',' << r.dominant_mode << ',' << r.topic_set << ','
        << r.gamma << ',' << r.tau << ',' << r.levels << ',' << r.mean << ','
        << r.stdev << ',' << r.gene_topics << ',' << r.pathway_topics << ','
        << r.total_topics << '\n';
  }
}

void write_plot_json(const std::vector<CvRow>& rows, const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"label", r.label},
                   {"topic_model", r.topic_model},
                   {"total_topics", r.total_topics},
                   {"mean", r.mean},
                   {"stdev", r.stdev}});
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << arr.dump(2) << '\n';
}

}  // namespace hbtd
