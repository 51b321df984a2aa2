#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hbtd/config.hpp"
#include "hbtd/count_tensor.hpp"
#include "hbtd/gibbs.hpp"

namespace hbtd {

struct EvalConfig {
  int G = 1000;               // pseudo-sample count in the mixture
  double epsilon = 1e-10;     // floor for observed tuples with zero mass
  double heldout_fraction = 0.30;
  int folds = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EvalResult {
  std::vector<double> per_sample;
  double total = 0.0;
};

// Non-parametric held-out likelihood: G pseudo-samples, each a predictive
// path from the trained hierarchy plus phi_g ~ Dir(alpha) on that path's
// topic set, scored as a uniform mixture of multinomials with posterior-mean
// psi. The multinomial coefficient is dropped; it is constant across models
// on fixed data.
EvalResult empirical_log_likelihood(const ModelConfig& cfg,
                                    const PosteriorDraw& draw,
                                    const HierarchyState* trained_hierarchy,
                                    const CountTensor& heldout,
                                    const EvalConfig& ecfg);

struct CvRow {
  std::string topic_model;  // tucker | independent_trees | pam
  std::string label;        // plot label: letter^levels_subscript
  int dominant_mode = 0;    // 0 when not applicable
  std::string topic_set;    // cartesian | level | -
  double gamma = 0.0;
  std::string tau;          // semicolon-joined rows, empty when not applicable
  std::string levels;
  double mean = 0.0;        // validation log-likelihood across folds
  double stdev = 0.0;
  std::int64_t gene_topics = 0;     // first feature mode, fold average
  std::int64_t pathway_topics = 0;  // remaining modes (product), fold average
  std::int64_t total_topics = 0;    // gene_topics * pathway_topics
};

// One 30% test split (never trained on), then k-fold CV on the rest. Fold
// assignment depends only on (seed, number of samples).
std::vector<CvRow> cross_validate(const CountTensor& t,
                                  const std::vector<ModelConfig>& cfgs,
                                  const EvalConfig& ecfg);

std::vector<int> cv_fold_assignment(std::int32_t num_samples,
                                    const EvalConfig& ecfg,
                                    std::vector<std::int32_t>* test_out);

void write_cv_csv(const std::vector<CvRow>& rows, const std::string& path);
void write_plot_json(const std::vector<CvRow>& rows, const std::string& path);

}  // namespace hbtd
