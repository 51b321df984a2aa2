#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hbtd/config.hpp"
#include "hbtd/count_tensor.hpp"
#include "hbtd/hierarchy.hpp"
#include "hbtd/rng.hpp"

namespace hbtd {

// Mutable sampler / generator state for the decomposition part of the model.
// Topic indices are flat under kmap; per-sample support lists the admissible
// flat topics (empty list = all of them).
struct DecompositionState {
  int p = 0;
  std::vector<std::int32_t> dims;    // d_0 .. d_p
  std::vector<std::int32_t> k_dims;  // K_1 .. K_p under the current layout
  TopicIndexMap kmap;

  std::vector<std::vector<IndexTuple>> obs;        // [x][i] feature tuple, 0-based
  std::vector<std::vector<std::int64_t>> z;        // [x][i] flat topic index
  std::vector<std::vector<std::int64_t>> support;  // [x] sorted; empty = full

  std::vector<std::vector<double>> phi;  // [x][flat], zero off support
  std::vector<std::vector<std::vector<double>>> psi;  // [mode-1][k][v]

  std::vector<std::vector<std::int64_t>> n;  // [x][flat]
  std::vector<std::vector<std::vector<std::int64_t>>> m;  // [mode-1][k][v]

  std::int64_t num_items(int x) const {
    return static_cast<std::int64_t>(obs[x].size());
  }
  bool in_support(int x, std::int64_t flat) const;
};

// Per-topic alpha under the full flat layout (alpha_full if given, symmetric
// alpha otherwise).
std::vector<double> alpha_flat(const ModelConfig& cfg, std::int64_t total);

// Rebuilds n and m from z; obs and z must already agree in shape.
void recompute_stats(DecompositionState& s);

// Checks n/m against a fresh tally and z against the support sets.
bool audit_stats(const DecompositionState& s, std::string* why = nullptr);

struct Generated {
  DecompositionState state;
  CountTensor counts;
  std::optional<HierarchyState> hierarchy;
  TopicLayout layout;

  Generated() : counts(1, {1, 1}) {}
};

// Forward simulation: psi ~ Dir(beta), optional hierarchy from its prior,
// phi_x ~ Dir(alpha) on the sample's support, then lambda_x draws of (z, y).
// Sample x uses substream(seed, x + 1); globals use substream(seed, 0).
Generated generate(const ModelConfig& cfg, std::uint64_t seed);

// Expands a sparse tensor into per-sample observation lists in entry order.
std::vector<std::vector<IndexTuple>> expand_observations(const CountTensor& t);

CountTensor counts_from_state(const DecompositionState& s);

double log_dirichlet_pdf(std::span<const double> x, std::span<const double> alpha);

// log p(phi, psi, z, y | alpha, beta), hierarchy factors excluded.
double log_joint_noncollapsed(const DecompositionState& s, const ModelConfig& cfg);

// log P(Y, Z | alpha, beta) with phi and psi integrated out: a product of
// Dirichlet-multinomial terms, one per sample over its support and one per
// (mode, topic) row.
double log_collapsed_joint(const DecompositionState& s, const ModelConfig& cfg);

// Posterior means given the current assignment stats.
std::vector<std::vector<std::vector<double>>> psi_mean(const DecompositionState& s,
                                                       const ModelConfig& cfg);
std::vector<std::vector<double>> phi_mean(const DecompositionState& s,
                                          const ModelConfig& cfg);

}  // namespace hbtd
