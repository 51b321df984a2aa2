#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hbtd {

using Rat = boost::multiprecision::cpp_rational;

// Two-mode partition: rho[i][j] customers hold topic i in mode 1 and topic j
// in mode 2. Rows may be ragged for models whose mode-2 tables are row-local.
using Matrix = std::vector<std::vector<std::int64_t>>;

struct PartitionMatrix {
  Matrix rho;

  std::int64_t n() const;
  std::int64_t row_sum(std::size_t i) const;
  std::int64_t col_sum(std::size_t j) const;
};

// Sequential two-mode assignment processes studied on small n. Labeling
// conventions differ: CRP tables are unlabeled (canonical class
// representatives), pam topics are labeled (matrices compared as-is),
// the generalized nCRP nests unlabeled row-local tables.
struct AssignmentModel {
  enum class Kind { independent_crp, pam_node, generalized_ncrp };
  Kind kind;

  Rat crp_gamma1, crp_gamma2;            // independent_crp
  std::vector<Rat> dir_gamma1, dir_gamma2;  // pam_node
  // linear (Pitman-Yor style) form: occupied weight rho - g2, new-table
  // weight g1 + g2 * (current occupied count); one pair per mode
  Rat g01, g02, g11, g12;                // generalized_ncrp

  bool valid() const;

  static AssignmentModel independent_crp(Rat g1, Rat g2);
  static AssignmentModel pam_node(std::vector<Rat> gamma1, std::vector<Rat> gamma2);
  static AssignmentModel generalized_ncrp(Rat g01, Rat g02, Rat g11, Rat g12);
};

// Class representative under the model's labeling convention.
Matrix canonicalize(const AssignmentModel& m, const Matrix& rho);

// Exact probability of every reachable partition class after n customers.
// Values sum to exactly 1.
std::map<Matrix, Rat> partition_distribution(const AssignmentModel& m, int n);

// Probability of one explicit seat-choice sequence; choices[t] = (mode-1
// choice, mode-2 choice) with index == current table count meaning "new".
Rat sequence_prob(const AssignmentModel& m,
                  const std::vector<std::pair<int, int>>& choices);

// Sum of all seat-choice sequences reaching rho's class. n is rho's total.
Rat exact_partition_prob(const AssignmentModel& m, const PartitionMatrix& rho);

struct Report {
  bool holds = true;
  std::string witness;  // empty when holds
};

// Every choice sequence reaching the same class must have equal probability.
Report check_exchangeability(const AssignmentModel& m, int n);

enum class PartitionFlavor { strict, loose };
// strict: P invariant under permutations of the elements of rho;
// loose: under row and column permutations only.
Report check_partition_property(const AssignmentModel& m, int n,
                                PartitionFlavor flavor);

enum class RgrFlavor { independent, hierarchical };
// Monotonicity biconditionals over occupied topics: fiber sums for
// independent, within-fiber elements for hierarchical. Checked on every
// reachable state with fewer than n customers.
Report check_rich_get_richer(const AssignmentModel& m, int n, RgrFlavor flavor);

// Asymmetric-Dirichlet contrast scores 1/((m_p+g_p)(m_q+g_q)) for the
// original and the swapped assignment.
std::pair<Rat, Rat> dirichlet_swap_scores(Rat gp, Rat gq, std::int64_t mp,
                                          std::int64_t mq);

struct ImpossibilityReport {
  Rat omega;          // Gamma-ratio factor at the canonical witness state
  Rat nu;             // full swap ratio with equal mode-2 discounts
  bool witness_ok = false;  // omega == nu == 2/3
  int grid_cells = 0;
  int grid_passing = 0;     // linear-form cells passing all three checks
  bool trees_all_pass = false;  // independent CRPs pass all three on the grid
};

// Evaluates the canonical swap witness exactly and scans a half-step grid
// over (0,5]^2 for linear-form parameters passing exchangeability, strict
// partition, and rich-get-richer at n = 4.
ImpossibilityReport impossibility_witness();

}  // namespace hbtd
