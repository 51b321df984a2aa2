#include "hbtd/properties.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hbtd {

namespace {

std::string show(const Matrix& m) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    os << (i ? " [" : "[");
    for (std::size_t j = 0; j < m[i].size(); ++j)
      os << (j ? " " : "") << m[i][j];
    os << "]";
  }
  os << "]";
  return os.str();
}

std::string show(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

Rat fact(std::int64_t k) {
  Rat f = 1;
  for (std::int64_t i = 2; i <= k; ++i) f *= i;
  return f;
}

std::int64_t mat_total(const Matrix& m) {
  std::int64_t t = 0;
  for (const auto& row : m)
    for (auto v : row) t += v;
  return t;
}

std::int64_t mat_rowsum(const Matrix& m, std::size_t i) {
  std::int64_t t = 0;
  for (auto v : m[i]) t += v;
  return t;
}

std::int64_t mat_colsum(const Matrix& m, std::size_t j) {
  std::int64_t t = 0;
  for (const auto& row : m)
    if (j < row.size()) t += row[j];
  return t;
}

Matrix strip_rect(const Matrix& m) {
  // drops all-zero rows and columns of a rectangular matrix
  Matrix rows;
  for (const auto& r : m)
    if (std::any_of(r.begin(), r.end(),
                    [](std::int64_t v) { return v != 0; }))
      rows.push_back(r);
  if (rows.empty()) return rows;
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < rows[0].size(); ++j)
    if (mat_colsum(rows, j) > 0) keep.push_back(j);
  Matrix out;
  for (const auto& r : rows) {
    std::vector<std::int64_t> nr;
    for (auto j : keep) nr.push_back(r[j]);
    out.push_back(std::move(nr));
  }
  return out;
}

Matrix max_under_perms(const Matrix& m) {
  if (m.empty()) return m;
  std::vector<std::size_t> rp(m.size()), cp(m[0].size());
  std::iota(rp.begin(), rp.end(), 0);
  Matrix best;
  do {
    std::iota(cp.begin(), cp.end(), 0);
    do {
      Matrix cand(m.size(), std::vector<std::int64_t>(m[0].size()));
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[0].size(); ++j)
          cand[i][j] = m[rp[i]][cp[j]];
      if (best.empty() || cand > best) best = std::move(cand);
    } while (std::next_permutation(cp.begin(), cp.end()));
  } while (std::next_permutation(rp.begin(), rp.end()));
  return best;
}

// One sequential assignment step: (mode-1 choice, mode-2 choice, next state,
// probability). Choice index == current table count means a new table.
struct Step {
  int i, j;
  Matrix next;
  Rat prob;
};

std::vector<Step> steps(const AssignmentModel& m, const Matrix& state) {
  std::vector<Step> out;
  const Rat t = mat_total(state);
  switch (m.kind) {
    case AssignmentModel::Kind::pam_node: {
      const std::size_t K1 = m.dir_gamma1.size(), K2 = m.dir_gamma2.size();
      Rat s1 = 0, s2 = 0;
      for (const auto& g : m.dir_gamma1) s1 += g;
      for (const auto& g : m.dir_gamma2) s2 += g;
      for (std::size_t i = 0; i < K1; ++i) {
        const Rat rs = mat_rowsum(state, i);
        const Rat pi = (rs + m.dir_gamma1[i]) / (t + s1);
        for (std::size_t j = 0; j < K2; ++j) {
          const Rat pj = (Rat(state[i][j]) + m.dir_gamma2[j]) / (rs + s2);
          Matrix next = state;
          next[i][j] += 1;
          out.push_back({static_cast<int>(i), static_cast<int>(j),
                         std::move(next), pi * pj});
        }
      }
      break;
    }
    case AssignmentModel::Kind::independent_crp: {
      const std::size_t R = state.size();
      const std::size_t C = R ? state[0].size() : 0;
      for (std::size_t i = 0; i <= R; ++i) {
        const Rat pi = (i < R ? Rat(mat_rowsum(state, i)) : m.crp_gamma1) /
                       (t + m.crp_gamma1);
        for (std::size_t j = 0; j <= C; ++j) {
          const Rat pj = (j < C ? Rat(mat_colsum(state, j)) : m.crp_gamma2) /
                         (t + m.crp_gamma2);
          Matrix next = state;
          if (i == R) next.push_back(std::vector<std::int64_t>(C, 0));
          if (j == C)
            for (auto& row : next) row.push_back(0);
          next[i][j] += 1;
          out.push_back({static_cast<int>(i), static_cast<int>(j),
                         std::move(next), pi * pj});
        }
      }
      break;
    }
    case AssignmentModel::Kind::generalized_ncrp: {
      const std::size_t R = state.size();
      for (std::size_t i = 0; i <= R; ++i) {
        const Rat rs = i < R ? Rat(mat_rowsum(state, i)) : Rat(0);
        const Rat wi = i < R ? rs - m.g02 : m.g01 + m.g02 * Rat(R);
        const Rat pi = wi / (t + m.g01);
        const std::size_t C = i < R ? state[i].size() : 0;
        for (std::size_t j = 0; j <= C; ++j) {
          const Rat wj = j < C ? Rat(state[i][j]) - m.g12
                               : m.g11 + m.g12 * Rat(C);
          const Rat pj = wj / (rs + m.g11);
          Matrix next = state;
          if (i == R) next.push_back({});
          if (j == C) next[i].push_back(0);
          next[i][j] += 1;
          out.push_back({static_cast<int>(i), static_cast<int>(j),
                         std::move(next), pi * pj});
        }
      }
      break;
    }
  }
  return out;
}

Matrix start_state(const AssignmentModel& m) {
  if (m.kind == AssignmentModel::Kind::pam_node)
    return Matrix(m.dir_gamma1.size(),
                  std::vector<std::int64_t>(m.dir_gamma2.size(), 0));
  return {};
}

void enumerate_sequences(
    const AssignmentModel& m, int n,
    const std::function<void(const Matrix&, const Rat&)>& fn) {
  std::function<void(const Matrix&, int, const Rat&)> rec =
      [&](const Matrix& state, int left, const Rat& p) {
        if (left == 0) {
          fn(state, p);
          return;
        }
        for (const auto& s : steps(m, state)) rec(s.next, left - 1, p * s.prob);
      };
  rec(start_state(m), n, Rat(1));
}

// all reachable canonical states with at most `limit` customers
std::set<Matrix> reachable_states(const AssignmentModel& m, int limit) {
  std::set<Matrix> out;
  std::function<void(const Matrix&, int)> rec = [&](const Matrix& state,
                                                    int count) {
    out.insert(canonicalize(m, state));
    if (count >= limit) return;
    for (const auto& s : steps(m, state)) rec(s.next, count + 1);
  };
  rec(start_state(m), 0);
  return out;
}

Matrix pad(const Matrix& m) {
  std::size_t w = 0;
  for (const auto& r : m) w = std::max(w, r.size());
  Matrix out = m;
  for (auto& r : out) r.resize(w, 0);
  return out;
}

}  // namespace

std::int64_t PartitionMatrix::n() const { return mat_total(rho); }
std::int64_t PartitionMatrix::row_sum(std::size_t i) const {
  return mat_rowsum(rho, i);
}
std::int64_t PartitionMatrix::col_sum(std::size_t j) const {
  return mat_colsum(rho, j);
}

bool AssignmentModel::valid() const {
  switch (kind) {
    case Kind::independent_crp:
      return crp_gamma1 > 0 && crp_gamma2 > 0;
    case Kind::pam_node: {
      if (dir_gamma1.empty() || dir_gamma2.empty()) return false;
      for (const auto& g : dir_gamma1)
        if (g <= 0) return false;
      for (const auto& g : dir_gamma2)
        if (g <= 0) return false;
      return true;
    }
    case Kind::generalized_ncrp:
      return g01 > 0 && g11 > 0 && g02 >= 0 && g02 < 1 && g12 >= 0 && g12 < 1;
  }
  return false;
}

AssignmentModel AssignmentModel::independent_crp(Rat g1, Rat g2) {
  AssignmentModel m;
  m.kind = Kind::independent_crp;
  m.crp_gamma1 = std::move(g1);
  m.crp_gamma2 = std::move(g2);
  return m;
}

AssignmentModel AssignmentModel::pam_node(std::vector<Rat> gamma1,
                                          std::vector<Rat> gamma2) {
  AssignmentModel m;
  m.kind = Kind::pam_node;
  m.dir_gamma1 = std::move(gamma1);
  m.dir_gamma2 = std::move(gamma2);
  return m;
}

AssignmentModel AssignmentModel::generalized_ncrp(Rat g01, Rat g02, Rat g11,
                                                  Rat g12) {
  AssignmentModel m;
  m.kind = Kind::generalized_ncrp;
  m.g01 = std::move(g01);
  m.g02 = std::move(g02);
  m.g11 = std::move(g11);
  m.g12 = std::move(g12);
  return m;
}

Matrix canonicalize(const AssignmentModel& m, const Matrix& rho) {
  switch (m.kind) {
    case AssignmentModel::Kind::pam_node:
      return rho;
    case AssignmentModel::Kind::independent_crp:
      return max_under_perms(strip_rect(pad(rho)));
    case AssignmentModel::Kind::generalized_ncrp: {
      Matrix out;
      for (const auto& r : rho) {
        std::vector<std::int64_t> nr;
        for (auto v : r)
          if (v != 0) nr.push_back(v);
        if (!nr.empty()) {
          std::sort(nr.rbegin(), nr.rend());
          out.push_back(std::move(nr));
        }
      }
      std::sort(out.rbegin(), out.rend());
      return out;
    }
  }
  return rho;
}

std::map<Matrix, Rat> partition_distribution(const AssignmentModel& m, int n) {
  if (!m.valid()) throw std::invalid_argument("invalid assignment model");
  if (n < 0 || n > 8) throw std::invalid_argument("enumeration bound is n <= 8");
  std::map<Matrix, Rat> out;
  enumerate_sequences(m, n, [&](const Matrix& final, const Rat& p) {
    out[canonicalize(m, final)] += p;
  });
  return out;
}

Rat sequence_prob(const AssignmentModel& m,
                  const std::vector<std::pair<int, int>>& choices) {
  if (!m.valid()) throw std::invalid_argument("invalid assignment model");
  Matrix state = start_state(m);
  Rat p = 1;
  for (const auto& [ci, cj] : choices) {
    bool found = false;
    for (const auto& s : steps(m, state)) {
      if (s.i == ci && s.j == cj) {
        p *= s.prob;
        state = s.next;
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("choice sequence is not admissible");
  }
  return p;
}

Rat exact_partition_prob(const AssignmentModel& m, const PartitionMatrix& rho) {
  const auto dist = partition_distribution(m, static_cast<int>(rho.n()));
  const auto it = dist.find(canonicalize(m, rho.rho));
  return it == dist.end() ? Rat(0) : it->second;
}

Report check_exchangeability(const AssignmentModel& m, int n) {
  if (!m.valid()) throw std::invalid_argument("invalid assignment model");
  if (n < 0 || n > 6) throw std::invalid_argument("bound is n <= 6");
  std::map<Matrix, Rat> first;
  Report rep;
  enumerate_sequences(m, n, [&](const Matrix& final, const Rat& p) {
    if (!rep.holds) return;
    const Matrix key = canonicalize(m, final);
    const auto [it, inserted] = first.emplace(key, p);
    if (!inserted && it->second != p) {
      rep.holds = false;
      rep.witness = "partition " + show(key) + " reached with probabilities " +
                    show(it->second) + " and " + show(p);
    }
  });
  return rep;
}

Report check_partition_property(const AssignmentModel& m, int n,
                                PartitionFlavor flavor) {
  if (!m.valid()) throw std::invalid_argument("invalid assignment model");
  if (n < 0 || n > 6) throw std::invalid_argument("bound is n <= 6");
  if (m.kind == AssignmentModel::Kind::pam_node &&
      m.dir_gamma1.size() * m.dir_gamma2.size() > 9)
    throw std::invalid_argument("bound is K1*K2 <= 9");
  const auto dist = partition_distribution(m, n);
  auto prob_of = [&](const Matrix& mat) {
    const auto it = dist.find(canonicalize(m, mat));
    return it == dist.end() ? Rat(0) : it->second;
  };

  for (const auto& [cls, p] : dist) {
    const Matrix rect = pad(cls);
    if (rect.empty()) continue;
    const std::size_t R = rect.size(), C = rect[0].size();
    if (flavor == PartitionFlavor::loose) {
      std::vector<std::size_t> rp(R), cp(C);
      std::iota(rp.begin(), rp.end(), 0);
      do {
        std::iota(cp.begin(), cp.end(), 0);
        do {
          Matrix perm(R, std::vector<std::int64_t>(C));
          for (std::size_t i = 0; i < R; ++i)
            for (std::size_t j = 0; j < C; ++j) perm[i][j] = rect[rp[i]][cp[j]];
          if (prob_of(perm) != p)
            return {false, "P(" + show(rect) + ") = " + show(p) +
                               " but P(" + show(perm) + ") = " +
                               show(prob_of(perm))};
        } while (std::next_permutation(cp.begin(), cp.end()));
      } while (std::next_permutation(rp.begin(), rp.end()));
    } else {
      std::vector<std::int64_t> flat;
      for (const auto& r : rect) flat.insert(flat.end(), r.begin(), r.end());
      std::sort(flat.begin(), flat.end());
      do {
        Matrix perm(R, std::vector<std::int64_t>(C));
        for (std::size_t i = 0; i < R; ++i)
          for (std::size_t j = 0; j < C; ++j) perm[i][j] = flat[i * C + j];
        if (prob_of(perm) != p)
          return {false, "P(" + show(rect) + ") = " + show(p) + " but P(" +
                             show(perm) + ") = " + show(prob_of(perm))};
      } while (std::next_permutation(flat.begin(), flat.end()));
    }
  }
  return {true, ""};
}

namespace {

// unnormalized next-customer weights; comparisons share a denominator
Rat xi_weight(const AssignmentModel& m, const Matrix& state, std::size_t i) {
  const Rat rs = mat_rowsum(state, i);
  switch (m.kind) {
    case AssignmentModel::Kind::pam_node:
      return rs + m.dir_gamma1[i];
    case AssignmentModel::Kind::independent_crp:
      return rs;
    case AssignmentModel::Kind::generalized_ncrp:
      return rs - m.g02;
  }
  return rs;
}

Rat theta_col_weight(const AssignmentModel& m, const Matrix& state,
                     std::size_t j) {
  const Rat cs = mat_colsum(state, j);
  switch (m.kind) {
    case AssignmentModel::Kind::pam_node:
      return cs + m.dir_gamma2[j];
    case AssignmentModel::Kind::independent_crp:
      return cs;
    case AssignmentModel::Kind::generalized_ncrp:
      return cs - m.g12;
  }
  return cs;
}

Rat theta_cell_weight(const AssignmentModel& m, const Matrix& state,
                      std::size_t i, std::size_t j) {
  const Rat c = Rat(state[i][j]);
  switch (m.kind) {
    case AssignmentModel::Kind::pam_node:
      return c + m.dir_gamma2[j];
    case AssignmentModel::Kind::independent_crp:
      return Rat(mat_colsum(state, j));
    case AssignmentModel::Kind::generalized_ncrp:
      return c - m.g12;
  }
  return c;
}

}  // namespace

Report check_rich_get_richer(const AssignmentModel& m, int n, RgrFlavor flavor) {
  if (!m.valid()) throw std::invalid_argument("invalid assignment model");
  if (n < 0 || n > 6) throw std::invalid_argument("bound is n <= 6");
  for (const Matrix& raw : reachable_states(m, n - 1)) {
    const Matrix state = pad(raw);
    if (state.empty()) continue;
    const std::size_t R = state.size(), C = state[0].size();
    // mode 1: fiber sums vs next-customer probabilities, occupied topics only
    for (std::size_t i = 0; i < R; ++i) {
      if (mat_rowsum(state, i) == 0) continue;
      for (std::size_t j = 0; j < R; ++j) {
        if (i == j || mat_rowsum(state, j) == 0) continue;
        const bool counts = mat_rowsum(state, i) > mat_rowsum(state, j);
        const bool probs = xi_weight(m, state, i) > xi_weight(m, state, j);
        if (counts != probs)
          return {false, "mode-1 monotonicity fails at " + show(state) +
                             " topics " + std::to_string(i) + "," +
                             std::to_string(j)};
      }
    }
    if (flavor == RgrFlavor::independent) {
      for (std::size_t i = 0; i < C; ++i) {
        if (mat_colsum(state, i) == 0) continue;
        for (std::size_t j = 0; j < C; ++j) {
          if (i == j || mat_colsum(state, j) == 0) continue;
          const bool counts = mat_colsum(state, i) > mat_colsum(state, j);
          const bool probs =
              theta_col_weight(m, state, i) > theta_col_weight(m, state, j);
          if (counts != probs)
            return {false, "mode-2 monotonicity fails at " + show(state) +
                               " topics " + std::to_string(i) + "," +
                               std::to_string(j)};
        }
      }
    } else {
      for (std::size_t k = 0; k < R; ++k) {
        for (std::size_t i = 0; i < C; ++i) {
          if (state[k][i] == 0) continue;
          for (std::size_t j = 0; j < C; ++j) {
            if (i == j || state[k][j] == 0) continue;
            const bool counts = state[k][i] > state[k][j];
            const bool probs = theta_cell_weight(m, state, k, i) >
                               theta_cell_weight(m, state, k, j);
            if (counts != probs)
              return {false, "within-fiber monotonicity fails at " +
                                 show(state) + " row " + std::to_string(k)};
          }
        }
      }
    }
  }
  return {true, ""};
}

std::pair<Rat, Rat> dirichlet_swap_scores(Rat gp, Rat gq, std::int64_t mp,
                                          std::int64_t mq) {
  const Rat orig = Rat(1) / ((Rat(mp) + gp) * (Rat(mq) + gq));
  const Rat swapped = Rat(1) / ((Rat(mq) + gp) * (Rat(mp) + gq));
  return {orig, swapped};
}

ImpossibilityReport impossibility_witness() {
  ImpossibilityReport rep;
  // omega(rho_ij=1, rho_mn=2) with rho_i. = rho_m. = 3 and zero discount:
  // Gamma(3)Gamma(3) / (Gamma(2)Gamma(4))
  const std::int64_t rij = 1, rmn = 2, ri = 3, rm = 3;
  rep.omega = fact(rm - 1) * fact(ri - 1) /
              (fact(rm - rmn + rij - 1) * fact(ri - rij + rmn - 1));
  rep.nu = rep.omega;  // equal mode-2 discounts make the second factor 1
  rep.witness_ok = rep.omega == Rat(2, 3) && rep.nu == Rat(2, 3);

  for (int a = 1; a <= 10; ++a) {
    for (int b = 1; b <= 10; ++b) {
      const Rat g1(a, 2), g2(b, 2);
      rep.grid_cells += 1;
      const auto lin = AssignmentModel::generalized_ncrp(g1, g2, g1, g2);
      if (lin.valid() && check_exchangeability(lin, 4).holds &&
          check_partition_property(lin, 4, PartitionFlavor::strict).holds &&
          check_rich_get_richer(lin, 4, RgrFlavor::hierarchical).holds)
        rep.grid_passing += 1;
    }
  }

  rep.trees_all_pass = true;
  for (int a = 1; a <= 10 && rep.trees_all_pass; ++a) {
    for (int b = 1; b <= 10; ++b) {
      const auto trees = AssignmentModel::independent_crp(Rat(a, 2), Rat(b, 2));
      if (!check_exchangeability(trees, 4).holds ||
          !check_partition_property(trees, 4, PartitionFlavor::loose).holds ||
          !check_rich_get_richer(trees, 4, RgrFlavor::independent).holds) {
        rep.trees_all_pass = false;
        break;
      }
    }
  }
  return rep;
}

}  // namespace hbtd
