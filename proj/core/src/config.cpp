#include "hbtd/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace hbtd {

void SamplerConfig::validate() const {
  if (burn_in < 0 || total_sweeps <= 0 || burn_in >= total_sweeps)
    throw ConfigError("require 0 <= burn_in < total_sweeps");
  if (thin < 1) throw ConfigError("thin must be >= 1");
  if (chains < 1) throw ConfigError("chains must be >= 1");
}

std::vector<int> ModelConfig::pam_modes() const {
  std::vector<int> out;
  for (int m = 1; m <= p; ++m)
    if (!mode_is_independent(m)) out.push_back(m);
  return out;
}

bool ModelConfig::mode_is_independent(int mode1based) const {
  return std::find(independent_modes.begin(), independent_modes.end(),
                   mode1based) != independent_modes.end();
}

void ModelConfig::validate() const {
  if (p < 1) throw ConfigError("p must be >= 1");
  if (static_cast<int>(dims.size()) != p + 1)
    throw ConfigError("dims must list p+1 sizes");
  for (auto d : dims)
    if (d <= 0) throw ConfigError("dims must be positive");
  if (alpha <= 0.0) throw ConfigError("alpha must be > 0");
  for (double a : alpha_full)
    if (a <= 0.0) throw ConfigError("alpha entries must be > 0");
  if (static_cast<int>(beta.size()) != p)
    throw ConfigError("beta must list one value per feature mode");
  for (double b : beta)
    if (b <= 0.0) throw ConfigError("beta must be > 0");
  if (gamma <= 0.0) throw ConfigError("gamma must be > 0");

  if (hierarchy == HierarchyKind::none) {
    if (static_cast<int>(k_dims.size()) != p)
      throw ConfigError("topics must list K_j per feature mode");
    for (auto k : k_dims)
      if (k <= 0) throw ConfigError("topics must be positive");
    return;
  }
  if (hierarchy == HierarchyKind::trees) {
    if (static_cast<int>(levels.size()) != p)
      throw ConfigError("trees hierarchy needs levels per mode");
    for (int l : levels)
      if (l < 1) throw ConfigError("levels must be >= 1");
    if (composition != Composition::cartesian)
      throw ConfigError("trees hierarchy supports only cartesian composition");
    return;
  }
  // pam
  if (levels.size() != 1 || levels[0] < 1)
    throw ConfigError("pam hierarchy needs a single levels value >= 1");
  const int L = levels[0];
  if (static_cast<int>(tau.size()) != L)
    throw ConfigError("tau must list one row per level");
  for (const auto& row : tau) {
    if (static_cast<int>(row.size()) != p)
      throw ConfigError("each tau row must list one value per mode");
    for (int t : row)
      if (t < 1) throw ConfigError("tau must be >= 1");
  }
  if (dominant_mode < 1 || dominant_mode > p)
    throw ConfigError("dominant_mode out of range");
  if (mode_is_independent(dominant_mode))
    throw ConfigError("dominant_mode cannot be an independent mode");
  if (tau[0][dominant_mode - 1] != 1)
    throw ConfigError("tau at level 1 for the dominant mode must be 1");
  for (int m : independent_modes)
    if (m < 1 || m > p) throw ConfigError("independent_modes entry out of range");
  const auto pmodes = pam_modes();
  if (pmodes.empty()) throw ConfigError("pam hierarchy needs at least one pam mode");
  for (auto [a, b] : mode_deps) {
    if (a < 1 || a > p || b < 1 || b > p || a == b)
      throw ConfigError("mode_deps edge out of range");
    if (mode_is_independent(a) || mode_is_independent(b))
      throw ConfigError("mode_deps cannot reference independent modes");
  }
  // acyclicity via DFS over pam modes
  std::vector<std::vector<int>> adj(p + 1);
  for (auto [a, b] : mode_deps) adj[a].push_back(b);
  std::vector<int> color(p + 1, 0);
  std::function<void(int)> dfs = [&](int u) {
    color[u] = 1;
    for (int v : adj[u]) {
      if (color[v] == 1) throw ConfigError("mode dependency graph is cyclic");
      if (color[v] == 0) dfs(v);
    }
    color[u] = 2;
  };
  for (int m : pmodes)
    if (color[m] == 0) dfs(m);
}

namespace {

std::vector<std::string> tokens(const std::string& v) {
  std::istringstream ss(v);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

long long to_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw ConfigError("key '" + key + "': expected integer, got '" + s + "'");
  }
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw ConfigError("key '" + key + "': expected number, got '" + s + "'");
  }
}

}  // namespace

ModelConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);

  ModelConfig cfg;
  bool saw_version = false;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::vector<int>> tau_rows;

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (key != "tau" && !seen.insert(key).second)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");

    const auto toks = tokens(val);
    auto one = [&]() -> const std::string& {
      if (toks.size() != 1)
        throw ConfigError("key '" + key + "': expected a single value");
      return toks[0];
    };

    if (key == "schema_version") {
      if (to_int(one(), key) != 1)
        throw ConfigError("unsupported schema_version (expected 1)");
      saw_version = true;
    } else if (key == "p") {
      cfg.p = static_cast<int>(to_int(one(), key));
    } else if (key == "dims") {
      cfg.dims.clear();
      for (const auto& t : toks) cfg.dims.push_back(static_cast<std::int32_t>(to_int(t, key)));
    } else if (key == "topics") {
      cfg.k_dims.clear();
      for (const auto& t : toks) cfg.k_dims.push_back(static_cast<std::int32_t>(to_int(t, key)));
    } else if (key == "hierarchy") {
      const auto& v = one();
      if (v == "none") cfg.hierarchy = HierarchyKind::none;
      else if (v == "trees") cfg.hierarchy = HierarchyKind::trees;
      else if (v == "pam") cfg.hierarchy = HierarchyKind::pam;
      else throw ConfigError("hierarchy must be none|trees|pam");
    } else if (key == "levels") {
      cfg.levels.clear();
      for (const auto& t : toks) cfg.levels.push_back(static_cast<int>(to_int(t, key)));
    } else if (key == "gamma") {
      cfg.gamma = to_double(one(), key);
    } else if (key == "tau") {
      std::vector<int> row;
      for (const auto& t : toks) row.push_back(static_cast<int>(to_int(t, key)));
      tau_rows.push_back(row);
    } else if (key == "dominant_mode") {
      cfg.dominant_mode = static_cast<int>(to_int(one(), key));
    } else if (key == "composition") {
      const auto& v = one();
      if (v == "cartesian") cfg.composition = Composition::cartesian;
      else if (v == "level") cfg.composition = Composition::level;
      else throw ConfigError("composition must be cartesian|level");
    } else if (key == "mode_deps") {
      cfg.mode_deps.clear();
      for (const auto& t : toks) {
        const auto gt = t.find('>');
        if (gt == std::string::npos)
          throw ConfigError("mode_deps entries look like 1>2");
        cfg.mode_deps.emplace_back(
            static_cast<int>(to_int(t.substr(0, gt), key)),
            static_cast<int>(to_int(t.substr(gt + 1), key)));
      }
    } else if (key == "independent_modes") {
      cfg.independent_modes.clear();
      for (const auto& t : toks)
        cfg.independent_modes.push_back(static_cast<int>(to_int(t, key)));
    } else if (key == "alpha") {
      if (toks.size() == 1) {
        cfg.alpha = to_double(toks[0], key);
      } else {
        cfg.alpha_full.clear();
        for (const auto& t : toks) cfg.alpha_full.push_back(to_double(t, key));
      }
    } else if (key == "beta") {
      cfg.beta.clear();
      for (const auto& t : toks) cfg.beta.push_back(to_double(t, key));
    } else if (key == "phi_support") {
      const auto& v = one();
      if (v == "support") cfg.phi_support = PhiSupportMode::support;
      else if (v == "restrict") cfg.phi_support = PhiSupportMode::restrict_full;
      else throw ConfigError("phi_support must be support|restrict");
    } else if (key == "lambda") {
      cfg.lambda.clear();
      for (const auto& t : toks) cfg.lambda.push_back(to_int(t, key));
    } else if (key == "sampler") {
      const auto& v = one();
      if (v == "collapsed") cfg.sampler.variant = SamplerVariant::collapsed;
      else if (v == "noncollapsed") cfg.sampler.variant = SamplerVariant::noncollapsed;
      else throw ConfigError("sampler must be collapsed|noncollapsed");
    } else if (key == "burn_in") {
      cfg.sampler.burn_in = static_cast<int>(to_int(one(), key));
    } else if (key == "total_sweeps") {
      cfg.sampler.total_sweeps = static_cast<int>(to_int(one(), key));
    } else if (key == "thin") {
      cfg.sampler.thin = static_cast<int>(to_int(one(), key));
    } else if (key == "chains") {
      cfg.sampler.chains = static_cast<int>(to_int(one(), key));
    } else if (key == "seed") {
      cfg.sampler.seed = static_cast<std::uint64_t>(to_int(one(), key));
    } else {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }

  if (!saw_version) throw ConfigError(path + ": missing schema_version");
  cfg.tau = tau_rows;
  // single tau row broadcast across levels
  if (cfg.hierarchy == HierarchyKind::pam && cfg.tau.size() == 1 &&
      !cfg.levels.empty() && cfg.levels[0] > 1) {
    while (static_cast<int>(cfg.tau.size()) < cfg.levels[0])
      cfg.tau.push_back(cfg.tau[0]);
    cfg.tau[0][cfg.dominant_mode - 1] = 1;
  }
  if (cfg.beta.empty()) cfg.beta.assign(cfg.p, 1.0);
  // default pam dependency: chain dominant -> every other pam mode
  if (cfg.hierarchy == HierarchyKind::pam && cfg.mode_deps.empty()) {
    for (int m = 1; m <= cfg.p; ++m)
      if (m != cfg.dominant_mode && !cfg.mode_is_independent(m))
        cfg.mode_deps.emplace_back(cfg.dominant_mode, m);
  }
  cfg.validate();
  cfg.sampler.validate();
  return cfg;
}

}  // namespace hbtd
