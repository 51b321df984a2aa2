// Command line front end: generate / fit / evaluate / cv / properties / audit.
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 internal audit failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hbtd/config.hpp"
#include "hbtd/count_tensor.hpp"
#include "hbtd/evaluation.hpp"
#include "hbtd/gibbs.hpp"
#include "hbtd/model.hpp"
#include "hbtd/properties.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct AuditFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string dims_str(const std::vector<std::int32_t>& d) {
  std::ostringstream os;
  for (std::size_t i = 0; i < d.size(); ++i) os << (i ? " " : "") << d[i];
  return os.str();
}

hbtd::CountTensor load_for(const hbtd::ModelConfig& cfg, const std::string& path) {
  hbtd::CountTensor t = hbtd::load_counts(path, cfg.p);
  if (t.dims() != cfg.dims)
    throw hbtd::DataError("data dims [" + dims_str(t.dims()) +
                          "] disagree with config dims [" + dims_str(cfg.dims) +
                          "]");
  return t;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw hbtd::DataError("cannot write " + path.string());
  out << text;
}

json psi_json(const std::vector<std::vector<std::vector<double>>>& psi) {
  json out = json::array();
  for (const auto& mode : psi) out.push_back(mode);
  return out;
}

json draw_json(const hbtd::PosteriorDraw& d) {
  return json{{"chain", d.chain},
              {"sweep", d.sweep},
              {"k_dims", d.k_dims},
              {"phi", d.phi},
              {"psi", psi_json(d.psi)},
              {"support", d.support},
              {"z", d.z}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

hbtd::Rat parse_rat(const std::string& s) {
  // decimal or a/b fraction, exact
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    return hbtd::Rat(boost::multiprecision::cpp_int(s.substr(0, slash)),
                     boost::multiprecision::cpp_int(s.substr(slash + 1)));
  }
  const auto dot = s.find('.');
  if (dot == std::string::npos)
    return hbtd::Rat(boost::multiprecision::cpp_int(s));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  boost::multiprecision::cpp_int den = 1;
  for (std::size_t i = 0; i < s.size() - dot - 1; ++i) den *= 10;
  return hbtd::Rat(boost::multiprecision::cpp_int(digits), den);
}

std::vector<hbtd::Rat> parse_rats(const std::vector<std::string>& ss) {
  std::vector<hbtd::Rat> out;
  for (const auto& s : ss) out.push_back(parse_rat(s));
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"conditional hierarchical Bayesian Tucker decomposition toolkit"};
  app.require_subcommand(1);

  std::string config_path, data_path, train_path, heldout_path, out_dir = ".";
  std::vector<std::string> config_paths;
  std::optional<std::uint64_t> seed;
  int eval_G = 1000, cv_folds = 10, audit_sweeps = 100, prop_n = 4;
  double eval_eps = 1e-10, heldout_fraction = 0.30;
  bool emit_plot = false;
  std::string prop_model = "independent-crp";
  std::vector<std::string> g1_raw{"1"}, g2_raw{"1"};
  std::string g01_raw = "1", g02_raw = "0", g11_raw = "1", g12_raw = "0";

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config)
      sub->add_option("--config", config_path, "model config file")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out-dir", out_dir, "output directory");
  };

  auto* gen = app.add_subcommand("generate", "draw a synthetic tensor from the model");
  add_common(gen, true);

  auto* fitc = app.add_subcommand("fit", "run the Gibbs sampler");
  add_common(fitc, true);
  fitc->add_option("--data", data_path, "count tensor (TSV)")->required();

  auto* evalc = app.add_subcommand("evaluate", "held-out empirical likelihood");
  add_common(evalc, true);
  evalc->add_option("--train", train_path, "training tensor")->required();
  evalc->add_option("--heldout", heldout_path, "held-out tensor")->required();
  evalc->add_option("--pseudo-samples", eval_G, "mixture size G");
  evalc->add_option("--epsilon", eval_eps, "probability floor");

  auto* cvc = app.add_subcommand("cv", "split + k-fold cross-validation");
  cvc->add_option("--config", config_paths, "model config file(s)")->required();
  cvc->add_option("--seed", seed, "evaluation seed");
  cvc->add_option("--out-dir", out_dir, "output directory");
  cvc->add_option("--data", data_path, "count tensor (TSV)")->required();
  cvc->add_option("--folds", cv_folds, "fold count");
  cvc->add_option("--heldout-fraction", heldout_fraction, "test split fraction");
  cvc->add_option("--pseudo-samples", eval_G, "mixture size G");
  cvc->add_flag("--emit-plot-data", emit_plot, "also write plot JSON");

  auto* prop = app.add_subcommand("properties", "exact combinatorial checks");
  prop->add_option("--model", prop_model,
                   "independent-crp | pam-node | generalized-ncrp");
  prop->add_option("--n", prop_n, "customers (exact enumeration)");
  prop->add_option("--gamma1", g1_raw, "mode-1 parameter(s), exact rationals");
  prop->add_option("--gamma2", g2_raw, "mode-2 parameter(s), exact rationals");
  prop->add_option("--g01", g01_raw, "linear-form mode-1 base weight");
  prop->add_option("--g02", g02_raw, "linear-form mode-1 discount");
  prop->add_option("--g11", g11_raw, "linear-form mode-2 base weight");
  prop->add_option("--g12", g12_raw, "linear-form mode-2 discount");
  prop->add_option("--out-dir", out_dir, "output directory");

  auto* aud = app.add_subcommand("audit", "sweep and check stats consistency");
  add_common(aud, true);
  aud->add_option("--data", data_path, "count tensor (TSV)")->required();
  aud->add_option("--sweeps", audit_sweeps, "sweeps to audit");

  CLI11_PARSE(app, argc, argv);
  fs::create_directories(out_dir);

  if (*gen) {
    hbtd::ModelConfig cfg = hbtd::parse_config(config_path);
    if (seed) cfg.sampler.seed = *seed;
    const auto g = hbtd::generate(cfg, cfg.sampler.seed);
    hbtd::save_counts(g.counts, (fs::path(out_dir) / "counts.tsv").string());
    json truth{{"seed", cfg.sampler.seed},
               {"k_dims", g.state.k_dims},
               {"psi", psi_json(g.state.psi)},
               {"phi", g.state.phi},
               {"z", g.state.z}};
    write_text(fs::path(out_dir) / "truth.json", truth.dump(2) + "\n");
    return 0;
  }

  if (*fitc) {
    hbtd::ModelConfig cfg = hbtd::parse_config(config_path);
    if (seed) cfg.sampler.seed = *seed;
    const hbtd::CountTensor data = load_for(cfg, data_path);
    const hbtd::FitResult fr = hbtd::fit(cfg, data);

    std::ostringstream diag;
    diag << "chain,sweep,log_score,active_topics,hierarchy_nodes\n";
    for (const auto& d : fr.diagnostics)
      diag << d.chain << ',' << d.sweep << ',' << fmt(d.log_score) << ','
           << d.active_topics << ',' << d.hierarchy_nodes << '\n';
    write_text(fs::path(out_dir) / "diagnostics.csv", diag.str());

    std::ostringstream nd;
    for (const auto& d : fr.draws) nd << draw_json(d).dump() << '\n';
    write_text(fs::path(out_dir) / "draws.ndjson", nd.str());

    const auto& chain = *fr.chains.front();
    write_text(fs::path(out_dir) / "posterior.json",
               draw_json(chain.snapshot(0, cfg.sampler.total_sweeps)).dump(2) +
                   "\n");
    std::string why;
    for (const auto& c : fr.chains)
      if (!c->audit(&why)) throw AuditFailure("post-fit audit: " + why);
    return 0;
  }

  if (*evalc) {
    hbtd::ModelConfig cfg = hbtd::parse_config(config_path);
    if (seed) cfg.sampler.seed = *seed;
    const hbtd::CountTensor train = load_for(cfg, train_path);
    hbtd::CountTensor heldout = hbtd::load_counts(heldout_path, cfg.p);
    const hbtd::FitResult fr = hbtd::fit(cfg, train);
    const auto& chain = *fr.chains.front();
    hbtd::EvalConfig ecfg;
    ecfg.G = eval_G;
    ecfg.epsilon = eval_eps;
    ecfg.seed = seed ? *seed : cfg.sampler.seed;
    const auto res = hbtd::empirical_log_likelihood(
        cfg, chain.snapshot(0, cfg.sampler.total_sweeps), chain.hierarchy(),
        heldout, ecfg);
    json out{{"total", res.total}, {"per_sample", res.per_sample}};
    write_text(fs::path(out_dir) / "evaluation.json", out.dump(2) + "\n");
    std::cout << "total log-likelihood " << fmt(res.total) << "\n";
    return 0;
  }

  if (*cvc) {
    std::vector<hbtd::ModelConfig> cfgs;
    for (const auto& p : config_paths) cfgs.push_back(hbtd::parse_config(p));
    for (const auto& c : cfgs)
      if (c.p != cfgs.front().p || c.dims != cfgs.front().dims)
        throw hbtd::ConfigError("cv configs must share p and dims");
    const hbtd::CountTensor data = load_for(cfgs.front(), data_path);
    hbtd::EvalConfig ecfg;
    ecfg.G = eval_G;
    ecfg.folds = cv_folds;
    ecfg.heldout_fraction = heldout_fraction;
    ecfg.seed = seed ? *seed : cfgs.front().sampler.seed;
    const auto rows = hbtd::cross_validate(data, cfgs, ecfg);
    hbtd::write_cv_csv(rows, (fs::path(out_dir) / "cv.csv").string());
    if (emit_plot)
      hbtd::write_plot_json(rows, (fs::path(out_dir) / "plot.json").string());
    return 0;
  }

  if (*prop) {
    hbtd::AssignmentModel model = hbtd::AssignmentModel::independent_crp(1, 1);
    if (prop_model == "independent-crp") {
      model = hbtd::AssignmentModel::independent_crp(parse_rat(g1_raw.at(0)),
                                                     parse_rat(g2_raw.at(0)));
    } else if (prop_model == "pam-node") {
      model = hbtd::AssignmentModel::pam_node(parse_rats(g1_raw),
                                              parse_rats(g2_raw));
    } else if (prop_model == "generalized-ncrp") {
      model = hbtd::AssignmentModel::generalized_ncrp(
          parse_rat(g01_raw), parse_rat(g02_raw), parse_rat(g11_raw),
          parse_rat(g12_raw));
    } else {
      std::cerr << "unknown --model " << prop_model << "\n";
      return 1;
    }
    auto rep_json = [](const hbtd::Report& r) {
      return json{{"holds", r.holds}, {"witness", r.witness}};
    };
    const bool loose_only = model.kind == hbtd::AssignmentModel::Kind::independent_crp;
    json out{
        {"model", prop_model},
        {"n", prop_n},
        {"exchangeability", rep_json(hbtd::check_exchangeability(model, prop_n))},
        {"partition_strict",
         rep_json(hbtd::check_partition_property(
             model, prop_n, hbtd::PartitionFlavor::strict))},
        {"partition_loose",
         rep_json(hbtd::check_partition_property(
             model, prop_n, hbtd::PartitionFlavor::loose))},
        {"rich_get_richer",
         rep_json(hbtd::check_rich_get_richer(
             model, prop_n,
             loose_only ? hbtd::RgrFlavor::independent
                        : hbtd::RgrFlavor::hierarchical))},
    };
    const auto w = hbtd::impossibility_witness();
    std::ostringstream omega, nu;
    omega << w.omega;
    nu << w.nu;
    out["impossibility"] = json{{"omega", omega.str()},
                                {"nu", nu.str()},
                                {"witness_ok", w.witness_ok},
                                {"grid_cells", w.grid_cells},
                                {"grid_passing", w.grid_passing},
                                {"trees_all_pass", w.trees_all_pass}};
    const std::string text = out.dump(2) + "\n";
    write_text(fs::path(out_dir) / "properties.json", text);
    std::cout << text;
    return 0;
  }

  if (*aud) {
    hbtd::ModelConfig cfg = hbtd::parse_config(config_path);
    if (seed) cfg.sampler.seed = *seed;
    const hbtd::CountTensor data = load_for(cfg, data_path);
    hbtd::GibbsChain chain(cfg, data);
    hbtd::Rng rng = hbtd::Rng::substream(cfg.sampler.seed, 0);
    chain.init(rng);
    std::string why;
    for (int s = 0; s <= audit_sweeps; ++s) {
      if (s > 0) chain.sweep(rng);
      if (!chain.audit(&why))
        throw AuditFailure("sweep " + std::to_string(s) + ": " + why);
    }
    json out{{"sweeps", audit_sweeps}, {"ok", true}};
    write_text(fs::path(out_dir) / "audit.json", out.dump(2) + "\n");
    std::cout << "audit ok after " << audit_sweeps << " sweeps\n";
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const hbtd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const hbtd::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const AuditFailure& e) {
    std::cerr << "audit failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
