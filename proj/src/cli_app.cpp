#include "asuq/cli_app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "asuq/pipelines.hpp"

namespace asuq {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct CliConfig {
  std::string model;
  SparseTailSpec model_options;
  std::string method;
  std::uint64_t seed = 2026;
  std::int64_t mc_samples = 100000;
  AsNipcOptions nipc;
  AsAmtcOptions amtc;
  ConvergenceOptions conv;
  bool has_budgets = false;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

const json* field(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_double(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError("field '" + name + "' must be a number");
  return v.get<double>();
}

std::int64_t get_int(const json& v, const std::string& name) {
  if (!v.is_number_integer()) throw ConfigError("field '" + name + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError("field '" + name + "' must be a string");
  return v.get<std::string>();
}

DimPolicy parse_dim_policy(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("field '" + where + "' must be an object");
  check_keys(obj, where, {"kind", "m", "threshold"});
  const json* kind = field(obj, "kind");
  if (!kind) throw ConfigError("missing field '" + where + ".kind'");
  const std::string k = get_string(*kind, where + ".kind");
  if (k == "manual") {
    const json* m = field(obj, "m");
    if (!m) throw ConfigError("missing field '" + where + ".m'");
    return DimPolicy::manual(static_cast<int>(get_int(*m, where + ".m")));
  }
  if (k == "gap") {
    double thr = DimPolicy{}.ratio_threshold;
    if (const json* t = field(obj, "threshold")) thr = get_double(*t, where + ".threshold");
    return DimPolicy::gap(thr);
  }
  throw ConfigError("field '" + where + ".kind' must be 'manual' or 'gap'");
}

SolveOptions parse_solver(const json& obj, const std::string& where, SolveOptions out) {
  if (!obj.is_object()) throw ConfigError("field '" + where + "' must be an object");
  check_keys(obj, where, {"tol", "max_iters", "restarts", "accept_tol", "fd_jacobian"});
  if (const json* v = field(obj, "tol")) out.tol = get_double(*v, where + ".tol");
  if (const json* v = field(obj, "max_iters")) out.max_iters = static_cast<int>(get_int(*v, where + ".max_iters"));
  if (const json* v = field(obj, "restarts")) out.restarts = static_cast<int>(get_int(*v, where + ".restarts"));
  if (const json* v = field(obj, "accept_tol")) out.accept_tol = get_double(*v, where + ".accept_tol");
  if (const json* v = field(obj, "fd_jacobian")) {
    if (!v->is_boolean()) throw ConfigError("field '" + where + ".fd_jacobian' must be a boolean");
    out.fd_jacobian = v->get<bool>();
  }
  return out;
}

GramOptions parse_gram(const json& obj, const std::string& where, GramOptions out) {
  if (!obj.is_object()) throw ConfigError("field '" + where + "' must be an object");
  check_keys(obj, where, {"estimator", "nodes_per_dim", "mc_samples"});
  if (const json* v = field(obj, "estimator")) {
    const std::string e = get_string(*v, where + ".estimator");
    if (e == "auto") {
      out.estimator = GramEstimator::Auto;
    } else if (e == "tensor-gauss") {
      out.estimator = GramEstimator::TensorGauss;
    } else if (e == "monte-carlo") {
      out.estimator = GramEstimator::MonteCarlo;
    } else {
      throw ConfigError("field '" + where + ".estimator' must be 'auto', 'tensor-gauss' or 'monte-carlo'");
    }
  }
  if (const json* v = field(obj, "nodes_per_dim")) {
    out.nodes_per_dim = static_cast<int>(get_int(*v, where + ".nodes_per_dim"));
  }
  if (const json* v = field(obj, "mc_samples")) out.mc_samples = get_int(*v, where + ".mc_samples");
  return out;
}

CliConfig parse_config(const json& root) {
  if (!root.is_object()) throw ConfigError("configuration root must be an object");
  check_keys(root, "the configuration",
             {"model", "model_options", "method", "seed", "mc", "as_nipc", "as_amtc", "convergence"});

  CliConfig cfg;
  const json* model = field(root, "model");
  if (!model) throw ConfigError("missing field 'model'");
  cfg.model = get_string(*model, "model");
  if (cfg.model != "piston" && cfg.model != "sparse-tail") {
    throw ConfigError("unknown model '" + cfg.model + "' in field 'model'");
  }

  if (const json* mo = field(root, "model_options")) {
    if (!mo->is_object()) throw ConfigError("field 'model_options' must be an object");
    check_keys(*mo, "model_options", {"d_ns", "d_s", "chain_length", "seed"});
    if (const json* v = field(*mo, "d_ns")) cfg.model_options.d_ns = static_cast<int>(get_int(*v, "model_options.d_ns"));
    if (const json* v = field(*mo, "d_s")) cfg.model_options.d_s = static_cast<int>(get_int(*v, "model_options.d_s"));
    if (const json* v = field(*mo, "chain_length")) {
      cfg.model_options.chain_length = static_cast<int>(get_int(*v, "model_options.chain_length"));
    }
    if (const json* v = field(*mo, "seed")) {
      cfg.model_options.seed = static_cast<std::uint64_t>(get_int(*v, "model_options.seed"));
    }
  }

  if (const json* m = field(root, "method")) {
    cfg.method = get_string(*m, "method");
    if (cfg.method != "mc" && cfg.method != "as-nipc" && cfg.method != "as-amtc") {
      throw ConfigError("field 'method' must be 'mc', 'as-nipc' or 'as-amtc'");
    }
  }

  if (const json* s = field(root, "seed")) cfg.seed = static_cast<std::uint64_t>(get_int(*s, "seed"));

  if (const json* mc = field(root, "mc")) {
    if (!mc->is_object()) throw ConfigError("field 'mc' must be an object");
    check_keys(*mc, "mc", {"samples"});
    if (const json* v = field(*mc, "samples")) cfg.mc_samples = get_int(*v, "mc.samples");
    if (cfg.mc_samples < 1) throw ConfigError("field 'mc.samples' must be positive");
  }

  if (const json* o = field(root, "as_nipc")) {
    if (!o->is_object()) throw ConfigError("field 'as_nipc' must be an object");
    check_keys(*o, "as_nipc",
               {"k", "pce_degree", "n_nodes", "gradient_samples", "dim_policy", "solver", "gram"});
    if (const json* v = field(*o, "k")) cfg.nipc.k = static_cast<int>(get_int(*v, "as_nipc.k"));
    if (const json* v = field(*o, "pce_degree")) {
      cfg.nipc.pce_degree = static_cast<int>(get_int(*v, "as_nipc.pce_degree"));
    }
    if (const json* v = field(*o, "n_nodes")) cfg.nipc.n_nodes = get_int(*v, "as_nipc.n_nodes");
    if (const json* v = field(*o, "gradient_samples")) {
      cfg.nipc.n_gradient_samples = static_cast<int>(get_int(*v, "as_nipc.gradient_samples"));
    }
    if (const json* v = field(*o, "dim_policy")) cfg.nipc.policy = parse_dim_policy(*v, "as_nipc.dim_policy");
    if (const json* v = field(*o, "solver")) cfg.nipc.solve = parse_solver(*v, "as_nipc.solver", cfg.nipc.solve);
    if (const json* v = field(*o, "gram")) cfg.nipc.gram = parse_gram(*v, "as_nipc.gram", cfg.nipc.gram);
  }

  if (const json* o = field(root, "as_amtc")) {
    if (!o->is_object()) throw ConfigError("field 'as_amtc' must be an object");
    check_keys(*o, "as_amtc",
               {"sr_threshold", "k_core", "k_sparse", "pce_degree", "pce_degree_sparse",
                "n_core_nodes", "gradient_samples", "dim_policy", "solver", "gram"});
    if (const json* v = field(*o, "sr_threshold")) {
      cfg.amtc.sr_threshold = get_double(*v, "as_amtc.sr_threshold");
    }
    if (const json* v = field(*o, "k_core")) cfg.amtc.k_core = static_cast<int>(get_int(*v, "as_amtc.k_core"));
    if (const json* v = field(*o, "k_sparse")) {
      cfg.amtc.k_sparse = static_cast<int>(get_int(*v, "as_amtc.k_sparse"));
    }
    if (const json* v = field(*o, "pce_degree")) {
      cfg.amtc.pce_degree = static_cast<int>(get_int(*v, "as_amtc.pce_degree"));
    }
    if (const json* v = field(*o, "pce_degree_sparse")) {
      cfg.amtc.pce_degree_sparse = static_cast<int>(get_int(*v, "as_amtc.pce_degree_sparse"));
    }
    if (const json* v = field(*o, "n_core_nodes")) cfg.amtc.n_core_nodes = get_int(*v, "as_amtc.n_core_nodes");
    if (const json* v = field(*o, "gradient_samples")) {
      cfg.amtc.n_gradient_samples = static_cast<int>(get_int(*v, "as_amtc.gradient_samples"));
    }
    if (const json* v = field(*o, "dim_policy")) cfg.amtc.policy = parse_dim_policy(*v, "as_amtc.dim_policy");
    if (const json* v = field(*o, "solver")) cfg.amtc.solve = parse_solver(*v, "as_amtc.solver", cfg.amtc.solve);
    if (const json* v = field(*o, "gram")) cfg.amtc.gram = parse_gram(*v, "as_amtc.gram", cfg.amtc.gram);
  }

  if (const json* o = field(root, "convergence")) {
    if (!o->is_object()) throw ConfigError("field 'convergence' must be an object");
    check_keys(*o, "convergence", {"methods", "budgets", "repeats", "oracle_samples"});
    if (const json* v = field(*o, "methods")) {
      if (!v->is_array()) throw ConfigError("field 'convergence.methods' must be an array");
      cfg.conv.methods.clear();
      for (const json& e : *v) cfg.conv.methods.push_back(get_string(e, "convergence.methods"));
    }
    if (const json* v = field(*o, "budgets")) {
      if (!v->is_array()) throw ConfigError("field 'convergence.budgets' must be an array");
      cfg.has_budgets = true;
      for (const json& e : *v) cfg.conv.budgets.push_back(get_int(e, "convergence.budgets"));
      if (cfg.conv.budgets.empty()) throw ConfigError("field 'convergence.budgets' must be non-empty");
    }
    if (const json* v = field(*o, "repeats")) {
      cfg.conv.repeats = static_cast<int>(get_int(*v, "convergence.repeats"));
    }
    if (const json* v = field(*o, "oracle_samples")) {
      cfg.conv.oracle_samples = get_int(*v, "convergence.oracle_samples");
    }
  }
  if (cfg.conv.methods.empty()) cfg.conv.methods = {"mc", "as-nipc"};
  return cfg;
}

CliConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(root);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("failed to write " + path.string());
}

ordered_json dim_policy_json(const DimPolicy& p) {
  ordered_json j;
  if (p.kind == DimPolicy::Kind::Manual) {
    j["kind"] = "manual";
    j["m"] = p.manual_m;
  } else {
    j["kind"] = "gap";
    j["threshold"] = p.ratio_threshold;
  }
  return j;
}

ordered_json solver_json(const SolveOptions& s) {
  ordered_json j;
  j["tol"] = s.tol;
  j["max_iters"] = s.max_iters;
  j["restarts"] = s.restarts;
  j["accept_tol"] = s.accept_tol;
  j["fd_jacobian"] = s.fd_jacobian;
  return j;
}

ordered_json gram_json(const GramOptions& g) {
  ordered_json j;
  j["estimator"] = g.estimator == GramEstimator::Auto         ? "auto"
                   : g.estimator == GramEstimator::TensorGauss ? "tensor-gauss"
                                                               : "monte-carlo";
  j["nodes_per_dim"] = g.nodes_per_dim;
  j["mc_samples"] = g.mc_samples;
  return j;
}

ordered_json settings_json(const CliConfig& cfg, const std::string& command, int jobs) {
  ordered_json j;
  j["command"] = command;
  j["model"] = cfg.model;
  if (cfg.model == "sparse-tail") {
    j["model_options"] = {{"d_ns", cfg.model_options.d_ns},
                          {"d_s", cfg.model_options.d_s},
                          {"chain_length", cfg.model_options.chain_length},
                          {"seed", cfg.model_options.seed}};
  }
  if (!cfg.method.empty()) j["method"] = cfg.method;
  j["seed"] = cfg.seed;
  j["jobs"] = jobs;
  if (command == "run") {
    if (cfg.method == "mc") {
      j["mc"] = {{"samples", cfg.mc_samples}};
    } else if (cfg.method == "as-nipc") {
      ordered_json o;
      o["k"] = cfg.nipc.k;
      o["pce_degree"] = cfg.nipc.pce_degree < 0 ? (cfg.nipc.k - 1) / 2 : cfg.nipc.pce_degree;
      o["n_nodes"] = cfg.nipc.n_nodes;
      o["gradient_samples"] = cfg.nipc.n_gradient_samples;
      o["dim_policy"] = dim_policy_json(cfg.nipc.policy);
      o["solver"] = solver_json(cfg.nipc.solve);
      o["gram"] = gram_json(cfg.nipc.gram);
      j["as_nipc"] = o;
    } else if (cfg.method == "as-amtc") {
      ordered_json o;
      o["sr_threshold"] = cfg.amtc.sr_threshold;
      o["k_core"] = cfg.amtc.k_core;
      o["k_sparse"] = cfg.amtc.k_sparse;
      o["pce_degree"] = cfg.amtc.pce_degree < 0 ? (cfg.amtc.k_core - 1) / 2 : cfg.amtc.pce_degree;
      o["pce_degree_sparse"] =
          cfg.amtc.pce_degree_sparse < 0 ? cfg.amtc.k_sparse - 1 : cfg.amtc.pce_degree_sparse;
      o["n_core_nodes"] = cfg.amtc.n_core_nodes;
      o["gradient_samples"] = cfg.amtc.n_gradient_samples;
      o["dim_policy"] = dim_policy_json(cfg.amtc.policy);
      o["solver"] = solver_json(cfg.amtc.solve);
      o["gram"] = gram_json(cfg.amtc.gram);
      j["as_amtc"] = o;
    }
  } else if (command == "convergence") {
    ordered_json o;
    o["methods"] = cfg.conv.methods;
    o["budgets"] = cfg.conv.budgets;
    o["repeats"] = cfg.conv.repeats;
    o["oracle_samples"] = cfg.conv.oracle_samples;
    j["convergence"] = o;
  } else if (command == "dump-graph") {
    j["sr_threshold"] = cfg.amtc.sr_threshold;
  }
  return j;
}

void write_manifest(const std::filesystem::path& dir, const CliConfig& cfg, const std::string& command,
                    int jobs, std::vector<std::string> outputs) {
  ordered_json j = settings_json(cfg, command, jobs);
  outputs.push_back("manifest.json");
  j["outputs"] = outputs;
  write_file(dir / "manifest.json", j.dump(2) + "\n");
}

std::string sanitize_note(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n') c = ';';
  }
  return s;
}

int cmd_run(const CliConfig& cfg, const std::filesystem::path& out_dir, int jobs) {
  if (cfg.method.empty()) throw ConfigError("missing field 'method'");
  const ModelBundle model = make_model(cfg.model, cfg.model_options);

  UqResult res;
  if (cfg.method == "mc") {
    res = run_mc(model.eval, model.rv, cfg.mc_samples, derive_seed(cfg.seed, kSeedMc));
  } else if (cfg.method == "as-nipc") {
    AsNipcOptions o = cfg.nipc;
    o.seed = cfg.seed;
    res = run_as_nipc(model.eval, model.gradient, model.rv, o);
  } else {
    AsAmtcOptions o = cfg.amtc;
    o.seed = cfg.seed;
    res = run_as_amtc(*model.graph, model.gradient, model.rv, o);
  }

  std::vector<std::string> outputs;
  std::string csv =
      "method,mean,variance,n_model_evals,n_gradient_samples,weighted_op_cost,naive_op_cost,seed,notes\n";
  csv += res.method + "," + fmt(res.mean) + "," + fmt(res.variance) + "," +
         std::to_string(res.n_model_evals) + "," + std::to_string(res.n_gradient_samples) + "," +
         fmt(res.weighted_op_cost) + "," + fmt(res.naive_op_cost) + "," + std::to_string(res.seed) +
         "," + sanitize_note(res.notes) + "\n";
  write_file(out_dir / "results.csv", csv);
  outputs.push_back("results.csv");

  if (res.eigenvalues.size() > 0) {
    std::string eig = "rank,lambda,ratio\n";
    for (Eigen::Index i = 0; i < res.eigenvalues.size(); ++i) {
      eig += std::to_string(i + 1) + "," + fmt(res.eigenvalues[i]) + "," +
             fmt(res.eigenvalues[i] / res.eigenvalues[0]) + "\n";
    }
    write_file(out_dir / "eigenvalues.csv", eig);
    outputs.push_back("eigenvalues.csv");
  }

  if (res.surrogate.alpha.size() > 0) {
    std::string coef = "index,label,value\n";
    for (Eigen::Index i = 0; i < res.surrogate.alpha.size(); ++i) {
      const std::string& label =
          res.surrogate.labels.empty() ? "" : res.surrogate.labels[static_cast<std::size_t>(i)];
      coef += std::to_string(i) + "," + label + "," + fmt(res.surrogate.alpha[i]) + "\n";
    }
    write_file(out_dir / "coefficients.csv", coef);
    outputs.push_back("coefficients.csv");
  }

  if (res.rule.nodes.rows() > 0) {
    std::string rule = "weight";
    for (int g : res.rule.inputs) rule += ",u" + std::to_string(g);
    rule += "\n";
    for (Eigen::Index i = 0; i < res.rule.nodes.rows(); ++i) {
      rule += fmt(res.rule.weights[i]);
      for (Eigen::Index c = 0; c < res.rule.nodes.cols(); ++c) rule += "," + fmt(res.rule.nodes(i, c));
      rule += "\n";
    }
    write_file(out_dir / "rule.csv", rule);
    outputs.push_back("rule.csv");

    ordered_json rj;
    rj["inputs"] = res.rule.inputs;
    rj["weights"] = std::vector<double>(res.rule.weights.data(), res.rule.weights.data() + res.rule.weights.size());
    rj["nodes"] = ordered_json::array();
    for (Eigen::Index i = 0; i < res.rule.nodes.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(res.rule.nodes.cols()));
      for (Eigen::Index c = 0; c < res.rule.nodes.cols(); ++c) row[static_cast<std::size_t>(c)] = res.rule.nodes(i, c);
      rj["nodes"].push_back(row);
    }
    rj["residual_norm"] = res.rule.residual_norm;
    rj["factors"] = ordered_json::array();
    for (const RuleFactor& f : res.rule.factors) {
      ordered_json fj;
      fj["inputs"] = f.inputs;
      fj["weights"] = std::vector<double>(f.weights.data(), f.weights.data() + f.weights.size());
      fj["nodes"] = ordered_json::array();
      for (Eigen::Index i = 0; i < f.nodes.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(f.nodes.cols()));
        for (Eigen::Index c = 0; c < f.nodes.cols(); ++c) row[static_cast<std::size_t>(c)] = f.nodes(i, c);
        fj["nodes"].push_back(row);
      }
      rj["factors"].push_back(fj);
    }
    write_file(out_dir / "rule.json", rj.dump(2) + "\n");
    outputs.push_back("rule.json");
  }

  write_manifest(out_dir, cfg, "run", jobs, outputs);
  return 0;
}

int cmd_convergence(CliConfig cfg, const std::filesystem::path& out_dir, int jobs) {
  if (!cfg.has_budgets) throw ConfigError("missing field 'convergence.budgets'");
  const ModelBundle model = make_model(cfg.model, cfg.model_options);
  cfg.conv.seed = cfg.seed;
  cfg.conv.jobs = jobs;
  const std::vector<ConvergenceRow> rows = convergence_study(model, cfg.conv);

  std::string csv = "method,budget,repeat,mean,variance,rel_error,evals,op_cost,seconds\n";
  for (const ConvergenceRow& r : rows) {
    csv += r.method + "," + std::to_string(r.budget) + "," + std::to_string(r.repeat) + "," +
           fmt(r.mean) + "," + fmt(r.variance) + "," + fmt(r.rel_error) + "," +
           std::to_string(r.evals) + "," + fmt(r.op_cost) + "," + fmt(r.seconds) + "\n";
  }
  write_file(out_dir / "convergence.csv", csv);
  write_manifest(out_dir, cfg, "convergence", jobs, {"convergence.csv"});
  return 0;
}

int cmd_dump_graph(const CliConfig& cfg, const std::filesystem::path& out_dir, int jobs) {
  const ModelBundle model = make_model(cfg.model, cfg.model_options);
  write_file(out_dir / "graph.json", model.graph->to_json(2) + "\n");

  const auto [sparse, rest] = model.graph->identify_sparse_inputs(cfg.amtc.sr_threshold);
  std::string csv = "input,sparsity_ratio,is_sparse\n";
  for (int g : model.graph->input_indices()) {
    const bool is_sparse = std::binary_search(sparse.begin(), sparse.end(), g);
    csv += std::to_string(g) + "," + fmt(model.graph->sparsity_ratio(g)) + "," +
           (is_sparse ? "1" : "0") + "\n";
  }
  write_file(out_dir / "sr.csv", csv);
  write_manifest(out_dir, cfg, "dump-graph", jobs, {"graph.json", "sr.csv"});
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Active-subspace uncertainty quantification with designed quadrature"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int jobs = 1;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (created if absent)");
    sub->add_option("--jobs", jobs, "worker threads for study cells");
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](const std::uint64_t& s) {
          seed_override = s;
          has_seed_override = true;
        },
        "override the master seed from the config");
  };
  CLI::App* run = app.add_subcommand("run", "estimate mean and variance with one method");
  CLI::App* conv = app.add_subcommand("convergence", "error-versus-budget study against an MC oracle");
  CLI::App* dump = app.add_subcommand("dump-graph", "write the model graph and per-input sparsity ratios");
  add_common(run);
  add_common(conv);
  add_common(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CliConfig cfg = load_config(config_path);
    if (has_seed_override) cfg.seed = seed_override;
    if (jobs < 1) throw ConfigError("--jobs must be >= 1");

    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    if (run->parsed()) return cmd_run(cfg, dir, jobs);
    if (conv->parsed()) return cmd_convergence(cfg, dir, jobs);
    return cmd_dump_graph(cfg, dir, jobs);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace asuq
