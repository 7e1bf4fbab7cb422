#include "cli.hpp"

#include "genval/embedding_store.hpp"
#include "genval/errors.hpp"
#include "genval/quantizer.hpp"
#include "genval/search.hpp"
#include "genval/stats.hpp"
#include "genval/synth.hpp"
#include "genval/valuation.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace genval::cli {

namespace {

using json = nlohmann::json;

// Destination for a command's data: --out file if given, else stdout.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty() || cfg.out == "-") {
    out << text;
    out.flush();
  } else {
    write_file(cfg.out, text);
  }
}

std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
  }
  return read_file(path);
}

void require(const std::string& value, const char* flag, const char* command) {
  if (value.empty()) throw ConfigError(std::string(command) + " requires " + flag);
}

EmbeddingMatrix load(const std::string& path, const RunConfig& cfg) {
  return load_embeddings(path, format_from_extension(path), CsvOptions{cfg.csv_header});
}

// Flat JSON keys map onto long flag names; '_' and '-' are interchangeable.
void apply_config_file(CLI::App& sub, const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config '" + path + "' must be a flat JSON object");
  for (const auto& [key, value] : doc.items()) {
    std::string flag = key;
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    CLI::Option* opt = sub.get_option_no_throw("--" + flag);
    if (opt == nullptr || opt->count() > 0) continue;  // unknown to this command, or given on the command line
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      if (!value.get<bool>()) continue;
      text = "true";
    } else if (value.is_number()) {
      text = value.dump();
    } else {
      throw ConfigError("config key '" + key + "' must be a string, number or boolean");
    }
    opt->add_result(text);
    opt->run_callback();
  }
}

MatchTables compute_matches(const RunConfig& cfg, Index* n_out) {
  require(cfg.generated, "--generated", "matching");
  const EmbeddingMatrix generated = load(cfg.generated, cfg);
  if (cfg.k < 1) throw ConfigError("--k must be positive");
  if (cfg.mode == "exact") {
    require(cfg.train, "--train", "exact matching");
    const EmbeddingMatrix training = load(cfg.train, cfg);
    if (n_out) *n_out = training.rows();
    return batch_match(training, generated, cfg.k, cfg.threads);
  }
  if (cfg.mode == "pq") {
    if (cfg.index.empty()) throw ConfigError("pq mode requires --index (build one with build-index)");
    const PQIndex index = load_index(cfg.index);
    if (n_out) *n_out = index.count();
    return batch_match(index, generated, cfg.k, cfg.threads);
  }
  throw ConfigError("--mode must be exact or pq, got '" + cfg.mode + "'");
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  require(cfg.out_dir, "--out-dir", "synth");
  ExperimentSpec spec;
  spec.dim = cfg.dim;
  spec.n_per_split = cfg.n_per_split;
  spec.mixture_components = cfg.components;
  spec.component_spread = cfg.spread;
  spec.noise_sigma = cfg.noise_sigma;
  spec.m_generated = cfg.m_generated;
  spec.seed = cfg.seed;
  const ExperimentFiles manifest = write_experiment(spec, cfg.out_dir);
  for (const auto& name : {manifest.x_v1, manifest.x_v2, manifest.train, manifest.generated, manifest.partition,
                           manifest.manifest}) {
    out << manifest.path(name).string() << "\n";
  }
  return kOk;
}

int cmd_build_index(const RunConfig& cfg, std::ostream& out) {
  require(cfg.train, "--train", "build-index");
  require(cfg.out, "--out", "build-index");
  const EmbeddingMatrix training = load(cfg.train, cfg);
  PQConfig pq;
  pq.num_subspaces = cfg.num_subspaces;
  pq.codebook_size = cfg.codebook_size;
  pq.kmeans_iters = cfg.kmeans_iters;
  pq.seed = cfg.seed;
  PQIndex index;
  index.codebook = train_codebooks(training, pq, cfg.threads);
  index.codes = encode(training, index.codebook);
  save_index(index, cfg.out);
  out << "quantization_error=" << format_sig9(quantization_error(training, index.codebook)) << "\n";
  return kOk;
}

int cmd_match(const RunConfig& cfg, std::ostream& out) {
  emit(cfg, out, format_matches(compute_matches(cfg, nullptr)));
  return kOk;
}

int cmd_value(const RunConfig& cfg, std::istream& in, std::ostream& out) {
  MatchTables tables;
  Index n = cfg.n;
  if (cfg.inline_match) {
    Index inferred = 0;
    tables = compute_matches(cfg, &inferred);
    // Same rounding a match -> value pipe goes through.
    round_to_export_precision(tables);
    n = inferred;
  } else {
    require(cfg.matches, "--matches (or --inline)", "value");
    tables = parse_matches(read_input(cfg.matches, in));
    if (n <= 0 && !cfg.train.empty()) n = load(cfg.train, cfg).rows();
    if (n <= 0 && !cfg.index.empty()) n = load_index(cfg.index).count();
    if (n <= 0) throw ConfigError("value needs the training count: pass --n, --train or --index");
  }
  const ValuationResult result = aggregate_values(tables, n, cfg.temperature, cfg.threads);
  const double mass = result.values.sum();
  const double m = static_cast<double>(result.m);
  if (std::fabs(mass - m) > 1e-6 * std::max(m, 1.0)) {
    throw InternalError("value mass " + format_sig9(mass) + " differs from generated count " + format_sig9(m));
  }
  emit(cfg, out, format_values_csv(result));
  if (!cfg.summary.empty()) write_file(cfg.summary, format_summary_json(result));
  return kOk;
}

std::vector<double> select(const Vector<double>& values, const json& indices, const char* group) {
  if (!indices.is_array()) throw FormatError(std::string("partition group '") + group + "' must be an array");
  std::vector<double> out;
  for (const auto& idx : indices) {
    if (!idx.is_number_integer()) throw FormatError("partition indices must be integers");
    const auto i = idx.get<Index>();
    if (i < 0 || i >= values.size()) {
      throw ValidationError("partition index " + std::to_string(i) + " outside value table of size " +
                            std::to_string(values.size()));
    }
    out.push_back(values[i]);
  }
  return out;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  std::vector<double> a, b;
  std::string name_a = "a", name_b = "b";
  if (!cfg.values.empty() || !cfg.partition.empty()) {
    require(cfg.values, "--values", "compare with --partition");
    require(cfg.partition, "--partition", "compare with --values");
    const Vector<double> values = parse_values_csv(read_file(cfg.values));
    json part;
    try {
      part = json::parse(read_file(cfg.partition));
    } catch (const json::exception& e) {
      throw FormatError("partition '" + cfg.partition + "': " + e.what());
    }
    if (!part.is_object() || !part.contains("a") || !part.contains("b")) {
      throw FormatError("partition JSON must have arrays \"a\" and \"b\"");
    }
    a = select(values, part["a"], "a");
    b = select(values, part["b"], "b");
    name_a = part.value("a_name", name_a);
    name_b = part.value("b_name", name_b);
  } else {
    require(cfg.values_a, "--a", "compare");
    require(cfg.values_b, "--b", "compare");
    const Vector<double> va = parse_values_csv(read_file(cfg.values_a));
    const Vector<double> vb = parse_values_csv(read_file(cfg.values_b));
    a.assign(va.data(), va.data() + va.size());
    b.assign(vb.data(), vb.data() + vb.size());
  }
  const TTestResult r = welch_t_test(a, b);
  std::string report;
  report += "H1: mean(" + name_a + ") > mean(" + name_b + "), one-sided Welch t-test\n";
  report += "average value (" + name_a + "): " + format_sig9(r.mean_a) + "  variance " + format_sig9(r.var_a) +
            "  n " + std::to_string(r.n_a) + "\n";
  report += "average value (" + name_b + "): " + format_sig9(r.mean_b) + "  variance " + format_sig9(r.var_b) +
            "  n " + std::to_string(r.n_b) + "\n";
  report += "t-statistic: " + format_sig9(r.t_statistic) + "\n";
  report += "degrees of freedom: " + format_sig9(r.degrees_of_freedom) + "\n";
  report += "p-value: " + format_sig9(r.p_one_sided) + "\n";
  report += "significance level: " + format_sig9(cfg.alpha) + "\n";
  report += r.p_one_sided < cfg.alpha ? "REJECT H0 at alpha=" + format_sig9(cfg.alpha) + "\n" : "FAIL TO REJECT\n";
  emit(cfg, out, report);
  return kOk;
}

int cmd_eval_recall(const RunConfig& cfg, std::ostream& out) {
  MatchTables approx, exact;
  if (!cfg.approx.empty() || !cfg.exact.empty()) {
    require(cfg.approx, "--approx", "eval-recall");
    require(cfg.exact, "--exact", "eval-recall");
    approx = parse_matches(read_file(cfg.approx));
    exact = parse_matches(read_file(cfg.exact));
  } else {
    require(cfg.train, "--train", "eval-recall");
    require(cfg.index, "--index", "eval-recall");
    RunConfig exact_cfg = cfg;
    exact_cfg.mode = "exact";
    RunConfig pq_cfg = cfg;
    pq_cfg.mode = "pq";
    exact = compute_matches(exact_cfg, nullptr);
    approx = compute_matches(pq_cfg, nullptr);
  }
  if (approx.m() != exact.m() || approx.k() != exact.k()) {
    throw ValidationError("table shape mismatch: approx " + std::to_string(approx.m()) + "x" +
                          std::to_string(approx.k()) + " vs exact " + std::to_string(exact.m()) + "x" +
                          std::to_string(exact.k()));
  }
  std::string report = "queries=" + std::to_string(approx.m()) + " k=" + std::to_string(approx.k()) + "\n";
  for (Index depth : {Index{1}, Index{10}}) {
    report += "recall@" + std::to_string(depth) + "=";
    report += depth <= approx.k() ? format_sig9(recall_at_k(approx, exact, depth)) : "n/a";
    report += "\n";
  }
  if (approx.k() != 1 && approx.k() != 10) {
    report += "recall@" + std::to_string(approx.k()) + "=" + format_sig9(recall_at_k(approx, exact)) + "\n";
  }
  emit(cfg, out, report);
  return kOk;
}

int cmd_wasserstein(const RunConfig& cfg, std::ostream& out) {
  require(cfg.source, "--source", "wasserstein");
  require(cfg.target, "--target", "wasserstein");
  const TransportResult r = exact_wasserstein(load(cfg.source, cfg), load(cfg.target, cfg), cfg.p);
  std::string report = "p=" + std::to_string(r.p) + "\ncost=" + format_sig9(r.cost) + "\nassignment=";
  for (std::size_t i = 0; i < r.assignment.size(); ++i) {
    report += (i ? " " : "") + std::to_string(r.assignment[i]);
  }
  report += "\n";
  emit(cfg, out, report);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string config_path;

  CLI::App app{"Training-free data valuation for generative models via top-k matching", "genval"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file of flat flag=value defaults; flags win");
  };
  auto add_csv_header = [&](CLI::App* sub) {
    sub->add_flag("--header", cfg.csv_header, "CSV embedding inputs have a header line");
  };
  auto add_match_inputs = [&](CLI::App* sub) {
    sub->add_option("--train", cfg.train, "training embeddings (EMBX or .csv)");
    sub->add_option("--generated", cfg.generated, "generated embeddings (EMBX or .csv)");
    sub->add_option("--index", cfg.index, "GMVI index for pq mode");
    sub->add_option("--mode", cfg.mode, "exact or pq")->check(CLI::IsMember({"exact", "pq"}));
    sub->add_option("--k", cfg.k, "neighbors per generated point (default 10)");
    sub->add_option("--threads", cfg.threads, "worker threads; output is identical for any value");
    add_csv_header(sub);
  };

  auto* synth = app.add_subcommand("synth", "write a synthetic two-split experiment");
  synth->add_option("--out-dir", cfg.out_dir, "output directory");
  synth->add_option("--dim", cfg.dim);
  synth->add_option("--n-per-split", cfg.n_per_split);
  synth->add_option("--components", cfg.components);
  synth->add_option("--spread", cfg.spread);
  synth->add_option("--noise-sigma", cfg.noise_sigma);
  synth->add_option("--m", cfg.m_generated, "generated count");
  synth->add_option("--seed", cfg.seed);
  add_config(synth);

  auto* build = app.add_subcommand("build-index", "train PQ codebooks and write a GMVI index");
  build->add_option("--train", cfg.train, "training embeddings");
  build->add_option("--out", cfg.out, "index output path");
  build->add_option("--num-subspaces", cfg.num_subspaces, "M (default 8)");
  build->add_option("--codebook-size", cfg.codebook_size, "Ks (default 256)");
  build->add_option("--kmeans-iters", cfg.kmeans_iters, "Lloyd iterations (default 25)");
  build->add_option("--seed", cfg.seed);
  build->add_option("--threads", cfg.threads);
  add_csv_header(build);
  add_config(build);

  auto* match = app.add_subcommand("match", "emit top-k distance/index tables as JSON lines");
  add_match_inputs(match);
  match->add_option("--out", cfg.out, "output path (default stdout)");
  add_config(match);

  auto* value = app.add_subcommand("value", "turn match tables into per-training-point values");
  value->add_option("--matches", cfg.matches, "JSON-lines match tables ('-' for stdin)");
  value->add_flag("--inline", cfg.inline_match, "run matching in-process instead of reading --matches");
  value->add_option("--n", cfg.n, "training count (else taken from --train or --index)");
  value->add_option("--temperature", cfg.temperature, "softmax temperature (default 1)");
  value->add_option("--out", cfg.out, "value CSV path (default stdout)");
  value->add_option("--summary", cfg.summary, "JSON summary path");
  add_match_inputs(value);
  add_config(value);

  auto* compare = app.add_subcommand("compare", "one-sided Welch t-test between two value groups");
  compare->add_option("--a", cfg.values_a, "value CSV of group a");
  compare->add_option("--b", cfg.values_b, "value CSV of group b");
  compare->add_option("--values", cfg.values, "value CSV split by --partition");
  compare->add_option("--partition", cfg.partition, "JSON {\"a\": [...], \"b\": [...]}");
  compare->add_option("--alpha", cfg.alpha, "significance level (default 0.01)");
  compare->add_option("--out", cfg.out);
  add_config(compare);

  auto* recall = app.add_subcommand("eval-recall", "recall of PQ matching against exact matching");
  recall->add_option("--approx", cfg.approx, "approximate match JSON lines");
  recall->add_option("--exact", cfg.exact, "exact match JSON lines");
  recall->add_option("--out", cfg.out);
  add_match_inputs(recall);
  add_config(recall);

  auto* wasser = app.add_subcommand("wasserstein", "exact W_p between two equal-size point sets");
  wasser->add_option("--source", cfg.source);
  wasser->add_option("--target", cfg.target);
  wasser->add_option("--p", cfg.p)->check(CLI::IsMember({1, 2}));
  wasser->add_option("--out", cfg.out);
  add_csv_header(wasser);
  add_config(wasser);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config_path.empty()) apply_config_file(*sub, config_path);
    if (cfg.threads < 1) throw ConfigError("--threads must be at least 1");
    const std::string name = sub->get_name();
    if (name == "synth") return cmd_synth(cfg, out);
    if (name == "build-index") return cmd_build_index(cfg, out);
    if (name == "match") return cmd_match(cfg, out);
    if (name == "value") return cmd_value(cfg, in, out);
    if (name == "compare") return cmd_compare(cfg, out);
    if (name == "eval-recall") return cmd_eval_recall(cfg, out);
    if (name == "wasserstein") return cmd_wasserstein(cfg, out);
    throw InternalError("unhandled subcommand " + name);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace genval::cli
