// gap: graph partitioning toolkit command-line interface.
//
// Subcommands: generate, train, infer, eval, oracle, bench. Every run writes
// a resolved-config copy into its output directory so it can be reproduced
// exactly. Exit codes: 0 success, 2 validation error, 3 numeric failure,
// 4 I/O error.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include "gap/baselines.hpp"
#include "gap/bench.hpp"
#include "gap/checkpoint.hpp"
#include "gap/errors.hpp"
#include "gap/fsutil.hpp"
#include "gap/generators.hpp"
#include "gap/graph_io.hpp"
#include "gap/metrics.hpp"
#include "gap/model.hpp"
#include "gap/oracle.hpp"
#include "gap/presets.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gap::cli {

namespace {

json metrics_to_json(const MetricsReport& r) {
  return json{{"edge_cut_ratio", r.edge_cut_ratio},
              {"balancedness", r.balancedness},
              {"best_achievable_balancedness", r.best_achievable_balancedness},
              {"exact_ncut", r.exact_ncut},
              {"expected_ncut", r.expected_ncut},
              {"balance_error", r.balance_error},
              {"partition_sizes", r.partition_sizes},
              {"wall_clock_ms", r.wall_clock_ms}};
}

void write_resolved_config(const RunConfig& cfg, const fs::path& dir) {
  atomic_write_text(dir / "resolved_config.json", run_config_to_json(cfg).dump(2) + "\n");
}

std::string history_csv(const TrainResult& result) {
  std::ostringstream os;
  os << "epoch,loss,expected_ncut,balance_error,edge_cut_ratio,balancedness,val_loss\n";
  for (const auto& rec : result.history)
    os << rec.epoch << "," << rec.loss << "," << rec.expected_ncut << "," << rec.balance_error
       << "," << rec.edge_cut_ratio << "," << rec.balancedness << "," << rec.val_loss << "\n";
  return os.str();
}

std::string config_fingerprint(const RunConfig& cfg) {
  // Digest of the resolved config; stored in checkpoints for provenance.
  const std::string dump = run_config_to_json(cfg).dump();
  return vocabulary_digest({dump});
}

struct GenerateArgs {
  std::string kind = "er";
  int n = 1000;
  double p = 0.1;
  int attach_m = 2;
  int count = 1;
  uint64_t seed = 1;
  std::string out = "generated";
  std::string from_manifest;
};

int cmd_generate(const GenerateArgs& args) {
  json manifest;
  if (!args.from_manifest.empty()) {
    manifest = json::parse(read_text_file(args.from_manifest));
  } else {
    manifest = {{"kind", args.kind}, {"n", args.n},         {"p", args.p},
                {"attach_m", args.attach_m}, {"count", args.count}, {"seed", args.seed}};
  }
  const std::string kind = manifest.at("kind").get<std::string>();
  const int n = manifest.at("n").get<int>();
  const int count = manifest.at("count").get<int>();
  const uint64_t base_seed = manifest.at("seed").get<uint64_t>();
  if (kind != "er" && kind != "scalefree")
    throw validation_error("generate: kind must be 'er' or 'scalefree'");

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  json files = json::array();
  for (int i = 0; i < count; ++i) {
    const uint64_t seed = base_seed + static_cast<uint64_t>(i);
    Graph g = kind == "er"
                  ? generate_erdos_renyi(n, manifest.at("p").get<double>(), seed)
                  : generate_scale_free(n, seed, manifest.at("attach_m").get<int>());
    const std::string stem = kind + "_n" + std::to_string(n) + "_s" + std::to_string(seed);
    write_edge_list(g, out_dir / (stem + ".el"));
    write_metis(g, out_dir / (stem + ".metis"));
    files.push_back({{"stem", stem},
                     {"seed", seed},
                     {"edges", g.num_edges()},
                     {"edge_list", stem + ".el"},
                     {"metis", stem + ".metis"}});
    std::cout << "wrote " << (out_dir / stem).string() << ".{el,metis} (" << g.num_edges()
              << " edges)\n";
  }
  manifest["files"] = files;
  atomic_write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

std::vector<std::string> model_vocab_for_dataset(const RunConfig& cfg) {
  if (!cfg.dataset.vocab.empty()) return load_vocabulary(cfg.dataset.vocab);
  return cfg.model.features.vocab;
}

std::vector<Graph> load_graphs(const std::vector<std::string>& paths, const RunConfig& cfg,
                               const std::vector<std::string>& vocab) {
  std::vector<Graph> graphs;
  for (const auto& p : paths) {
    if (!fs::exists(p)) throw io_error("graph file '" + p + "' does not exist");
    graphs.push_back(load_graph_file(p, cfg.dataset.format, cfg.dataset.weighted, vocab));
  }
  return graphs;
}

int cmd_train(RunConfig cfg, const std::string& resume_path) {
  if (cfg.dataset.train.empty()) throw validation_error("train: no training graphs configured");
  const fs::path out_dir(cfg.output.dir);
  fs::create_directories(out_dir);

  std::vector<std::string> vocab = model_vocab_for_dataset(cfg);
  if (cfg.model.features.kind == FeatureSpec::Kind::onehot) {
    if (vocab.empty()) {
      // Derive a shared vocabulary from the training graphs so every graph
      // encodes features identically.
      std::set<std::string> names;
      for (const auto& path : cfg.dataset.train) {
        Graph g = load_graph_file(path, cfg.dataset.format, cfg.dataset.weighted, {});
        for (const auto& nm : g.feature_names()) names.insert(nm);
      }
      vocab.assign(names.begin(), names.end());
    }
    cfg.model.features.vocab = vocab;
  }

  const std::vector<Graph> train_graphs = load_graphs(cfg.dataset.train, cfg, vocab);
  const std::vector<Graph> val_graphs = load_graphs(cfg.dataset.val, cfg, vocab);

  GapModel model;
  AdamState adam(AdamConfig{cfg.train.learning_rate});
  if (!resume_path.empty()) {
    LoadedCheckpoint loaded = load_checkpoint(resume_path);
    model = std::move(loaded.model);
    if (loaded.optimizer)
      adam.restore(loaded.optimizer->first_moments, loaded.optimizer->second_moments,
                   loaded.optimizer->step_count);
    std::cout << "resumed from " << resume_path << " (optimizer t=" << adam.step_count()
              << ")\n";
  } else {
    model = GapModel::create(cfg.model, cfg.train.seed);
  }

  write_resolved_config(cfg, out_dir);
  TrainResult result = train_graphs.size() == 1 && val_graphs.empty()
                           ? train_single_graph(model, train_graphs[0], cfg.train, &adam)
                           : train_multi_graph(model, train_graphs, val_graphs, cfg.train, &adam);

  atomic_write_text(out_dir / "history.csv", history_csv(result));
  OptimizerSnapshot snap{adam.first_moments(), adam.second_moments(), adam.step_count()};
  save_checkpoint(model, out_dir / "checkpoint.bin", config_fingerprint(cfg), &snap);
  if (cfg.model.features.kind == FeatureSpec::Kind::onehot)
    write_vocabulary(cfg.model.features.vocab, out_dir / "vocab.txt");

  json summary{{"best_epoch", result.best_epoch},
               {"best_loss", result.best_loss},
               {"epochs_run", result.history.size()},
               {"diverged", result.diverged},
               {"wall_clock_ms", result.wall_clock_ms}};
  atomic_write_text(out_dir / "train_summary.json", summary.dump(2) + "\n");
  std::cout << "best epoch " << result.best_epoch << ", best loss " << result.best_loss << "\n";
  if (result.diverged) {
    std::cerr << "training diverged (non-finite loss); best finite state saved\n";
    return 3;
  }
  return 0;
}

int cmd_infer(const std::string& checkpoint, const std::string& graph_path,
              const std::string& format, bool weighted, int requested_g,
              const std::string& out_dir_str) {
  LoadedCheckpoint loaded = load_checkpoint(checkpoint);
  if (requested_g > 0 && requested_g != loaded.model.partitions())
    throw validation_error("requested g=" + std::to_string(requested_g) +
                           " but the checkpoint head is built for g=" +
                           std::to_string(loaded.model.partitions()) +
                           "; g is baked into the model");
  const Graph g = load_graph_file(graph_path, format, weighted,
                                  loaded.model.config().features.vocab);
  const InferResult result = infer(loaded.model, g);
  const fs::path out_dir(out_dir_str);
  fs::create_directories(out_dir);
  write_assignment(result.assignment, out_dir / "assignment.txt");
  atomic_write_text(out_dir / "metrics.json", metrics_to_json(result.metrics).dump(2) + "\n");
  std::cout << "edge_cut_ratio " << result.metrics.edge_cut_ratio << ", balancedness "
            << result.metrics.balancedness << ", wall_clock_ms "
            << result.metrics.wall_clock_ms << "\n";
  return 0;
}

int cmd_eval(const std::string& graph_path, const std::string& assignment_path, int g_parts,
             const std::string& format, bool weighted, const std::string& out_dir_str,
             const std::string& degree_histogram) {
  const Graph g = load_graph_file(graph_path, format, weighted, {});
  PartitionConfig{g_parts}.validate(g.num_nodes());
  const auto assignment = load_assignment(assignment_path, g.num_nodes(), g_parts);
  MetricsReport r = compute_metrics(g, assignment, g_parts);
  const fs::path out_dir(out_dir_str);
  fs::create_directories(out_dir);
  atomic_write_text(out_dir / "metrics.json", metrics_to_json(r).dump(2) + "\n");
  if (!degree_histogram.empty()) {
    std::map<long, long> hist;
    for (double d : degree_vector(g)) ++hist[static_cast<long>(d)];
    std::ostringstream os;
    os << "degree,count\n";
    for (const auto& [deg, count] : hist) os << deg << "," << count << "\n";
    atomic_write_text(out_dir / degree_histogram, os.str());
  }
  std::cout << metrics_to_json(r).dump(2) << "\n";
  return 0;
}

int cmd_oracle(const std::string& graph_path, int g_parts, bool balanced,
               const std::string& format, bool weighted, const std::string& out_dir_str) {
  const Graph g = load_graph_file(graph_path, format, weighted, {});
  const OracleResult r = brute_force_min_ncut(g, g_parts, balanced);
  const fs::path out_dir(out_dir_str);
  fs::create_directories(out_dir);
  write_assignment(r.assignment, out_dir / "oracle_assignment.txt");
  json doc{{"ncut", r.ncut},
           {"enumerated", r.enumerated},
           {"balanced_only", balanced},
           {"partitions", g_parts}};
  atomic_write_text(out_dir / "oracle.json", doc.dump(2) + "\n");
  std::cout << "minimum ncut " << r.ncut << " over " << r.enumerated << " assignments\n";
  return 0;
}

json bench_report_json(const BenchReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"partitioner", c.partitioner},
                     {"graph", c.graph},
                     {"ok_repeats", c.ok_repeats},
                     {"edge_cut_ratio", {{"mean", c.edge_cut_ratio.mean}, {"sd", c.edge_cut_ratio.sd}}},
                     {"balancedness", {{"mean", c.balancedness.mean}, {"sd", c.balancedness.sd}}},
                     {"wall_clock_ms", {{"mean", c.wall_clock_ms.mean}, {"sd", c.wall_clock_ms.sd}}},
                     {"train_time_ms", c.train_time_ms},
                     {"errors", c.errors}});
  }
  return json{{"partitions", report.g_parts}, {"repeats", report.repeats}, {"cells", cells}};
}

int cmd_bench(const RunConfig& cfg) {
  if (cfg.bench.graphs.empty()) throw validation_error("bench: no graphs configured");
  if (cfg.bench.partitioners.empty())
    throw validation_error("bench: no partitioners configured");
  const fs::path out_dir(cfg.output.dir);
  fs::create_directories(out_dir);
  write_resolved_config(cfg, out_dir);

  std::vector<Graph> graphs;
  std::vector<std::pair<std::string, const Graph*>> named;
  for (const auto& path : cfg.bench.graphs)
    graphs.push_back(load_graph_file(path, cfg.dataset.format, cfg.dataset.weighted, {}));
  for (std::size_t i = 0; i < graphs.size(); ++i)
    named.emplace_back(fs::path(cfg.bench.graphs[i]).filename().string(), &graphs[i]);

  // Keep loaded models alive for the duration of the run.
  std::vector<std::shared_ptr<GapModel>> models;
  std::vector<BenchPartitioner> partitioners;
  for (const auto& spec : cfg.bench.partitioners) {
    if (spec.kind == "random") {
      partitioners.push_back({spec.name,
                              [](const Graph& g, int k, uint64_t seed) {
                                return random_partition(g.num_nodes(), k, seed);
                              },
                              0.0});
    } else if (spec.kind == "spectral") {
      partitioners.push_back({spec.name,
                              [](const Graph& g, int k, uint64_t seed) {
                                return spectral_partition(g, k, seed);
                              },
                              0.0});
    } else if (spec.kind == "gap") {
      auto model = std::make_shared<GapModel>(load_checkpoint(spec.checkpoint).model);
      if (model->partitions() != cfg.bench.partitions)
        throw validation_error("bench: checkpoint '" + spec.checkpoint + "' is built for g=" +
                               std::to_string(model->partitions()));
      models.push_back(model);
      partitioners.push_back({spec.name,
                              [model](const Graph& g, int, uint64_t) {
                                return infer(*model, g).assignment;
                              },
                              0.0});
    } else if (spec.kind == "external") {
      ExternalPartitioner ext{spec.command};
      const fs::path workdir = out_dir / ("external_" + spec.name);
      partitioners.push_back({spec.name,
                              [ext, workdir](const Graph& g, int k, uint64_t) {
                                return run_external_partitioner(ext, g, k, workdir);
                              },
                              0.0});
    } else {
      throw validation_error("bench: unknown partitioner kind '" + spec.kind + "'");
    }
  }

  const BenchReport report =
      run_benchmark(partitioners, named, cfg.bench.partitions, cfg.bench.repeats);
  atomic_write_text(out_dir / "bench_report.tsv", report.to_tsv());
  atomic_write_text(out_dir / "bench_report.json", bench_report_json(report).dump(2) + "\n");
  std::cout << report.to_tsv();
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"GAP graph partitioning toolkit"};
  app.require_subcommand(1);

  // generate
  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate synthetic graph datasets");
  generate->add_option("--kind", gen.kind, "er | scalefree");
  generate->add_option("--n", gen.n, "node count");
  generate->add_option("--p", gen.p, "ER edge probability")->check(CLI::Range(0.0, 1.0));
  generate->add_option("--attach-m", gen.attach_m, "scale-free attachment edges");
  generate->add_option("--count", gen.count, "number of graphs");
  generate->add_option("--seed", gen.seed, "base seed");
  generate->add_option("--out", gen.out, "output directory");
  generate->add_option("--from-manifest", gen.from_manifest,
                       "regenerate from an existing manifest");

  // shared train/infer/eval options
  std::string config_path, preset_name, resume_path, out_override;
  std::vector<std::string> graphs_override, val_override;
  double lr_override = -1.0;
  int epochs_override = -1;
  long long seed_override = -1;
  int g_override = -1;

  auto* train = app.add_subcommand("train", "Train a GAP model");
  train->add_option("--config", config_path, "run-config JSON");
  train->add_option("--preset", preset_name, "hyperparameter preset");
  train->add_option("--graphs", graphs_override, "training graph files");
  train->add_option("--val", val_override, "validation graph files");
  train->add_option("--lr", lr_override, "learning rate override");
  train->add_option("--epochs", epochs_override, "max epochs override");
  train->add_option("--seed", seed_override, "seed override");
  train->add_option("--g", g_override, "partition count override");
  train->add_option("--out", out_override, "output directory override");
  train->add_option("--resume", resume_path, "checkpoint to resume from");

  std::string infer_ckpt, infer_graph, infer_format = "auto", infer_out = ".";
  bool infer_weighted = false;
  int infer_g = -1;
  auto* infer_cmd = app.add_subcommand("infer", "Partition a graph with a trained model");
  infer_cmd->add_option("--checkpoint", infer_ckpt, "model checkpoint")->required();
  infer_cmd->add_option("--graph", infer_graph, "graph file")->required();
  infer_cmd->add_option("--format", infer_format, "auto|edgelist|metis|featured");
  infer_cmd->add_flag("--weighted", infer_weighted, "edge list carries weights");
  infer_cmd->add_option("--g", infer_g, "expected partition count (validated)");
  infer_cmd->add_option("--out", infer_out, "output directory");

  std::string eval_graph, eval_assignment, eval_format = "auto", eval_out = ".";
  std::string eval_histogram;
  bool eval_weighted = false;
  int eval_g = 2;
  auto* eval_cmd = app.add_subcommand("eval", "Score an assignment file against a graph");
  eval_cmd->add_option("--graph", eval_graph, "graph file")->required();
  eval_cmd->add_option("--assignment", eval_assignment, "assignment file")->required();
  eval_cmd->add_option("--g", eval_g, "partition count")->required();
  eval_cmd->add_option("--format", eval_format, "auto|edgelist|metis|featured");
  eval_cmd->add_flag("--weighted", eval_weighted, "edge list carries weights");
  eval_cmd->add_option("--out", eval_out, "output directory");
  eval_cmd->add_option("--degree-histogram", eval_histogram,
                       "also write a degree histogram CSV with this name");

  std::string oracle_graph, oracle_format = "auto", oracle_out = ".";
  bool oracle_balanced = false, oracle_weighted = false;
  int oracle_g = 2;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive minimum-Ncut search (small n)");
  oracle_cmd->add_option("--graph", oracle_graph, "graph file")->required();
  oracle_cmd->add_option("--g", oracle_g, "partition count")->required();
  oracle_cmd->add_flag("--balanced", oracle_balanced, "restrict to balanced assignments");
  oracle_cmd->add_option("--format", oracle_format, "auto|edgelist|metis|featured");
  oracle_cmd->add_flag("--weighted", oracle_weighted, "edge list carries weights");
  oracle_cmd->add_option("--out", oracle_out, "output directory");

  std::string bench_config, bench_out_override;
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark partitioners over graphs");
  bench_cmd->add_option("--config", bench_config, "run-config JSON with a bench section")
      ->required();
  bench_cmd->add_option("--out", bench_out_override, "output directory override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // argument validation failure
  }

  if (generate->parsed()) return cmd_generate(gen);

  if (train->parsed()) {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    if (!preset_name.empty()) {
      const Preset p = get_preset(preset_name);
      cfg.preset = preset_name;
      cfg.model = p.model;
      cfg.train = p.train;
    }
    if (!graphs_override.empty()) cfg.dataset.train = graphs_override;
    if (!val_override.empty()) cfg.dataset.val = val_override;
    if (lr_override > 0) cfg.train.learning_rate = lr_override;
    if (epochs_override > 0) cfg.train.max_epochs = epochs_override;
    if (seed_override >= 0) cfg.train.seed = static_cast<uint64_t>(seed_override);
    if (g_override > 0) cfg.model.partitions = g_override;
    if (!out_override.empty()) cfg.output.dir = out_override;
    return cmd_train(std::move(cfg), resume_path);
  }

  if (infer_cmd->parsed())
    return cmd_infer(infer_ckpt, infer_graph, infer_format, infer_weighted, infer_g, infer_out);

  if (eval_cmd->parsed())
    return cmd_eval(eval_graph, eval_assignment, eval_g, eval_format, eval_weighted, eval_out,
                    eval_histogram);

  if (oracle_cmd->parsed())
    return cmd_oracle(oracle_graph, oracle_g, oracle_balanced, oracle_format, oracle_weighted,
                      oracle_out);

  if (bench_cmd->parsed()) {
    RunConfig cfg = load_run_config(bench_config);
    if (!bench_out_override.empty()) cfg.output.dir = bench_out_override;
    return cmd_bench(cfg);
  }
  return 0;
}

}  // namespace gap::cli

int main(int argc, char** argv) {
  try {
    return gap::cli::run(argc, argv);
  } catch (const gap::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gap::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const gap::io_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
