// semrsm: semantic and spatio-semantic RSMs, CKA, retrieval, correlation
// and matcher benchmarks from the command line.
//
// stdout carries one JSON line per run; logs and progress go to stderr.
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semrsm/analysis.hpp"
#include "semrsm/bench.hpp"
#include "semrsm/cka.hpp"
#include "semrsm/error.hpp"
#include "semrsm/log.hpp"
#include "semrsm/parallel.hpp"
#include "semrsm/retrieval.hpp"
#include "semrsm/rsm.hpp"
#include "semrsm/tensor_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::size_t threads = 0;
  bool quiet = false;
  bool verbose = false;
};

struct KernelFlags {
  std::string kernel = "linear";
  std::optional<double> sigma;
  std::string matcher = "batch-optimal";
  std::optional<std::size_t> topk;
  std::size_t batch_size = semrsm::kDefaultBatchSize;

  void add_to(CLI::App& cmd, const std::string& default_matcher) {
    matcher = default_matcher;
    cmd.add_option("--kernel", kernel, "Similarity kernel")
        ->check(CLI::IsMember({"linear", "rbf", "cosine"}))
        ->capture_default_str();
    cmd.add_option("--sigma", sigma, "Fixed RBF bandwidth (default: median heuristic)")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--matcher", matcher, "Spatial matcher")
        ->check(CLI::IsMember({"none", "optimal", "greedy", "topk-greedy", "batch-optimal"}))
        ->capture_default_str();
    cmd.add_option("--topk", topk, "k for topk-greedy")->check(CLI::PositiveNumber);
    cmd.add_option("--batch-size", batch_size, "b for batch-optimal")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  semrsm::KernelSpec kernel_spec() const {
    semrsm::KernelSpec spec{semrsm::parse_kernel_kind(kernel), std::nullopt};
    if (sigma) {
      if (spec.kind != semrsm::KernelKind::rbf) {
        throw semrsm::InvalidArgument("--sigma only applies to --kernel rbf");
      }
      spec.fixed_sigma = *sigma;
    }
    spec.validate();
    return spec;
  }

  semrsm::MatcherSpec matcher_spec() const {
    semrsm::MatcherSpec spec{semrsm::parse_matcher_kind(matcher), 0, 0};
    if (spec.kind == semrsm::MatcherKind::topk_greedy) {
      if (!topk) throw semrsm::InvalidArgument("--matcher topk-greedy requires --topk");
      spec.k = *topk;
    }
    if (spec.kind == semrsm::MatcherKind::batch_optimal) spec.b = batch_size;
    spec.validate();
    return spec;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::function<void(std::size_t, std::size_t)> progress_printer(const GlobalOptions& g,
                                                                const std::string& label) {
  if (g.quiet) return {};
  return [label, last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
    const std::size_t pct = total == 0 ? 100 : done * 100 / total;
    if (pct / 10 > last / 10 || done == total) {
      last = pct;
      std::cerr << "[semrsm] " << label << ": " << pct << "% (" << done << "/" << total
                << ")\n";
    }
  };
}

void write_json_file(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw semrsm::IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw semrsm::IoError("failed writing '" + path.string() + "'");
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw semrsm::IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw semrsm::IoError("failed writing '" + path.string() + "'");
}

semrsm::MatrixFormat resolve_format(const std::string& flag, const fs::path& out) {
  return flag.empty() ? semrsm::format_from_extension(out) : semrsm::parse_matrix_format(flag);
}

json grid_summary(const semrsm::Matrix& grid) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  std::size_t defined = 0;
  for (const double v : grid.data()) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
    ++defined;
  }
  if (defined == 0) return {{"min", nullptr}, {"max", nullptr}, {"mean", nullptr}, {"undefined", grid.size()}};
  return {{"min", lo}, {"max", hi}, {"mean", sum / static_cast<double>(defined)},
          {"undefined", grid.size() - defined}};
}

// ---------------------------------------------------------------- rsm

struct RsmArgs {
  fs::path input;
  fs::path out;
  std::string format;
  KernelFlags kf;
  bool center = false;
  bool global_sigma = false;
  std::optional<fs::path> dump_permutations;
};

int run_rsm(const RsmArgs& args, const GlobalOptions& g, semrsm::WorkerPool& pool) {
  const auto start = std::chrono::steady_clock::now();
  const auto kernel = args.kf.kernel_spec();
  const auto matcher = args.kf.matcher_spec();
  auto z = semrsm::load_representations(args.input);
  if (args.center) z = semrsm::center(z).batch;

  std::vector<semrsm::PairPermutation> perms;
  semrsm::RsmOptions options;
  options.pool = &pool;
  options.global_sigma = args.global_sigma;
  options.progress = progress_printer(g, "rsm");
  if (args.dump_permutations) options.permutations = &perms;

  const auto rsm = semrsm::compute_rsm(z, kernel, matcher, options);
  semrsm::save_matrix(rsm, args.out, resolve_format(args.format, args.out));

  if (args.dump_permutations) {
    json pairs = json::array();
    for (const auto& p : perms) {
      pairs.push_back({{"i", z.sample_ids()[p.row]},
                       {"j", z.sample_ids()[p.col]},
                       {"permutation", p.permutation},
                       {"total_affinity", p.total_affinity}});
    }
    write_json_file(*args.dump_permutations,
                    {{"matcher", semrsm::to_string(matcher)}, {"pairs", std::move(pairs)}});
  }

  json summary = {{"command", "rsm"},
                  {"n", z.n_samples()},
                  {"channels", z.n_channels()},
                  {"spatial", z.n_spatial()},
                  {"kernel", semrsm::to_string(kernel)},
                  {"matcher", semrsm::to_string(matcher)},
                  {"centered", args.center},
                  {"out", args.out.string()},
                  {"wall_time_s", seconds_since(start)}};
  if (rsm.sigma) summary["sigma"] = *rsm.sigma;
  std::cout << summary.dump() << std::endl;
  return 0;
}

// ---------------------------------------------------------------- cka

struct CkaArgs {
  std::vector<fs::path> a;
  std::vector<fs::path> b;
  fs::path out;
  std::string format;
  std::size_t minibatch = 0;
  std::optional<fs::path> diff;
  std::optional<fs::path> diff_out;
};

std::vector<semrsm::LayerRsms> load_layers(const std::vector<fs::path>& paths,
                                           std::size_t minibatch) {
  std::vector<semrsm::LayerRsms> layers;
  for (const auto& p : paths) {
    auto m = semrsm::load_matrix(p).values;
    if (!m.is_square()) throw semrsm::ShapeError("'" + p.string() + "' is not a square RSM");
    if (minibatch > 0) {
      layers.push_back(semrsm::diagonal_blocks(m, minibatch));
    } else {
      layers.push_back({std::move(m)});
    }
  }
  return layers;
}

int run_cka(const CkaArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const auto la = load_layers(args.a, args.minibatch);
  const auto lb = load_layers(args.b, args.minibatch);
  const auto grid = semrsm::cka_layer_matrix(std::span<const semrsm::LayerRsms>(la),
                                             std::span<const semrsm::LayerRsms>(lb));
  semrsm::SimilarityMatrix out;
  out.values = grid;
  out.kind = semrsm::MatrixKind::rectangular;
  const auto format = resolve_format(args.format, args.out);
  semrsm::save_matrix(out, args.out, format);

  json summary = {{"command", "cka"},
                  {"shape", {grid.rows(), grid.cols()}},
                  {"minibatch", args.minibatch},
                  {"out", args.out.string()},
                  {"grid", grid_summary(grid)}};

  if (args.diff) {
    const auto baseline = semrsm::load_matrix(*args.diff).values;
    if (baseline.rows() != grid.rows() || baseline.cols() != grid.cols()) {
      throw semrsm::ShapeError("--diff grid is " + std::to_string(baseline.rows()) + "x" +
                               std::to_string(baseline.cols()) + ", expected " +
                               std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()));
    }
    semrsm::SimilarityMatrix diff;
    diff.kind = semrsm::MatrixKind::rectangular;
    diff.values = semrsm::Matrix(grid.rows(), grid.cols());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      diff.values.data()[i] = grid.data()[i] - baseline.data()[i];
    }
    fs::path diff_path = args.diff_out.value_or(
        args.out.parent_path() / (args.out.stem().string() + ".diff" + args.out.extension().string()));
    semrsm::save_matrix(diff, diff_path, resolve_format(args.format, diff_path));
    summary["diff"] = grid_summary(diff.values);
    summary["diff_out"] = diff_path.string();
  }
  summary["wall_time_s"] = seconds_since(start);
  std::cout << summary.dump() << std::endl;
  return 0;
}

// ---------------------------------------------------------------- retrieve

struct RetrieveArgs {
  fs::path queries;
  fs::path database;
  fs::path labels;
  std::optional<fs::path> database_labels;
  KernelFlags kf;
  std::size_t k = 1;
  std::string metric = "f1";
  bool exclude_groups = false;
  bool no_center = false;
  bool global_sigma = false;
  std::size_t block = 100;
  std::optional<fs::path> out;
  std::optional<fs::path> sim_out;
};

int run_retrieve(const RetrieveArgs& args, const GlobalOptions& g, semrsm::WorkerPool& pool) {
  const auto start = std::chrono::steady_clock::now();
  const auto kernel = args.kf.kernel_spec();
  const auto matcher = args.kf.matcher_spec();
  const auto metric = semrsm::parse_retrieval_metric(args.metric);
  auto queries = semrsm::load_representations(args.queries);
  auto database = semrsm::load_representations(args.database);
  if (!args.no_center) {
    auto db = semrsm::center(database);
    queries = semrsm::center(queries, std::span<const double>(db.mean)).batch;
    database = std::move(db.batch);
  }
  auto labels = semrsm::load_labels(args.labels);
  if (args.database_labels) {
    for (auto& [id, counts] : semrsm::load_labels(*args.database_labels)) {
      labels.insert_or_assign(id, std::move(counts));
    }
  }

  semrsm::RsmOptions options;
  options.pool = &pool;
  options.global_sigma = args.global_sigma;
  options.progress = progress_printer(g, "retrieve");
  const auto sim = semrsm::cross_similarity(queries, database, kernel, matcher, args.block, options);
  if (args.sim_out) semrsm::save_matrix(sim, *args.sim_out, semrsm::format_from_extension(*args.sim_out));

  std::optional<semrsm::GroupExclusion> exclusion;
  if (args.exclude_groups) {
    if (!queries.has_groups() || !database.has_groups()) {
      throw semrsm::ValidationError("--exclude-groups needs group_ids in both sidecar files");
    }
    exclusion = semrsm::GroupExclusion{queries.group_ids(), database.group_ids()};
  }
  const auto report = semrsm::evaluate_retrieval(sim, labels, args.k, metric, exclusion);
  auto doc = semrsm::to_json(report);
  doc["kernel"] = semrsm::to_string(kernel);
  doc["matcher"] = semrsm::to_string(matcher);
  doc["centered"] = !args.no_center;
  if (args.out) write_json_file(*args.out, doc);

  const auto mean_key = "mean_" + semrsm::to_string(metric) + "_at_1";
  json summary = {{"command", "retrieve"},
                  {"metric", semrsm::to_string(metric)},
                  {"k", args.k},
                  {"n_queries", report.queries.size()},
                  {"n_database", database.n_samples()},
                  {"n_evaluated", report.evaluated},
                  {mean_key, report.mean_at_1},
                  {"kernel", semrsm::to_string(kernel)},
                  {"matcher", semrsm::to_string(matcher)},
                  {"wall_time_s", seconds_since(start)}};
  std::cout << summary.dump() << std::endl;
  return 0;
}

// ---------------------------------------------------------------- correlate

struct CorrelateArgs {
  fs::path reps;
  fs::path probs;
  KernelFlags kf;
  std::string method = "pearson";
  bool from_logits = false;
  bool log2 = false;
  bool center = false;
  std::optional<fs::path> out;
};

int run_correlate(const CorrelateArgs& args, const GlobalOptions& g, semrsm::WorkerPool& pool) {
  const auto start = std::chrono::steady_clock::now();
  const auto kernel = args.kf.kernel_spec();
  const auto matcher = args.kf.matcher_spec();
  const auto method = semrsm::parse_correlation_method(args.method);
  auto z = semrsm::load_representations(args.reps);
  if (args.center) z = semrsm::center(z).batch;

  const auto probs_array = semrsm::npy::read(args.probs);
  if (probs_array.shape.size() != 2) {
    throw semrsm::ShapeError("probabilities must be an N x M array");
  }
  if (probs_array.shape[0] != z.n_samples()) {
    throw semrsm::ShapeError("probabilities have " + std::to_string(probs_array.shape[0]) +
                             " rows for " + std::to_string(z.n_samples()) + " samples");
  }
  const semrsm::Matrix prob_rows(probs_array.shape[0], probs_array.shape[1], probs_array.values);
  const auto probs = semrsm::probability_rows(prob_rows, args.from_logits);

  semrsm::RsmOptions options;
  options.pool = &pool;
  options.progress = progress_printer(g, "correlate");
  const auto rsm = semrsm::compute_rsm(z, kernel, matcher, options);
  const auto base = args.log2 ? semrsm::LogBase::two : semrsm::LogBase::natural;
  const auto result = semrsm::correlate_similarity_jsd(rsm.values, probs, method, base, &pool);

  json summary = {{"command", "correlate"},
                  {"method", semrsm::to_string(method)},
                  {"rho", result.rho ? json(*result.rho) : json(nullptr)},
                  {"pairs", result.pairs},
                  {"n_samples", z.n_samples()},
                  {"kernel", semrsm::to_string(kernel)},
                  {"matcher", semrsm::to_string(matcher)},
                  {"log_base", args.log2 ? "2" : "e"}};
  if (!result.rho) summary["diagnostic"] = "correlation undefined (zero variance)";
  if (args.out) write_json_file(*args.out, summary);
  summary["wall_time_s"] = seconds_since(start);
  std::cout << summary.dump() << std::endl;
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<std::size_t> sizes;
  std::size_t channels = 64;
  std::size_t pairs = 10;
  std::vector<std::string> matchers{"none", "optimal", "greedy", "batch-optimal:128"};
  std::string source = "gaussian";
  std::optional<fs::path> input;
  std::uint64_t seed = 0;
  std::size_t warmup = 3;
  std::optional<fs::path> out;
  std::optional<fs::path> csv;
  bool no_timing = false;
};

int run_bench(const BenchArgs& args) {
  semrsm::BenchConfig config;
  config.sizes = args.sizes;
  config.channels = args.channels;
  config.pairs = args.pairs;
  config.seed = args.seed;
  config.warmup = args.warmup;
  for (const auto& m : args.matchers) config.matchers.push_back(semrsm::parse_matcher(m));

  std::optional<semrsm::RepresentationBatch> source;
  if (args.source == "file") {
    if (!args.input) throw semrsm::InvalidArgument("--source file requires --input");
    source = semrsm::load_representations(*args.input);
    config.source = &*source;
  }
  const auto report = semrsm::bench_matchers(config);
  const auto doc = semrsm::to_json(report, !args.no_timing);
  if (args.out) write_json_file(*args.out, doc);
  if (args.csv) write_text_file(*args.csv, semrsm::to_csv(report));
  std::cout << doc.dump() << std::endl;
  return 0;
}

// ---------------------------------------------------------------- distribution

struct DistributionArgs {
  fs::path input;
  std::string matcher = "batch-optimal:512";
  std::size_t pairs = 100;
  std::uint64_t seed = 0;
  bool center = false;
  std::optional<fs::path> out;
};

int run_distribution(const DistributionArgs& args) {
  const auto matcher = semrsm::parse_matcher(args.matcher);
  auto z = semrsm::load_representations(args.input);
  if (args.center) z = semrsm::center(z).batch;
  const auto dist = semrsm::relative_similarity_distribution(z, matcher, args.pairs, args.seed);
  const auto doc = semrsm::to_json(dist);
  if (args.out) write_json_file(*args.out, doc);
  std::cout << doc.dump() << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic and spatio-semantic representational similarity toolkit", "semrsm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  GlobalOptions g;
  g.threads = semrsm::default_thread_count();
  app.add_option("--threads", g.threads, "Worker threads (env SEMRSM_THREADS)")
      ->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress and warnings");
  app.add_flag("-v,--verbose", g.verbose, "Log informational messages");

  RsmArgs rsm;
  auto* rsm_cmd = app.add_subcommand("rsm", "Compute a spatio-semantic or semantic RSM");
  rsm_cmd->add_option("--input", rsm.input, "Representations (.npy)")->required()->check(CLI::ExistingFile);
  rsm_cmd->add_option("--out", rsm.out, "Output matrix path")->required();
  rsm_cmd->add_option("--format", rsm.format, "npy, csv or json (default: from extension)")
      ->check(CLI::IsMember({"npy", "csv", "json"}));
  rsm.kf.add_to(*rsm_cmd, "batch-optimal");
  rsm_cmd->add_flag("--center", rsm.center, "Zero-center along the sample dimension first");
  rsm_cmd->add_flag("--global-sigma", rsm.global_sigma,
                    "Median-heuristic sigma over the full input (the default for a single RSM)");
  rsm_cmd->add_option("--dump-permutations", rsm.dump_permutations,
                      "Write every pair's permutation as JSON");

  CkaArgs cka;
  auto* cka_cmd = app.add_subcommand("cka", "CKA layer matrix between two lists of RSMs");
  cka_cmd->add_option("--a", cka.a, "RSM files (comma separated)")->required()->delimiter(',')->check(CLI::ExistingFile);
  cka_cmd->add_option("--b", cka.b, "RSM files (comma separated)")->required()->delimiter(',')->check(CLI::ExistingFile);
  cka_cmd->add_option("--out", cka.out, "Output grid path")->required();
  cka_cmd->add_option("--format", cka.format, "npy, csv or json (default: from extension)")
      ->check(CLI::IsMember({"npy", "csv", "json"}));
  cka_cmd->add_option("--minibatch", cka.minibatch,
                      "Average CKA over diagonal mini-batch blocks of this many samples");
  cka_cmd->add_option("--diff", cka.diff, "Baseline grid; writes (this grid - baseline)")
      ->check(CLI::ExistingFile);
  cka_cmd->add_option("--diff-out", cka.diff_out, "Where to write the difference grid");

  RetrieveArgs ret;
  auto* ret_cmd = app.add_subcommand("retrieve", "Rank-1 retrieval evaluation");
  ret_cmd->add_option("--queries", ret.queries, "Query representations (.npy)")->required()->check(CLI::ExistingFile);
  ret_cmd->add_option("--database", ret.database, "Database representations (.npy)")->required()->check(CLI::ExistingFile);
  ret_cmd->add_option("--labels", ret.labels, "Labels JSON {id: {class: count}}")->required()->check(CLI::ExistingFile);
  ret_cmd->add_option("--database-labels", ret.database_labels, "Separate database labels JSON")
      ->check(CLI::ExistingFile);
  ret.kf.kernel = "cosine";
  ret.kf.add_to(*ret_cmd, "none");
  ret_cmd->add_option("--k", ret.k, "Neighbours listed per query")->check(CLI::PositiveNumber)->capture_default_str();
  ret_cmd->add_option("--metric", ret.metric, "f1 or iou")->check(CLI::IsMember({"f1", "iou"}))->capture_default_str();
  ret_cmd->add_flag("--exclude-groups", ret.exclude_groups, "Skip database entries sharing the query's group");
  ret_cmd->add_flag("--no-center", ret.no_center, "Do not center with the database mean");
  ret_cmd->add_flag("--global-sigma", ret.global_sigma, "One RBF sigma over all samples");
  ret_cmd->add_option("--block", ret.block, "Tile size of the similarity computation")
      ->check(CLI::PositiveNumber)->capture_default_str();
  ret_cmd->add_option("--out", ret.out, "Full JSON report");
  ret_cmd->add_option("--sim-out", ret.sim_out, "Save the query x database matrix");

  CorrelateArgs cor;
  auto* cor_cmd = app.add_subcommand("correlate", "Correlate representational similarity with output JSD");
  cor_cmd->add_option("--reps", cor.reps, "Representations (.npy)")->required()->check(CLI::ExistingFile);
  cor_cmd->add_option("--probs", cor.probs, "N x M probabilities (.npy)")->required()->check(CLI::ExistingFile);
  cor.kf.add_to(*cor_cmd, "batch-optimal");
  cor_cmd->add_option("--method", cor.method, "pearson or spearman")
      ->check(CLI::IsMember({"pearson", "spearman"}))->capture_default_str();
  cor_cmd->add_flag("--from-logits", cor.from_logits, "Apply a softmax to each row first");
  cor_cmd->add_flag("--log2", cor.log2, "Measure JSD in bits");
  cor_cmd->add_flag("--center", cor.center, "Zero-center representations first");
  cor_cmd->add_option("--out", cor.out, "Write the result JSON here too");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Runtime and quality of matchers");
  bench_cmd->add_option("--sizes", bench.sizes, "Spatial sizes S (comma separated)")
      ->required()->delimiter(',')->check(CLI::PositiveNumber);
  bench_cmd->add_option("--channels", bench.channels, "Channels C for gaussian data")
      ->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--pairs", bench.pairs, "Pairs per size")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--matchers", bench.matchers,
                        "Matchers, e.g. none,optimal,greedy,topk-greedy:32,batch-optimal:128")
      ->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--source", bench.source, "gaussian or file")
      ->check(CLI::IsMember({"gaussian", "file"}))->capture_default_str();
  bench_cmd->add_option("--input", bench.input, "Representations for --source file")->check(CLI::ExistingFile);
  bench_cmd->add_option("--seed", bench.seed, "RNG seed")->capture_default_str();
  bench_cmd->add_option("--warmup", bench.warmup, "Untimed solves per cell")->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "JSON report path");
  bench_cmd->add_option("--csv", bench.csv, "CSV report path");
  bench_cmd->add_flag("--no-timing", bench.no_timing, "Leave timing fields out of the JSON");

  DistributionArgs dist;
  auto* dist_cmd = app.add_subcommand("distribution", "Per-pair similarity ratios relative to optimal matching");
  dist_cmd->add_option("--input", dist.input, "Representations (.npy)")->required()->check(CLI::ExistingFile);
  dist_cmd->add_option("--matcher", dist.matcher, "Matcher, e.g. batch-optimal:128")->capture_default_str();
  dist_cmd->add_option("--pairs", dist.pairs, "Sample pairs")->check(CLI::PositiveNumber)->capture_default_str();
  dist_cmd->add_option("--seed", dist.seed, "Pair sampling seed")->capture_default_str();
  dist_cmd->add_flag("--center", dist.center, "Zero-center representations first");
  dist_cmd->add_option("--out", dist.out, "JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (e.get_exit_code() != 0) {
      std::cerr << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return kExitUsage;
    }
    return 0;
  }

  semrsm::log::set_level(g.quiet     ? semrsm::log::Level::error
                         : g.verbose ? semrsm::log::Level::info
                                     : semrsm::log::Level::warning);

  try {
    semrsm::WorkerPool pool(g.threads);
    if (rsm_cmd->parsed()) return run_rsm(rsm, g, pool);
    if (cka_cmd->parsed()) return run_cka(cka);
    if (ret_cmd->parsed()) return run_retrieve(ret, g, pool);
    if (cor_cmd->parsed()) return run_correlate(cor, g, pool);
    if (bench_cmd->parsed()) return run_bench(bench);
    if (dist_cmd->parsed()) return run_distribution(dist);
  } catch (const semrsm::InvalidArgument& e) {
    std::cerr << "semrsm: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "semrsm: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
