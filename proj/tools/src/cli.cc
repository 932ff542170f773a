#include "hardem_cli/cli.h"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"
#include "hardem/error.h"
#include "hardem/io.h"
#include "hardem/learning.h"
#include "hardem/metrics.h"
#include "hardem/pipeline.h"

namespace hardem::cli {
namespace {

namespace fs = std::filesystem;

const fs::path& require(const std::optional<fs::path>& p, const char* flag) {
  if (!p) throw ConfigError(std::string("missing required flag ") + flag);
  return *p;
}

const fs::path& single_input(const Options& opts) {
  if (opts.in.size() != 1) throw ConfigError("expected exactly one --in file");
  return opts.in.front();
}

std::string fmt(double v) { return format_number(v); }

std::string eps_label(double eps) {
  std::ostringstream ss;
  ss << eps;
  return ss.str();
}

}  // namespace

RunConfig resolve_config(const Options& opts, const std::string* base_text) {
  std::string text;
  if (base_text) {
    text = *base_text;
  } else if (opts.config) {
    text = read_file(*opts.config);
  }
  std::optional<TaskKind> task;
  for (const auto& [k, v] : parse_config_text(text)) {
    if (k == "task") task = parse_task(v);
  }
  if (opts.task) {
    const TaskKind flag_task = parse_task(*opts.task);
    if (task && *task != flag_task) {
      throw ConfigError("--task " + *opts.task + " conflicts with configured task '" +
                        std::string(task_name(*task)) + "'");
    }
    task = flag_task;
  }
  if (!task) throw ConfigError("no task given; pass --task or set it in the config");
  RunConfig c = config_from_text(text, *task);
  if (opts.seed) c.set("seed", std::to_string(*opts.seed));
  if (opts.objective) c.set("objective", *opts.objective);
  if (opts.tau) c.set("tau", std::to_string(*opts.tau));
  if (opts.anneal_direction) c.set("anneal_direction", *opts.anneal_direction);
  if (opts.pruning) c.set("pruning", *opts.pruning);
  for (const auto& kv : opts.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    c.set(key, std::string_view(kv).substr(eq + 1));
  }
  c.validate();
  return c;
}

PrecomputeSummary summarize(std::span<const SolutionSet> sets) {
  PrecomputeSummary s;
  s.examples = sets.size();
  if (sets.empty()) return s;
  std::vector<double> sizes;
  for (const auto& z : sets) {
    sizes.push_back(static_cast<double>(z.solutions.size()));
    if (z.solutions.empty()) ++s.empty;
  }
  double total = 0.0;
  for (double v : sizes) total += v;
  s.mean_z = total / static_cast<double>(sizes.size());
  std::sort(sizes.begin(), sizes.end());
  const std::size_t n = sizes.size();
  s.median_z = n % 2 ? sizes[n / 2] : 0.5 * (sizes[n / 2 - 1] + sizes[n / 2]);
  return s;
}

PrecomputeSummary cmd_precompute(const Options& opts, std::ostream& log) {
  const RunConfig config = resolve_config(opts);
  const auto examples = parse_examples(read_file(single_input(opts)), config.task);
  const fs::path& out = require(opts.out, "--out");

  std::vector<SolutionSet> sets(examples.size());
  parallel_for(examples.size(), config.workers, [&](std::size_t i) {
    try {
      sets[i] = compute_solution_set(examples[i], config.precompute);
    } catch (const NonNumericAnswer&) {
      sets[i].example_id = examples[i].id;
    }
  });

  std::string text;
  for (const auto& z : sets) {
    text += solution_set_to_json(z);
    text += '\n';
  }
  write_file_atomic(out, text);

  const PrecomputeSummary s = summarize(sets);
  log << "examples " << s.examples << "\n"
      << "empty_z " << s.empty << "\n"
      << "mean_z " << fmt(s.mean_z) << "\n"
      << "median_z " << fmt(s.median_z) << "\n";
  return s;
}

void cmd_train(const Options& opts, std::ostream& log) {
  RunConfig config = resolve_config(opts);
  const auto examples = parse_examples(read_file(single_input(opts)), config.task);
  const auto sets = parse_solution_sets(read_file(require(opts.solutions, "--solutions")));
  const fs::path& out = require(opts.out, "--out");

  std::unordered_map<std::string, const SolutionSet*> by_id;
  for (const auto& z : sets) by_id.emplace(z.example_id, &z);

  std::vector<const Example*> kept;
  std::vector<const SolutionSet*> kept_z;
  std::size_t skipped = 0;
  for (const auto& ex : examples) {
    auto it = by_id.find(ex.id);
    if (it == by_id.end()) throw Error("no solution set for example '" + ex.id + "'");
    if (it->second->solutions.empty()) {
      ++skipped;
      continue;
    }
    kept.push_back(&ex);
    kept_z.push_back(it->second);
  }

  std::vector<std::vector<Solution>> candidates(kept.size());
  parallel_for(kept.size(), config.workers, [&](std::size_t i) {
    candidates[i] = enumerate_candidates(*kept[i], config.precompute);
  });
  if (config.scorer.kind == ScorerKind::kTabular && config.scorer.tabular_size == 0) {
    std::size_t widest = 0;
    for (const auto& c : candidates) widest = std::max(widest, c.size());
    config.scorer.tabular_size = widest;
  }
  const Scorer init = config.make_scorer();

  std::vector<TrainingInstance> data(kept.size());
  parallel_for(kept.size(), config.workers, [&](std::size_t i) {
    data[i] = make_training_instance(init, *kept[i], candidates[i], kept_z[i]->solutions);
  });
  candidates.clear();

  log << "examples " << examples.size() << "\n"
      << "skipped_empty_z " << skipped << "\n";
  if (data.empty() && config.train.max_steps > 0) {
    throw EmptySolutionSet("no training example has a non-empty solution set");
  }

  TrainResult result = data.empty() ? TrainResult{init, {}} : train(data, init, config.train);

  Checkpoint ckpt;
  ckpt.task = config.task;
  ckpt.scorer = std::move(result.scorer);
  ckpt.step = static_cast<long>(result.log.size());
  ckpt.config_text = config.to_text();
  ckpt.config_hash = config.hash();
  write_file_atomic(out, serialize_checkpoint(ckpt));

  std::string steps = "step,objective,loss\n";
  for (const auto& s : result.log) {
    steps += std::to_string(s.step) + "," + std::string(objective_name(s.objective)) + "," +
             fmt(s.loss) + "\n";
  }
  fs::path steps_path = out;
  steps_path += ".steps.csv";
  write_file_atomic(steps_path, steps);

  log << "steps " << result.log.size() << "\n";
  if (!result.log.empty()) log << "final_loss " << fmt(result.log.back().loss) << "\n";
}

void cmd_eval(const Options& opts, std::ostream& log) {
  const Checkpoint ckpt = deserialize_checkpoint(read_file(require(opts.checkpoint, "--checkpoint")));
  Options eval_opts = opts;
  if (opts.task && parse_task(*opts.task) != ckpt.task) {
    throw CheckpointError("checkpoint was trained for task '" + std::string(task_name(ckpt.task)) +
                          "', not '" + *opts.task + "'");
  }
  eval_opts.task = std::string(task_name(ckpt.task));
  const RunConfig config = resolve_config(eval_opts, &ckpt.config_text);
  if (config.scorer.kind != ckpt.scorer.kind) {
    throw CheckpointError("checkpoint scorer does not match its config");
  }
  const auto examples = parse_examples(read_file(single_input(opts)), config.task);
  const fs::path& out = require(opts.out, "--out");

  EvalResult result;
  result.epsilons = config.epsilons;
  result.records.resize(examples.size());
  parallel_for(examples.size(), config.workers, [&](std::size_t i) {
    result.records[i] = evaluate_example(ckpt.scorer, examples[i], config.precompute, config.epsilons);
  });
  result.finalize();

  std::string predictions;
  for (const auto& r : result.records) {
    predictions += eval_record_to_json(r, result.epsilons);
    predictions += '\n';
  }

  std::string metrics = "metric,value\n";
  metrics += "examples," + std::to_string(result.records.size()) + "\n";
  metrics += "em," + fmt(result.mean_em) + "\n";
  metrics += "f1," + fmt(result.mean_f1) + "\n";
  metrics += "rouge_l," + fmt(result.mean_rouge_l) + "\n";
  for (std::size_t k = 0; k < result.epsilons.size(); ++k) {
    const auto& v = result.mean_sparsity[k];
    metrics += "sparsity_mean_per_example@" + eps_label(result.epsilons[k]) + "," +
               (v ? fmt(*v) : std::string("")) + "\n";
  }

  std::string breakdown = "z_bucket,count,em\n";
  for (const auto& row : breakdown_by_z(result, config.buckets)) {
    breakdown += csv_field(row.bucket.label()) + "," + std::to_string(row.count) + "," +
                 fmt(row.mean_em) + "\n";
  }

  fs::create_directories(out);
  write_file_atomic(out / "predictions.jsonl", predictions);
  write_file_atomic(out / "metrics.csv", metrics);
  write_file_atomic(out / "breakdown.csv", breakdown);

  log << "examples " << result.records.size() << "\n"
      << "em " << fmt(result.mean_em) << "\n"
      << "f1 " << fmt(result.mean_f1) << "\n";
}

void cmd_analyze(const Options& opts, std::ostream& log) {
  if (opts.in.empty()) throw ConfigError("analyze needs at least one --in eval directory");
  const fs::path& out = require(opts.out, "--out");

  // Buckets come from --config / --set when given, else the defaults.
  std::vector<ZBucket> buckets = parse_buckets("0,1,2-3,4-10,11+");
  if (opts.config || !opts.set.empty()) {
    Options o = opts;
    if (!o.task) o.task = "span";
    buckets = resolve_config(o).buckets;
  }

  std::vector<std::string> names;
  std::vector<EvalResult> results;
  for (const auto& dir : opts.in) {
    const fs::path file = fs::is_directory(dir) ? dir / "predictions.jsonl" : dir;
    results.push_back(parse_eval_records(read_file(file)));
    std::string name = (fs::is_directory(dir) ? dir : dir.parent_path()).filename().string();
    if (name.empty()) name = "run" + std::to_string(names.size());
    names.push_back(name);
  }

  std::vector<std::string> header = {"z_bucket"};
  for (const auto& n : names) {
    header.push_back(n + "_count");
    header.push_back(n + "_em");
  }
  std::string breakdown = csv_row(header);
  std::vector<std::vector<BucketRow>> tables;
  for (const auto& r : results) tables.push_back(breakdown_by_z(r, buckets));
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    std::vector<std::string> row = {buckets[b].label()};
    for (const auto& t : tables) {
      row.push_back(std::to_string(t[b].count));
      row.push_back(fmt(t[b].mean_em));
    }
    breakdown += csv_row(row);
  }

  // Sparsity rows: the union of epsilons, in ascending order.
  std::map<double, std::vector<std::optional<double>>> by_eps;
  for (std::size_t r = 0; r < results.size(); ++r) {
    for (std::size_t k = 0; k < results[r].epsilons.size(); ++k) {
      auto& cells = by_eps[results[r].epsilons[k]];
      cells.resize(results.size());
      cells[r] = results[r].mean_sparsity[k];
    }
  }
  header = {"epsilon"};
  for (const auto& n : names) header.push_back(n + "_sparsity");
  std::string sparsity = csv_row(header);
  for (auto& [eps, cells] : by_eps) {
    cells.resize(results.size());
    std::vector<std::string> row = {eps_label(eps)};
    for (const auto& c : cells) row.push_back(c ? fmt(*c) : std::string());
    sparsity += csv_row(row);
  }

  fs::create_directories(out);
  write_file_atomic(out / "breakdown.csv", breakdown);
  write_file_atomic(out / "sparsity.csv", sparsity);
  log << "runs " << results.size() << "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hard-EM and MML training over precomputed solution sets"};
  app.require_subcommand(1);

  Options opts;
  auto add_common = [&opts](CLI::App* sub) {
    sub->add_option("--task", opts.task, "span | arithmetic | sql");
    sub->add_option("--config", opts.config, "key = value config file");
    sub->add_option("--set", opts.set, "config override key=value (repeatable)");
    sub->add_option("--out", opts.out, "output path");
  };
  auto add_training = [&opts](CLI::App* sub) {
    sub->add_option("--seed", opts.seed);
    sub->add_option("--objective", opts.objective, "first_only | mml | hard | annealed_hard");
    sub->add_option("--tau", opts.tau);
    sub->add_option("--anneal-direction", opts.anneal_direction, "paper_literal | inverted");
  };

  CLI::App* pre = app.add_subcommand("precompute", "Compute the solution set Z of every example");
  add_common(pre);
  pre->add_option("--in", opts.in, "examples JSONL")->required();
  pre->add_option("--pruning", opts.pruning, "column_grounded | exhaustive");

  CLI::App* tr = app.add_subcommand("train", "Train a scorer on examples and their solution sets");
  add_common(tr);
  add_training(tr);
  tr->add_option("--in", opts.in, "examples JSONL")->required();
  tr->add_option("--solutions", opts.solutions, "solutions JSONL")->required();
  tr->add_option("--pruning", opts.pruning, "column_grounded | exhaustive");

  CLI::App* ev = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(ev);
  ev->add_option("--in", opts.in, "examples JSONL")->required();
  ev->add_option("--checkpoint", opts.checkpoint)->required();

  CLI::App* an = app.add_subcommand("analyze", "Bucket and sparsity tables from eval outputs");
  add_common(an);
  an->add_option("--in", opts.in, "eval output directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (pre->parsed()) cmd_precompute(opts, out);
    else if (tr->parsed()) cmd_train(opts, out);
    else if (ev->parsed()) cmd_eval(opts, out);
    else cmd_analyze(opts, out);
    return kOk;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kSchemaError;
  } catch (const NonFiniteLoss& e) {
    err << "training aborted: " << e.what() << "\n";
    return kTrainingAbort;
  } catch (const EmptySolutionSet& e) {
    err << "training aborted: " << e.what() << "\n";
    return kTrainingAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv = {"hardem"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hardem::cli
