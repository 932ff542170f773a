#include "hardem/config.h"

#include <charconv>
#include <cstdio>
#include <map>

#include "hardem/error.h"
#include "hardem/features.h"

namespace hardem {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("bad value '" + std::string(value) + "' for '" + std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view value) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) bad_value(key, value);
  return v;
}

long long to_int(std::string_view key, std::string_view value) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) bad_value(key, value);
  return v;
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) bad_value(key, value);
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::vector<double> to_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i <= value.size()) {
    std::size_t j = value.find(',', i);
    if (j == std::string_view::npos) j = value.size();
    out.push_back(to_double(key, trim(value.substr(i, j - i))));
    i = j + 1;
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ",";
    out += format_number(v);
  }
  return out;
}

}  // namespace

RunConfig RunConfig::defaults(TaskKind task) {
  RunConfig c;
  c.task = task;
  c.buckets = parse_buckets("0,1,2-3,4-10,11+");
  switch (task) {
    case TaskKind::kSpanExtraction:
      c.scorer.kind = ScorerKind::kFactorizedSpan;
      c.scorer.extractor = "span";
      break;
    case TaskKind::kArithmetic:
      c.scorer.kind = ScorerKind::kFactorizedTag;
      c.scorer.extractor = "equation";
      break;
    case TaskKind::kSqlGeneration:
      c.scorer.kind = ScorerKind::kLogLinear;
      c.scorer.extractor = "sql";
      break;
  }
  c.train.objective = Objective::kHard;
  c.train.learning_rate = 0.1;
  c.train.batch_size = 10;
  c.train.max_steps = 1000;
  c.train.tau = 200;
  c.train.gradient_clip = 5.0;
  return c;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  auto& m = precompute.matcher;
  if (key == "task") {
    throw ConfigError("'task' cannot be changed on an existing config");
  } else if (key == "matcher") {
    if (value == "exact") m.function = MatchFunction::kExactMatch;
    else if (value == "rouge") m.function = MatchFunction::kRougeL;
    else bad_value(key, value);
  } else if (key == "max_span_len") {
    const auto v = to_int(key, value);
    if (v < 1) bad_value(key, value);
    m.max_span_len = static_cast<int>(v);
  } else if (key == "noisy_rank_k") {
    const auto v = to_int(key, value);
    if (v < 0) bad_value(key, value);
    m.noisy_rank_k = v == 0 ? std::nullopt : std::optional<int>(static_cast<int>(v));
  } else if (key == "specials") {
    try {
      precompute.arithmetic.specials =
          value.empty() ? SpecialNumbers() : SpecialNumbers(to_list(key, value));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "tol") {
    const double v = to_double(key, value);
    if (!(v > 0.0)) bad_value(key, value);
    precompute.arithmetic.tol = v;
  } else if (key == "allow_copy") {
    precompute.arithmetic.allow_copy = to_bool(key, value);
  } else if (key == "max_conditions") {
    const auto v = to_int(key, value);
    if (v < 0 || v > 3) bad_value(key, value);
    precompute.sql.max_conditions = static_cast<int>(v);
  } else if (key == "max_value_len") {
    const auto v = to_int(key, value);
    if (v < 1) bad_value(key, value);
    precompute.sql.max_value_len = static_cast<int>(v);
  } else if (key == "pruning") {
    if (value == "column_grounded") precompute.sql.pruning = Pruning::kColumnGrounded;
    else if (value == "exhaustive") precompute.sql.pruning = Pruning::kExhaustive;
    else bad_value(key, value);
  } else if (key == "scorer") {
    scorer.kind = parse_scorer(value);
  } else if (key == "feature_extractor") {
    bool known = false;
    for (const auto& n : featurizer_names()) known = known || n == value;
    if (!known) bad_value(key, value);
    scorer.extractor = std::string(value);
  } else if (key == "feature_dim") {
    const auto v = to_int(key, value);
    if (v < 1) bad_value(key, value);
    scorer.feature_dim = static_cast<std::size_t>(v);
  } else if (key == "tabular_size") {
    const auto v = to_int(key, value);
    if (v < 0) bad_value(key, value);
    scorer.tabular_size = static_cast<std::size_t>(v);
  } else if (key == "objective") {
    train.objective = parse_objective(value);
  } else if (key == "tau") {
    const auto v = to_int(key, value);
    if (v < 1) bad_value(key, value);
    train.tau = static_cast<long>(v);
  } else if (key == "anneal_direction") {
    train.direction = parse_direction(value);
  } else if (key == "learning_rate") {
    const double v = to_double(key, value);
    if (!(v > 0.0)) bad_value(key, value);
    train.learning_rate = v;
  } else if (key == "batch_size") {
    const auto v = to_int(key, value);
    if (v < 1) bad_value(key, value);
    train.batch_size = static_cast<std::size_t>(v);
  } else if (key == "max_steps") {
    const auto v = to_int(key, value);
    if (v < 0) bad_value(key, value);
    train.max_steps = static_cast<long>(v);
  } else if (key == "seed") {
    train.seed = to_uint(key, value);
  } else if (key == "gradient_clip") {
    const double v = to_double(key, value);
    if (v < 0.0) bad_value(key, value);
    train.gradient_clip = v;
  } else if (key == "epsilons") {
    auto v = to_list(key, value);
    for (double e : v) {
      if (!(e > 0.0)) bad_value(key, value);
    }
    epsilons = std::move(v);
  } else if (key == "z_buckets") {
    buckets = parse_buckets(value);
  } else if (key == "workers") {
    const auto v = to_int(key, value);
    if (v < 1) bad_value(key, value);
    workers = static_cast<std::size_t>(v);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::string RunConfig::to_text() const {
  std::map<std::string, std::string> kv;
  const auto& m = precompute.matcher;
  kv["task"] = task_name(task);
  kv["matcher"] = m.function == MatchFunction::kExactMatch ? "exact" : "rouge";
  kv["max_span_len"] = std::to_string(m.max_span_len);
  kv["noisy_rank_k"] = std::to_string(m.noisy_rank_k.value_or(0));
  kv["specials"] = join(precompute.arithmetic.specials.values());
  kv["tol"] = format_number(precompute.arithmetic.tol);
  kv["allow_copy"] = precompute.arithmetic.allow_copy ? "true" : "false";
  kv["max_conditions"] = std::to_string(precompute.sql.max_conditions);
  kv["max_value_len"] = std::to_string(precompute.sql.max_value_len);
  kv["pruning"] = precompute.sql.pruning == Pruning::kColumnGrounded ? "column_grounded" : "exhaustive";
  kv["scorer"] = scorer_name(scorer.kind);
  kv["feature_extractor"] = scorer.extractor;
  kv["feature_dim"] = std::to_string(scorer.feature_dim);
  kv["tabular_size"] = std::to_string(scorer.tabular_size);
  kv["objective"] = objective_name(train.objective);
  kv["tau"] = std::to_string(train.tau);
  kv["anneal_direction"] = direction_name(train.direction);
  kv["learning_rate"] = format_number(train.learning_rate);
  kv["batch_size"] = std::to_string(train.batch_size);
  kv["max_steps"] = std::to_string(train.max_steps);
  kv["seed"] = std::to_string(train.seed);
  kv["gradient_clip"] = format_number(train.gradient_clip);
  kv["epsilons"] = join(epsilons);
  kv["z_buckets"] = format_buckets(buckets);
  kv["workers"] = std::to_string(workers);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const { return stable_hash(to_text()); }

Scorer RunConfig::make_scorer() const {
  switch (scorer.kind) {
    case ScorerKind::kTabular: return Scorer::tabular(scorer.tabular_size);
    case ScorerKind::kLogLinear: return Scorer::log_linear(scorer.extractor, scorer.feature_dim);
    case ScorerKind::kFactorizedSpan: return Scorer::factorized_span();
    case ScorerKind::kFactorizedTag:
      return Scorer::factorized_tag(precompute.arithmetic.specials.size());
  }
  return Scorer{};
}

void RunConfig::validate() const {
  train.validate();
  const bool span_task = task == TaskKind::kSpanExtraction;
  const bool arith_task = task == TaskKind::kArithmetic;
  if (scorer.kind == ScorerKind::kFactorizedSpan && !span_task) {
    throw ConfigError("factorized_span scorer needs task = span");
  }
  if (scorer.kind == ScorerKind::kFactorizedTag && !arith_task) {
    throw ConfigError("factorized_tag scorer needs task = arithmetic");
  }
  if (scorer.kind == ScorerKind::kLogLinear) {
    const std::string want = span_task ? "span" : arith_task ? "equation" : "sql";
    if (scorer.extractor != want) {
      throw ConfigError("feature_extractor '" + scorer.extractor + "' does not fit task '" +
                        std::string(task_name(task)) + "'");
    }
  }
  if (buckets.empty()) throw ConfigError("z_buckets must not be empty");
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = text.find('\n', i);
    if (j == std::string_view::npos) j = text.size();
    std::string_view line = text.substr(i, j - i);
    i = j + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

RunConfig config_from_text(std::string_view text, TaskKind fallback_task) {
  const auto kv = parse_config_text(text);
  TaskKind task = fallback_task;
  for (const auto& [k, v] : kv) {
    if (k == "task") task = parse_task(v);
  }
  RunConfig c = RunConfig::defaults(task);
  for (const auto& [k, v] : kv) {
    if (k != "task") c.set(k, v);
  }
  return c;
}

}  // namespace hardem
