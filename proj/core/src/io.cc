#include "hardem/io.h"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "hardem/error.h"
#include "json.hpp"

namespace hardem {
namespace {

using Json = nlohmann::ordered_json;

template <typename F>
void for_each_line(std::string_view text, F&& fn) {
  std::size_t line_no = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = text.find('\n', i);
    if (j == std::string_view::npos) j = text.size();
    std::string_view line = text.substr(i, j - i);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    i = j + 1;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    fn(line, line_no);
  }
}

Json parse_object(std::string_view line, std::size_t line_no) {
  Json j = Json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) throw SchemaError(line_no, "invalid JSON");
  if (!j.is_object()) throw SchemaError(line_no, "expected a JSON object");
  return j;
}

const Json& field(const Json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(line_no, std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const Json& j, const char* key, std::size_t line_no) {
  const Json& v = field(j, key, line_no);
  if (!v.is_string()) throw SchemaError(line_no, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const Json& v, const char* key, std::size_t line_no) {
  if (!v.is_array()) throw SchemaError(line_no, std::string("'") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) {
      throw SchemaError(line_no, std::string("'") + key + "' must hold strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

long long int_field(const Json& j, const char* key, std::size_t line_no) {
  const Json& v = field(j, key, line_no);
  if (!v.is_number_integer()) {
    throw SchemaError(line_no, std::string("'") + key + "' must be an integer");
  }
  return v.get<long long>();
}

double number_field(const Json& j, const char* key, std::size_t line_no) {
  const Json& v = field(j, key, line_no);
  if (!v.is_number()) throw SchemaError(line_no, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

template <typename E>
E parse_enum(const Json& j, const char* key, std::size_t line_no,
             std::initializer_list<std::pair<std::string_view, E>> names) {
  const std::string s = string_field(j, key, line_no);
  for (const auto& [name, value] : names) {
    if (name == s) return value;
  }
  throw SchemaError(line_no, "unknown " + std::string(key) + " '" + s + "'");
}

Operator parse_operator(const Json& j, const char* key, std::size_t line_no) {
  return parse_enum<Operator>(j, key, line_no,
                              {{"+", Operator::kPlus}, {"-", Operator::kMinus}, {"%", Operator::kPercent}});
}

Json mention_to_json(const NumberMention& n) {
  Json j;
  j["source"] = source_name(n.source);
  j["index"] = n.index;
  j["value"] = n.value;
  return j;
}

NumberMention parse_mention(const Json& j, std::size_t line_no) {
  if (!j.is_object()) throw SchemaError(line_no, "operand must be an object");
  NumberMention n;
  n.source = parse_enum<NumberSource>(j, "source", line_no,
                                      {{source_name(NumberSource::kDocument), NumberSource::kDocument},
                                       {source_name(NumberSource::kQuestion), NumberSource::kQuestion},
                                       {source_name(NumberSource::kSpecial), NumberSource::kSpecial},
                                       {source_name(NumberSource::kZero), NumberSource::kZero}});
  n.index = static_cast<int>(int_field(j, "index", line_no));
  n.value = number_field(j, "value", line_no);
  return n;
}

Json solution_to_json(const Solution& z) {
  struct Visitor {
    Json operator()(const Span& s) const {
      Json j;
      j["type"] = "span";
      j["s"] = s.start;
      j["e"] = s.end;
      return j;
    }
    Json operator()(const Equation& e) const {
      Json j;
      j["type"] = "equation";
      j["o1"] = operator_symbol(e.o1);
      j["n1"] = mention_to_json(e.n1);
      j["o2"] = operator_symbol(e.o2);
      j["n2"] = mention_to_json(e.n2);
      return j;
    }
    Json operator()(const SqlQuery& q) const {
      Json j;
      j["type"] = "sql";
      j["sel"] = q.sel;
      j["agg"] = aggregation_name(q.agg);
      Json conds = Json::array();
      for (const auto& c : q.conditions) {
        Json cj;
        cj["col"] = c.column;
        cj["op"] = compare_symbol(c.op);
        cj["value_text"] = c.value_text;
        cj["span"] = Json::array({c.value_start, c.value_end});
        conds.push_back(std::move(cj));
      }
      j["conds"] = std::move(conds);
      return j;
    }
  };
  return std::visit(Visitor{}, z);
}

Solution parse_solution(const Json& j, std::size_t line_no) {
  if (!j.is_object()) throw SchemaError(line_no, "solution must be an object");
  const std::string type = string_field(j, "type", line_no);
  if (type == "span") {
    return Span{static_cast<int>(int_field(j, "s", line_no)),
                static_cast<int>(int_field(j, "e", line_no))};
  }
  if (type == "equation") {
    Equation e;
    e.o1 = parse_operator(j, "o1", line_no);
    e.n1 = parse_mention(field(j, "n1", line_no), line_no);
    e.o2 = parse_operator(j, "o2", line_no);
    e.n2 = parse_mention(field(j, "n2", line_no), line_no);
    return e;
  }
  if (type == "sql") {
    SqlQuery q;
    q.sel = static_cast<int>(int_field(j, "sel", line_no));
    q.agg = parse_enum<Aggregation>(j, "agg", line_no,
                                    {{aggregation_name(Aggregation::kNone), Aggregation::kNone},
                                     {aggregation_name(Aggregation::kSum), Aggregation::kSum},
                                     {aggregation_name(Aggregation::kMean), Aggregation::kMean},
                                     {aggregation_name(Aggregation::kMax), Aggregation::kMax},
                                     {aggregation_name(Aggregation::kMin), Aggregation::kMin},
                                     {aggregation_name(Aggregation::kCount), Aggregation::kCount}});
    const Json& conds = field(j, "conds", line_no);
    if (!conds.is_array()) throw SchemaError(line_no, "'conds' must be an array");
    for (const auto& cj : conds) {
      if (!cj.is_object()) throw SchemaError(line_no, "condition must be an object");
      Condition c;
      c.column = static_cast<int>(int_field(cj, "col", line_no));
      c.op = parse_enum<CompareOp>(cj, "op", line_no,
                                   {{compare_symbol(CompareOp::kEq), CompareOp::kEq},
                                    {compare_symbol(CompareOp::kLt), CompareOp::kLt},
                                    {compare_symbol(CompareOp::kGt), CompareOp::kGt}});
      c.value_text = string_field(cj, "value_text", line_no);
      const Json& span = field(cj, "span", line_no);
      if (!span.is_array() || span.size() != 2 || !span[0].is_number_integer() ||
          !span[1].is_number_integer()) {
        throw SchemaError(line_no, "'span' must be [start, end]");
      }
      c.value_start = span[0].get<int>();
      c.value_end = span[1].get<int>();
      q.conditions.push_back(std::move(c));
    }
    return q;
  }
  throw SchemaError(line_no, "unknown solution type '" + type + "'");
}

std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::strict); }

}  // namespace

Example parse_example(std::string_view line, TaskKind task, std::size_t line_no) {
  const Json j = parse_object(line, line_no);
  Example ex;
  ex.task = task;
  ex.id = string_field(j, "id", line_no);
  ex.question = tokenize(string_field(j, "question", line_no));
  ex.answers = string_list(field(j, "answers", line_no), "answers", line_no);
  if (task == TaskKind::kSqlGeneration) {
    const Json& t = field(j, "table", line_no);
    if (!t.is_object()) throw SchemaError(line_no, "'table' must be an object");
    const auto header = string_list(field(t, "header", line_no), "header", line_no);
    const Json& rows_json = field(t, "rows", line_no);
    if (!rows_json.is_array()) throw SchemaError(line_no, "'rows' must be an array");
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rows_json) rows.push_back(string_list(r, "rows", line_no));
    try {
      ex.context = Table::make(header, std::move(rows));
    } catch (const std::invalid_argument& e) {
      throw SchemaError(line_no, e.what());
    }
  } else {
    ex.context = tokenize(string_field(j, "document", line_no));
  }
  try {
    ex.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(line_no, e.what());
  }
  return ex;
}

std::vector<Example> parse_examples(std::string_view text, TaskKind task) {
  std::vector<Example> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    out.push_back(parse_example(line, task, line_no));
  });
  return out;
}

std::string example_to_json(const Example& ex) {
  Json j;
  j["id"] = ex.id;
  j["question"] = ex.question.text;
  if (ex.task == TaskKind::kSqlGeneration) {
    Json header = Json::array();
    for (const auto& h : ex.table().headers()) header.push_back(h.text);
    Json t;
    t["header"] = std::move(header);
    t["rows"] = ex.table().rows();
    j["table"] = std::move(t);
  } else {
    j["document"] = ex.document().text;
  }
  j["answers"] = ex.answers;
  return dump(j);
}

SolutionSet parse_solution_set(std::string_view line, std::size_t line_no) {
  const Json j = parse_object(line, line_no);
  SolutionSet z;
  z.example_id = string_field(j, "id", line_no);
  const long long count = int_field(j, "candidate_count", line_no);
  if (count < 0) throw SchemaError(line_no, "'candidate_count' must be non-negative");
  z.candidate_count = static_cast<std::uint64_t>(count);
  const Json& sols = field(j, "solutions", line_no);
  if (!sols.is_array()) throw SchemaError(line_no, "'solutions' must be an array");
  for (const auto& s : sols) z.solutions.push_back(parse_solution(s, line_no));
  if (z.solutions.size() > z.candidate_count) {
    throw SchemaError(line_no, "more solutions than 'candidate_count'");
  }
  try {
    for (std::size_t i = 1; i < z.solutions.size(); ++i) {
      if (!canonical_less(z.solutions[i - 1], z.solutions[i])) {
        throw SchemaError(line_no, "solutions must be distinct and in canonical order");
      }
    }
  } catch (const std::invalid_argument&) {
    throw SchemaError(line_no, "solutions mix types");
  }
  return z;
}

std::vector<SolutionSet> parse_solution_sets(std::string_view text) {
  std::vector<SolutionSet> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    out.push_back(parse_solution_set(line, line_no));
  });
  return out;
}

std::string solution_set_to_json(const SolutionSet& z) {
  Json j;
  j["id"] = z.example_id;
  j["candidate_count"] = z.candidate_count;
  Json sols = Json::array();
  for (const auto& s : z.solutions) sols.push_back(solution_to_json(s));
  j["solutions"] = std::move(sols);
  return dump(j);
}

std::string eval_record_to_json(const EvalRecord& r, std::span<const double> epsilons) {
  Json j;
  j["id"] = r.id;
  j["predicted"] = r.predicted ? solution_to_json(*r.predicted) : Json(nullptr);
  j["predicted_text"] = r.predicted ? describe(*r.predicted) : std::string();
  j["answer"] = r.answer;
  j["em"] = r.em;
  j["f1"] = r.f1;
  j["rouge_l"] = r.rouge_l;
  j["z_size"] = r.z_size;
  j["epsilons"] = std::vector<double>(epsilons.begin(), epsilons.end());
  Json sp = Json::array();
  for (const auto& s : r.sparsity) sp.push_back(s ? Json(*s) : Json(nullptr));
  j["sparsity"] = std::move(sp);
  return dump(j);
}

EvalRecord parse_eval_record(std::string_view line, std::size_t line_no,
                             std::vector<double>* epsilons) {
  const Json j = parse_object(line, line_no);
  EvalRecord r;
  r.id = string_field(j, "id", line_no);
  const Json& p = field(j, "predicted", line_no);
  if (!p.is_null()) r.predicted = parse_solution(p, line_no);
  r.answer = string_field(j, "answer", line_no);
  r.em = number_field(j, "em", line_no);
  r.f1 = number_field(j, "f1", line_no);
  r.rouge_l = number_field(j, "rouge_l", line_no);
  const long long z = int_field(j, "z_size", line_no);
  if (z < 0) throw SchemaError(line_no, "'z_size' must be non-negative");
  r.z_size = static_cast<std::size_t>(z);
  const Json& eps = field(j, "epsilons", line_no);
  const Json& sp = field(j, "sparsity", line_no);
  if (!eps.is_array() || !sp.is_array() || eps.size() != sp.size()) {
    throw SchemaError(line_no, "'epsilons' and 'sparsity' must be arrays of equal length");
  }
  std::vector<double> e;
  for (const auto& v : eps) {
    if (!v.is_number()) throw SchemaError(line_no, "'epsilons' must hold numbers");
    e.push_back(v.get<double>());
  }
  for (const auto& v : sp) {
    if (v.is_null()) r.sparsity.emplace_back();
    else if (v.is_number()) r.sparsity.emplace_back(v.get<double>());
    else throw SchemaError(line_no, "'sparsity' must hold numbers or null");
  }
  if (epsilons) *epsilons = std::move(e);
  return r;
}

EvalResult parse_eval_records(std::string_view text) {
  EvalResult result;
  bool first = true;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    std::vector<double> eps;
    result.records.push_back(parse_eval_record(line, line_no, &eps));
    if (first) {
      result.epsilons = std::move(eps);
      first = false;
    } else if (eps != result.epsilons) {
      throw SchemaError(line_no, "epsilon list differs from earlier records");
    }
  });
  result.finalize();
  return result;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(std::span<const std::string> fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += '\n';
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot rename onto '" + path.string() + "'");
  }
}

std::string serialize_checkpoint(const Checkpoint& c) {
  Json h;
  h["format"] = "hardem-checkpoint";
  h["version"] = 1;
  h["task"] = task_name(c.task);
  h["scorer"] = scorer_name(c.scorer.kind);
  h["extractor"] = c.scorer.extractor;
  h["num_specials"] = c.scorer.num_specials;
  h["num_params"] = c.scorer.params.size();
  h["step"] = c.step;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(c.config_hash));
  h["config_hash"] = hex;
  h["config"] = c.config_text;
  std::string out = dump(h);
  out += '\n';
  const std::size_t header = out.size();
  out.resize(header + 8 * c.scorer.params.size());
  for (std::size_t i = 0; i < c.scorer.params.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(c.scorer.params[i]);
    for (int b = 0; b < 8; ++b) {
      out[header + 8 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string_view::npos) throw CheckpointError("checkpoint header missing");
  const Json h = Json::parse(bytes.begin(), bytes.begin() + static_cast<long>(nl), nullptr, false);
  if (h.is_discarded() || !h.is_object()) throw CheckpointError("checkpoint header is not JSON");
  Checkpoint c;
  try {
    if (h.at("format").get<std::string>() != "hardem-checkpoint") {
      throw CheckpointError("not a hardem checkpoint");
    }
    if (h.at("version").get<int>() != 1) throw CheckpointError("unsupported checkpoint version");
    c.task = parse_task(h.at("task").get<std::string>());
    c.scorer.kind = parse_scorer(h.at("scorer").get<std::string>());
    c.scorer.extractor = h.at("extractor").get<std::string>();
    c.scorer.num_specials = h.at("num_specials").get<std::size_t>();
    c.step = h.at("step").get<long>();
    const std::string hex = h.at("config_hash").get<std::string>();
    c.config_hash = std::stoull(hex, nullptr, 16);
    c.config_text = h.at("config").get<std::string>();
    const auto n = h.at("num_params").get<std::size_t>();
    const std::string_view body = bytes.substr(nl + 1);
    if (body.size() != 8 * n) throw CheckpointError("checkpoint parameter block has wrong size");
    c.scorer.params.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(body[8 * i + b])) << (8 * b);
      }
      c.scorer.params[i] = std::bit_cast<double>(bits);
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  } catch (const std::logic_error& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }
  return c;
}

}  // namespace hardem
