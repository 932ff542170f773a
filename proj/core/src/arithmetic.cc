#include "hardem/arithmetic.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hardem/error.h"

namespace hardem {
namespace {

constexpr Operator kOperators[] = {Operator::kPlus, Operator::kMinus,
                                   Operator::kPercent};

double signed_term(Operator op, double v) {
  switch (op) {
    case Operator::kPlus: return v;
    case Operator::kMinus: return -v;
    case Operator::kPercent: return 0.01 * v;
  }
  return v;
}

void append_numbers(const TokenSequence& seq, NumberSource source,
                    std::vector<NumberMention>& out) {
  for (int i = 0; i < seq.size(); ++i) {
    if (auto v = parse_number(seq[i].text)) out.push_back({*v, source, i});
  }
}

}  // namespace

SpecialNumbers::SpecialNumbers(std::vector<double> values)
    : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    for (std::size_t j = i + 1; j < values_.size(); ++j) {
      if (values_[i] == values_[j]) {
        throw std::invalid_argument("duplicate special number " +
                                    format_number(values_[i]));
      }
    }
  }
}

SpecialNumbers SpecialNumbers::standard() {
  return SpecialNumbers({1, 2, 3, 4, 5, 7, 10, 12, 100, 1000});
}

std::vector<NumberMention> extract_numbers(const TokenSequence& question,
                                           const TokenSequence& document) {
  std::vector<NumberMention> out;
  append_numbers(document, NumberSource::kDocument, out);
  append_numbers(question, NumberSource::kQuestion, out);
  return out;
}

double execute_equation(const Equation& z) {
  return signed_term(z.o1, z.n1.value) + signed_term(z.o2, z.n2.value);
}

std::vector<NumberMention> operand_pool(std::span<const NumberMention> mentions,
                                        const SpecialNumbers& specials) {
  std::vector<NumberMention> pool(mentions.begin(), mentions.end());
  for (std::size_t j = 0; j < specials.size(); ++j) {
    pool.push_back({specials.values()[j], NumberSource::kSpecial, static_cast<int>(j)});
  }
  return pool;
}

std::uint64_t equation_space_size(std::size_t operands, bool allow_copy) {
  const std::uint64_t m = operands;
  return (m < 2 ? 0 : 9 * m * (m - 1)) + (allow_copy ? m : 0);
}

void enumerate_equations(std::span<const NumberMention> mentions,
                         const SpecialNumbers& specials,
                         const std::function<void(const Equation&)>& visit,
                         bool allow_copy) {
  const std::vector<NumberMention> pool = operand_pool(mentions, specials);
  const NumberMention zero{0.0, NumberSource::kZero, 0};
  for (std::size_t a = 0; a < pool.size(); ++a) {
    for (std::size_t b = 0; b < pool.size(); ++b) {
      if (a == b) continue;
      for (Operator o1 : kOperators) {
        for (Operator o2 : kOperators) visit(Equation{o1, pool[a], o2, pool[b]});
      }
    }
    if (allow_copy) visit(Equation{Operator::kPlus, pool[a], Operator::kPlus, zero});
  }
}

std::vector<Equation> enumerate_equations(std::span<const NumberMention> mentions,
                                          const SpecialNumbers& specials,
                                          bool allow_copy) {
  std::vector<Equation> out;
  out.reserve(equation_space_size(mentions.size() + specials.size(), allow_copy));
  enumerate_equations(
      mentions, specials, [&out](const Equation& e) { out.push_back(e); },
      allow_copy);
  return out;
}

std::vector<double> numeric_answers(std::span<const std::string> answers) {
  std::vector<double> out;
  for (const auto& a : answers) {
    if (auto v = parse_number(a)) out.push_back(*v);
  }
  if (out.empty()) throw NonNumericAnswer("no gold answer parses as a number");
  return out;
}

SolutionSet arithmetic_solution_set(const Example& ex,
                                    const ArithmeticOptions& options) {
  if (ex.task != TaskKind::kArithmetic) {
    throw std::invalid_argument("arithmetic_solution_set: example '" + ex.id +
                                "' is not an arithmetic example");
  }
  std::vector<double> golds;
  try {
    golds = numeric_answers(ex.answers);
  } catch (const NonNumericAnswer&) {
    throw NonNumericAnswer("example '" + ex.id + "': no gold answer parses as a number");
  }
  const auto mentions = extract_numbers(ex.question, ex.document());

  SolutionSet out;
  out.example_id = ex.id;
  enumerate_equations(
      mentions, options.specials,
      [&](const Equation& e) {
        ++out.candidate_count;
        const double v = execute_equation(e);
        for (double g : golds) {
          if (std::fabs(v - g) <= options.tol) {
            out.solutions.emplace_back(e);
            break;
          }
        }
      },
      options.allow_copy);
  return out;
}

}  // namespace hardem
