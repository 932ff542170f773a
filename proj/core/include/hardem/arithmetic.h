#ifndef HARDEM_ARITHMETIC_H_
#define HARDEM_ARITHMETIC_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hardem/example.h"
#include "hardem/solution.h"
#include "hardem/text.h"

namespace hardem {

// Predefined special operands S, ordered and duplicate-free.
class SpecialNumbers {
 public:
  SpecialNumbers() = default;
  // Throws std::invalid_argument on duplicates.
  explicit SpecialNumbers(std::vector<double> values);

  // {1, 2, 3, 4, 5, 7, 10, 12, 100, 1000}
  static SpecialNumbers standard();

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

// Document numbers first, then question numbers, each in token order.
std::vector<NumberMention> extract_numbers(const TokenSequence& question,
                                           const TokenSequence& document);

// Signed sum: + keeps the operand, - negates it, % scales it by 0.01.
double execute_equation(const Equation& z);

// Mentions followed by the special numbers, i.e. the operand pool.
std::vector<NumberMention> operand_pool(std::span<const NumberMention> mentions,
                                        const SpecialNumbers& specials);

// 9 * m * (m - 1) for m operands, plus m copy equations when allow_copy.
std::uint64_t equation_space_size(std::size_t operands, bool allow_copy = false);

// Streams every (o1, n1, o2, n2) with n1 and n2 distinct operands, in
// canonical order. With allow_copy, each operand also yields the copy
// equation (+, n, +, 0).
void enumerate_equations(std::span<const NumberMention> mentions,
                         const SpecialNumbers& specials,
                         const std::function<void(const Equation&)>& visit,
                         bool allow_copy = false);
std::vector<Equation> enumerate_equations(std::span<const NumberMention> mentions,
                                          const SpecialNumbers& specials,
                                          bool allow_copy = false);

struct ArithmeticOptions {
  SpecialNumbers specials = SpecialNumbers::standard();
  double tol = 1e-6;
  bool allow_copy = false;
};

// Gold answers that parse as numbers. Throws NonNumericAnswer when none do.
std::vector<double> numeric_answers(std::span<const std::string> answers);

// Z = equations whose value lies within tol of some numeric gold answer.
SolutionSet arithmetic_solution_set(const Example& ex,
                                    const ArithmeticOptions& options = {});

}  // namespace hardem

#endif  // HARDEM_ARITHMETIC_H_
