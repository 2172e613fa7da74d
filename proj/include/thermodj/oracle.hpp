// Copyright 2026 The thermodj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "thermodj/spin_algebra.hpp"

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace thermodj {

/// Truth table of f : {0,1}^n -> {0,1}. Input j packs the bits as
/// j = sum_k x_k 2^(n+1-k) for k = 2..n+1, i.e. x2 is the most significant
/// bit, matching spins 2..n+1 below the control spin.
class BooleanOracle {
 public:
  BooleanOracle(int n, std::vector<bool> table) : n_(n), table_(std::move(table)) {
    if (n < 1 || n >= kMaxDenseSpins) throw std::invalid_argument("input bit count out of range");
    if (table_.size() != (std::size_t{1} << n)) {
      throw std::invalid_argument("truth table length " + std::to_string(table_.size()) + " != 2^" +
                                  std::to_string(n));
    }
  }

  static BooleanOracle constant(int n, bool value) { return {n, std::vector<bool>(std::size_t{1} << n, value)}; }

  /// Table number `index` in the enumeration used by exhaustive sweeps: bit j
  /// of `index` is f(j).
  static BooleanOracle from_index(int n, std::uint64_t index) {
    std::vector<bool> t(std::size_t{1} << n);
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = (index >> j) & 1;
    return {n, std::move(t)};
  }

  /// Reads a bit string such as "01010110"; its length fixes n.
  static BooleanOracle from_bits(std::string_view bits) {
    std::vector<bool> t;
    for (char c : bits) {
      if (c != '0' && c != '1') throw std::invalid_argument("truth table must contain only '0' and '1'");
      t.push_back(c == '1');
    }
    if (t.size() < 2 || (t.size() & (t.size() - 1)) != 0) {
      throw std::invalid_argument("truth table length " + std::to_string(t.size()) + " is not a power of two >= 2");
    }
    int n = 0;
    while ((std::size_t{1} << n) < t.size()) ++n;
    return {n, std::move(t)};
  }

  int num_inputs() const { return n_; }
  std::size_t size() const { return table_.size(); }
  bool operator()(std::size_t j) const { return table_.at(j); }
  const std::vector<bool>& table() const { return table_; }

  std::size_t count_ones() const {
    std::size_t k = 0;
    for (bool b : table_) k += b;
    return k;
  }

  std::string to_bits() const {
    std::string s;
    for (bool b : table_) s += b ? '1' : '0';
    return s;
  }

  friend bool operator==(const BooleanOracle&, const BooleanOracle&) = default;

 private:
  int n_;
  std::vector<bool> table_;
};

enum class FunctionClass { Constant0, Constant1, Balanced, Neither };

inline const char* to_string(FunctionClass c) {
  switch (c) {
    case FunctionClass::Constant0: return "constant-0";
    case FunctionClass::Constant1: return "constant-1";
    case FunctionClass::Balanced: return "balanced";
    case FunctionClass::Neither: return "neither";
  }
  return "?";
}

inline FunctionClass classify(const BooleanOracle& f) {
  const auto ones = f.count_ones();
  if (ones == 0) return FunctionClass::Constant0;
  if (ones == f.size()) return FunctionClass::Constant1;
  if (2 * ones == f.size()) return FunctionClass::Balanced;
  return FunctionClass::Neither;
}

/// Syntax or name error in a function expression; position() is a byte offset.
class FunctionParseError : public std::invalid_argument {
 public:
  FunctionParseError(const std::string& what, std::size_t pos)
      : std::invalid_argument(what + " at position " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

namespace detail {

// Recursive-descent parser for
//   xor  := and { ('^' | U+2295) and }
//   and  := not { ['*'] not }          (juxtaposition is AND)
//   not  := '!' not | atom
//   atom := 'x' digits | '0' | '1' | '(' xor ')'
// producing a postfix program evaluated once per input.
class FunctionParser {
 public:
  enum class Op : std::uint8_t { Var, Const, Not, And, Xor };
  struct Instr {
    Op op;
    int arg = 0;
  };

  FunctionParser(std::string_view text, int n) : text_(text), n_(n) {}

  std::vector<Instr> parse() {
    skip();
    if (pos_ >= text_.size()) throw FunctionParseError("empty expression", pos_);
    parse_xor();
    skip();
    if (pos_ < text_.size()) throw FunctionParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return std::move(code_);
  }

 private:
  static constexpr std::string_view kCircledPlus = "\xE2\x8A\x95";

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_xor() {
    skip();
    if (pos_ >= text_.size()) return false;
    if (text_[pos_] == '^') {
      ++pos_;
      return true;
    }
    if (text_.substr(pos_, kCircledPlus.size()) == kCircledPlus) {
      pos_ += kCircledPlus.size();
      return true;
    }
    return false;
  }

  bool starts_operand() {
    skip();
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    return c == '!' || c == '(' || c == '0' || c == '1' || std::isalpha(static_cast<unsigned char>(c));
  }

  void parse_xor() {
    parse_and();
    while (at_xor()) {
      parse_and();
      code_.push_back({Op::Xor});
    }
  }

  void parse_and() {
    parse_not();
    while (true) {
      skip();
      if (pos_ < text_.size() && text_[pos_] == '*') {
        ++pos_;
        parse_not();
      } else if (starts_operand()) {
        parse_not();
      } else {
        break;
      }
      code_.push_back({Op::And});
    }
  }

  void parse_not() {
    skip();
    if (pos_ < text_.size() && text_[pos_] == '!') {
      ++pos_;
      parse_not();
      code_.push_back({Op::Not});
      return;
    }
    parse_atom();
  }

  void parse_atom() {
    skip();
    if (pos_ >= text_.size()) throw FunctionParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      const std::size_t open = pos_++;
      parse_xor();
      skip();
      if (pos_ >= text_.size() || text_[pos_] != ')') throw FunctionParseError("unmatched '('", open);
      ++pos_;
      return;
    }
    if (c == '0' || c == '1') {
      code_.push_back({Op::Const, c - '0'});
      ++pos_;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_++;
      std::size_t digits = pos_;
      while (digits < text_.size() && std::isdigit(static_cast<unsigned char>(text_[digits]))) ++digits;
      if (c != 'x' || digits == pos_) {
        std::size_t end = pos_;
        while (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) ++end;
        throw FunctionParseError("unknown variable '" + std::string(text_.substr(start, end - start)) + "'", start);
      }
      const int k = std::stoi(std::string(text_.substr(pos_, digits - pos_)));
      if (k < 2 || k > n_ + 1) {
        throw FunctionParseError("variable x" + std::to_string(k) + " out of range x2..x" + std::to_string(n_ + 1),
                                 start);
      }
      pos_ = digits;
      code_.push_back({Op::Var, k});
      return;
    }
    throw FunctionParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
  std::vector<Instr> code_;
};

}  // namespace detail

/// Evaluates an expression over x2..x_{n+1} into a truth table. Operators:
/// '!' (NOT) binds tightest, then AND ('*' or juxtaposition), then XOR ('^'
/// or the circled plus).
inline BooleanOracle parse_function(std::string_view expr, int n) {
  if (n < 1 || n >= kMaxDenseSpins) throw std::invalid_argument("input bit count out of range");
  using Op = detail::FunctionParser::Op;
  const auto code = detail::FunctionParser(expr, n).parse();
  std::vector<bool> table(std::size_t{1} << n);
  std::vector<bool> stack;
  for (std::size_t j = 0; j < table.size(); ++j) {
    stack.clear();
    for (const auto& ins : code) {
      switch (ins.op) {
        case Op::Var: stack.push_back((j >> (n + 1 - ins.arg)) & 1); break;
        case Op::Const: stack.push_back(ins.arg != 0); break;
        case Op::Not: stack.back() = !stack.back(); break;
        case Op::And:
        case Op::Xor: {
          const bool b = stack.back();
          stack.pop_back();
          stack.back() = ins.op == Op::And ? (stack.back() && b) : (stack.back() != b);
          break;
        }
      }
    }
    table[j] = stack.back();
  }
  return {n, std::move(table)};
}

/// U_f |j> = (-1)^f(j) |j> over n spins.
inline DenseOperator u_f(const BooleanOracle& f) {
  Eigen::VectorXcd d(static_cast<Eigen::Index>(f.size()));
  for (std::size_t j = 0; j < f.size(); ++j) d[static_cast<Eigen::Index>(j)] = f(j) ? -1.0 : 1.0;
  return DenseOperator::diagonal(f.num_inputs(), d);
}

/// Block-diagonal diag(1, U) with spin 1 as the control, over n+1 spins.
inline DenseOperator controlled_u(const DenseOperator& u) {
  if (!u.is_unitary()) throw std::invalid_argument("controlled_u: operand is not unitary");
  const int m = u.num_spins() + 1;
  detail::check_spin_count(m);
  const Eigen::Index half = u.dim();
  Matrix out = Matrix::Zero(2 * half, 2 * half);
  out.topLeftCorner(half, half).setIdentity();
  out.bottomRightCorner(half, half) = u.matrix();
  return {m, std::move(out)};
}

}  // namespace thermodj
