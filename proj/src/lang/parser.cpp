// Copyright 2026 The ZFI Model Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "zfi/lang/program.hpp"

namespace zfi::lang {
namespace {

enum class Tok { kIdent, kNumber, kPunct, kDirective, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::uint64_t number = 0;
  int column = 0;
};

std::vector<Token> tokenize(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto col = [&](std::size_t at) { return static_cast<int>(at) + 1; };
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#' || c == ';') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
      ++i;
      while (i < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[i])) ||
              line[i] == '_')) {
        ++i;
      }
      std::string text(line.substr(start, i - start));
      out.push_back({c == '.' ? Tok::kDirective : Tok::kIdent, text, 0,
                     col(start)});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      int base = 10;
      if (c == '0' && i + 1 < line.size() &&
          (line[i + 1] == 'x' || line[i + 1] == 'X')) {
        base = 16;
        i += 2;
      }
      const std::size_t digits = i;
      std::uint64_t value = 0;
      while (i < line.size() &&
             std::isxdigit(static_cast<unsigned char>(line[i]))) {
        const char d = line[i];
        int v = std::isdigit(static_cast<unsigned char>(d))
                    ? d - '0'
                    : std::tolower(static_cast<unsigned char>(d)) - 'a' + 10;
        if (v >= base) break;
        value = value * base + v;
        if (value > 0xFFFFFFFFull) {
          throw ParseError(line_no, col(start), "numeric literal too large");
        }
        ++i;
      }
      if (i == digits) {
        throw ParseError(line_no, col(start), "malformed number");
      }
      out.push_back({Tok::kNumber, std::string(line.substr(start, i - start)),
                     value, col(start)});
      continue;
    }
    static constexpr std::string_view kTwoChar[] = {":=", "==", "!=", ">=",
                                                    "<<", ">>"};
    bool matched = false;
    for (auto p : kTwoChar) {
      if (line.substr(i, 2) == p) {
        out.push_back({Tok::kPunct, std::string(p), 0, col(start)});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view kOneChar = ":[]()+-*<&|^,@=";
    if (kOneChar.find(c) != std::string_view::npos) {
      out.push_back({Tok::kPunct, std::string(1, c), 0, col(start)});
      ++i;
      continue;
    }
    throw ParseError(line_no, col(start),
                     std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::kEnd, "", 0, col(line.size())});
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int line_no, Width w,
             const std::map<std::string, Value>* labels)
      : toks_(std::move(toks)), line_(line_no), w_(w), labels_(labels) {}

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::kEnd; }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::kPunct && peek(ahead).text == p;
  }
  bool is_word(std::string_view wd) const {
    return peek().kind == Tok::kIdent && peek().text == wd;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, peek().column, msg);
  }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw ParseError(line_, t.column, msg);
  }
  void expect(std::string_view p) {
    if (!is_punct(p)) {
      fail("expected '" + std::string(p) + "', found '" + peek().text + "'");
    }
    ++pos_;
  }
  void expect_end() {
    if (!at_end()) fail("unexpected trailing input '" + peek().text + "'");
  }

  Reg parse_register() {
    const Token t = next();
    if (t.kind != Tok::kIdent) fail_at(t, "expected register");
    auto r = reg_from_name(t.text);
    if (!r) fail_at(t, "unknown register name '" + t.text + "'");
    return *r;
  }

  Value checked_literal(const Token& t, bool negate) {
    if (t.number > w_.mask()) {
      fail_at(t, "literal " + t.text + " does not fit in " +
                     std::to_string(w_.bits()) + " bits");
    }
    return negate ? w_.wrap(w_.cardinality() - t.number) : w_.wrap(t.number);
  }

  // Precedence, loosest first.
  Expr parse_expr() { return parse_level(0); }

  Expr parse_level(int level) {
    if (level == 5) return parse_mul();
    Expr lhs = parse_level(level + 1);
    for (;;) {
      auto op = binop_at(level);
      if (!op) return lhs;
      ++pos_;
      Expr rhs = parse_level(level + 1);
      lhs = Expr::binary(*op, std::move(lhs), std::move(rhs));
    }
  }

  std::optional<BinOp> binop_at(int level) const {
    const Token& t = peek();
    if (t.kind != Tok::kPunct && t.kind != Tok::kIdent) return std::nullopt;
    const std::string& s = t.text;
    switch (level) {
      case 0:
        if (t.kind != Tok::kPunct) return std::nullopt;
        if (s == "<") return BinOp::kLt;
        if (s == "==" || s == "=") return BinOp::kEq;
        if (s == "!=") return BinOp::kNe;
        if (s == ">=") return BinOp::kGe;
        return std::nullopt;
      case 1:
        if (s == "or" || s == "|") return BinOp::kOr;
        if (s == "xor" || s == "^") return BinOp::kXor;
        return std::nullopt;
      case 2:
        if (s == "and" || s == "&") return BinOp::kAnd;
        if (s == "mask") return BinOp::kMask;
        return std::nullopt;
      case 3:
        if (s == "shl" || s == "<<") return BinOp::kShl;
        if (s == "shr" || s == ">>") return BinOp::kShr;
        return std::nullopt;
      case 4:
        if (t.kind != Tok::kPunct) return std::nullopt;
        if (s == "+") return BinOp::kAdd;
        if (s == "-") return BinOp::kSub;
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

  Expr parse_mul() {
    Expr lhs = parse_atom();
    while (is_punct("*")) {
      ++pos_;
      lhs = Expr::binary(BinOp::kMul, std::move(lhs), parse_atom());
    }
    return lhs;
  }

  Expr parse_atom() {
    if (is_punct("(")) {
      ++pos_;
      Expr e = parse_expr();
      expect(")");
      return e;
    }
    if (is_punct("-") && peek(1).kind == Tok::kNumber) {
      ++pos_;
      return Expr::literal(checked_literal(next(), true));
    }
    if (peek().kind == Tok::kNumber) {
      return Expr::literal(checked_literal(next(), false));
    }
    if (peek().kind == Tok::kIdent) return Expr::reg(parse_register());
    fail("expected expression, found '" + peek().text + "'");
  }

  // After '[': base register, then optional '+ offset', then ']'.
  std::pair<Reg, Expr> parse_mem_operand() {
    expect("[");
    Reg base = parse_register();
    Expr off = Expr::literal(0);
    if (is_punct("+")) {
      ++pos_;
      off = parse_expr();
    } else if (is_punct("-")) {
      ++pos_;
      off = Expr::binary(BinOp::kSub, Expr::literal(0), parse_atom());
    }
    expect("]");
    return {base, off};
  }

  // Relative target: +N / -N or a label. Returns the displacement.
  std::optional<Value> parse_relative(Value here) {
    if (is_punct("+") || is_punct("-")) {
      const bool neg = next().text == "-";
      const Token t = next();
      if (t.kind != Tok::kNumber) fail_at(t, "expected displacement");
      if (t.number >= w_.cardinality()) {
        fail_at(t, "displacement out of range for width");
      }
      return neg ? w_.wrap(w_.cardinality() - t.number) : w_.wrap(t.number);
    }
    if (peek().kind == Tok::kIdent && !reg_from_name(peek().text)) {
      const Token t = next();
      if (labels_ == nullptr) fail_at(t, "labels unavailable here");
      auto it = labels_->find(t.text);
      if (it == labels_->end()) fail_at(t, "unknown label '" + t.text + "'");
      return w_.wrap(it->second + w_.cardinality() - here);
    }
    return std::nullopt;
  }

  Instruction parse_instruction(Value here) {
    const Token head = peek();
    if (is_punct("[")) {
      auto [base, off] = parse_mem_operand();
      expect(":=");
      Expr value = parse_expr();
      expect_end();
      return Store{base, std::move(off), std::move(value)};
    }
    if (head.kind != Tok::kIdent) fail("expected instruction");
    if (head.text == "ret" || head.text == "flush" ||
        head.text == "endbranch") {
      ++pos_;
      expect_end();
      if (head.text == "ret") return Ret{};
      if (head.text == "flush") return Flush{};
      return EndBranch{};
    }
    if (head.text == "jmp" || head.text == "call") {
      ++pos_;
      const bool is_jmp = head.text == "jmp";
      if (auto disp = parse_relative(here)) {
        if (is_jmp && is_word("if")) {
          ++pos_;
          Expr cond = parse_expr();
          expect_end();
          return JumpIf{*disp, std::move(cond)};
        }
        expect_end();
        if (is_jmp) return Jump{*disp};
        return Call{*disp};
      }
      Reg target = parse_register();
      expect_end();
      if (is_jmp) return JumpInd{target};
      return CallInd{target};
    }
    Reg dst = parse_register();
    expect(":=");
    if (is_punct("[")) {
      auto [base, off] = parse_mem_operand();
      expect_end();
      return Load{dst, base, std::move(off)};
    }
    Expr value = parse_expr();
    expect_end();
    return Assign{dst, std::move(value)};
  }

  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t p) { pos_ = p; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
  Width w_;
  const std::map<std::string, Value>* labels_;
};

struct Statement {
  int line;
  std::vector<Token> tokens;
  std::size_t body;  // index of the first token after the prefixes
  Value addr;
};

struct Directive {
  int line;
  std::vector<Token> tokens;
};

}  // namespace

Program parse_program(std::string_view text, const ParseOptions& opts) {
  std::vector<std::pair<int, std::vector<Token>>> lines;
  int line_no = 0;
  std::size_t pos = 0;
  std::optional<unsigned> declared_width;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                      : nl - pos);
    ++line_no;
    auto toks = tokenize(line, line_no);
    if (toks.front().kind == Tok::kDirective && toks.front().text == ".width") {
      if (toks.size() < 3 || toks[1].kind != Tok::kNumber) {
        throw ParseError(line_no, toks.front().column, ".width expects a number");
      }
      declared_width = static_cast<unsigned>(toks[1].number);
    }
    if (toks.size() > 1) lines.emplace_back(line_no, std::move(toks));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }

  const unsigned bits =
      opts.width_override.value_or(declared_width.value_or(opts.default_width));
  Width w;
  try {
    w = Width(bits);
  } catch (const std::invalid_argument& e) {
    throw ParseError(1, 1, e.what());
  }

  // Pass 1: addresses and labels.
  std::map<std::string, Value> labels;
  std::vector<Statement> statements;
  std::vector<Directive> directives;
  std::uint32_t cursor = 0;
  for (auto& [ln, toks] : lines) {
    if (toks.front().kind == Tok::kDirective) {
      directives.push_back({ln, std::move(toks)});
      continue;
    }
    std::size_t i = 0;
    while ((toks[i].kind == Tok::kIdent || toks[i].kind == Tok::kNumber) &&
           toks[i + 1].kind == Tok::kPunct && toks[i + 1].text == ":") {
      if (toks[i].kind == Tok::kNumber) {
        if (toks[i].number > w.mask()) {
          throw ParseError(ln, toks[i].column, "address out of range");
        }
        cursor = static_cast<std::uint32_t>(toks[i].number);
      } else {
        if (reg_from_name(toks[i].text)) {
          throw ParseError(ln, toks[i].column,
                           "label '" + toks[i].text + "' names a register");
        }
        if (!labels.emplace(toks[i].text, w.wrap(cursor)).second) {
          throw ParseError(ln, toks[i].column,
                           "duplicate label '" + toks[i].text + "'");
        }
      }
      i += 2;
    }
    if (toks[i].kind == Tok::kEnd) continue;
    if (cursor > w.mask()) {
      throw ParseError(ln, toks[i].column, "code address space exhausted");
    }
    statements.push_back({ln, std::move(toks), i, w.wrap(cursor)});
    ++cursor;
  }

  // Pass 2: instructions.
  Program program(w);
  bool entry_set = false;
  for (auto& st : statements) {
    LineParser lp(st.tokens, st.line, w, &labels);
    lp.set_pos(st.body);
    Instruction insn = lp.parse_instruction(st.addr);
    if (program.mapped(st.addr)) {
      throw ParseError(st.line, st.tokens[st.body].column,
                       "duplicate address " + std::to_string(st.addr));
    }
    program.insert(st.addr, std::move(insn));
    if (!entry_set) {
      program.set_entry(st.addr);
      entry_set = true;
    }
  }

  auto resolve = [&](const Directive& d, const Token& t) -> Value {
    if (t.kind == Tok::kNumber) {
      if (t.number > w.mask()) throw ParseError(d.line, t.column, "out of range");
      return w.wrap(t.number);
    }
    if (t.kind == Tok::kIdent) {
      auto it = labels.find(t.text);
      if (it == labels.end()) {
        throw ParseError(d.line, t.column, "unknown label '" + t.text + "'");
      }
      return it->second;
    }
    throw ParseError(d.line, t.column, "expected address or label");
  };

  for (const auto& d : directives) {
    const auto& name = d.tokens.front().text;
    if (name == ".width") continue;
    if (name == ".entry") {
      if (d.tokens.size() != 3) {
        throw ParseError(d.line, d.tokens.front().column, ".entry expects one operand");
      }
      program.set_entry(resolve(d, d.tokens[1]));
    } else if (name == ".elem") {
      if (d.tokens.size() != 4) {
        throw ParseError(d.line, d.tokens.front().column,
                         ".elem expects <mem-addr> <code-addr|label>");
      }
      program.add_code_pointer(
          {resolve(d, d.tokens[1]), resolve(d, d.tokens[2])});
    } else {
      throw ParseError(d.line, d.tokens.front().column,
                       "unknown directive '" + name + "'");
    }
  }
  return program;
}

Expr parse_expr(std::string_view text, Width w) {
  LineParser lp(tokenize(text, 1), 1, w, nullptr);
  Expr e = lp.parse_expr();
  lp.expect_end();
  return e;
}

}  // namespace zfi::lang
