#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "ta/core.hpp"

namespace ta {

struct SourcePos {
  int line = 1;
  int col = 1;
};

struct ParseError : Error {
  SourcePos pos;
  ParseError(const std::string& msg, SourcePos p)
      : Error(std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + msg), pos(p) {}
};

enum class TokKind { Ident, String, Symbol, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  SourcePos pos;
};

inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '$';
}

// Shared tokenizer for all text formats. Comments run from '#' to end of line.
inline std::vector<Token> tokenize(const std::string& src) {
  static const char* multi[] = {"::=", "]=>", ":=", "=[", "->", "/\\", "\\/", "!=", "=>"};
  std::vector<Token> out;
  SourcePos p;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++p.line;
        p.col = 1;
      } else {
        ++p.col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.pos = p;
    if (c == '"') {
      t.kind = TokKind::String;
      advance(1);
      while (i < src.size() && src[i] != '"') {
        if (src[i] == '\\' && i + 1 < src.size() && (src[i + 1] == '"' || src[i + 1] == '\\')) {
          t.text += src[i + 1];
          advance(2);
          continue;
        }
        t.text += src[i];
        advance(1);
      }
      if (i >= src.size()) throw ParseError("unterminated string", t.pos);
      advance(1);
      out.push_back(t);
      continue;
    }
    if (is_ident_char(c)) {
      t.kind = TokKind::Ident;
      while (i < src.size() && is_ident_char(src[i])) {
        t.text += src[i];
        advance(1);
      }
      out.push_back(t);
      continue;
    }
    t.kind = TokKind::Symbol;
    bool matched = false;
    for (const char* m : multi) {
      std::string ms(m);
      if (src.compare(i, ms.size(), ms) == 0) {
        t.text = ms;
        advance(ms.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      if (std::string("(){}[],:;.=|*+&~\\^@-<>/!?%").find(c) == std::string::npos)
        throw ParseError(std::string("unexpected character '") + c + "'", p);
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(t);
  }
  Token end;
  end.pos = p;
  out.push_back(end);
  return out;
}

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}
  explicit TokenStream(const std::string& src) : toks_(tokenize(src)) {}

  const Token& peek(std::size_t k = 0) const {
    std::size_t j = std::min(pos_ + k, toks_.size() - 1);
    return toks_[j];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokKind::End; }
  bool is(const std::string& sym, std::size_t k = 0) const {
    const Token& t = peek(k);
    return (t.kind == TokKind::Symbol || t.kind == TokKind::Ident) && t.text == sym;
  }
  bool is_symbol(const std::string& sym, std::size_t k = 0) const {
    return peek(k).kind == TokKind::Symbol && peek(k).text == sym;
  }
  bool accept(const std::string& sym) {
    if (is(sym)) {
      next();
      return true;
    }
    return false;
  }
  void expect(const std::string& sym) {
    if (!accept(sym)) fail("expected '" + sym + "'" + found());
  }
  std::string ident(const std::string& what = "identifier") {
    if (peek().kind != TokKind::Ident) fail("expected " + what + found());
    return next().text;
  }
  std::string string_lit(const std::string& what = "string") {
    if (peek().kind != TokKind::String) fail("expected " + what + found());
    return next().text;
  }
  int integer() {
    const Token& t = peek();
    if (t.kind != TokKind::Ident || t.text.find_first_not_of("0123456789") != std::string::npos)
      fail("expected number" + found());
    return std::stoi(next().text);
  }
  std::size_t mark() const { return pos_; }
  void reset(std::size_t m) { pos_ = m; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().pos); }
  std::string found() const {
    const Token& t = peek();
    if (t.kind == TokKind::End) return ", found end of input";
    return ", found '" + t.text + "'";
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace ta
