#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "repodoc/python/lexer.hpp"

namespace repodoc::python {

enum class StmtKind {
  Simple,       // one `;`-separated simple statement
  Compound,     // if/for/while/try/with/match/... header plus body
  FunctionDef,  // def / async def
  ClassDef,
};

/// Half-open token index range into Module::tokens.
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  [[nodiscard]] bool empty() const { return begin >= end; }
};

struct Statement {
  StmtKind kind = StmtKind::Simple;
  // For Simple: the statement tokens. For the others: the header tokens up to
  // and including the header colon (decorators excluded).
  TokenRange tokens;
  std::vector<TokenRange> decorators;
  int start_line = 0;  // first decorator line for decorated definitions
  int end_line = 0;
  std::vector<Statement> body;

  // FunctionDef / ClassDef only.
  std::string name;
  std::vector<std::string> params;               // every named parameter, receiver included
  std::vector<std::vector<std::string>> bases;  // dotted base-class names (ClassDef)
  bool is_async = false;

  [[nodiscard]] bool is_definition() const {
    return kind == StmtKind::FunctionDef || kind == StmtKind::ClassDef;
  }
  /// True when one decorator is exactly the dotted name `dotted` (e.g. "staticmethod").
  [[nodiscard]] bool has_decorator(const std::vector<Token>& toks, std::string_view dotted) const;
};

struct Module {
  std::vector<Token> tokens;
  std::vector<Statement> body;
};

/// Builds the statement tree for a whole file. Throws SyntaxError.
Module parse_module(std::string_view source);

}  // namespace repodoc::python
