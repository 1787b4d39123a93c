#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace repodoc::python {

enum class TokenKind { Name, Number, String, Op, Newline, Indent, Dedent, EndMarker };

struct Token {
  TokenKind kind;
  std::string text;
  int line = 0;      // 1-based
  int col = 0;       // 0-based byte column
  int end_line = 0;  // differs from line only for multi-line strings

  [[nodiscard]] bool is_op(std::string_view op) const { return kind == TokenKind::Op && text == op; }
  [[nodiscard]] bool is_name(std::string_view name) const {
    return kind == TokenKind::Name && text == name;
  }
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, int line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"), line_(line) {}

  [[nodiscard]] int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Tokenizes Python source the way the reference tokenizer does at the
/// structural level: INDENT/DEDENT bookkeeping, implicit line joining inside
/// brackets, backslash continuations, and all string literal forms. Comments
/// and blank lines produce no tokens. Throws SyntaxError.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace repodoc::python
