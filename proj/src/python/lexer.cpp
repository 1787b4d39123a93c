#include "repodoc/python/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace repodoc::python {

namespace {

constexpr std::array kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async", "await",
    "break", "class",  "continue", "def",     "del",    "elif",   "else",  "except",
    "finally", "for",  "from",    "global",   "if",     "import", "in",    "is",
    "lambda", "nonlocal", "not",  "or",       "pass",   "raise",  "return", "try",
    "while", "with",   "yield"};

constexpr std::array kOps3 = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array kOps2 = {"**", "//", "==", "!=", "<=", ">=", "<<", ">>", "->", ":=",
                              "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@="};
constexpr std::string_view kOps1 = "+-*/%@&|^~<>()[]{},:;.=";

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view word) {
  if (word.size() > 2) return false;
  std::string lower;
  for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  static constexpr std::array kPrefixes = {"r", "u", "f", "b", "t", "br", "rb", "fr", "rf", "tr", "rt"};
  return std::find(kPrefixes.begin(), kPrefixes.end(), lower) != kPrefixes.end();
}

char closer_for(char open) {
  switch (open) {
    case '(': return ')';
    case '[': return ']';
    default: return '}';
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) {
      if (at_line_start_ && brackets_.empty()) {
        if (!handle_indentation()) continue;
      }
      const unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (c == ' ' || c == '\t' || c == '\f') {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else if (c == '\n' || c == '\r') {
        consume_newline();
        if (brackets_.empty()) {
          emit(TokenKind::Newline, "\n", line_ - 1, 0);
          at_line_start_ = true;
        }
      } else if (c == '\\') {
        lex_continuation();
      } else if (is_ident_start(c)) {
        lex_name_or_string();
      } else if (std::isdigit(c) || (c == '.' && pos_ + 1 < src_.size() &&
                                     std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number();
      } else if (c == '"' || c == '\'') {
        lex_string(pos_);
      } else {
        lex_operator();
      }
    }
    if (!brackets_.empty()) {
      throw SyntaxError(std::string("'") + brackets_.back().first + "' was never closed",
                        brackets_.back().second);
    }
    if (!tokens_.empty() && tokens_.back().kind != TokenKind::Newline &&
        tokens_.back().kind != TokenKind::Dedent) {
      emit(TokenKind::Newline, "\n", line_, 0);
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, "", line_, 0);
    }
    emit(TokenKind::EndMarker, "", line_, 0);
    return std::move(tokens_);
  }

 private:
  // Returns false when the whole physical line was blank or a comment.
  bool handle_indentation() {
    int width = 0;
    std::size_t p = pos_;
    while (p < src_.size()) {
      const char c = src_[p];
      if (c == ' ') {
        ++width;
      } else if (c == '\t') {
        width = (width / 8 + 1) * 8;
      } else if (c == '\f') {
        width = 0;
      } else {
        break;
      }
      ++p;
    }
    pos_ = p;
    if (p >= src_.size()) return false;
    const char c = src_[p];
    if (c == '#') {
      skip_comment();
      return false;
    }
    if (c == '\n' || c == '\r') {
      consume_newline();
      return false;
    }
    if (c == '\\' && p + 1 < src_.size() && (src_[p + 1] == '\n' || src_[p + 1] == '\r')) {
      // A continuation right at the indentation point; the next line carries
      // the real statement start.
      return true;
    }
    at_line_start_ = false;
    if (width > indents_.back()) {
      indents_.push_back(width);
      emit(TokenKind::Indent, "", line_, width);
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::Dedent, "", line_, width);
      }
      if (width != indents_.back()) {
        throw SyntaxError("unindent does not match any outer indentation level", line_);
      }
    }
    return true;
  }

  void skip_comment() {
    while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') ++pos_;
  }

  void consume_newline() {
    if (src_[pos_] == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') ++pos_;
    ++pos_;
    ++line_;
    line_start_ = pos_;
  }

  void lex_continuation() {
    ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == '\n' || src_[pos_] == '\r')) {
      consume_newline();
      at_line_start_ = false;
      return;
    }
    if (pos_ >= src_.size()) throw SyntaxError("unexpected EOF while parsing", line_);
    throw SyntaxError("unexpected character after line continuation character", line_);
  }

  void lex_name_or_string() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view word = src_.substr(start, pos_ - start);
    if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') && is_string_prefix(word)) {
      lex_string(start);
      return;
    }
    emit(TokenKind::Name, std::string(word), line_, static_cast<int>(start - line_start_));
  }

  void lex_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size()) {
      const unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (std::isalnum(c) || c == '_' || c == '.') {
        // Exponent sign: 1e-5, 2E+3 (but not hex digits like 0xE).
        if ((c == 'e' || c == 'E') && pos_ + 1 < src_.size() &&
            (src_[pos_ + 1] == '+' || src_[pos_ + 1] == '-') &&
            !(src_.size() > start + 1 && (src_[start + 1] == 'x' || src_[start + 1] == 'X'))) {
          pos_ += 2;
          continue;
        }
        ++pos_;
      } else {
        break;
      }
    }
    emit(TokenKind::Number, std::string(src_.substr(start, pos_ - start)), line_,
         static_cast<int>(start - line_start_));
  }

  // `start` points at the prefix (or the opening quote when there is none).
  void lex_string(std::size_t start) {
    const int first_line = line_;
    const int col = static_cast<int>(start - line_start_);
    // Backslashes guard the closing quote even in raw strings.
    const char quote = src_[pos_];
    const bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote;
    pos_ += triple ? 3 : 1;
    while (true) {
      if (pos_ >= src_.size()) {
        throw SyntaxError(triple ? "unterminated triple-quoted string literal"
                                 : "unterminated string literal",
                          first_line);
      }
      const char c = src_[pos_];
      if (c == '\\') {
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '\n' || src_[pos_] == '\r')) {
          consume_newline();
        } else if (pos_ < src_.size()) {
          ++pos_;
        }
        continue;
      }
      if (c == '\n' || c == '\r') {
        if (!triple) throw SyntaxError("unterminated string literal", first_line);
        consume_newline();
        continue;
      }
      if (c == quote) {
        if (!triple) {
          ++pos_;
          break;
        }
        if (pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote) {
          pos_ += 3;
          break;
        }
      }
      ++pos_;
    }
    Token tok{TokenKind::String, std::string(src_.substr(start, pos_ - start)), first_line, col, line_};
    tokens_.push_back(std::move(tok));
  }

  void lex_operator() {
    const int col = static_cast<int>(pos_ - line_start_);
    const std::string_view rest = src_.substr(pos_);
    for (const char* op : kOps3) {
      if (rest.starts_with(op)) {
        pos_ += 3;
        emit(TokenKind::Op, op, line_, col);
        return;
      }
    }
    for (const char* op : kOps2) {
      if (rest.starts_with(op)) {
        pos_ += 2;
        emit(TokenKind::Op, op, line_, col);
        return;
      }
    }
    const char c = src_[pos_];
    if (kOps1.find(c) == std::string_view::npos) {
      throw SyntaxError(std::string("invalid character '") + c + "'", line_);
    }
    if (c == '(' || c == '[' || c == '{') {
      brackets_.emplace_back(c, line_);
    } else if (c == ')' || c == ']' || c == '}') {
      if (brackets_.empty()) throw SyntaxError(std::string("unmatched '") + c + "'", line_);
      if (closer_for(brackets_.back().first) != c) {
        throw SyntaxError(std::string("closing parenthesis '") + c +
                              "' does not match opening parenthesis '" + brackets_.back().first + "'",
                          line_);
      }
      brackets_.pop_back();
    }
    ++pos_;
    emit(TokenKind::Op, std::string(1, c), line_, col);
  }

  void emit(TokenKind kind, std::string text, int line, int col) {
    tokens_.push_back(Token{kind, std::move(text), line, col, line});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
  bool at_line_start_ = true;
  std::vector<int> indents_{0};
  std::vector<std::pair<char, int>> brackets_;
  std::vector<Token> tokens_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) {
  // Tolerate a UTF-8 byte order mark.
  if (source.starts_with("\xEF\xBB\xBF")) source.remove_prefix(3);
  return Lexer(source).run();
}

}  // namespace repodoc::python
