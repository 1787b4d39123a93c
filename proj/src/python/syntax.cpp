#include "repodoc/python/syntax.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace repodoc::python {

namespace {

bool is_open(const Token& t) { return t.is_op("(") || t.is_op("[") || t.is_op("{"); }
bool is_close(const Token& t) { return t.is_op(")") || t.is_op("]") || t.is_op("}"); }

bool starts_compound(std::string_view word) {
  static constexpr std::array kWords = {"if",  "elif",    "else", "for",  "while", "try",
                                        "except", "finally", "with", "def", "class"};
  return std::find(kWords.begin(), kWords.end(), word) != kWords.end();
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Module run() {
    Module m;
    m.body = parse_block(/*until_dedent=*/false);
    m.tokens = std::move(toks_);
    return m;
  }

 private:
  const Token& at(std::size_t i) const { return toks_[std::min(i, toks_.size() - 1)]; }
  const Token& cur() const { return at(pos_); }

  [[noreturn]] void fail(const std::string& msg, const Token& where) const {
    throw SyntaxError(msg, where.line);
  }

  std::size_t line_end(std::size_t from) const {
    std::size_t i = from;
    while (at(i).kind != TokenKind::Newline && at(i).kind != TokenKind::EndMarker) ++i;
    return i;
  }

  std::vector<Statement> parse_block(bool until_dedent) {
    std::vector<Statement> out;
    while (true) {
      const Token& t = cur();
      if (t.kind == TokenKind::EndMarker) {
        if (until_dedent) fail("unexpected EOF while parsing", t);
        break;
      }
      if (t.kind == TokenKind::Dedent) {
        if (!until_dedent) fail("unindent does not match any outer indentation level", t);
        ++pos_;
        break;
      }
      if (t.kind == TokenKind::Indent) fail("unexpected indent", t);
      if (t.kind == TokenKind::Newline) {
        ++pos_;
        continue;
      }
      parse_statement(out);
    }
    return out;
  }

  void parse_statement(std::vector<Statement>& out) {
    std::vector<TokenRange> decorators;
    int first_line = cur().line;
    while (cur().is_op("@")) {
      const std::size_t end = line_end(pos_);
      if (end == pos_ + 1) fail("invalid syntax", cur());
      decorators.push_back({pos_ + 1, end});
      pos_ = end + 1;
      while (cur().kind == TokenKind::Newline) ++pos_;
    }
    const Token& head = cur();
    bool compound = head.kind == TokenKind::Name && starts_compound(head.text);
    if (head.is_name("async")) {
      const Token& next = at(pos_ + 1);
      compound = next.is_name("def") || next.is_name("for") || next.is_name("with");
    }
    if (!compound && (head.is_name("match") || head.is_name("case"))) {
      const std::size_t end = line_end(pos_);
      compound = end > pos_ + 1 && at(end - 1).is_op(":") && at(end + 1).kind == TokenKind::Indent;
    }
    const bool is_def = head.is_name("def") || (head.is_name("async") && at(pos_ + 1).is_name("def"));
    const bool is_class = head.is_name("class");
    if (!decorators.empty() && !is_def && !is_class) {
      fail("decorator must precede a function or class definition", head);
    }
    if (!compound) {
      parse_simple_line(out);
      return;
    }

    Statement st;
    st.kind = is_def ? StmtKind::FunctionDef : is_class ? StmtKind::ClassDef : StmtKind::Compound;
    st.decorators = std::move(decorators);
    st.start_line = st.decorators.empty() ? head.line : first_line;
    const std::size_t colon = header_colon(pos_);
    st.tokens = {pos_, colon + 1};
    if (is_def) parse_def_header(st);
    if (is_class) parse_class_header(st);
    st.end_line = at(colon).line;
    pos_ = colon + 1;

    if (cur().kind != TokenKind::Newline) {
      // Inline suite: `def f(): return 1`
      if (cur().kind == TokenKind::EndMarker) fail("expected an indented block", cur());
      parse_simple_line(st.body);
    } else {
      ++pos_;
      if (cur().kind != TokenKind::Indent) fail("expected an indented block", cur());
      ++pos_;
      st.body = parse_block(/*until_dedent=*/true);
    }
    if (!st.body.empty()) st.end_line = std::max(st.end_line, st.body.back().end_line);
    out.push_back(std::move(st));
  }

  // Splits one logical line into `;`-separated simple statements.
  void parse_simple_line(std::vector<Statement>& out) {
    const std::size_t end = line_end(pos_);
    std::size_t seg = pos_;
    int depth = 0;
    auto flush = [&](std::size_t stop) {
      if (stop > seg) {
        Statement st;
        st.kind = StmtKind::Simple;
        st.tokens = {seg, stop};
        st.start_line = at(seg).line;
        st.end_line = at(stop - 1).end_line;
        const Token& first = at(seg);
        if (first.kind == TokenKind::Name &&
            (starts_compound(first.text) && first.text != "else")) {
          fail("invalid syntax", first);
        }
        out.push_back(std::move(st));
      }
    };
    for (std::size_t i = pos_; i < end; ++i) {
      const Token& t = at(i);
      if (is_open(t)) ++depth;
      if (is_close(t)) --depth;
      if (depth == 0 && t.is_op(";")) {
        flush(i);
        seg = i + 1;
      }
    }
    flush(end);
    pos_ = at(end).kind == TokenKind::Newline ? end + 1 : end;
  }

  // Index of the colon that terminates a compound statement header.
  std::size_t header_colon(std::size_t from) const {
    const std::size_t end = line_end(from);
    int depth = 0;
    int pending_lambdas = 0;
    for (std::size_t i = from; i < end; ++i) {
      const Token& t = at(i);
      if (is_open(t)) ++depth;
      if (is_close(t)) --depth;
      if (depth != 0) continue;
      if (t.is_name("lambda")) ++pending_lambdas;
      if (t.is_op(":")) {
        if (pending_lambdas > 0) {
          --pending_lambdas;
        } else {
          return i;
        }
      }
    }
    fail("expected ':'", at(end));
  }

  std::size_t matching_close(std::size_t open) const {
    int depth = 0;
    for (std::size_t i = open; i < toks_.size(); ++i) {
      if (is_open(at(i))) ++depth;
      if (is_close(at(i)) && --depth == 0) return i;
    }
    fail("unbalanced brackets", at(open));
  }

  void parse_def_header(Statement& st) {
    std::size_t i = st.tokens.begin;
    if (at(i).is_name("async")) {
      st.is_async = true;
      ++i;
    }
    ++i;  // def
    const Token& name = at(i);
    if (name.kind != TokenKind::Name || is_keyword(name.text)) fail("invalid syntax", name);
    st.name = name.text;
    ++i;
    if (at(i).is_op("[")) i = matching_close(i) + 1;  // PEP 695 type parameters
    if (!at(i).is_op("(")) fail("invalid syntax: expected '('", at(i));
    const std::size_t close = matching_close(i);
    std::set<std::string> seen;
    for (const auto& seg : split_commas(i + 1, close)) {
      if (seg.empty()) continue;
      std::size_t p = seg.begin;
      if (seg.end - seg.begin == 1 && (at(p).is_op("/") || at(p).is_op("*"))) continue;
      if (at(p).is_op("*") || at(p).is_op("**")) ++p;
      const Token& pname = at(p);
      if (pname.kind != TokenKind::Name || is_keyword(pname.text)) fail("invalid parameter", pname);
      if (!seen.insert(pname.text).second) {
        fail("duplicate argument '" + pname.text + "' in function definition", pname);
      }
      st.params.push_back(pname.text);
    }
    const std::size_t after = close + 1;
    if (!(at(after).is_op(":") || at(after).is_op("->"))) fail("invalid syntax", at(after));
  }

  void parse_class_header(Statement& st) {
    std::size_t i = st.tokens.begin + 1;
    const Token& name = at(i);
    if (name.kind != TokenKind::Name || is_keyword(name.text)) fail("invalid syntax", name);
    st.name = name.text;
    ++i;
    if (at(i).is_op("[")) i = matching_close(i) + 1;
    if (at(i).is_op("(")) {
      const std::size_t close = matching_close(i);
      for (const auto& seg : split_commas(i + 1, close)) {
        std::vector<std::string> dotted;
        bool plain = !seg.empty();
        for (std::size_t p = seg.begin; p < seg.end && plain; ++p) {
          const bool want_name = (p - seg.begin) % 2 == 0;
          if (want_name && at(p).kind == TokenKind::Name && !is_keyword(at(p).text)) {
            dotted.push_back(at(p).text);
          } else if (!want_name && at(p).is_op(".")) {
            continue;
          } else {
            plain = false;
          }
        }
        if (plain && !dotted.empty() && at(seg.end - 1).kind == TokenKind::Name) {
          st.bases.push_back(std::move(dotted));
        }
      }
      i = close + 1;
    }
    if (!at(i).is_op(":")) fail("invalid syntax", at(i));
  }

  std::vector<TokenRange> split_commas(std::size_t begin, std::size_t end) const {
    std::vector<TokenRange> out;
    int depth = 0;
    std::size_t seg = begin;
    for (std::size_t i = begin; i < end; ++i) {
      if (is_open(at(i))) ++depth;
      if (is_close(at(i))) --depth;
      if (depth == 0 && at(i).is_op(",")) {
        out.push_back({seg, i});
        seg = i + 1;
      }
    }
    out.push_back({seg, end});
    return out;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

bool Statement::has_decorator(const std::vector<Token>& toks, std::string_view dotted) const {
  for (const auto& d : decorators) {
    std::string text;
    for (std::size_t i = d.begin; i < d.end; ++i) text += toks[i].text;
    if (text == dotted) return true;
  }
  return false;
}

Module parse_module(std::string_view source) { return Parser(tokenize(source)).run(); }

}  // namespace repodoc::python
