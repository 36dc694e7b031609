#pragma once

// PatQL: a small Cypher-flavoured query language over the FAD graph.
// The grammar is documented in docs/patql.md.

#include <cctype>
#include <charconv>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patgraph/error.hpp"
#include "patgraph/graph/pattern.hpp"

namespace patgraph::query {

struct MatchClauseAst {
  bool optional = false;
  std::vector<PathPattern> patterns;
  std::optional<Predicate> where;
};

struct CreateClauseAst {
  std::vector<PathPattern> patterns;
};

struct MergeClauseAst {
  PathPattern pattern;
};

// CREATE CONSTRAINT ON (n:label) ASSERT n.property IS UNIQUE
struct ConstraintClauseAst {
  std::string label;
  std::string property;
};

using ClauseAst = std::variant<MatchClauseAst, CreateClauseAst, MergeClauseAst, ConstraintClauseAst>;

struct ReturnItem {
  enum class Kind { Variable, Property, Count };
  Kind kind = Kind::Variable;
  std::string var;  // empty for count(*)
  std::string key;  // Property only
  std::string alias;

  std::string column() const {
    if (!alias.empty()) return alias;
    switch (kind) {
      case Kind::Variable: return var;
      case Kind::Property: return var + "." + key;
      case Kind::Count: return "count(" + (var.empty() ? std::string("*") : var) + ")";
    }
    return var;
  }
};

struct QueryAst {
  std::vector<ClauseAst> clauses;
  std::vector<ReturnItem> returns;

  bool read_only() const {
    for (const auto& c : clauses) {
      if (!std::holds_alternative<MatchClauseAst>(c)) return false;
    }
    return true;
  }

  std::size_t pattern_count() const {
    std::size_t n = 0;
    for (const auto& c : clauses) {
      if (const auto* m = std::get_if<MatchClauseAst>(&c)) n += m->patterns.size();
      else if (const auto* cr = std::get_if<CreateClauseAst>(&c)) n += cr->patterns.size();
      else if (std::holds_alternative<MergeClauseAst>(c)) n += 1;
    }
    return n;
  }
};

namespace detail {

struct Token {
  enum class Kind { Ident, String, Number, Symbol, End };
  Kind kind = Kind::End;
  std::string text;  // identifier / decoded string / number text / symbol
  std::size_t line = 1;
  std::size_t column = 1;
  bool quoted_ident = false;  // `backticked`
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.kind = Token::Kind::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Token::Kind::Ident;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          t.text += advance();
        }
      } else if (c == '`') {
        advance();
        t.kind = Token::Kind::Ident;
        t.quoted_ident = true;
        while (pos_ < src_.size() && src_[pos_] != '`') t.text += advance();
        if (pos_ >= src_.size()) throw ParseError(t.line, t.column, "'`'", "unterminated quoted identifier");
        advance();
      } else if (c == '"' || c == '\'') {
        t.kind = Token::Kind::String;
        t.text = read_string(t);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) && number_allowed(out))) {
        t.kind = Token::Kind::Number;
        if (c == '-') t.text += advance();
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
                src_[pos_] == 'e' || src_[pos_] == 'E')) {
          t.text += advance();
        }
      } else {
        t.kind = Token::Kind::Symbol;
        static constexpr std::string_view two[] = {"->", "<-", "=~", "<>"};
        for (auto s : two) {
          if (src_.substr(pos_, 2) == s) {
            t.text = std::string(s);
            advance();
            advance();
            break;
          }
        }
        if (t.text.empty()) {
          if (std::string_view("()[]{}:,.-=;*").find(c) == std::string_view::npos) {
            throw ParseError(t.line, t.column, "a token",
                             std::string("unexpected character '") + c + "'");
          }
          t.text = std::string(1, advance());
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  // A '-' directly after a value-ending token is the relationship dash.
  static bool number_allowed(const std::vector<Token>& prior) {
    if (prior.empty()) return true;
    const Token& p = prior.back();
    if (p.kind == Token::Kind::Symbol) return p.text != ")" && p.text != "]";
    return false;
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string read_string(const Token& start) {
    char quote = advance();
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != quote) {
      char c = advance();
      if (c == '\\') {
        if (pos_ >= src_.size()) break;
        char e = advance();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          default: out += e;
        }
      } else {
        out += c;
      }
    }
    if (pos_ >= src_.size()) {
      throw ParseError(start.line, start.column, std::string("closing ") + quote, "unterminated string literal");
    }
    advance();
    return out;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lexer(text).run()) {}

  QueryAst parse() {
    QueryAst ast;
    while (!at_end() && !peek_keyword("RETURN") && !peek_symbol(";")) {
      ast.clauses.push_back(clause());
    }
    if (ast.clauses.empty()) fail({"MATCH", "OPTIONAL", "CREATE", "MERGE"});
    if (accept_keyword("RETURN")) {
      do {
        ast.returns.push_back(return_item());
      } while (accept_symbol(","));
    }
    accept_symbol(";");
    if (!at_end()) fail({"end of query"});
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }

  bool peek_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Ident && !t.quoted_ident && iequals(t.text, kw);
  }
  bool peek_symbol(std::string_view s) const {
    return peek().kind == Token::Kind::Symbol && peek().text == s;
  }
  bool accept_keyword(std::string_view kw) {
    if (!peek_keyword(kw)) return false;
    ++pos_;
    return true;
  }
  bool accept_symbol(std::string_view s) {
    if (!peek_symbol(s)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(std::initializer_list<std::string_view> expected) const {
    std::string set;
    for (auto e : expected) {
      if (!set.empty()) set += ", ";
      set += e;
    }
    set = "{" + set + "}";
    const Token& t = peek();
    std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.column, set,
                     std::to_string(t.line) + ":" + std::to_string(t.column) + " expected " + set +
                         ", found " + found);
  }

  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail({kw});
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail({std::string_view(s)});
  }

  std::string identifier(std::initializer_list<std::string_view> expected = {"identifier"}) {
    if (peek().kind != Token::Kind::Ident) fail(expected);
    return tokens_[pos_++].text;
  }

  ClauseAst clause() {
    if (peek_keyword("OPTIONAL")) {
      ++pos_;
      expect_keyword("MATCH");
      return match_clause(true);
    }
    if (accept_keyword("MATCH")) return match_clause(false);
    if (accept_keyword("CREATE")) {
      if (accept_keyword("CONSTRAINT")) return constraint_clause();
      CreateClauseAst c;
      do {
        c.patterns.push_back(path());
      } while (accept_symbol(","));
      return c;
    }
    if (accept_keyword("MERGE")) return MergeClauseAst{path()};
    fail({"MATCH", "OPTIONAL", "CREATE", "MERGE", "RETURN"});
  }

  MatchClauseAst match_clause(bool optional) {
    MatchClauseAst m;
    m.optional = optional;
    do {
      m.patterns.push_back(path());
    } while (accept_symbol(","));
    if (accept_keyword("WHERE")) m.where = expression();
    return m;
  }

  ConstraintClauseAst constraint_clause() {
    expect_keyword("ON");
    expect_symbol("(");
    std::string var = identifier();
    expect_symbol(":");
    ConstraintClauseAst c;
    c.label = identifier({"label"});
    expect_symbol(")");
    expect_keyword("ASSERT");
    const Token& at = peek();
    std::string ref = identifier();
    if (ref != var) {
      throw ParseError(at.line, at.column, "{" + var + "}",
                       std::to_string(at.line) + ":" + std::to_string(at.column) +
                           " constraint must refer to '" + var + "'");
    }
    expect_symbol(".");
    c.property = identifier({"property name"});
    expect_keyword("IS");
    expect_keyword("UNIQUE");
    return c;
  }

  PathPattern path() {
    PathPattern p;
    p.push_back({node(), std::nullopt});
    while (peek_symbol("-") || peek_symbol("<-")) {
      p.back().edge = relationship();
      p.push_back({node(), std::nullopt});
    }
    return p;
  }

  NodePattern node() {
    NodePattern n;
    expect_symbol("(");
    if (peek().kind == Token::Kind::Ident) n.var = identifier();
    while (accept_symbol(":")) n.labels.push_back(identifier({"label"}));
    if (peek_symbol("{")) n.props = property_map();
    if (!accept_symbol(")")) {
      if (n.labels.empty() && n.props.empty() && !n.var.empty()) fail({"')'", "':'", "'{'"});
      if (n.props.empty()) fail({"')'", "':'", "'{'"});
      fail({"')'"});
    }
    return n;
  }

  EdgePattern relationship() {
    EdgePattern e;
    bool incoming = accept_symbol("<-");
    if (!incoming) expect_symbol("-");
    expect_symbol("[");
    if (peek().kind == Token::Kind::Ident) e.var = identifier();
    if (accept_symbol(":")) e.type = identifier({"relationship type"});
    if (peek_symbol("{")) e.props = property_map();
    if (!accept_symbol("]")) fail({"']'", "':'", "'{'"});
    if (incoming) {
      expect_symbol("-");
      e.direction = Direction::Incoming;
    } else {
      if (!accept_symbol("->")) fail({"'->'"});
      e.direction = Direction::Outgoing;
    }
    return e;
  }

  PropertyMap property_map() {
    PropertyMap props;
    expect_symbol("{");
    if (accept_symbol("}")) return props;
    do {
      std::string key = identifier({"property name"});
      expect_symbol(":");
      props[key] = literal_value();
    } while (accept_symbol(","));
    expect_symbol("}");
    return props;
  }

  PropertyValue literal_value() {
    const Token& t = peek();
    if (t.kind == Token::Kind::String) {
      ++pos_;
      return PropertyValue(t.text);
    }
    if (t.kind == Token::Kind::Number) {
      ++pos_;
      return number(t);
    }
    if (peek_keyword("true")) {
      ++pos_;
      return PropertyValue(true);
    }
    if (peek_keyword("false")) {
      ++pos_;
      return PropertyValue(false);
    }
    if (peek_symbol("[")) {
      ++pos_;
      TextList items;
      if (!accept_symbol("]")) {
        do {
          if (peek().kind != Token::Kind::String) fail({"string"});
          items.push_back(tokens_[pos_++].text);
        } while (accept_symbol(","));
        expect_symbol("]");
      }
      return PropertyValue(std::move(items));
    }
    fail({"string", "number", "true", "false", "'['"});
  }

  static PropertyValue number(const Token& t) {
    bool is_float = t.text.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec == std::errc{} && p == t.text.data() + t.text.size()) return PropertyValue(v);
    }
    try {
      std::size_t used = 0;
      double d = std::stod(t.text, &used);
      if (used == t.text.size()) return PropertyValue(d);
    } catch (const std::exception&) {
    }
    throw ParseError(t.line, t.column, "{number}",
                     std::to_string(t.line) + ":" + std::to_string(t.column) + " malformed number '" + t.text + "'");
  }

  // expr := and {OR and}
  Predicate expression() {
    std::vector<Predicate> terms{conjunction()};
    while (accept_keyword("OR")) terms.push_back(conjunction());
    return terms.size() == 1 ? std::move(terms.front()) : Predicate::any(std::move(terms));
  }

  Predicate conjunction() {
    std::vector<Predicate> terms{negation()};
    while (accept_keyword("AND")) terms.push_back(negation());
    return terms.size() == 1 ? std::move(terms.front()) : Predicate::all(std::move(terms));
  }

  Predicate negation() {
    if (accept_keyword("NOT")) return Predicate::negate(negation());
    return comparison();
  }

  Predicate comparison() {
    if (accept_symbol("(")) {
      Predicate p = expression();
      expect_symbol(")");
      return p;
    }
    if (peek_keyword("FILTER") && peek(1).kind == Token::Kind::Symbol && peek(1).text == "(") {
      return filter();
    }
    Operand lhs = operand();
    if (accept_symbol("=")) return Predicate::equals(std::move(lhs), operand());
    if (accept_symbol("<>")) return Predicate::not_equals(std::move(lhs), operand());
    if (accept_symbol("=~")) return Predicate::regex(std::move(lhs), operand());
    if (accept_keyword("IN")) return Predicate::in(std::move(lhs), operand());
    fail({"'='", "'<>'", "'=~'", "IN"});
  }

  // filter(x IN list WHERE x = value) -> value IN list
  Predicate filter() {
    pos_ += 2;
    std::string var = identifier();
    expect_keyword("IN");
    Operand list = operand();
    expect_keyword("WHERE");
    const Token& at = peek();
    Operand a = operand_or_var(var);
    expect_symbol("=");
    Operand b = operand_or_var(var);
    expect_symbol(")");
    bool a_is_var = std::holds_alternative<PropertyRef>(a) && std::get<PropertyRef>(a).key.empty();
    bool b_is_var = std::holds_alternative<PropertyRef>(b) && std::get<PropertyRef>(b).key.empty();
    if (a_is_var == b_is_var) {
      throw ParseError(at.line, at.column, "{" + var + " = value}",
                       std::to_string(at.line) + ":" + std::to_string(at.column) +
                           " filter() supports only '" + var + " = value'");
    }
    return Predicate::in(a_is_var ? std::move(b) : std::move(a), std::move(list));
  }

  Operand operand_or_var(const std::string& var) {
    if (peek().kind == Token::Kind::Ident && peek().text == var &&
        !(peek(1).kind == Token::Kind::Symbol && peek(1).text == ".")) {
      ++pos_;
      return PropertyRef{var, ""};
    }
    return operand();
  }

  Operand operand() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Ident && !peek_keyword("true") && !peek_keyword("false")) {
      std::string var = identifier();
      if (!accept_symbol(".")) fail({"'.'"});
      return PropertyRef{var, identifier({"property name"})};
    }
    if (peek_symbol("[")) {
      ++pos_;
      ListLiteral items;
      if (!accept_symbol("]")) {
        do {
          items.push_back(literal_value());
        } while (accept_symbol(","));
        expect_symbol("]");
      }
      return items;
    }
    return literal_value();
  }

  ReturnItem return_item() {
    ReturnItem item;
    if (peek_keyword("count") && peek(1).kind == Token::Kind::Symbol && peek(1).text == "(") {
      pos_ += 2;
      item.kind = ReturnItem::Kind::Count;
      if (!accept_symbol("*")) item.var = identifier({"identifier", "'*'"});
      expect_symbol(")");
    } else {
      item.var = identifier();
      if (accept_symbol(".")) {
        item.kind = ReturnItem::Kind::Property;
        item.key = identifier({"property name"});
      }
    }
    if (accept_keyword("AS")) item.alias = identifier({"alias"});
    return item;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses PatQL text. Keywords are case-insensitive; failures throw
// ParseError carrying the line, column and the set of expected tokens.
inline QueryAst parse_query(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError(1, 1, "{MATCH, OPTIONAL, CREATE, MERGE}", "1:1 expected a query, found empty input");
  }
  return detail::Parser(text).parse();
}

}  // namespace patgraph::query
