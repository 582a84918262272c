#include "cqa/syntax.hpp"

#include <algorithm>
#include <cctype>

namespace cqa {

namespace {

enum class Tok { ident, lparen, rparen, comma, dot, colon, pipe, arrow, neq, eq, slash, amp, caret, end };

const char* describe(Tok t) {
  switch (t) {
    case Tok::ident:
      return "identifier";
    case Tok::lparen:
      return "'('";
    case Tok::rparen:
      return "')'";
    case Tok::comma:
      return "','";
    case Tok::dot:
      return "'.'";
    case Tok::colon:
      return "':'";
    case Tok::pipe:
      return "'|'";
    case Tok::arrow:
      return "'->'";
    case Tok::neq:
      return "'!='";
    case Tok::eq:
      return "'='";
    case Tok::slash:
      return "'/'";
    case Tok::amp:
      return "'&'";
    case Tok::caret:
      return "'^'";
    case Tok::end:
      return "end of input";
  }
  return "token";
}

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

bool is_numeral(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto span_at = [&](std::size_t begin, std::size_t len) {
    return SourceSpan{line, col, begin, begin + len};
  };
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      if (std::isdigit(static_cast<unsigned char>(word[0])) && !is_numeral(word))
        throw ParseError(ParseErrorCode::lex, span_at(i, j - i), "identifier '" + word + "' starts with a digit");
      out.push_back({Tok::ident, word, span_at(i, j - i)});
      advance(j - i);
      continue;
    }
    auto two = text.substr(i, 2);
    if (two == "->") {
      out.push_back({Tok::arrow, "->", span_at(i, 2)});
      advance(2);
      continue;
    }
    if (two == "!=") {
      out.push_back({Tok::neq, "!=", span_at(i, 2)});
      advance(2);
      continue;
    }
    Tok kind;
    switch (c) {
      case '(':
        kind = Tok::lparen;
        break;
      case ')':
        kind = Tok::rparen;
        break;
      case ',':
        kind = Tok::comma;
        break;
      case '.':
        kind = Tok::dot;
        break;
      case ':':
        kind = Tok::colon;
        break;
      case '|':
        kind = Tok::pipe;
        break;
      case '=':
        kind = Tok::eq;
        break;
      case '/':
        kind = Tok::slash;
        break;
      case '&':
        kind = Tok::amp;
        break;
      case '^':
        kind = Tok::caret;
        break;
      default:
        throw ParseError(ParseErrorCode::lex, span_at(i, 1), std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, std::string(1, c), span_at(i, 1)});
    advance(1);
  }
  out.push_back({Tok::end, "", SourceSpan{line, col, text.size(), text.size()}});
  return out;
}

// Conjunction items before identifiers are resolved to variables/constants.
struct RawItem {
  enum class Kind { atom, ineq, bottom } kind;
  Token head;               // predicate, or left term
  std::vector<Token> args;  // atom arguments
  Token right;              // right term of an inequality
};

struct RawDisjunct {
  std::vector<Token> exists;
  std::vector<RawItem> items;
};

bool is_section_word(const std::string& w) {
  return w == "schema" || w == "dependencies" || w == "database" || w == "query";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Document document(Section initial, const Schema& schema) {
    Document doc;
    doc.schema = schema;
    Section section = initial;
    while (!at(Tok::end)) {
      if (at(Tok::ident) && is_section_word(peek().text) && peek(1).kind == Tok::colon) {
        const std::string& w = peek().text;
        section = w == "schema"         ? Section::schema
                  : w == "dependencies" ? Section::dependencies
                  : w == "database"     ? Section::database
                                        : Section::query;
        pos_ += 2;
        continue;
      }
      if (declaration_ahead()) {
        declaration(doc.schema);
        continue;
      }
      switch (section) {
        case Section::schema:
          fail(ParseErrorCode::syntax, peek().span, "expected a declaration 'P/2.' or 'const a, b.'");
        case Section::dependencies:
          doc.dependencies.push_back(dependency(doc.schema));
          break;
        case Section::database:
          doc.facts.insert(fact(doc.schema));
          break;
        case Section::query: {
          auto span = peek().span;
          if (doc.query) fail(ParseErrorCode::duplicate_decl, span, "only one query per document");
          doc.query = query(doc.schema);
          break;
        }
      }
    }
    return doc;
  }

  FormulaPtr fo_sentence() {
    auto f = fo_formula();
    expect(Tok::end, "end of formula");
    return f;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok t) const { return peek().kind == t; }
  bool at_word(std::string_view w, std::size_t k = 0) const {
    return peek(k).kind == Tok::ident && peek(k).text == w;
  }
  Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] static void fail(ParseErrorCode code, const SourceSpan& span, const std::string& msg) {
    throw ParseError(code, span, msg);
  }

  Token expect(Tok t, const std::string& context) {
    if (!at(t))
      fail(ParseErrorCode::syntax, peek().span,
           std::string("expected ") + describe(t) + " in " + context + ", found " +
               (at(Tok::end) ? std::string("end of input") : "'" + peek().text + "'"));
    return take();
  }

  Token identifier(const std::string& context) { return expect(Tok::ident, context); }

  bool declaration_ahead() const {
    if (at(Tok::ident) && peek(1).kind == Tok::slash) return true;
    return at_word("const") && peek(1).kind == Tok::ident;
  }

  void declaration(Schema& schema) {
    if (at_word("const")) {
      take();
      do {
        Token c = identifier("constant declaration");
        schema.register_constant(c.text);
      } while (at(Tok::comma) && (take(), true));
      expect(Tok::dot, "constant declaration");
      return;
    }
    Token name = take();
    take();  // '/'
    Token n = identifier("predicate declaration");
    if (!is_numeral(n.text)) fail(ParseErrorCode::syntax, n.span, "arity must be a number");
    if (name.text == kBottom) fail(ParseErrorCode::duplicate_decl, name.span, "'false' is reserved");
    declare(schema, name, std::stoul(n.text));
    expect(Tok::dot, "predicate declaration");
  }

  static void declare(Schema& schema, const Token& name, std::size_t arity) {
    auto known = schema.arity(name.text);
    if (known && *known != arity)
      fail(ParseErrorCode::arity, name.span,
           "predicate " + name.text + " has arity " + std::to_string(*known) + ", used with " +
               std::to_string(arity));
    if (!known) schema.declare(name.text, arity);
  }

  std::vector<Token> ident_list(const std::string& context) {
    std::vector<Token> out{identifier(context)};
    while (at(Tok::comma)) {
      take();
      out.push_back(identifier(context));
    }
    return out;
  }

  RawItem raw_item() {
    if (at_word("false") && peek(1).kind != Tok::neq) return RawItem{RawItem::Kind::bottom, take(), {}, {}};
    Token head = identifier("conjunction");
    if (at(Tok::neq)) {
      take();
      Token right = identifier("inequality");
      return RawItem{RawItem::Kind::ineq, head, {}, right};
    }
    RawItem item{RawItem::Kind::atom, head, {}, {}};
    if (at(Tok::lparen)) {
      take();
      if (!at(Tok::rparen)) item.args = ident_list("atom arguments");
      expect(Tok::rparen, "atom");
    }
    return item;
  }

  std::vector<RawItem> raw_conj() {
    std::vector<RawItem> items{raw_item()};
    while (at(Tok::comma)) {
      take();
      items.push_back(raw_item());
    }
    return items;
  }

  RawDisjunct raw_disjunct() {
    RawDisjunct d;
    if (at_word("exists") && peek(1).kind == Tok::ident) {
      take();
      d.exists = ident_list("exists variables");
      expect(Tok::colon, "exists");
    }
    d.items = raw_conj();
    return d;
  }

  std::vector<RawDisjunct> raw_ucq() {
    std::vector<RawDisjunct> out{raw_disjunct()};
    while (at(Tok::pipe)) {
      take();
      out.push_back(raw_disjunct());
    }
    return out;
  }

  // Converts raw items; `resolve` maps an identifier token to a term.
  template <typename Resolve>
  Conjunction build(const std::vector<RawItem>& items, Schema& schema, bool infer, Resolve&& resolve) {
    Conjunction c;
    for (const auto& it : items) {
      switch (it.kind) {
        case RawItem::Kind::bottom:
          c.atoms.push_back(bottom_atom());
          break;
        case RawItem::Kind::ineq:
          c.ineqs.push_back({resolve(it.head), resolve(it.right)});
          break;
        case RawItem::Kind::atom: {
          if (it.head.text == kBottom) fail(ParseErrorCode::syntax, it.head.span, "'false' takes no arguments");
          if (infer) {
            declare(schema, it.head, it.args.size());
          } else {
            auto known = schema.arity(it.head.text);
            if (!known) fail(ParseErrorCode::unknown_predicate, it.head.span, "unknown predicate " + it.head.text);
            if (*known != it.args.size())
              fail(ParseErrorCode::arity, it.head.span,
                   "predicate " + it.head.text + " has arity " + std::to_string(*known) + ", used with " +
                       std::to_string(it.args.size()));
          }
          Atom a{it.head.text, {}, false};
          for (const auto& t : it.args) a.args.push_back(resolve(t));
          c.atoms.push_back(std::move(a));
          break;
        }
      }
    }
    return c;
  }

  static bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  }

  static std::vector<std::string> names(const std::vector<Token>& toks, const char* what) {
    std::vector<std::string> out;
    for (const auto& t : toks) {
      if (is_numeral(t.text)) fail(ParseErrorCode::syntax, t.span, std::string("a numeral cannot be a ") + what);
      if (contains(out, t.text)) fail(ParseErrorCode::duplicate_decl, t.span, "variable " + t.text + " bound twice");
      out.push_back(t.text);
    }
    return out;
  }

  static bool constant_symbol(const Schema& schema, const std::string& name) {
    return is_numeral(name) || schema.knows_constant(name);
  }

  Dependency dependency(Schema& schema) {
    Dependency d;
    bool explicit_forall = false;
    std::vector<Token> forall_toks;
    if (at_word("forall") && peek(1).kind == Tok::ident) {
      take();
      forall_toks = ident_list("forall variables");
      expect(Tok::colon, "forall");
      explicit_forall = true;
    }
    const Token start = peek();
    auto body_items = raw_conj();
    expect(Tok::arrow, "dependency");
    auto head_raw = raw_ucq();
    expect(Tok::dot, "dependency");

    std::vector<std::string> xs = names(forall_toks, "variable");
    auto body_term = [&](const Token& t) {
      if (contains(xs, t.text)) return Term::var(t.text);
      if (constant_symbol(schema, t.text)) return Term::constant(t.text);
      if (explicit_forall)
        fail(ParseErrorCode::unbound_var, t.span, "identifier " + t.text + " is neither quantified nor a constant");
      xs.push_back(t.text);
      return Term::var(t.text);
    };
    d.body = build(body_items, schema, true, body_term);
    if (d.body.atoms.empty() || std::any_of(d.body.atoms.begin(), d.body.atoms.end(),
                                            [](const Atom& a) { return a.is_bottom(); }))
      fail(ParseErrorCode::syntax, start.span, "a dependency body needs predicate atoms and no 'false'");
    d.forall_vars = xs;
    auto pvars = predicate_variables(d.body);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!contains(pvars, xs[i])) {
        const SourceSpan& span = i < forall_toks.size() ? forall_toks[i].span : start.span;
        fail(ParseErrorCode::safety, span, "variable " + xs[i] + " does not occur in a body atom");
      }
    }

    for (const auto& rd : head_raw) {
      CQ q;
      q.exists_vars = names(rd.exists, "variable");
      for (std::size_t i = 0; i < rd.exists.size(); ++i)
        if (contains(xs, q.exists_vars[i]))
          fail(ParseErrorCode::duplicate_decl, rd.exists[i].span,
               "variable " + q.exists_vars[i] + " is already universally quantified");
      auto head_term = [&](const Token& t) {
        if (contains(xs, t.text) || contains(q.exists_vars, t.text)) return Term::var(t.text);
        if (constant_symbol(schema, t.text)) return Term::constant(t.text);
        fail(ParseErrorCode::unbound_var, t.span, "identifier " + t.text + " is neither quantified nor a constant");
      };
      q.body = build(rd.items, schema, true, head_term);
      auto qp = predicate_variables(q.body);
      for (std::size_t i = 0; i < rd.exists.size(); ++i)
        if (!contains(qp, q.exists_vars[i]))
          fail(ParseErrorCode::safety, rd.exists[i].span,
               "variable " + q.exists_vars[i] + " does not occur in a head atom");
      d.head.disjuncts.push_back(std::move(q));
    }
    return d;
  }

  Fact fact(Schema& schema) {
    RawItem it = raw_item();
    if (it.kind == RawItem::Kind::bottom) fail(ParseErrorCode::syntax, it.head.span, "the fact 'false' cannot be stored");
    if (it.kind != RawItem::Kind::atom) fail(ParseErrorCode::syntax, it.head.span, "expected a fact");
    expect(Tok::dot, "fact");
    Conjunction c = build({it}, schema, true, [&](const Token& t) {
      schema.register_constant(t.text);
      return Term::constant(t.text);
    });
    return c.atoms.front();
  }

  UCQ query(const Schema& schema) {
    auto raw = raw_ucq();
    if (at(Tok::dot)) take();
    UCQ q;
    Schema scratch = schema;
    for (const auto& rd : raw) {
      CQ cq;
      cq.exists_vars = names(rd.exists, "variable");
      cq.body = build(rd.items, scratch, false, [&](const Token& t) {
        return contains(cq.exists_vars, t.text) ? Term::var(t.text) : Term::constant(t.text);
      });
      auto pv = predicate_variables(cq.body);
      for (std::size_t i = 0; i < rd.exists.size(); ++i)
        if (!contains(pv, cq.exists_vars[i]))
          fail(ParseErrorCode::safety, rd.exists[i].span,
               "variable " + cq.exists_vars[i] + " does not occur in a query atom");
      q.disjuncts.push_back(std::move(cq));
    }
    return q;
  }

  // First-order formulas.

  FormulaPtr fo_formula() {
    if ((at_word("forall") || at_word("exists")) && peek(1).kind == Tok::ident) {
      bool is_forall = take().text == "forall";
      auto vars = names(ident_list("quantifier"), "variable");
      expect(Tok::colon, "quantifier");
      const auto n = bound_.size();
      bound_.insert(bound_.end(), vars.begin(), vars.end());
      auto body = fo_formula();
      bound_.resize(n);
      return is_forall ? fo::forall(std::move(vars), body) : fo::exists(std::move(vars), body);
    }
    auto lhs = fo_disj();
    if (at(Tok::arrow)) {
      take();
      return fo::implies(lhs, fo_formula());
    }
    return lhs;
  }

  FormulaPtr fo_disj() {
    std::vector<FormulaPtr> parts{fo_conj()};
    while (at(Tok::pipe)) {
      take();
      parts.push_back(fo_conj());
    }
    return parts.size() == 1 ? parts.front() : fo::disj(std::move(parts));
  }

  FormulaPtr fo_conj() {
    std::vector<FormulaPtr> parts{fo_unary()};
    while (at(Tok::amp)) {
      take();
      parts.push_back(fo_unary());
    }
    return parts.size() == 1 ? parts.front() : fo::conj(std::move(parts));
  }

  FormulaPtr fo_unary() {
    if (at_word("not") && peek(1).kind != Tok::eq && peek(1).kind != Tok::neq && peek(1).kind != Tok::lparen) {
      take();
      return fo::negate(fo_unary());
    }
    if (at_word("not") && peek(1).kind == Tok::lparen) {
      take();
      return fo::negate(fo_unary());
    }
    return fo_primary();
  }

  Term fo_term(const Token& t) {
    if (std::find(bound_.rbegin(), bound_.rend(), t.text) != bound_.rend()) return Term::var(t.text);
    return Term::constant(t.text);
  }

  FormulaPtr fo_primary() {
    if (at(Tok::lparen)) {
      take();
      auto f = fo_formula();
      expect(Tok::rparen, "parenthesized formula");
      return f;
    }
    Token t = identifier("formula");
    if (peek().kind == Tok::eq || peek().kind == Tok::neq) {
      bool is_eq = take().kind == Tok::eq;
      Token r = identifier("comparison");
      return is_eq ? fo::eq(fo_term(t), fo_term(r)) : fo::neq(fo_term(t), fo_term(r));
    }
    if (t.text == "true" && !at(Tok::lparen) && !at(Tok::caret)) return fo::truth();
    if (t.text == "false" && !at(Tok::lparen) && !at(Tok::caret)) return fo::falsity();
    Atom a{t.text, {}, false};
    if (at(Tok::caret)) {
      take();
      Token w = identifier("auxiliary marker");
      if (w.text != "aux") fail(ParseErrorCode::syntax, w.span, "expected '^aux'");
      a.aux = true;
    }
    expect(Tok::lparen, "atom");
    if (!at(Tok::rparen)) {
      for (const auto& arg : ident_list("atom arguments")) a.args.push_back(fo_term(arg));
    }
    expect(Tok::rparen, "atom");
    return fo::atom(std::move(a));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> bound_;
};

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

Document parse_document(std::string_view text, Section initial, const Schema& schema) {
  return Parser(text).document(initial, schema);
}

DependencyFile parse_dependencies(std::string_view text) {
  Document doc = parse_document(text, Section::dependencies);
  return {std::move(doc.schema), std::move(doc.dependencies)};
}

Database parse_database(std::string_view text, const Schema& schema) {
  Document doc = parse_document(text, Section::database, schema);
  return {std::move(doc.schema), std::move(doc.facts)};
}

UCQ parse_query(std::string_view text, const Schema& schema) {
  Document doc = parse_document(text, Section::query, schema);
  if (!doc.query) throw ParseError(ParseErrorCode::syntax, SourceSpan{}, "empty query");
  return *doc.query;
}

FormulaPtr parse_fo(std::string_view text) { return Parser(text).fo_sentence(); }

std::string print_term(const Term& t) { return t.name; }

std::string print_conjunction(const Conjunction& c) {
  std::vector<std::string> parts;
  for (const auto& a : c.atoms) parts.push_back(to_string(a));
  for (const auto& i : c.ineqs) parts.push_back(i.left.name + " != " + i.right.name);
  return join(parts, ", ");
}

std::string print_cq(const CQ& q) {
  std::string body = print_conjunction(q.body);
  if (q.exists_vars.empty()) return body;
  return "exists " + join(q.exists_vars, ",") + ": " + body;
}

std::string print_query(const UCQ& q) {
  std::vector<std::string> parts;
  for (const auto& d : q.disjuncts) parts.push_back(print_cq(d));
  return join(parts, " | ");
}

std::string print_dependency(const Dependency& d) {
  std::string out;
  if (!d.forall_vars.empty()) out = "forall " + join(d.forall_vars, ",") + ": ";
  return out + print_conjunction(d.body) + " -> " + print_query(d.head) + ".";
}

std::string print_dependencies(const Schema& schema, const DependencySet& deps) {
  std::string out = "schema:\n";
  for (const auto& [name, arity] : schema.predicates()) {
    if (name == kBottom) continue;
    out += name + "/" + std::to_string(arity) + ".\n";
  }
  if (!schema.constants().empty()) {
    out += "const ";
    bool first = true;
    for (const auto& c : schema.constants()) {
      if (!first) out += ", ";
      first = false;
      out += c;
    }
    out += ".\n";
  }
  out += "dependencies:\n";
  for (const auto& d : deps) out += print_dependency(d) + "\n";
  return out;
}

std::string print_facts(const FactSet& facts) {
  std::string out;
  for (const auto& f : facts) out += to_string(f) + ".\n";
  return out;
}

namespace {

std::string print_node(const Formula& f, bool wrap_quantifier) {
  using K = Formula::Kind;
  auto child = [](const FormulaPtr& c) { return print_node(*c, true); };
  switch (f.kind) {
    case K::truth:
      return "true";
    case K::falsity:
      return "false";
    case K::atom:
      return to_string(f.atom);
    case K::eq:
      return f.left.name + " = " + f.right.name;
    case K::neq:
      return f.left.name + " != " + f.right.name;
    case K::negation:
      return "not " + child(f.children[0]);
    case K::conjunction:
    case K::disjunction: {
      std::vector<std::string> parts;
      for (const auto& c : f.children) parts.push_back(child(c));
      return "(" + join(parts, f.kind == K::conjunction ? " & " : " | ") + ")";
    }
    case K::implication:
      return "(" + child(f.children[0]) + " -> " + child(f.children[1]) + ")";
    case K::exists:
    case K::forall: {
      std::string s = std::string(f.kind == K::exists ? "exists " : "forall ") + join(f.vars, ",") + ": " +
                      print_node(*f.children[0], false);
      return wrap_quantifier ? "(" + s + ")" : s;
    }
  }
  return "";
}

}  // namespace

std::string print_fo(const FormulaPtr& f) { return print_node(*f, false); }

}  // namespace cqa
