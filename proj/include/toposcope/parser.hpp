#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "toposcope/ast.hpp"
#include "toposcope/errors.hpp"

namespace toposcope {

namespace detail {

enum class Tok {
  Ident,
  KwTrue,
  KwFalse,
  KwNot,
  KwAnd,
  KwOr,
  KwExists,
  KwForall,
  LParen,
  RParen,
  Dot,
  Colon,
  Comma,
  Equal,
  Arrow,
  End,
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwNot: return "'not'";
    case Tok::KwAnd: return "'and'";
    case Tok::KwOr: return "'or'";
    case Tok::KwExists: return "'exists'";
    case Tok::KwForall: return "'forall'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Dot: return "'.'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Equal: return "'='";
    case Tok::Arrow: return "'=>'";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

inline bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool ident_char(char c) {
  return ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
}

inline std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto make_span = [&](int l, int c) { return Span{l, c, line, col}; };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++col;
      ++i;
      continue;
    }
    int l0 = line, c0 = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      col += int(j - i);
      i = j;
      Tok k = Tok::Ident;
      if (word == "true") k = Tok::KwTrue;
      else if (word == "false") k = Tok::KwFalse;
      else if (word == "not") k = Tok::KwNot;
      else if (word == "and") k = Tok::KwAnd;
      else if (word == "or") k = Tok::KwOr;
      else if (word == "exists") k = Tok::KwExists;
      else if (word == "forall") k = Tok::KwForall;
      out.push_back({k, std::move(word), make_span(l0, c0)});
      continue;
    }
    if (c == '=' && i + 1 < text.size() && text[i + 1] == '>') {
      i += 2;
      col += 2;
      out.push_back({Tok::Arrow, "=>", make_span(l0, c0)});
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '.': k = Tok::Dot; break;
      case ':': k = Tok::Colon; break;
      case ',': k = Tok::Comma; break;
      case '=': k = Tok::Equal; break;
      default:
        throw Error(ErrorKind::SyntaxError, Span{l0, c0, l0, c0 + 1},
                    "unexpected character '" + std::string(1, c) + "'");
    }
    ++i;
    ++col;
    out.push_back({k, std::string(1, c), make_span(l0, c0)});
  }
  out.push_back({Tok::End, "", Span{line, col, line, col}});
  return out;
}

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : toks_(lex(text)) {}

  Formula parse() {
    Formula f = formula();
    expect(Tok::End);
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& expected) {
    const Token& t = peek();
    std::string found =
        t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorKind::SyntaxError, t.span,
                "expected " + expected + ", found " + found);
  }

  Token expect(Tok k) {
    if (peek().kind != k) fail(tok_name(k));
    return take();
  }

  static Span join(const Span& a, const Span& b) {
    return Span{a.line, a.col, b.end_line, b.end_col};
  }

  Formula formula() { return implies(); }

  Formula implies() {
    Formula lhs = disj();
    if (peek().kind == Tok::Arrow) {
      take();
      Formula rhs = implies();
      Formula f;
      f.kind = Formula::Kind::Implies;
      f.span = join(lhs.span, rhs.span);
      f.children = {std::move(lhs), std::move(rhs)};
      return f;
    }
    return lhs;
  }

  Formula disj() {
    Formula lhs = conj();
    while (peek().kind == Tok::KwOr) {
      take();
      Formula rhs = conj();
      Formula f;
      f.kind = Formula::Kind::Or;
      f.span = join(lhs.span, rhs.span);
      f.children = {std::move(lhs), std::move(rhs)};
      lhs = std::move(f);
    }
    return lhs;
  }

  Formula conj() {
    Formula lhs = unary();
    while (peek().kind == Tok::KwAnd) {
      take();
      Formula rhs = unary();
      Formula f;
      f.kind = Formula::Kind::And;
      f.span = join(lhs.span, rhs.span);
      f.children = {std::move(lhs), std::move(rhs)};
      lhs = std::move(f);
    }
    return lhs;
  }

  Formula unary() {
    if (peek().kind == Tok::KwNot) {
      Token t = take();
      Formula body = unary();
      Formula f;
      f.kind = Formula::Kind::Not;
      f.span = join(t.span, body.span);
      f.children = {std::move(body)};
      return f;
    }
    if (peek().kind == Tok::KwExists || peek().kind == Tok::KwForall) {
      Token q = take();
      Token var = expect(Tok::Ident);
      expect(Tok::Colon);
      Token sort = expect(Tok::Ident);
      expect(Tok::Dot);
      Formula body = implies();
      Formula f;
      f.kind = q.kind == Tok::KwExists ? Formula::Kind::Exists
                                       : Formula::Kind::Forall;
      f.name = var.text;
      f.sort = sort.text;
      f.span = join(q.span, body.span);
      f.children = {std::move(body)};
      return f;
    }
    return atom();
  }

  Formula atom() {
    switch (peek().kind) {
      case Tok::KwTrue: {
        Token t = take();
        Formula f;
        f.kind = Formula::Kind::True;
        f.span = t.span;
        return f;
      }
      case Tok::KwFalse: {
        Token t = take();
        Formula f;
        f.kind = Formula::Kind::False;
        f.span = t.span;
        return f;
      }
      case Tok::LParen: {
        take();
        Formula f = formula();
        expect(Tok::RParen);
        return f;
      }
      case Tok::Ident: {
        Term t = term();
        if (peek().kind == Tok::Equal) {
          take();
          Term rhs = term();
          Formula f;
          f.kind = Formula::Kind::Eq;
          f.span = join(t.span, rhs.span);
          f.terms = {std::move(t), std::move(rhs)};
          return f;
        }
        if (t.kind != Term::Kind::App)
          fail("'=' or '(' after identifier");
        Formula f;
        f.kind = Formula::Kind::Rel;
        f.name = t.name;
        f.span = t.span;
        f.terms = std::move(t.args);
        return f;
      }
      default:
        fail("a formula");
    }
  }

  Term term() {
    Token head = expect(Tok::Ident);
    Term t;
    t.name = head.text;
    t.span = head.span;
    if (peek().kind != Tok::LParen) {
      t.kind = Term::Kind::Var;
      return t;
    }
    take();
    t.kind = Term::Kind::App;
    if (peek().kind != Tok::RParen) {
      t.args.push_back(term());
      while (peek().kind == Tok::Comma) {
        take();
        t.args.push_back(term());
      }
    }
    Token close = expect(Tok::RParen);
    t.span = join(head.span, close.span);
    return t;
  }
};

}  // namespace detail

inline Formula parse_formula(std::string_view text) {
  return detail::FormulaParser(text).parse();
}

inline std::string print(const Term& t) {
  // 0-ary applications print bare; the parser reads them back as variables
  // and typechecking resolves them to constants again.
  if (t.args.empty()) return t.name;
  std::string out = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ", ";
    out += print(t.args[i]);
  }
  return out + ")";
}

namespace detail {

inline int formula_prec(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Implies: return 1;
    case Formula::Kind::Or: return 2;
    case Formula::Kind::And: return 3;
    case Formula::Kind::Not:
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return 4;
    default: return 5;
  }
}

inline bool is_quantifier(const Formula& f) {
  return f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall;
}

// `tail` is true when the printed formula extends to the end of the
// enclosing parenthesised region; only there may a quantifier body swallow
// the rest of the text without changing the parse.
inline void print_rec(const Formula& f, int min_prec, bool tail,
                      std::string& out);

inline void print_bare(const Formula& f, bool tail, std::string& out) {
  switch (f.kind) {
    case Formula::Kind::True: out += "true"; return;
    case Formula::Kind::False: out += "false"; return;
    case Formula::Kind::Rel: {
      out += f.name + "(";
      for (std::size_t i = 0; i < f.terms.size(); ++i) {
        if (i) out += ", ";
        out += print(f.terms[i]);
      }
      out += ")";
      return;
    }
    case Formula::Kind::Eq:
      out += print(f.terms.at(0)) + " = " + print(f.terms.at(1));
      return;
    case Formula::Kind::Not:
      out += "not ";
      print_rec(f.children.at(0), 4, tail, out);
      return;
    case Formula::Kind::And:
      print_rec(f.children.at(0), 3, false, out);
      out += " and ";
      print_rec(f.children.at(1), 4, tail, out);
      return;
    case Formula::Kind::Or:
      print_rec(f.children.at(0), 2, false, out);
      out += " or ";
      print_rec(f.children.at(1), 3, tail, out);
      return;
    case Formula::Kind::Implies:
      print_rec(f.children.at(0), 2, false, out);
      out += " => ";
      print_rec(f.children.at(1), 1, tail, out);
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      out += (f.kind == Formula::Kind::Exists ? "exists " : "forall ");
      out += f.name + ":" + f.sort + ". ";
      print_rec(f.children.at(0), 1, true, out);
      return;
  }
}

inline void print_rec(const Formula& f, int min_prec, bool tail,
                      std::string& out) {
  if (formula_prec(f) < min_prec || (is_quantifier(f) && !tail)) {
    out += "(";
    print_bare(f, true, out);
    out += ")";
  } else {
    print_bare(f, tail, out);
  }
}

}  // namespace detail

inline std::string print(const Formula& f) {
  std::string out;
  detail::print_rec(f, 1, true, out);
  return out;
}

}  // namespace toposcope
