#include <cctype>
#include <set>

#include "fpsolve/frontend.hpp"

namespace fpsolve {

namespace {

struct Token {
  enum class Kind { Ident, Number, Punct, Keyword, End };
  Kind kind;
  std::string text;
  int line, col;
};

const std::set<std::string> kKeywords = {"input", "in", "if", "else", "while",
                                         "sqrt", "@suspect"};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_ = {Token::Kind::End, "", line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '@') {
      std::string s;
      if (c == '@') {
        s += get();
        if (pos_ >= src_.size() || !std::isalpha(static_cast<unsigned char>(src_[pos_])))
          throw ParseError("stray '@'", tok_.line, tok_.col);
      }
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        s += get();
      tok_.kind = kKeywords.count(s) ? Token::Kind::Keyword : Token::Kind::Ident;
      if (s[0] == '@' && tok_.kind != Token::Kind::Keyword)
        throw ParseError("unknown annotation '" + s + "'", tok_.line, tok_.col);
      tok_.text = s;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      if (pos_ + 1 < src_.size() && c == '0' && (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X')) {
        s += get();
        s += get();
        while (pos_ < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[pos_])))
          s += get();
      } else {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          s += get();
        if (pos_ < src_.size() && src_[pos_] == '.') {
          s += get();
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            s += get();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
          s += get();
          if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) s += get();
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            s += get();
        }
        // a trailing float-literal suffix as in C sources is tolerated
        if (pos_ < src_.size() && (src_[pos_] == 'f' || src_[pos_] == 'F')) get();
      }
      tok_ = {Token::Kind::Number, s, tok_.line, tok_.col};
      return;
    }
    // punctuation, two-char operators first
    static const char* two[] = {"<=", ">=", "==", "!="};
    for (const char* t : two) {
      if (src_.compare(pos_, 2, t) == 0) {
        get();
        get();
        tok_ = {Token::Kind::Punct, t, tok_.line, tok_.col};
        return;
      }
    }
    if (std::string("=;(){}[],<>+-*/").find(c) != std::string::npos) {
      get();
      tok_ = {Token::Kind::Punct, std::string(1, c), tok_.line, tok_.col};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
  }

  void skip_ws() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) get();
      if (pos_ < src_.size() && src_[pos_] == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') get();
        continue;
      }
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') get();
        continue;
      }
      break;
    }
  }

  char get() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_{Token::Kind::End, "", 1, 1};
};

class Parser {
 public:
  Parser(const std::string& src, const FloatFormat& fmt) : lex_(src), fmt_(fmt) {
    prog_.format = &fmt;
    prog_.source = src;
  }

  Program run() {
    while (at_keyword("input")) parse_decl();
    while (lex_.peek().kind != Token::Kind::End) prog_.stmts.push_back(parse_stmt());
    if (prog_.inputs.empty() && prog_.stmts.empty())
      throw ParseError("empty program", 1, 1);
    check_defs();
    return std::move(prog_);
  }

 private:
  bool at_keyword(const char* kw) const {
    return lex_.peek().kind == Token::Kind::Keyword && lex_.peek().text == kw;
  }
  bool at_punct(const char* p) const {
    return lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == p;
  }

  Token expect_punct(const char* p) {
    if (!at_punct(p))
      throw ParseError("expected '" + std::string(p) + "', got '" + lex_.peek().text + "'",
                       lex_.peek().line, lex_.peek().col);
    return lex_.next();
  }
  Token expect_keyword(const char* kw) {
    if (!at_keyword(kw))
      throw ParseError("expected '" + std::string(kw) + "', got '" + lex_.peek().text + "'",
                       lex_.peek().line, lex_.peek().col);
    return lex_.next();
  }
  Token expect_ident() {
    if (lex_.peek().kind != Token::Kind::Ident)
      throw ParseError("expected identifier, got '" + lex_.peek().text + "'", lex_.peek().line,
                       lex_.peek().col);
    return lex_.next();
  }

  void parse_decl() {
    expect_keyword("input");
    Token name = expect_ident();
    expect_keyword("in");
    auto [iv, text] = parse_interval(/*allow_empty=*/false);
    expect_punct(";");
    if (prog_.is_input(name.text))
      throw ParseError("duplicate input '" + name.text + "'", name.line, name.col);
    prog_.inputs.push_back({name.text, iv, text});
  }

  // Signed decimal endpoint, kept exact until materialization.
  std::pair<mpq_class, std::string> parse_signed_number() {
    std::string text;
    if (at_punct("-") || at_punct("+")) text += lex_.next().text;
    if (lex_.peek().kind != Token::Kind::Number)
      throw ParseError("expected number, got '" + lex_.peek().text + "'", lex_.peek().line,
                       lex_.peek().col);
    Token t = lex_.next();
    text += t.text;
    if (t.text.size() > 1 && (t.text[1] == 'x' || t.text[1] == 'X'))
      throw ParseError("bit-pattern literal not allowed in interval", t.line, t.col);
    return {parse_decimal(text), text};
  }

  std::pair<FpInterval, std::string> parse_interval(bool allow_empty) {
    Token open = lex_.next();
    if (open.kind != Token::Kind::Punct || (open.text != "[" && open.text != "("))
      throw ParseError("expected interval", open.line, open.col);
    bool lo_open = open.text == "(";
    auto [lo_q, lo_text] = parse_signed_number();
    expect_punct(",");
    auto [hi_q, hi_text] = parse_signed_number();
    Token close = lex_.next();
    if (close.kind != Token::Kind::Punct || (close.text != "]" && close.text != ")"))
      throw ParseError("expected ']' or ')'", close.line, close.col);
    bool hi_open = close.text == ")";

    // Endpoints materialize by nearest-even rounding; open ends then step
    // one float inward (succ/pred), saturating at the finite range.
    std::string text = open.text + lo_text + ", " + hi_text + close.text;
    auto materialize = [&](const mpq_class& q, bool is_open,
                           bool is_lo) -> std::optional<FloatValue> {
      Rounded r = round_nearest_even(q, fmt_);
      FloatValue v;
      switch (r.kind) {
        case Rounded::Kind::Finite: v = r.value; break;
        case Rounded::Kind::OverflowPos: v = FloatValue::max_finite(fmt_); break;
        case Rounded::Kind::OverflowNeg: v = FloatValue::min_finite(fmt_); break;
      }
      if (!is_open) return v;
      int64_t o = ordinal(v) + (is_lo ? 1 : -1);
      int64_t maxo = static_cast<int64_t>(fmt_.max_finite_magnitude());
      if (o > maxo || o < -maxo) return std::nullopt;
      return from_ordinal(o, fmt_);
    };
    auto lo = materialize(lo_q, lo_open, /*is_lo=*/true);
    auto hi = materialize(hi_q, hi_open, /*is_lo=*/false);
    if (!lo || !hi || ordinal(*lo) > ordinal(*hi)) {
      if (!allow_empty)
        throw ParseError("interval " + text + " contains no float", open.line, open.col);
      return {FpInterval::empty(fmt_), text};
    }
    return {FpInterval(*lo, *hi), text};
  }

  StmtPtr parse_stmt() {
    const Token& t = lex_.peek();
    if (at_keyword("if")) return parse_if();
    if (at_keyword("while")) return parse_while();
    if (at_keyword("@suspect")) return parse_suspect();
    if (t.kind == Token::Kind::Ident) return parse_assign();
    throw ParseError("expected statement, got '" + t.text + "'", t.line, t.col);
  }

  std::vector<StmtPtr> parse_block() {
    expect_punct("{");
    std::vector<StmtPtr> body;
    while (!at_punct("}")) body.push_back(parse_stmt());
    expect_punct("}");
    return body;
  }

  StmtPtr parse_assign() {
    Token name = expect_ident();
    expect_punct("=");
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::Assign;
    s->line = name.line;
    s->col = name.col;
    s->target = name.text;
    s->value = parse_expr();
    expect_punct(";");
    return s;
  }

  StmtPtr parse_if() {
    Token kw = expect_keyword("if");
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::If;
    s->line = kw.line;
    s->col = kw.col;
    expect_punct("(");
    s->cond = parse_cond();
    expect_punct(")");
    s->then_body = parse_block();
    if (at_keyword("else")) {
      lex_.next();
      s->else_body = parse_block();
    }
    return s;
  }

  StmtPtr parse_while() {
    Token kw = expect_keyword("while");
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::While;
    s->line = kw.line;
    s->col = kw.col;
    expect_punct("(");
    s->cond = parse_cond();
    expect_punct(")");
    s->then_body = parse_block();
    return s;
  }

  StmtPtr parse_suspect() {
    Token kw = expect_keyword("@suspect");
    Token name = expect_ident();
    expect_keyword("in");
    auto [iv, text] = parse_interval(/*allow_empty=*/true);
    expect_punct(";");
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::Suspect;
    s->line = kw.line;
    s->col = kw.col;
    s->suspect_var = name.text;
    s->suspect_interval = iv;
    s->suspect_text = text;
    s->label = name.text + "@L" + std::to_string(kw.line);
    return s;
  }

  Cond parse_cond() {
    Cond c;
    c.lhs = parse_expr();
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::Punct)
      throw ParseError("expected comparison operator", t.line, t.col);
    if (t.text == "<")
      c.rel = RelOp::Lt;
    else if (t.text == "<=")
      c.rel = RelOp::Le;
    else if (t.text == ">")
      c.rel = RelOp::Gt;
    else if (t.text == ">=")
      c.rel = RelOp::Ge;
    else if (t.text == "==")
      c.rel = RelOp::Eq;
    else if (t.text == "!=")
      c.rel = RelOp::Ne;
    else
      throw ParseError("expected comparison operator, got '" + t.text + "'", t.line, t.col);
    lex_.next();
    c.rhs = parse_expr();
    return c;
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    while (at_punct("+") || at_punct("-")) {
      Token t = lex_.next();
      auto n = std::make_unique<Expr>();
      n->kind = Expr::Kind::Binary;
      n->op = t.text == "+" ? BinOp::Add : BinOp::Sub;
      n->line = t.line;
      n->col = t.col;
      n->lhs = std::move(e);
      n->rhs = parse_term();
      e = std::move(n);
    }
    return e;
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    while (at_punct("*") || at_punct("/")) {
      Token t = lex_.next();
      auto n = std::make_unique<Expr>();
      n->kind = Expr::Kind::Binary;
      n->op = t.text == "*" ? BinOp::Mul : BinOp::Div;
      n->line = t.line;
      n->col = t.col;
      n->lhs = std::move(e);
      n->rhs = parse_factor();
      e = std::move(n);
    }
    return e;
  }

  ExprPtr parse_factor() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Number) {
      Token num = lex_.next();
      auto n = std::make_unique<Expr>();
      n->kind = Expr::Kind::Literal;
      n->line = num.line;
      n->col = num.col;
      if (num.text.size() > 1 && (num.text[1] == 'x' || num.text[1] == 'X')) {
        uint64_t bits = std::stoull(num.text.substr(2), nullptr, 16);
        if (bits >> fmt_.width())
          throw ParseError("bit pattern wider than the format", num.line, num.col);
        FloatValue v(bits, fmt_);
        if (!v.is_finite())
          throw ParseError("non-finite literal", num.line, num.col);
        n->value = v;
      } else {
        Rounded r = parse_float(num.text, fmt_);
        if (!r.finite())
          throw ParseError("literal '" + num.text + "' overflows the format", num.line, num.col);
        n->value = r.value;
      }
      return n;
    }
    if (t.kind == Token::Kind::Ident) {
      Token id = lex_.next();
      auto n = std::make_unique<Expr>();
      n->kind = Expr::Kind::Var;
      n->name = id.text;
      n->line = id.line;
      n->col = id.col;
      return n;
    }
    if (at_keyword("sqrt")) {
      Token kw = lex_.next();
      expect_punct("(");
      auto n = std::make_unique<Expr>();
      n->kind = Expr::Kind::Sqrt;
      n->line = kw.line;
      n->col = kw.col;
      n->lhs = parse_expr();
      expect_punct(")");
      return n;
    }
    if (at_punct("(")) {
      lex_.next();
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (at_punct("-")) {
      Token m = lex_.next();
      auto n = std::make_unique<Expr>();
      n->kind = Expr::Kind::Negate;
      n->line = m.line;
      n->col = m.col;
      n->lhs = parse_factor();
      return n;
    }
    throw ParseError("expected expression, got '" + t.text + "'", t.line, t.col);
  }

  // ---- use-before-def -------------------------------------------------

  void check_expr_defs(const Expr& e, const std::set<std::string>& defined) {
    switch (e.kind) {
      case Expr::Kind::Var:
        if (!defined.count(e.name))
          throw ParseError("use of undefined variable '" + e.name + "'", e.line, e.col);
        break;
      case Expr::Kind::Binary:
        check_expr_defs(*e.lhs, defined);
        check_expr_defs(*e.rhs, defined);
        break;
      case Expr::Kind::Sqrt:
      case Expr::Kind::Negate:
        check_expr_defs(*e.lhs, defined);
        break;
      case Expr::Kind::Literal:
        break;
    }
  }

  // Returns the set of names guaranteed defined after the block on every path.
  std::set<std::string> check_block_defs(const std::vector<StmtPtr>& body,
                                         std::set<std::string> defined) {
    for (const auto& s : body) {
      switch (s->kind) {
        case Stmt::Kind::Assign:
          check_expr_defs(*s->value, defined);
          defined.insert(s->target);
          break;
        case Stmt::Kind::If: {
          check_expr_defs(*s->cond->lhs, defined);
          check_expr_defs(*s->cond->rhs, defined);
          auto then_set = check_block_defs(s->then_body, defined);
          auto else_set = check_block_defs(s->else_body, defined);
          std::set<std::string> both;
          for (const auto& n : then_set)
            if (else_set.count(n)) both.insert(n);
          defined = std::move(both);
          break;
        }
        case Stmt::Kind::While:
          check_expr_defs(*s->cond->lhs, defined);
          check_expr_defs(*s->cond->rhs, defined);
          check_block_defs(s->then_body, defined);  // body may never run
          break;
        case Stmt::Kind::Suspect:
          if (!defined.count(s->suspect_var))
            throw ParseError("suspect variable '" + s->suspect_var + "' is not defined here",
                             s->line, s->col);
          break;
        case Stmt::Kind::Residual:
          break;
      }
    }
    return defined;
  }

  void check_defs() {
    std::set<std::string> defined;
    for (const auto& d : prog_.inputs) defined.insert(d.name);
    check_block_defs(prog_.stmts, std::move(defined));
  }

  Lexer lex_;
  const FloatFormat& fmt_;
  Program prog_;
};

}  // namespace

Program parse_program(const std::string& text) {
  return Parser(text, FloatFormat::binary32()).run();
}

}  // namespace fpsolve
