#include "masslab/dsl.hpp"

#include <sstream>

#include "masslab/errors.hpp"
#include "masslab/fixtures.hpp"
#include "masslab/tape.hpp"

namespace masslab::dsl {

namespace {

struct Token {
  enum class Kind { ident, number, punct, end };
  Kind kind = Kind::end;
  std::string text;
  nat value = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& expected) const {
    throw parse_error("parse error at " + std::to_string(tok_.line) + ":" +
                      std::to_string(tok_.col) + ": expected " + expected + ", got '" +
                      (tok_.kind == Token::Kind::end ? "<end>" : tok_.text) + "'");
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) return;
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      tok_.kind = Token::Kind::number;
      nat v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        v = v * 10 + (text_[pos_] - '0');
        tok_.text += text_[pos_];
        ++pos_;
        ++col_;
      }
      tok_.value = v;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      tok_.kind = Token::Kind::ident;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        tok_.text += text_[pos_];
        ++pos_;
        ++col_;
      }
      return;
    }
    static const std::string punct = "()[]{}<>,";
    if (punct.find(c) != std::string::npos) {
      tok_.kind = Token::Kind::punct;
      tok_.text = std::string(1, c);
      ++pos_;
      ++col_;
      return;
    }
    throw parse_error("parse error at " + std::to_string(line_) + ":" +
                      std::to_string(col_) + ": stray character '" + std::string(1, c) + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lx_(text) {}

  ExprPtr run() {
    ExprPtr e = expr();
    if (lx_.peek().kind != Token::Kind::end) lx_.fail("end of input");
    return e;
  }

 private:
  bool punct(const char* p) {
    return lx_.peek().kind == Token::Kind::punct && lx_.peek().text == p;
  }

  void expect_punct(const char* p) {
    if (!punct(p)) lx_.fail(std::string("'") + p + "'");
    lx_.take();
  }

  nat number() {
    if (lx_.peek().kind != Token::Kind::number) lx_.fail("a number");
    return lx_.take().value;
  }

  Word word() {
    expect_punct("<");
    Word w;
    if (!punct(">")) {
      w.push_back(number());
      while (punct(",")) {
        lx_.take();
        w.push_back(number());
      }
    }
    expect_punct(">");
    return w;
  }

  std::vector<nat> set() {
    expect_punct("{");
    std::vector<nat> s;
    if (!punct("}")) {
      s.push_back(number());
      while (punct(",")) {
        lx_.take();
        s.push_back(number());
      }
    }
    expect_punct("}");
    return s;
  }

  std::vector<ExprPtr> paren_args(std::size_t min_args) {
    expect_punct("(");
    std::vector<ExprPtr> args;
    args.push_back(expr());
    while (punct(",")) {
      lx_.take();
      args.push_back(expr());
    }
    expect_punct(")");
    if (args.size() < min_args) lx_.fail("at least " + std::to_string(min_args) + " arguments");
    return args;
  }

  ExprPtr expr() {
    if (punct("(")) {
      lx_.take();
      ExprPtr e = expr();
      expect_punct(")");
      return e;
    }
    if (lx_.peek().kind != Token::Kind::ident)
      lx_.fail("an operator, atom, or fixture name");
    Token head = lx_.take();
    const std::string& w = head.text;
    auto e = std::make_shared<Expr>();
    if (w == "dnr") {
      e->op = Expr::Op::dnr;
      e->nums.push_back(number());
      if (lx_.peek().kind == Token::Kind::number) e->nums.push_back(number());
      else e->nums.push_back(1);
      return e;
    }
    if (w == "homog") {
      e->op = Expr::Op::homog;
      expect_punct("[");
      e->sets.push_back(set());
      while (punct(",")) {
        lx_.take();
        e->sets.push_back(set());
      }
      expect_punct("]");
      return e;
    }
    if (w == "singleton") {
      e->op = Expr::Op::singleton;
      e->word = word();
      return e;
    }
    if (w == "full") {
      e->op = Expr::Op::full;
      e->nums.push_back(number());
      return e;
    }
    if (w == "oplus" || w == "linf" || w == "cup" || w == "concat" ||
        w == "commconcat" || w == "hyper" || w == "arrow" || w == "sqcap") {
      e->op = w == "oplus"        ? Expr::Op::oplus
              : w == "linf"       ? Expr::Op::linf
              : w == "cup"        ? Expr::Op::cup
              : w == "concat"     ? Expr::Op::concat
              : w == "commconcat" ? Expr::Op::commconcat
              : w == "hyper"      ? Expr::Op::hyper
              : w == "arrow"      ? Expr::Op::arrow
                                  : Expr::Op::sqcap;
      e->args = paren_args(2);
      if (e->args.size() != 2) lx_.fail("exactly two arguments for " + w);
      return e;
    }
    if (w == "cap") {
      e->op = Expr::Op::cap;
      e->word = word();
      e->args = paren_args(1);
      if (e->args.size() != 1) lx_.fail("one argument for cap");
      return e;
    }
    if (w == "family") {
      e->op = Expr::Op::family;
      e->args = paren_args(2);
      return e;
    }
    if (w == "meet") {
      e->op = Expr::Op::meet;
      e->args = paren_args(1);
      return e;
    }
    if (w == "deriv" || w == "btie" || w == "heart") {
      e->op = w == "deriv" ? Expr::Op::deriv : w == "btie" ? Expr::Op::btie : Expr::Op::heart;
      e->nums.push_back(number());
      e->args = paren_args(1);
      if (e->args.size() != 1) lx_.fail("one argument for " + w);
      return e;
    }
    if (w == "delayed") {
      e->op = Expr::Op::delayed;
      e->word = word();
      e->args = paren_args(1);
      if (e->args.size() != 1) lx_.fail("one argument for delayed");
      return e;
    }
    if (w == "tie") {
      e->op = Expr::Op::tie;
      if (lx_.peek().kind == Token::Kind::number) {
        e->tie_mode = Expr::TieMode::finite;
        e->nums.push_back(number());
      } else if (lx_.peek().kind == Token::Kind::ident && lx_.peek().text == "omega") {
        lx_.take();
        e->tie_mode = Expr::TieMode::omega;
        e->nums.push_back(0);
      } else if (lx_.peek().kind == Token::Kind::ident && lx_.peek().text == "inf") {
        lx_.take();
        e->tie_mode = Expr::TieMode::infinity;
        e->nums.push_back(0);
      } else {
        lx_.fail("a mind-change bound, 'omega', or 'inf'");
      }
      e->args = paren_args(1);
      return e;
    }
    // bare identifier: fixture reference
    e->op = Expr::Op::fixture;
    e->name = w;
    return e;
  }

  Lexer lx_;
};

std::string show_set(const std::vector<nat>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "}";
}

std::string print_args(const std::vector<ExprPtr>& args) {
  std::string out = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += print(*args[i]);
  }
  return out + ")";
}

}  // namespace

bool equal(const Expr& a, const Expr& b) {
  if (a.op != b.op || a.nums != b.nums || a.word != b.word || a.sets != b.sets ||
      a.name != b.name || a.tie_mode != b.tie_mode || a.args.size() != b.args.size())
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal(*a.args[i], *b.args[i])) return false;
  return true;
}

ExprPtr parse(const std::string& text) { return Parser(text).run(); }

std::string print(const Expr& e) {
  switch (e.op) {
    case Expr::Op::dnr:
      return e.nums[1] == 1 ? "dnr " + std::to_string(e.nums[0])
                            : "dnr " + std::to_string(e.nums[0]) + " " + std::to_string(e.nums[1]);
    case Expr::Op::homog: {
      std::string out = "homog [";
      for (std::size_t i = 0; i < e.sets.size(); ++i) {
        if (i) out += ",";
        out += show_set(e.sets[i]);
      }
      return out + "]";
    }
    case Expr::Op::singleton:
      return "singleton " + show(e.word);
    case Expr::Op::full:
      return "full " + std::to_string(e.nums[0]);
    case Expr::Op::fixture:
      return e.name;
    case Expr::Op::oplus:
      return "oplus" + print_args(e.args);
    case Expr::Op::linf:
      return "linf" + print_args(e.args);
    case Expr::Op::cup:
      return "cup" + print_args(e.args);
    case Expr::Op::cap:
      return "cap " + show(e.word) + " " + print_args(e.args);
    case Expr::Op::concat:
      return "concat" + print_args(e.args);
    case Expr::Op::commconcat:
      return "commconcat" + print_args(e.args);
    case Expr::Op::family:
      return "family" + print_args(e.args);
    case Expr::Op::meet:
      return "meet" + print_args(e.args);
    case Expr::Op::deriv:
      return "deriv " + std::to_string(e.nums[0]) + " " + print_args(e.args);
    case Expr::Op::delayed:
      return "delayed " + show(e.word) + " " + print_args(e.args);
    case Expr::Op::btie:
      return "btie " + std::to_string(e.nums[0]) + " " + print_args(e.args);
    case Expr::Op::hyper:
      return "hyper" + print_args(e.args);
    case Expr::Op::tie: {
      std::string mode = e.tie_mode == Expr::TieMode::finite ? std::to_string(e.nums[0])
                         : e.tie_mode == Expr::TieMode::omega ? "omega"
                                                              : "inf";
      return "tie " + mode + " " + print_args(e.args);
    }
    case Expr::Op::arrow:
      return "arrow" + print_args(e.args);
    case Expr::Op::sqcap:
      return "sqcap" + print_args(e.args);
    case Expr::Op::heart:
      return "heart " + std::to_string(e.nums[0]) + " " + print_args(e.args);
  }
  return "?";
}

namespace {

trees::ClosedClass need_class(const Elaborated& v, const std::string& where) {
  if (const auto* c = std::get_if<trees::ClosedClass>(&v)) return *c;
  throw shape_error("elaborate: " + where + " needs a plain class, got a layered class");
}

}  // namespace

Elaborated elaborate(const Expr& e, const Fixtures& env) {
  auto sub_class = [&](std::size_t i, const char* where) {
    return need_class(elaborate(*e.args.at(i), env), where);
  };
  std::string label = print(e);
  auto relabel = [&label](trees::ClosedClass c) {
    c.label = label;
    return c;
  };
  switch (e.op) {
    case Expr::Op::dnr:
      return relabel(trees::dnr(env.machine(), e.nums[0], e.nums[1], {},
                                trees::constant_budget(env.default_budget)));
    case Expr::Op::homog:
      return relabel(trees::homogeneous(e.sets));
    case Expr::Op::singleton:
      return relabel(trees::singleton(e.word));
    case Expr::Op::full:
      return relabel(trees::full(e.nums[0]));
    case Expr::Op::fixture: {
      auto it = env.classes.find(e.name);
      if (it == env.classes.end())
        throw parse_error("elaborate: unknown fixture '" + e.name + "'");
      return it->second;
    }
    case Expr::Op::oplus:
      return relabel(trees::product(sub_class(0, "oplus"), sub_class(1, "oplus")));
    case Expr::Op::linf:
      return relabel(trees::coproduct(sub_class(0, "linf"), sub_class(1, "linf")));
    case Expr::Op::cup:
      return relabel(trees::union_class(sub_class(0, "cup"), sub_class(1, "cup")));
    case Expr::Op::cap:
      return relabel(trees::cylinder(sub_class(0, "cap"), e.word));
    case Expr::Op::concat:
      return relabel(concat::concat_op(sub_class(0, "concat"), sub_class(1, "concat")));
    case Expr::Op::commconcat:
      return relabel(
          concat::comm_concat(sub_class(0, "commconcat"), sub_class(1, "commconcat")));
    case Expr::Op::family: {
      std::vector<trees::ClosedClass> qs;
      for (std::size_t i = 1; i < e.args.size(); ++i) qs.push_back(sub_class(i, "family"));
      return relabel(
          concat::concat_family(sub_class(0, "family"), concat::cyclic_family(qs), label));
    }
    case Expr::Op::meet: {
      std::vector<trees::ClosedClass> qs;
      for (std::size_t i = 0; i < e.args.size(); ++i) qs.push_back(sub_class(i, "meet"));
      return relabel(
          concat::recursive_meet(env.base, concat::cyclic_family(qs), label));
    }
    case Expr::Op::deriv:
      if (e.nums[0] < 1) throw shape_error("elaborate: deriv needs n >= 1");
      return relabel(concat::derivative(sub_class(0, "deriv"), e.nums[0]));
    case Expr::Op::delayed:
      return relabel(concat::delayed_derivative(sub_class(0, "delayed"), e.word));
    case Expr::Op::btie: {
      concat::LayeredClass lc = concat::btie(sub_class(0, "btie"), e.nums[0]);
      lc.label = label;
      return lc;
    }
    case Expr::Op::hyper:
      return relabel(concat::hyperconcat(sub_class(0, "hyper"), sub_class(1, "hyper")));
    case Expr::Op::tie: {
      std::vector<trees::ClosedClass> ps;
      for (std::size_t i = 0; i < e.args.size(); ++i) ps.push_back(sub_class(i, "tie"));
      tape::TieMode mode = e.tie_mode == Expr::TieMode::finite ? tape::TieMode::finite
                           : e.tie_mode == Expr::TieMode::omega ? tape::TieMode::omega
                                                                : tape::TieMode::infinity;
      return relabel(tape::tie(mode, e.nums[0], ps));
    }
    case Expr::Op::arrow:
      return relabel(concat::arrow_concat(sub_class(0, "arrow"), sub_class(1, "arrow")));
    case Expr::Op::sqcap:
      return relabel(concat::sqcap_concat(sub_class(0, "sqcap"), sub_class(1, "sqcap")));
    case Expr::Op::heart: {
      trees::ClosedClass inner = sub_class(0, "heart");
      if (!inner.tie)
        throw shape_error("elaborate: heart needs a disjunction (tie) argument");
      return relabel(tape::heart_class(inner, e.nums[0]));
    }
  }
  throw shape_error("elaborate: unhandled expression");
}

trees::ClosedClass elaborate_class(const std::string& text, const Fixtures& env) {
  Elaborated v = elaborate(*parse(text), env);
  if (auto* c = std::get_if<trees::ClosedClass>(&v)) return *c;
  throw shape_error("expression elaborates to a layered class where a plain class is needed");
}

}  // namespace masslab::dsl
