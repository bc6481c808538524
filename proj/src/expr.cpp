#include "hexp/expr.hpp"

#include <cctype>
#include <utility>

#include "hexp/adjoint.hpp"

namespace hexp {

namespace {

struct Token {
  enum class Kind {
    Number,
    Name,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    End,
  };
  Kind kind;
  std::string text;
  Rat value;
  size_t pos = 0;  // 1-based position of the first character
};

std::string at_pos(size_t pos) {
  return " at position " + std::to_string(pos);
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0;
  auto digits = [&] {
    size_t start = i;
    while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])))
      ++i;
    return src.substr(start, i - start);
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    size_t pos = i + 1;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num = digits();
      std::string den;
      if (i + 1 < src.size() && src[i] == '/' &&
          std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
        ++i;
        den = digits();
        require(den.find_first_not_of('0') != std::string::npos,
                ErrorKind::Config, "zero denominator" + at_pos(pos));
      }
      Rat v = rat_parse(den.empty() ? num : num + "/" + den);
      out.push_back({Token::Kind::Number, num, v, pos});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = i;
      while (i < src.size() &&
             std::isalpha(static_cast<unsigned char>(src[i])))
        ++i;
      std::string name = src.substr(start, i - start);
      require(name == "s" || name == "hbar" || name == "E" || name == "t" ||
                  name == "tbar",
              ErrorKind::Config, "unknown name '" + name + "'" + at_pos(pos));
      out.push_back({Token::Kind::Name, name, Rat(0), pos});
      continue;
    }
    Token::Kind kind;
    switch (c) {
      case '+': kind = Token::Kind::Plus; break;
      case '-': kind = Token::Kind::Minus; break;
      case '*': kind = Token::Kind::Star; break;
      case '^': kind = Token::Kind::Caret; break;
      case '(': kind = Token::Kind::LParen; break;
      case ')': kind = Token::Kind::RParen; break;
      case '[': kind = Token::Kind::LBracket; break;
      case ']': kind = Token::Kind::RBracket; break;
      default:
        fail(ErrorKind::Config,
             std::string("unexpected character '") + c + "'" + at_pos(pos));
    }
    out.push_back({kind, std::string(1, c), Rat(0), pos});
    ++i;
  }
  out.push_back({Token::Kind::End, "", Rat(0), src.size() + 1});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ExprAst run() {
    ExprAst ast = expr();
    require(peek().kind == Token::Kind::End, ErrorKind::Config,
            "unexpected trailing input" + at_pos(peek().pos));
    return ast;
  }

 private:
  const Token& peek() const { return tokens_[cur_]; }
  const Token& get() { return tokens_[cur_++]; }
  bool accept(Token::Kind k) {
    if (peek().kind != k) return false;
    ++cur_;
    return true;
  }
  void expect(Token::Kind k, const std::string& what) {
    require(peek().kind == k, ErrorKind::Config,
            "expected " + what + at_pos(peek().pos));
    ++cur_;
  }

  static ExprAst binary(ExprAst::Kind kind, ExprAst lhs, ExprAst rhs) {
    ExprAst out;
    out.kind = kind;
    out.args.push_back(std::move(lhs));
    out.args.push_back(std::move(rhs));
    return out;
  }

  ExprAst expr() {
    ExprAst lhs = term();
    while (true) {
      if (accept(Token::Kind::Plus))
        lhs = binary(ExprAst::Kind::Add, std::move(lhs), term());
      else if (accept(Token::Kind::Minus))
        lhs = binary(ExprAst::Kind::Sub, std::move(lhs), term());
      else
        return lhs;
    }
  }

  ExprAst term() {
    ExprAst lhs = factor();
    while (accept(Token::Kind::Star))
      lhs = binary(ExprAst::Kind::Mul, std::move(lhs), factor());
    return lhs;
  }

  ExprAst factor() {
    ExprAst base = atom();
    if (!accept(Token::Kind::Caret)) return base;
    bool negative = false;
    if (accept(Token::Kind::Minus))
      negative = true;
    else
      accept(Token::Kind::Plus);
    const Token& t = peek();
    expect(Token::Kind::Number, "an integer exponent");
    require(rat_is_integer(t.value) && t.value.get_num().fits_sint_p(),
            ErrorKind::Config, "exponent must be an integer" + at_pos(t.pos));
    require(!negative || base.kind == ExprAst::Kind::E, ErrorKind::Config,
            "negative exponent requires the shift symbol E" + at_pos(t.pos));
    ExprAst out;
    out.kind = ExprAst::Kind::Pow;
    out.exponent = static_cast<int>(t.value.get_num().get_si());
    if (negative) out.exponent = -out.exponent;
    out.args.push_back(std::move(base));
    return out;
  }

  ExprAst atom() {
    const Token& t = get();
    ExprAst out;
    switch (t.kind) {
      case Token::Kind::Number:
        out.kind = ExprAst::Kind::Number;
        out.value = t.value;
        return out;
      case Token::Kind::Name:
        if (t.text == "s") {
          out.kind = ExprAst::Kind::S;
          return out;
        }
        if (t.text == "hbar") {
          out.kind = ExprAst::Kind::Hbar;
          return out;
        }
        if (t.text == "E") {
          out.kind = ExprAst::Kind::E;
          return out;
        }
        out.kind = t.text == "t" ? ExprAst::Kind::T : ExprAst::Kind::Tbar;
        expect(Token::Kind::LBracket, "'[' after " + t.text);
        {
          const Token& idx = peek();
          expect(Token::Kind::Number, "an index");
          require(rat_is_integer(idx.value) &&
                      idx.value.get_num().fits_sint_p(),
                  ErrorKind::Config,
                  "index must be an integer" + at_pos(idx.pos));
          out.index = static_cast<int>(idx.value.get_num().get_si());
        }
        expect(Token::Kind::RBracket, "']' after the index");
        return out;
      case Token::Kind::LParen: {
        ExprAst inner = expr();
        expect(Token::Kind::RParen, "')'");
        return inner;
      }
      default:
        fail(ErrorKind::Config, "expected a value" + at_pos(t.pos));
    }
  }

  std::vector<Token> tokens_;
  size_t cur_ = 0;
};

int prec(ExprAst::Kind k) {
  switch (k) {
    case ExprAst::Kind::Add:
    case ExprAst::Kind::Sub:
      return 1;
    case ExprAst::Kind::Mul:
      return 2;
    case ExprAst::Kind::Pow:
      return 3;
    default:
      return 4;
  }
}

// parent is the minimal precedence that may appear unparenthesized in
// this slot; the right operand of a binary node demands one level more
// than the node itself so explicit right association survives the round
// trip.
void print_to(const ExprAst& a, int parent, std::string* out) {
  bool wrap = prec(a.kind) < parent;
  if (wrap) out->push_back('(');
  switch (a.kind) {
    case ExprAst::Kind::Number:
      *out += rat_str(a.value);
      break;
    case ExprAst::Kind::S:
      *out += "s";
      break;
    case ExprAst::Kind::Hbar:
      *out += "hbar";
      break;
    case ExprAst::Kind::E:
      *out += "E";
      break;
    case ExprAst::Kind::T:
      *out += "t[" + std::to_string(a.index) + "]";
      break;
    case ExprAst::Kind::Tbar:
      *out += "tbar[" + std::to_string(a.index) + "]";
      break;
    case ExprAst::Kind::Add:
      print_to(a.args.at(0), 1, out);
      *out += " + ";
      print_to(a.args.at(1), 2, out);
      break;
    case ExprAst::Kind::Sub:
      print_to(a.args.at(0), 1, out);
      *out += " - ";
      print_to(a.args.at(1), 2, out);
      break;
    case ExprAst::Kind::Mul:
      print_to(a.args.at(0), 2, out);
      *out += "*";
      print_to(a.args.at(1), 3, out);
      break;
    case ExprAst::Kind::Pow:
      print_to(a.args.at(0), 4, out);
      *out += "^" + std::to_string(a.exponent);
      break;
  }
  if (wrap) out->push_back(')');
}

}  // namespace

bool ExprAst::operator==(const ExprAst& o) const {
  return kind == o.kind && value == o.value && index == o.index &&
         exponent == o.exponent && args == o.args;
}

ExprAst parse_expr(const std::string& source) {
  return Parser(lex(source)).run();
}

std::string print_expr(const ExprAst& ast) {
  std::string out;
  print_to(ast, 1, &out);
  return out;
}

HSymbol compile_expr(const ExprAst& ast, const Truncation& tr,
                     const RingConfig& cfg) {
  switch (ast.kind) {
    case ExprAst::Kind::Number:
      return HSymbol::constant(tr, cfg, ast.value);
    case ExprAst::Kind::S:
      return HSymbol::from_scalar(tr, cfg, ScalarPoly::s_var(cfg));
    case ExprAst::Kind::Hbar:
      require(tr.n_hbar >= 1, ErrorKind::Window,
              "hbar requires an hbar order of at least 1");
      return HSymbol::from_scalar(tr, cfg, ScalarPoly::one(cfg), 1);
    case ExprAst::Kind::E:
      return HSymbol::xi_pow(tr, cfg, 1);
    case ExprAst::Kind::T:
      return HSymbol::from_scalar(tr, cfg, ScalarPoly::t_var(cfg, ast.index));
    case ExprAst::Kind::Tbar:
      return HSymbol::from_scalar(tr, cfg,
                                  ScalarPoly::tbar_var(cfg, ast.index));
    case ExprAst::Kind::Add:
      return compile_expr(ast.args.at(0), tr, cfg) +
             compile_expr(ast.args.at(1), tr, cfg);
    case ExprAst::Kind::Sub:
      return compile_expr(ast.args.at(0), tr, cfg) -
             compile_expr(ast.args.at(1), tr, cfg);
    case ExprAst::Kind::Mul:
      return circ(compile_expr(ast.args.at(0), tr, cfg),
                  compile_expr(ast.args.at(1), tr, cfg));
    case ExprAst::Kind::Pow: {
      const ExprAst& base = ast.args.at(0);
      if (base.kind == ExprAst::Kind::E) {
        require(ast.exponent >= tr.xi_lo && ast.exponent <= tr.xi_hi,
                ErrorKind::Window,
                "shift power E^" + std::to_string(ast.exponent) +
                    " falls outside the window");
        return HSymbol::xi_pow(tr, cfg, ast.exponent);
      }
      require(ast.exponent >= 0, ErrorKind::Config,
              "negative exponent requires the shift symbol E");
      HSymbol acc = HSymbol::one(tr, cfg);
      HSymbol b = compile_expr(base, tr, cfg);
      for (int k = 0; k < ast.exponent; ++k) acc = circ(acc, b);
      return acc;
    }
  }
  fail(ErrorKind::Internal, "unhandled expression node");
}

HSymbol compile_expr(const std::string& source, const Truncation& tr,
                     const RingConfig& cfg) {
  return compile_expr(parse_expr(source), tr, cfg);
}

}  // namespace hexp
