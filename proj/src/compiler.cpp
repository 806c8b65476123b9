#include "mapind/compiler.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "mapind/errors.hpp"

namespace mapind {

Formula Formula::variable(std::string name) {
  Formula f;
  f.kind = Kind::kVariable;
  f.name = std::move(name);
  return f;
}

Formula Formula::negation(Formula operand) {
  Formula f;
  f.kind = Kind::kNot;
  f.children.push_back(std::move(operand));
  return f;
}

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  Formula f;
  f.kind = Kind::kAnd;
  f.children.push_back(std::move(lhs));
  f.children.push_back(std::move(rhs));
  return f;
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  Formula f;
  f.kind = Kind::kOr;
  f.children.push_back(std::move(lhs));
  f.children.push_back(std::move(rhs));
  return f;
}

std::vector<std::string> Formula::variables() const {
  std::vector<std::string> out;
  std::function<void(const Formula&)> walk = [&](const Formula& f) {
    if (f.kind == Kind::kVariable) {
      if (std::find(out.begin(), out.end(), f.name) == out.end()) out.push_back(f.name);
      return;
    }
    for (const auto& c : f.children) walk(c);
  };
  walk(*this);
  return out;
}

bool Formula::evaluate(const std::vector<std::string>& vars, const std::vector<bool>& values) const {
  switch (kind) {
    case Kind::kVariable: {
      auto it = std::find(vars.begin(), vars.end(), name);
      if (it == vars.end()) throw QueryError("no value for formula variable '" + name + "'");
      return values[static_cast<std::size_t>(it - vars.begin())];
    }
    case Kind::kNot: return !children[0].evaluate(vars, values);
    case Kind::kAnd: return children[0].evaluate(vars, values) && children[1].evaluate(vars, values);
    case Kind::kOr: return children[0].evaluate(vars, values) || children[1].evaluate(vars, values);
  }
  return false;
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Formula parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty formula", pos_);
    Formula f = expr();
    skip_space();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return f;
  }

 private:
  Formula expr() {
    Formula lhs = term();
    while (accept("|", "\xE2\x88\xA8")) lhs = Formula::disjunction(std::move(lhs), term());
    return lhs;
  }

  Formula term() {
    Formula lhs = factor();
    while (accept("&", "\xE2\x88\xA7")) lhs = Formula::conjunction(std::move(lhs), factor());
    return lhs;
  }

  Formula factor() {
    skip_space();
    if (accept("!", "\xC2\xAC")) return Formula::negation(factor());
    if (accept("(", nullptr)) {
      Formula inner = expr();
      if (!accept(")", nullptr)) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (pos_ == text_.size()) throw ParseError("unexpected end of formula", pos_);
    const char c = text_[pos_];
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) {
      throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return Formula::variable(text_.substr(start, pos_ - start));
  }

  bool accept(const char* ascii, const char* utf8) {
    skip_space();
    for (const char* tok : {ascii, utf8}) {
      if (tok == nullptr) continue;
      const std::string t(tok);
      if (text_.compare(pos_, t.size(), t) == 0) {
        pos_ += t.size();
        return true;
      }
    }
    return false;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::kOr: return 1;
    case Formula::Kind::kAnd: return 2;
    default: return 3;
  }
}

void print_into(const Formula& f, std::string& out) {
  switch (f.kind) {
    case Formula::Kind::kVariable:
      out += f.name;
      return;
    case Formula::Kind::kNot: {
      out += '!';
      const bool paren = f.children[0].kind == Formula::Kind::kAnd || f.children[0].kind == Formula::Kind::kOr;
      if (paren) out += '(';
      print_into(f.children[0], out);
      if (paren) out += ')';
      return;
    }
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr: {
      const int p = precedence(f.kind);
      const auto& lhs = f.children[0];
      const auto& rhs = f.children[1];
      const bool lparen = precedence(lhs.kind) < p;
      // Same-operator chains nest to the left, so a right operand of equal
      // precedence needs parentheses to survive a round trip.
      const bool rparen = precedence(rhs.kind) <= p;
      if (lparen) out += '(';
      print_into(lhs, out);
      if (lparen) out += ')';
      out += f.kind == Formula::Kind::kAnd ? " & " : " | ";
      if (rparen) out += '(';
      print_into(rhs, out);
      if (rparen) out += ')';
      return;
    }
  }
}

const std::vector<std::vector<double>> kUniform = {{0.5, 0.5}};

// Row for a deterministic node: T with probability 1 iff `value`.
std::vector<double> truth_row(bool value) { return value ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0}; }

const char* op_prefix(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::kNot: return "not";
    case Formula::Kind::kAnd: return "and";
    case Formula::Kind::kOr: return "or";
    default: return "id";
  }
}

}  // namespace

Formula parse_formula(const std::string& text) { return Parser(text).parse(); }

std::string print_formula(const Formula& f) {
  std::string out;
  print_into(f, out);
  return out;
}

std::uint64_t count_models(const Formula& f) {
  const auto vars = f.variables();
  if (vars.size() > kModelCountLimit) {
    throw CapacityError("model counting is limited to " + std::to_string(kModelCountLimit) +
                        " variables; formula has " + std::to_string(vars.size()));
  }
  std::uint64_t count = 0;
  std::vector<bool> values(vars.size());
  const std::uint64_t total = std::uint64_t{1} << vars.size();
  for (std::uint64_t m = 0; m < total; ++m) {
    for (std::size_t i = 0; i < vars.size(); ++i) values[i] = (m >> (vars.size() - 1 - i)) & 1U;
    if (f.evaluate(vars, values)) ++count;
  }
  return count;
}

CompiledInstance compile_network(const Formula& f) {
  CompiledInstance inst;
  inst.variable_nodes = f.variables();
  const std::set<std::string> taken(inst.variable_nodes.begin(), inst.variable_nodes.end());

  std::vector<Variable> variables;
  std::vector<Cpt> cpts;
  for (const auto& name : inst.variable_nodes) {
    variables.push_back({name, {"T", "F"}});
    cpts.push_back({name, {}, kUniform});
  }

  std::size_t preorder = 0;
  auto fresh_name = [&](Formula::Kind kind) {
    std::string name = std::string(op_prefix(kind)) + "_" + std::to_string(++preorder);
    while (taken.count(name)) name = "op_" + name;
    return name;
  };
  auto add_node = [&](const std::string& name, std::vector<std::string> parents,
                      std::vector<std::vector<double>> rows) {
    variables.push_back({name, {"T", "F"}});
    cpts.push_back({name, std::move(parents), std::move(rows)});
  };

  // Returns the node carrying the value of `g`. Operator nodes are numbered
  // before their operands (preorder).
  std::function<std::string(const Formula&)> build = [&](const Formula& g) -> std::string {
    if (g.kind == Formula::Kind::kVariable) return g.name;
    const std::string name = fresh_name(g.kind);
    if (g.kind == Formula::Kind::kNot) {
      const std::string child = build(g.children[0]);
      add_node(name, {child}, {truth_row(false), truth_row(true)});
      return name;
    }
    const std::string lhs = build(g.children[0]);
    const std::string rhs = build(g.children[1]);
    const bool is_and = g.kind == Formula::Kind::kAnd;
    auto op = [is_and](bool a, bool b) { return is_and ? (a && b) : (a || b); };
    if (lhs == rhs) {
      // x & x, x | x: a single parent; the CPT is op(x, x).
      add_node(name, {lhs}, {truth_row(op(true, true)), truth_row(op(false, false))});
    } else {
      add_node(name, {lhs, rhs},
               {truth_row(op(true, true)), truth_row(op(true, false)), truth_row(op(false, true)),
                truth_row(op(false, false))});
    }
    return name;
  };

  if (f.kind == Formula::Kind::kVariable) {
    inst.phi_node = fresh_name(Formula::Kind::kVariable);
    add_node(inst.phi_node, {f.name}, {truth_row(true), truth_row(false)});
  } else {
    inst.phi_node = build(f);
  }

  // Operator nodes were appended after their operands were built, so sort
  // them back into preorder for a readable declaration order.
  std::vector<std::size_t> op_order(variables.size() - inst.variable_nodes.size());
  for (std::size_t i = 0; i < op_order.size(); ++i) op_order[i] = inst.variable_nodes.size() + i;
  auto index_of = [&](std::size_t i) {
    const std::string& n = variables[i].name;
    return std::stoul(n.substr(n.rfind('_') + 1));
  };
  std::stable_sort(op_order.begin(), op_order.end(),
                   [&](std::size_t a, std::size_t b) { return index_of(a) < index_of(b); });
  std::vector<Variable> ordered_vars(variables.begin(), variables.begin() + static_cast<std::ptrdiff_t>(inst.variable_nodes.size()));
  std::vector<Cpt> ordered_cpts(cpts.begin(), cpts.begin() + static_cast<std::ptrdiff_t>(inst.variable_nodes.size()));
  for (std::size_t i : op_order) {
    ordered_vars.push_back(variables[i]);
    ordered_cpts.push_back(cpts[i]);
  }

  inst.network = Network("B_phi", std::move(ordered_vars), std::move(ordered_cpts));
  return inst;
}

CompiledInstance build_amajsat_instance(const Formula& f, const std::vector<std::string>& a_set) {
  const auto vars = f.variables();
  if (a_set.empty()) throw QueryError("the A partition must be non-empty");
  std::set<std::string> seen;
  for (const auto& a : a_set) {
    if (std::find(vars.begin(), vars.end(), a) == vars.end()) {
      throw QueryError("'" + a + "' is not a variable of the formula");
    }
    if (!seen.insert(a).second) throw QueryError("'" + a + "' listed twice in the A partition");
  }
  if (a_set.size() >= vars.size()) {
    throw QueryError("the A partition must be a proper subset of the formula's variables");
  }
  CompiledInstance inst = compile_network(f);
  ThresholdQuery q;
  q.h_star[inst.phi_node] = "T";
  q.focus = a_set;
  q.s = Rational::inverse_power_of_two(static_cast<unsigned>(a_set.size() + 1));
  inst.query = std::move(q);
  return inst;
}

}  // namespace mapind
