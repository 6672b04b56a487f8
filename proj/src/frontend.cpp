#include "clhavoc/frontend.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace clhavoc {

namespace {

enum class Tok {
  Ident, Int, LBrace, RBrace, LParen, RParen, LBrack, RBrack, Lt, Gt, Comma, Semi, Dot, DotDot,
  Colon, Star, Eq, Neq, LArrow, RArrow, Minus, Plus, Entails, End
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') ++line, col = 1;
      else ++col;
      ++i;
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < s.size() && s[i + 1] == '/')) {
      while (i < s.size() && s[i] != '\n') adv(1);
      continue;
    }
    int l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '$' || s[j] == '\''))
        ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), l, cl});
      adv(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Int, s.substr(i, j - i), l, cl});
      adv(j - i);
      continue;
    }
    auto two = s.substr(i, 2);
    Tok k;
    size_t n = 2;
    if (two == "..") k = Tok::DotDot;
    else if (two == "!=") k = Tok::Neq;
    else if (two == "<-") k = Tok::LArrow;
    else if (two == "->") k = Tok::RArrow;
    else if (two == "|=") k = Tok::Entails;
    else {
      n = 1;
      switch (c) {
        case '{': k = Tok::LBrace; break;
        case '}': k = Tok::RBrace; break;
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case '[': k = Tok::LBrack; break;
        case ']': k = Tok::RBrack; break;
        case '<': k = Tok::Lt; break;
        case '>': k = Tok::Gt; break;
        case ',': k = Tok::Comma; break;
        case ';': k = Tok::Semi; break;
        case '.': k = Tok::Dot; break;
        case ':': k = Tok::Colon; break;
        case '*': k = Tok::Star; break;
        case '=': k = Tok::Eq; break;
        case '-': k = Tok::Minus; break;
        case '+': k = Tok::Plus; break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
      }
    }
    out.push_back({k, s.substr(i, n), l, cl});
    adv(n);
  }
  out.push_back({Tok::End, "end of input", line, col});
  return out;
}

const char* describe(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Dot: return "'.'";
    case Tok::DotDot: return "'..'";
    case Tok::Colon: return "':'";
    case Tok::Star: return "'*'";
    case Tok::Eq: return "'='";
    case Tok::Neq: return "'!='";
    case Tok::LArrow: return "'<-'";
    case Tok::RArrow: return "'->'";
    case Tok::Minus: return "'-'";
    case Tok::Plus: return "'+'";
    case Tok::Entails: return "'|='";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct UseSite {
  int arity, line, col;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  SystemFile file() {
    SystemFile f;
    while (!at(Tok::End)) {
      const Token& t = expect(Tok::Ident);
      if (t.text == "behavior") {
        if (f.has_behavior) throw ParseError("second behavior block", t.line, t.col);
        f.has_behavior = true;
        f.sid.behavior = behavior();
      } else if (t.text == "sid") {
        sid_block(f.sid);
      } else if (t.text == "config") {
        f.configs.push_back(config());
      } else if (t.text == "query") {
        f.queries.push_back(query());
      } else {
        throw ParseError("expected behavior, sid, config or query, got '" + t.text + "'", t.line, t.col);
      }
    }
    check(f);
    return f;
  }

  Formula lone_formula() {
    Formula f = formula();
    expect(Tok::End);
    return f;
  }

 private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(const char* w) const { return at(Tok::Ident) && peek().text == w; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  const Token& expect(Tok k) {
    if (!at(k)) {
      const Token& t = peek();
      throw ParseError(std::string("expected ") + describe(k) + ", got " +
                           (t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'"),
                       t.line, t.col);
    }
    return next();
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  void expect_word(const char* w) {
    const Token& t = expect(Tok::Ident);
    if (t.text != w) throw ParseError(std::string("expected '") + w + "', got '" + t.text + "'", t.line, t.col);
  }

  std::vector<std::string> ident_list() {
    std::vector<std::string> out;
    if (at(Tok::Semi)) return out;
    out.push_back(expect(Tok::Ident).text);
    while (accept(Tok::Comma)) out.push_back(expect(Tok::Ident).text);
    return out;
  }

  Behavior behavior() {
    Behavior b;
    expect(Tok::LBrace);
    while (!accept(Tok::RBrace)) {
      const Token& t = expect(Tok::Ident);
      if (t.text == "ports") {
        for (auto& p : ident_list()) b.ports.push_back(p);
      } else if (t.text == "states") {
        for (auto& q : ident_list()) b.states.push_back(q);
      } else if (t.text == "trans") {
        Transition tr;
        tr.from = expect(Tok::Ident).text;
        expect(Tok::Minus);
        tr.port = expect(Tok::Ident).text;
        expect(Tok::RArrow);
        tr.to = expect(Tok::Ident).text;
        b.transitions.push_back(tr);
      } else {
        throw ParseError("expected ports, states or trans, got '" + t.text + "'", t.line, t.col);
      }
      expect(Tok::Semi);
    }
    return b;
  }

  // ---- index expressions for parameterised predicate names

  int expr(const std::map<std::string, int>& env) {
    int v = term(env);
    while (at(Tok::Plus) || at(Tok::Minus)) {
      bool plus = next().kind == Tok::Plus;
      int w = term(env);
      v = plus ? v + w : v - w;
    }
    return v;
  }

  int term(const std::map<std::string, int>& env) {
    if (at(Tok::Int)) return std::stoi(next().text);
    if (accept(Tok::LParen)) {
      int v = expr(env);
      expect(Tok::RParen);
      return v;
    }
    const Token& t = expect(Tok::Ident);
    if ((t.text == "max" || t.text == "min") && at(Tok::LParen)) {
      next();
      int a = expr(env);
      expect(Tok::Comma);
      int b = expr(env);
      expect(Tok::RParen);
      return t.text == "max" ? std::max(a, b) : std::min(a, b);
    }
    auto it = env.find(t.text);
    if (it == env.end()) throw ParseError("unknown index variable '" + t.text + "'", t.line, t.col);
    return it->second;
  }

  std::string indexed_name(const std::string& base, const std::map<std::string, int>& env) {
    std::string name = base;
    if (!accept(Tok::LBrack)) return name;
    do {
      const Token& t = peek();
      int v = expr(env);
      if (v < 0) throw ParseError("negative index", t.line, t.col);
      name += "_" + std::to_string(v);
    } while (accept(Tok::Comma));
    expect(Tok::RBrack);
    return name;
  }

  // ---- formulas

  Var var() { return Var::named(expect(Tok::Ident).text); }

  Formula formula() { return formula_env({}); }

  Formula formula_env(const std::map<std::string, int>& env) {
    if (at_word("exists")) {
      next();
      std::vector<Var> vs{var()};
      while (accept(Tok::Comma)) vs.push_back(var());
      expect(Tok::Dot);
      return exists(std::move(vs), formula_env(env));
    }
    std::vector<Formula> parts{atom(env)};
    while (accept(Tok::Star)) {
      if (at_word("exists")) {
        parts.push_back(formula_env(env));
        break;
      }
      parts.push_back(atom(env));
    }
    return sep(std::move(parts));
  }

  void use_port(const Token& t) { ports_used_.push_back(t); }
  void use_state(const Token& t) { states_used_.push_back(t); }

  Formula atom(const std::map<std::string, int>& env) {
    if (accept(Tok::LParen)) {
      Formula f = formula_env(env);
      expect(Tok::RParen);
      return f;
    }
    if (accept(Tok::Lt)) {
      std::vector<VarPort> bs;
      do {
        Var v = var();
        expect(Tok::Dot);
        const Token& p = expect(Tok::Ident);
        use_port(p);
        bs.push_back({v, p.text});
      } while (accept(Tok::Comma));
      expect(Tok::Gt);
      return inter(std::move(bs));
    }
    const Token& t = expect(Tok::Ident);
    if (t.text == "emp") return emp();
    if ((t.text == "comp" || t.text == "state") && at(Tok::LParen)) {
      next();
      Var x = var();
      Formula f = t.text == "comp" ? comp(x) : emp();
      if (t.text == "state" || at(Tok::Colon)) {
        expect(Tok::Colon);
        const Token& q = expect(Tok::Ident);
        use_state(q);
        f = t.text == "comp" ? comp_in(x, q.text) : state(x, q.text);
      }
      expect(Tok::RParen);
      return f;
    }
    if (at(Tok::Eq)) {
      next();
      return eq(Var::named(t.text), var());
    }
    if (at(Tok::Neq)) {
      next();
      return neq(Var::named(t.text), var());
    }
    if (at(Tok::LParen) || at(Tok::LBrack)) {
      std::string name = indexed_name(t.text, env);
      expect(Tok::LParen);
      std::vector<Var> args;
      if (!at(Tok::RParen)) {
        args.push_back(var());
        while (accept(Tok::Comma)) args.push_back(var());
      }
      expect(Tok::RParen);
      uses_[name].push_back({static_cast<int>(args.size()), t.line, t.col});
      return pred(name, std::move(args));
    }
    throw ParseError("expected an atom after '" + t.text + "'", peek().line, peek().col);
  }

  // ---- rules

  void sid_block(Sid& sid) {
    expect(Tok::LBrace);
    while (!accept(Tok::RBrace)) rule_template(sid);
  }

  void rule_template(Sid& sid) {
    const Token& head = expect(Tok::Ident);
    // ranges h=0..2 turn the rule into a family; a plain index list is a constant name
    std::vector<std::tuple<std::string, int, int>> ranges;
    size_t after_head = pos_;
    bool has_ranges = false;
    if (at(Tok::LBrack) && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Eq) {
      has_ranges = true;
      next();
      do {
        std::string v = expect(Tok::Ident).text;
        expect(Tok::Eq);
        int lo = expr({});
        expect(Tok::DotDot);
        int hi = expr({});
        ranges.emplace_back(v, lo, hi);
      } while (accept(Tok::Comma));
      expect(Tok::RBrack);
      after_head = pos_;
    }
    std::vector<std::map<std::string, int>> envs{{}};
    for (const auto& [v, lo, hi] : ranges) {
      std::vector<std::map<std::string, int>> next_envs;
      for (const auto& e : envs)
        for (int x = lo; x <= hi; ++x) {
          auto e2 = e;
          e2[v] = x;
          next_envs.push_back(e2);
        }
      envs = std::move(next_envs);
    }
    size_t end_pos = pos_;
    for (const auto& env : envs) {
      pos_ = after_head;
      std::string name;
      if (has_ranges) {
        name = head.text;
        for (const auto& [v, lo, hi] : ranges) name += "_" + std::to_string(env.at(v));
      } else {
        name = indexed_name(head.text, env);
      }
      sid.rules.push_back(rule_rest(name, head, env));
      end_pos = pos_;
    }
    pos_ = end_pos;
  }

  Rule rule_rest(const std::string& name, const Token& head, const std::map<std::string, int>& env) {
    Rule r;
    r.pred = name;
    r.line = head.line;
    expect(Tok::LParen);
    std::vector<Var> raw;
    if (!at(Tok::RParen)) {
      raw.push_back(var());
      while (accept(Tok::Comma)) raw.push_back(var());
    }
    expect(Tok::RParen);
    expect(Tok::LArrow);
    const Token& body_start = peek();
    Formula body = formula_env(env);
    expect(Tok::Semi);
    // a repeated head parameter becomes a fresh one plus an equality
    std::set<Var> taken = free_vars(body);
    taken.insert(raw.begin(), raw.end());
    std::vector<Formula> eqs;
    std::set<Var> seen;
    for (auto& v : raw) {
      if (seen.insert(v).second) {
        r.params.push_back(v);
        continue;
      }
      Var w;
      for (int k = static_cast<int>(r.params.size()) + 1;; ++k) {
        w = Var::named(v.name + "_" + std::to_string(k));
        if (!taken.count(w)) break;
      }
      taken.insert(w);
      seen.insert(w);
      r.params.push_back(w);
      eqs.push_back(eq(v, w));
    }
    if (!eqs.empty()) {
      eqs.push_back(std::move(body));
      body = sep(std::move(eqs));
    }
    r.body = std::move(body);
    std::set<Var> ps(r.params.begin(), r.params.end());
    for (const auto& v : free_vars(r.body))
      if (!ps.count(v))
        throw ParseError("variable '" + v.str() + "' is neither a parameter nor quantified", body_start.line,
                         body_start.col);
    defs_.emplace(name, UseSite{static_cast<int>(r.params.size()), head.line, head.col});
    return r;
  }

  // ---- configurations and queries

  ConfigBlock config() {
    ConfigBlock c;
    c.name = expect(Tok::Ident).text;
    std::map<std::string, int> ids;
    auto id_of = [&](const std::string& n) {
      auto it = ids.find(n);
      if (it != ids.end()) return ComponentId{it->second};
      c.names.push_back(n);
      ids[n] = static_cast<int>(c.names.size());
      return ComponentId{static_cast<int>(c.names.size())};
    };
    std::set<ComponentId> comps;
    std::set<Interaction> inters;
    std::map<ComponentId, State> rho;
    const Token& open = expect(Tok::LBrace);
    while (!accept(Tok::RBrace)) {
      const Token& t = expect(Tok::Ident);
      if (t.text == "components") {
        for (auto& n : ident_list()) comps.insert(id_of(n));
      } else if (t.text == "interactions") {
        if (!at(Tok::Semi)) do {
            expect(Tok::Lt);
            Interaction i;
            do {
              ComponentId cid = id_of(expect(Tok::Ident).text);
              expect(Tok::Dot);
              const Token& p = expect(Tok::Ident);
              use_port(p);
              i.bindings.push_back({cid, p.text});
            } while (accept(Tok::Comma));
            expect(Tok::Gt);
            inters.insert(i);
          } while (accept(Tok::Comma));
      } else if (t.text == "states") {
        if (!at(Tok::Semi)) do {
            ComponentId cid = id_of(expect(Tok::Ident).text);
            expect(Tok::Colon);
            const Token& q = expect(Tok::Ident);
            use_state(q);
            rho[cid] = q.text;
          } while (accept(Tok::Comma));
      } else {
        throw ParseError("expected components, interactions or states, got '" + t.text + "'", t.line, t.col);
      }
      expect(Tok::Semi);
    }
    // ids follow the sorted names so that printing and re-reading is stable
    std::vector<std::string> sorted = c.names;
    std::sort(sorted.begin(), sorted.end());
    std::map<ComponentId, ComponentId> re;
    for (size_t k = 0; k < sorted.size(); ++k)
      re[ComponentId{ids[sorted[k]]}] = ComponentId{static_cast<int>(k) + 1};
    c.names = sorted;
    std::set<ComponentId> comps2;
    for (auto x : comps) comps2.insert(re.at(x));
    std::set<Interaction> inters2;
    for (auto i : inters) {
      for (auto& bd : i.bindings) bd.component = re.at(bd.component);
      inters2.insert(i);
    }
    std::map<ComponentId, State> rho2;
    for (const auto& [x, q] : rho) rho2[re.at(x)] = q;
    try {
      c.config = Configuration(std::move(comps2), std::move(inters2), std::move(rho2));
    } catch (const Error& e) {
      throw ParseError(std::string("config ") + c.name + ": " + e.what(), open.line, open.col);
    }
    return c;
  }

  Query query() {
    Query q;
    const Token& t = expect(Tok::Ident);
    if (t.text == "entail") {
      q.kind = Query::Kind::Entail;
      q.lhs = formula();
      expect(Tok::Entails);
      q.rhs = formula();
    } else if (t.text == "havoc") {
      q.kind = Query::Kind::Havoc;
      q.target = expect(Tok::Ident).text;
      query_preds_.push_back({q.target, t.line, t.col});
    } else if (t.text == "simulate") {
      q.kind = Query::Kind::Simulate;
      q.target = expect(Tok::Ident).text;
    } else {
      throw ParseError("expected entail, havoc or simulate, got '" + t.text + "'", t.line, t.col);
    }
    expect(Tok::Semi);
    return q;
  }

  void check(SystemFile& f) {
    const Behavior& b = f.sid.behavior;
    for (const auto& t : ports_used_)
      if (!b.has_port(t.text)) throw ParseError("undeclared port '" + t.text + "'", t.line, t.col);
    for (const auto& t : states_used_)
      if (!b.has_state(t.text)) throw ParseError("undeclared state '" + t.text + "'", t.line, t.col);
    try {
      b.validate();
    } catch (const Error& e) {
      throw ParseError(e.what(), 1, 1);
    }
    std::map<std::string, int> ar;
    for (const auto& r : f.sid.rules) {
      auto [it, fresh] = ar.emplace(r.pred, static_cast<int>(r.params.size()));
      if (!fresh && it->second != static_cast<int>(r.params.size())) {
        auto d = defs_.equal_range(r.pred);
        int line = r.line, col = 1;
        for (auto k = d.first; k != d.second; ++k)
          if (k->second.arity != it->second) line = k->second.line, col = k->second.col;
        throw ParseError("predicate " + r.pred + " defined with arities " + std::to_string(it->second) + " and " +
                             std::to_string(r.params.size()),
                         line, col);
      }
    }
    for (const auto& [name, sites] : uses_)
      for (const auto& s : sites) {
        auto it = ar.find(name);
        if (it == ar.end()) throw ParseError("undefined predicate " + name, s.line, s.col);
        if (it->second != s.arity)
          throw ParseError("predicate " + name + " has arity " + std::to_string(it->second) + ", used with " +
                               std::to_string(s.arity),
                           s.line, s.col);
      }
    for (const auto& s : query_preds_)
      if (!ar.count(s.name)) throw ParseError("undefined predicate " + s.name, s.line, s.col);
    std::set<std::string> names;
    for (const auto& c : f.configs)
      if (!names.insert(c.name).second) throw ParseError("duplicate config " + c.name, 1, 1);
  }

  struct NamedSite {
    std::string name;
    int line, col;
  };

  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<Token> ports_used_, states_used_;
  std::map<std::string, std::vector<UseSite>> uses_;
  std::multimap<std::string, UseSite> defs_;
  std::vector<NamedSite> query_preds_;
};

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (size_t k = 0; k < xs.size(); ++k) {
    if (k) s += ", ";
    s += xs[k];
  }
  return s;
}

}  // namespace

const ConfigBlock* SystemFile::config(const std::string& name) const {
  for (const auto& c : configs)
    if (c.name == name) return &c;
  return nullptr;
}

SystemFile parse_system(const std::string& text) { return Parser(text).file(); }

SystemFile parse_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

Formula parse_formula(const std::string& text) { return Parser(text).lone_formula(); }

std::string render(const Behavior& b) {
  std::ostringstream os;
  os << "behavior {\n";
  os << "  ports " << join(b.ports) << ";\n";
  os << "  states " << join(b.states) << ";\n";
  for (const auto& t : b.transitions) os << "  trans " << t.from << " -" << t.port << "-> " << t.to << ";\n";
  os << "}\n";
  return os.str();
}

std::string render(const Rule& r) {
  std::vector<std::string> ps;
  for (const auto& v : r.params) ps.push_back(v.str());
  return r.pred + "(" + join(ps) + ") <- " + render(r.body) + ";";
}

std::string render(const Sid& sid) {
  std::ostringstream os;
  os << render(sid.behavior) << "\nsid {\n";
  for (const auto& r : sid.rules) os << "  " << render(r) << "\n";
  os << "}\n";
  return os.str();
}

std::string render(const ConfigBlock& c) {
  auto nm = [&](ComponentId id) {
    return id.value >= 1 && id.value <= static_cast<int>(c.names.size()) ? c.names[id.value - 1] : to_string(id);
  };
  std::ostringstream os;
  os << "config " << c.name << " {\n  components";
  std::vector<std::string> xs;
  for (auto id : c.config.components()) xs.push_back(nm(id));
  if (!xs.empty()) os << " " << join(xs);
  os << ";\n  interactions";
  xs.clear();
  for (const auto& i : c.config.interactions()) {
    std::string s = "<";
    for (size_t k = 0; k < i.bindings.size(); ++k) {
      if (k) s += ", ";
      s += nm(i.bindings[k].component) + "." + i.bindings[k].port;
    }
    xs.push_back(s + ">");
  }
  if (!xs.empty()) os << " " << join(xs);
  os << ";\n  states";
  xs.clear();
  for (const auto& [id, q] : c.config.state_map()) xs.push_back(nm(id) + " : " + q);
  if (!xs.empty()) os << " " << join(xs);
  os << ";\n}\n";
  return os.str();
}

std::string render(const SystemFile& f) {
  std::ostringstream os;
  if (f.has_behavior) os << render(f.sid.behavior) << "\n";
  os << "sid {\n";
  for (const auto& r : f.sid.rules) os << "  " << render(r) << "\n";
  os << "}\n";
  for (const auto& c : f.configs) os << "\n" << render(c);
  if (!f.queries.empty()) os << "\n";
  for (const auto& q : f.queries) {
    switch (q.kind) {
      case Query::Kind::Entail: os << "query entail " << render(q.lhs) << " |= " << render(q.rhs) << ";\n"; break;
      case Query::Kind::Havoc: os << "query havoc " << q.target << ";\n"; break;
      case Query::Kind::Simulate: os << "query simulate " << q.target << ";\n"; break;
    }
  }
  return os.str();
}

}  // namespace clhavoc
