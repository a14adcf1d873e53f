#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "mcpert/errors.hpp"
#include "mcpert/scenario.hpp"
#include "mcpert/solver.hpp"

namespace mcpert {

namespace {

const std::vector<std::string> kFamilies = {"births", "deaths", "arrivals", "services", "catastrophes"};

bool is_family(std::string_view name) {
  return std::find(kFamilies.begin(), kFamilies.end(), name) != kFamilies.end();
}

struct Value {
  enum class Kind { scalar, string, list };
  Kind kind = Kind::scalar;
  std::string text;
  std::vector<Value> items;
};

struct Entry {
  std::string key;
  Value value;
  std::size_t offset = 0;
};

struct Section {
  std::string name;
  std::vector<Entry> entries;
  std::size_t offset = 0;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class ValueParser {
public:
  ValueParser(std::string_view src, std::size_t base, std::string ctx)
      : src_(src), base_(base), ctx_(std::move(ctx)) {}

  Value parse() {
    skip_ws();
    Value v = value(false);
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected text after value");
    return v;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(ctx_ + ": " + msg, base_ + pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
  }

  Value value(bool in_list) {
    if (pos_ >= src_.size()) fail("missing value");
    Value v;
    if (src_[pos_] == '"') {
      const auto close = src_.find('"', pos_ + 1);
      if (close == std::string_view::npos) fail("unterminated string");
      v.kind = Value::Kind::string;
      v.text = std::string(src_.substr(pos_ + 1, close - pos_ - 1));
      pos_ = close + 1;
      return v;
    }
    if (src_[pos_] == '[') {
      v.kind = Value::Kind::list;
      ++pos_;
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == ']') {
        ++pos_;
        return v;
      }
      for (;;) {
        skip_ws();
        v.items.push_back(value(true));
        skip_ws();
        if (pos_ >= src_.size()) fail("unterminated list");
        if (src_[pos_] == ']') {
          ++pos_;
          return v;
        }
        if (src_[pos_] != ',') fail("expected ',' or ']' in list");
        ++pos_;
      }
    }
    // Bare scalar: runs to the end, or to a top-level ',' / ']' inside a list.
    const std::size_t start = pos_;
    int depth = 0;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (in_list && depth == 0 && (c == ',' || c == ']')) break;
      if (c == '"' || c == '[') fail("unexpected character in bare value");
      ++pos_;
    }
    v.text = std::string(trim(src_.substr(start, pos_ - start)));
    if (v.text.empty()) fail("empty value");
    return v;
  }

  std::string_view src_;
  std::size_t base_;
  std::string ctx_;
  std::size_t pos_ = 0;
};

std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

std::vector<Section> tokenize(std::string_view text) {
  std::vector<Section> sections;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string raw = strip_comment(text.substr(pos, eol - pos));
    const std::string_view line = trim(raw);
    const std::size_t line_offset = pos;
    pos = eol + 1;
    if (line.empty()) continue;
    const bool header = line.front() == '[' && line.find('=') == std::string_view::npos;
    if (header) {
      if (line.back() != ']') throw ParseError("malformed section header", line_offset);
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (name.empty()) throw ParseError("empty section name", line_offset);
      sections.push_back({name, {}, line_offset});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_offset);
    if (sections.empty()) throw ParseError("key outside any section", line_offset);
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError("[" + sections.back().name + "] empty key", line_offset);
    const std::string ctx = "[" + sections.back().name + "] " + key;
    const std::string_view rhs = line.substr(eq + 1);
    const std::size_t rhs_offset = line_offset + static_cast<std::size_t>(rhs.data() - raw.data());
    Value v = ValueParser(rhs, rhs_offset, ctx).parse();
    sections.back().entries.push_back({key, std::move(v), line_offset});
  }
  return sections;
}

// Typed access with "[section] key" in every message.
class Reader {
public:
  Reader(const Section& s) : section_(s.name) {}

  std::string ctx(const std::string& key) const { return "[" + section_ + "] " + key; }
  [[noreturn]] void invalid(const std::string& key, const std::string& msg) const {
    throw ValidationError(ctx(key) + ": " + msg);
  }

  double number(const Entry& e) const {
    if (e.value.kind != Value::Kind::scalar) invalid(e.key, "expected a number");
    return parse_number(e.key, e.value.text);
  }

  double parse_number(const std::string& key, const std::string& text) const {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) invalid(key, "'" + text + "' is not a number");
    return v;
  }

  std::size_t count(const Entry& e) const { return to_count(e.key, e.value); }

  std::size_t to_count(const std::string& key, const Value& v) const {
    if (v.kind != Value::Kind::scalar) invalid(key, "expected a nonnegative integer");
    std::size_t n = 0;
    const char* end = v.text.data() + v.text.size();
    const auto [ptr, ec] = std::from_chars(v.text.data(), end, n);
    if (ec != std::errc() || ptr != end) invalid(key, "'" + v.text + "' is not a nonnegative integer");
    return n;
  }

  bool boolean(const Entry& e) const {
    if (e.value.kind == Value::Kind::scalar) {
      if (e.value.text == "true" || e.value.text == "yes" || e.value.text == "1") return true;
      if (e.value.text == "false" || e.value.text == "no" || e.value.text == "0") return false;
    }
    invalid(e.key, "expected true or false");
  }

  std::string text(const Entry& e) const {
    if (e.value.kind == Value::Kind::list) invalid(e.key, "expected a single value");
    return e.value.text;
  }

  std::vector<double> numbers(const Entry& e) const {
    if (e.value.kind != Value::Kind::list) invalid(e.key, "expected a list of numbers");
    std::vector<double> out;
    for (const auto& item : e.value.items) {
      if (item.kind != Value::Kind::scalar) invalid(e.key, "expected a list of numbers");
      out.push_back(parse_number(e.key, item.text));
    }
    return out;
  }

  std::vector<std::size_t> counts(const Entry& e) const {
    if (e.value.kind != Value::Kind::list) invalid(e.key, "expected a list of integers");
    std::vector<std::size_t> out;
    for (const auto& item : e.value.items) out.push_back(to_count(e.key, item));
    return out;
  }

private:
  std::string section_;
};

void parse_family_key(const Reader& r, const Entry& e, const std::string& fam, const std::string& attr,
                      FamilyConfig& f) {
  if (attr.empty()) {
    if (e.value.kind == Value::Kind::list) {
      f.listed = true;
      for (const auto& item : e.value.items) {
        if (item.kind == Value::Kind::list) r.invalid(e.key, "nested lists are not allowed");
        f.rates.push_back(item.text);
      }
      if (f.rates.empty()) r.invalid(e.key, "empty rate list");
    } else {
      f.rates = {e.value.text};
    }
  } else if (attr == "multipliers") {
    if (e.value.kind == Value::Kind::list) {
      f.multipliers = FamilyConfig::Multipliers::list;
      f.multiplier_list = r.numbers(e);
    } else {
      std::string t;
      for (char c : e.value.text)
        if (c != ' ' && c != '\t') t.push_back(c);
      if (t == "k") {
        f.multipliers = FamilyConfig::Multipliers::index;
      } else if (t.rfind("min(k,", 0) == 0 && t.back() == ')') {
        f.multipliers = FamilyConfig::Multipliers::capped_index;
        f.cap = r.parse_number(e.key, t.substr(6, t.size() - 7));
      } else {
        r.invalid(e.key, "expected k, min(k, c) or a list of numbers");
      }
    }
  } else if (attr == "first") {
    f.first = r.count(e);
  } else if (attr == "tail") {
    const std::string t = r.text(e);
    if (t == "zero")
      f.tail_zero = true;
    else if (t == "undefined")
      f.tail_zero = false;
    else
      r.invalid(e.key, "expected zero or undefined");
  } else {
    r.invalid(e.key, "unknown attribute of family " + fam);
  }
}

ChainConfig parse_chain(const Section& s) {
  Reader r(s);
  ChainConfig c;
  bool have_size = false;
  for (const auto& e : s.entries) {
    const auto dot = e.key.find('.');
    const std::string head = e.key.substr(0, dot);
    if (is_family(head)) {
      parse_family_key(r, e, head, dot == std::string::npos ? "" : e.key.substr(dot + 1), c.families[head]);
    } else if (e.key == "class") {
      c.chain_class = r.text(e);
      try {
        (void)chain_class_from_string(c.chain_class);
      } catch (const Error& err) {
        r.invalid(e.key, err.what());
      }
    } else if (e.key == "states" || e.key == "truncation") {
      if (have_size) r.invalid(e.key, "give exactly one of states or truncation");
      have_size = true;
      c.top = r.count(e);
      c.truncated = e.key == "truncation";
    } else if (e.key == "period") {
      c.period = r.number(e);
      if (!(*c.period > 0.0)) r.invalid(e.key, "period must be positive");
    } else if (e.key == "L") {
      c.L = r.number(e);
    } else if (e.key == "label") {
      c.label = r.text(e);
    } else if (e.key == "grid") {
      c.grid = r.count(e);
      if (c.grid == 0) r.invalid(e.key, "grid must be positive");
    } else if (e.key == "base") {
      c.base = r.text(e);
    } else if (e.key == "transition") {
      const auto& v = e.value;
      if (v.kind != Value::Kind::list || v.items.size() != 3)
        r.invalid(e.key, "expected [from, to, \"rate\"]");
      c.transitions.push_back({r.to_count(e.key, v.items[0]), r.to_count(e.key, v.items[1]), v.items[2].text});
    } else {
      r.invalid(e.key, "unknown key");
    }
  }
  if (!have_size) r.invalid("states", "missing (give states or truncation)");
  for (const auto& [name, f] : c.families)
    if (f.rates.empty()) r.invalid(name, "attributes given without rates");
  const bool v = chain_class_from_string(c.chain_class) == ChainClass::V;
  if (v && c.base.empty()) r.invalid("base", "class V needs a base class or 'transitions'");
  if (!v && !c.base.empty()) r.invalid("base", "only class V takes a base");
  if (!c.transitions.empty() && c.base != "transitions")
    r.invalid("transition", "transitions need class V with base = transitions");
  return c;
}

WeightsConfig parse_weights(const Section& s) {
  Reader r(s);
  WeightsConfig w;
  for (const auto& e : s.entries) {
    if (e.key == "kind") {
      w.kind = r.text(e);
      if (w.kind != "unit" && w.kind != "geometric" && w.kind != "list")
        r.invalid(e.key, "expected unit, geometric or list");
    } else if (e.key == "delta") {
      w.delta = r.number(e);
    } else if (e.key == "values") {
      w.values = r.numbers(e);
    } else {
      r.invalid(e.key, "unknown key");
    }
  }
  if (w.kind == "list" && w.values.empty()) r.invalid("values", "list weights need values");
  if (w.kind == "geometric" && !(w.delta >= 1.0)) r.invalid("delta", "geometric weights need delta >= 1");
  return w;
}

PerturbationConfig parse_perturbation(const Section& s) {
  Reader r(s);
  PerturbationConfig p;
  for (const auto& e : s.entries) {
    if (e.key == "mode") {
      p.mode = r.text(e);
      try {
        (void)perturbation_mode_from_string(p.mode);
      } catch (const Error& err) {
        r.invalid(e.key, err.what());
      }
    } else if (e.key == "epsilon") {
      p.epsilon = r.number(e);
      if (!(p.epsilon >= 0.0)) r.invalid(e.key, "epsilon must be nonnegative");
    } else if (e.key == "draws") {
      p.draws = r.count(e);
      if (p.draws == 0) r.invalid(e.key, "draws must be positive");
    } else if (e.key == "seed") {
      p.seed = r.count(e);
    } else if (e.key == "clamp_at_zero") {
      p.clamp_at_zero = r.boolean(e);
    } else if (is_family(e.key)) {
      p.offsets[e.key] = r.numbers(e);
    } else {
      r.invalid(e.key, "unknown key");
    }
  }
  if (!p.offsets.empty() && p.draws != 1) r.invalid("draws", "explicit offsets describe a single draw");
  return p;
}

SolveConfig parse_solve(const Section& s) {
  Reader r(s);
  SolveConfig c;
  for (const auto& e : s.entries) {
    if (e.key == "t_end") {
      c.t_end = r.number(e);
      if (!(c.t_end > 0.0)) r.invalid(e.key, "t_end must be positive");
    } else if (e.key == "step") {
      c.step = r.number(e);
      if (!(*c.step > 0.0)) r.invalid(e.key, "step must be positive");
    } else if (e.key == "stride") {
      c.stride = r.number(e);
      if (!(c.stride > 0.0)) r.invalid(e.key, "stride must be positive");
    } else if (e.key == "initial") {
      c.initial = r.counts(e);
    } else if (e.key == "tolerance") {
      c.tolerance = r.number(e);
      if (!(c.tolerance > 0.0)) r.invalid(e.key, "tolerance must be positive");
    } else if (e.key == "max_horizon") {
      c.max_horizon = r.number(e);
    } else if (e.key == "limit_start") {
      c.limit_start = r.number(e);
    } else if (e.key == "samples_per_period") {
      c.samples_per_period = r.count(e);
      if (c.samples_per_period == 0) r.invalid(e.key, "must be positive");
    } else if (e.key == "states") {
      c.states = r.counts(e);
    } else if (e.key == "probe_levels") {
      c.probe_levels = r.counts(e);
    } else if (e.key == "probe_epsilon") {
      c.probe_epsilon = r.number(e);
    } else {
      r.invalid(e.key, "unknown key");
    }
  }
  return c;
}

OutputsConfig parse_outputs(const Section& s) {
  Reader r(s);
  OutputsConfig o;
  for (const auto& e : s.entries) {
    if (e.key == "dir")
      o.dir = r.text(e);
    else if (e.key == "prefix")
      o.prefix = r.text(e);
    else if (e.key == "trajectories")
      o.trajectories = r.boolean(e);
    else if (e.key == "means")
      o.means = r.boolean(e);
    else if (e.key == "limit")
      o.limit = r.boolean(e);
    else if (e.key == "distance")
      o.distance = r.boolean(e);
    else if (e.key == "report")
      o.report = r.boolean(e);
    else
      r.invalid(e.key, "unknown key");
  }
  return o;
}

void reject_duplicates(const Section& s) {
  std::set<std::string> seen;
  for (const auto& e : s.entries)
    if (e.key != "transition" && !seen.insert(e.key).second)
      throw ValidationError("[" + s.name + "] " + e.key + ": duplicate key");
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string name) {
  Scenario sc;
  sc.name = std::move(name);
  std::set<std::string> seen;
  bool have_chain = false;
  for (const auto& s : tokenize(text)) {
    if (!seen.insert(s.name).second) throw ValidationError("[" + s.name + "]: duplicate section");
    reject_duplicates(s);
    if (s.name == "chain") {
      sc.chain = parse_chain(s);
      have_chain = true;
    } else if (s.name == "weights") {
      sc.weights = parse_weights(s);
    } else if (s.name == "perturbation") {
      sc.perturbation = parse_perturbation(s);
    } else if (s.name == "solve") {
      sc.solve = parse_solve(s);
    } else if (s.name == "outputs") {
      sc.outputs = parse_outputs(s);
    } else {
      throw ValidationError("[" + s.name + "]: unknown section");
    }
  }
  if (!have_chain) throw ValidationError("[chain]: missing section");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  return parse_scenario(ss.str(), name);
}

namespace {

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

template <class T, class F>
std::string list_of(const std::vector<T>& xs, F fmt) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
  return out + "]";
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string to_canonical(const Scenario& s) {
  std::ostringstream os;
  const auto num = [](double v) { return format_double(v); };
  const auto idx = [](std::size_t v) { return std::to_string(v); };
  const auto& c = s.chain;
  os << "[chain]\n";
  os << "class = " << c.chain_class << '\n';
  os << (c.truncated ? "truncation = " : "states = ") << c.top << '\n';
  if (c.period) os << "period = " << num(*c.period) << '\n';
  if (c.L) os << "L = " << num(*c.L) << '\n';
  if (!c.label.empty()) os << "label = " << quoted(c.label) << '\n';
  os << "grid = " << c.grid << '\n';
  if (!c.base.empty()) os << "base = " << c.base << '\n';
  for (const auto& [name, f] : c.families) {
    os << name << " = " << (f.listed ? list_of(f.rates, quoted) : quoted(f.rates.front())) << '\n';
    switch (f.multipliers) {
      case FamilyConfig::Multipliers::none:
        break;
      case FamilyConfig::Multipliers::index:
        os << name << ".multipliers = k\n";
        break;
      case FamilyConfig::Multipliers::capped_index:
        os << name << ".multipliers = min(k, " << num(f.cap) << ")\n";
        break;
      case FamilyConfig::Multipliers::list:
        os << name << ".multipliers = " << list_of(f.multiplier_list, num) << '\n';
        break;
    }
    if (f.first) os << name << ".first = " << *f.first << '\n';
    if (f.tail_zero) os << name << ".tail = " << (*f.tail_zero ? "zero" : "undefined") << '\n';
  }
  for (const auto& t : c.transitions)
    os << "transition = [" << t.from << ", " << t.to << ", " << quoted(t.rate) << "]\n";

  if (s.weights) {
    os << "\n[weights]\nkind = " << s.weights->kind << '\n';
    os << "delta = " << num(s.weights->delta) << '\n';
    if (!s.weights->values.empty()) os << "values = " << list_of(s.weights->values, num) << '\n';
  }
  if (s.perturbation) {
    const auto& p = *s.perturbation;
    os << "\n[perturbation]\nmode = " << p.mode << '\n';
    os << "epsilon = " << num(p.epsilon) << '\n';
    os << "draws = " << p.draws << '\n';
    os << "seed = " << p.seed << '\n';
    os << "clamp_at_zero = " << bool_text(p.clamp_at_zero) << '\n';
    for (const auto& [name, v] : p.offsets) os << name << " = " << list_of(v, num) << '\n';
  }
  if (s.solve) {
    const auto& v = *s.solve;
    os << "\n[solve]\nt_end = " << num(v.t_end) << '\n';
    if (v.step) os << "step = " << num(*v.step) << '\n';
    os << "stride = " << num(v.stride) << '\n';
    if (!v.initial.empty()) os << "initial = " << list_of(v.initial, idx) << '\n';
    os << "tolerance = " << num(v.tolerance) << '\n';
    os << "max_horizon = " << num(v.max_horizon) << '\n';
    if (v.limit_start) os << "limit_start = " << num(*v.limit_start) << '\n';
    os << "samples_per_period = " << v.samples_per_period << '\n';
    if (!v.states.empty()) os << "states = " << list_of(v.states, idx) << '\n';
    if (!v.probe_levels.empty()) os << "probe_levels = " << list_of(v.probe_levels, idx) << '\n';
    os << "probe_epsilon = " << num(v.probe_epsilon) << '\n';
  }
  const auto& o = s.outputs;
  os << "\n[outputs]\ndir = " << quoted(o.dir) << '\n';
  if (!o.prefix.empty()) os << "prefix = " << quoted(o.prefix) << '\n';
  os << "trajectories = " << bool_text(o.trajectories) << '\n';
  os << "means = " << bool_text(o.means) << '\n';
  os << "limit = " << bool_text(o.limit) << '\n';
  os << "distance = " << bool_text(o.distance) << '\n';
  os << "report = " << bool_text(o.report) << '\n';
  return os.str();
}

namespace {

RateFunction rate_of(const std::string& text, const ChainConfig& c, const std::string& ctx) {
  try {
    RateFunction r = parse_rate(text);
    return c.period ? r.with_period(*c.period) : r;
  } catch (const ParseError& e) {
    throw ParseError(ctx + ": " + e.what(), e.offset());
  }
}

RateFamily family_of(const ChainConfig& c, const std::string& name, std::size_t default_first) {
  const auto it = c.families.find(name);
  if (it == c.families.end()) return RateFamily::zero();
  const FamilyConfig& f = it->second;
  const std::string ctx = "[chain] " + name;
  const std::size_t first = f.first.value_or(default_first);
  const auto tail = f.tail_zero.value_or(true) ? RateFamily::Tail::zero : RateFamily::Tail::undefined;
  std::vector<RateFunction> rates;
  for (const auto& r : f.rates) rates.push_back(rate_of(r, c, ctx));
  if (f.listed) {
    if (f.multipliers != FamilyConfig::Multipliers::none)
      throw ValidationError(ctx + ".multipliers: not allowed with a rate list");
    return RateFamily::listed(std::move(rates), first, tail);
  }
  if (f.multipliers == FamilyConfig::Multipliers::none) return RateFamily::uniform(rates.front(), first);
  std::vector<double> m;
  if (f.multipliers == FamilyConfig::Multipliers::list) {
    m = f.multiplier_list;
  } else {
    for (std::size_t k = first; k <= std::max(c.top, first); ++k) {
      const double kk = static_cast<double>(k);
      m.push_back(f.multipliers == FamilyConfig::Multipliers::index ? kk : std::min(kk, f.cap));
    }
  }
  return RateFamily::scaled(rates.front(), std::move(m), first, tail);
}

void require_families(const ChainConfig& c, ChainClass cls, bool with_catastrophes) {
  std::set<std::string> allowed;
  switch (cls) {
    case ChainClass::I:
      allowed = {"births", "deaths"};
      break;
    case ChainClass::II:
      allowed = {"arrivals", "deaths"};
      break;
    case ChainClass::III:
      allowed = {"births", "services"};
      break;
    case ChainClass::IV:
      allowed = {"arrivals", "services"};
      break;
    case ChainClass::V:
      break;
  }
  if (with_catastrophes) allowed.insert("catastrophes");
  for (const auto& [name, f] : c.families)
    if (!allowed.count(name))
      throw ValidationError("[chain] " + name + ": not used by class " + std::string(to_string(cls)) +
                            (with_catastrophes ? " with catastrophes" : ""));
}

ChainSpec build_base(const ChainConfig& c, ChainClass cls, StateSpace space, const BuildOptions& opts) {
  switch (cls) {
    case ChainClass::I:
      return build_class_I(family_of(c, "births", 0), family_of(c, "deaths", 1), space, opts);
    case ChainClass::II:
      return build_class_II(family_of(c, "arrivals", 1), family_of(c, "deaths", 1), space, opts);
    case ChainClass::III:
      return build_class_III(family_of(c, "births", 0), family_of(c, "services", 1), space, opts);
    case ChainClass::IV:
      return build_class_IV(family_of(c, "arrivals", 1), family_of(c, "services", 1), space, opts);
    case ChainClass::V:
      break;
  }
  throw ValidationError("[chain] base: class V cannot be a base");
}

}  // namespace

ChainSpec build_chain(const Scenario& s) {
  const ChainConfig& c = s.chain;
  const StateSpace space = c.truncated ? StateSpace::truncated(c.top) : StateSpace::finite(c.top);
  BuildOptions opts;
  opts.L = c.L;
  opts.grid_samples = c.grid;
  opts.label = c.label.empty() ? s.name : c.label;
  const ChainClass cls = chain_class_from_string(c.chain_class);
  try {
    if (cls != ChainClass::V) {
      require_families(c, cls, false);
      return build_base(c, cls, space, opts);
    }
    if (c.base == "transitions") {
      require_families(c, ChainClass::V, true);
      std::vector<Transition> ts;
      for (const auto& t : c.transitions) ts.push_back({t.from, t.to, rate_of(t.rate, c, "[chain] transition")});
      return build_class_V(space, std::move(ts), family_of(c, "catastrophes", 1), opts);
    }
    ChainClass base_cls;
    try {
      base_cls = chain_class_from_string(c.base);
    } catch (const Error&) {
      throw ValidationError("[chain] base: expected I, II, III, IV or transitions");
    }
    require_families(c, base_cls, true);
    const ChainSpec base = build_base(c, base_cls, space, opts);
    return build_class_V(base, family_of(c, "catastrophes", 1), opts);
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind("[chain]", 0) == 0) throw;
    throw ValidationError("[chain] " + what);
  } catch (const EvaluationError& e) {
    throw ValidationError(std::string("[chain] ") + e.what());
  }
}

WeightSequence build_weights(const Scenario& s, std::size_t n) {
  if (!s.weights) return WeightSequence::unit(n);
  const WeightsConfig& w = *s.weights;
  try {
    if (w.kind == "geometric") return WeightSequence::geometric(w.delta, n);
    if (w.kind == "list") return WeightSequence::listed(w.values).truncated(n);
    return WeightSequence::unit(n);
  } catch (const Error& e) {
    throw ValidationError(std::string("[weights] ") + (w.kind == "list" ? "values" : "delta") + ": " + e.what());
  }
}

std::vector<Perturbation> build_perturbations(const Scenario& s, const ChainSpec& spec) {
  if (!s.perturbation) return {};
  const PerturbationConfig& p = *s.perturbation;
  const PerturbationMode mode = perturbation_mode_from_string(p.mode);
  Perturbation base;
  base.mode = mode;
  base.epsilon = p.epsilon;
  base.clamp_at_zero = p.clamp_at_zero;
  for (const auto& [name, v] : p.offsets) {
    if (name == "births") base.offsets.births = v;
    if (name == "deaths") base.offsets.deaths = v;
    if (name == "arrivals") base.offsets.arrivals = v;
    if (name == "services") base.offsets.services = v;
    if (name == "catastrophes") base.offsets.catastrophes = v;
  }
  if (!p.offsets.empty() && mode != PerturbationMode::uniform && mode != PerturbationMode::offsets)
    throw ValidationError("[perturbation] mode: explicit offsets need mode uniform or offsets");
  const bool random = mode == PerturbationMode::offsets && p.offsets.empty();
  if (!random && p.draws != 1) throw ValidationError("[perturbation] draws: only random offsets take several draws");
  if (!random) return {base};
  std::mt19937_64 rng(p.seed);
  std::vector<Perturbation> out;
  for (std::size_t i = 0; i < p.draws; ++i) {
    Perturbation d = base;
    d.offsets = random_offsets(spec, p.epsilon, rng);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace mcpert
