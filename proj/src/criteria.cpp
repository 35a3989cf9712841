#include "ppc/criteria.hpp"

#include <algorithm>
#include <cctype>

#include "default_config.hpp"
#include "ppc/error.hpp"
#include "ppc/util.hpp"

namespace ppc {

std::string_view to_string(CoreActivity v) {
  switch (v) {
    case CoreActivity::public_authority: return "public_authority";
    case CoreActivity::large_scale_monitoring: return "large_scale_monitoring";
    case CoreActivity::special_categories: return "special_categories";
  }
  return "";
}

std::string_view to_string(ControllerLocation v) {
  return v == ControllerLocation::inside_europe ? "inside_europe" : "outside_europe";
}

std::string_view to_string(Collection v) {
  switch (v) {
    case Collection::Direct: return "Direct";
    case Collection::Indirect: return "Indirect";
    case Collection::Both: return "Both";
  }
  return "";
}

std::optional<CoreActivity> parse_core_activity(std::string_view s) {
  for (auto v : {CoreActivity::public_authority, CoreActivity::large_scale_monitoring,
                 CoreActivity::special_categories})
    if (iequals(trim(s), to_string(v))) return v;
  return std::nullopt;
}

std::optional<ControllerLocation> parse_location(std::string_view s) {
  for (auto v : {ControllerLocation::inside_europe, ControllerLocation::outside_europe})
    if (iequals(trim(s), to_string(v))) return v;
  return std::nullopt;
}

std::optional<Collection> parse_collection(std::string_view s) {
  for (auto v : {Collection::Direct, Collection::Indirect, Collection::Both})
    if (iequals(trim(s), to_string(v))) return v;
  return std::nullopt;
}

void QuestionnaireAnswers::validate() const {
  if (trim(q1_controller_identity).empty()) throw Error("Q1 (controller identity) is empty");
  if (q5_location == ControllerLocation::outside_europe && trim(q5_representative_identity).empty())
    throw Error("Q5 is outside_europe but no representative identity is given");
}

// ---------------------------------------------------------------------------
// Conditions

bool Condition::holds(const QuestionnaireAnswers& a, const PolicyMetadataPresence& p) const {
  switch (kind) {
    case Kind::always: return true;
    case Kind::a2_yes: return a.q2_transfer_outside;
    case Kind::a3_yes: return a.q3_other_recipients;
    case Kind::a5_outside: return a.q5_location == ControllerLocation::outside_europe;
    case Kind::a6_in: return collections.count(a.q6_collection) != 0;
    case Kind::q4_any: return !a.q4_core_activities.empty();
    case Kind::present: return p.present(type);
    case Kind::all_of:
      return std::all_of(operands.begin(), operands.end(), [&](const Condition& c) { return c.holds(a, p); });
    case Kind::any_of:
      return std::any_of(operands.begin(), operands.end(), [&](const Condition& c) { return c.holds(a, p); });
  }
  return false;
}

bool Condition::questionnaire_only() const {
  if (kind == Kind::present) return false;
  return std::all_of(operands.begin(), operands.end(), [](const Condition& c) { return c.questionnaire_only(); });
}

void Condition::collect_types(std::vector<MetadataType>& out) const {
  if (kind == Kind::present && std::find(out.begin(), out.end(), type) == out.end()) out.push_back(type);
  for (const auto& c : operands) c.collect_types(out);
}

std::string Condition::str() const {
  switch (kind) {
    case Kind::always: return "none";
    case Kind::a2_yes: return "A2=yes";
    case Kind::a3_yes: return "A3=yes";
    case Kind::a5_outside: return "A5=outside";
    case Kind::q4_any: return "Q4.any";
    case Kind::present: return "present(" + type.str() + ")";
    case Kind::a6_in: {
      std::string s = "A6 in {";
      bool first = true;
      for (auto c : collections) {
        if (!first) s += ",";
        s += to_string(c);
        first = false;
      }
      return s + "}";
    }
    case Kind::all_of:
    case Kind::any_of: {
      std::string s;
      for (const auto& c : operands) {
        if (!s.empty()) s += kind == Kind::all_of ? " and " : " or ";
        const bool compound = c.kind == Kind::all_of || c.kind == Kind::any_of;
        s += compound ? "(" + c.str() + ")" : c.str();
      }
      return s;
    }
  }
  return "";
}

namespace {

class ConditionParser {
 public:
  ConditionParser(std::string_view text, const TaxonomyRegistry& registry) : text_(text), registry_(registry) {}

  Condition parse() {
    Condition c = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(text_.substr(pos_)) + "'");
    return c;
  }

 private:
  Condition parse_or() {
    std::vector<Condition> ops{parse_and()};
    while (accept_word("or")) ops.push_back(parse_and());
    return combine(Condition::Kind::any_of, std::move(ops));
  }

  Condition parse_and() {
    std::vector<Condition> ops{parse_factor()};
    while (accept_word("and")) ops.push_back(parse_factor());
    return combine(Condition::Kind::all_of, std::move(ops));
  }

  static Condition combine(Condition::Kind kind, std::vector<Condition> ops) {
    if (ops.size() == 1) return std::move(ops.front());
    Condition c;
    c.kind = kind;
    c.operands = std::move(ops);
    return c;
  }

  Condition parse_factor() {
    skip_ws();
    Condition c;
    if (accept("(")) {
      c = parse_or();
      if (!accept(")")) fail("missing ')'");
      return c;
    }
    if (accept_word("none")) return c;
    if (accept_ci("A2=yes")) c.kind = Condition::Kind::a2_yes;
    else if (accept_ci("A3=yes")) c.kind = Condition::Kind::a3_yes;
    else if (accept_ci("A5=outside")) c.kind = Condition::Kind::a5_outside;
    else if (accept_ci("Q4.any")) c.kind = Condition::Kind::q4_any;
    else if (accept_ci("present(")) {
      auto close = text_.find(')', pos_);
      if (close == std::string_view::npos) fail("missing ')' after present(");
      auto path = trim(text_.substr(pos_, close - pos_));
      auto t = registry_.find(path);
      if (!t) throw UnknownTypeError(std::string(path));
      c.kind = Condition::Kind::present;
      c.type = *t;
      pos_ = close + 1;
    } else if (accept_ci("A6")) {
      if (!accept_word("in") || !accept("{")) fail("expected 'A6 in {...}'");
      auto close = text_.find('}', pos_);
      if (close == std::string_view::npos) fail("missing '}'");
      for (auto item : split(text_.substr(pos_, close - pos_), ',')) {
        auto v = parse_collection(item);
        if (!v) fail("unknown collection mode '" + std::string(trim(item)) + "'");
        c.collections.insert(*v);
      }
      if (c.collections.empty()) fail("empty A6 set");
      c.kind = Condition::Kind::a6_in;
      pos_ = close + 1;
    } else {
      fail("unknown condition at '" + std::string(text_.substr(pos_)) + "'");
    }
    return c;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view s) {
    skip_ws();
    if (text_.substr(pos_, s.size()) != s) return false;
    pos_ += s.size();
    return true;
  }

  bool accept_ci(std::string_view s) {
    skip_ws();
    if (!iequals(text_.substr(pos_, s.size()), s)) return false;
    pos_ += s.size();
    return true;
  }

  // A keyword that is not the prefix of a longer word.
  bool accept_word(std::string_view w) {
    skip_ws();
    if (!iequals(text_.substr(pos_, w.size()), w)) return false;
    const std::size_t end = pos_ + w.size();
    if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
      return false;
    pos_ = end;
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw Error("condition '" + std::string(text_) + "': " + msg); }

  std::string_view text_;
  const TaxonomyRegistry& registry_;
  std::size_t pos_ = 0;
};

// Splits on `sep` outside braces.
std::vector<std::string_view> split_outside_braces(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '{') ++depth;
    else if (s[i] == '}') --depth;
    else if (s[i] == sep && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

std::string_view strip_label(std::string_view field, std::string_view label, const std::string& source,
                             std::size_t line) {
  field = trim(field);
  if (!iequals(field.substr(0, label.size()), label))
    throw ParseError(source, line, "expected '" + std::string(label) + "'");
  return trim(field.substr(label.size()));
}

std::vector<RequirementGroup> parse_post(std::string_view text, const TaxonomyRegistry& registry,
                                         const std::string& source, std::size_t line) {
  std::vector<RequirementGroup> groups;
  for (auto part : split_outside_braces(text, '&')) {
    part = trim(part);
    if (part.size() < 2 || part.front() != '{' || part.back() != '}')
      throw ParseError(source, line, "requirement group must be written as {A | B}");
    RequirementGroup g;
    for (auto member : split(part.substr(1, part.size() - 2), '|')) {
      member = trim(member);
      auto t = registry.find(member);
      if (!t) throw ParseError(source, line, "unknown metadata type '" + std::string(member) + "'");
      if (std::find(g.begin(), g.end(), *t) == g.end()) g.push_back(*t);
    }
    if (g.empty()) throw ParseError(source, line, "empty requirement group");
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace

Condition parse_condition(std::string_view text, const TaxonomyRegistry& registry) {
  return ConditionParser(text, registry).parse();
}

std::string_view to_string(Severity s) { return s == Severity::violation ? "violation" : "warning"; }

std::string_view to_string(Status s) {
  switch (s) {
    case Status::satisfied: return "SATISFIED";
    case Status::violation: return "VIOLATION";
    case Status::warning: return "WARNING";
    case Status::not_applicable: return "NOT_APPLICABLE";
    case Status::not_required: return "NOT_REQUIRED";
  }
  return "";
}

std::optional<Status> parse_status(std::string_view s) {
  for (auto v : {Status::satisfied, Status::violation, Status::warning, Status::not_applicable,
                 Status::not_required})
    if (trim(s) == to_string(v)) return v;
  return std::nullopt;
}

bool is_issue(Status s) { return s == Status::violation || s == Status::warning; }

std::vector<MetadataType> Criterion::referenced_types() const {
  std::vector<MetadataType> out;
  precondition.collect_types(out);
  for (const auto& g : postcondition)
    for (const auto& t : g)
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  return out;
}

std::string Criterion::str() const {
  std::string s = id + " | " + std::string(to_string(severity)) + " | PRE: " + precondition.str() + " | POST: ";
  for (std::size_t i = 0; i < postcondition.size(); ++i) {
    if (i) s += " & ";
    s += "{";
    for (std::size_t j = 0; j < postcondition[i].size(); ++j) {
      if (j) s += " | ";
      s += postcondition[i][j].str();
    }
    s += "}";
  }
  return s;
}

std::vector<Criterion> parse_criteria(std::string_view text, const TaxonomyRegistry& registry,
                                      const std::string& source) {
  std::vector<Criterion> out;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_outside_braces(line, '|');
    if (fields.size() != 4) throw ParseError(source, line_no, "expected 'id | severity | PRE: ... | POST: ...'");

    Criterion c;
    c.id = std::string(trim(fields[0]));
    if (c.id.empty()) throw ParseError(source, line_no, "empty criterion id");
    for (const auto& prev : out)
      if (prev.id == c.id) throw ParseError(source, line_no, "duplicate criterion id '" + c.id + "'");

    auto sev = trim(fields[1]);
    if (iequals(sev, "violation")) c.severity = Severity::violation;
    else if (iequals(sev, "warning")) c.severity = Severity::warning;
    else throw ParseError(source, line_no, "unknown severity '" + std::string(sev) + "'");

    try {
      c.precondition = parse_condition(strip_label(fields[2], "PRE:", source, line_no), registry);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
    c.postcondition = parse_post(strip_label(fields[3], "POST:", source, line_no), registry, source, line_no);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Criterion> load_criteria_file(const std::filesystem::path& path, const TaxonomyRegistry& registry) {
  return parse_criteria(read_text_file(path), registry, path.string());
}

std::vector<Criterion> default_criteria(const TaxonomyRegistry& registry) {
  return parse_criteria(defaults::criteria, registry, "criteria.txt");
}

std::string serialize_criteria(std::span<const Criterion> criteria) {
  std::string out;
  for (const auto& c : criteria) out += c.str() + "\n";
  return out;
}

Finding evaluate(const Criterion& c, const QuestionnaireAnswers& answers, const PolicyMetadataPresence& presence) {
  Finding f;
  f.criterion_id = c.id;

  std::vector<const Condition*> conjuncts;
  if (c.precondition.kind == Condition::Kind::all_of) {
    for (const auto& op : c.precondition.operands) conjuncts.push_back(&op);
  } else {
    conjuncts.push_back(&c.precondition);
  }
  for (const auto* cond : conjuncts) {
    if (cond->questionnaire_only() && !cond->holds(answers, presence)) {
      f.status = Status::not_applicable;
      return f;
    }
  }
  for (const auto* cond : conjuncts) {
    if (!cond->holds(answers, presence)) {
      f.status = Status::not_required;
      return f;
    }
  }

  for (const auto& group : c.postcondition) {
    bool met = false;
    for (const auto& t : group) {
      if (!presence.present(t)) continue;
      met = true;
      f.evidence[t] = presence.evidence(t);
    }
    if (!met) f.missing.push_back(group);
  }
  if (f.missing.empty()) f.status = Status::satisfied;
  else f.status = c.severity == Severity::violation ? Status::violation : Status::warning;
  return f;
}

std::vector<Finding> check_all(const PolicyMetadataPresence& presence, const QuestionnaireAnswers& answers,
                               std::span<const Criterion> criteria) {
  std::vector<Finding> out;
  out.reserve(criteria.size());
  for (const auto& c : criteria) out.push_back(evaluate(c, answers, presence));
  return out;
}

bool is_complete(std::span<const Finding> findings) {
  return std::none_of(findings.begin(), findings.end(),
                      [](const Finding& f) { return f.status == Status::violation; });
}

}  // namespace ppc
