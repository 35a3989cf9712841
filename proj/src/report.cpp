#include "ppc/report.hpp"

#include <algorithm>

#include "json.hpp"

#include "ppc/error.hpp"

namespace ppc {

using nlohmann::json;

CompletenessReport build_report(std::string policy, std::span<const std::string> sentences,
                                std::span<const Criterion> criteria, std::span<const Finding> findings) {
  CompletenessReport r;
  r.policy = std::move(policy);
  for (const auto& c : criteria) {
    auto f = std::find_if(findings.begin(), findings.end(),
                          [&](const Finding& x) { return x.criterion_id == c.id; });
    if (f == findings.end()) throw Error("no finding for criterion " + c.id);

    CriterionDetail d;
    d.id = c.id;
    d.severity = c.severity;
    d.status = f->status;
    if (f->status == Status::violation) ++r.violations;
    if (f->status == Status::warning) ++r.warnings;

    if (f->status != Status::not_applicable && f->status != Status::not_required) {
      for (const auto& group : c.postcondition) {
        GroupDetail g;
        g.members = group;
        for (const auto& t : group) {
          auto ev = f->evidence.find(t);
          if (ev == f->evidence.end()) continue;
          g.found = true;
          TypeEvidence te{t, {}};
          for (std::size_t i : ev->second) {
            if (i >= sentences.size())
              throw Error("evidence sentence " + std::to_string(i) + " is outside the document");
            te.sentences.push_back(EvidenceSentence{i, sentences[i]});
          }
          g.evidence.push_back(std::move(te));
        }
        d.groups.push_back(std::move(g));
      }
    }
    r.details.push_back(std::move(d));
  }
  r.complete = r.violations == 0;
  return r;
}

namespace {

std::string counted(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

std::string status_text(Status s) {
  switch (s) {
    case Status::satisfied: return "SATISFIED";
    case Status::violation: return "VIOLATION";
    case Status::warning: return "WARNING";
    case Status::not_applicable: return "NOT APPLICABLE";
    case Status::not_required: return "NOT REQUIRED";
  }
  return "";
}

std::string one_line(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == '\n' || c == '\r' || c == '\t' || c == ' ') {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

}  // namespace

std::string render_text(const CompletenessReport& r) {
  std::string out;
  out += "COMPLETENESS ANALYSIS REPORT\n";
  out += "Policy: " + r.policy + "\n\n";
  out += "SUMMARY\n";
  out += std::string(r.complete ? "COMPLETE" : "INCOMPLETE") + ", " + counted(r.violations, "violation") + ", " +
         counted(r.warnings, "warning") + "\n\n";
  out += "DETAILS\n";
  for (const auto& d : r.details) {
    out += d.id + " (" + std::string(to_string(d.severity)) + "): " + status_text(d.status) + "\n";
    for (const auto& g : d.groups) {
      if (!g.found) {
        std::string names;
        for (const auto& m : g.members) names += (names.empty() ? "" : " or ") + m.str();
        out += "  " + names + ": NOT FOUND \xE2\x80\x94 " + (d.severity == Severity::violation ? "VIOLATION" : "WARNING") +
               "\n";
        continue;
      }
      for (const auto& te : g.evidence) {
        out += "  " + te.type.str() + ":\n";
        for (const auto& s : te.sentences) out += "    [" + std::to_string(s.index) + "] " + one_line(s.text) + "\n";
      }
    }
  }
  return out;
}

std::string render_structured(const CompletenessReport& r) {
  json j;
  j["format"] = "ppcheck-report";
  j["version"] = 1;
  j["policy"] = r.policy;
  j["complete"] = r.complete;
  j["violations"] = r.violations;
  j["warnings"] = r.warnings;
  j["criteria"] = json::array();
  for (const auto& d : r.details) {
    json jd;
    jd["id"] = d.id;
    jd["severity"] = std::string(to_string(d.severity));
    jd["status"] = std::string(to_string(d.status));
    jd["groups"] = json::array();
    for (const auto& g : d.groups) {
      json jg;
      jg["members"] = json::array();
      for (const auto& m : g.members) jg["members"].push_back(m.str());
      jg["found"] = g.found;
      jg["evidence"] = json::array();
      for (const auto& te : g.evidence) {
        json je;
        je["type"] = te.type.str();
        je["sentences"] = json::array();
        for (const auto& s : te.sentences) je["sentences"].push_back({{"index", s.index}, {"text", s.text}});
        jg["evidence"].push_back(std::move(je));
      }
      jd["groups"].push_back(std::move(jg));
    }
    j["criteria"].push_back(std::move(jd));
  }
  return j.dump(2) + "\n";
}

CompletenessReport parse_structured(std::string_view text) {
  CompletenessReport r;
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "ppcheck-report") throw Error("not a ppcheck report");
    r.policy = j.at("policy").get<std::string>();
    r.complete = j.at("complete").get<bool>();
    r.violations = j.at("violations").get<std::size_t>();
    r.warnings = j.at("warnings").get<std::size_t>();
    for (const auto& jd : j.at("criteria")) {
      CriterionDetail d;
      d.id = jd.at("id").get<std::string>();
      const auto sev = jd.at("severity").get<std::string>();
      if (sev == "violation") d.severity = Severity::violation;
      else if (sev == "warning") d.severity = Severity::warning;
      else throw Error("unknown severity '" + sev + "'");
      auto st = parse_status(jd.at("status").get<std::string>());
      if (!st) throw Error("unknown status in criterion " + d.id);
      d.status = *st;
      for (const auto& jg : jd.at("groups")) {
        GroupDetail g;
        for (const auto& m : jg.at("members")) g.members.push_back(MetadataType::parse(m.get<std::string>()));
        g.found = jg.at("found").get<bool>();
        for (const auto& je : jg.at("evidence")) {
          TypeEvidence te{MetadataType::parse(je.at("type").get<std::string>()), {}};
          for (const auto& js : je.at("sentences"))
            te.sentences.push_back(EvidenceSentence{js.at("index").get<std::size_t>(), js.at("text").get<std::string>()});
          g.evidence.push_back(std::move(te));
        }
        d.groups.push_back(std::move(g));
      }
      r.details.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed structured report: ") + e.what());
  }
  return r;
}

}  // namespace ppc
