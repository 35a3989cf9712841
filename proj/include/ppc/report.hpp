#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppc/criteria.hpp"

namespace ppc {

struct EvidenceSentence {
  std::size_t index = 0;
  std::string text;

  bool operator==(const EvidenceSentence&) const = default;
};

struct TypeEvidence {
  MetadataType type;
  std::vector<EvidenceSentence> sentences;

  bool operator==(const TypeEvidence&) const = default;
};

struct GroupDetail {
  std::vector<MetadataType> members;
  bool found = false;
  std::vector<TypeEvidence> evidence;  // present members only

  bool operator==(const GroupDetail&) const = default;
};

struct CriterionDetail {
  std::string id;
  Severity severity = Severity::violation;
  Status status = Status::satisfied;
  std::vector<GroupDetail> groups;  // empty when the criterion did not apply

  bool operator==(const CriterionDetail&) const = default;
};

struct CompletenessReport {
  std::string policy;
  bool complete = true;
  std::size_t violations = 0;
  std::size_t warnings = 0;
  std::vector<CriterionDetail> details;

  bool operator==(const CompletenessReport&) const = default;
};

// `sentences[i]` is the raw text of sentence i. Findings are matched to
// criteria by id. Throws when an evidence index has no sentence.
CompletenessReport build_report(std::string policy, std::span<const std::string> sentences,
                                std::span<const Criterion> criteria, std::span<const Finding> findings);

std::string render_text(const CompletenessReport& r);
std::string render_structured(const CompletenessReport& r);
CompletenessReport parse_structured(std::string_view text);

}  // namespace ppc
