#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppc/prediction.hpp"
#include "ppc/taxonomy.hpp"

namespace ppc {

enum class CoreActivity { public_authority, large_scale_monitoring, special_categories };
enum class ControllerLocation { inside_europe, outside_europe };
enum class Collection { Direct, Indirect, Both };

std::string_view to_string(CoreActivity v);
std::string_view to_string(ControllerLocation v);
std::string_view to_string(Collection v);
std::optional<CoreActivity> parse_core_activity(std::string_view s);
std::optional<ControllerLocation> parse_location(std::string_view s);
std::optional<Collection> parse_collection(std::string_view s);

struct QuestionnaireAnswers {
  std::string q1_controller_identity;
  bool q2_transfer_outside = false;
  bool q3_other_recipients = false;
  std::set<CoreActivity> q4_core_activities;
  ControllerLocation q5_location = ControllerLocation::inside_europe;
  std::string q5_representative_identity;
  Collection q6_collection = Collection::Direct;

  // Throws ppc::Error when Q1 is empty, or Q5 is outside Europe without a
  // representative.
  void validate() const;
  bool operator==(const QuestionnaireAnswers&) const = default;
};

// Precondition expression.
struct Condition {
  enum class Kind { always, a2_yes, a3_yes, a5_outside, a6_in, q4_any, present, all_of, any_of };

  Kind kind = Kind::always;
  std::set<Collection> collections;  // a6_in
  MetadataType type;                 // present
  std::vector<Condition> operands;   // all_of, any_of

  bool holds(const QuestionnaireAnswers& a, const PolicyMetadataPresence& p) const;
  // True when no present() atom occurs.
  bool questionnaire_only() const;
  void collect_types(std::vector<MetadataType>& out) const;
  std::string str() const;

  bool operator==(const Condition&) const = default;
};

Condition parse_condition(std::string_view text, const TaxonomyRegistry& registry);

enum class Severity { violation, warning };
std::string_view to_string(Severity s);

// Met when any member, or a descendant of one, is present.
using RequirementGroup = std::vector<MetadataType>;

struct Criterion {
  std::string id;
  Severity severity = Severity::violation;
  Condition precondition;
  std::vector<RequirementGroup> postcondition;  // conjunction

  // Types named in the precondition and the postcondition, without repeats.
  std::vector<MetadataType> referenced_types() const;
  std::string str() const;
  bool operator==(const Criterion&) const = default;
};

enum class Status { satisfied, violation, warning, not_applicable, not_required };
std::string_view to_string(Status s);
std::optional<Status> parse_status(std::string_view s);
bool is_issue(Status s);

struct Finding {
  std::string criterion_id;
  Status status = Status::satisfied;
  std::vector<RequirementGroup> missing;
  // Present group members and their supporting sentences.
  std::map<MetadataType, std::set<std::size_t>> evidence;

  bool operator==(const Finding&) const = default;
};

// One "id | severity | PRE: ... | POST: ..." line per criterion.
std::vector<Criterion> parse_criteria(std::string_view text, const TaxonomyRegistry& registry,
                                      const std::string& source = "<criteria>");
std::vector<Criterion> load_criteria_file(const std::filesystem::path& path, const TaxonomyRegistry& registry);
std::vector<Criterion> default_criteria(const TaxonomyRegistry& registry);
std::string serialize_criteria(std::span<const Criterion> criteria);

Finding evaluate(const Criterion& c, const QuestionnaireAnswers& answers, const PolicyMetadataPresence& presence);
std::vector<Finding> check_all(const PolicyMetadataPresence& presence, const QuestionnaireAnswers& answers,
                               std::span<const Criterion> criteria);
bool is_complete(std::span<const Finding> findings);

}  // namespace ppc
