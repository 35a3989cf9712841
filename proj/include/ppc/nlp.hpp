#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppc {

enum class EntityKind { location, organization, email, phone, postal_address, website };

std::string_view kind_name(EntityKind kind);
std::optional<EntityKind> parse_kind(std::string_view name);
bool is_kind_token(std::string_view token);

struct RawDocument {
  std::string id;
  std::string text;
  std::string source;
};

struct Sentence {
  std::size_t index = 0;
  // Byte offsets of raw_text inside the document, [begin, end).
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string raw_text;

  bool operator==(const Sentence&) const = default;
};

struct Token {
  std::string text;
  // Byte offsets relative to the text the token was cut from.
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Token&) const = default;
};

// A recognized span, in byte offsets of the sentence text.
struct Annotation {
  std::size_t begin = 0;
  std::size_t end = 0;
  EntityKind kind = EntityKind::location;

  bool operator==(const Annotation&) const = default;
};

struct ProcessedSentence {
  Sentence sentence;
  std::vector<std::string> tokens;
  std::vector<Annotation> entity_annotations;
};

class StopwordList {
 public:
  static StopwordList parse(std::string_view text);
  bool contains(std::string_view word) const;
  std::size_t size() const noexcept { return words_.size(); }

 private:
  std::set<std::string, std::less<>> words_;
};

// Sections: [location], [organization], [organization_suffix].
class Gazetteer {
 public:
  static Gazetteer parse(std::string_view text, const std::string& source = "<gazetteers>");

  // Entries are stored as lower-cased token sequences.
  const std::vector<std::vector<std::string>>& locations() const noexcept { return locations_; }
  const std::vector<std::vector<std::string>>& organizations() const noexcept { return organizations_; }
  bool is_org_suffix(std::string_view token) const;

 private:
  std::vector<std::vector<std::string>> locations_;
  std::vector<std::vector<std::string>> organizations_;
  std::set<std::string, std::less<>> suffixes_;
};

// Exception lexicon followed by suffix rules. lemmatize() is idempotent.
class Lemmatizer {
 public:
  Lemmatizer() = default;
  // "surface<TAB>lemma" lines.
  static Lemmatizer parse(std::string_view text, const std::string& source = "<lemmas>");

  std::string lemmatize(std::string_view word) const;
  const std::map<std::string, std::string, std::less<>>& lexicon() const noexcept { return lexicon_; }

 private:
  std::map<std::string, std::string, std::less<>> lexicon_;
  std::set<std::string, std::less<>> lemmas_;
};

struct NlpConfig {
  StopwordList stopwords;
  Gazetteer gazetteer;
  Lemmatizer lemmatizer;

  static NlpConfig load(const std::filesystem::path& stopwords, const std::filesystem::path& gazetteers,
                        const std::filesystem::path& lemmas);
};

const NlpConfig& default_nlp_config();

// Words whose trailing period never ends a sentence ("Art.", "e.g.").
const std::vector<std::string>& default_abbreviations();

std::vector<Sentence> split_sentences(const RawDocument& doc);
std::vector<Sentence> split_sentences(const RawDocument& doc, std::span<const std::string> abbreviations);

// Splits on whitespace and punctuation. '-', '.', '@', '_' and apostrophes
// stay inside a token when flanked by word characters.
std::vector<Token> tokenize(std::string_view text);

std::vector<Annotation> recognize_contacts(std::string_view text);
std::vector<Annotation> recognize_entities(std::span<const Token> tokens, const Gazetteer& gazetteer);

// Replaces every token overlapping an annotation by one token holding the
// kind name; the replacement spans the annotation.
std::vector<Token> generalize(std::span<const Token> tokens, std::span<const Annotation> annotations);

// Generalize, lemmatize and drop stopwords for one piece of text.
std::vector<std::string> normalize_text(std::string_view text, const NlpConfig& config);
ProcessedSentence process_sentence(const Sentence& sentence, const NlpConfig& config);
std::vector<ProcessedSentence> preprocess(const RawDocument& doc, const NlpConfig& config);

}  // namespace ppc
