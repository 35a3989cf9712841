#include "ppc/nlp.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <regex>

#include "default_config.hpp"
#include "ppc/error.hpp"
#include "ppc/util.hpp"

namespace ppc {

namespace {

constexpr std::array<std::string_view, 6> kKindNames = {"location", "organization", "email",
                                                        "phone",    "postal_address", "website"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

// Byte length of a multi-byte UTF-8 punctuation character at `i`
// (general punctuation block, no-break space, guillemets), else 0.
std::size_t utf8_punct_len(std::string_view t, std::size_t i) {
  auto b = [&](std::size_t k) { return static_cast<unsigned char>(t[k]); };
  if (i + 2 < t.size() && b(i) == 0xE2 && b(i + 1) == 0x80 &&
      b(i + 2) >= 0x90 && b(i + 2) <= 0xAF)
    return 3;
  if (i + 1 < t.size() && b(i) == 0xC2 &&
      (b(i + 1) == 0xA0 || b(i + 1) == 0xAB || b(i + 1) == 0xBB || b(i + 1) == 0xB7))
    return 2;
  return 0;
}

bool is_right_single_quote(std::string_view t, std::size_t i) {
  return i + 2 < t.size() && static_cast<unsigned char>(t[i]) == 0xE2 &&
         static_cast<unsigned char>(t[i + 1]) == 0x80 && static_cast<unsigned char>(t[i + 2]) == 0x99;
}

bool is_word_byte(std::string_view t, std::size_t i) {
  unsigned char c = static_cast<unsigned char>(t[i]);
  if (c >= 0x80) return utf8_punct_len(t, i) == 0;
  return std::isalnum(c) != 0;
}

bool is_connector(char c) { return c == '-' || c == '.' || c == '@' || c == '_' || c == '\''; }

// Strips a trailing possessive and lower-cases, for gazetteer matching.
std::string match_form(std::string_view token) {
  std::string s = to_lower(token);
  if (s.size() > 2 && s.compare(s.size() - 2, 2, "'s") == 0) s.resize(s.size() - 2);
  if (s.size() > 4 && s.compare(s.size() - 4, 4, "\xE2\x80\x99s") == 0) s.resize(s.size() - 4);
  return s;
}

std::vector<std::string> phrase_tokens(std::string_view entry) {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(entry)) out.push_back(match_form(tok.text));
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool has_vowel(std::string_view s) {
  return s.find_first_of("aeiouy") != std::string_view::npos;
}

bool is_consonant(char c) { return std::isalpha(static_cast<unsigned char>(c)) && !std::strchr("aeiou", c); }

std::string restore_stem(std::string stem) {
  std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && is_consonant(stem[n - 1]) &&
      !std::strchr("lsz", stem[n - 1])) {
    stem.pop_back();
    return stem;
  }
  for (std::string_view tail : {"at", "bl", "iz", "iv", "ur"})
    if (ends_with(stem, tail)) return stem + "e";
  return stem;
}

// One suffix-rule step, or nullopt when no rule applies.
std::optional<std::string> suffix_step(const std::string& w) {
  const std::size_t n = w.size();
  if (ends_with(w, "'s") && n > 2) return w.substr(0, n - 2);
  if (ends_with(w, "\xE2\x80\x99s") && n > 4) return w.substr(0, n - 4);
  if (!std::all_of(w.begin(), w.end(), [](char c) { return (c >= 'a' && c <= 'z') || c == '-'; }))
    return std::nullopt;
  if (ends_with(w, "sses")) return w.substr(0, n - 2);
  if (ends_with(w, "ies") && n >= 5) return w.substr(0, n - 3) + "y";
  if (ends_with(w, "s") && n >= 4 && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is"))
    return w.substr(0, n - 1);
  if (ends_with(w, "ing") && n >= 6 && has_vowel(w.substr(0, n - 3)))
    return restore_stem(w.substr(0, n - 3));
  if (ends_with(w, "ed") && n >= 5 && has_vowel(w.substr(0, n - 2)))
    return restore_stem(w.substr(0, n - 2));
  if (ends_with(w, "ction")) return w.substr(0, n - 3);
  if (ends_with(w, "etion")) return w.substr(0, n - 3) + "e";
  if (ends_with(w, "ation") && n >= 9) return w.substr(0, n - 5);
  return std::nullopt;
}

bool starts_list_item(std::string_view t, std::size_t j) {
  auto space_at = [&](std::size_t k) { return k < t.size() && (t[k] == ' ' || t[k] == '\t'); };
  if (j >= t.size()) return false;
  if ((t[j] == '-' || t[j] == '*') && space_at(j + 1)) return true;
  if (t.substr(j, 3) == "\xE2\x80\xA2" && space_at(j + 3)) return true;  // bullet
  std::size_t k = j;
  while (k < t.size() && k - j < 3 && std::isdigit(static_cast<unsigned char>(t[k]))) ++k;
  if (k > j && k < t.size() && (t[k] == '.' || t[k] == ')') && space_at(k + 1)) return true;
  if (std::isalpha(static_cast<unsigned char>(t[j])) && j + 1 < t.size() && t[j + 1] == ')' &&
      space_at(j + 2))
    return true;
  return false;
}

}  // namespace

std::string_view kind_name(EntityKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<EntityKind> parse_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == name) return static_cast<EntityKind>(i);
  return std::nullopt;
}

bool is_kind_token(std::string_view token) { return parse_kind(token).has_value(); }

// ---------------------------------------------------------------------------
// Configuration

StopwordList StopwordList::parse(std::string_view text) {
  StopwordList list;
  for (auto raw : split(text, '\n')) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    list.words_.insert(to_lower(line));
  }
  return list;
}

bool StopwordList::contains(std::string_view word) const { return words_.find(word) != words_.end(); }

Gazetteer Gazetteer::parse(std::string_view text, const std::string& source) {
  Gazetteer g;
  enum class Section { none, location, organization, suffix } section = Section::none;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line == "[location]") section = Section::location;
      else if (line == "[organization]") section = Section::organization;
      else if (line == "[organization_suffix]") section = Section::suffix;
      else throw ParseError(source, line_no, "unknown section " + std::string(line));
      continue;
    }
    switch (section) {
      case Section::none:
        throw ParseError(source, line_no, "entry outside of a section");
      case Section::location:
        g.locations_.push_back(phrase_tokens(line));
        break;
      case Section::organization:
        g.organizations_.push_back(phrase_tokens(line));
        break;
      case Section::suffix: {
        std::string s;
        for (char c : line)
          if (c != '.') s += c;
        g.suffixes_.insert(s);
        break;
      }
    }
  }
  auto longest_first = [](const auto& a, const auto& b) { return a.size() > b.size(); };
  std::stable_sort(g.locations_.begin(), g.locations_.end(), longest_first);
  std::stable_sort(g.organizations_.begin(), g.organizations_.end(), longest_first);
  return g;
}

bool Gazetteer::is_org_suffix(std::string_view token) const {
  std::string s;
  for (char c : token)
    if (c != '.') s += c;
  return suffixes_.count(s) != 0;
}

Lemmatizer Lemmatizer::parse(std::string_view text, const std::string& source) {
  Lemmatizer lem;
  std::vector<std::pair<std::string, std::size_t>> surfaces;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty())
      throw ParseError(source, line_no, "expected 'surface<TAB>lemma'");
    std::string surface = to_lower(trim(fields[0]));
    std::string lemma = to_lower(trim(fields[1]));
    if (!lem.lexicon_.emplace(surface, lemma).second)
      throw ParseError(source, line_no, "duplicate surface form '" + surface + "'");
    lem.lemmas_.insert(lemma);
    surfaces.emplace_back(surface, line_no);
  }
  for (const auto& [surface, line] : surfaces)
    if (lem.lemmas_.count(surface) && lem.lexicon_.at(surface) != surface)
      throw ParseError(source, line, "'" + surface + "' is used as a lemma but maps elsewhere");
  return lem;
}

std::string Lemmatizer::lemmatize(std::string_view word) const {
  std::string w = to_lower(word);
  for (;;) {
    if (lemmas_.count(w)) return w;
    if (auto it = lexicon_.find(w); it != lexicon_.end()) return it->second;
    auto next = suffix_step(w);
    if (!next || next->empty() || *next == w) return w;
    w = std::move(*next);
  }
}

NlpConfig NlpConfig::load(const std::filesystem::path& stopwords, const std::filesystem::path& gazetteers,
                          const std::filesystem::path& lemmas) {
  NlpConfig cfg;
  cfg.stopwords = StopwordList::parse(read_text_file(stopwords));
  cfg.gazetteer = Gazetteer::parse(read_text_file(gazetteers), gazetteers.string());
  cfg.lemmatizer = Lemmatizer::parse(read_text_file(lemmas), lemmas.string());
  return cfg;
}

const NlpConfig& default_nlp_config() {
  static const NlpConfig cfg = [] {
    NlpConfig c;
    c.stopwords = StopwordList::parse(defaults::stopwords);
    c.gazetteer = Gazetteer::parse(defaults::gazetteers, "gazetteers.txt");
    c.lemmatizer = Lemmatizer::parse(defaults::lemmas, "lemmas.tsv");
    return c;
  }();
  return cfg;
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> list = {
      "art", "arts", "cf", "dr", "e.g", "fig", "i.e", "incl", "mr", "mrs", "ms", "no",
      "nos", "nr", "p", "para", "paras", "pp", "prof", "sec", "st", "vs", "viz", "approx"};
  return list;
}

// ---------------------------------------------------------------------------
// Sentence splitting

std::vector<Sentence> split_sentences(const RawDocument& doc) {
  return split_sentences(doc, default_abbreviations());
}

std::vector<Sentence> split_sentences(const RawDocument& doc, std::span<const std::string> abbreviations) {
  const std::string_view t = doc.text;
  std::vector<std::pair<std::size_t, std::size_t>> pieces;
  std::size_t start = 0;
  auto cut = [&](std::size_t end) {
    pieces.emplace_back(start, end);
    start = end;
  };

  auto word_before = [&](std::size_t dot) {
    std::size_t b = dot;
    while (b > 0 && !is_space(t[b - 1])) --b;
    std::size_t s = b;
    while (s < dot && (t[s] == '(' || t[s] == '[' || t[s] == '"' || t[s] == '\'')) ++s;
    return std::pair<std::size_t, std::string_view>(b, t.substr(s, dot - s));
  };
  auto at_line_start = [&](std::size_t pos) {
    while (pos > 0 && (t[pos - 1] == ' ' || t[pos - 1] == '\t')) --pos;
    return pos == 0 || t[pos - 1] == '\n';
  };

  for (std::size_t i = 0; i < t.size(); ++i) {
    const char c = t[i];
    if (c == '\n') {
      std::size_t j = i + 1;
      while (j < t.size() && (t[j] == ' ' || t[j] == '\t' || t[j] == '\r')) ++j;
      if (j >= t.size() || t[j] == '\n' || starts_list_item(t, j)) cut(i);
      continue;
    }
    if (c != '.' && c != '?' && c != '!') continue;

    std::size_t j = i + 1;
    for (;;) {
      if (j < t.size() && std::string_view(".?!\"')]").find(t[j]) != std::string_view::npos) {
        ++j;
      } else if (t.substr(j, 3) == "\xE2\x80\x9D") {  // closing double quote
        j += 3;
      } else {
        break;
      }
    }
    if (j < t.size() && !is_space(t[j])) {
      i = j - 1;
      continue;
    }
    if (c == '.' && j == i + 1) {
      auto [word_start, word] = word_before(i);
      std::string lw = to_lower(word);
      if (std::find(abbreviations.begin(), abbreviations.end(), lw) != abbreviations.end()) continue;
      // "1." opening a numbered list item
      if (!word.empty() && word.size() <= 3 &&
          std::all_of(word.begin(), word.end(), [](char d) { return std::isdigit(static_cast<unsigned char>(d)); }) &&
          at_line_start(word_start))
        continue;
    }
    cut(j);
    i = j - 1;
  }
  if (start < t.size()) cut(t.size());

  std::vector<Sentence> out;
  for (auto [b, e] : pieces) {
    while (b < e && is_space(t[b])) ++b;
    while (e > b && is_space(t[e - 1])) --e;
    if (b == e) continue;
    Sentence s;
    s.index = out.size();
    s.begin = b;
    s.end = e;
    s.raw_text = std::string(t.substr(b, e - b));
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tokens and recognizers

std::vector<Token> tokenize(std::string_view t) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < t.size()) {
    if (!is_word_byte(t, i)) {
      std::size_t len = utf8_punct_len(t, i);
      i += len ? len : 1;
      continue;
    }
    std::size_t b = i;
    while (i < t.size()) {
      if (is_word_byte(t, i)) {
        ++i;
      } else if (is_connector(t[i]) && i + 1 < t.size() && is_word_byte(t, i + 1)) {
        ++i;
      } else if (is_right_single_quote(t, i) && i + 3 < t.size() && is_word_byte(t, i + 3)) {
        i += 3;
      } else {
        break;
      }
    }
    out.push_back(Token{std::string(t.substr(b, i - b)), b, i});
  }
  return out;
}

std::vector<Annotation> recognize_contacts(std::string_view text) {
  static const std::regex email(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})");
  static const std::regex url(R"re((https?://|www\.)[^\s<>()"]+)re", std::regex::icase);
  static const std::regex domain(
      R"re(\b[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.(com|org|net|eu|jp|lu|de|fr|uk|io|info|gov|edu)(/[^\s<>()"]*)?\b)re");
  static const std::regex phone(R"(\+?\(?\d[\d ()./-]{5,}\d)");
  static const std::regex street(
      R"(\b\d{1,5}[A-Za-z]?,? +(?:[A-Z][A-Za-z'-]* +){0,4}(?:Street|St\.|Road|Rd\.|Avenue|Ave\.|Boulevard|Blvd\.|Lane|Drive|Way|Place|Square|Strasse|Straße)\b(?:, *[A-Z]{0,2}-?\d{4,5} +[A-Z][A-Za-z-]+)?)");
  static const std::regex continental(
      R"(\b\d{1,5},? +(?:[Rr]ue|[Aa]venue|[Bb]oulevard|[Rr]oute|[Pp]lace|[Vv]ia|[Cc]alle|[Cc]hemin) +(?:[A-Za-z'-]+ ){0,4}[A-Za-z'-]+(?:, *[A-Z]{0,2}-?\d{4,5} +[A-Z][A-Za-z-]+)?)");

  std::vector<Annotation> found;
  auto overlaps = [&](std::size_t b, std::size_t e) {
    return std::any_of(found.begin(), found.end(),
                       [&](const Annotation& a) { return b < a.end && a.begin < e; });
  };
  auto scan = [&](const std::regex& re, EntityKind kind, auto accept) {
    const std::string s(text);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it) {
      std::size_t b = static_cast<std::size_t>(it->position(0));
      std::size_t e = b + static_cast<std::size_t>(it->length(0));
      while (e > b && std::string_view(".,;:!?)").find(s[e - 1]) != std::string_view::npos) --e;
      if (e <= b || !accept(std::string_view(s).substr(b, e - b), b)) continue;
      if (!overlaps(b, e)) found.push_back(Annotation{b, e, kind});
    }
  };
  auto any = [](std::string_view, std::size_t) { return true; };

  scan(email, EntityKind::email, any);
  scan(url, EntityKind::website, any);
  scan(domain, EntityKind::website, [&](std::string_view, std::size_t b) {
    return b == 0 || (text[b - 1] != '@' && text[b - 1] != '.');
  });
  scan(street, EntityKind::postal_address, any);
  scan(continental, EntityKind::postal_address, any);
  scan(phone, EntityKind::phone, [&](std::string_view m, std::size_t b) {
    if (b > 0 && std::isalnum(static_cast<unsigned char>(text[b - 1]))) return false;
    std::size_t digits = 0, groups = 0;
    bool in_group = false;
    for (char ch : m) {
      bool d = std::isdigit(static_cast<unsigned char>(ch)) != 0;
      digits += d;
      if (d && !in_group) ++groups;
      in_group = d;
    }
    if (digits < 7 || digits > 15) return false;
    return m.front() == '+' || m.front() == '(' || m.front() == '0' || groups >= 3;
  });

  std::sort(found.begin(), found.end(),
            [](const Annotation& a, const Annotation& b) { return a.begin < b.begin; });
  return found;
}

std::vector<Annotation> recognize_entities(std::span<const Token> tokens, const Gazetteer& gazetteer) {
  static const std::set<std::string, std::less<>> kNotNames = {
      "a",    "an",  "the",  "this", "that", "these", "those", "our", "your", "their", "its",
      "we",   "you", "they", "it",   "at",   "by",    "for",   "in",  "on",   "with",  "from",
      "to",   "if",  "when", "where", "as",  "all",   "any",   "each", "some", "and",  "or"};
  const std::size_t n = tokens.size();
  std::vector<bool> used(n, false);
  std::vector<Annotation> out;

  auto capitalized = [&](std::size_t i) { return !tokens[i].text.empty() && is_upper(tokens[i].text[0]); };
  auto adjacent = [&](std::size_t i) { return tokens[i].begin <= tokens[i - 1].end + 1; };
  auto mark = [&](std::size_t b, std::size_t e, EntityKind kind) {
    for (std::size_t k = b; k < e; ++k) used[k] = true;
    out.push_back(Annotation{tokens[b].begin, tokens[e - 1].end, kind});
  };
  auto match_entry = [&](std::size_t i, const std::vector<std::vector<std::string>>& entries) -> std::size_t {
    for (const auto& entry : entries) {
      if (entry.empty() || i + entry.size() > n) continue;
      bool ok = true;
      for (std::size_t k = 0; k < entry.size() && ok; ++k) {
        ok = !used[i + k] && match_form(tokens[i + k].text) == entry[k] && (k == 0 || adjacent(i + k));
      }
      if (ok) return entry.size();
    }
    return 0;
  };

  // Organizations: capitalized runs closed by a legal suffix, then exact entries.
  for (std::size_t i = 0; i < n;) {
    if (!capitalized(i) || kNotNames.count(to_lower(tokens[i].text))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && capitalized(j) && adjacent(j)) ++j;
    std::size_t last_suffix = n;
    for (std::size_t k = i + 1; k < j; ++k)
      if (gazetteer.is_org_suffix(tokens[k].text)) last_suffix = k;
    if (last_suffix != n) {
      mark(i, last_suffix + 1, EntityKind::organization);
      i = last_suffix + 1;
    } else {
      i = j;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i] || !capitalized(i)) continue;
    if (std::size_t len = match_entry(i, gazetteer.organizations())) {
      mark(i, i + len, EntityKind::organization);
      i += len - 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i] || !capitalized(i)) continue;
    if (std::size_t len = match_entry(i, gazetteer.locations())) {
      mark(i, i + len, EntityKind::location);
      i += len - 1;
    }
  }
  std::sort(out.begin(), out.end(), [](const Annotation& a, const Annotation& b) { return a.begin < b.begin; });
  return out;
}

namespace {

struct MarkedToken {
  Token token;
  bool generalized = false;
};

std::vector<MarkedToken> generalize_marked(std::span<const Token> tokens, std::span<const Annotation> annotations) {
  std::vector<MarkedToken> out;
  std::vector<bool> emitted(annotations.size(), false);
  for (const auto& tok : tokens) {
    bool covered = false;
    for (std::size_t a = 0; a < annotations.size(); ++a) {
      const auto& ann = annotations[a];
      if (tok.begin < ann.end && ann.begin < tok.end) {
        covered = true;
        if (!emitted[a]) {
          emitted[a] = true;
          out.push_back({Token{std::string(kind_name(ann.kind)), ann.begin, ann.end}, true});
        }
        break;
      }
    }
    if (!covered) out.push_back({tok, false});
  }
  return out;
}

std::vector<Annotation> annotate(std::string_view text, std::span<const Token> tokens, const Gazetteer& gaz) {
  auto annotations = recognize_contacts(text);
  for (const auto& ent : recognize_entities(tokens, gaz)) {
    bool clash = std::any_of(annotations.begin(), annotations.end(), [&](const Annotation& a) {
      return ent.begin < a.end && a.begin < ent.end;
    });
    if (!clash) annotations.push_back(ent);
  }
  std::sort(annotations.begin(), annotations.end(),
            [](const Annotation& a, const Annotation& b) { return a.begin < b.begin; });
  return annotations;
}

std::vector<std::string> finish(const std::vector<MarkedToken>& marked, const NlpConfig& config) {
  std::vector<std::string> out;
  for (const auto& m : marked) {
    if (m.generalized) {
      out.push_back(m.token.text);
      continue;
    }
    std::string lower = to_lower(m.token.text);
    if (config.stopwords.contains(lower)) continue;
    std::string lemma = config.lemmatizer.lemmatize(lower);
    if (lemma.empty() || config.stopwords.contains(lemma)) continue;
    out.push_back(std::move(lemma));
  }
  return out;
}

}  // namespace

std::vector<Token> generalize(std::span<const Token> tokens, std::span<const Annotation> annotations) {
  std::vector<Token> out;
  for (auto& m : generalize_marked(tokens, annotations)) out.push_back(std::move(m.token));
  return out;
}

std::vector<std::string> normalize_text(std::string_view text, const NlpConfig& config) {
  auto tokens = tokenize(text);
  auto annotations = annotate(text, tokens, config.gazetteer);
  return finish(generalize_marked(tokens, annotations), config);
}

ProcessedSentence process_sentence(const Sentence& sentence, const NlpConfig& config) {
  ProcessedSentence ps;
  ps.sentence = sentence;
  auto tokens = tokenize(sentence.raw_text);
  ps.entity_annotations = annotate(sentence.raw_text, tokens, config.gazetteer);
  ps.tokens = finish(generalize_marked(tokens, ps.entity_annotations), config);
  return ps;
}

std::vector<ProcessedSentence> preprocess(const RawDocument& doc, const NlpConfig& config) {
  std::vector<ProcessedSentence> out;
  for (const auto& s : split_sentences(doc)) out.push_back(process_sentence(s, config));
  return out;
}

}  // namespace ppc
