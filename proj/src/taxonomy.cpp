#include "ppc/taxonomy.hpp"

#include "default_config.hpp"
#include "ppc/error.hpp"
#include "ppc/util.hpp"

namespace ppc {

MetadataType::MetadataType(std::vector<std::string> segments) : segments_(std::move(segments)) {
  if (segments_.empty() || segments_.size() > static_cast<std::size_t>(kMaxLevel))
    throw Error("metadata type must have 1 to 3 segments");
  for (const auto& s : segments_)
    if (s.empty()) throw Error("metadata type has an empty segment");
}

MetadataType MetadataType::parse(std::string_view dotted) {
  std::vector<std::string> segs;
  for (auto part : split(trim(dotted), '.')) {
    auto t = trim(part);
    if (t.empty()) throw Error("empty segment in metadata type '" + std::string(dotted) + "'");
    segs.emplace_back(t);
  }
  if (segs.size() > static_cast<std::size_t>(kMaxLevel))
    throw Error("metadata type '" + std::string(dotted) + "' is deeper than 3 levels");
  return MetadataType(std::move(segs));
}

std::string MetadataType::str() const {
  std::string out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i) out += '.';
    out += segments_[i];
  }
  return out;
}

MetadataType MetadataType::prefix(int level) const {
  if (level < 1 || level > this->level()) throw Error("invalid prefix level for '" + str() + "'");
  return MetadataType(std::vector<std::string>(segments_.begin(), segments_.begin() + level));
}

std::optional<MetadataType> MetadataType::parent() const {
  if (level() <= 1) return std::nullopt;
  return prefix(level() - 1);
}

MetadataType MetadataType::child(std::string name) const {
  auto segs = segments_;
  segs.push_back(std::move(name));
  return MetadataType(std::move(segs));
}

bool MetadataType::covers(const MetadataType& other) const noexcept {
  if (segments_.size() > other.segments_.size()) return false;
  for (std::size_t i = 0; i < segments_.size(); ++i)
    if (segments_[i] != other.segments_[i]) return false;
  return true;
}

bool MetadataType::same_family(const MetadataType& other) const noexcept {
  return !empty() && !other.empty() && segments_.front() == other.segments_.front();
}

TaxonomyRegistry TaxonomyRegistry::parse(std::string_view text, const std::string& source) {
  TaxonomyRegistry reg;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    auto fields = split(line, '\t');
    MetadataType written;
    try {
      written = MetadataType::parse(fields[0]);
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }

    TaxonomyNode node;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto f = trim(fields[i]);
      if (f.empty()) continue;
      if (f == "structural") {
        node.structural = true;
      } else if (f.substr(0, 5) == "note=") {
        node.note = std::string(f.substr(5));
      } else {
        throw ParseError(source, line_no, "unknown attribute '" + std::string(f) + "'");
      }
    }

    // Canonicalize the ancestor segments against already-known nodes.
    std::vector<std::string> segs;
    if (auto parent = written.parent()) {
      auto canon = reg.find(parent->str());
      if (!canon)
        throw ParseError(source, line_no,
                         "parent '" + parent->str() + "' of '" + written.str() + "' is not defined");
      segs = canon->segments();
    }
    segs.push_back(written.name());
    node.type = MetadataType(std::move(segs));

    if (reg.find(node.type.str()))
      throw ParseError(source, line_no, "duplicate metadata type '" + node.type.str() + "'");
    if (node.structural && node.type.level() != 1)
      throw ParseError(source, line_no, "only level-1 types can be structural");
    reg.add(std::move(node));
  }
  return reg;
}

void TaxonomyRegistry::add(TaxonomyNode node) {
  const MetadataType t = node.type;
  index_.emplace(t, nodes_.size());
  by_lower_.emplace(to_lower(t.str()), t);
  children_[t];
  if (auto p = t.parent()) children_[*p].push_back(t);
  nodes_.push_back(std::move(node));
}

std::string TaxonomyRegistry::serialize() const {
  std::string out;
  for (const auto& n : nodes_) {
    out += n.type.str();
    if (n.structural) out += "\tstructural";
    if (!n.note.empty()) out += "\tnote=" + n.note;
    out += '\n';
  }
  return out;
}

bool TaxonomyRegistry::contains(const MetadataType& t) const { return index_.count(t) != 0; }

std::optional<MetadataType> TaxonomyRegistry::find(std::string_view path) const {
  std::string key;
  try {
    key = to_lower(MetadataType::parse(path).str());
  } catch (const Error&) {
    return std::nullopt;
  }
  auto it = by_lower_.find(key);
  if (it == by_lower_.end()) return std::nullopt;
  return it->second;
}

MetadataType TaxonomyRegistry::resolve(std::string_view path) const {
  auto t = find(path);
  if (!t) throw UnknownTypeError(std::string(path));
  return *t;
}

const TaxonomyNode& TaxonomyRegistry::node(const MetadataType& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) throw UnknownTypeError(t.str());
  return nodes_[it->second];
}

int TaxonomyRegistry::level_of(const MetadataType& t) const { return node(t).type.level(); }

bool TaxonomyRegistry::same_family(const MetadataType& a, const MetadataType& b) const {
  node(a);
  node(b);
  return a.same_family(b);
}

const std::vector<MetadataType>& TaxonomyRegistry::children(const MetadataType& t) const {
  auto it = children_.find(t);
  if (it == children_.end()) throw UnknownTypeError(t.str());
  return it->second;
}

std::vector<MetadataType> TaxonomyRegistry::roots() const { return at_level(1); }

std::vector<MetadataType> TaxonomyRegistry::at_level(int level) const {
  std::vector<MetadataType> out;
  for (const auto& n : nodes_)
    if (n.type.level() == level) out.push_back(n.type);
  return out;
}

std::vector<MetadataType> TaxonomyRegistry::subtree(const MetadataType& t) const {
  std::vector<MetadataType> out{t};
  for (const auto& c : children(t)) {
    auto sub = subtree(c);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

TaxonomyRegistry load_taxonomy(std::string_view config_text) {
  return TaxonomyRegistry::parse(config_text);
}

TaxonomyRegistry load_taxonomy_file(const std::filesystem::path& path) {
  return TaxonomyRegistry::parse(read_text_file(path), path.string());
}

const TaxonomyRegistry& default_taxonomy() {
  static const TaxonomyRegistry reg = TaxonomyRegistry::parse(defaults::taxonomy, "taxonomy.txt");
  return reg;
}

}  // namespace ppc
