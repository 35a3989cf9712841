#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ppc {

// A node of the metadata-type tree, addressed by its dot-path
// ("Data Subject Right.Complaint.SA"). Levels run from 1 to 3.
class MetadataType {
 public:
  static constexpr int kMaxLevel = 3;

  MetadataType() = default;
  explicit MetadataType(std::vector<std::string> segments);

  // Splits on '.' and trims each segment. Throws ppc::Error on empty
  // segments or more than three levels.
  static MetadataType parse(std::string_view dotted);

  const std::vector<std::string>& segments() const noexcept { return segments_; }
  int level() const noexcept { return static_cast<int>(segments_.size()); }
  bool empty() const noexcept { return segments_.empty(); }
  const std::string& name() const { return segments_.back(); }
  std::string str() const;

  MetadataType root() const { return prefix(1); }
  MetadataType prefix(int level) const;
  std::optional<MetadataType> parent() const;
  MetadataType child(std::string name) const;

  // True when this path equals `other` or is a proper prefix of it.
  bool covers(const MetadataType& other) const noexcept;
  bool same_family(const MetadataType& other) const noexcept;

  auto operator<=>(const MetadataType&) const = default;
  bool operator==(const MetadataType&) const = default;

 private:
  std::vector<std::string> segments_;
};

struct TaxonomyNode {
  MetadataType type;
  // Grouping node that is never predicted as a bare label.
  bool structural = false;
  std::string note;

  bool operator==(const TaxonomyNode&) const = default;
};

class TaxonomyRegistry {
 public:
  // Line format: "<dot.path>[\tstructural][\tnote=<text>]"; '#' starts a
  // comment line. Parents must be listed before children.
  static TaxonomyRegistry parse(std::string_view text, const std::string& source = "<taxonomy>");

  std::string serialize() const;

  const std::vector<TaxonomyNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  bool contains(const MetadataType& t) const;
  std::optional<MetadataType> find(std::string_view path) const;
  // Case-insensitive lookup returning the canonical spelling.
  MetadataType resolve(std::string_view path) const;

  const TaxonomyNode& node(const MetadataType& t) const;
  int level_of(const MetadataType& t) const;
  bool same_family(const MetadataType& a, const MetadataType& b) const;
  bool is_structural(const MetadataType& t) const { return node(t).structural; }

  // Children in file order.
  const std::vector<MetadataType>& children(const MetadataType& t) const;
  std::vector<MetadataType> roots() const;
  std::vector<MetadataType> at_level(int level) const;
  // `t` and all its descendants, pre-order.
  std::vector<MetadataType> subtree(const MetadataType& t) const;

  bool operator==(const TaxonomyRegistry& other) const { return nodes_ == other.nodes_; }

 private:
  void add(TaxonomyNode node);

  std::vector<TaxonomyNode> nodes_;
  std::map<MetadataType, std::size_t> index_;
  std::map<std::string, MetadataType> by_lower_;
  std::map<MetadataType, std::vector<MetadataType>> children_;
};

TaxonomyRegistry load_taxonomy(std::string_view config_text);
TaxonomyRegistry load_taxonomy_file(const std::filesystem::path& path);
// The shipped registry.
const TaxonomyRegistry& default_taxonomy();

}  // namespace ppc
