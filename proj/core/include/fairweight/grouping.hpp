#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fairweight/data.hpp"

namespace fairweight {

/// Named demographic groups over dataset indices. Groups may overlap and need
/// not cover the dataset.
class GroupAssignment {
 public:
  GroupAssignment() = default;
  explicit GroupAssignment(std::map<std::string, IndexSet> groups);

  const std::map<std::string, IndexSet>& groups() const noexcept { return groups_; }
  std::size_t size() const noexcept { return groups_.size(); }
  bool contains(const std::string& id) const { return groups_.count(id) != 0; }

  /// Throws UnknownGroup.
  const IndexSet& at(const std::string& id) const;

  std::vector<std::string> ids() const;

  /// Every group intersected with `scope`. Groups may come out empty; the
  /// metric layer reports that when it matters.
  GroupAssignment restricted_to(std::span<const std::size_t> scope) const;

 private:
  std::map<std::string, IndexSet> groups_;
};

enum class GroupingKind { ByAttribute, ByAttributeIntersection, CustomPredicate };

struct GroupingSpec {
  GroupingKind kind = GroupingKind::ByAttribute;
  std::vector<std::string> attribute_names;
  /// Registry key, used when kind == CustomPredicate.
  std::optional<std::string> predicate_id;

  static GroupingSpec by_attribute(std::string attribute);
  static GroupingSpec intersection(std::vector<std::string> attributes);
  static GroupingSpec custom(std::string predicate_id);
};

/// User grouping code: maps a dataset to group-id -> indices.
using GroupingPredicate = std::function<std::map<std::string, IndexSet>(const Dataset&)>;

/// Process-wide table of named grouping predicates, for library users who
/// need groups that no attribute expresses.
class GroupingRegistry {
 public:
  static GroupingRegistry& instance();

  void add(const std::string& id, GroupingPredicate predicate);
  /// Throws NotFound.
  GroupingPredicate get(const std::string& id) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, GroupingPredicate> predicates_;
};

/// Groups by attribute value (or "|"-joined value tuple for intersections).
/// Errors: UnknownAttribute, FewerThanTwoGroups, EmptyGroup.
GroupAssignment assign_groups(const Dataset& dataset, const GroupingSpec& spec);

GroupingKind parse_grouping_kind(const std::string& text);

}  // namespace fairweight
