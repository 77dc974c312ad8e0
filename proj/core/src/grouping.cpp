#include "fairweight/grouping.hpp"

#include <algorithm>

#include "fairweight/error.hpp"

namespace fairweight {

GroupAssignment::GroupAssignment(std::map<std::string, IndexSet> groups)
    : groups_(std::move(groups)) {
  for (auto& [id, members] : groups_) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
  }
}

const IndexSet& GroupAssignment::at(const std::string& id) const {
  auto it = groups_.find(id);
  if (it == groups_.end()) {
    throw Error(ErrorCode::UnknownGroup, "no group named '" + id + "'");
  }
  return it->second;
}

std::vector<std::string> GroupAssignment::ids() const {
  std::vector<std::string> out;
  out.reserve(groups_.size());
  for (const auto& [id, members] : groups_) out.push_back(id);
  return out;
}

GroupAssignment GroupAssignment::restricted_to(std::span<const std::size_t> scope) const {
  GroupAssignment out;
  for (const auto& [id, members] : groups_) {
    out.groups_.emplace(id, intersect(members, scope));
  }
  return out;
}

GroupingSpec GroupingSpec::by_attribute(std::string attribute) {
  return {GroupingKind::ByAttribute, {std::move(attribute)}, std::nullopt};
}

GroupingSpec GroupingSpec::intersection(std::vector<std::string> attributes) {
  return {GroupingKind::ByAttributeIntersection, std::move(attributes), std::nullopt};
}

GroupingSpec GroupingSpec::custom(std::string predicate_id) {
  return {GroupingKind::CustomPredicate, {}, std::move(predicate_id)};
}

GroupingRegistry& GroupingRegistry::instance() {
  static GroupingRegistry registry;
  return registry;
}

void GroupingRegistry::add(const std::string& id, GroupingPredicate predicate) {
  std::lock_guard lock(mutex_);
  predicates_[id] = std::move(predicate);
}

GroupingPredicate GroupingRegistry::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = predicates_.find(id);
  if (it == predicates_.end()) {
    throw Error(ErrorCode::NotFound, "no grouping predicate registered as '" + id + "'");
  }
  return it->second;
}

GroupingKind parse_grouping_kind(const std::string& text) {
  if (text == "by_attribute") return GroupingKind::ByAttribute;
  if (text == "by_attribute_intersection" || text == "intersection") {
    return GroupingKind::ByAttributeIntersection;
  }
  if (text == "custom_predicate") return GroupingKind::CustomPredicate;
  throw Error(ErrorCode::ConfigError, "unknown grouping kind '" + text + "'");
}

namespace {

std::map<std::string, IndexSet> group_by_attributes(const Dataset& dataset,
                                                    const std::vector<std::string>& attributes) {
  std::map<std::string, IndexSet> groups;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& raw = dataset[i].raw_attributes;
    std::string key;
    for (std::size_t a = 0; a < attributes.size(); ++a) {
      auto it = raw.find(attributes[a]);
      if (it == raw.end()) {
        throw Error(ErrorCode::UnknownAttribute, "unknown attribute '" + attributes[a] + "'");
      }
      if (a) key.push_back('|');
      key += it->second;
    }
    groups[key].push_back(i);
  }
  return groups;
}

}  // namespace

GroupAssignment assign_groups(const Dataset& dataset, const GroupingSpec& spec) {
  std::map<std::string, IndexSet> groups;
  switch (spec.kind) {
    case GroupingKind::ByAttribute:
      if (spec.attribute_names.size() != 1) {
        throw Error(ErrorCode::InvalidArgument, "by_attribute grouping takes exactly one attribute");
      }
      groups = group_by_attributes(dataset, spec.attribute_names);
      break;
    case GroupingKind::ByAttributeIntersection:
      if (spec.attribute_names.size() < 2) {
        throw Error(ErrorCode::InvalidArgument,
                    "intersection grouping needs at least two attributes");
      }
      groups = group_by_attributes(dataset, spec.attribute_names);
      break;
    case GroupingKind::CustomPredicate: {
      if (!spec.predicate_id) {
        throw Error(ErrorCode::InvalidArgument, "custom grouping needs a predicate id");
      }
      groups = GroupingRegistry::instance().get(*spec.predicate_id)(dataset);
      for (const auto& [id, members] : groups) {
        for (std::size_t i : members) {
          if (i >= dataset.size()) {
            throw Error(ErrorCode::InvalidArgument,
                        "group '" + id + "' has out-of-range index " + std::to_string(i));
          }
        }
      }
      break;
    }
  }
  for (const auto& [id, members] : groups) {
    if (members.empty()) throw Error(ErrorCode::EmptyGroup, "group '" + id + "' is empty");
  }
  if (groups.size() < 2) {
    throw Error(ErrorCode::FewerThanTwoGroups,
                "grouping produced " + std::to_string(groups.size()) + " group(s), need 2");
  }
  return GroupAssignment(std::move(groups));
}

}  // namespace fairweight
