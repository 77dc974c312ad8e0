#include "fairweight/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fairweight/error.hpp"

namespace fairweight::cli {
namespace {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    fail(key + ": expected a number, got '" + value + "'");
  }
  return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) fail(key + ": expected a nonnegative integer, got '" + value + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  std::string lower = value;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "true" || lower == "1" || lower == "yes") return true;
  if (lower == "false" || lower == "0" || lower == "no") return false;
  fail(key + ": expected true or false, got '" + value + "'");
}

std::vector<std::string> to_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct PendingConstraint {
  std::string id;
  std::optional<std::string> g1, g2, metric;
  std::optional<double> epsilon, c_fp, c_fn;
};

MetricSpec build_metric(const std::string& where, const std::string& kind,
                        std::optional<double> c_fp, std::optional<double> c_fn) {
  MetricSpec spec(parse_metric_kind(kind));
  if (spec.kind == MetricKind::Custom) fail(where + ": custom metrics are only available through the library");
  if (spec.kind == MetricKind::AEC) {
    if (!c_fp || !c_fn) fail(where + ": AEC needs c_fp and c_fn");
    spec = MetricSpec::aec(*c_fp, *c_fn);
  } else if (c_fp || c_fn) {
    fail(where + ": c_fp/c_fn only apply to AEC");
  }
  return spec;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : to_list(text)) out.push_back(to_double("list", item));
  return out;
}

void RunConfig::set_seed(std::uint64_t value) {
  seed = value;
  split.seed = value;
  tuner.seed = value;
}

void RunConfig::validate() const {
  if (data_path.empty()) fail("data.path is required");
  if (csv.label_column.empty()) fail("data.label must not be empty");
  split.validate();
  logreg.validate();
  tree.validate();
  tuner.validate();
  if (learner_kind != "logreg" && learner_kind != "tree") {
    fail("learner.kind must be logreg or tree, got '" + learner_kind + "'");
  }
  if (grouping.kind == GroupingKind::CustomPredicate) {
    fail("grouping.kind custom_predicate is only available through the library");
  }
  if (grouping.attribute_names.empty()) fail("grouping.attributes is required");
  if (!(grid_step > 0.0) || !(grid_max >= 0.0)) fail("grid.step must be > 0 and grid.max >= 0");
  if (sweep_jobs == 0) fail("sweep.jobs must be at least 1");
  for (const auto& c : constraints) {
    if (!(c.epsilon >= 0.0)) fail("constraint." + c.id + ".epsilon must be >= 0");
  }
  if (pairwise_epsilon && !(*pairwise_epsilon >= 0.0)) fail("fairness.epsilon must be >= 0");
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig config;
  std::set<std::string> seen;
  std::vector<PendingConstraint> pending;
  std::optional<double> c_fp, c_fn;
  std::string metric_kind = "SP";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> grouping_kind;

  std::stringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second) fail("line " + std::to_string(line_no) + ": duplicate key " + key);

    if (key == "data.path") {
      config.data_path = value;
    } else if (key == "data.label") {
      config.csv.label_column = value;
    } else if (key == "data.positive_label") {
      config.csv.positive_label = value;
    } else if (key == "data.features") {
      config.csv.feature_columns = to_list(value);
    } else if (key == "split.train") {
      config.split.train_fraction = to_double(key, value);
    } else if (key == "split.validation") {
      config.split.validation_fraction = to_double(key, value);
    } else if (key == "split.test") {
      config.split.test_fraction = to_double(key, value);
    } else if (key == "grouping.kind") {
      grouping_kind = value;
    } else if (key == "grouping.attributes") {
      config.grouping.attribute_names = to_list(value);
    } else if (key == "metric.kind") {
      metric_kind = value;
    } else if (key == "metric.c_fp") {
      c_fp = to_double(key, value);
    } else if (key == "metric.c_fn") {
      c_fn = to_double(key, value);
    } else if (key == "fairness.epsilon") {
      config.pairwise_epsilon = to_double(key, value);
    } else if (key == "learner.kind") {
      config.learner_kind = value;
    } else if (key == "learner.learning_rate") {
      config.logreg.learning_rate = to_double(key, value);
    } else if (key == "learner.epochs") {
      config.logreg.epochs = static_cast<int>(to_unsigned(key, value));
    } else if (key == "learner.l2") {
      config.logreg.l2 = to_double(key, value);
    } else if (key == "learner.tolerance") {
      config.logreg.tolerance = to_double(key, value);
    } else if (key == "learner.max_depth") {
      config.tree.max_depth = static_cast<int>(to_unsigned(key, value));
    } else if (key == "learner.min_leaf_weight") {
      config.tree.min_leaf_weight = to_double(key, value);
    } else if (key == "tuner.tau") {
      config.tuner.tau = to_double(key, value);
    } else if (key == "tuner.delta") {
      config.tuner.delta = to_double(key, value);
    } else if (key == "tuner.lambda_cap") {
      config.tuner.lambda_cap = to_double(key, value);
    } else if (key == "tuner.max_linear_steps") {
      config.tuner.max_linear_steps = to_unsigned(key, value);
    } else if (key == "tuner.warm_start") {
      config.tuner.warm_start = to_bool(key, value);
    } else if (key == "grid.step") {
      config.grid_step = to_double(key, value);
    } else if (key == "grid.max") {
      config.grid_max = to_double(key, value);
    } else if (key == "sweep.epsilons") {
      config.sweep_epsilons = parse_number_list(value);
    } else if (key == "sweep.jobs") {
      config.sweep_jobs = to_unsigned(key, value);
    } else if (key == "output.dir") {
      config.output_dir = value;
    } else if (key == "seed") {
      seed = to_unsigned(key, value);
    } else if (key.rfind("constraint.", 0) == 0) {
      const std::string rest = key.substr(11);
      const auto dot = rest.rfind('.');
      if (dot == std::string::npos || dot == 0) fail("malformed constraint key " + key);
      const std::string id = rest.substr(0, dot);
      const std::string field = rest.substr(dot + 1);
      auto it = std::find_if(pending.begin(), pending.end(),
                             [&](const PendingConstraint& p) { return p.id == id; });
      if (it == pending.end()) {
        pending.push_back({id, {}, {}, {}, {}, {}, {}});
        it = std::prev(pending.end());
      }
      if (field == "g1") {
        it->g1 = value;
      } else if (field == "g2") {
        it->g2 = value;
      } else if (field == "epsilon") {
        it->epsilon = to_double(key, value);
      } else if (field == "metric") {
        it->metric = value;
      } else if (field == "c_fp") {
        it->c_fp = to_double(key, value);
      } else if (field == "c_fn") {
        it->c_fn = to_double(key, value);
      } else {
        fail("unknown key " + key);
      }
    } else {
      fail("unknown key " + key);
    }
  }

  if (grouping_kind) {
    const GroupingKind kind = parse_grouping_kind(*grouping_kind);
    config.grouping.kind = kind;
  } else if (config.grouping.attribute_names.size() > 1) {
    config.grouping.kind = GroupingKind::ByAttributeIntersection;
  }
  config.metric = build_metric("metric", metric_kind, c_fp, c_fn);

  for (const auto& p : pending) {
    const std::string where = "constraint." + p.id;
    if (!p.g1 || !p.g2 || !p.epsilon) fail(where + " needs g1, g2 and epsilon");
    if (*p.g1 == *p.g2) fail(where + ": g1 and g2 must differ");
    MetricSpec metric = config.metric;
    if (p.metric) {
      const bool aec = parse_metric_kind(*p.metric) == MetricKind::AEC;
      metric = build_metric(where, *p.metric, p.c_fp ? p.c_fp : (aec ? c_fp : std::nullopt),
                            p.c_fn ? p.c_fn : (aec ? c_fn : std::nullopt));
    } else if (p.c_fp || p.c_fn) {
      fail(where + ": c_fp/c_fn need an explicit metric");
    }
    config.constraints.push_back({p.id, metric, *p.g1, *p.g2, *p.epsilon});
  }

  if (!config.data_path.empty() && config.data_path.is_relative() && !base_dir.empty()) {
    config.data_path = base_dir / config.data_path;
  }
  if (config.output_dir.is_relative() && !base_dir.empty()) {
    config.output_dir = base_dir / config.output_dir;
  }
  config.set_seed(seed.value_or(0));
  try {
    config.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

}  // namespace fairweight::cli
