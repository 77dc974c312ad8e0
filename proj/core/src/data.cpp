#include "fairweight/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

#include "fairweight/error.hpp"

namespace fairweight {
namespace {

bool parse_finite(std::string_view text, double& out) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return false;
  }
  out = value;
  return true;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        current.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Dataset::Dataset(std::vector<Example> examples, std::vector<std::string> feature_names,
                 std::string label_name, std::vector<std::string> attribute_names)
    : examples_(std::move(examples)),
      feature_names_(std::move(feature_names)),
      label_name_(std::move(label_name)),
      attribute_names_(std::move(attribute_names)) {
  if (examples_.empty()) {
    throw Error(ErrorCode::EmptyDataset, "dataset has no examples");
  }
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const Example& ex = examples_[i];
    if (ex.label != 0 && ex.label != 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "example " + std::to_string(i) + " has label outside {0,1}");
    }
    if (ex.features.size() != feature_names_.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "example " + std::to_string(i) + " has " + std::to_string(ex.features.size()) +
                      " features, expected " + std::to_string(feature_names_.size()));
    }
  }
  if (attribute_names_.empty()) {
    for (const auto& [name, value] : examples_.front().raw_attributes) {
      attribute_names_.push_back(name);
    }
  }
}

IndexSet Dataset::all_indices() const {
  IndexSet out(examples_.size());
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

Dataset parse_csv(const std::string& text, const CsvOptions& options, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      header = split_fields(line);
      have_header = true;
      continue;
    }
    rows.push_back(split_fields(line));
  }
  if (!have_header) {
    throw Error(ErrorCode::EmptyDataset, source + ": no header row");
  }

  const auto find_column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorCode::MissingColumn, source + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t label_col = find_column(options.label_column);

  if (rows.empty()) {
    throw Error(ErrorCode::EmptyDataset, source + ": no data rows");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  source + ": row " + std::to_string(r + 1) + " has " +
                      std::to_string(rows[r].size()) + " fields, header has " +
                      std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (rows[r][c].empty()) {
        throw Error(ErrorCode::InvalidArgument, source + ": missing value at row " +
                                                    std::to_string(r + 1) + ", column '" +
                                                    header[c] + "'");
      }
    }
  }

  std::vector<std::size_t> feature_cols;
  if (options.feature_columns) {
    for (const auto& name : *options.feature_columns) {
      const std::size_t c = find_column(name);
      if (c == label_col) {
        throw Error(ErrorCode::InvalidArgument, source + ": label column used as a feature");
      }
      feature_cols.push_back(c);
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == label_col) continue;
      double scratch = 0.0;
      const bool numeric = std::all_of(rows.begin(), rows.end(), [&](const auto& row) {
        return parse_finite(row[c], scratch);
      });
      if (numeric) feature_cols.push_back(c);
    }
  }

  std::vector<std::string> feature_names;
  for (std::size_t c : feature_cols) feature_names.push_back(header[c]);
  std::vector<std::string> attribute_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_col) attribute_names.push_back(header[c]);
  }

  std::vector<Example> examples;
  examples.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Example ex;
    ex.features.reserve(feature_cols.size());
    for (std::size_t c : feature_cols) {
      double value = 0.0;
      if (!parse_finite(rows[r][c], value)) {
        throw Error(ErrorCode::UnparsableNumeric,
                    source + ": cannot parse '" + rows[r][c] + "' as a number at row " +
                        std::to_string(r + 1) + ", column '" + header[c] + "'");
      }
      ex.features.push_back(value);
    }
    ex.label = rows[r][label_col] == options.positive_label ? 1 : 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != label_col) ex.raw_attributes.emplace(header[c], rows[r][c]);
    }
    examples.push_back(std::move(ex));
  }
  return Dataset(std::move(examples), std::move(feature_names), options.label_column,
                 std::move(attribute_names));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::NotFound, "cannot open data file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), options, path.string());
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& positive_label) {
  CsvOptions options;
  options.label_column = label_column;
  options.positive_label = positive_label;
  return load_csv(path, options);
}

std::string to_csv(const Dataset& dataset) {
  std::vector<std::string> columns = dataset.attribute_names();
  std::vector<std::size_t> extra_features;
  for (std::size_t f = 0; f < dataset.feature_count(); ++f) {
    const auto& name = dataset.feature_names()[f];
    if (std::find(columns.begin(), columns.end(), name) == columns.end()) {
      extra_features.push_back(f);
    }
  }
  std::string out;
  const auto append_row = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out.push_back(',');
      out += quote_if_needed(fields[i]);
    }
    out.push_back('\n');
  };

  std::vector<std::string> header = columns;
  for (std::size_t f : extra_features) header.push_back(dataset.feature_names()[f]);
  header.push_back(dataset.label_name());
  append_row(header);

  for (const Example& ex : dataset.examples()) {
    std::vector<std::string> fields;
    fields.reserve(header.size());
    for (const auto& name : columns) {
      auto it = ex.raw_attributes.find(name);
      if (it != ex.raw_attributes.end()) {
        fields.push_back(it->second);
        continue;
      }
      auto fit = std::find(dataset.feature_names().begin(), dataset.feature_names().end(), name);
      if (fit == dataset.feature_names().end()) {
        throw Error(ErrorCode::InvalidArgument, "example lacks attribute '" + name + "'");
      }
      fields.push_back(format_number(ex.features[fit - dataset.feature_names().begin()]));
    }
    for (std::size_t f : extra_features) fields.push_back(format_number(ex.features[f]));
    fields.push_back(ex.label ? "1" : "0");
    append_row(fields);
  }
  return out;
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  }
  out << to_csv(dataset);
}

void SplitSpec::validate() const {
  for (double f : {train_fraction, validation_fraction, test_fraction}) {
    if (!(f > 0.0 && f < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "split fractions must lie in (0,1)");
    }
  }
  if (std::abs(train_fraction + validation_fraction + test_fraction - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "split fractions must sum to 1");
  }
}

DataSplit split(const Dataset& dataset, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = dataset.size();
  if (n < 3) {
    throw Error(ErrorCode::DatasetTooSmall,
                "need at least 3 examples to split, have " + std::to_string(n));
  }
  // The small slack keeps e.g. 0.2 * 10 from flooring to 1.
  const auto take = [n](double fraction) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  };
  const std::size_t n_val = take(spec.validation_fraction);
  const std::size_t n_test = take(spec.test_fraction);
  if (n_val == 0 || n_test == 0 || n_val + n_test >= n) {
    throw Error(ErrorCode::DatasetTooSmall,
                "split of " + std::to_string(n) + " examples leaves an empty set");
  }

  IndexSet order = dataset.all_indices();
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  DataSplit out;
  out.validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val),
                  order.begin() + static_cast<std::ptrdiff_t>(n_val + n_test));
  out.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val + n_test), order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

IndexSet intersect(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace fairweight
