#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fairweight {

/// Sorted, duplicate-free example indices into a Dataset.
using IndexSet = std::vector<std::size_t>;

struct Example {
  std::vector<double> features;
  int label = 0;
  /// Source columns by name, as text. Grouping reads from here.
  std::map<std::string, std::string> raw_attributes;
};

/// Immutable table of labelled examples. Indices 0..size()-1 are the
/// identifiers every other module uses.
class Dataset {
 public:
  /// `attribute_names` fixes the column order used when writing back to CSV;
  /// when empty it is taken from the first example's raw attributes.
  Dataset(std::vector<Example> examples, std::vector<std::string> feature_names,
          std::string label_name, std::vector<std::string> attribute_names = {});

  std::size_t size() const noexcept { return examples_.size(); }
  std::size_t feature_count() const noexcept { return feature_names_.size(); }

  const Example& operator[](std::size_t i) const { return examples_[i]; }
  const std::vector<Example>& examples() const noexcept { return examples_; }
  int label(std::size_t i) const { return examples_[i].label; }
  std::span<const double> features(std::size_t i) const { return examples_[i].features; }

  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::string& label_name() const noexcept { return label_name_; }
  const std::vector<std::string>& attribute_names() const noexcept { return attribute_names_; }

  /// Indices 0..size()-1.
  IndexSet all_indices() const;

 private:
  std::vector<Example> examples_;
  std::vector<std::string> feature_names_;
  std::string label_name_;
  std::vector<std::string> attribute_names_;
};

struct CsvOptions {
  std::string label_column;
  std::string positive_label = "1";
  /// Columns to use as numeric features. Unset: every non-label column whose
  /// cells all parse as finite numbers.
  std::optional<std::vector<std::string>> feature_columns;
};

/// Loads a header-first, comma-separated file. Every non-label column is kept
/// in raw_attributes; numeric feature columns also become features.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options);
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& positive_label);

/// Parses CSV text already in memory; `source` is used in diagnostics.
Dataset parse_csv(const std::string& text, const CsvOptions& options,
                  const std::string& source = "<memory>");

/// Writes attributes (as their original text), any feature column without a
/// raw attribute, then the label as 0/1.
void write_csv(const Dataset& dataset, const std::filesystem::path& path);
std::string to_csv(const Dataset& dataset);

struct SplitSpec {
  double train_fraction = 0.6;
  double validation_fraction = 0.2;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DataSplit {
  IndexSet train;
  IndexSet validation;
  IndexSet test;
};

/// Seeded shuffle, then validation and test take floor(fraction * N) rows each
/// and the remainder goes to train. All three sets must come out nonempty.
DataSplit split(const Dataset& dataset, const SplitSpec& spec);

/// Sorted intersection of two index sets.
IndexSet intersect(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace fairweight
