#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace precog {

class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Example {
  std::string id;
  std::string task;
  std::string segment_a;
  std::optional<std::string> segment_b;
  std::string gold_label;

  bool operator==(const Example&) const = default;
};

struct PredictionRecord {
  std::string example_id;
  std::string task;
  std::string predicted_label;
  bool correct = false;
};

enum class DatasetFormat { jsonl, tsv };
std::optional<DatasetFormat> parse_format(std::string_view name);

/// Column/field names for one task. An empty id_field numbers rows from 0;
/// an empty b_field makes every example single-segment. For JSONL the b
/// field may also be absent or null on individual rows.
struct TaskSchema {
  std::string task = "task";
  std::string id_field = "id";
  std::string a_field = "a";
  std::string b_field = "b";
  std::string label_field = "label";
  /// Applied to gold and predicted labels before comparison.
  std::map<std::string, std::string> label_map;

  std::string map_label(std::string_view raw) const;
};

std::vector<Example> load_dataset(const std::filesystem::path& path, DatasetFormat format, const TaskSchema& schema);
std::vector<Example> parse_dataset(std::string_view text, DatasetFormat format, const TaskSchema& schema);

/// Writes the canonical JSONL form {id, a, b?, label}.
std::string format_dataset_jsonl(const std::vector<Example>& examples);

struct PredictionSet {
  std::vector<PredictionRecord> records;
  /// Dataset examples without a prediction row; excluded from accuracy.
  std::vector<std::string> missing_ids;

  double accuracy() const;
};

/// Predictions JSONL: {id, label}. Unknown or duplicated ids are errors.
PredictionSet load_predictions(const std::filesystem::path& path, const std::vector<Example>& dataset,
                               const TaskSchema& schema = {});
PredictionSet parse_predictions(std::string_view text, const std::vector<Example>& dataset,
                                const TaskSchema& schema = {});

std::string trim(std::string_view s);
std::string read_file(const std::filesystem::path& path);

}  // namespace precog
