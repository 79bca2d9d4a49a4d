#include "precog/ingestion.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace precog {

using nlohmann::json;

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

std::string json_scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw IngestionError("expected a scalar value, got " + v.dump());
}

std::string row_list(const std::vector<std::size_t>& rows) {
  std::string s;
  for (std::size_t i = 0; i < rows.size() && i < 20; ++i) s += (i ? ", " : "") + std::to_string(rows[i]);
  if (rows.size() > 20) s += ", ...";
  return s;
}

void finish(std::vector<Example>& out, const std::vector<std::size_t>& empty_rows) {
  if (!empty_rows.empty()) {
    throw IngestionError("empty first segment on row(s) " + row_list(empty_rows));
  }
  std::unordered_set<std::string> ids;
  for (const Example& e : out) {
    if (!ids.insert(e.id).second) throw IngestionError("duplicate example id '" + e.id + "' in task " + e.task);
  }
}

std::vector<Example> parse_jsonl(std::string_view text, const TaskSchema& schema) {
  std::vector<Example> out;
  std::vector<std::size_t> empty_rows;
  std::size_t row_index = 0;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    json j = json::parse(lines[ln], nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw IngestionError("line " + std::to_string(ln + 1) + ": not a JSON object");
    auto field = [&](const std::string& name) -> const json& {
      if (!j.contains(name)) throw IngestionError("line " + std::to_string(ln + 1) + ": missing field '" + name + "'");
      return j[name];
    };
    Example e;
    e.task = schema.task;
    e.id = schema.id_field.empty() ? std::to_string(row_index) : trim(json_scalar_to_string(field(schema.id_field)));
    e.segment_a = json_scalar_to_string(field(schema.a_field));
    if (!schema.b_field.empty() && j.contains(schema.b_field) && !j[schema.b_field].is_null()) {
      e.segment_b = json_scalar_to_string(j[schema.b_field]);
    }
    e.gold_label = schema.map_label(json_scalar_to_string(field(schema.label_field)));
    if (trim(e.segment_a).empty()) empty_rows.push_back(ln + 1);
    out.push_back(std::move(e));
    ++row_index;
  }
  finish(out, empty_rows);
  return out;
}

std::vector<Example> parse_tsv(std::string_view text, const TaskSchema& schema) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw IngestionError("TSV file has no header row");
  const auto header = split_tabs(lines[0]);
  auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw IngestionError("missing column '" + name + "'");
  };
  const std::optional<std::size_t> id_col =
      schema.id_field.empty() ? std::nullopt : std::optional<std::size_t>(column(schema.id_field));
  const std::size_t a_col = column(schema.a_field);
  const std::optional<std::size_t> b_col =
      schema.b_field.empty() ? std::nullopt : std::optional<std::size_t>(column(schema.b_field));
  const std::size_t label_col = column(schema.label_field);

  std::vector<Example> out;
  std::vector<std::size_t> empty_rows;
  std::size_t row_index = 0;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto cells = split_tabs(lines[ln]);
    if (cells.size() != header.size()) {
      throw IngestionError("line " + std::to_string(ln + 1) + ": expected " + std::to_string(header.size()) +
                           " columns, got " + std::to_string(cells.size()));
    }
    Example e;
    e.task = schema.task;
    e.id = id_col ? trim(cells[*id_col]) : std::to_string(row_index);
    e.segment_a = std::string(cells[a_col]);
    if (b_col) e.segment_b = std::string(cells[*b_col]);
    e.gold_label = schema.map_label(cells[label_col]);
    if (trim(e.segment_a).empty()) empty_rows.push_back(ln + 1);
    out.push_back(std::move(e));
    ++row_index;
  }
  finish(out, empty_rows);
  return out;
}

}  // namespace

std::string trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::optional<DatasetFormat> parse_format(std::string_view name) {
  if (name == "jsonl") return DatasetFormat::jsonl;
  if (name == "tsv") return DatasetFormat::tsv;
  return std::nullopt;
}

std::string TaskSchema::map_label(std::string_view raw) const {
  std::string t = trim(raw);
  if (auto it = label_map.find(t); it != label_map.end()) return it->second;
  return t;
}

std::vector<Example> parse_dataset(std::string_view text, DatasetFormat format, const TaskSchema& schema) {
  return format == DatasetFormat::jsonl ? parse_jsonl(text, schema) : parse_tsv(text, schema);
}

std::vector<Example> load_dataset(const std::filesystem::path& path, DatasetFormat format, const TaskSchema& schema) {
  try {
    return parse_dataset(read_file(path), format, schema);
  } catch (const IngestionError& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

std::string format_dataset_jsonl(const std::vector<Example>& examples) {
  std::string out;
  for (const Example& e : examples) {
    json j;
    j["id"] = e.id;
    j["a"] = e.segment_a;
    if (e.segment_b) j["b"] = *e.segment_b;
    j["label"] = e.gold_label;
    out += j.dump();
    out += '\n';
  }
  return out;
}

double PredictionSet::accuracy() const {
  if (records.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& r : records) correct += r.correct;
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

PredictionSet parse_predictions(std::string_view text, const std::vector<Example>& dataset, const TaskSchema& schema) {
  std::unordered_map<std::string, const Example*> by_id;
  for (const Example& e : dataset) by_id.emplace(e.id, &e);

  std::unordered_map<std::string, PredictionRecord> found;
  std::vector<std::string> unknown;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    json j = json::parse(lines[ln], nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("label")) {
      throw IngestionError("line " + std::to_string(ln + 1) + ": expected {\"id\", \"label\"}");
    }
    std::string id = trim(json_scalar_to_string(j["id"]));
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      unknown.push_back(id);
      continue;
    }
    PredictionRecord rec{id, it->second->task, schema.map_label(json_scalar_to_string(j["label"])), false};
    rec.correct = rec.predicted_label == it->second->gold_label;
    if (!found.emplace(id, std::move(rec)).second) throw IngestionError("duplicate prediction for id '" + id + "'");
  }
  if (!unknown.empty()) {
    std::string ids;
    for (std::size_t i = 0; i < unknown.size() && i < 20; ++i) ids += (i ? ", " : "") + unknown[i];
    throw IngestionError(std::to_string(unknown.size()) + " prediction(s) reference unknown example id(s): " + ids);
  }

  PredictionSet out;
  for (const Example& e : dataset) {
    auto it = found.find(e.id);
    if (it == found.end()) {
      out.missing_ids.push_back(e.id);
    } else {
      out.records.push_back(std::move(it->second));
    }
  }
  if (!out.missing_ids.empty()) {
    spdlog::warn("{} example(s) have no prediction and are excluded from accuracy", out.missing_ids.size());
  }
  return out;
}

PredictionSet load_predictions(const std::filesystem::path& path, const std::vector<Example>& dataset,
                               const TaskSchema& schema) {
  try {
    return parse_predictions(read_file(path), dataset, schema);
  } catch (const IngestionError& e) {
    throw IngestionError(path.string() + ": " + e.what());
  }
}

}  // namespace precog
