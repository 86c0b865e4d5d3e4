#include "shapcf/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "shapcf/error.hpp"

namespace shapcf {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, std::size_t line_no) {
  const std::string cell = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                       ": cannot parse '" + cell + "' as a number");
  }
  return value;
}

}  // namespace

Dataset read_csv(std::istream& in, const std::optional<std::string>& label_column) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "empty CSV input");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  std::optional<std::size_t> label_index;
  if (label_column) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == *label_column) label_index = c;
    }
    if (!label_index) {
      throw Error(ErrorCode::kUnknownColumn, "no column named '" + *label_column + "'");
    }
  }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!label_index || c != *label_index) names.push_back(header[c]);
  }

  std::vector<double> features;
  std::optional<std::vector<double>> labels;
  if (label_index) labels.emplace();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + " has " +
                                         std::to_string(cells.size()) + " cells, expected " +
                                         std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double v = parse_number(cells[c], line_no);
      if (label_index && c == *label_index) {
        labels->push_back(v);
      } else {
        features.push_back(v);
      }
    }
  }
  return Dataset(std::move(names), std::move(features), std::move(labels),
                 label_column.value_or(""));
}

Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path.string());
  return read_csv(in, label_column);
}

OwnerPartition partition_from_json(const nlohmann::ordered_json& doc, std::size_t universe) {
  if (!doc.is_object() || !doc.contains("owners") || !doc["owners"].is_object()) {
    throw Error(ErrorCode::kParse, "partition JSON needs an \"owners\" object");
  }
  std::vector<std::string> names;
  std::vector<EntrySet> sets;
  for (const auto& [name, ids] : doc["owners"].items()) {
    if (!ids.is_array()) {
      throw Error(ErrorCode::kParse, "owner '" + name + "' must map to an id array");
    }
    EntrySet set(universe);
    for (const auto& id : ids) {
      if (!id.is_number_integer() || id.get<long long>() < 0) {
        throw Error(ErrorCode::kParse, "owner '" + name + "' has a non-integer id");
      }
      const auto value = id.get<unsigned long long>();
      if (value >= universe) {
        throw Error(ErrorCode::kInvalidArgument,
                    "owner '" + name + "' references entry " + std::to_string(value) +
                        " outside the dataset");
      }
      set.insert(entry(static_cast<std::uint32_t>(value)));
    }
    names.push_back(name);
    sets.push_back(std::move(set));
  }
  return OwnerPartition(universe, std::move(names), std::move(sets));
}

nlohmann::ordered_json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path.string());
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

OwnerPartition load_partition(const std::filesystem::path& path, std::size_t universe) {
  return partition_from_json(load_json(path), universe);
}

OwnerPartition load_partition(const std::filesystem::path& path) {
  const auto doc = load_json(path);
  std::size_t universe = 0;
  if (doc.contains("owners") && doc["owners"].is_object()) {
    for (const auto& [name, ids] : doc["owners"].items()) {
      if (!ids.is_array()) continue;
      for (const auto& id : ids) {
        if (id.is_number_unsigned()) {
          universe = std::max<std::size_t>(universe, id.get<std::size_t>() + 1);
        }
      }
    }
  }
  return partition_from_json(doc, universe);
}

nlohmann::ordered_json partition_to_json(const OwnerPartition& partition) {
  nlohmann::ordered_json owners = nlohmann::ordered_json::object();
  for (std::uint32_t i = 0; i < partition.size(); ++i) {
    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (EntryId id : partition.entries(owner(i)).ids()) ids.push_back(to_index(id));
    owners[partition.name(owner(i))] = std::move(ids);
  }
  return {{"owners", std::move(owners)}};
}

}  // namespace shapcf
