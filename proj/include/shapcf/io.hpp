#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>

#include <json.hpp>

#include "shapcf/dataset.hpp"
#include "shapcf/partition.hpp"

namespace shapcf {

// CSV with a header row. Every cell must parse as a finite number. When
// `label_column` is given that column becomes the label and is dropped from
// the features (UnknownColumn if absent).
Dataset read_csv(std::istream& in, const std::optional<std::string>& label_column = {});
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column = {});

// {"owners": {"A": [ids...], ...}}; owner order follows the document.
OwnerPartition partition_from_json(const nlohmann::ordered_json& doc,
                                   std::size_t universe);
OwnerPartition load_partition(const std::filesystem::path& path, std::size_t universe);
// Universe inferred as 1 + the largest id mentioned.
OwnerPartition load_partition(const std::filesystem::path& path);

nlohmann::ordered_json partition_to_json(const OwnerPartition& partition);

nlohmann::ordered_json load_json(const std::filesystem::path& path);

}  // namespace shapcf
