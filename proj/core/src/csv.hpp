#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace antikz {

struct CsvData {
  std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV whose header must equal `columns` exactly.
/// Throws Error(Io) on a missing file, a header mismatch or a malformed field.
CsvData read_csv(const std::filesystem::path& path, const std::vector<std::string>& columns);

}  // namespace antikz
