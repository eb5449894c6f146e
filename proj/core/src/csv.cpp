#include "csv.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "antikz/error.hpp"

namespace antikz {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvData read_csv(const std::filesystem::path& path, const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (split(line) != columns) throw Error(ErrorKind::Io, path.string() + ": unexpected header");

  CsvData data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != columns.size()) {
      throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(line_no) + ": wrong field count");
    }
    std::vector<double> row;
    for (const std::string& f : fields) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size()) {
        throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(line_no) + ": bad number '" + f + "'");
      }
      row.push_back(v);
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

}  // namespace antikz
