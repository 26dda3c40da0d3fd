#include "interplab/csv.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace interplab {

std::string format_double(double v) {
  if (std::isnan(v)) return kInfeasibleCell;
  if (std::isinf(v)) return v > 0 ? kPosInfCell : kNegInfCell;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string ext_real_cell(const ExtReal& v) {
  switch (v.tag) {
    case ExtReal::NegInf: return kNegInfCell;
    case ExtReal::PosInf: return kPosInfCell;
    default: return format_double(v.value);
  }
}

std::string CsvTable::to_csv() const {
  std::string out;
  if (!schema.empty()) out += "# " + schema + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ",";
    out += header[i];
  }
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += row[i];
    }
    out += "\n";
  }
  return out;
}

std::string CsvTable::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json obj;
    for (std::size_t i = 0; i < header.size() && i < row.size(); ++i) obj[header[i]] = row[i];
    arr.push_back(std::move(obj));
  }
  nlohmann::json doc;
  doc["schema"] = schema;
  doc["rows"] = std::move(arr);
  return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LabError("cannot open output file: " + path);
  out << content;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw LabError("cannot create output directory: " + path);
}

}  // namespace interplab
