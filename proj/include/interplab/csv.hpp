#pragma once

#include <optional>
#include <string>
#include <vector>

#include "interplab/common.hpp"

namespace interplab {

// Shortest round-trip decimal representation (std::to_chars). Non-finite
// values map to the sentinel strings used across all serialized output.
std::string format_double(double v);

inline constexpr const char* kNegInfCell = "neg_inf";
inline constexpr const char* kPosInfCell = "pos_inf";
inline constexpr const char* kInfeasibleCell = "infeasible";

std::string ext_real_cell(const ExtReal& v);

struct CsvTable {
  std::string schema;  // emitted as a leading comment line, pinned by tests
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  std::string to_json() const;  // array of objects keyed by header
};

void write_text_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

}  // namespace interplab
