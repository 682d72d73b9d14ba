#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace attishift::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the row starts
  std::vector<std::string> fields;
};

// RFC 4180 style: comma separated, double-quoted fields may hold commas,
// quotes ("") and newlines. Blank lines are skipped.
std::vector<Row> read(std::istream& in);

std::string quote(std::string_view field);

}  // namespace attishift::csv
