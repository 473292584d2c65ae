#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace posdelay {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;
};

/// Fields containing a comma, quote or newline are quoted, quotes doubled.
void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);

/// Shortest text that round-trips (17 significant digits); nan/inf spelled out.
std::string format_real(double v);
double parse_real(std::string_view text);

}  // namespace posdelay
