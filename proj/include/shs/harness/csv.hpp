#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace shs {

/// Shortest round-trip-safe text for a double: 17 significant digits.
std::string format_number(double v);

/// Comma separated rows; fields containing a comma, quote or newline are
/// quoted.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(&out) {}

  void header(const std::vector<std::string>& names);
  CsvWriter& field(const std::string& s);
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  void end_row();

 private:
  void separator();

  std::ostream* out_;
  bool row_open_ = false;
};

}  // namespace shs
