#include "shs/harness/csv.hpp"

#include <cstdio>

namespace shs {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(n);
  end_row();
}

void CsvWriter::separator() {
  if (row_open_) *out_ << ',';
  row_open_ = true;
}

CsvWriter& CsvWriter::field(const std::string& s) {
  separator();
  if (s.find_first_of(",\"\n") == std::string::npos) {
    *out_ << s;
    return *this;
  }
  *out_ << '"';
  for (char ch : s) {
    if (ch == '"') *out_ << '"';
    *out_ << ch;
  }
  *out_ << '"';
  return *this;
}

CsvWriter& CsvWriter::field(double v) {
  separator();
  *out_ << format_number(v);
  return *this;
}

CsvWriter& CsvWriter::field(long long v) {
  separator();
  *out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  *out_ << '\n';
  row_open_ = false;
}

}  // namespace shs
