#include "snlab/csv.hpp"

#include <cmath>
#include <cstdio>

#include "snlab/errors.hpp"

namespace snlab {

std::string format_g17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header)
    : os_(os), width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw DomainError("csv row width mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    os_ << cells[i];
  }
  os_ << '\n';
}

std::string CsvWriter::number(double v) { return format_g17(v); }
std::string CsvWriter::integer(long long v) { return std::to_string(v); }

}  // namespace snlab
