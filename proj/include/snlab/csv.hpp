#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace snlab {

// Comma-separated output with LF endings and 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);

  static std::string number(double v);
  static std::string integer(long long v);

 private:
  std::ostream& os_;
  size_t width_;
};

std::string format_g17(double v);

}  // namespace snlab
