#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace swarm {

/// Shortest decimal that reads back to the same double ("inf", "-inf", "nan" otherwise).
std::string format_double(double value);

/// RFC-4180 field quoting.
std::string csv_field(std::string_view text);

/// Writes RFC-4180 rows with LF line endings.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace swarm
