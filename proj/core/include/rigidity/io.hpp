#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace rigidity::io {

// RFC 4180 CSV built in memory.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& cell(std::string_view s);
  CsvWriter& cell(double v);
  CsvWriter& cell(std::int64_t v);
  CsvWriter& cell(std::uint64_t v);
  CsvWriter& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
  CsvWriter& empty();
  void end_row();
  const std::string& str() const { return out_; }

 private:
  void sep();
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::string out_;
};

std::string format_double(double v);
std::string quote_csv(std::string_view s);

std::string sha256_hex(std::string_view data);
void write_file(const std::string& path, std::string_view data);
std::string read_file(const std::string& path);
std::string dump_json(const nlohmann::json& j);

// One number per line (first field of each row); an optional non-numeric
// header line and blank lines are skipped.
std::vector<double> read_points_csv(const std::string& path);

}  // namespace rigidity::io
