#include "rigidity/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rigidity/errors.hpp"

namespace rigidity::io {

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::sep() {
  if (in_row_++ > 0) out_ += ',';
}

CsvWriter& CsvWriter::cell(std::string_view s) {
  sep();
  out_ += quote_csv(s);
  return *this;
}

CsvWriter& CsvWriter::cell(double v) {
  sep();
  out_ += format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t v) {
  sep();
  out_ += std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::cell(std::uint64_t v) {
  sep();
  out_ += std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::empty() {
  sep();
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) throw std::logic_error("CSV row has the wrong number of cells");
  out_ += "\r\n";
  in_row_ = 0;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string quote_csv(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write to " + path);
  }
  std::filesystem::rename(tmp, p);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::vector<double> read_points_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view field(line);
    field = field.substr(0, field.find(','));
    auto b = field.find_first_not_of(" \t\r\"");
    if (b == std::string_view::npos) continue;
    field = field.substr(b, field.find_last_not_of(" \t\r\"") - b + 1);
    double v = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    const bool numeric = res.ec == std::errc() && res.ptr == field.data() + field.size();
    if (!numeric) {
      if (!seen_row) {
        seen_row = true;  // header
        continue;
      }
      throw SchemaError(path + ":" + std::to_string(lineno) + ": not a number: " + std::string(field));
    }
    seen_row = true;
    out.push_back(v);
  }
  return out;
}

}  // namespace rigidity::io
