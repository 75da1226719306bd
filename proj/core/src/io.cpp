#include "sramdp/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "sramdp/errors.hpp"

namespace sramdp::io {

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw NumericError("failed to format a double value");
  }
  return std::string(buf, ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open file for reading: " + path);
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot open file for writing: " + path);
  }
  out << content;
  if (!out) {
    throw ConfigError("failed while writing file: " + path);
  }
}

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

bool parse_u32(const std::string& field, std::uint32_t& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  std::uint32_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) return false;
  out = value;
  return true;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

std::vector<std::uint32_t> read_value_column(
    const std::string& path, const std::vector<std::string>& preferred) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<std::uint32_t> values;
  std::size_t column = 0;
  bool first = true;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (first) {
      first = false;
      std::uint32_t probe = 0;
      if (!parse_u32(fields[0], probe)) {
        // Header row: pick the first preferred column name present.
        bool found = false;
        for (const std::string& name : preferred) {
          for (std::size_t i = 0; i < fields.size(); ++i) {
            if (fields[i] == name) {
              column = i;
              found = true;
              break;
            }
          }
          if (found) break;
        }
        if (!found) {
          std::string wanted;
          for (const std::string& name : preferred) {
            if (!wanted.empty()) wanted += " or ";
            wanted += "'" + name + "'";
          }
          throw ConfigError(path + ": no column named " + wanted +
                            " in the header");
        }
        continue;
      }
      if (fields.size() != 1) {
        throw ConfigError(path + ": files without a header must have a "
                          "single column");
      }
    }
    if (column >= fields.size()) {
      throw ConfigError(path + ":" + std::to_string(line_number) +
                        ": row has too few columns");
    }
    std::uint32_t value = 0;
    if (!parse_u32(fields[column], value)) {
      throw ConfigError(path + ":" + std::to_string(line_number) +
                        ": '" + fields[column] +
                        "' is not an unsigned integer");
    }
    values.push_back(value);
  }
  if (values.empty()) {
    throw ConfigError(path + ": no data rows");
  }
  return values;
}

std::string privacy_report_json(const PrivacyReport& report) {
  nlohmann::ordered_json j;
  j["epsilon_total"] = report.epsilon_total;
  nlohmann::ordered_json bits = nlohmann::ordered_json::array();
  for (const PrivacyReport::PerBit& b : report.per_bit) {
    nlohmann::ordered_json e;
    e["position"] = b.position;
    e["f"] = b.f;
    if (b.epsilon) {
      e["epsilon"] = *b.epsilon;
    } else if (report.intact_as_infinite) {
      e["epsilon"] = "inf";
    } else {
      e["epsilon"] = nullptr;
    }
    bits.push_back(std::move(e));
  }
  j["per_bit"] = std::move(bits);
  if (!report.alpha.empty()) {
    j["alpha"] = report.alpha;
  }
  if (report.drift_bound) {
    j["drift_bound"] = *report.drift_bound;
  }
  if (report.ia_mean) {
    j["ia_mean"] = *report.ia_mean;
    j["ia_samples"] = report.ia_samples;
  }
  return j.dump(2) + "\n";
}

}  // namespace sramdp::io
