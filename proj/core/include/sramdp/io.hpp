#ifndef SRAMDP_IO_HPP_
#define SRAMDP_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sramdp/privacy.hpp"

namespace sramdp::io {

// Shortest decimal form that round-trips to the same double, so emitted
// artifacts are byte-stable across runs and platforms with IEEE doubles.
std::string format_double(double value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Splits one CSV line on commas.  Fields are trimmed of surrounding
// whitespace; quoting is not supported (none of the emitted files need it).
std::vector<std::string> split_csv_line(const std::string& line);

// Reads one column of unsigned integers from a CSV file.  If the file
// starts with a header row, the first column whose name appears in
// `preferred` is used (in preference order); files without a header must
// have exactly one column.
std::vector<std::uint32_t> read_value_column(
    const std::string& path, const std::vector<std::string>& preferred);

std::string privacy_report_json(const PrivacyReport& report);

}  // namespace sramdp::io

#endif  // SRAMDP_IO_HPP_
