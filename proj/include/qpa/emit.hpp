#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qpa {

/// 17 significant digits ("%.17g"); "nan", "inf", "-inf" for non-finite.
std::string format_double(double x);

/// Shortest round-trip representation, used for column labels.
std::string format_short(double x);

using CsvRow = std::vector<std::string>;

/// Header plus rows, `\n` line endings, fields quoted only when they
/// contain a comma, quote or newline. Throws std::invalid_argument when a
/// row's width differs from the header's; IO failures surface as
/// std::system_error carrying errno.
void emit_csv(const std::vector<std::string>& header, const std::vector<CsvRow>& rows,
              const std::filesystem::path& path);

std::string csv_text(const std::vector<std::string>& header, const std::vector<CsvRow>& rows);

void write_text(const std::filesystem::path& path, std::string_view text);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

/// UTC, ISO 8601 to the second.
std::string utc_timestamp();

}  // namespace qpa
