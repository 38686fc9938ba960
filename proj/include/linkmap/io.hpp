#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace linkmap {

std::vector<std::string_view> split(std::string_view text, char sep);

std::string read_file(const std::string& path);

enum class AtomicWriteStage { TempOpened, TempHalfWritten, TempWritten, BeforeRename };

/// Writes `content` to a sibling temp file, flushes it to disk, then renames
/// it over `path`. A reader never observes a truncated file. `fault` is called
/// at each stage and may throw to simulate a crash.
void write_file_atomic(const std::string& path, std::string_view content,
                       const std::function<void(AtomicWriteStage)>& fault = {});

/// RFC 4180 field quoting (only when needed).
std::string csv_field(std::string_view value);
/// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> parse_csv_line(std::string_view line);

/// Decimal form with 17 significant digits ("%.17g"); round-trips exactly.
std::string format_double(double value);

/// `YYYY-MM-DDTHH:MM:SSZ` for UTC seconds since the epoch.
std::string format_utc(std::int64_t seconds);
std::optional<std::int64_t> parse_utc(std::string_view text);
std::int64_t utc_now();

} // namespace linkmap
