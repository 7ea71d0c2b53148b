#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qwflow/time_series.hpp"

namespace qwflow {

enum class Format { Csv, Json };

std::optional<Format> parse_format(std::string_view s);

// %.17g, with "nan" for undefined values.
std::string format_double(double x);

// Header `t,nu_marked,nu_unmarked,norm_kn`, LF line endings.
std::string series_to_csv(const TimeSeries& series);
// Column arrays; undefined values become null.
nlohmann::json series_to_json(const TimeSeries& series);

// Inverse of series_to_csv for the exported columns. Throws ConfigError on
// a malformed header or row.
TimeSeries parse_series_csv(std::string_view text);

// Writes the series to `path`. Empty series: ConfigError, nothing written.
// Stream failures: IoError naming the path.
void export_series(const TimeSeries& series, Format format, const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace qwflow
