#include "qwflow/series_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "qwflow/errors.hpp"

namespace qwflow {

namespace {

constexpr std::string_view kCsvHeader = "t,nu_marked,nu_unmarked,norm_kn";

double parse_double(const std::string& field, std::size_t line) {
  if (field == "nan") return kUndefined;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE) {
    throw ConfigError("line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return v;
}

}  // namespace

std::optional<Format> parse_format(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  return std::nullopt;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string series_to_csv(const TimeSeries& series) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : series.records) {
    out += std::to_string(r.t);
    out += ',';
    out += format_double(r.nu_marked);
    out += ',';
    out += format_double(r.nu_unmarked);
    out += ',';
    out += format_double(r.norm_kn);
    out += '\n';
  }
  return out;
}

nlohmann::json series_to_json(const TimeSeries& series) {
  auto column = [&](auto get) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : series.records) {
      const double v = get(r);
      arr.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
    }
    return arr;
  };
  nlohmann::json t = nlohmann::json::array();
  for (const auto& r : series.records) t.push_back(r.t);
  return {
      {"method", series.method},
      {"n", series.n_vertices},
      {"t", t},
      {"nu_marked", column([](const StepRecord& r) { return r.nu_marked; })},
      {"nu_unmarked", column([](const StepRecord& r) { return r.nu_unmarked; })},
      {"norm_kn", column([](const StepRecord& r) { return r.norm_kn; })},
  };
}

TimeSeries parse_series_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ConfigError("expected CSV header '" + std::string(kCsvHeader) + "'");
  }
  TimeSeries series;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 4) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 4 fields");
    }
    StepRecord r;
    r.t = static_cast<int>(parse_double(fields[0], lineno));
    r.nu_marked = parse_double(fields[1], lineno);
    r.nu_unmarked = parse_double(fields[2], lineno);
    r.norm_kn = parse_double(fields[3], lineno);
    series.records.push_back(r);
  }
  return series;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void export_series(const TimeSeries& series, Format format, const std::filesystem::path& path) {
  if (series.empty()) throw ConfigError("refusing to export an empty series to '" + path.string() + "'");
  if (format == Format::Csv) {
    write_text_file(path, series_to_csv(series));
  } else {
    write_text_file(path, series_to_json(series).dump(2) + "\n");
  }
}

}  // namespace qwflow
