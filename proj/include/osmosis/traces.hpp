#pragma once

// Hourly PV production traces (PVGIS-style CSV) with zero-order-hold lookup.

#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "osmosis/simcore.hpp"

namespace osmosis {

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceSample {
  UtcTime hour_start;
  double power_per_kwp = 0.0;  // W per kWp installed
  std::optional<double> ghi;   // W/m2
};

class IrradianceTrace {
 public:
  IrradianceTrace() = default;

  /// Validates the hourly grid and sample signs. Throws TraceError.
  IrradianceTrace(std::string location_id, std::vector<TraceSample> samples)
      : location_id_(std::move(location_id)), samples_(std::move(samples)) {
    if (samples_.empty()) throw TraceError("trace '" + location_id_ + "' has no samples");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto& s = samples_[i];
      if (s.hour_start != calendar::floor_hour(s.hour_start)) {
        throw TraceError("sample " + calendar::format_pvgis_stamp(s.hour_start) +
                         " is not aligned to an hour");
      }
      if (!(s.power_per_kwp >= 0.0) || !std::isfinite(s.power_per_kwp)) {
        throw TraceError("negative or non-finite power at " +
                         calendar::format_pvgis_stamp(s.hour_start));
      }
      if (s.ghi && (!(*s.ghi >= 0.0) || !std::isfinite(*s.ghi))) {
        throw TraceError("negative or non-finite ghi at " +
                         calendar::format_pvgis_stamp(s.hour_start));
      }
      if (i > 0) {
        const auto expected = samples_[i - 1].hour_start + std::chrono::hours{1};
        if (s.hour_start < expected) {
          throw TraceError("sample " + calendar::format_pvgis_stamp(s.hour_start) +
                           " is duplicated or out of order");
        }
        if (s.hour_start > expected) {
          throw TraceError("gap in hourly grid: missing hour " +
                           calendar::format_pvgis_stamp(expected));
        }
      }
    }
  }

  const std::string& location_id() const { return location_id_; }
  const std::vector<TraceSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

  UtcTime coverage_start() const { return samples_.front().hour_start; }
  /// Exclusive end: one hour past the last sample.
  UtcTime coverage_end() const { return samples_.back().hour_start + std::chrono::hours{1}; }

  bool covers(UtcTime t) const { return t >= coverage_start() && t < coverage_end(); }
  bool covers(UtcTime from, UtcTime to) const {
    return from >= coverage_start() && to <= coverage_end() && from <= to;
  }

  const TraceSample& sample_at(UtcTime t) const {
    if (!covers(t)) {
      throw TraceError("time " + calendar::format_iso(t) + " outside trace '" + location_id_ +
                       "' coverage [" + calendar::format_iso(coverage_start()) + ", " +
                       calendar::format_iso(coverage_end()) + ")");
    }
    const auto idx = std::chrono::duration_cast<std::chrono::hours>(t - coverage_start()).count();
    return samples_[static_cast<std::size_t>(idx)];
  }

  /// W per kWp of the hour bucket containing t.
  double power_at(UtcTime t) const { return sample_at(t).power_per_kwp; }

  std::optional<double> ghi_at(UtcTime t) const { return sample_at(t).ghi; }

  bool has_ghi() const { return samples_.front().ghi.has_value(); }

  /// True if every hour of calendar year `y` is present.
  bool covers_year(int y) const {
    return covers(calendar::make_utc(y, 1, 1), calendar::make_utc(y + 1, 1, 1));
  }

  /// Calls fn(segment_start, segment_seconds, power_per_kwp) for each piece of
  /// [from, from + dt) that lies inside one hour bucket.
  template <typename Fn>
  void for_each_segment(UtcTime from, std::int64_t dt, Fn&& fn) const {
    UtcTime t = from;
    const UtcTime end = from + std::chrono::seconds{dt};
    while (t < end) {
      const UtcTime bucket_end = calendar::floor_hour(t) + std::chrono::hours{1};
      const UtcTime seg_end = bucket_end < end ? bucket_end : end;
      fn(t, (seg_end - t).count(), power_at(t));
      t = seg_end;
    }
  }

 private:
  std::string location_id_;
  std::vector<TraceSample> samples_;
};

using TracePtr = std::shared_ptr<const IrradianceTrace>;

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

namespace detail {
inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number(const std::string& field, std::size_t line_no, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (field.empty() || used != field.size()) {
    throw TraceError("line " + std::to_string(line_no) + ": malformed " + what + " '" + field +
                     "'");
  }
  return v;
}
}  // namespace detail

/// Parses `time,pv_w_per_kwp[,ghi_wm2]` rows. Errors carry the line number.
inline IrradianceTrace parse_trace(std::istream& in, std::string location_id) {
  std::string line;
  std::size_t line_no = 0;
  bool with_ghi = false;
  bool saw_header = false;
  std::vector<TraceSample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = detail::split_csv(trimmed);
    if (!saw_header) {
      saw_header = true;
      if (fields.size() == 2 && fields[0] == "time" && fields[1] == "pv_w_per_kwp") continue;
      if (fields.size() == 3 && fields[0] == "time" && fields[1] == "pv_w_per_kwp" &&
          fields[2] == "ghi_wm2") {
        with_ghi = true;
        continue;
      }
      throw TraceError("line " + std::to_string(line_no) +
                       ": expected header 'time,pv_w_per_kwp[,ghi_wm2]'");
    }
    const std::size_t want = with_ghi ? 3 : 2;
    if (fields.size() != want) {
      throw TraceError("line " + std::to_string(line_no) + ": expected " + std::to_string(want) +
                       " fields, got " + std::to_string(fields.size()));
    }
    TraceSample s;
    try {
      s.hour_start = calendar::parse_pvgis_stamp(fields[0]);
    } catch (const std::invalid_argument& e) {
      throw TraceError("line " + std::to_string(line_no) + ": " + e.what());
    }
    s.power_per_kwp = detail::parse_number(fields[1], line_no, "pv_w_per_kwp");
    if (s.power_per_kwp < 0.0) {
      throw TraceError("line " + std::to_string(line_no) + ": pv_w_per_kwp must be >= 0, got " +
                       fields[1]);
    }
    if (with_ghi) {
      s.ghi = detail::parse_number(fields[2], line_no, "ghi_wm2");
      if (*s.ghi < 0.0) {
        throw TraceError("line " + std::to_string(line_no) + ": ghi_wm2 must be >= 0, got " +
                         fields[2]);
      }
    }
    if (!samples.empty()) {
      const auto expected = samples.back().hour_start + std::chrono::hours{1};
      if (s.hour_start > expected) {
        throw TraceError("line " + std::to_string(line_no) + ": gap in hourly grid, missing hour " +
                         calendar::format_pvgis_stamp(expected));
      }
      if (s.hour_start < expected) {
        throw TraceError("line " + std::to_string(line_no) + ": time " + fields[0] +
                         " is duplicated or out of order");
      }
    }
    samples.push_back(s);
  }
  if (samples.empty()) throw TraceError("trace '" + location_id + "' is empty");
  return IrradianceTrace(std::move(location_id), std::move(samples));
}

inline IrradianceTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace file '" + path + "'");
  try {
    return parse_trace(in, path);
  } catch (const TraceError& e) {
    throw TraceError(path + ": " + e.what());
  }
}

inline void write_trace(std::ostream& out, const IrradianceTrace& trace) {
  const bool with_ghi = trace.has_ghi();
  out << (with_ghi ? "time,pv_w_per_kwp,ghi_wm2\n" : "time,pv_w_per_kwp\n");
  char buf[64];
  for (const auto& s : trace.samples()) {
    out << calendar::format_pvgis_stamp(s.hour_start);
    std::snprintf(buf, sizeof buf, ",%.4f", s.power_per_kwp);
    out << buf;
    if (with_ghi) {
      std::snprintf(buf, sizeof buf, ",%.4f", s.ghi.value_or(0.0));
      out << buf;
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Synthetic traces
// ---------------------------------------------------------------------------

struct ClearSkyOptions {
  UtcTime start = calendar::make_utc(2015, 1, 1);
  // Multipliers for hours strictly before / after solar noon, for building
  // cloudy-morning or cloudy-afternoon profiles.
  double morning_factor = 1.0;
  double afternoon_factor = 1.0;
  std::string location_id = "synthetic";
};

/// Half-sine day profile sampled at each hour start: peak at solar noon,
/// zero outside [sunrise, sunset].
inline double clear_sky_value(double peak, double sunrise, double sunset, double hour) {
  if (hour <= sunrise || hour >= sunset) return 0.0;
  const double v = peak * std::sin(std::numbers::pi * (hour - sunrise) / (sunset - sunrise));
  return v > 0.0 ? v : 0.0;
}

inline IrradianceTrace synth_clear_sky(double peak, double sunrise, double sunset, int days,
                                       const ClearSkyOptions& opts = {}) {
  if (!(sunrise >= 0.0 && sunrise < sunset && sunset <= 24.0)) {
    throw std::invalid_argument("synth_clear_sky requires 0 <= sunrise < sunset <= 24");
  }
  if (peak < 0.0) throw std::invalid_argument("synth_clear_sky requires peak >= 0");
  if (days <= 0) throw std::invalid_argument("synth_clear_sky requires days > 0");
  const double noon = 0.5 * (sunrise + sunset);
  const UtcTime start = std::chrono::floor<std::chrono::days>(opts.start);
  std::vector<TraceSample> samples;
  samples.reserve(static_cast<std::size_t>(days) * 24);
  for (int d = 0; d < days; ++d) {
    for (int h = 0; h < 24; ++h) {
      double v = clear_sky_value(peak, sunrise, sunset, h);
      if (h < noon) v *= opts.morning_factor;
      if (h > noon) v *= opts.afternoon_factor;
      samples.push_back({start + std::chrono::hours{d * 24 + h}, v, std::nullopt});
    }
  }
  return IrradianceTrace(opts.location_id, std::move(samples));
}

/// Sum of W/kWp over every hour of the calendar year `year` (Wh per kWp).
inline double yearly_wh_per_kwp(const IrradianceTrace& trace, int year) {
  if (!trace.covers_year(year)) {
    throw TraceError("trace '" + trace.location_id() + "' does not cover every hour of " +
                     std::to_string(year));
  }
  const auto first = calendar::make_utc(year, 1, 1);
  const auto offset = std::chrono::duration_cast<std::chrono::hours>(first - trace.coverage_start())
                          .count();
  const auto n = calendar::hours_in_year(year);
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    sum += trace.samples()[static_cast<std::size_t>(offset + i)].power_per_kwp;
  }
  return sum;
}

/// Annual PV energy in kWh for a `peak_kwp` installation.
inline double annual_energy(const IrradianceTrace& trace, double peak_kwp, int year) {
  return peak_kwp * yearly_wh_per_kwp(trace, year) / 1000.0;
}

/// Uses the calendar year in which the trace starts.
inline double annual_energy(const IrradianceTrace& trace, double peak_kwp) {
  return annual_energy(trace, peak_kwp, calendar::year_of(trace.coverage_start()));
}

}  // namespace osmosis
