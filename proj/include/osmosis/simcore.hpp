#pragma once

// Deterministic discrete-event core: integer-second clock, a single global
// event queue ordered by (fire_time, sequence_no), and calendar helpers used
// to anchor simulated time to trace hours.

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace osmosis {

using SimTime = std::int64_t;  // seconds since simulation epoch
using UtcTime = std::chrono::sys_seconds;

enum class EventKind : std::uint8_t {
  TransactionArrival,
  MapeTick,
  EnergyTick,
  MessageDelivery,
  SimEnd,
};

inline constexpr std::size_t kEventKindCount = 5;

constexpr std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::TransactionArrival: return "transaction-arrival";
    case EventKind::MapeTick: return "mape-tick";
    case EventKind::EnergyTick: return "energy-tick";
    case EventKind::MessageDelivery: return "message-delivery";
    case EventKind::SimEnd: return "sim-end";
  }
  return "unknown";
}

struct Event {
  SimTime fire_time = 0;
  std::uint64_t sequence_no = 0;
  EventKind kind = EventKind::SimEnd;
  std::function<void(SimTime)> handler;
};

struct SimulationSummary {
  SimTime clock = 0;
  std::array<std::uint64_t, kEventKindCount> dispatched{};
  std::size_t pending = 0;

  std::uint64_t total_dispatched() const {
    std::uint64_t n = 0;
    for (auto c : dispatched) n += c;
    return n;
  }
  std::uint64_t count(EventKind kind) const {
    return dispatched[static_cast<std::size_t>(kind)];
  }
  bool operator==(const SimulationSummary&) const = default;
};

class SchedulingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Scheduler {
 public:
  Scheduler() = default;
  explicit Scheduler(UtcTime epoch) : epoch_(epoch) {}

  SimTime now() const { return now_; }
  UtcTime epoch() const { return epoch_; }
  UtcTime to_utc(SimTime t) const { return epoch_ + std::chrono::seconds{t}; }

  /// Enqueue a handler. Returns the assigned sequence number.
  std::uint64_t schedule(SimTime fire_time, EventKind kind,
                         std::function<void(SimTime)> handler = {}) {
    if (fire_time < now_) {
      throw SchedulingError("cannot schedule " + std::string(to_string(kind)) +
                            " event at t=" + std::to_string(fire_time) +
                            " before current time t=" + std::to_string(now_));
    }
    const auto seq = next_seq_++;
    queue_.push(Event{fire_time, seq, kind, std::move(handler)});
    return seq;
  }

  /// Dispatch every event with fire_time <= end_time, then park the clock at
  /// end_time. Events scheduled by handlers during the run are honored.
  SimulationSummary run_until(SimTime end_time) {
    if (end_time < now_) {
      throw SchedulingError("run_until target t=" + std::to_string(end_time) +
                            " is before current time t=" + std::to_string(now_));
    }
    while (!queue_.empty() && queue_.top().fire_time <= end_time) {
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.fire_time;
      ++summary_.dispatched[static_cast<std::size_t>(ev.kind)];
      if (ev.handler) ev.handler(now_);
    }
    now_ = end_time;
    summary_.clock = now_;
    summary_.pending = queue_.size();
    return summary_;
  }

  std::size_t pending() const { return queue_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.sequence_no > b.sequence_no;
    }
  };

  UtcTime epoch_{};
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  SimulationSummary summary_{};
};

// ---------------------------------------------------------------------------
// Calendar helpers
// ---------------------------------------------------------------------------

namespace calendar {

inline UtcTime make_utc(int y, unsigned m, unsigned d, int hour = 0, int minute = 0,
                        int second = 0) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw std::invalid_argument("invalid calendar date");
  return sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second};
}

inline int year_of(UtcTime t) {
  using namespace std::chrono;
  return static_cast<int>(year_month_day{floor<days>(t)}.year());
}

inline std::int64_t hours_in_year(int y) {
  return std::chrono::year{y}.is_leap() ? 8784 : 8760;
}

inline UtcTime floor_hour(UtcTime t) {
  return std::chrono::floor<std::chrono::hours>(t);
}

inline int hour_of_day(UtcTime t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  return static_cast<int>(duration_cast<hours>(t - day_start).count());
}

namespace detail {
inline bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}
}  // namespace detail

/// Parses the PVGIS hourly stamp `YYYYMMDD:HHMM`.
inline UtcTime parse_pvgis_stamp(std::string_view s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  if (s.size() != 13 || s[8] != ':' || !detail::read_digits(s, 0, 4, y) ||
      !detail::read_digits(s, 4, 2, mo) || !detail::read_digits(s, 6, 2, d) ||
      !detail::read_digits(s, 9, 2, h) || !detail::read_digits(s, 11, 2, mi) || h > 23 ||
      mi > 59) {
    throw std::invalid_argument("malformed time stamp '" + std::string(s) +
                                "' (expected YYYYMMDD:HHMM)");
  }
  return make_utc(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi);
}

/// Parses `YYYY-MM-DDTHH:MM:SSZ` (the trailing Z and seconds are optional).
inline UtcTime parse_iso(std::string_view s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  bool ok = s.size() >= 10 && detail::read_digits(s, 0, 4, y) && s[4] == '-' &&
            detail::read_digits(s, 5, 2, mo) && s[7] == '-' && detail::read_digits(s, 8, 2, d);
  std::size_t pos = 10;
  if (ok && pos < s.size()) {
    ok = (s[pos] == 'T' || s[pos] == ' ') && detail::read_digits(s, pos + 1, 2, h) &&
         s.size() > pos + 3 && s[pos + 3] == ':' && detail::read_digits(s, pos + 4, 2, mi);
    pos += 6;
    if (ok && pos < s.size() && s[pos] == ':') {
      ok = detail::read_digits(s, pos + 1, 2, sec);
      pos += 3;
    }
    if (ok && pos < s.size() && s[pos] == 'Z') ++pos;
    ok = ok && pos == s.size();
  }
  if (!ok || h > 23 || mi > 59 || sec > 59) {
    throw std::invalid_argument("malformed date-time '" + std::string(s) +
                                "' (expected YYYY-MM-DDTHH:MM:SSZ)");
  }
  return make_utc(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, sec);
}

inline std::string format_pvgis_stamp(UtcTime t) {
  using namespace std::chrono;
  const auto dp = floor<days>(t);
  const year_month_day ymd{dp};
  const hh_mm_ss hms{t - dp};
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u:%02ld%02ld", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()));
  return buf;
}

inline std::string format_iso(UtcTime t) {
  using namespace std::chrono;
  const auto dp = floor<days>(t);
  const year_month_day ymd{dp};
  const hh_mm_ss hms{t - dp};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

}  // namespace calendar
}  // namespace osmosis
