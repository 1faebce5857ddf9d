#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing in
// here calls into the code path an oracle is meant to check.

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "osmosis/osmosis.hpp"

namespace osmosis::testing {

inline TracePtr constant_trace(double w_per_kwp, UtcTime start, int hours,
                               std::string id = "constant") {
  std::vector<TraceSample> s;
  for (int h = 0; h < hours; ++h) s.push_back({start + std::chrono::hours{h}, w_per_kwp, std::nullopt});
  return std::make_shared<const IrradianceTrace>(std::move(id), std::move(s));
}

inline TracePtr hourly_trace(const std::vector<double>& values, UtcTime start,
                             std::string id = "hourly") {
  std::vector<TraceSample> s;
  for (std::size_t h = 0; h < values.size(); ++h) {
    s.push_back({start + std::chrono::hours{static_cast<int>(h)}, values[h], std::nullopt});
  }
  return std::make_shared<const IrradianceTrace>(std::move(id), std::move(s));
}

inline TracePtr shared(IrradianceTrace t) { return std::make_shared<const IrradianceTrace>(std::move(t)); }

/// Great-circle distance from the cross/dot product of unit vectors.
inline double great_circle_oracle_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double a[3] = {std::cos(lat1 * rad) * std::cos(lon1 * rad),
                       std::cos(lat1 * rad) * std::sin(lon1 * rad), std::sin(lat1 * rad)};
  const double b[3] = {std::cos(lat2 * rad) * std::cos(lon2 * rad),
                       std::cos(lat2 * rad) * std::sin(lon2 * rad), std::sin(lat2 * rad)};
  const double cx = a[1] * b[2] - a[2] * b[1];
  const double cy = a[2] * b[0] - a[0] * b[2];
  const double cz = a[0] * b[1] - a[1] * b[0];
  const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return 6371.0 * std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
}

/// Energy of a half-sine day profile by one-minute rectangle integration, Wh per kWp.
inline double half_sine_day_oracle_wh(double peak, double sunrise, double sunset) {
  double wh = 0.0;
  for (int m = 0; m < 24 * 60; ++m) {
    const double h = m / 60.0;
    if (h <= sunrise || h >= sunset) continue;
    wh += peak * std::sin(std::numbers::pi * (h - sunrise) / (sunset - sunrise)) / 60.0;
  }
  return wh;
}

/// Brute-force reading of the device-agent plan: for each abstract MEL,
/// enumerate every (message, instance) pair and keep the earliest pair whose
/// r equals the maximum r seen for that family.
inline std::map<std::string, std::string> max_r_first_seen_oracle(
    const std::vector<AgentMessage>& inbox) {
  std::map<std::string, double> best_r;
  for (const auto& m : inbox) {
    for (const auto& s : m.content.mel_list) {
      const auto fam = s.substr(0, s.rfind('.'));
      auto it = best_r.find(fam);
      if (it == best_r.end() || m.content.r > it->second) best_r[fam] = m.content.r;
    }
  }
  std::map<std::string, std::string> out;
  for (const auto& [fam, r] : best_r) {
    bool found = false;
    for (const auto& m : inbox) {
      if (found) break;
      if (m.content.r != r) continue;
      for (const auto& s : m.content.mel_list) {
        if (s.substr(0, s.rfind('.')) == fam) {
          out[fam] = s;
          found = true;
          break;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// In-memory scenarios
// ---------------------------------------------------------------------------

inline DatacenterSpec make_dc(std::string id, DatacenterKind kind, GeoPoint loc, TracePtr trace,
                              double peak_kwp, double res_u, double p_low,
                              EnergyPolicy policy = EnergyPolicy::OnGrid) {
  DatacenterSpec dc;
  dc.id = std::move(id);
  dc.kind = kind;
  dc.location = loc;
  dc.policy = policy;
  dc.res_utilization = res_u;
  dc.grid = PowerGrid{0.25, p_low, std::min(p_low, 0.2)};
  if (trace) dc.solar = SolarSpec{"", std::move(trace), peak_kwp, 35.0, 0.0, std::nullopt};
  return dc;
}

inline DeviceSpec make_camera(std::string id, GeoPoint loc, TracePtr trace) {
  DeviceSpec d;
  d.id = std::move(id);
  d.location = loc;
  d.battery.capacity_mah = 3000;
  d.battery.charge_mah = 2000;
  d.battery.voltage_v = 3.7;
  d.battery.panel_peak_w = 10;
  d.battery.max_charge_current_ma = 1000;
  d.trace = std::move(trace);
  d.transaction_period_s = 300;
  d.mah_per_transaction = 2;
  d.idle_ma = 10;
  return d;
}

inline constexpr GeoPoint kBerlin{52.52, 13.40};
inline constexpr GeoPoint kParis{48.8, 2.30};
inline constexpr GeoPoint kDublin{53.35, -6.30};

struct EvalTraces {
  TracePtr berlin;
  TracePtr paris;
  TracePtr dublin;
  TracePtr device;
};

/// Full-year 2016 traces: Berlin clear mornings, Paris clear afternoons.
inline EvalTraces anti_correlated_traces() {
  ClearSkyOptions o;
  o.start = calendar::make_utc(2016, 1, 1);
  EvalTraces t;
  o.morning_factor = 1.0;
  o.afternoon_factor = 0.2;
  t.berlin = shared(synth_clear_sky(1000, 5.5, 18.5, 366, o));
  o.morning_factor = 0.2;
  o.afternoon_factor = 1.0;
  t.paris = shared(synth_clear_sky(1000, 5.5, 18.5, 366, o));
  o.morning_factor = 1.0;
  t.dublin = shared(synth_clear_sky(1000, 5.5, 18.5, 366, o));
  t.device = shared(synth_clear_sky(1000, 6, 18, 366, o));
  return t;
}

/// Same topology as scenarios/paper_eval.json, built in memory.
inline Scenario eval_scenario(const EvalTraces& tr, double p_low_berlin = 0.5,
                              double p_low_paris = 0.9) {
  Scenario sc;
  sc.name = "eval";
  sc.sim.start = calendar::make_utc(2016, 6, 21);
  sc.sim.duration_s = 86400;
  sc.sim.seed = 42;
  sc.datacenters.push_back(make_dc("berlin", DatacenterKind::Edge, kBerlin, tr.berlin, 10, 0.6, p_low_berlin));
  sc.datacenters.push_back(make_dc("paris", DatacenterKind::Edge, kParis, tr.paris, 10, 0.6, p_low_paris));
  sc.datacenters.push_back(make_dc("dublin", DatacenterKind::Cloud, kDublin, tr.dublin, 50, 0.4, 0.45));
  sc.devices.push_back(make_camera("camera_1", kBerlin, tr.device));
  sc.devices.push_back(make_camera("camera_2", GeoPoint{52.51, 13.38}, tr.device));
  sc.abstract_mels = {{"MEL_B", 5.0}, {"MEL_C", 20.0}};
  sc.instances = {{"MEL_B.1", "", "berlin", std::nullopt},
                  {"MEL_B.2", "", "paris", std::nullopt},
                  {"MEL_C.1", "", "dublin", std::nullopt}};
  sc.flows = {{"camera_1_stream", "camera_1", {"MEL_B", "MEL_C"}},
              {"camera_2_stream", "camera_2", {"MEL_B", "MEL_C"}}};
  sc.algorithm = Algorithm::ALG4;
  sc.cooperation = Cooperation::Communicating;
  sc.static_edges = {{Algorithm::ALG1, "berlin"}, {Algorithm::ALG2, "paris"}};
  return sc;
}

/// Random small scenario for property tests: 1-4 edge DCs plus a cloud DC,
/// random hourly traces and grid shares, random processing times.
inline Scenario random_scenario(std::mt19937_64& rng, SimTime duration_s = 6 * 3600) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform_int = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  Scenario sc;
  sc.name = "random";
  sc.sim.start = calendar::make_utc(2016, 3, 1, uniform_int(0, 23));
  sc.sim.duration_s = duration_s;
  sc.sim.energy_tick_s = 300;
  sc.sim.mape_period_s = 900 * uniform_int(1, 4);
  sc.sim.metric_sampling = unit(rng) < 0.5 ? MetricSampling::HopStart : MetricSampling::TransactionStart;
  const int hours = static_cast<int>(duration_s / 3600) + 48;
  const UtcTime trace_start = calendar::floor_hour(sc.sim.start) - std::chrono::hours{24};

  const int n_edges = uniform_int(1, 4);
  auto random_trace = [&](const std::string& id) {
    std::vector<double> v;
    const double scale = 1500.0 * unit(rng);
    for (int h = 0; h < hours; ++h) v.push_back(unit(rng) < 0.3 ? 0.0 : scale * unit(rng));
    return hourly_trace(v, trace_start, id);
  };
  auto random_dc = [&](const std::string& id, DatacenterKind kind) {
    const GeoPoint loc{-60.0 + 120.0 * unit(rng), -170.0 + 340.0 * unit(rng)};
    auto dc = make_dc(id, kind, loc, random_trace(id), 1.0 + 20.0 * unit(rng),
                      0.05 + 0.95 * unit(rng), unit(rng));
    dc.solar->annual_energy_kwh = 100.0 + 20000.0 * unit(rng);
    if (unit(rng) < 0.2) {
      dc.policy = EnergyPolicy::GridOnly;
    } else if (unit(rng) < 0.3) {
      dc.policy = EnergyPolicy::OnGridEnergyStorage;
      dc.battery = BatteryStore{5000.0 * unit(rng), 0.0, 500.0 + 5000.0 * unit(rng), 0.8 + 0.2 * unit(rng)};
    }
    return dc;
  };
  for (int i = 0; i < n_edges; ++i) {
    sc.datacenters.push_back(random_dc("edge" + std::to_string(i), DatacenterKind::Edge));
  }
  sc.datacenters.push_back(random_dc("cloud", DatacenterKind::Cloud));

  const int n_devices = uniform_int(1, 3);
  for (int i = 0; i < n_devices; ++i) {
    auto dev = make_camera("dev" + std::to_string(i),
                           GeoPoint{-60.0 + 120.0 * unit(rng), -170.0 + 340.0 * unit(rng)},
                           random_trace("dev" + std::to_string(i)));
    dev.transaction_period_s = 60 * uniform_int(1, 20);
    dev.phase_jitter_s = uniform_int(0, 120);
    sc.devices.push_back(dev);
  }
  sc.abstract_mels = {{"MEL_E", 0.5 + 30.0 * unit(rng)}, {"MEL_C", 0.5 + 60.0 * unit(rng)}};
  int k = 1;
  for (int i = 0; i < n_edges; ++i) {
    sc.instances.push_back({"MEL_E." + std::to_string(k++), "", "edge" + std::to_string(i),
                            unit(rng) < 0.3 ? std::optional<double>(0.1 + 10 * unit(rng)) : std::nullopt});
  }
  sc.instances.push_back({"MEL_C.1", "", "cloud", std::nullopt});
  for (int i = 0; i < n_devices; ++i) {
    sc.flows.push_back({"flow" + std::to_string(i), "dev" + std::to_string(i), {"MEL_E", "MEL_C"}});
  }
  const Algorithm algs[] = {Algorithm::ALG1, Algorithm::ALG2, Algorithm::ALG3, Algorithm::ALG4,
                            Algorithm::ALG5};
  sc.algorithm = algs[rng() % 5];
  const Cooperation coops[] = {Cooperation::Independent, Cooperation::Communicating,
                               Cooperation::Central};
  sc.cooperation = coops[rng() % 3];
  sc.static_edges = {{Algorithm::ALG1, "edge0"},
                     {Algorithm::ALG2, "edge" + std::to_string(n_edges - 1)}};
  sc.sim.seed = rng();
  return sc;
}

}  // namespace osmosis::testing
