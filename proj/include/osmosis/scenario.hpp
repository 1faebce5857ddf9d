#pragma once

// Scenario description: in-memory model, JSON loader and validation. The
// loader never stops at the first problem; every violation is reported with
// the path of the offending field.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "osmosis/agents.hpp"
#include "osmosis/energy.hpp"
#include "osmosis/flows.hpp"
#include "osmosis/simcore.hpp"
#include "osmosis/topology.hpp"
#include "osmosis/traces.hpp"

namespace osmosis {

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out = std::to_string(errors.size()) + " scenario error(s)";
    for (const auto& e : errors) out += "\n  " + e;
    return out;
  }
  std::vector<std::string> errors_;
};

struct SimSettings {
  UtcTime start = calendar::make_utc(2016, 6, 21);
  SimTime duration_s = 86400;
  std::int64_t energy_tick_s = 60;
  std::int64_t mape_period_s = 3600;
  std::uint64_t seed = 0;
  MetricSampling metric_sampling = MetricSampling::HopStart;
};

struct SolarSpec {
  std::string trace_path;
  TracePtr trace;
  double peak_kwp = 0.0;
  double tilt_deg = 0.0;
  double azimuth_deg = 0.0;
  std::optional<double> annual_energy_kwh;
};

struct DatacenterSpec {
  std::string id;
  DatacenterKind kind = DatacenterKind::Edge;
  GeoPoint location;
  EnergyPolicy policy = EnergyPolicy::OnGrid;
  double res_utilization = 1.0;
  PowerGrid grid;
  std::optional<SolarSpec> solar;
  std::optional<BatteryStore> battery;
  std::optional<double> avg_draw_kw;
  // Devices this datacenter's agent publishes to; all devices when absent.
  std::optional<std::vector<std::string>> neighbours;
};

struct DeviceSpec {
  std::string id;
  GeoPoint location;
  DeviceBattery battery;
  std::string trace_path;
  TracePtr trace;
  std::int64_t transaction_period_s = 300;
  double mah_per_transaction = 2.0;
  double idle_ma = 10.0;
  // Upper bound of a seeded random offset applied to the first emission.
  std::int64_t phase_jitter_s = 0;
};

struct Scenario {
  std::string name;
  SimSettings sim;
  std::vector<DatacenterSpec> datacenters;
  std::vector<DeviceSpec> devices;
  std::vector<AbstractMel> abstract_mels;
  std::vector<MelInstance> instances;
  std::vector<OsmoticFlow> flows;
  Algorithm algorithm = Algorithm::ALG3;
  Cooperation cooperation = Cooperation::Communicating;
  std::map<Algorithm, std::string> static_edges;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Checks the cross-field invariants of a fully populated scenario.
inline std::vector<std::string> validate_scenario(const Scenario& sc) {
  std::vector<std::string> errs;
  auto err = [&](std::string path, std::string msg) { errs.push_back(path + ": " + msg); };

  if (sc.sim.duration_s <= 0) err("sim.duration_s", "must be > 0");
  if (sc.sim.energy_tick_s <= 0) err("sim.energy_tick_s", "must be > 0");
  if (sc.sim.mape_period_s <= 0) err("sim.mape_period_s", "must be > 0");
  const UtcTime end = sc.sim.start + std::chrono::seconds{std::max<SimTime>(sc.sim.duration_s, 0)};
  const int year = calendar::year_of(sc.sim.start);

  auto check_trace = [&](const std::string& path, const TracePtr& tr) {
    if (!tr) {
      err(path, "trace not loaded");
      return;
    }
    if (!tr->covers(sc.sim.start, end)) {
      err(path, "trace coverage [" + calendar::format_iso(tr->coverage_start()) + ", " +
                    calendar::format_iso(tr->coverage_end()) + ") does not include simulated window [" +
                    calendar::format_iso(sc.sim.start) + ", " + calendar::format_iso(end) + "]");
    }
  };

  std::set<std::string> dc_ids;
  for (std::size_t i = 0; i < sc.datacenters.size(); ++i) {
    const auto& dc = sc.datacenters[i];
    const auto p = "datacenters[" + std::to_string(i) + "]";
    if (dc.id.empty()) err(p + ".id", "must not be empty");
    if (!dc_ids.insert(dc.id).second) err(p + ".id", "duplicate datacenter id '" + dc.id + "'");
    if (!dc.location.valid()) err(p + ".location", "latitude/longitude out of range");
    if (!(dc.res_utilization > 0.0 && dc.res_utilization <= 1.0)) {
      err(p + ".res_utilization", "must lie in (0, 1]");
    }
    try {
      dc.grid.validate();
    } catch (const ConfigError& e) {
      err(p + ".grid", e.what());
    }
    if (dc.battery) {
      try {
        dc.battery->validate();
      } catch (const ConfigError& e) {
        err(p + ".battery", e.what());
      }
    }
    if (dc.policy == EnergyPolicy::OnGridEnergyStorage && !dc.battery) {
      err(p + ".battery", "OnGridEnergyStorage policy requires a battery");
    }
    if (dc.solar) {
      if (!(dc.solar->peak_kwp > 0.0)) err(p + ".solar.peak_kwp", "must be > 0");
      check_trace(p + ".solar.trace", dc.solar->trace);
      if (dc.solar->trace && !dc.solar->annual_energy_kwh && !dc.solar->trace->covers_year(year)) {
        err(p + ".solar.trace",
            "trace must cover every hour of " + std::to_string(year) +
                " to derive the annual yield (or set solar.annual_energy_kwh)");
      }
      if (dc.solar->annual_energy_kwh && !(*dc.solar->annual_energy_kwh >= 0.0)) {
        err(p + ".solar.annual_energy_kwh", "must be >= 0");
      }
    } else {
      if (dc.policy != EnergyPolicy::GridOnly) {
        err(p + ".solar", std::string(to_string(dc.policy)) + " policy requires a solar installation");
      }
      if (!dc.avg_draw_kw) err(p + ".avg_draw_kw", "required when there is no solar installation");
    }
    if (dc.avg_draw_kw && !(*dc.avg_draw_kw >= 0.0)) err(p + ".avg_draw_kw", "must be >= 0");
  }

  std::set<std::string> dev_ids;
  for (std::size_t i = 0; i < sc.devices.size(); ++i) {
    const auto& d = sc.devices[i];
    const auto p = "devices[" + std::to_string(i) + "]";
    if (d.id.empty()) err(p + ".id", "must not be empty");
    if (!dev_ids.insert(d.id).second) err(p + ".id", "duplicate device id '" + d.id + "'");
    if (!d.location.valid()) err(p + ".location", "latitude/longitude out of range");
    try {
      d.battery.validate();
    } catch (const ConfigError& e) {
      err(p + ".battery", e.what());
    }
    if (d.transaction_period_s <= 0) err(p + ".transaction_period_s", "must be > 0");
    if (!(d.mah_per_transaction >= 0.0)) err(p + ".mah_per_transaction", "must be >= 0");
    if (!(d.idle_ma >= 0.0)) err(p + ".idle_ma", "must be >= 0");
    if (d.phase_jitter_s < 0) err(p + ".phase_jitter_s", "must be >= 0");
    if (d.battery.panel_peak_w > 0.0) check_trace(p + ".trace", d.trace);
  }

  for (std::size_t i = 0; i < sc.datacenters.size(); ++i) {
    if (!sc.datacenters[i].neighbours) continue;
    for (const auto& n : *sc.datacenters[i].neighbours) {
      if (!dev_ids.count(n)) {
        err("datacenters[" + std::to_string(i) + "].neighbours", "unknown device '" + n + "'");
      }
    }
  }

  std::set<std::string> abstract_names;
  for (std::size_t i = 0; i < sc.abstract_mels.size(); ++i) {
    const auto& m = sc.abstract_mels[i];
    const auto p = "abstract_mels[" + std::to_string(i) + "]";
    const auto name = normalize_abstract(m.name);
    if (name.empty() || name.find('.') != std::string::npos) {
      err(p + ".name", "abstract MEL name '" + m.name + "' must be NAME or NAME.*");
    }
    if (!abstract_names.insert(name).second) err(p + ".name", "duplicate abstract MEL '" + name + "'");
    if (!(m.processing_time_s > 0.0)) err(p + ".processing_time_s", "must be > 0");
  }

  std::set<std::string> inst_ids;
  std::set<std::string> deployed;
  for (std::size_t i = 0; i < sc.instances.size(); ++i) {
    const auto& in = sc.instances[i];
    const auto p = "instances[" + std::to_string(i) + "]";
    if (!inst_ids.insert(in.id).second) err(p + ".id", "duplicate MEL instance '" + in.id + "'");
    try {
      const auto fam = abstract_of(in.id);
      if (!abstract_names.count(fam)) err(p + ".id", "unknown abstract MEL '" + fam + "'");
      deployed.insert(fam);
    } catch (const TopologyError& e) {
      err(p + ".id", e.what());
    }
    if (!dc_ids.count(in.host)) err(p + ".host", "unknown datacenter '" + in.host + "'");
    if (in.processing_time_override && !(*in.processing_time_override > 0.0)) {
      err(p + ".processing_time_s", "must be > 0");
    }
  }

  std::set<std::string> flow_ids;
  for (std::size_t i = 0; i < sc.flows.size(); ++i) {
    const auto& f = sc.flows[i];
    const auto p = "flows[" + std::to_string(i) + "]";
    if (!flow_ids.insert(f.id).second) err(p + ".id", "duplicate flow id '" + f.id + "'");
    if (!dev_ids.count(f.source_device)) {
      err(p + ".device", "flow '" + f.id + "' references unknown device '" + f.source_device + "'");
    }
    if (f.chain.empty()) err(p + ".chain", "flow '" + f.id + "' has an empty chain");
    for (const auto& raw : f.chain) {
      const auto name = normalize_abstract(raw);
      if (!abstract_names.count(name)) {
        err(p + ".chain", "flow '" + f.id + "' references unknown abstract MEL '" + raw + "'");
      } else if (!deployed.count(name)) {
        err(p + ".chain", "flow '" + f.id + "' is not resolvable: abstract MEL '" + name +
                              "' has no deployed instance");
      }
    }
  }

  for (const auto& [alg, edge] : sc.static_edges) {
    if (!dc_ids.count(edge)) {
      err("static_edges." + std::string(to_string(alg)), "unknown datacenter '" + edge + "'");
    }
  }
  if ((sc.algorithm == Algorithm::ALG1 || sc.algorithm == Algorithm::ALG2) &&
      !sc.static_edges.count(sc.algorithm)) {
    err("static_edges", std::string(to_string(sc.algorithm)) + " requires a static edge datacenter");
  }
  return errs;
}

// ---------------------------------------------------------------------------
// JSON loader
// ---------------------------------------------------------------------------

namespace detail {

class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string>& errs) : errs_(errs) {}

  void error(const std::string& path, const std::string& msg) { errs_.push_back(path + ": " + msg); }

  const nlohmann::json* child(const nlohmann::json& obj, const char* key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  std::optional<double> number(const nlohmann::json& obj, const char* key, const std::string& path,
                               bool required) {
    const auto* v = child(obj, key);
    if (!v) {
      if (required) error(path + "." + key, "missing required number");
      return std::nullopt;
    }
    if (!v->is_number()) {
      error(path + "." + key, "expected a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::int64_t> integer(const nlohmann::json& obj, const char* key,
                                      const std::string& path, bool required) {
    const auto* v = child(obj, key);
    if (!v) {
      if (required) error(path + "." + key, "missing required integer");
      return std::nullopt;
    }
    if (!v->is_number_integer()) {
      error(path + "." + key, "expected an integer");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  std::optional<std::string> string(const nlohmann::json& obj, const char* key,
                                    const std::string& path, bool required) {
    const auto* v = child(obj, key);
    if (!v) {
      if (required) error(path + "." + key, "missing required string");
      return std::nullopt;
    }
    if (!v->is_string()) {
      error(path + "." + key, "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  const nlohmann::json* array(const nlohmann::json& obj, const char* key, const std::string& path,
                              bool required) {
    const auto* v = child(obj, key);
    if (!v) {
      if (required) error(path + "." + key, "missing required list");
      return nullptr;
    }
    if (!v->is_array()) {
      error(path + "." + key, "expected a list");
      return nullptr;
    }
    return v;
  }

  const nlohmann::json* object(const nlohmann::json& obj, const char* key, const std::string& path,
                               bool required) {
    const auto* v = child(obj, key);
    if (!v) {
      if (required) error(path + "." + key, "missing required section");
      return nullptr;
    }
    if (!v->is_object()) {
      error(path + "." + key, "expected an object");
      return nullptr;
    }
    return v;
  }

  std::optional<std::vector<std::string>> strings(const nlohmann::json& obj, const char* key,
                                                  const std::string& path, bool required) {
    const auto* arr = array(obj, key, path, required);
    if (!arr) return std::nullopt;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      if (!(*arr)[i].is_string()) {
        error(path + "." + key + "[" + std::to_string(i) + "]", "expected a string");
        continue;
      }
      out.push_back((*arr)[i].get<std::string>());
    }
    return out;
  }

 private:
  std::vector<std::string>& errs_;
};

class TraceCache {
 public:
  TraceCache(std::filesystem::path base, std::vector<std::string>& errs)
      : base_(std::move(base)), errs_(errs) {}

  TracePtr get(const std::string& rel, const std::string& field_path) {
    const auto full = (std::filesystem::path(rel).is_absolute() ? std::filesystem::path(rel)
                                                                 : base_ / rel)
                          .lexically_normal()
                          .string();
    if (auto it = cache_.find(full); it != cache_.end()) return it->second;
    TracePtr tr;
    try {
      tr = std::make_shared<const IrradianceTrace>(load_trace(full));
    } catch (const TraceError& e) {
      errs_.push_back(field_path + ": " + e.what());
    }
    cache_.emplace(full, tr);
    return tr;
  }

 private:
  std::filesystem::path base_;
  std::vector<std::string>& errs_;
  std::map<std::string, TracePtr> cache_;
};

inline GeoPoint read_location(FieldReader& rd, const nlohmann::json& obj, const std::string& path) {
  return {rd.number(obj, "latitude", path, true).value_or(0.0),
          rd.number(obj, "longitude", path, true).value_or(0.0)};
}

}  // namespace detail

/// Builds a scenario from parsed JSON. Trace paths are resolved against
/// base_dir. Throws ScenarioError listing every problem found.
inline Scenario scenario_from_json(const nlohmann::json& root, const std::filesystem::path& base_dir) {
  std::vector<std::string> errs;
  detail::FieldReader rd(errs);
  detail::TraceCache traces(base_dir, errs);
  Scenario sc;
  if (!root.is_object()) throw ScenarioError({"<root>: expected an object"});

  sc.name = rd.string(root, "name", "<root>", false).value_or("scenario");

  if (const auto* sim = rd.object(root, "sim", "<root>", true)) {
    if (auto s = rd.string(*sim, "start", "sim", true)) {
      try {
        sc.sim.start = calendar::parse_iso(*s);
      } catch (const std::invalid_argument& e) {
        rd.error("sim.start", e.what());
      }
    }
    if (auto v = rd.integer(*sim, "duration_s", "sim", true)) sc.sim.duration_s = *v;
    if (auto v = rd.integer(*sim, "energy_tick_s", "sim", false)) sc.sim.energy_tick_s = *v;
    if (auto v = rd.integer(*sim, "mape_period_s", "sim", false)) sc.sim.mape_period_s = *v;
    if (auto v = rd.integer(*sim, "seed", "sim", false)) {
      if (*v < 0) rd.error("sim.seed", "must be >= 0");
      else sc.sim.seed = static_cast<std::uint64_t>(*v);
    }
    if (auto v = rd.string(*sim, "metric_sampling", "sim", false)) {
      if (auto m = parse_sampling(*v)) sc.sim.metric_sampling = *m;
      else rd.error("sim.metric_sampling", "expected hop_start or transaction_start, got '" + *v + "'");
    }
  }

  if (auto v = rd.string(root, "algorithm", "<root>", true)) {
    if (auto a = parse_algorithm(*v)) sc.algorithm = *a;
    else rd.error("algorithm", "unknown algorithm '" + *v + "' (expected ALG1..ALG5)");
  }
  if (auto v = rd.string(root, "cooperation", "<root>", false)) {
    if (auto c = parse_cooperation(*v)) sc.cooperation = *c;
    else rd.error("cooperation", "expected independent, communicating or central, got '" + *v + "'");
  }
  if (const auto* se = rd.object(root, "static_edges", "<root>", false)) {
    for (const auto& [key, val] : se->items()) {
      const auto alg = parse_algorithm(key);
      if (!alg || !(*alg == Algorithm::ALG1 || *alg == Algorithm::ALG2)) {
        rd.error("static_edges." + key, "only ALG1 and ALG2 take a static edge");
      } else if (!val.is_string()) {
        rd.error("static_edges." + key, "expected a datacenter id");
      } else {
        sc.static_edges[*alg] = val.get<std::string>();
      }
    }
  }

  if (const auto* arr = rd.array(root, "datacenters", "<root>", true)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto& j = (*arr)[i];
      const auto p = "datacenters[" + std::to_string(i) + "]";
      DatacenterSpec dc;
      dc.id = rd.string(j, "id", p, true).value_or("");
      if (auto k = rd.string(j, "kind", p, true)) {
        if (*k == "edge") dc.kind = DatacenterKind::Edge;
        else if (*k == "cloud") dc.kind = DatacenterKind::Cloud;
        else rd.error(p + ".kind", "expected edge or cloud, got '" + *k + "'");
      }
      dc.location = detail::read_location(rd, j, p);
      if (auto pol = rd.string(j, "policy", p, true)) {
        if (auto pp = parse_policy(*pol)) dc.policy = *pp;
        else rd.error(p + ".policy", "unknown energy policy '" + *pol + "'");
      }
      dc.res_utilization = rd.number(j, "res_utilization", p, true).value_or(1.0);
      dc.avg_draw_kw = rd.number(j, "avg_draw_kw", p, false);
      if (const auto* g = rd.object(j, "grid", p, true)) {
        dc.grid.cost_per_kwh = rd.number(*g, "cost_per_kwh", p + ".grid", false).value_or(0.0);
        dc.grid.low_carbon_fraction =
            rd.number(*g, "low_carbon_fraction", p + ".grid", true).value_or(0.0);
        dc.grid.res_fraction = rd.number(*g, "res_fraction", p + ".grid", false).value_or(0.0);
      }
      if (const auto* s = rd.object(j, "solar", p, false)) {
        SolarSpec sol;
        sol.peak_kwp = rd.number(*s, "peak_kwp", p + ".solar", true).value_or(0.0);
        sol.tilt_deg = rd.number(*s, "tilt_deg", p + ".solar", false).value_or(0.0);
        sol.azimuth_deg = rd.number(*s, "azimuth_deg", p + ".solar", false).value_or(0.0);
        sol.annual_energy_kwh = rd.number(*s, "annual_energy_kwh", p + ".solar", false);
        if (auto t = rd.string(*s, "trace", p + ".solar", true)) {
          sol.trace_path = *t;
          sol.trace = traces.get(*t, p + ".solar.trace");
        }
        dc.solar = std::move(sol);
      }
      if (const auto* b = rd.object(j, "battery", p, false)) {
        BatteryStore bat;
        bat.capacity_wh = rd.number(*b, "capacity_wh", p + ".battery", true).value_or(0.0);
        bat.charge_wh = rd.number(*b, "initial_wh", p + ".battery", false).value_or(0.0);
        bat.max_charge_power_w =
            rd.number(*b, "max_charge_power_w", p + ".battery", false).value_or(kUnlimited);
        bat.efficiency = rd.number(*b, "efficiency", p + ".battery", false).value_or(1.0);
        dc.battery = bat;
      }
      dc.neighbours = rd.strings(j, "neighbours", p, false);
      sc.datacenters.push_back(std::move(dc));
    }
  }

  if (const auto* arr = rd.array(root, "devices", "<root>", true)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto& j = (*arr)[i];
      const auto p = "devices[" + std::to_string(i) + "]";
      DeviceSpec d;
      d.id = rd.string(j, "id", p, true).value_or("");
      d.location = detail::read_location(rd, j, p);
      if (const auto* b = rd.object(j, "battery", p, true)) {
        const auto bp = p + ".battery";
        d.battery.capacity_mah = rd.number(*b, "capacity_mah", bp, true).value_or(0.0);
        d.battery.charge_mah = rd.number(*b, "initial_mah", bp, true).value_or(0.0);
        d.battery.voltage_v = rd.number(*b, "voltage_v", bp, true).value_or(3.7);
        d.battery.max_charge_current_ma =
            rd.number(*b, "max_charge_current_ma", bp, false).value_or(kUnlimited);
        d.battery.resume_fraction = rd.number(*b, "resume_fraction", bp, false).value_or(0.01);
      }
      d.battery.panel_peak_w = rd.number(j, "panel_w", p, false).value_or(0.0);
      if (auto t = rd.string(j, "trace", p, d.battery.panel_peak_w > 0.0)) {
        d.trace_path = *t;
        d.trace = traces.get(*t, p + ".trace");
      }
      d.transaction_period_s = rd.integer(j, "transaction_period_s", p, true).value_or(300);
      d.mah_per_transaction = rd.number(j, "mah_per_transaction", p, false).value_or(2.0);
      d.idle_ma = rd.number(j, "idle_ma", p, false).value_or(10.0);
      d.phase_jitter_s = rd.integer(j, "phase_jitter_s", p, false).value_or(0);
      d.battery.depleted = d.battery.charge_mah <= 0.0;
      sc.devices.push_back(std::move(d));
    }
  }

  if (const auto* arr = rd.array(root, "abstract_mels", "<root>", true)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto& j = (*arr)[i];
      const auto p = "abstract_mels[" + std::to_string(i) + "]";
      AbstractMel m;
      m.name = normalize_abstract(rd.string(j, "name", p, true).value_or(""));
      m.processing_time_s = rd.number(j, "processing_time_s", p, true).value_or(0.0);
      sc.abstract_mels.push_back(std::move(m));
    }
  }

  if (const auto* arr = rd.array(root, "instances", "<root>", true)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto& j = (*arr)[i];
      const auto p = "instances[" + std::to_string(i) + "]";
      MelInstance in;
      in.id = rd.string(j, "id", p, true).value_or("");
      in.host = rd.string(j, "host", p, true).value_or("");
      in.processing_time_override = rd.number(j, "processing_time_s", p, false);
      sc.instances.push_back(std::move(in));
    }
  }

  if (const auto* arr = rd.array(root, "flows", "<root>", true)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto& j = (*arr)[i];
      const auto p = "flows[" + std::to_string(i) + "]";
      OsmoticFlow f;
      f.id = rd.string(j, "id", p, true).value_or("");
      f.source_device = rd.string(j, "device", p, true).value_or("");
      f.chain = rd.strings(j, "chain", p, true).value_or(std::vector<std::string>{});
      for (auto& c : f.chain) c = normalize_abstract(c);
      sc.flows.push_back(std::move(f));
    }
  }

  for (auto& e : validate_scenario(sc)) errs.push_back(std::move(e));
  if (!errs.empty()) throw ScenarioError(std::move(errs));
  return sc;
}

inline Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({path.string() + ": cannot open scenario file"});
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError({path.string() + ": " + e.what()});
  }
  return scenario_from_json(root, path.parent_path());
}

}  // namespace osmosis
