#pragma once

// Datacenters, IoT devices, abstract MELs and their deployed instances, and
// the per-device routing tables that bind one to the other.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "osmosis/energy.hpp"

namespace osmosis {

class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// No instance of the requested abstract MEL is deployed anywhere.
class UnroutableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;

  bool valid() const {
    return latitude >= -90.0 && latitude <= 90.0 && longitude >= -180.0 && longitude <= 180.0;
  }
};

inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance in km.
inline double haversine_km(GeoPoint a, GeoPoint b) {
  if (!a.valid() || !b.valid()) {
    throw std::invalid_argument("coordinates out of range: latitude must lie in [-90, 90] and "
                                "longitude in [-180, 180]");
  }
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (b.latitude - a.latitude) * rad;
  const double dlon = (b.longitude - a.longitude) * rad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.latitude * rad) * std::cos(b.latitude * rad) * std::sin(dlon / 2) *
                       std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

// ---------------------------------------------------------------------------
// MEL naming: instances are `NAME.k`, the abstract family is `NAME` (written
// `NAME.*` in configuration).
// ---------------------------------------------------------------------------

inline std::string abstract_of(std::string_view instance_id) {
  const auto dot = instance_id.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == instance_id.size()) {
    throw TopologyError("malformed MEL instance id '" + std::string(instance_id) +
                        "' (expected NAME.k)");
  }
  for (std::size_t i = dot + 1; i < instance_id.size(); ++i) {
    if (instance_id[i] < '0' || instance_id[i] > '9') {
      throw TopologyError("malformed MEL instance id '" + std::string(instance_id) +
                          "' (instance suffix must be numeric)");
    }
  }
  return std::string(instance_id.substr(0, dot));
}

/// Accepts `NAME` or `NAME.*` and returns `NAME`.
inline std::string normalize_abstract(std::string_view name) {
  if (name.size() > 2 && name.substr(name.size() - 2) == ".*") name.remove_suffix(2);
  return std::string(name);
}

enum class DatacenterKind { Edge, Cloud };

constexpr std::string_view to_string(DatacenterKind k) {
  return k == DatacenterKind::Edge ? "edge" : "cloud";
}

struct Datacenter {
  std::string id;
  DatacenterKind kind = DatacenterKind::Edge;
  GeoPoint location;
  EnergyController energy;
};

struct AbstractMel {
  std::string name;
  double processing_time_s = 0.0;
};

struct MelInstance {
  std::string id;
  std::string abstract_name;
  std::string host;
  std::optional<double> processing_time_override;
};

struct IoTDevice {
  std::string id;
  GeoPoint location;
  DeviceBattery battery;
  TracePtr trace;  // drives the device's solar panel; may be null
  std::int64_t transaction_period_s = 300;
  double mah_per_transaction = 0.0;
  double idle_ma = 0.0;
  std::int64_t phase_offset_s = 0;

  // abstract MEL -> pinned instance; one active rule per abstract MEL
  std::map<std::string, std::string> routing_table;
  std::map<std::string, std::size_t> rr_cursor;
};

enum class RouteSource { Rule, RoundRobin };

struct Route {
  std::string instance;
  RouteSource source;
};

namespace detail {
template <typename Map>
auto& lookup(Map& m, const std::string& key, const char* what) {
  auto it = m.find(key);
  if (it == m.end()) throw TopologyError(std::string("unknown ") + what + " '" + key + "'");
  return it->second;
}
}  // namespace detail

class Topology {
 public:
  Datacenter& add_datacenter(Datacenter dc) {
    if (datacenters_.count(dc.id)) throw TopologyError("duplicate datacenter id '" + dc.id + "'");
    if (!dc.location.valid()) throw TopologyError("datacenter '" + dc.id + "' location out of range");
    auto id = dc.id;
    return datacenters_.emplace(std::move(id), std::move(dc)).first->second;
  }

  void add_abstract_mel(AbstractMel mel) {
    mel.name = normalize_abstract(mel.name);
    if (abstract_mels_.count(mel.name)) {
      throw TopologyError("duplicate abstract MEL '" + mel.name + "'");
    }
    if (!(mel.processing_time_s > 0.0)) {
      throw TopologyError("abstract MEL '" + mel.name + "' needs processing_time > 0");
    }
    auto name = mel.name;
    abstract_mels_.emplace(std::move(name), std::move(mel));
  }

  void add_instance(MelInstance inst) {
    inst.abstract_name = abstract_of(inst.id);
    if (instances_.count(inst.id)) throw TopologyError("duplicate MEL instance '" + inst.id + "'");
    if (!abstract_mels_.count(inst.abstract_name)) {
      throw TopologyError("instance '" + inst.id + "' refers to unknown abstract MEL '" +
                          inst.abstract_name + "'");
    }
    if (!datacenters_.count(inst.host)) {
      throw TopologyError("instance '" + inst.id + "' hosted on unknown datacenter '" + inst.host +
                          "'");
    }
    if (inst.processing_time_override && !(*inst.processing_time_override > 0.0)) {
      throw TopologyError("instance '" + inst.id + "' processing time override must be > 0");
    }
    auto id = inst.id;
    instances_.emplace(std::move(id), std::move(inst));
  }

  IoTDevice& add_device(IoTDevice dev) {
    if (devices_.count(dev.id)) throw TopologyError("duplicate device id '" + dev.id + "'");
    if (!dev.location.valid()) throw TopologyError("device '" + dev.id + "' location out of range");
    auto id = dev.id;
    return devices_.emplace(std::move(id), std::move(dev)).first->second;
  }

  const std::map<std::string, Datacenter>& datacenters() const { return datacenters_; }
  std::map<std::string, Datacenter>& datacenters() { return datacenters_; }
  const std::map<std::string, AbstractMel>& abstract_mels() const { return abstract_mels_; }
  const std::map<std::string, MelInstance>& instances() const { return instances_; }
  const std::map<std::string, IoTDevice>& devices() const { return devices_; }
  std::map<std::string, IoTDevice>& devices() { return devices_; }

  const Datacenter& datacenter(const std::string& id) const { return detail::lookup(datacenters_, id, "datacenter"); }
  Datacenter& datacenter(const std::string& id) { return detail::lookup(datacenters_, id, "datacenter"); }
  const MelInstance& instance(const std::string& id) const { return detail::lookup(instances_, id, "MEL instance"); }
  const AbstractMel& abstract_mel(const std::string& name) const {
    return detail::lookup(abstract_mels_, normalize_abstract(name), "abstract MEL");
  }
  const IoTDevice& device(const std::string& id) const { return detail::lookup(devices_, id, "device"); }
  IoTDevice& device(const std::string& id) { return detail::lookup(devices_, id, "device"); }

  bool has_abstract_mel(const std::string& name) const {
    return abstract_mels_.count(normalize_abstract(name)) > 0;
  }

  /// Instances of an abstract MEL in lexicographic id order.
  std::vector<const MelInstance*> instances_of(const std::string& abstract) const {
    const auto name = normalize_abstract(abstract);
    std::vector<const MelInstance*> out;
    for (const auto& [id, inst] : instances_) {
      if (inst.abstract_name == name) out.push_back(&inst);
    }
    return out;
  }

  /// Instances hosted on one datacenter, id order.
  std::vector<std::string> instances_on(const std::string& dc_id) const {
    std::vector<std::string> out;
    for (const auto& [id, inst] : instances_) {
      if (inst.host == dc_id) out.push_back(id);
    }
    return out;
  }

  double processing_time(const MelInstance& inst) const {
    return inst.processing_time_override.value_or(abstract_mel(inst.abstract_name).processing_time_s);
  }

  /// Explicit rule if present, otherwise round-robin over instances in id
  /// order. Throws UnroutableError when no instance exists.
  Route resolve(IoTDevice& dev, const std::string& abstract) const {
    const auto name = normalize_abstract(abstract);
    if (auto it = dev.routing_table.find(name); it != dev.routing_table.end()) {
      return {it->second, RouteSource::Rule};
    }
    const auto candidates = instances_of(name);
    if (candidates.empty()) {
      throw UnroutableError("no deployed instance of abstract MEL '" + name + "' for device '" +
                            dev.id + "'");
    }
    auto& cursor = dev.rr_cursor[name];
    const auto* chosen = candidates[cursor % candidates.size()];
    cursor = (cursor + 1) % candidates.size();
    return {chosen->id, RouteSource::RoundRobin};
  }

  void routing_add(IoTDevice& dev, const std::string& abstract, const std::string& instance_id) const {
    const auto name = normalize_abstract(abstract);
    const auto& inst = this->instance(instance_id);
    if (inst.abstract_name != name) {
      throw TopologyError("routing rule maps abstract MEL '" + name + "' to instance '" +
                          instance_id + "' of '" + inst.abstract_name + "'");
    }
    dev.routing_table[name] = instance_id;
  }

  static void routing_clear(IoTDevice& dev) { dev.routing_table.clear(); }

  /// Nearest edge datacenter to a point; ties by id. Empty if no edge exists.
  std::optional<std::string> nearest_edge(GeoPoint p) const {
    std::optional<std::string> best;
    double best_km = 0.0;
    for (const auto& [id, dc] : datacenters_) {
      if (dc.kind != DatacenterKind::Edge) continue;
      const double km = haversine_km(p, dc.location);
      if (!best || km < best_km) {
        best = id;
        best_km = km;
      }
    }
    return best;
  }

 private:
  std::map<std::string, Datacenter> datacenters_;
  std::map<std::string, AbstractMel> abstract_mels_;
  std::map<std::string, MelInstance> instances_;
  std::map<std::string, IoTDevice> devices_;
};

}  // namespace osmosis
