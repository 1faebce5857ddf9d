#pragma once

// Osmotic agents: the MAPE contract, the broker that owns agent lifecycle
// and message delivery, and the built-in adaptation algorithms.
//
// One broker round runs Monitor and Analyze for every agent, delivers the
// published messages according to the cooperation model, then runs Plan
// (with the delivered inbox) and Execute. Agents are always visited in
// ascending id order.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "osmosis/simcore.hpp"
#include "osmosis/topology.hpp"

namespace osmosis {

enum class Algorithm { ALG1, ALG2, ALG3, ALG4, ALG5 };

constexpr std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ALG1: return "ALG1";
    case Algorithm::ALG2: return "ALG2";
    case Algorithm::ALG3: return "ALG3";
    case Algorithm::ALG4: return "ALG4";
    case Algorithm::ALG5: return "ALG5";
  }
  return "unknown";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  if (s == "ALG1") return Algorithm::ALG1;
  if (s == "ALG2") return Algorithm::ALG2;
  if (s == "ALG3") return Algorithm::ALG3;
  if (s == "ALG4") return Algorithm::ALG4;
  if (s == "ALG5") return Algorithm::ALG5;
  return std::nullopt;
}

inline constexpr bool is_adaptive(Algorithm a) {
  return a == Algorithm::ALG4 || a == Algorithm::ALG5;
}

enum class Cooperation { Independent, Communicating, Central };

constexpr std::string_view to_string(Cooperation c) {
  switch (c) {
    case Cooperation::Independent: return "independent";
    case Cooperation::Communicating: return "communicating";
    case Cooperation::Central: return "central";
  }
  return "unknown";
}

inline std::optional<Cooperation> parse_cooperation(std::string_view s) {
  if (s == "independent") return Cooperation::Independent;
  if (s == "communicating") return Cooperation::Communicating;
  if (s == "central") return Cooperation::Central;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Messages and decisions
// ---------------------------------------------------------------------------

struct MessageContent {
  double r = 0.0;                     // irradiance proxy at the sender
  std::vector<std::string> mel_list;  // MEL instance ids
  std::map<std::string, double> values;
  std::map<std::string, std::string> labels;
};

struct AgentMessage {
  std::string sender;
  std::vector<std::string> destinations;
  MessageContent content;
  SimTime sent_at = 0;
};

// Payload keys published by datacenter agents.
namespace keys {
inline constexpr const char* kEre = "e_re_kw";
inline constexpr const char* kSelf = "self_consumption";
inline constexpr const char* kLowCarbon = "p_low";
inline constexpr const char* kLatitude = "latitude";
inline constexpr const char* kLongitude = "longitude";
}  // namespace keys

enum class DecisionReason {
  Static,
  RoundRobin,
  MaxRes,
  LowCarbonNight,
  NearestNight,
  TieDistance,
  TieId,
};

constexpr std::string_view to_string(DecisionReason r) {
  switch (r) {
    case DecisionReason::Static: return "static";
    case DecisionReason::RoundRobin: return "round_robin";
    case DecisionReason::MaxRes: return "max_res";
    case DecisionReason::LowCarbonNight: return "low_carbon_night";
    case DecisionReason::NearestNight: return "nearest_night";
    case DecisionReason::TieDistance: return "tie_distance";
    case DecisionReason::TieId: return "tie_id";
  }
  return "unknown";
}

inline std::optional<DecisionReason> parse_reason(std::string_view s) {
  for (auto r : {DecisionReason::Static, DecisionReason::RoundRobin, DecisionReason::MaxRes,
                 DecisionReason::LowCarbonNight, DecisionReason::NearestNight,
                 DecisionReason::TieDistance, DecisionReason::TieId}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

struct Decision {
  SimTime time = 0;
  std::string agent_id;
  std::string abstract_mel;
  std::string selected_instance;
  DecisionReason reason = DecisionReason::Static;
};

inline void write_decisions_csv(std::ostream& out, const std::vector<Decision>& decisions) {
  out << "time,agent_id,abstract_mel,selected_instance,reason\n";
  for (const auto& d : decisions) {
    out << d.time << "," << d.agent_id << "," << d.abstract_mel << "," << d.selected_instance << ","
        << to_string(d.reason) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Device-side selection
// ---------------------------------------------------------------------------

using RoutingDirectives = std::map<std::string, std::string>;  // abstract -> instance

/// Device agent Plan: for each abstract MEL keep the instance from the
/// message with the largest r; the first message seen wins ties.
inline RoutingDirectives device_agent_plan(const std::vector<AgentMessage>& inbox) {
  RoutingDirectives q;
  std::map<std::string, double> v;
  for (const auto& m : inbox) {
    for (const auto& s : m.content.mel_list) {
      const auto family = abstract_of(s);
      auto it = v.find(family);
      if (it == v.end()) {
        v.emplace(family, m.content.r);
        q[family] = s;
      } else if (it->second < m.content.r) {
        it->second = m.content.r;
        q[family] = s;
      }
    }
  }
  return q;
}

struct Selection {
  std::string instance;
  DecisionReason reason;
};

using SelectionMap = std::map<std::string, Selection>;  // abstract -> choice

namespace detail {

struct Candidate {
  std::string instance;
  double e_re = 0.0;
  double self = 0.0;
  double p_low = 0.0;
  double distance_km = 0.0;
};

inline double value_or(const std::map<std::string, double>& m, const char* key, double def = 0.0) {
  auto it = m.find(key);
  return it == m.end() ? def : it->second;
}

// First candidate with the best key in id order; reports whether the best
// key was shared.
template <typename Better>
std::pair<const Candidate*, bool> pick(const std::vector<Candidate>& cs, Better better) {
  const Candidate* best = nullptr;
  bool tied = false;
  for (const auto& c : cs) {
    if (!best || better(c, *best)) {
      best = &c;
      tied = false;
    } else if (!better(*best, c)) {
      tied = true;
    }
  }
  return {best, tied};
}

}  // namespace detail

/// Renewable-aware selection used by ALG4 and ALG5.
///
/// Per abstract MEL: among hosts fully covered by PV the nearest wins;
/// otherwise the largest renewable power wins; when no candidate has any
/// renewable power ALG4 takes the greenest grid and ALG5 the nearest host.
/// Remaining ties go to the smaller instance id.
inline SelectionMap select_adaptive(Algorithm alg, GeoPoint device,
                                    const std::vector<AgentMessage>& inbox) {
  std::map<std::string, std::vector<detail::Candidate>> by_family;
  for (const auto& m : inbox) {
    const auto& vals = m.content.values;
    const GeoPoint host{detail::value_or(vals, keys::kLatitude),
                        detail::value_or(vals, keys::kLongitude)};
    for (const auto& s : m.content.mel_list) {
      by_family[abstract_of(s)].push_back({s, detail::value_or(vals, keys::kEre),
                                           detail::value_or(vals, keys::kSelf),
                                           detail::value_or(vals, keys::kLowCarbon),
                                           haversine_km(device, host)});
    }
  }
  SelectionMap out;
  for (auto& [family, cs] : by_family) {
    std::sort(cs.begin(), cs.end(),
              [](const auto& a, const auto& b) { return a.instance < b.instance; });
    std::vector<detail::Candidate> full;
    for (const auto& c : cs) {
      if (c.self >= 1.0) full.push_back(c);
    }
    const auto nearer = [](const auto& a, const auto& b) { return a.distance_km < b.distance_km; };
    if (!full.empty()) {
      const auto [best, tied] = detail::pick(full, nearer);
      out[family] = {best->instance,
                     full.size() == 1 ? DecisionReason::MaxRes
                     : tied           ? DecisionReason::TieId
                                      : DecisionReason::TieDistance};
      continue;
    }
    const bool night = std::all_of(cs.begin(), cs.end(), [](const auto& c) { return c.e_re <= 0.0; });
    if (night) {
      if (alg == Algorithm::ALG5) {
        const auto [best, tied] = detail::pick(cs, nearer);
        out[family] = {best->instance, tied ? DecisionReason::TieId : DecisionReason::NearestNight};
      } else {
        const auto [best, tied] = detail::pick(
            cs, [](const auto& a, const auto& b) { return a.p_low > b.p_low; });
        out[family] = {best->instance,
                       tied ? DecisionReason::TieId : DecisionReason::LowCarbonNight};
      }
      continue;
    }
    const auto [best, tied] =
        detail::pick(cs, [](const auto& a, const auto& b) { return a.e_re > b.e_re; });
    out[family] = {best->instance, tied ? DecisionReason::TieId : DecisionReason::MaxRes};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Agents
// ---------------------------------------------------------------------------

struct AgentContext {
  Topology& topology;
  SimTime now = 0;
  UtcTime utc{};
  std::vector<Decision>* decisions = nullptr;

  void record(Decision d) const {
    if (decisions) decisions->push_back(std::move(d));
  }
};

enum class AgentRole { Datacenter, Device, Central };

/// MAPE contract. Every phase defaults to doing nothing.
class OsmoticAgent {
 public:
  explicit OsmoticAgent(std::string id) : id_(std::move(id)) {}
  virtual ~OsmoticAgent() = default;

  const std::string& id() const { return id_; }
  virtual AgentRole role() const = 0;

  /// Runs once before the first MAPE round.
  virtual void initialize(AgentContext&) {}
  virtual void monitor(AgentContext&) {}
  virtual std::vector<AgentMessage> analyze(AgentContext&) { return {}; }
  /// Returned messages are directives; only the central agent emits them.
  virtual std::vector<AgentMessage> plan(AgentContext&, const std::vector<AgentMessage>&) {
    return {};
  }
  virtual void execute(AgentContext&) {}

 private:
  std::string id_;
};

inline std::string dc_agent_id(const std::string& dc_id) { return "dc:" + dc_id; }
inline std::string device_agent_id(const std::string& device_id) { return "dev:" + device_id; }
inline constexpr const char* kCentralAgentId = "central";

/// Publishes (r, S) plus the host's energy state to its devices each round.
class DcAgent : public OsmoticAgent {
 public:
  DcAgent(std::string dc_id, std::optional<std::vector<std::string>> neighbours = std::nullopt)
      : OsmoticAgent(dc_agent_id(dc_id)), dc_id_(std::move(dc_id)),
        neighbours_(std::move(neighbours)) {}

  AgentRole role() const override { return AgentRole::Datacenter; }
  const std::string& dc_id() const { return dc_id_; }

  void monitor(AgentContext& ctx) override {
    const auto& dc = ctx.topology.datacenter(dc_id_);
    r_ = 0.0;
    if (dc.energy.uses_pv()) {
      const auto& sample = dc.energy.solar()->trace->sample_at(ctx.utc);
      r_ = sample.ghi.value_or(sample.power_per_kwp);
    }
    e_re_ = dc.energy.pv_power(ctx.utc);
    self_ = dc.energy.self_consumption(ctx.utc);
    mels_ = ctx.topology.instances_on(dc_id_);
  }

  std::vector<AgentMessage> analyze(AgentContext& ctx) override {
    const auto& dc = ctx.topology.datacenter(dc_id_);
    AgentMessage m;
    m.sender = id();
    m.sent_at = ctx.now;
    if (neighbours_) {
      for (const auto& d : *neighbours_) m.destinations.push_back(device_agent_id(d));
    } else {
      for (const auto& [dev_id, dev] : ctx.topology.devices()) {
        m.destinations.push_back(device_agent_id(dev_id));
      }
    }
    if (m.destinations.empty()) return {};
    m.content.r = r_;
    m.content.mel_list = mels_;
    m.content.values[keys::kEre] = e_re_;
    m.content.values[keys::kSelf] = self_;
    m.content.values[keys::kLowCarbon] = dc.energy.grid().low_carbon_fraction;
    m.content.values[keys::kLatitude] = dc.location.latitude;
    m.content.values[keys::kLongitude] = dc.location.longitude;
    return {std::move(m)};
  }

 private:
  std::string dc_id_;
  std::optional<std::vector<std::string>> neighbours_;
  double r_ = 0.0;
  double e_re_ = 0.0;
  double self_ = 0.0;
  std::vector<std::string> mels_;
};

/// Owns one device's routing table.
class DeviceAgent : public OsmoticAgent {
 public:
  DeviceAgent(std::string device_id, Algorithm alg, std::optional<std::string> static_edge = {})
      : OsmoticAgent(device_agent_id(device_id)), device_id_(std::move(device_id)), alg_(alg),
        static_edge_(std::move(static_edge)) {}

  AgentRole role() const override { return AgentRole::Device; }
  const std::string& device_id() const { return device_id_; }
  const SelectionMap& pending() const { return pending_; }

  void initialize(AgentContext& ctx) override {
    auto& dev = ctx.topology.device(device_id_);
    Topology::routing_clear(dev);
    if (alg_ == Algorithm::ALG1 || alg_ == Algorithm::ALG2) {
      if (!static_edge_) {
        throw ConfigError(std::string(to_string(alg_)) + " needs a static edge datacenter");
      }
      for (const auto& inst_id : ctx.topology.instances_on(*static_edge_)) {
        const auto family = abstract_of(inst_id);
        if (dev.routing_table.count(family)) continue;
        ctx.topology.routing_add(dev, family, inst_id);
        ctx.record({ctx.now, id(), family, inst_id, DecisionReason::Static});
      }
    } else if (alg_ == Algorithm::ALG3) {
      for (const auto& [name, mel] : ctx.topology.abstract_mels()) {
        ctx.record({ctx.now, id(), name, "*", DecisionReason::RoundRobin});
      }
    }
  }

  std::vector<AgentMessage> plan(AgentContext& ctx, const std::vector<AgentMessage>& inbox) override {
    pending_.clear();
    if (!is_adaptive(alg_)) return {};
    std::vector<AgentMessage> observations;
    for (const auto& m : inbox) {
      if (m.sender == kCentralAgentId) {
        for (const auto& inst : m.content.mel_list) {
          auto reason = DecisionReason::MaxRes;
          if (auto it = m.content.labels.find(inst); it != m.content.labels.end()) {
            reason = parse_reason(it->second).value_or(DecisionReason::MaxRes);
          }
          pending_[abstract_of(inst)] = {inst, reason};
        }
      } else {
        observations.push_back(m);
      }
    }
    if (!observations.empty()) {
      const auto& dev = ctx.topology.device(device_id_);
      for (auto& [family, sel] : select_adaptive(alg_, dev.location, observations)) {
        pending_[family] = sel;
      }
    }
    return {};
  }

  void execute(AgentContext& ctx) override {
    auto& dev = ctx.topology.device(device_id_);
    for (const auto& [family, sel] : pending_) {
      ctx.topology.routing_add(dev, family, sel.instance);
      ctx.record({ctx.now, id(), family, sel.instance, sel.reason});
    }
  }

 private:
  std::string device_id_;
  Algorithm alg_;
  std::optional<std::string> static_edge_;
  SelectionMap pending_;
};

/// Receives every agent's messages and tells each device agent what to do.
class CentralAgent : public OsmoticAgent {
 public:
  explicit CentralAgent(Algorithm alg) : OsmoticAgent(kCentralAgentId), alg_(alg) {}

  AgentRole role() const override { return AgentRole::Central; }

  std::vector<AgentMessage> plan(AgentContext& ctx, const std::vector<AgentMessage>& inbox) override {
    if (!is_adaptive(alg_)) return {};
    std::vector<AgentMessage> directives;
    for (const auto& [dev_id, dev] : ctx.topology.devices()) {
      const auto agent = device_agent_id(dev_id);
      std::vector<AgentMessage> seen;
      for (const auto& m : inbox) {
        if (std::find(m.destinations.begin(), m.destinations.end(), agent) != m.destinations.end()) {
          seen.push_back(m);
        }
      }
      if (seen.empty()) continue;
      AgentMessage d;
      d.sender = id();
      d.destinations = {agent};
      d.sent_at = ctx.now;
      for (const auto& [family, sel] : select_adaptive(alg_, dev.location, seen)) {
        d.content.mel_list.push_back(sel.instance);
        d.content.labels[sel.instance] = std::string(to_string(sel.reason));
      }
      directives.push_back(std::move(d));
    }
    return directives;
  }

 private:
  Algorithm alg_;
};

// ---------------------------------------------------------------------------
// Broker
// ---------------------------------------------------------------------------

struct BrokerRound {
  std::size_t published = 0;
  std::size_t delivered = 0;
  std::size_t discarded = 0;
};

class AgentBroker {
 public:
  explicit AgentBroker(Cooperation mode) : mode_(mode) {}

  Cooperation mode() const { return mode_; }

  OsmoticAgent& add(std::unique_ptr<OsmoticAgent> agent) {
    const auto id = agent->id();
    if (agents_.count(id)) throw ConfigError("duplicate agent id '" + id + "'");
    auto& ref = *agent;
    agents_.emplace(id, std::move(agent));
    return ref;
  }

  const std::map<std::string, std::unique_ptr<OsmoticAgent>>& agents() const { return agents_; }

  OsmoticAgent* find(const std::string& id) {
    auto it = agents_.find(id);
    return it == agents_.end() ? nullptr : it->second.get();
  }

  void initialize(AgentContext& ctx) {
    for (auto& [id, a] : agents_) a->initialize(ctx);
  }

  /// One MAPE round for every agent.
  BrokerRound dispatch(AgentContext& ctx) {
    BrokerRound stats;
    inboxes_.clear();
    diagnostics_.clear();
    for (auto& [id, a] : agents_) a->monitor(ctx);
    std::vector<AgentMessage> published;
    for (auto& [id, a] : agents_) {
      for (auto& m : a->analyze(ctx)) published.push_back(std::move(m));
    }
    stats.published = published.size();

    OsmoticAgent* central = mode_ == Cooperation::Central ? find(kCentralAgentId) : nullptr;
    if (mode_ == Cooperation::Central && central == nullptr) {
      throw ConfigError("central cooperation requires a central agent");
    }
    switch (mode_) {
      case Cooperation::Independent:
        stats.discarded = published.size();
        break;
      case Cooperation::Communicating:
        for (const auto& m : published) deliver(m, stats);
        break;
      case Cooperation::Central: {
        inboxes_[central->id()] = published;
        stats.delivered += published.size();
        for (const auto& d : central->plan(ctx, inboxes_[central->id()])) deliver(d, stats);
        break;
      }
    }

    static const std::vector<AgentMessage> kEmpty;
    for (auto& [id, a] : agents_) {
      if (a.get() == central) continue;
      auto it = inboxes_.find(id);
      a->plan(ctx, it == inboxes_.end() ? kEmpty : it->second);
    }
    for (auto& [id, a] : agents_) a->execute(ctx);
    return stats;
  }

  /// Inbox delivered to an agent in the most recent round.
  const std::vector<AgentMessage>& inbox(const std::string& agent_id) const {
    static const std::vector<AgentMessage> kEmpty;
    auto it = inboxes_.find(agent_id);
    return it == inboxes_.end() ? kEmpty : it->second;
  }

  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  void deliver(const AgentMessage& m, BrokerRound& stats) {
    for (const auto& dest : m.destinations) {
      if (!agents_.count(dest)) {
        diagnostics_.push_back("discarded message from '" + m.sender + "' to unknown agent '" +
                               dest + "'");
        ++stats.discarded;
        continue;
      }
      inboxes_[dest].push_back(m);
      ++stats.delivered;
    }
  }

  Cooperation mode_;
  std::map<std::string, std::unique_ptr<OsmoticAgent>> agents_;
  std::map<std::string, std::vector<AgentMessage>> inboxes_;
  std::vector<std::string> diagnostics_;
};

}  // namespace osmosis
