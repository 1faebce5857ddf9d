#pragma once

// Wires a scenario into a runnable simulation: topology and energy
// controllers, agents, device workload, and the periodic energy/MAPE ticks.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "osmosis/agents.hpp"
#include "osmosis/energy.hpp"
#include "osmosis/flows.hpp"
#include "osmosis/metrics.hpp"
#include "osmosis/scenario.hpp"
#include "osmosis/simcore.hpp"
#include "osmosis/topology.hpp"

namespace osmosis {

struct RunOptions {
  std::optional<Algorithm> algorithm;  // overrides the scenario's
  std::optional<Cooperation> cooperation;
  std::optional<std::uint64_t> seed;
};

struct RunResult {
  MetricsReport report;
  SimulationSummary events;
  std::size_t suppressed = 0;  // arrivals skipped on a depleted device
};

class Simulation {
 public:
  explicit Simulation(const Scenario& sc, const RunOptions& opts = {})
      : sim_(sc.sim),
        algorithm_(opts.algorithm.value_or(sc.algorithm)),
        cooperation_(opts.cooperation.value_or(sc.cooperation)),
        seed_(opts.seed.value_or(sc.sim.seed)),
        scheduler_(sc.sim.start),
        broker_(cooperation_) {
    Scenario checked = sc;
    checked.algorithm = algorithm_;
    if (auto errs = validate_scenario(checked); !errs.empty()) throw ScenarioError(std::move(errs));
    build(sc);
  }

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  Topology& topology() { return topo_; }
  const Topology& topology() const { return topo_; }
  AgentBroker& broker() { return broker_; }
  Algorithm algorithm() const { return algorithm_; }

  RunResult run() {
    if (ran_) throw std::logic_error("simulation already ran");
    ran_ = true;
    const SimTime end = sim_.duration_s;
    AgentContext init{topo_, 0, scheduler_.to_utc(0), &decisions_};
    broker_.initialize(init);

    for (const auto& [id, dev] : topo_.devices()) sample_battery(0, dev);

    for (SimTime t = 0; t < end; t += sim_.energy_tick_s) {
      const auto dt = std::min<SimTime>(sim_.energy_tick_s, end - t);
      scheduler_.schedule(t, EventKind::EnergyTick, [this, dt](SimTime now) { energy_tick(now, dt); });
    }
    if (is_adaptive(algorithm_)) {
      for (SimTime t = 0; t < end; t += sim_.mape_period_s) {
        scheduler_.schedule(t, EventKind::MapeTick, [this](SimTime now) { mape_tick(now); });
      }
    }
    for (const auto& flow : flows_) {
      const auto& dev = topo_.device(flow.source_device);
      for (SimTime t : emission_times(dev.transaction_period_s, end, dev.phase_offset_s)) {
        scheduler_.schedule(t, EventKind::TransactionArrival,
                            [this, &flow](SimTime now) { arrival(now, flow); });
      }
    }
    scheduler_.schedule(end, EventKind::SimEnd);

    RunResult out;
    out.events = scheduler_.run_until(end);
    out.suppressed = suppressed_;
    auto& rep = out.report;
    rep.summary = summarize(std::string(to_string(algorithm_)), transactions_, topo_);
    rep.transactions = std::move(transactions_);
    rep.battery_timeline = std::move(battery_);
    rep.decisions = std::move(decisions_);
    for (const auto& [id, dc] : topo_.datacenters()) {
      rep.ledgers.push_back({id, dc.energy.avg_draw_kw(), dc.energy.ledger()});
    }
    return out;
  }

 private:
  void build(const Scenario& sc) {
    const int year = calendar::year_of(sc.sim.start);
    for (const auto& d : sc.datacenters) {
      EnergyControllerConfig cfg;
      cfg.grid = d.grid;
      cfg.policy = d.policy;
      cfg.res_utilization = d.res_utilization;
      cfg.battery = d.battery;
      cfg.avg_draw_kw = d.avg_draw_kw;
      cfg.trace_year = year;
      if (d.solar) {
        cfg.solar = SolarInstallation{d.solar->peak_kwp, d.solar->tilt_deg, d.solar->azimuth_deg,
                                      d.location.latitude, d.location.longitude, d.solar->trace};
        cfg.annual_energy_kwh = d.solar->annual_energy_kwh;
      }
      topo_.add_datacenter(Datacenter{d.id, d.kind, d.location, EnergyController(std::move(cfg))});
    }
    std::mt19937_64 rng(seed_);
    for (const auto& d : sc.devices) {
      IoTDevice dev;
      dev.id = d.id;
      dev.location = d.location;
      dev.battery = d.battery;
      dev.battery.depleted = dev.battery.charge_mah <= 0.0;
      dev.trace = d.trace;
      dev.transaction_period_s = d.transaction_period_s;
      dev.mah_per_transaction = d.mah_per_transaction;
      dev.idle_ma = d.idle_ma;
      // Drawn for every device so one device's jitter never shifts another's.
      const auto draw = rng();
      dev.phase_offset_s =
          d.phase_jitter_s > 0 ? static_cast<SimTime>(draw % static_cast<std::uint64_t>(d.phase_jitter_s + 1)) : 0;
      topo_.add_device(std::move(dev));
    }
    for (const auto& m : sc.abstract_mels) topo_.add_abstract_mel(m);
    for (const auto& in : sc.instances) topo_.add_instance(in);
    flows_ = sc.flows;
    std::sort(flows_.begin(), flows_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& f : flows_) validate_flow(f, topo_);

    for (const auto& d : sc.datacenters) broker_.add(std::make_unique<DcAgent>(d.id, d.neighbours));
    std::optional<std::string> static_edge;
    if (auto it = sc.static_edges.find(algorithm_); it != sc.static_edges.end()) static_edge = it->second;
    for (const auto& d : sc.devices) {
      broker_.add(std::make_unique<DeviceAgent>(d.id, algorithm_, static_edge));
    }
    if (cooperation_ == Cooperation::Central) broker_.add(std::make_unique<CentralAgent>(algorithm_));
  }

  void energy_tick(SimTime now, SimTime dt) {
    const UtcTime utc = scheduler_.to_utc(now);
    for (auto& [id, dc] : topo_.datacenters()) dc.energy.tick(utc, dt);
    for (auto& [id, dev] : topo_.devices()) {
      const double idle = dev.idle_ma * static_cast<double>(dt) / 3600.0;
      dev.battery = tick_device(dev.battery, utc, dt, idle, dev.trace.get());
      sample_battery(now + dt, dev);
    }
  }

  void mape_tick(SimTime now) {
    AgentContext ctx{topo_, now, scheduler_.to_utc(now), &decisions_};
    broker_.dispatch(ctx);
  }

  void arrival(SimTime now, const OsmoticFlow& flow) {
    auto& dev = topo_.device(flow.source_device);
    if (dev.battery.depleted) {
      ++suppressed_;
      return;
    }
    dev.battery.debit(dev.mah_per_transaction);
    transactions_.push_back(
        execute_transaction(topo_, flow, next_txn_++, now, scheduler_.epoch(), sim_.metric_sampling));
  }

  void sample_battery(SimTime t, const IoTDevice& dev) {
    battery_.push_back({t, dev.id, dev.battery.charge_mah, dev.battery.fraction()});
  }

  SimSettings sim_;
  Algorithm algorithm_;
  Cooperation cooperation_;
  std::uint64_t seed_;
  Scheduler scheduler_;
  Topology topo_;
  AgentBroker broker_;
  std::vector<OsmoticFlow> flows_;
  std::vector<Transaction> transactions_;
  std::vector<BatterySample> battery_;
  std::vector<Decision> decisions_;
  std::uint64_t next_txn_ = 0;
  std::size_t suppressed_ = 0;
  bool ran_ = false;
};

/// Runs one scenario and, when out_dir is given, writes the report files.
inline RunResult run(const Scenario& sc, const RunOptions& opts = {},
                     const std::optional<std::filesystem::path>& out_dir = std::nullopt) {
  Simulation sim(sc, opts);
  auto result = sim.run();
  if (out_dir) emit_report(result.report, *out_dir);
  return result;
}

/// Fresh simulation per algorithm, everything else identical.
inline std::vector<MetricsSummary> compare(const Scenario& sc, const std::vector<Algorithm>& algs,
                                           const RunOptions& base = {},
                                           const std::optional<std::filesystem::path>& out_dir = std::nullopt) {
  std::vector<MetricsSummary> rows;
  for (auto alg : algs) {
    RunOptions opts = base;
    opts.algorithm = alg;
    rows.push_back(run(sc, opts).report.summary);
  }
  if (out_dir) emit_comparison(rows, *out_dir);
  return rows;
}

}  // namespace osmosis
