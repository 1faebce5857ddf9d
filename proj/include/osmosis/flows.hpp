#pragma once

// Osmotic flows (device -> linear chain of abstract MELs) and the
// transactions they generate.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "osmosis/csv.hpp"
#include "osmosis/simcore.hpp"
#include "osmosis/topology.hpp"

namespace osmosis {

struct OsmoticFlow {
  std::string id;
  std::string source_device;
  std::vector<std::string> chain;  // abstract MEL names, in order
};

enum class MetricSampling { TransactionStart, HopStart };

constexpr std::string_view to_string(MetricSampling m) {
  return m == MetricSampling::HopStart ? "hop_start" : "transaction_start";
}

inline std::optional<MetricSampling> parse_sampling(std::string_view s) {
  if (s == "hop_start") return MetricSampling::HopStart;
  if (s == "transaction_start") return MetricSampling::TransactionStart;
  return std::nullopt;
}

struct Hop {
  std::string dc_id;
  std::string instance_id;
  double start_time = 0.0;  // seconds since epoch
  double processing_time_s = 0.0;
  double self_consumption = 0.0;
};

enum class TransactionStatus { Completed, Dropped };

constexpr std::string_view to_string(TransactionStatus s) {
  return s == TransactionStatus::Completed ? "completed" : "dropped";
}

struct Transaction {
  std::uint64_t id = 0;
  std::string flow_id;
  std::string device_id;
  SimTime start_time = 0;
  std::vector<Hop> hops;
  TransactionStatus status = TransactionStatus::Dropped;

  double total_processing_time() const {
    double sum = 0.0;
    for (const auto& h : hops) sum += h.processing_time_s;
    return sum;
  }
};

/// Arrival times phase, phase + period, ... strictly below horizon.
inline std::vector<SimTime> emission_times(std::int64_t period, SimTime horizon, SimTime phase = 0) {
  if (period <= 0) throw std::invalid_argument("transaction period must be > 0");
  std::vector<SimTime> out;
  for (SimTime t = phase; t < horizon; t += period) out.push_back(t);
  return out;
}

inline void validate_flow(const OsmoticFlow& flow, const Topology& topo) {
  if (flow.chain.empty()) throw TopologyError("flow '" + flow.id + "' has an empty chain");
  for (const auto& name : flow.chain) {
    if (!topo.has_abstract_mel(name)) {
      throw TopologyError("flow '" + flow.id + "' references unknown abstract MEL '" + name + "'");
    }
  }
  (void)topo.device(flow.source_device);
}

/// Runs one transaction hop by hop starting at `start`. Each hop records its
/// host and the host's self-consumption at the sampling instant. An
/// unroutable hop drops the transaction and keeps the hops done so far.
inline Transaction execute_transaction(Topology& topo, const OsmoticFlow& flow, std::uint64_t id,
                                       SimTime start, UtcTime epoch,
                                       MetricSampling sampling = MetricSampling::HopStart) {
  Transaction txn;
  txn.id = id;
  txn.flow_id = flow.id;
  txn.device_id = flow.source_device;
  txn.start_time = start;
  auto& dev = topo.device(flow.source_device);
  double hop_start = static_cast<double>(start);
  for (const auto& abstract : flow.chain) {
    Route route;
    try {
      route = topo.resolve(dev, abstract);
    } catch (const UnroutableError&) {
      txn.status = TransactionStatus::Dropped;
      return txn;
    }
    const auto& inst = topo.instance(route.instance);
    const auto& dc = topo.datacenter(inst.host);
    const double sample_at =
        sampling == MetricSampling::HopStart ? hop_start : static_cast<double>(start);
    const UtcTime when = epoch + std::chrono::seconds{static_cast<std::int64_t>(std::floor(sample_at))};
    Hop hop;
    hop.dc_id = dc.id;
    hop.instance_id = inst.id;
    hop.start_time = hop_start;
    hop.processing_time_s = topo.processing_time(inst);
    hop.self_consumption = dc.energy.self_consumption(when);
    hop_start += hop.processing_time_s;
    txn.hops.push_back(std::move(hop));
  }
  txn.status = TransactionStatus::Completed;
  return txn;
}

/// `txn_id,flow_id,start_time,status,hop_index,dc_id,proc_time_s,self_consumption`;
/// a transaction dropped before its first hop gets one row with empty hop fields.
inline void write_transactions_csv(std::ostream& out, const std::vector<Transaction>& txns) {
  out << "txn_id,flow_id,start_time,status,hop_index,dc_id,proc_time_s,self_consumption\n";
  for (const auto& t : txns) {
    const auto prefix = std::to_string(t.id) + "," + t.flow_id + "," + std::to_string(t.start_time) +
                        "," + std::string(to_string(t.status)) + ",";
    if (t.hops.empty()) {
      out << prefix << ",,,\n";
      continue;
    }
    for (std::size_t i = 0; i < t.hops.size(); ++i) {
      const auto& h = t.hops[i];
      out << prefix << i << "," << h.dc_id << "," << csv::fixed6(h.processing_time_s) << ","
          << csv::fixed6(h.self_consumption) << "\n";
    }
  }
}

}  // namespace osmosis
