#pragma once

// Sustainability metrics over executed transactions and the report files
// built from them.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "osmosis/agents.hpp"
#include "osmosis/csv.hpp"
#include "osmosis/energy.hpp"
#include "osmosis/flows.hpp"
#include "osmosis/topology.hpp"

namespace osmosis {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using LowCarbonShares = std::map<std::string, double>;  // dc id -> p_low

/// Processing-time-weighted self-consumption of one transaction.
inline double transaction_self(const Transaction& t) {
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& h : t.hops) {
    weighted += h.processing_time_s * h.self_consumption;
    total += h.processing_time_s;
  }
  return total > 0.0 ? weighted / total : 0.0;
}

/// Processing-time-weighted low-carbon share of one transaction: PV share
/// plus the grid's low-carbon share of the remainder.
inline double transaction_low(const Transaction& t, const LowCarbonShares& p_low) {
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& h : t.hops) {
    const auto it = p_low.find(h.dc_id);
    if (it == p_low.end()) throw std::out_of_range("no grid share for datacenter '" + h.dc_id + "'");
    weighted += h.processing_time_s * h.self_consumption +
                h.processing_time_s * it->second * (1.0 - h.self_consumption);
    total += h.processing_time_s;
  }
  return total > 0.0 ? weighted / total : 0.0;
}

namespace detail {
template <typename Fn>
std::pair<double, std::size_t> sum_completed(const std::vector<Transaction>& txns, Fn&& per_txn) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : txns) {
    if (t.status != TransactionStatus::Completed) continue;
    sum += per_txn(t);
    ++n;
  }
  return {sum, n};
}
}  // namespace detail

/// Mean per-transaction self-consumption; empty when nothing completed.
inline std::optional<double> m_self(const std::vector<Transaction>& txns) {
  const auto [sum, n] = detail::sum_completed(txns, transaction_self);
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

/// Unnormalized sum over transactions.
inline std::optional<double> m_self_raw(const std::vector<Transaction>& txns) {
  const auto [sum, n] = detail::sum_completed(txns, transaction_self);
  if (n == 0) return std::nullopt;
  return sum;
}

inline std::optional<double> m_low(const std::vector<Transaction>& txns, const LowCarbonShares& p_low) {
  const auto [sum, n] =
      detail::sum_completed(txns, [&](const Transaction& t) { return transaction_low(t, p_low); });
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

inline std::optional<double> m_low_raw(const std::vector<Transaction>& txns,
                                       const LowCarbonShares& p_low) {
  const auto [sum, n] =
      detail::sum_completed(txns, [&](const Transaction& t) { return transaction_low(t, p_low); });
  if (n == 0) return std::nullopt;
  return sum;
}

inline LowCarbonShares low_carbon_shares(const Topology& topo) {
  LowCarbonShares out;
  for (const auto& [id, dc] : topo.datacenters()) out[id] = dc.energy.grid().low_carbon_fraction;
  return out;
}

/// Fraction of completed transactions whose first edge hop ran on the edge
/// datacenter nearest to the source device. Transactions without an edge hop
/// are left out of the denominator.
inline std::optional<double> nearest_edge_ratio(const std::vector<Transaction>& txns,
                                                const Topology& topo) {
  std::size_t hits = 0;
  std::size_t n = 0;
  std::map<std::string, std::optional<std::string>> nearest;
  for (const auto& t : txns) {
    if (t.status != TransactionStatus::Completed) continue;
    const Hop* edge_hop = nullptr;
    for (const auto& h : t.hops) {
      if (topo.datacenter(h.dc_id).kind == DatacenterKind::Edge) {
        edge_hop = &h;
        break;
      }
    }
    if (!edge_hop) continue;
    auto it = nearest.find(t.device_id);
    if (it == nearest.end()) {
      it = nearest.emplace(t.device_id, topo.nearest_edge(topo.device(t.device_id).location)).first;
    }
    ++n;
    if (it->second && *it->second == edge_hop->dc_id) ++hits;
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct BatterySample {
  SimTime time = 0;
  std::string device_id;
  double charge_mah = 0.0;
  double charge_fraction = 0.0;
};

struct MetricsSummary {
  std::string algorithm;
  std::optional<double> m_self;
  std::optional<double> m_self_raw;
  std::optional<double> m_low;
  std::optional<double> m_low_raw;
  std::optional<double> nearest_edge_ratio;
  std::size_t n_completed = 0;
  std::size_t n_dropped = 0;
  double grid_cost_total = 0.0;
};

struct LedgerRow {
  std::string dc_id;
  double avg_draw_kw = 0.0;
  EnergyLedger ledger;
};

struct MetricsReport {
  MetricsSummary summary;
  std::vector<Transaction> transactions;
  std::vector<BatterySample> battery_timeline;
  std::vector<LedgerRow> ledgers;
  std::vector<Decision> decisions;
};

inline MetricsSummary summarize(std::string algorithm, const std::vector<Transaction>& txns,
                                const Topology& topo) {
  MetricsSummary s;
  s.algorithm = std::move(algorithm);
  const auto shares = low_carbon_shares(topo);
  s.m_self = m_self(txns);
  s.m_self_raw = m_self_raw(txns);
  s.m_low = m_low(txns, shares);
  s.m_low_raw = m_low_raw(txns, shares);
  s.nearest_edge_ratio = nearest_edge_ratio(txns, topo);
  for (const auto& t : txns) {
    (t.status == TransactionStatus::Completed ? s.n_completed : s.n_dropped) += 1;
  }
  for (const auto& [id, dc] : topo.datacenters()) s.grid_cost_total += dc.energy.ledger().grid_cost;
  return s;
}

namespace detail {
inline std::string opt6(const std::optional<double>& v) { return v ? csv::fixed6(*v) : "n/a"; }
}  // namespace detail

inline constexpr const char* kSummaryHeader =
    "algorithm,m_self,m_self_raw,m_low,m_low_raw,nearest_edge_ratio,n_completed,n_dropped,"
    "grid_cost_total\n";

inline void write_summary_row(std::ostream& out, const MetricsSummary& s) {
  out << s.algorithm << "," << detail::opt6(s.m_self) << "," << detail::opt6(s.m_self_raw) << ","
      << detail::opt6(s.m_low) << "," << detail::opt6(s.m_low_raw) << ","
      << detail::opt6(s.nearest_edge_ratio) << "," << s.n_completed << "," << s.n_dropped << ","
      << csv::fixed6(s.grid_cost_total) << "\n";
}

inline void write_battery_csv(std::ostream& out, const std::vector<BatterySample>& rows) {
  out << "time,device_id,charge_mAh,charge_fraction\n";
  for (const auto& r : rows) {
    out << r.time << "," << r.device_id << "," << csv::fixed6(r.charge_mah) << ","
        << csv::fixed6(r.charge_fraction) << "\n";
  }
}

inline void write_ledger_csv(std::ostream& out, const std::vector<LedgerRow>& rows) {
  out << "dc_id,avg_draw_kw,pv_produced_wh,demand_wh,from_pv_direct_wh,from_battery_wh,"
         "from_grid_wh,to_battery_wh,to_grid_export_wh,grid_cost\n";
  for (const auto& r : rows) {
    const auto& l = r.ledger;
    out << r.dc_id << "," << csv::fixed6(r.avg_draw_kw) << "," << csv::fixed6(l.pv_produced) << ","
        << csv::fixed6(l.demand) << "," << csv::fixed6(l.from_pv_direct) << ","
        << csv::fixed6(l.from_battery) << "," << csv::fixed6(l.from_grid) << ","
        << csv::fixed6(l.to_battery) << "," << csv::fixed6(l.to_grid_export) << ","
        << csv::fixed6(l.grid_cost) << "\n";
  }
}

inline void write_comparison_csv(std::ostream& out, const std::vector<MetricsSummary>& rows) {
  out << "algorithm,m_self,m_low,nearest_edge_ratio\n";
  for (const auto& s : rows) {
    out << s.algorithm << "," << detail::opt6(s.m_self) << "," << detail::opt6(s.m_low) << ","
        << detail::opt6(s.nearest_edge_ratio) << "\n";
  }
}

namespace detail {
template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportError("cannot write '" + path.string() + "'");
  writer(out);
  if (!out) throw ReportError("failed writing '" + path.string() + "'");
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ReportError("cannot create output directory '" + dir.string() + "'");
  }
}
}  // namespace detail

/// Writes the five report files into out_dir (created if missing).
inline void emit_report(const MetricsReport& report, const std::filesystem::path& out_dir) {
  detail::ensure_dir(out_dir);
  detail::write_file(out_dir / "metrics_summary.csv", [&](std::ostream& o) {
    o << kSummaryHeader;
    write_summary_row(o, report.summary);
  });
  detail::write_file(out_dir / "transactions.csv",
                     [&](std::ostream& o) { write_transactions_csv(o, report.transactions); });
  detail::write_file(out_dir / "battery_timeline.csv",
                     [&](std::ostream& o) { write_battery_csv(o, report.battery_timeline); });
  detail::write_file(out_dir / "energy_ledger.csv",
                     [&](std::ostream& o) { write_ledger_csv(o, report.ledgers); });
  detail::write_file(out_dir / "agent_decisions.csv",
                     [&](std::ostream& o) { write_decisions_csv(o, report.decisions); });
}

inline void emit_comparison(const std::vector<MetricsSummary>& rows,
                            const std::filesystem::path& out_dir) {
  detail::ensure_dir(out_dir);
  detail::write_file(out_dir / "comparison.csv",
                     [&](std::ostream& o) { write_comparison_csv(o, rows); });
}

}  // namespace osmosis
