#pragma once

// Datacenter energy controller (grid + PV + optional battery under one of
// three policies) and the solar-charged IoT device battery.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "osmosis/simcore.hpp"
#include "osmosis/traces.hpp"

namespace osmosis {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();

struct PowerGrid {
  double cost_per_kwh = 0.0;
  double low_carbon_fraction = 0.0;
  double res_fraction = 0.0;

  void validate() const {
    if (!(cost_per_kwh >= 0.0)) throw ConfigError("grid cost_per_kwh must be >= 0");
    if (!(res_fraction >= 0.0 && res_fraction <= low_carbon_fraction &&
          low_carbon_fraction <= 1.0)) {
      throw ConfigError("grid fractions must satisfy 0 <= res_fraction <= low_carbon_fraction <= 1");
    }
  }
};

struct SolarInstallation {
  double peak_kwp = 0.0;
  // Panel orientation is carried as metadata; its effect is assumed to be
  // baked into the trace.
  double tilt_deg = 0.0;
  double azimuth_deg = 0.0;
  double latitude = 0.0;
  double longitude = 0.0;
  TracePtr trace;
};

struct BatteryStore {
  double capacity_wh = 0.0;
  double charge_wh = 0.0;
  double max_charge_power_w = kUnlimited;
  double efficiency = 1.0;  // applied on the charging path

  void validate() const {
    if (!(capacity_wh >= 0.0)) throw ConfigError("battery capacity must be >= 0");
    if (!(charge_wh >= 0.0 && charge_wh <= capacity_wh)) {
      throw ConfigError("battery charge must lie in [0, capacity]");
    }
    if (!(max_charge_power_w >= 0.0)) throw ConfigError("battery max_charge_power must be >= 0");
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
      throw ConfigError("battery efficiency must lie in (0, 1]");
    }
  }
};

enum class EnergyPolicy { GridOnly, OnGrid, OnGridEnergyStorage };

constexpr std::string_view to_string(EnergyPolicy p) {
  switch (p) {
    case EnergyPolicy::GridOnly: return "GridOnly";
    case EnergyPolicy::OnGrid: return "OnGrid";
    case EnergyPolicy::OnGridEnergyStorage: return "OnGridEnergyStorage";
  }
  return "unknown";
}

inline std::optional<EnergyPolicy> parse_policy(std::string_view s) {
  if (s == "GridOnly" || s == "GridOnlyPolicy") return EnergyPolicy::GridOnly;
  if (s == "OnGrid" || s == "OnGridPolicy") return EnergyPolicy::OnGrid;
  if (s == "OnGridEnergyStorage" || s == "OnGridEnergyStoragePolicy") {
    return EnergyPolicy::OnGridEnergyStorage;
  }
  return std::nullopt;
}

/// Cumulative energy flows at one datacenter, all in Wh.
struct EnergyLedger {
  double from_pv_direct = 0.0;
  double from_battery = 0.0;
  double from_grid = 0.0;
  double to_battery = 0.0;
  double to_grid_export = 0.0;
  double grid_cost = 0.0;
  // Totals the flows above must balance against.
  double pv_produced = 0.0;
  double demand = 0.0;

  EnergyLedger& operator+=(const EnergyLedger& o) {
    from_pv_direct += o.from_pv_direct;
    from_battery += o.from_battery;
    from_grid += o.from_grid;
    to_battery += o.to_battery;
    to_grid_export += o.to_grid_export;
    grid_cost += o.grid_cost;
    pv_produced += o.pv_produced;
    demand += o.demand;
    return *this;
  }

  double consumption_imbalance() const {
    return std::abs(from_pv_direct + from_battery + from_grid - demand);
  }
  double production_imbalance() const {
    return std::abs(from_pv_direct + to_battery + to_grid_export - pv_produced);
  }
};

/// Running ledger totals with Neumaier compensation, so long runs of small
/// ticks still balance to well below a nanowatt-hour.
class CompensatedLedger {
 public:
  void add(const EnergyLedger& d) {
    for (auto field : kFields) {
      double& s = sum_.*field;
      const double x = d.*field;
      const double t = s + x;
      comp_.*field += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
      s = t;
    }
  }

  EnergyLedger value() const {
    EnergyLedger out;
    for (auto field : kFields) out.*field = sum_.*field + comp_.*field;
    return out;
  }

 private:
  static constexpr double EnergyLedger::*kFields[] = {
      &EnergyLedger::from_pv_direct, &EnergyLedger::from_battery,   &EnergyLedger::from_grid,
      &EnergyLedger::to_battery,     &EnergyLedger::to_grid_export, &EnergyLedger::grid_cost,
      &EnergyLedger::pv_produced,    &EnergyLedger::demand};
  EnergyLedger sum_;
  EnergyLedger comp_;
};

/// Constant datacenter draw in kW from annual PV yield and the RES
/// utilization ratio: s_ann / e_u / hours_in_year.
inline double compute_avg_draw(double annual_kwh, double res_utilization,
                               std::int64_t hours_in_year = 8760) {
  if (!(res_utilization > 0.0 && res_utilization <= 1.0)) {
    throw ConfigError("res_utilization must lie in (0, 1], got " + std::to_string(res_utilization));
  }
  if (!(annual_kwh >= 0.0)) throw ConfigError("annual PV energy must be >= 0");
  return annual_kwh / res_utilization / static_cast<double>(hours_in_year);
}

struct EnergyControllerConfig {
  PowerGrid grid;
  std::optional<SolarInstallation> solar;
  std::optional<BatteryStore> battery;
  EnergyPolicy policy = EnergyPolicy::OnGrid;
  double res_utilization = 1.0;
  // Overrides the annual yield otherwise integrated from a full-year trace.
  std::optional<double> annual_energy_kwh;
  // Year whose hour count divides the annual yield; defaults to the year the
  // simulation runs in.
  std::optional<int> trace_year;
  // Required when there is no solar installation.
  std::optional<double> avg_draw_kw;
};

class EnergyController {
 public:
  explicit EnergyController(EnergyControllerConfig cfg)
      : grid_(cfg.grid), solar_(std::move(cfg.solar)), battery_(cfg.battery), policy_(cfg.policy),
        res_utilization_(cfg.res_utilization) {
    grid_.validate();
    if (!(res_utilization_ > 0.0 && res_utilization_ <= 1.0)) {
      throw ConfigError("res_utilization must lie in (0, 1]");
    }
    if (policy_ == EnergyPolicy::OnGridEnergyStorage && !battery_) {
      throw ConfigError("OnGridEnergyStorage policy requires a battery");
    }
    if (battery_) battery_->validate();
    if (solar_) {
      if (!(solar_->peak_kwp > 0.0)) throw ConfigError("solar peak_kwp must be > 0");
      if (!solar_->trace) throw ConfigError("solar installation has no trace");
      const int year = cfg.trace_year.value_or(calendar::year_of(solar_->trace->coverage_start()));
      annual_kwh_ = cfg.annual_energy_kwh ? *cfg.annual_energy_kwh
                                          : annual_energy(*solar_->trace, solar_->peak_kwp, year);
      avg_draw_kw_ = compute_avg_draw(annual_kwh_, res_utilization_, calendar::hours_in_year(year));
    } else {
      if (policy_ != EnergyPolicy::GridOnly) {
        throw ConfigError(std::string(to_string(policy_)) + " policy requires a solar installation");
      }
      if (!cfg.avg_draw_kw || !(*cfg.avg_draw_kw >= 0.0)) {
        throw ConfigError("a datacenter without solar needs avg_draw_kw >= 0");
      }
      avg_draw_kw_ = *cfg.avg_draw_kw;
    }
  }

  const PowerGrid& grid() const { return grid_; }
  const std::optional<SolarInstallation>& solar() const { return solar_; }
  const std::optional<BatteryStore>& battery() const { return battery_; }
  EnergyPolicy policy() const { return policy_; }
  double res_utilization() const { return res_utilization_; }
  double avg_draw_kw() const { return avg_draw_kw_; }
  double annual_kwh() const { return annual_kwh_; }
  /// Cumulative flows since construction.
  EnergyLedger ledger() const { return ledger_.value(); }

  bool uses_pv() const { return solar_.has_value() && policy_ != EnergyPolicy::GridOnly; }

  /// Renewable power available at t, kW.
  double pv_power(UtcTime t) const {
    if (!uses_pv()) return 0.0;
    return solar_->peak_kwp * solar_->trace->power_at(t) / 1000.0;
  }

  /// Share of the constant draw covered directly by PV at t, in [0, 1].
  double self_consumption(UtcTime t) const {
    if (avg_draw_kw_ <= 0.0) return 0.0;
    const double re = pv_power(t);
    return re > avg_draw_kw_ ? 1.0 : re / avg_draw_kw_;
  }

  /// Advances the controller by dt seconds starting at t. Returns the flows
  /// of this tick and folds them into the cumulative ledger.
  EnergyLedger tick(UtcTime t, std::int64_t dt) {
    if (dt <= 0) throw std::invalid_argument("energy tick duration must be > 0");
    EnergyLedger delta;
    if (uses_pv()) {
      solar_->trace->for_each_segment(t, dt, [&](UtcTime, std::int64_t secs, double w_per_kwp) {
        const double hours = static_cast<double>(secs) / 3600.0;
        apply_segment(delta, solar_->peak_kwp * w_per_kwp * hours, hours);
      });
    } else {
      apply_segment(delta, 0.0, static_cast<double>(dt) / 3600.0);
    }
    ledger_.add(delta);
    return delta;
  }

 private:
  void apply_segment(EnergyLedger& d, double pv_wh, double hours) {
    const double demand_wh = avg_draw_kw_ * 1000.0 * hours;
    d.demand += demand_wh;
    d.pv_produced += pv_wh;
    double grid_wh = 0.0;
    switch (policy_) {
      case EnergyPolicy::GridOnly:
        grid_wh = demand_wh;
        break;
      case EnergyPolicy::OnGrid: {
        const double direct = std::min(pv_wh, demand_wh);
        d.from_pv_direct += direct;
        d.to_grid_export += pv_wh - direct;
        grid_wh = demand_wh - direct;
        break;
      }
      case EnergyPolicy::OnGridEnergyStorage: {
        auto& bat = *battery_;
        const double direct = std::min(pv_wh, demand_wh);
        d.from_pv_direct += direct;
        const double surplus = pv_wh - direct;
        const double room = std::max(0.0, bat.capacity_wh - bat.charge_wh) / bat.efficiency;
        const double limit = bat.max_charge_power_w * hours;
        const double into = std::min({surplus, room, limit});
        bat.charge_wh = std::min(bat.capacity_wh, bat.charge_wh + into * bat.efficiency);
        d.to_battery += into;
        d.to_grid_export += surplus - into;
        const double shortfall = demand_wh - direct;
        const double out = std::min(shortfall, bat.charge_wh);
        bat.charge_wh = std::max(0.0, bat.charge_wh - out);
        d.from_battery += out;
        grid_wh = shortfall - out;
        break;
      }
    }
    d.from_grid += grid_wh;
    d.grid_cost += grid_wh / 1000.0 * grid_.cost_per_kwh;
  }

  PowerGrid grid_;
  std::optional<SolarInstallation> solar_;
  std::optional<BatteryStore> battery_;
  EnergyPolicy policy_;
  double res_utilization_;
  double annual_kwh_ = 0.0;
  double avg_draw_kw_ = 0.0;
  CompensatedLedger ledger_;
};

// ---------------------------------------------------------------------------
// IoT device battery
// ---------------------------------------------------------------------------

struct DeviceBattery {
  double capacity_mah = 0.0;
  double charge_mah = 0.0;
  double voltage_v = 3.7;
  double panel_peak_w = 0.0;
  double max_charge_current_ma = kUnlimited;
  double resume_fraction = 0.01;
  bool depleted = false;

  void validate() const {
    if (!(capacity_mah > 0.0)) throw ConfigError("device battery capacity must be > 0");
    if (!(charge_mah >= 0.0 && charge_mah <= capacity_mah)) {
      throw ConfigError("device battery charge must lie in [0, capacity]");
    }
    if (!(voltage_v > 0.0)) throw ConfigError("device battery voltage must be > 0");
    if (!(panel_peak_w >= 0.0)) throw ConfigError("device panel peak must be >= 0");
    if (!(max_charge_current_ma >= 0.0)) throw ConfigError("max_charge_current must be >= 0");
    if (!(resume_fraction >= 0.0 && resume_fraction <= 1.0)) {
      throw ConfigError("resume_fraction must lie in [0, 1]");
    }
  }

  double fraction() const { return charge_mah / capacity_mah; }

  /// Charging current in mA from the panel at a given trace value, before
  /// the charge-current limit.
  double raw_harvest_ma(double w_per_kwp) const {
    return panel_peak_w * (w_per_kwp / 1000.0) / voltage_v * 1000.0;
  }
  double harvest_ma(double w_per_kwp) const {
    return std::min(raw_harvest_ma(w_per_kwp), max_charge_current_ma);
  }

  void update_depletion() {
    if (charge_mah <= 0.0) {
      charge_mah = 0.0;
      depleted = true;
    } else if (depleted && charge_mah > resume_fraction * capacity_mah) {
      depleted = false;
    }
  }

  /// Event-driven draw (e.g. one transaction).
  void debit(double mah) {
    charge_mah = std::clamp(charge_mah - mah, 0.0, capacity_mah);
    update_depletion();
  }
};

/// Advances a device battery by dt seconds: subtracts `consumed_mah` and adds
/// the panel harvest over [t, t + dt), clamped to [0, capacity].
inline DeviceBattery tick_device(DeviceBattery dev, UtcTime t, std::int64_t dt, double consumed_mah,
                                 const IrradianceTrace* trace) {
  if (dt <= 0) throw std::invalid_argument("device tick duration must be > 0");
  if (consumed_mah < 0.0) throw std::invalid_argument("consumed charge must be >= 0");
  double harvest_mah = 0.0;
  if (trace != nullptr && dev.panel_peak_w > 0.0) {
    trace->for_each_segment(t, dt, [&](UtcTime, std::int64_t secs, double w_per_kwp) {
      harvest_mah += dev.harvest_ma(w_per_kwp) * static_cast<double>(secs) / 3600.0;
    });
  }
  dev.charge_mah = std::clamp(dev.charge_mah - consumed_mah + harvest_mah, 0.0, dev.capacity_mah);
  dev.update_depletion();
  return dev;
}

}  // namespace osmosis
