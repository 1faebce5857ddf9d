// osmosis-sim: scenario-driven command line for the osmotic RES simulator.
//
//   osmosis-sim simulate <scenario> [--alg ALGn] [--out DIR] [--seed N]
//   osmosis-sim compare <scenario> --algs ALG1,ALG2,... [--out DIR]
//   osmosis-sim validate <scenario>
//   osmosis-sim synth-trace --out FILE [--peak W] [--sunrise H] [--sunset H] ...
//
// Exit codes: 0 success, 1 validation failure, 2 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "osmosis/osmosis.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

std::vector<osmosis::Algorithm> parse_algs(const std::string& csv_list) {
  std::vector<osmosis::Algorithm> out;
  std::stringstream ss(csv_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto a = osmosis::parse_algorithm(item);
    if (!a) throw osmosis::ScenarioError({"--algs: unknown algorithm '" + item + "'"});
    out.push_back(*a);
  }
  if (out.empty()) throw osmosis::ScenarioError({"--algs: no algorithm given"});
  return out;
}

void print_summary(const osmosis::MetricsSummary& s) {
  std::cout << osmosis::kSummaryHeader;
  osmosis::write_summary_row(std::cout, s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Osmotic computing simulator with renewable energy and autonomic agents"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string alg;
  std::string cooperation;
  std::string out_dir;
  std::uint64_t seed = 0;

  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write report files");
  simulate->add_option("scenario", scenario_path, "Scenario file")->required();
  simulate->add_option("--alg", alg, "Adaptation algorithm (ALG1..ALG5)");
  simulate->add_option("--cooperation", cooperation, "independent | communicating | central");
  auto* seed_opt = simulate->add_option("--seed", seed, "Random seed");
  simulate->add_option("--out", out_dir, "Output directory (default: out/<scenario name>)");

  std::string algs = "ALG1,ALG2,ALG3,ALG4,ALG5";
  auto* cmp = app.add_subcommand("compare", "Run several algorithms on the same scenario");
  cmp->add_option("scenario", scenario_path, "Scenario file")->required();
  cmp->add_option("--algs", algs, "Comma-separated algorithm list")->capture_default_str();
  cmp->add_option("--out", out_dir, "Output directory (default: out/<scenario name>)");

  auto* validate = app.add_subcommand("validate", "Check a scenario and its traces");
  validate->add_option("scenario", scenario_path, "Scenario file")->required();

  std::string trace_out;
  double peak = 1000.0, sunrise = 6.0, sunset = 18.0;
  double morning = 1.0, afternoon = 1.0;
  int days = 1;
  std::string start = "2016-01-01";
  bool zero = false;
  auto* synth = app.add_subcommand("synth-trace", "Write a synthetic clear-sky trace CSV");
  synth->add_option("--out", trace_out, "Output CSV file")->required();
  synth->add_option("--peak", peak, "Peak W per kWp at solar noon")->capture_default_str();
  synth->add_option("--sunrise", sunrise, "Sunrise hour")->capture_default_str();
  synth->add_option("--sunset", sunset, "Sunset hour")->capture_default_str();
  synth->add_option("--days", days, "Number of days")->capture_default_str();
  synth->add_option("--start", start, "First day (YYYY-MM-DD)")->capture_default_str();
  synth->add_option("--morning-factor", morning, "Multiplier before solar noon")->capture_default_str();
  synth->add_option("--afternoon-factor", afternoon, "Multiplier after solar noon")->capture_default_str();
  synth->add_flag("--zero", zero, "All-zero (overcast) trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*synth) {
      osmosis::ClearSkyOptions o;
      o.start = osmosis::calendar::parse_iso(start);
      o.morning_factor = zero ? 0.0 : morning;
      o.afternoon_factor = zero ? 0.0 : afternoon;
      o.location_id = std::filesystem::path(trace_out).stem().string();
      const auto trace = osmosis::synth_clear_sky(zero ? 0.0 : peak, sunrise, sunset, days, o);
      std::ofstream f(trace_out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write '" + trace_out + "'");
      osmosis::write_trace(f, trace);
      std::cout << "wrote " << trace.size() << " hourly samples to " << trace_out << "\n";
      return kOk;
    }

    const auto scenario = osmosis::parse_scenario(scenario_path);
    const auto target = out_dir.empty() ? std::filesystem::path("out") / scenario.name
                                        : std::filesystem::path(out_dir);

    if (*validate) {
      std::cout << "scenario '" << scenario.name << "' is valid: " << scenario.datacenters.size()
                << " datacenters, " << scenario.devices.size() << " devices, "
                << scenario.flows.size() << " flows\n";
      return kOk;
    }

    if (*simulate) {
      osmosis::RunOptions opts;
      if (!alg.empty()) {
        opts.algorithm = osmosis::parse_algorithm(alg);
        if (!opts.algorithm) throw osmosis::ScenarioError({"--alg: unknown algorithm '" + alg + "'"});
      }
      if (!cooperation.empty()) {
        opts.cooperation = osmosis::parse_cooperation(cooperation);
        if (!opts.cooperation) {
          throw osmosis::ScenarioError({"--cooperation: unknown mode '" + cooperation + "'"});
        }
      }
      if (*seed_opt) opts.seed = seed;
      const auto result = osmosis::run(scenario, opts, target);
      print_summary(result.report.summary);
      std::cout << "reports written to " << target.string() << "\n";
      return kOk;
    }

    if (*cmp) {
      const auto rows = osmosis::compare(scenario, parse_algs(algs), {}, target);
      osmosis::write_comparison_csv(std::cout, rows);
      std::cout << "comparison written to " << (target / "comparison.csv").string() << "\n";
      return kOk;
    }
  } catch (const osmosis::ScenarioError& e) {
    std::cerr << "validation failed: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
