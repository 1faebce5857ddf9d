#include <gtest/gtest.h>

#include <random>

#include "osmosis/agents.hpp"
#include "osmosis/simulation.hpp"
#include "test_support.hpp"

using namespace osmosis;
namespace ot = osmosis::testing;

namespace {

AgentMessage msg(std::string sender, double r, std::vector<std::string> mels) {
  AgentMessage m;
  m.sender = std::move(sender);
  m.destinations = {"dev:cam"};
  m.content.r = r;
  m.content.mel_list = std::move(mels);
  return m;
}

AgentMessage candidate(std::string sender, std::string inst, double e_re, double self, double p_low,
                       GeoPoint loc) {
  auto m = msg(std::move(sender), e_re, {std::move(inst)});
  m.content.values = {{keys::kEre, e_re},
                      {keys::kSelf, self},
                      {keys::kLowCarbon, p_low},
                      {keys::kLatitude, loc.latitude},
                      {keys::kLongitude, loc.longitude}};
  return m;
}

const ot::EvalTraces& traces() {
  static const auto t = ot::anti_correlated_traces();
  return t;
}

/// Evaluation topology; the broker is built per test with the requested mode.
struct Harness {
  explicit Harness(Cooperation mode, Algorithm alg = Algorithm::ALG4,
                   UtcTime at = calendar::make_utc(2016, 6, 21, 9))
      : sim(ot::eval_scenario(traces())), broker(mode) {
    for (const auto& id : {"berlin", "paris", "dublin"}) broker.add(std::make_unique<DcAgent>(id));
    for (const auto& id : {"camera_1", "camera_2"}) broker.add(std::make_unique<DeviceAgent>(id, alg));
    if (mode == Cooperation::Central) broker.add(std::make_unique<CentralAgent>(alg));
    utc = at;
  }
  AgentContext ctx() { return AgentContext{sim.topology(), 0, utc, &decisions}; }
  BrokerRound round() {
    auto c = ctx();
    return broker.dispatch(c);
  }
  Simulation sim;
  AgentBroker broker;
  UtcTime utc;
  std::vector<Decision> decisions;
};

}  // namespace

TEST(DevicePlan, HighestIrradianceWins) {
  const auto q = device_agent_plan({msg("dc:1", 500, {"MEL_B.1"}), msg("dc:2", 300, {"MEL_B.2"})});
  EXPECT_EQ(q.at("MEL_B"), "MEL_B.1");
}

TEST(DevicePlan, EqualIrradianceKeepsFirstSeen) {
  const auto q = device_agent_plan({msg("dc:1", 400, {"MEL_B.1"}), msg("dc:2", 400, {"MEL_B.2"})});
  EXPECT_EQ(q.at("MEL_B"), "MEL_B.1");
}

TEST(DevicePlan, EmptyInboxGivesNoDirectives) { EXPECT_TRUE(device_agent_plan({}).empty()); }

TEST(DevicePlan, FamiliesAreIndependent) {
  const auto q = device_agent_plan({msg("dc:1", 100, {"MEL_B.1", "MEL_C.1"}),
                                    msg("dc:2", 300, {"MEL_B.2"}), msg("dc:3", 50, {"MEL_C.2"})});
  EXPECT_EQ(q.at("MEL_B"), "MEL_B.2");
  EXPECT_EQ(q.at("MEL_C"), "MEL_C.1");
}

TEST(DevicePlan, PureFunctionOfInbox) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    std::vector<AgentMessage> inbox;
    for (int d = 0; d < 4; ++d) {
      inbox.push_back(msg("dc:" + std::to_string(d), static_cast<double>(rng() % 4),
                          {"M.1" + std::to_string(d), "N.2" + std::to_string(d)}));
    }
    EXPECT_EQ(device_agent_plan(inbox), device_agent_plan(inbox));
    EXPECT_EQ(device_agent_plan(inbox), ot::max_r_first_seen_oracle(inbox));
  }
}

TEST(AdaptiveSelect, MaxRenewablesWhenNobodyIsFullyPowered) {
  const auto sel = select_adaptive(Algorithm::ALG4, ot::kBerlin,
                                   {candidate("dc:berlin", "MEL_B.1", 1.0, 0.3, 0.5, ot::kBerlin),
                                    candidate("dc:paris", "MEL_B.2", 2.0, 0.6, 0.9, ot::kParis)});
  EXPECT_EQ(sel.at("MEL_B").instance, "MEL_B.2");
  EXPECT_EQ(sel.at("MEL_B").reason, DecisionReason::MaxRes);
}

TEST(AdaptiveSelect, FullyPoweredTieGoesToNearest) {
  const auto sel = select_adaptive(Algorithm::ALG4, ot::kBerlin,
                                   {candidate("dc:paris", "MEL_B.2", 9.0, 1.0, 0.9, ot::kParis),
                                    candidate("dc:berlin", "MEL_B.1", 4.0, 1.0, 0.5, ot::kBerlin)});
  EXPECT_EQ(sel.at("MEL_B").instance, "MEL_B.1");
  EXPECT_EQ(sel.at("MEL_B").reason, DecisionReason::TieDistance);
}

TEST(AdaptiveSelect, NightBranchDiffersBetweenAlgorithms) {
  const std::vector<AgentMessage> night{candidate("dc:berlin", "MEL_B.1", 0, 0, 0.5, ot::kBerlin),
                                        candidate("dc:paris", "MEL_B.2", 0, 0, 0.9, ot::kParis)};
  const auto alg4 = select_adaptive(Algorithm::ALG4, ot::kBerlin, night);
  EXPECT_EQ(alg4.at("MEL_B").instance, "MEL_B.2");
  EXPECT_EQ(alg4.at("MEL_B").reason, DecisionReason::LowCarbonNight);
  const auto alg5 = select_adaptive(Algorithm::ALG5, ot::kBerlin, night);
  EXPECT_EQ(alg5.at("MEL_B").instance, "MEL_B.1");
  EXPECT_EQ(alg5.at("MEL_B").reason, DecisionReason::NearestNight);
}

TEST(AdaptiveSelect, ResidualTieFallsBackToInstanceId) {
  const auto sel = select_adaptive(Algorithm::ALG4, ot::kBerlin,
                                   {candidate("dc:b", "MEL_B.2", 2.0, 0.5, 0.5, ot::kParis),
                                    candidate("dc:a", "MEL_B.1", 2.0, 0.5, 0.5, ot::kParis)});
  EXPECT_EQ(sel.at("MEL_B").instance, "MEL_B.1");
  EXPECT_EQ(sel.at("MEL_B").reason, DecisionReason::TieId);
}

TEST(AdaptiveSelect, ScalingRenewablesNeverChangesChoice) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    std::vector<AgentMessage> inbox;
    const int n = 2 + static_cast<int>(rng() % 4);
    for (int k = 0; k < n; ++k) {
      inbox.push_back(candidate("dc:" + std::to_string(k), "MEL_B." + std::to_string(k + 1),
                                u(rng) < 0.2 ? 0.0 : 10 * u(rng), 0.9 * u(rng), u(rng),
                                {40 + 20 * u(rng), -10 + 30 * u(rng)}));
    }
    const auto base = select_adaptive(Algorithm::ALG4, ot::kBerlin, inbox);
    auto scaled = inbox;
    const double factor = 0.1 + 10 * u(rng);
    for (auto& m : scaled) m.content.values[keys::kEre] *= factor;
    EXPECT_EQ(select_adaptive(Algorithm::ALG4, ot::kBerlin, scaled).at("MEL_B").instance,
              base.at("MEL_B").instance);
  }
}

TEST(Broker, IndependentModeDiscardsEverything) {
  Harness h(Cooperation::Independent);
  const auto before = h.sim.topology().device("camera_1").routing_table;
  const auto round = h.round();
  EXPECT_EQ(round.published, 3u);
  EXPECT_EQ(round.delivered, 0u);
  EXPECT_EQ(round.discarded, 3u);
  EXPECT_TRUE(h.broker.inbox("dev:camera_1").empty());
  EXPECT_EQ(h.sim.topology().device("camera_1").routing_table, before);
}

TEST(Broker, CommunicatingModeDeliversToEveryDeviceSameTick) {
  Harness h(Cooperation::Communicating);
  const auto round = h.round();
  EXPECT_EQ(round.published, 3u);
  EXPECT_EQ(round.delivered, 6u);
  EXPECT_EQ(h.broker.inbox("dev:camera_1").size(), 3u);
  EXPECT_EQ(h.broker.inbox("dev:camera_2").size(), 3u);
  EXPECT_FALSE(h.sim.topology().device("camera_1").routing_table.empty());
}

TEST(Broker, CentralModeRoutesThroughCentralAgent) {
  Harness h(Cooperation::Central);
  h.round();
  EXPECT_EQ(h.broker.inbox(kCentralAgentId).size(), 3u);
  for (const auto& dev : {"dev:camera_1", "dev:camera_2"}) {
    const auto& inbox = h.broker.inbox(dev);
    ASSERT_EQ(inbox.size(), 1u);
    EXPECT_EQ(inbox[0].sender, kCentralAgentId);
  }
  // Central directives must match what a communicating device would pick.
  Harness peer(Cooperation::Communicating);
  peer.round();
  EXPECT_EQ(h.sim.topology().device("camera_1").routing_table,
            peer.sim.topology().device("camera_1").routing_table);
}

TEST(Broker, DuplicateAgentIdIsRejected) {
  AgentBroker b(Cooperation::Communicating);
  b.add(std::make_unique<DcAgent>("x"));
  EXPECT_THROW(b.add(std::make_unique<DcAgent>("x")), ConfigError);
}

TEST(DcAgentStep, EmptyMelListStillPublished) {
  auto sc = ot::eval_scenario(traces());
  sc.datacenters.push_back(ot::make_dc("rome", DatacenterKind::Edge, {41.9, 12.5}, traces().paris, 5, 0.5, 0.4));
  Simulation sim(sc);
  AgentBroker b(Cooperation::Communicating);
  b.add(std::make_unique<DcAgent>("rome"));
  b.add(std::make_unique<DeviceAgent>("camera_1", Algorithm::ALG4));
  AgentContext ctx{sim.topology(), 0, calendar::make_utc(2016, 6, 21, 12), nullptr};
  b.dispatch(ctx);
  const auto& inbox = b.inbox("dev:camera_1");
  ASSERT_EQ(inbox.size(), 1u);
  EXPECT_EQ(inbox[0].sender, "dc:rome");
  EXPECT_TRUE(inbox[0].content.mel_list.empty());
}

TEST(DcAgentStep, NightMessageCarriesZeroIrradiance) {
  Harness h(Cooperation::Communicating, Algorithm::ALG4, calendar::make_utc(2016, 6, 21, 2));
  h.round();
  for (const auto& m : h.broker.inbox("dev:camera_1")) EXPECT_DOUBLE_EQ(m.content.r, 0.0);
}

TEST(DcAgentStep, TwoDatacentersGiveTwoMessagesPerDevice) {
  auto sc = ot::eval_scenario(traces());
  Simulation sim(sc);
  AgentBroker b(Cooperation::Communicating);
  b.add(std::make_unique<DcAgent>("berlin"));
  b.add(std::make_unique<DcAgent>("paris"));
  b.add(std::make_unique<DeviceAgent>("camera_1", Algorithm::ALG5));
  b.add(std::make_unique<DeviceAgent>("camera_2", Algorithm::ALG5));
  for (int hour = 0; hour < 24; ++hour) {
    AgentContext ctx{sim.topology(), hour * 3600, calendar::make_utc(2016, 6, 21, hour), nullptr};
    b.dispatch(ctx);
    EXPECT_EQ(b.inbox("dev:camera_1").size(), 2u);
    EXPECT_EQ(b.inbox("dev:camera_2").size(), 2u);
  }
}

TEST(DcAgentStep, NeighbourListLimitsRecipientsAndUnknownIsDiscarded) {
  auto sc = ot::eval_scenario(traces());
  Simulation sim(sc);
  AgentBroker b(Cooperation::Communicating);
  b.add(std::make_unique<DcAgent>("berlin", std::vector<std::string>{"camera_1", "ghost"}));
  b.add(std::make_unique<DeviceAgent>("camera_1", Algorithm::ALG4));
  b.add(std::make_unique<DeviceAgent>("camera_2", Algorithm::ALG4));
  AgentContext ctx{sim.topology(), 0, calendar::make_utc(2016, 6, 21, 12), nullptr};
  const auto round = b.dispatch(ctx);
  EXPECT_EQ(b.inbox("dev:camera_1").size(), 1u);
  EXPECT_TRUE(b.inbox("dev:camera_2").empty());
  EXPECT_EQ(round.discarded, 1u);
  ASSERT_EQ(b.diagnostics().size(), 1u);
  EXPECT_NE(b.diagnostics()[0].find("ghost"), std::string::npos);
}

TEST(Algorithms, StaticBerlinSendsEveryEdgeHopToBerlin) {
  RunOptions o;
  o.algorithm = Algorithm::ALG1;
  const auto r = run(ot::eval_scenario(traces()), o);
  ASSERT_FALSE(r.report.transactions.empty());
  for (const auto& t : r.report.transactions) EXPECT_EQ(t.hops.at(0).dc_id, "berlin");
}

TEST(Algorithms, NightRulesPickLowCarbonOrNearest) {
  auto sc = ot::eval_scenario(traces());
  sc.sim.start = calendar::make_utc(2016, 6, 21, 0);
  sc.sim.duration_s = 4 * 3600;  // 00:00 - 04:00, no PV anywhere
  RunOptions o;
  o.algorithm = Algorithm::ALG4;
  for (const auto& t : run(sc, o).report.transactions) EXPECT_EQ(t.hops.at(0).dc_id, "paris");
  o.algorithm = Algorithm::ALG5;
  for (const auto& t : run(sc, o).report.transactions) EXPECT_EQ(t.hops.at(0).dc_id, "berlin");
}

TEST(Algorithms, RoundRobinLogsWildcardDecisionAndAlternates) {
  RunOptions o;
  o.algorithm = Algorithm::ALG3;
  const auto r = run(ot::eval_scenario(traces()), o);
  ASSERT_FALSE(r.report.decisions.empty());
  for (const auto& d : r.report.decisions) {
    EXPECT_EQ(d.selected_instance, "*");
    EXPECT_EQ(d.reason, DecisionReason::RoundRobin);
  }
  std::map<std::string, int> hops;
  for (const auto& t : r.report.transactions) ++hops[t.hops.at(0).dc_id];
  EXPECT_LE(std::abs(hops["berlin"] - hops["paris"]), 2);  // one per device at most
}

TEST(Algorithms, IndependentAdaptiveAgentsNeverRoute) {
  RunOptions o;
  o.algorithm = Algorithm::ALG4;
  o.cooperation = Cooperation::Independent;
  const auto r = run(ot::eval_scenario(traces()), o);
  EXPECT_TRUE(r.report.decisions.empty());
}

TEST(Algorithms, NamesParse) {
  EXPECT_EQ(parse_algorithm("ALG3"), Algorithm::ALG3);
  EXPECT_FALSE(parse_algorithm("ALG6").has_value());
  EXPECT_EQ(parse_cooperation("central"), Cooperation::Central);
  EXPECT_FALSE(parse_cooperation("anarchic").has_value());
}
