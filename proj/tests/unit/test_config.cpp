#include <doctest.h>

#include <algorithm>

#include "sipovl/scenario.hpp"

using namespace sipovl;

TEST_CASE("defaults") {
  const ScenarioConfig c;
  CHECK(c.downstream_capacity_cps == 700);
  CHECK(c.upstream_capacity_cps == 2800);
  CHECK(c.q_max == 1000);
  CHECK(c.t1_ms == 500);
  CHECK(c.z_th_ms == 200);
  CHECK(c.alpha == 3);
  CHECK(c.history_k == 30);
  CHECK(c.cpu_threshold == doctest::Approx(0.9));
  CHECK(c.cpu_window_ms == 1000);
  CHECK(c.warmup_s == 20);
  CHECK(c.window_s == 60);
  CHECK(c.sweep_cps == std::vector<double>{100, 300, 500, 700, 900, 1100, 1300, 1500, 1700});
  CHECK(validate(c).empty());
}

TEST_CASE("parse keys, comments and whitespace") {
  const auto c = parse_config_text(
      "# scenario\n"
      "seed = 7\n"
      "  offered_rate_cps=900   # trailing comment\n"
      "\n"
      "sweep_cps = 100, 700,1300\n"
      "control_enabled = on\n"
      "comparator = momentary\n"
      "link_delay_ms_p1_p2 = 2.5\n"
      "link_loss_p2_uas = 0.01\n"
      "arrival_process = deterministic\n"
      "hold_time_distribution = constant\n"
      "tau = 0.5\n"
      "mu = 1.2\n");
  CHECK(c.seed == 7);
  CHECK(c.offered_rate_cps == 900);
  CHECK(c.sweep_cps == std::vector<double>{100, 700, 1300});
  CHECK(c.control_enabled);
  CHECK(c.comparator == OverloadPredicate::kMeanAboveAlphaTimesLatest);
  CHECK(c.p1_p2.delay_ms == 2.5);
  CHECK(c.p2_uas.loss == doctest::Approx(0.01));
  CHECK(c.arrival_process == ArrivalProcess::kDeterministic);
  CHECK(c.hold_time_distribution == HoldDistribution::kConstant);
  REQUIRE(c.tau.has_value());
  CHECK(*c.mu == doctest::Approx(1.2));
}

TEST_CASE("format_config round-trips") {
  ScenarioConfig c;
  c.seed = 99;
  c.q_max = 12345;
  c.control_enabled = true;
  c.cpu_threshold = 0.95;
  c.uac_p1.delay_ms = 1;
  c.mu = 1.2;
  const auto back = parse_config_text(format_config(c));
  CHECK(format_config(back) == format_config(c));
  CHECK(back.q_max == 12345);
  CHECK(back.uac_p1.delay_ms == 1);
}

TEST_CASE("parse errors name the line") {
  auto message = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("seed = 1\nbogus_key = 3\n").find("line 2") != std::string::npos);
  CHECK(message("seed = 1\nbogus_key = 3\n").find("bogus_key") != std::string::npos);
  CHECK(message("q_max = lots\n").find("line 1") != std::string::npos);
  CHECK(message("seed 1\n").find("line 1") != std::string::npos);
  CHECK(message("seed = 1\nseed = 2\n").find("duplicate") != std::string::npos);
  CHECK(message("control_enabled = maybe\n") != "no error");
  CHECK(message("comparator = whatever\n") != "no error");
  CHECK(message("q_max = 1.5\n") != "no error");
}

TEST_CASE("validation lists every violation") {
  ScenarioConfig c;
  c.offered_rate_cps = -5;
  c.downstream_capacity_cps = 0;
  c.duration_s = 10;
  c.cpu_threshold = 1.5;
  c.p1_p2.loss = 2;
  const auto v = validate(c);
  CHECK(v.size() == 5);
  auto mentions = [&](const std::string& key) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(key) != std::string::npos; });
  };
  CHECK(mentions("offered_rate_cps"));
  CHECK(mentions("downstream_capacity_cps"));
  CHECK(mentions("duration_s"));
  CHECK(mentions("cpu_threshold"));
  CHECK(mentions("link_loss_p1_p2"));
  CHECK_THROWS_AS(build_scenario(c), ConfigValidationError);
}

TEST_CASE("derived seeds depend on base seed and rate only") {
  CHECK(derive_seed(1, 500) == derive_seed(1, 500));
  CHECK(derive_seed(1, 500) != derive_seed(2, 500));
  CHECK(derive_seed(1, 500) != derive_seed(1, 700));
  ScenarioConfig base;
  base.seed = 5;
  const auto c = config_for_rate(base, 300);
  CHECK(c.offered_rate_cps == 300);
  CHECK(c.seed == derive_seed(5, 300));
}
