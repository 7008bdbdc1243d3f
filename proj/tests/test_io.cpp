#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ert/generators.hpp"
#include "ert/survival.hpp"
#include "fuzz_streams.hpp"
#include "ert/io.hpp"

using namespace ert;
using ert::io::json;

TEST_CASE("strict objects reject unknown and mistyped fields") {
  const json j = json::parse(R"({"a": 1, "b": "x", "c": 2.5})");
  {
    io::StrictObject o(j, "line 4: ", true);
    CHECK(o.integer("a") == 1);
    CHECK(o.text("b") == "x");
    CHECK_THROWS_AS(o.finish(), DataError);
  }
  {
    io::StrictObject o(j, "cfg: ", false);
    CHECK_THROWS_AS(o.integer("c"), ConfigError);
    CHECK_THROWS_AS(o.number("b"), ConfigError);
    CHECK_THROWS_AS(o.number("zz"), ConfigError);
    CHECK_FALSE(o.opt_number("zz").has_value());
  }
  try {
    io::StrictObject o(j, "line 4: ", true);
    o.integer("a");
    o.text("b");
    o.number("c");
    o.finish();
  } catch (...) {
    FAIL("all fields were read");
  }
  CHECK_THROWS_AS(io::StrictObject(json::array(), "x: ", true), DataError);
}

TEST_CASE("double bit encoding round-trips exactly") {
  for (double v : {0.0, -0.0, 1.0 / 3.0, -2.5e-300, 1e300, std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::denorm_min()}) {
    const auto s = io::double_bits(v);
    CHECK(s.size() == 16);
    const double back = io::double_from_bits(s);
    CHECK(std::signbit(back) == std::signbit(v));
    CHECK(back == v);
  }
  CHECK(io::double_bits(1.0) == "3ff0000000000000");
  CHECK_THROWS_AS(io::double_from_bits("3ff0"), DataError);
  CHECK_THROWS_AS(io::double_from_bits("3ff000000000000g"), DataError);
}

TEST_CASE("fnv1a reference vectors") {
  CHECK(io::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(io::fnv1a_hex("foobar") == "85944171f73967e8");
}


TEST_CASE("checkpoint and resume is bit-identical to an uninterrupted run") {
  for (Variant v : {Variant::Binary, Variant::Deaths, Variant::Continuous, Variant::Survival, Variant::Multistate}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      io::MonitorSettings s;
      const auto events = fuzz_stream(v, 240, seed, s);
      auto whole = io::make_monitor(s);
      for (std::size_t k = 0; k < events.size(); ++k) whole->feed(events[k], static_cast<std::int64_t>(k + 1));

      for (std::size_t cut : {std::size_t{0}, std::size_t{1}, events.size() / 3, events.size() - 1, events.size()}) {
        auto first = io::make_monitor(s);
        for (std::size_t k = 0; k < cut; ++k) first->feed(events[k], static_cast<std::int64_t>(k + 1));
        const auto text = io::make_checkpoint(*first).dump();
        auto resumed = io::restore_monitor(s, json::parse(text));
        CHECK(resumed->events_processed() == static_cast<std::int64_t>(cut));
        for (std::size_t k = cut; k < events.size(); ++k) resumed->feed(events[k], static_cast<std::int64_t>(k + 1));
        CAPTURE(variant_name(v));
        CAPTURE(cut);
        CHECK(io::double_bits(resumed->ledger().log_wealth()) == io::double_bits(whole->ledger().log_wealth()));
        CHECK(resumed->ledger().crossed_at() == whole->ledger().crossed_at());
        CHECK(resumed->state() == whole->state());
      }
    }
  }
}

TEST_CASE("replaying a prefix never changes earlier wealth") {
  io::MonitorSettings s;
  const auto events = fuzz_stream(Variant::Binary, 300, 9, s);
  auto a = io::make_monitor(s);
  std::vector<double> path;
  for (std::size_t k = 0; k < events.size(); ++k) path.push_back(a->feed(events[k], 1).log_wealth);
  auto b = io::make_monitor(s);
  for (std::size_t k = 0; k < 150; ++k) CHECK(b->feed(events[k], 1).log_wealth == path[k]);
}

TEST_CASE("checkpoints are bound to their settings") {
  io::MonitorSettings s;
  s.variant = Variant::Binary;
  auto m = io::make_monitor(s);
  m->feed(json{{"arm", 1}, {"outcome", 1}}, 1);
  const auto cp = io::make_checkpoint(*m);

  auto other = s;
  other.strategy = BettingStrategy::fixed(0.1);
  CHECK(other.config_hash() != s.config_hash());
  CHECK_THROWS_AS(io::restore_monitor(other, cp), ConfigError);
  other = s;
  other.alpha = 0.05 + 1e-15;
  CHECK_THROWS_AS(io::restore_monitor(other, cp), ConfigError);
  other = s;
  other.variant = Variant::Deaths;
  CHECK_THROWS_AS(io::restore_monitor(other, cp), ConfigError);

  auto bad = cp;
  bad["events_processed"] = 2;
  CHECK_THROWS_AS(io::restore_monitor(s, bad), DataError);
  bad = cp;
  bad["state"]["n_trt"] = 5;
  CHECK_THROWS_AS(io::restore_monitor(s, bad), DataError);
  bad = cp;
  bad["extra"] = true;
  CHECK_THROWS_AS(io::restore_monitor(s, bad), DataError);
  bad = cp;
  bad["schema_version"] = 2;
  CHECK_THROWS_AS(io::restore_monitor(s, bad), DataError);
}

TEST_CASE("event records are validated with line numbers") {
  io::MonitorSettings s;
  s.variant = Variant::Binary;
  auto m = io::make_monitor(s);
  auto message = [&](const json& rec) -> std::string {
    try {
      m->feed(rec, 3);
    } catch (const DataError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message(json{{"arm", 1}, {"outcome", 1}, {"site", "A"}}).rfind("line 3: ", 0) == 0);
  CHECK(message(json{{"arm", 2}, {"outcome", 1}}).rfind("line 3: ", 0) == 0);
  CHECK(message(json{{"arm", 1}}).rfind("line 3: ", 0) == 0);
  CHECK(message(json{{"arm", 1}, {"outcome", 0.5}}).rfind("line 3: ", 0) == 0);
  CHECK(m->events_processed() == 0);
  CHECK_THROWS_WITH_AS(io::parse_event_line("{arm: 1", 7), "line 7: malformed JSON", DataError);

  s.variant = Variant::Survival;
  s.n_trt = 2;
  s.n_ctrl = 2;
  auto sv = io::make_monitor(s);
  sv->feed(json{{"time", 5.0}, {"status", 1}, {"arm", 0}}, 1);
  CHECK_THROWS_AS(sv->feed(json{{"time", 4.0}, {"status", 1}, {"arm", 0}}, 2), DataError);
  CHECK_THROWS_AS(sv->feed(json{{"time", 7.0}, {"status", 1}, {"arm", 0}, {"entry_time", 9.0}}, 2), DataError);
  sv->feed(json{{"time", 9.0}, {"status", 0}, {"arm", 1}, {"entry_time", 2.0}}, 2);
  CHECK(sv->events_processed() == 2);

  s = {};
  s.variant = Variant::Multistate;
  auto ms = io::make_monitor(s);
  CHECK_THROWS_AS(ms->feed(json{{"from", "home"}, {"to", "icu"}, {"arm", 0}}, 1), DataError);
  CHECK_THROWS_AS(ms->feed(json{{"from", "icu"}, {"to", "moon"}, {"arm", 0}}, 1), DataError);
  CHECK_THROWS_AS(ms->feed(json{{"from", "icu"}, {"to", "ward"}, {"arm", 0}, {"day", -1}}, 1), DataError);
  ms->feed(json{{"from", 2}, {"to", 1}, {"arm", 1}, {"day", 3}}, 1);
  CHECK(ms->events_processed() == 1);
}

TEST_CASE("settings validation") {
  io::MonitorSettings s;
  s.variant = Variant::Survival;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.n_trt = 3;
  CHECK_NOTHROW(s.validate());
  s.alpha = 1.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.strategy = BettingStrategy::doubly_adaptive();
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.allocation = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("scenario files") {
  auto s = io::scenario_from_json(json::parse(R"({
    "name": "binary alt", "variant": "binary", "n_sims": 10, "seed": 4,
    "design": {"p_ctrl": 0.4, "p_trt": 0.35, "power": 0.8},
    "params": {"p_ctrl": 0.4, "p_trt": 0.35}
  })"));
  CHECK(std::get<BinaryScenario>(s.params).n_patients == 2942);
  CHECK(s.seed == 4);
  CHECK_FALSE(s.ramp.has_value());

  s = io::scenario_from_json(json::parse(R"({
    "variant": "deaths", "burn_in": 20,
    "design": {"p_ctrl": 0.4, "p_trt": 0.35, "inflation": 2.5},
    "params": {"p_ctrl": 0.4, "p_trt": 0.35}
  })"));
  const auto& d = std::get<DeathsScenario>(s.params);
  CHECK(d.coin == doctest::Approx(0.35 / 0.75));
  CHECK(d.n_deaths == 2759);
  CHECK(s.ramp->burn_in == 20);
  CHECK(s.ramp->ramp == 50);

  s = io::scenario_from_json(json::parse(R"({"variant": "survival", "design": {"hr": 0.8}, "params": {"hr": 0.8}})"));
  CHECK(std::get<SurvivalScenario>(s.params).n_patients == 631);

  s = io::scenario_from_json(json::parse(R"({"variant": "multistate", "strategy": "full-kelly",
    "params": {"n_patients": 30, "start": "ward", "ctrl": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}})"));
  CHECK(std::get<MultistateScenario>(s.params).start == State::Ward);
  CHECK(s.strategy->to_string() == "full-kelly");

  const auto round = io::scenario_from_json(io::scenario_to_json(s));
  CHECK(io::scenario_to_json(round) == io::scenario_to_json(s));

  CHECK_THROWS_AS(io::scenario_from_json(json::parse(R"({"variant": "binary", "params": {"p_ctrl": 0.4, "p_trt": 0.3}})")),
                  ConfigError);
  CHECK_THROWS_AS(io::scenario_from_json(json::parse(
                      R"({"variant": "binary", "params": {"p_ctrl": 0.4, "p_trt": 0.3, "n_patients": 10, "arms": 3}})")),
                  ConfigError);
  CHECK_THROWS_AS(io::scenario_from_json(json::parse(
                      R"({"variant": "binary", "typo": 1, "params": {"p_ctrl": 0.4, "p_trt": 0.3, "n_patients": 10}})")),
                  ConfigError);
  CHECK_THROWS_AS(io::scenario_from_json(json::parse(R"({"variant": "multistate",
    "params": {"n_patients": 30, "trt": [[0.5,0.5,0,0],[0,1,0,0],[0,0,1,0],[0,0.2,0,0.8]]}})")),
                  ConfigError);
}

TEST_CASE("report writers") {
  std::vector<std::vector<WealthStep>> paths(2);
  WealthLedger l(0.05);
  l.record(0.6, 1.2);
  l.record(0.6, 0.8);
  paths[0] = l.steps();
  std::ostringstream csv, svg;
  io::write_trajectories_csv(csv, paths);
  CHECK(csv.str().rfind("trial,index,lambda,multiplier,wealth\n1,1,0.6,1.2,1.2\n", 0) == 0);
  io::write_trajectories_svg(svg, paths, 0.05, "t");
  CHECK(svg.str().find("stroke-dasharray") != std::string::npos);
  CHECK(svg.str().find("</svg>") != std::string::npos);
}
