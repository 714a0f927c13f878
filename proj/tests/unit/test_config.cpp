#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "reference_pulses.hpp"
#include "xtalk/config.hpp"

using namespace xtalk;

TEST_CASE("log grid") {
  const auto g = log_grid(1e-4, 1e-1, 25);
  CHECK(g.size() == 25);
  CHECK(g.front() == 1e-4);
  CHECK(g.back() == 1e-1);
  CHECK(g[8] == doctest::Approx(1e-3));
  CHECK(log_grid(2.0, 5.0, 1) == std::vector<double>{2.0});
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("defaults") {
  const ExperimentConfig c = default_config();
  CHECK_NOTHROW(c.validate());
  CHECK(c.sweep.grid.size() == 25);
  CHECK(c.system.v12 == 21.1);
  CHECK(c.conventions.duration == 11.0);
  CHECK(c.initial_states.size() == 5);
  CHECK_FALSE(c.cz.has_value());
}

TEST_CASE("parsing with comments, grid objects and pulses") {
  const std::string text = R"({
    // line comment
    "schema": "xtalk-config/1",
    "system": { "v13": 3.0, /* block */ "v23": 4.0 },
    "sweep": { "variable": "v13_v23_pair", "grid": {"min": 1, "max": 100, "points": 3},
               "grid_v23": {"min": 1, "max": 3, "points": 3, "spacing": "linear"}, "epsilon": 0.01 },
    "initial_states": ["00", "superposition"],
    "protocols": ["double"],
    "corrections": ["phase_circuit"],
    "pulses": { "cz": { "target": "cz", "v12": 21.1,
                        "pulse": { "delta_amp": 3.5, "delta_width": 1.1, "delta_offset": -0.5 } } },
    "output": { "formats": ["json", "svg"] },
    "threads": 2
  })";
  const ExperimentConfig c = parse_config(text);
  CHECK(c.system.v13 == 3.0);
  CHECK(c.system.v12 == 21.1);
  CHECK(c.sweep.variable == SweepVariable::V13V23Pair);
  CHECK(c.sweep.grid == std::vector<double>{1.0, 10.0, 100.0});
  CHECK(c.sweep.grid_v23 == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(c.initial_states.size() == 2);
  CHECK(c.protocols == std::vector<ProtocolKind>{ProtocolKind::DoublePulse});
  CHECK(c.phase_correction);
  REQUIRE(c.cz.has_value());
  CHECK(c.cz->pulse.delta_amp == 3.5);
  CHECK(c.cz->pulse.duration == 11.0);
  CHECK(c.cz->target == GateTarget::cz());
  CHECK_FALSE(c.half_pi.has_value());
  CHECK_FALSE(c.output.csv);
  CHECK(c.output.json);
  CHECK(c.output.svg);
  CHECK(c.threads == 2);
}

TEST_CASE("rejections") {
  CHECK_THROWS_AS(parse_config(R"({"schema": "other/2"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"system": {"epsilon": 2}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"sweep": {"grid": [0.1, 0.01]}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"initial_states": ["22"]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"corrections": ["magic"]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"fit_window": [0.1]})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"threads": 0})"), std::invalid_argument);
  CHECK_THROWS(parse_config("{ not json"));
  CHECK_THROWS_AS(load_config("/nonexistent/config.jsonc"), std::runtime_error);
  OutputSpec o;
  CHECK_THROWS_AS(set_formats(o, "csv,pdf"), std::invalid_argument);
  set_formats(o, "");
  CHECK(o.csv);
}

TEST_CASE("dump and parse round trip") {
  ExperimentConfig c = default_config();
  c.system.v13 = 0.45;
  c.phase_correction = true;
  c.calibration.cz_seeds = {{1.0, 2.0, 3.0}};
  CalibrationResult cal;
  cal.pulse = reference::half_pi_pulse();
  cal.target = GateTarget::controlled_half_pi();
  cal.v12 = 21.1;
  cal.single_qubit_phase = reference::half_pi_single_qubit_phase;
  cal.converged = true;
  c.half_pi = cal;
  const ExperimentConfig d = parse_config(dump_config(c));
  CHECK(dump_config(d) == dump_config(c));
  CHECK(d.sweep.grid == c.sweep.grid);  // exact, full precision
  REQUIRE(d.half_pi.has_value());
  CHECK(d.half_pi->pulse == cal.pulse);
  CHECK(d.half_pi->target == cal.target);
  CHECK(d.calibration.cz_seeds == c.calibration.cz_seeds);

  const CalibrationResult back = calibration_from_json(calibration_to_json(cal));
  CHECK(back.pulse == cal.pulse);
  CHECK(back.single_qubit_phase == cal.single_qubit_phase);
}

TEST_CASE("shipped experiment config carries the frozen pulses") {
  const ExperimentConfig c = load_config(std::filesystem::path(XTALK_SOURCE_DIR) / "tools/experiment.jsonc");
  REQUIRE(c.cz.has_value());
  REQUIRE(c.half_pi.has_value());
  CHECK(c.cz->pulse == reference::cz_pulse());
  CHECK(c.half_pi->pulse == reference::half_pi_pulse());
  CHECK(c.sweep.grid.size() == 25);
}

TEST_CASE("save and load") {
  const auto path = std::filesystem::temp_directory_path() / "xtalk_config_test.json";
  ExperimentConfig c = default_config();
  c.threads = 3;
  save_config(c, path);
  CHECK(load_config(path).threads == 3);
  std::filesystem::remove(path);
}
