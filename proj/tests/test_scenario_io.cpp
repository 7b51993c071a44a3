#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "gridscout/io.hpp"
#include "gridscout/scenario.hpp"
#include "gridscout/snapshot.hpp"

using namespace gridscout;
using Catch::Matchers::ContainsSubstring;

namespace {

const char* kMinimal = R"({
  "version": 1,
  "grid": {"width_cells": 12, "height_cells": 8},
  "agents": [{"start": [3.0, 4.0]}]
})";

}  // namespace

TEST_CASE("minimal scenario fills every documented default") {
    const ScenarioLoadResult r = parse_scenario(kMinimal);
    const ScenarioConfig& cfg = r.config;
    REQUIRE(cfg.grid.cell_size == 1.0);
    REQUIRE(cfg.grid.neighbor_count == 8);
    REQUIRE(cfg.sensor.radius == 100.0);
    REQUIRE(cfg.sensor.peak_t == 0.7);
    REQUIRE(cfg.sensor.peak_f == 0.3);
    REQUIRE(cfg.sensor.sigma_falloff == 100.0);
    REQUIRE(cfg.sensor.sigma_position == 5.0);
    REQUIRE(cfg.sensor.smear_radius_multiplier == 3.0);
    REQUIRE(cfg.agents.size() == 1);
    REQUIRE(cfg.agents[0].speed == 25.0);
    REQUIRE(cfg.targets.empty());
    REQUIRE(cfg.assumed_targets == 0);
    REQUIRE(cfg.duration_s == 500.0);
    REQUIRE(cfg.tick_rate == 5.0);
    REQUIRE(cfg.step_len == 50.0);  // half the sensor radius
    REQUIRE(cfg.seed == 0);
    REQUIRE(cfg.snapshot_every == 25);

    // provenance lists each applied default once
    REQUIRE(r.applied_defaults.size() == 16);
    bool saw_step_len = false;
    for (const std::string& line : r.applied_defaults)
        if (line.find("step_len") != std::string::npos) {
            saw_step_len = true;
            REQUIRE_THAT(line, ContainsSubstring("50"));
            REQUIRE_THAT(line, ContainsSubstring("default"));
        }
    REQUIRE(saw_step_len);
}

TEST_CASE("explicit fields leave no provenance entries") {
    const char* full = R"({
      "version": 1, "name": "full",
      "grid": {"width_cells": 12, "height_cells": 8, "cell_size": 2.0, "neighbor_count": 8},
      "sensor": {"radius": 40, "peak_t": 0.6, "peak_f": 0.2, "sigma_falloff": 30,
                 "sigma_position": 2, "smear_radius_multiplier": 3},
      "agents": [{"start": [3.0, 4.0], "speed": 10, "waypoints": [[5, 5]]}],
      "targets": [{"pos": [10, 10], "velocity": [1, 0]}],
      "assumed_targets": 2, "duration_s": 20, "tick_rate": 4, "step_len": 20,
      "seed": 9, "snapshot_every": 10
    })";
    const ScenarioLoadResult r = parse_scenario(full);
    REQUIRE(r.applied_defaults.empty());
    REQUIRE(r.name == "full");
    REQUIRE(r.config.tick_rate == 4.0);
    REQUIRE(r.config.targets[0].velocity.x == 1.0);
}

TEST_CASE("dependent defaults follow the resolved radius") {
    const char* text = R"({
      "version": 1,
      "grid": {"width_cells": 12, "height_cells": 8},
      "sensor": {"radius": 30},
      "agents": [{"start": [3.0, 4.0]}]
    })";
    const ScenarioConfig cfg = parse_scenario(text).config;
    REQUIRE(cfg.sensor.sigma_falloff == 30.0);
    REQUIRE(cfg.step_len == 15.0);
}

TEST_CASE("unknown keys are rejected at every level") {
    auto rejects = [](const std::string& text, const char* needle) {
        try {
            parse_scenario(text);
            FAIL("expected ScenarioError");
        } catch (const ScenarioError& e) {
            REQUIRE_THAT(e.what(), ContainsSubstring(needle));
        }
    };
    rejects(R"({"version":1,"grid":{"width_cells":4,"height_cells":4},"agents":[{"start":[1,1]}],"bogus":1})",
            "bogus");
    rejects(R"({"version":1,"grid":{"width_cells":4,"height_cells":4,"cells":9},"agents":[{"start":[1,1]}]})",
            "cells");
    rejects(R"({"version":1,"grid":{"width_cells":4,"height_cells":4},"sensor":{"range":5},"agents":[{"start":[1,1]}]})",
            "range");
    rejects(R"({"version":1,"grid":{"width_cells":4,"height_cells":4},"agents":[{"start":[1,1],"vel":2}]})",
            "vel");
    rejects(R"({"version":1,"grid":{"width_cells":4,"height_cells":4},"agents":[{"start":[1,1]}],"targets":[{"pos":[1,1],"speed":1}]})",
            "speed");
}

TEST_CASE("version key is required and checked") {
    REQUIRE_THROWS_AS(parse_scenario(R"({"grid":{"width_cells":4,"height_cells":4},"agents":[{"start":[1,1]}]})"),
                      ScenarioError);
    REQUIRE_THROWS_AS(parse_scenario(R"({"version":2,"grid":{"width_cells":4,"height_cells":4},"agents":[{"start":[1,1]}]})"),
                      ScenarioError);
}

TEST_CASE("malformed documents carry diagnostics") {
    try {
        parse_scenario("{not json", "broken.json");
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        REQUIRE_THAT(e.what(), ContainsSubstring("broken.json"));
    }
    try {
        parse_scenario(R"({"version":1,"grid":{"width_cells":"wide","height_cells":4},"agents":[{"start":[1,1]}]})");
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        REQUIRE_THAT(e.what(), ContainsSubstring("width_cells"));
    }
    try {
        parse_scenario(R"({"version":1,"grid":{"width_cells":4,"height_cells":4},"sensor":{"peak_t":1.5},"agents":[{"start":[1,1]}]})");
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        REQUIRE_THAT(e.what(), ContainsSubstring("peak_t"));
    }
}

TEST_CASE("waypoint sugar resolves target indices at load time") {
    const char* text = R"({
      "version": 1,
      "grid": {"width_cells": 40, "height_cells": 40},
      "agents": [{"start": [3.0, 4.0], "waypoints": [{"target": 1}, [7, 7], {"target": 0}]}],
      "targets": [{"pos": [10, 10]}, {"pos": [20, 30], "velocity": [0, -1]}]
    })";
    const ScenarioConfig cfg = parse_scenario(text).config;
    REQUIRE(cfg.agents[0].scripted_waypoints.size() == 3);
    REQUIRE(cfg.agents[0].scripted_waypoints[0].x == 20.0);
    REQUIRE(cfg.agents[0].scripted_waypoints[0].y == 30.0);
    REQUIRE(cfg.agents[0].scripted_waypoints[1].x == 7.0);
    REQUIRE(cfg.agents[0].scripted_waypoints[2].x == 10.0);

    const char* bad = R"({
      "version": 1,
      "grid": {"width_cells": 40, "height_cells": 40},
      "agents": [{"start": [3.0, 4.0], "waypoints": [{"target": 5}]}],
      "targets": [{"pos": [10, 10]}]
    })";
    REQUIRE_THROWS_AS(parse_scenario(bad), ScenarioError);
}

TEST_CASE("save and reload round-trips the config") {
    ScenarioConfig cfg = parse_scenario(kMinimal).config;
    cfg.seed = 77;
    cfg.targets.push_back({{5.0, 5.0}, {0.5, -0.25}});
    cfg.agents[0].scripted_waypoints = {{2.0, 2.0}};

    const std::string text = scenario_to_json(cfg, "roundtrip").dump();
    const ScenarioLoadResult back = parse_scenario(text);
    REQUIRE(back.applied_defaults.empty());
    REQUIRE(back.name == "roundtrip");
    REQUIRE(back.config.grid.width_cells == cfg.grid.width_cells);
    REQUIRE(back.config.sensor.radius == cfg.sensor.radius);
    REQUIRE(back.config.seed == 77);
    REQUIRE(back.config.targets[0].velocity.y == -0.25);
    REQUIRE(back.config.agents[0].scripted_waypoints[0].x == 2.0);
    REQUIRE(back.config.duration_s == cfg.duration_s);
}

TEST_CASE("trajectory csv uses the exact header and 9 significant digits") {
    TrajectoryLog log;
    log.records.push_back({1, 0.2, 0, {1.0 / 3.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}, 0.1234567891, 2});
    std::ostringstream out;
    write_trajectory_csv(log, out);
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    REQUIRE(header == "tick,time_s,agent_id,x_m,y_m,wp_x_m,wp_y_m,argmin_x_m,argmin_y_m,f_min_nats,detections");
    REQUIRE(row == "1,0.2,0,0.333333333,2,3,4,5,6,0.123456789,2");
}

TEST_CASE("serialization rejects non-finite values") {
    REQUIRE_THROWS_AS(format_g9(std::nan("")), std::invalid_argument);
    REQUIRE_THROWS_AS(format_g9(INFINITY), std::invalid_argument);
    REQUIRE(format_g9(0.7) == "0.7");
    REQUIRE(format_g9(1.0 / 131070.0) == "7.62951095e-06");
}

TEST_CASE("metrics document is flat key-value with no_data markers") {
    MetricsSummary m;
    m.has_data = true;
    m.coverage_fraction = 0.0317;
    m.max_staleness_s = 120.0;
    m.mean_staleness_s = 60.5;
    m.has_track_error = false;
    m.mean_step_ms = 3.25;
    m.detections = 11;
    const std::string doc = metrics_to_string(m);
    REQUIRE_THAT(doc, ContainsSubstring("coverage_fraction=0.0317\n"));
    REQUIRE_THAT(doc, ContainsSubstring("track_error_m=no_data\n"));
    REQUIRE_THAT(doc, ContainsSubstring("detections=11\n"));

    const std::string empty = metrics_to_string(MetricsSummary{});
    REQUIRE_THAT(empty, ContainsSubstring("coverage_fraction=no_data"));
    REQUIRE_THAT(empty, ContainsSubstring("mean_step_ms=no_data"));
}

TEST_CASE("dense snapshots round-trip through csv") {
    GridSpec spec{5, 4, 1.0, 8};
    EvidenceGrid g = EvidenceGrid::vacuous(spec);
    RngStream rng(51);
    for (double& v : g.m_t.values()) v = rng.next_unit();
    g.tick = 25;

    const SnapshotData snap = snapshot_of(g, SnapshotLayer::evidence_t);
    std::ostringstream out;
    write_snapshot_csv(snap, out);
    std::istringstream in(out.str());
    const SnapshotData back = read_snapshot_csv(in, "mem");
    REQUIRE(back.layer == SnapshotLayer::evidence_t);
    REQUIRE(back.tick == 25);
    REQUIRE(back.width_cells == 5);
    REQUIRE(back.height_cells == 4);
    for (std::size_t i = 0; i < snap.values.size(); ++i)
        REQUIRE_THAT(back.values[i], Catch::Matchers::WithinRel(snap.values[i], 1e-8));
}

TEST_CASE("sparse free-energy snapshots round-trip through csv") {
    FreeEnergyField f;
    f.footprint = {{1, 1}, {2, 1}, {1, 2}};
    f.f_nats = {0.8858919375817028, 0.6931471805599453, 1.25};
    f.argmin_index = 1;
    f.argmin_cell = {2, 1};
    f.tick = 50;

    const SnapshotData snap = snapshot_of(f, GridSpec{5, 5, 1.0, 8});
    std::ostringstream out;
    write_snapshot_csv(snap, out);
    REQUIRE_THAT(out.str(), ContainsSubstring("# layer=free_energy tick=50 width=5 height=5"));
    REQUIRE_THAT(out.str(), ContainsSubstring("cell_x,cell_y,f_nats"));

    std::istringstream in(out.str());
    const SnapshotData back = read_snapshot_csv(in, "mem");
    REQUIRE(back.cells.size() == 3);
    REQUIRE(back.cells[1] == CellIndex{2, 1});
    REQUIRE_THAT(back.f_nats[0], Catch::Matchers::WithinRel(0.8858919375817028, 1e-8));
}

TEST_CASE("pgm rendering quantizes within half a step") {
    GridSpec spec{16, 3, 1.0, 8};
    EvidenceGrid g = EvidenceGrid::vacuous(spec);
    RngStream rng(52);
    for (double& v : g.m_t.values()) v = rng.next_unit();
    g.m_t(0, 0) = 0.7;  // known quantization anchor
    g.m_t(1, 0) = 0.0;
    g.m_t(2, 0) = 1.0;

    const SnapshotData snap = snapshot_of(g, SnapshotLayer::evidence_t);
    std::ostringstream out;
    write_snapshot_pgm(snap, out);

    std::istringstream in(out.str());
    std::string magic, comment;
    std::getline(in, magic);
    std::getline(in, comment);
    REQUIRE(magic == "P2");
    int w = 0, h = 0, maxval = 0;
    in >> w >> h >> maxval;
    REQUIRE(w == 16);
    REQUIRE(h == 3);
    REQUIRE(maxval == 65535);

    std::vector<long> pixels;
    long p = 0;
    while (in >> p) pixels.push_back(p);
    REQUIRE(pixels.size() == snap.values.size());
    REQUIRE(pixels[0] == 45875);  // round(0.7 * 65535)
    REQUIRE(pixels[1] == 0);
    REQUIRE(pixels[2] == 65535);
    for (std::size_t i = 0; i < pixels.size(); ++i)
        REQUIRE(std::abs(snap.values[i] - static_cast<double>(pixels[i]) / 65535.0) <=
                1.0 / 131070.0);
}

TEST_CASE("free-energy pgm scales min-max over the footprint") {
    FreeEnergyField f;
    f.footprint = {{0, 0}, {1, 0}, {2, 0}};
    f.f_nats = {2.0, 3.0, 4.0};
    f.argmin_index = 0;
    f.argmin_cell = {0, 0};
    const SnapshotData snap = snapshot_of(f, GridSpec{3, 2, 1.0, 8});
    std::ostringstream out;
    write_snapshot_pgm(snap, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    int w, h, maxval;
    in >> w >> h >> maxval;
    std::vector<long> pixels;
    long p;
    while (in >> p) pixels.push_back(p);
    REQUIRE(pixels == std::vector<long>{0, 32768, 65535, 0, 0, 0});

    // a constant field renders as zero rather than dividing by zero
    FreeEnergyField flat;
    flat.footprint = {{0, 0}, {1, 0}};
    flat.f_nats = {1.5, 1.5};
    flat.argmin_index = 0;
    flat.argmin_cell = {0, 0};
    std::ostringstream out2;
    write_snapshot_pgm(snapshot_of(flat, GridSpec{3, 2, 1.0, 8}), out2);
    REQUIRE_THAT(out2.str(), ContainsSubstring("\n65535\n0 0 0\n0 0 0\n"));
}

TEST_CASE("snapshot writers refuse non-finite payloads") {
    GridSpec spec{3, 3, 1.0, 8};
    EvidenceGrid g = EvidenceGrid::vacuous(spec);
    g.m_t(1, 1) = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream out;
    REQUIRE_THROWS_AS(write_snapshot_csv(snapshot_of(g, SnapshotLayer::evidence_t), out),
                      SnapshotError);
}

TEST_CASE("snapshot reader rejects malformed files") {
    auto fails = [](const char* text) {
        std::istringstream in(text);
        REQUIRE_THROWS_AS(read_snapshot_csv(in, "mem"), SnapshotError);
    };
    fails("");
    fails("no metadata\n0.5\n");
    fails("# layer=evidence_T tick=1 width=2 height=2\n0.5,0.5\n");          // missing row
    fails("# layer=evidence_T tick=1 width=2 height=2\n0.5,0.5,0.5\n0,0\n");  // extra column
    fails("# layer=mystery tick=1 width=2 height=2\n0.5,0.5\n0.5,0.5\n");
    fails("# layer=free_energy tick=1 width=2 height=2\nwrong,header,row\n");
}
