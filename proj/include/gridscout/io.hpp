// Run outputs: trajectory CSV and the flat key-value metrics document.
// All floats go through format_g9 so outputs diff cleanly across platforms;
// non-finite values are rejected rather than serialized.
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gridscout/sim.hpp"

namespace gridscout {

inline std::string format_g9(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("refusing to serialize a non-finite value");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline constexpr const char* kTrajectoryHeader =
    "tick,time_s,agent_id,x_m,y_m,wp_x_m,wp_y_m,argmin_x_m,argmin_y_m,f_min_nats,detections";

inline void write_trajectory_csv(const TrajectoryLog& log, std::ostream& out) {
    out << kTrajectoryHeader << '\n';
    for (const TickRecord& r : log.records) {
        out << r.tick << ',' << format_g9(r.time_s) << ',' << r.agent_id << ','
            << format_g9(r.pos.x) << ',' << format_g9(r.pos.y) << ','
            << format_g9(r.waypoint.x) << ',' << format_g9(r.waypoint.y) << ','
            << format_g9(r.argmin_pos.x) << ',' << format_g9(r.argmin_pos.y) << ','
            << format_g9(r.f_min) << ',' << r.detections << '\n';
    }
}

inline void write_trajectory_csv(const TrajectoryLog& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trajectory file: " + path.string());
    write_trajectory_csv(log, out);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string metrics_to_string(const MetricsSummary& m) {
    std::string s;
    auto line = [&s, &m](const char* key, const std::string& value) {
        s += key;
        s += '=';
        s += m.has_data ? value : "no_data";
        s += '\n';
    };
    line("coverage_fraction", m.has_data ? format_g9(m.coverage_fraction) : "");
    line("max_staleness_s", m.has_data ? format_g9(m.max_staleness_s) : "");
    line("mean_staleness_s", m.has_data ? format_g9(m.mean_staleness_s) : "");
    s += "track_error_m=";
    s += (m.has_data && m.has_track_error) ? format_g9(m.track_error_m) : "no_data";
    s += '\n';
    line("mean_step_ms", m.has_data ? format_g9(m.mean_step_ms) : "");
    line("detections", m.has_data ? std::to_string(m.detections) : "");
    return s;
}

inline void write_metrics(const MetricsSummary& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write metrics file: " + path.string());
    out << metrics_to_string(m);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace gridscout
