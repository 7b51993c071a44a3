// Scenario documents: JSON with a required schema version, strict unknown-key
// rejection, and defaults echoed into a provenance report.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include <json.hpp>  // flat vendored copy
#endif

#include "gridscout/sim.hpp"

namespace gridscout {

class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioLoadResult {
    ScenarioConfig config;
    std::string name;
    std::vector<std::string> applied_defaults;  // one line per defaulted field
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& path,
                                std::initializer_list<std::string_view> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (std::string_view k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ScenarioError(path + ": unknown key \"" + item.key() + "\"");
    }
}

inline const json& require_key(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioError(path + ": missing required key \"" + key + "\"");
    return *it;
}

inline double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ScenarioError(where + ": expected a number");
    return v.get<double>();
}

inline std::int64_t as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer())
        throw ScenarioError(where + ": expected an integer");
    return v.get<std::int64_t>();
}

inline std::uint64_t as_seed(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        const auto s = v.get<std::int64_t>();
        if (s >= 0) return static_cast<std::uint64_t>(s);
    }
    throw ScenarioError(where + ": expected a non-negative integer");
}

inline const json& as_object(const json& v, const std::string& where) {
    if (!v.is_object()) throw ScenarioError(where + ": expected an object");
    return v;
}

inline const json& as_array(const json& v, const std::string& where) {
    if (!v.is_array()) throw ScenarioError(where + ": expected an array");
    return v;
}

inline WorldPos as_position(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2)
        throw ScenarioError(where + ": expected [x, y] in meters");
    return {as_number(v[0], where + "[0]"), as_number(v[1], where + "[1]")};
}

inline std::string format_number(double v) {
    std::ostringstream out;
    out.precision(9);
    out << v;
    return out.str();
}

}  // namespace detail

// Parses a scenario document. Rejects unknown keys at every level; resolves
// {"target": i} waypoint sugar to that target's initial position; records
// every applied default.
inline ScenarioLoadResult parse_scenario(const std::string& text,
                                         const std::string& origin = "scenario") {
    using detail::as_array;
    using detail::as_integer;
    using detail::as_number;
    using detail::as_object;
    using detail::as_position;
    using detail::as_seed;
    using detail::reject_unknown_keys;
    using detail::require_key;
    using nlohmann::json;

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(origin + ": " + e.what());
    }
    if (!doc.is_object()) throw ScenarioError(origin + ": top level must be an object");

    ScenarioLoadResult result;
    ScenarioConfig& cfg = result.config;
    auto note_default = [&result](const std::string& field, const std::string& value,
                                  const std::string& why = "") {
        result.applied_defaults.push_back(field + " = " + value +
                                          (why.empty() ? " (default)" : " (default: " + why + ")"));
    };

    reject_unknown_keys(doc, origin,
                        {"version", "name", "grid", "sensor", "agents", "targets",
                         "assumed_targets", "duration_s", "tick_rate", "step_len", "seed",
                         "snapshot_every"});

    const std::int64_t version = as_integer(require_key(doc, origin, "version"), origin + ".version");
    if (version != 1)
        throw ScenarioError(origin + ".version: unsupported version " + std::to_string(version) +
                            " (expected 1)");

    if (auto it = doc.find("name"); it != doc.end()) {
        if (!it->is_string()) throw ScenarioError(origin + ".name: expected a string");
        result.name = it->get<std::string>();
    }

    {
        const json& g = as_object(require_key(doc, origin, "grid"), origin + ".grid");
        reject_unknown_keys(g, origin + ".grid",
                            {"width_cells", "height_cells", "cell_size", "neighbor_count"});
        cfg.grid.width_cells =
            static_cast<int>(as_integer(require_key(g, origin + ".grid", "width_cells"),
                                        origin + ".grid.width_cells"));
        cfg.grid.height_cells =
            static_cast<int>(as_integer(require_key(g, origin + ".grid", "height_cells"),
                                        origin + ".grid.height_cells"));
        if (auto it = g.find("cell_size"); it != g.end())
            cfg.grid.cell_size = as_number(*it, origin + ".grid.cell_size");
        else {
            cfg.grid.cell_size = 1.0;
            note_default("grid.cell_size", "1");
        }
        if (auto it = g.find("neighbor_count"); it != g.end())
            cfg.grid.neighbor_count =
                static_cast<int>(as_integer(*it, origin + ".grid.neighbor_count"));
        else {
            cfg.grid.neighbor_count = 8;
            note_default("grid.neighbor_count", "8");
        }
    }

    {
        json sensor = json::object();
        if (auto it = doc.find("sensor"); it != doc.end())
            sensor = as_object(*it, origin + ".sensor");
        reject_unknown_keys(sensor, origin + ".sensor",
                            {"radius", "peak_t", "peak_f", "sigma_falloff", "sigma_position",
                             "smear_radius_multiplier"});
        SensorSpec& s = cfg.sensor;
        if (auto it = sensor.find("radius"); it != sensor.end())
            s.radius = as_number(*it, origin + ".sensor.radius");
        else {
            s.radius = 100.0;
            note_default("sensor.radius", "100");
        }
        if (auto it = sensor.find("peak_t"); it != sensor.end())
            s.peak_t = as_number(*it, origin + ".sensor.peak_t");
        else {
            s.peak_t = 0.7;
            note_default("sensor.peak_t", "0.7");
        }
        if (auto it = sensor.find("peak_f"); it != sensor.end())
            s.peak_f = as_number(*it, origin + ".sensor.peak_f");
        else {
            s.peak_f = 0.3;
            note_default("sensor.peak_f", "0.3");
        }
        if (auto it = sensor.find("sigma_falloff"); it != sensor.end())
            s.sigma_falloff = as_number(*it, origin + ".sensor.sigma_falloff");
        else {
            s.sigma_falloff = s.radius;
            note_default("sensor.sigma_falloff", detail::format_number(s.radius),
                         "sensor radius");
        }
        if (auto it = sensor.find("sigma_position"); it != sensor.end())
            s.sigma_position = as_number(*it, origin + ".sensor.sigma_position");
        else {
            s.sigma_position = 5.0;
            note_default("sensor.sigma_position", "5");
        }
        if (auto it = sensor.find("smear_radius_multiplier"); it != sensor.end())
            s.smear_radius_multiplier = as_number(*it, origin + ".sensor.smear_radius_multiplier");
        else {
            s.smear_radius_multiplier = 3.0;
            note_default("sensor.smear_radius_multiplier", "3");
        }
    }

    {
        const json& targets = doc.contains("targets")
                                  ? as_array(doc["targets"], origin + ".targets")
                                  : json::array();
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const std::string path = origin + ".targets[" + std::to_string(i) + "]";
            const json& t = as_object(targets[i], path);
            reject_unknown_keys(t, path, {"pos", "velocity"});
            ScenarioConfig::TargetInit init;
            init.pos = as_position(require_key(t, path, "pos"), path + ".pos");
            if (auto it = t.find("velocity"); it != t.end()) {
                const WorldPos v = as_position(*it, path + ".velocity");
                init.velocity = {v.x, v.y};
            } else {
                note_default("targets[" + std::to_string(i) + "].velocity", "[0, 0]");
            }
            cfg.targets.push_back(init);
        }
        if (!doc.contains("targets")) note_default("targets", "[]");
    }

    {
        const json& agents = as_array(require_key(doc, origin, "agents"), origin + ".agents");
        for (std::size_t i = 0; i < agents.size(); ++i) {
            const std::string path = origin + ".agents[" + std::to_string(i) + "]";
            const json& a = as_object(agents[i], path);
            reject_unknown_keys(a, path, {"start", "speed", "waypoints"});
            ScenarioConfig::AgentInit init;
            init.start = as_position(require_key(a, path, "start"), path + ".start");
            if (auto it = a.find("speed"); it != a.end())
                init.speed = as_number(*it, path + ".speed");
            else {
                init.speed = 25.0;
                note_default("agents[" + std::to_string(i) + "].speed", "25");
            }
            if (auto it = a.find("waypoints"); it != a.end()) {
                const json& wps = as_array(*it, path + ".waypoints");
                for (std::size_t w = 0; w < wps.size(); ++w) {
                    const std::string wpath = path + ".waypoints[" + std::to_string(w) + "]";
                    const json& wp = wps[w];
                    if (wp.is_object()) {
                        // {"target": i} pins the waypoint to that target's start
                        reject_unknown_keys(wp, wpath, {"target"});
                        const std::int64_t idx =
                            as_integer(require_key(wp, wpath, "target"), wpath + ".target");
                        if (idx < 0 || idx >= static_cast<std::int64_t>(cfg.targets.size()))
                            throw ScenarioError(wpath + ".target: index " + std::to_string(idx) +
                                                " out of range (have " +
                                                std::to_string(cfg.targets.size()) + " targets)");
                        init.scripted_waypoints.push_back(
                            cfg.targets[static_cast<std::size_t>(idx)].pos);
                    } else {
                        init.scripted_waypoints.push_back(as_position(wp, wpath));
                    }
                }
            }
            cfg.agents.push_back(std::move(init));
        }
    }

    if (auto it = doc.find("assumed_targets"); it != doc.end())
        cfg.assumed_targets = as_integer(*it, origin + ".assumed_targets");
    else {
        cfg.assumed_targets = static_cast<std::int64_t>(cfg.targets.size());
        note_default("assumed_targets", std::to_string(cfg.targets.size()), "target count");
    }
    if (auto it = doc.find("duration_s"); it != doc.end())
        cfg.duration_s = as_number(*it, origin + ".duration_s");
    else {
        cfg.duration_s = 500.0;
        note_default("duration_s", "500");
    }
    if (auto it = doc.find("tick_rate"); it != doc.end())
        cfg.tick_rate = as_number(*it, origin + ".tick_rate");
    else {
        cfg.tick_rate = 5.0;
        note_default("tick_rate", "5");
    }
    if (auto it = doc.find("step_len"); it != doc.end())
        cfg.step_len = as_number(*it, origin + ".step_len");
    else {
        cfg.step_len = cfg.sensor.radius * 0.5;
        note_default("step_len", detail::format_number(cfg.step_len), "sensor radius / 2");
    }
    if (auto it = doc.find("seed"); it != doc.end())
        cfg.seed = as_seed(*it, origin + ".seed");
    else {
        cfg.seed = 0;
        note_default("seed", "0");
    }
    if (auto it = doc.find("snapshot_every"); it != doc.end())
        cfg.snapshot_every = as_integer(*it, origin + ".snapshot_every");
    else {
        cfg.snapshot_every = 25;
        note_default("snapshot_every", "25");
    }

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(origin + ": " + e.what());
    }
    return result;
}

inline ScenarioLoadResult load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.filename().string());
}

// Serializes every field explicitly, so a reload applies no defaults and
// yields an equivalent config. Waypoint sugar does not survive round-trips;
// resolved positions are written instead.
inline nlohmann::json scenario_to_json(const ScenarioConfig& cfg, const std::string& name = "") {
    nlohmann::json doc;
    doc["version"] = 1;
    if (!name.empty()) doc["name"] = name;
    doc["grid"] = {{"width_cells", cfg.grid.width_cells},
                   {"height_cells", cfg.grid.height_cells},
                   {"cell_size", cfg.grid.cell_size},
                   {"neighbor_count", cfg.grid.neighbor_count}};
    doc["sensor"] = {{"radius", cfg.sensor.radius},
                     {"peak_t", cfg.sensor.peak_t},
                     {"peak_f", cfg.sensor.peak_f},
                     {"sigma_falloff", cfg.sensor.sigma_falloff},
                     {"sigma_position", cfg.sensor.sigma_position},
                     {"smear_radius_multiplier", cfg.sensor.smear_radius_multiplier}};
    doc["agents"] = nlohmann::json::array();
    for (const auto& a : cfg.agents) {
        nlohmann::json ja;
        ja["start"] = {a.start.x, a.start.y};
        ja["speed"] = a.speed;
        if (!a.scripted_waypoints.empty()) {
            ja["waypoints"] = nlohmann::json::array();
            for (const WorldPos& wp : a.scripted_waypoints) ja["waypoints"].push_back({wp.x, wp.y});
        }
        doc["agents"].push_back(std::move(ja));
    }
    doc["targets"] = nlohmann::json::array();
    for (const auto& t : cfg.targets)
        doc["targets"].push_back({{"pos", {t.pos.x, t.pos.y}},
                                  {"velocity", {t.velocity.x, t.velocity.y}}});
    doc["assumed_targets"] = cfg.assumed_targets;
    doc["duration_s"] = cfg.duration_s;
    doc["tick_rate"] = cfg.tick_rate;
    doc["step_len"] = cfg.step_len;
    doc["seed"] = cfg.seed;
    doc["snapshot_every"] = cfg.snapshot_every;
    return doc;
}

inline void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path,
                          const std::string& name = "") {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write scenario file: " + path.string());
    out << scenario_to_json(cfg, name).dump(2) << '\n';
}

}  // namespace gridscout
