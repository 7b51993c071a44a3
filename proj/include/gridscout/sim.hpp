// Discrete-time scenario engine. One shared evidence map and posterior grid;
// per tick: targets move, agents move, sense, diffuse+fuse, Bayes update,
// then free-energy waypoint selection.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridscout/bayes.hpp"
#include "gridscout/evidence.hpp"
#include "gridscout/free_energy.hpp"
#include "gridscout/grid.hpp"
#include "gridscout/rng.hpp"
#include "gridscout/sensor.hpp"

namespace gridscout {

struct TargetState {
    int id = 0;
    WorldPos pos;
    Vec2 velocity;       // zero for stationary targets
    bool active = true;  // cleared once the target exits the map
};

struct AgentState {
    int id = 0;
    WorldPos pos;
    double speed = 25.0;  // m/s
    Waypoint current_waypoint;
    bool waypoint_from_script = false;
    bool waypoint_reached = false;
    std::vector<WorldPos> scripted_waypoints;
    std::size_t next_scripted = 0;
};

struct ScenarioConfig {
    struct AgentInit {
        WorldPos start;
        double speed = 25.0;
        std::vector<WorldPos> scripted_waypoints;
    };
    struct TargetInit {
        WorldPos pos;
        Vec2 velocity;
    };

    GridSpec grid;
    SensorSpec sensor;
    std::vector<AgentInit> agents;
    std::vector<TargetInit> targets;
    std::int64_t assumed_targets = 0;
    double duration_s = 500.0;
    double tick_rate = 5.0;  // ticks per second
    double step_len = 50.0;  // waypoint step, meters
    std::uint64_t seed = 0;
    std::int64_t snapshot_every = 25;  // ticks; 0 disables snapshots

    double dt() const { return 1.0 / tick_rate; }
    std::int64_t total_ticks() const {
        return static_cast<std::int64_t>(std::llround(duration_s * tick_rate));
    }

    void validate() const {
        grid.validate();
        sensor.validate();
        if (!(duration_s > 0.0)) throw std::invalid_argument("scenario: duration_s must be > 0");
        if (!(tick_rate > 0.0)) throw std::invalid_argument("scenario: tick_rate must be > 0");
        if (total_ticks() < 1) throw std::invalid_argument("scenario: run must cover at least one tick");
        if (!(step_len > 0.0)) throw std::invalid_argument("scenario: step_len must be > 0");
        if (assumed_targets < 0)
            throw std::invalid_argument("scenario: assumed_targets must be >= 0");
        if (snapshot_every < 0)
            throw std::invalid_argument("scenario: snapshot_every must be >= 0");
        if (agents.empty()) throw std::invalid_argument("scenario: at least one agent required");
        for (std::size_t i = 0; i < agents.size(); ++i) {
            if (!grid.contains(agents[i].start))
                throw std::invalid_argument("scenario: agent " + std::to_string(i) +
                                            " starts outside the map");
            if (!(agents[i].speed > 0.0))
                throw std::invalid_argument("scenario: agent " + std::to_string(i) +
                                            " speed must be > 0");
            for (const WorldPos& wp : agents[i].scripted_waypoints)
                if (!grid.contains(wp))
                    throw std::invalid_argument("scenario: agent " + std::to_string(i) +
                                                " has a scripted waypoint outside the map");
        }
        for (std::size_t i = 0; i < targets.size(); ++i)
            if (!grid.contains(targets[i].pos))
                throw std::invalid_argument("scenario: target " + std::to_string(i) +
                                            " starts outside the map");
    }
};

struct TickRecord {
    std::int64_t tick = 0;
    double time_s = 0.0;
    int agent_id = 0;
    WorldPos pos;
    WorldPos waypoint;
    WorldPos argmin_pos;
    double f_min = 0.0;
    int detections = 0;
};

struct TrajectoryLog {
    std::vector<TickRecord> records;  // tick-major, then agent id
};

struct MetricsSummary {
    bool has_data = false;
    double coverage_fraction = 0.0;
    double max_staleness_s = 0.0;
    double mean_staleness_s = 0.0;
    bool has_track_error = false;
    double track_error_m = 0.0;
    double mean_step_ms = 0.0;
    std::int64_t detections = 0;
};

class MetricsAccumulator {
public:
    explicit MetricsAccumulator(const GridSpec& spec)
        : spec_(spec), last_seen_(spec, std::int64_t{0}) {}

    void observe_tick(std::int64_t tick, std::span<const SoftObservationField> fields,
                      const EvidenceGrid& fused, std::span<const TargetState> targets,
                      double step_ms) {
        ticks_ += 1;
        step_ms_sum_ += step_ms;
        for (const auto& field : fields) {
            detections_ += field.detections();
            for (CellIndex c : field.footprint) last_seen_.at(c) = tick;
        }

        // distance from each active target to the nearest strong-evidence cell
        std::vector<WorldPos> hot;
        for (int y = 0; y < spec_.height_cells; ++y)
            for (int x = 0; x < spec_.width_cells; ++x)
                if (fused.m_t(x, y) >= 0.5) hot.push_back(cell_center({x, y}, spec_));
        if (hot.empty()) return;
        double sum = 0.0;
        int n = 0;
        for (const TargetState& t : targets) {
            if (!t.active) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const WorldPos& h : hot) best = std::min(best, distance(t.pos, h));
            sum += best;
            ++n;
        }
        if (n > 0) {
            track_error_sum_ += sum / n;
            track_error_ticks_ += 1;
        }
    }

    MetricsSummary finalize(std::int64_t total_ticks, double dt) const {
        MetricsSummary m;
        if (ticks_ == 0) return m;  // explicit no-data marker stays false
        m.has_data = true;
        std::int64_t seen = 0;
        double staleness_sum = 0.0;
        double staleness_max = 0.0;
        for (std::int64_t v : last_seen_.values()) {
            if (v > 0) ++seen;
            const double s = static_cast<double>(total_ticks - v) * dt;
            staleness_sum += s;
            staleness_max = std::max(staleness_max, s);
        }
        const auto cells = static_cast<double>(spec_.cell_count());
        m.coverage_fraction = static_cast<double>(seen) / cells;
        m.mean_staleness_s = staleness_sum / cells;
        m.max_staleness_s = staleness_max;
        if (track_error_ticks_ > 0) {
            m.has_track_error = true;
            m.track_error_m = track_error_sum_ / static_cast<double>(track_error_ticks_);
        }
        m.mean_step_ms = step_ms_sum_ / static_cast<double>(ticks_);
        m.detections = detections_;
        return m;
    }

private:
    GridSpec spec_;
    Grid<std::int64_t> last_seen_;  // 0 = never seen (ticks start at 1)
    std::int64_t ticks_ = 0;
    std::int64_t detections_ = 0;
    double step_ms_sum_ = 0.0;
    double track_error_sum_ = 0.0;
    std::int64_t track_error_ticks_ = 0;
};

class SimEngine {
public:
    explicit SimEngine(ScenarioConfig cfg, int threads = 1)
        : cfg_(std::move(cfg)), threads_(threads) {
        cfg_.validate();
        evidence_ = EvidenceGrid::vacuous(cfg_.grid);
        posterior_ = init_prior(cfg_.grid, cfg_.assumed_targets);
        for (std::size_t i = 0; i < cfg_.agents.size(); ++i) {
            const auto& init = cfg_.agents[i];
            AgentState a;
            a.id = static_cast<int>(i);
            a.pos = init.start;
            a.speed = init.speed;
            a.scripted_waypoints = init.scripted_waypoints;
            if (!a.scripted_waypoints.empty()) {
                a.current_waypoint = {a.scripted_waypoints[0], 0};
                a.next_scripted = 1;
                a.waypoint_from_script = true;
            } else {
                a.current_waypoint = {a.pos, 0};
            }
            agents_.push_back(std::move(a));
        }
        for (std::size_t i = 0; i < cfg_.targets.size(); ++i)
            targets_.push_back({static_cast<int>(i), cfg_.targets[i].pos,
                                cfg_.targets[i].velocity, true});
        obs_.resize(agents_.size());
        p_obs_.resize(agents_.size());
        fe_.resize(agents_.size());
    }

    // Advances the world one tick. Stage order is fixed: target motion,
    // agent motion, sensing, diffuse-then-fuse, Bayes, waypoint selection.
    void step() {
        tick_ += 1;
        const double dt = cfg_.dt();
        try {
            advance_targets(dt);
            advance_agents(dt);
            sense();
            update_evidence();
            update_bayes();
            select_waypoints();
        } catch (const std::exception& e) {
            throw std::runtime_error("tick " + std::to_string(tick_) + ": " + e.what());
        }
        record();
    }

    std::int64_t tick() const { return tick_; }
    const ScenarioConfig& config() const { return cfg_; }
    const EvidenceGrid& evidence() const { return evidence_; }
    const PosteriorGrid& posterior() const { return posterior_; }
    std::span<const AgentState> agents() const { return agents_; }
    std::span<const TargetState> targets() const { return targets_; }
    std::span<const SoftObservationField> observation_fields() const { return obs_; }
    std::span<const ObservationProbabilityField> p_obs_fields() const { return p_obs_; }
    std::span<const FreeEnergyField> fe_fields() const { return fe_; }
    std::span<const TickRecord> last_records() const { return last_records_; }

private:
    void advance_targets(double dt) {
        for (TargetState& t : targets_) {
            if (!t.active) continue;
            t.pos.x += t.velocity.x * dt;
            t.pos.y += t.velocity.y * dt;
            if (!cfg_.grid.contains(t.pos)) t.active = false;
        }
    }

    void advance_agents(double dt) {
        const double reach = cfg_.grid.cell_size * 0.5;
        for (AgentState& a : agents_) {
            const WorldPos delta = a.current_waypoint.pos - a.pos;
            const double d = norm(delta);
            const double move = a.speed * dt;
            a.pos = d <= move ? a.current_waypoint.pos : a.pos + (move / d) * delta;
            a.waypoint_reached = distance(a.pos, a.current_waypoint.pos) <= reach;
        }
    }

    void sense() {
        std::vector<WorldPos> active_targets;
        for (const TargetState& t : targets_)
            if (t.active) active_targets.push_back(t.pos);
        for (AgentState& a : agents_) {
            RngStream rng = RngStream::for_agent_tick(cfg_.seed, a.id, tick_);
            obs_[a.id] = observe(a.pos, active_targets, cfg_.sensor, cfg_.grid, rng, tick_);
        }
    }

    void update_evidence() {
        evidence_ = diffuse(evidence_, threads_);
        for (const AgentState& a : agents_) apply_observations_in_place(evidence_, obs_[a.id]);
    }

    void update_bayes() {
        for (const AgentState& a : agents_) {
            p_obs_[a.id] = update_posterior_in_place(posterior_, obs_[a.id]);
            p_obs_[a.id].tick = tick_;
        }
        posterior_.tick = tick_;  // one tick per step regardless of agent count
    }

    void select_waypoints() {
        for (AgentState& a : agents_) {
            fe_[a.id] = build_field(evidence_, posterior_, p_obs_[a.id],
                                    obs_[a.id].footprint, threads_);
            if (a.waypoint_from_script) {
                if (!a.waypoint_reached) continue;
                if (a.next_scripted < a.scripted_waypoints.size()) {
                    a.current_waypoint = {a.scripted_waypoints[a.next_scripted++], tick_};
                    a.waypoint_reached = false;
                    continue;
                }
                a.waypoint_from_script = false;
            }
            // free-energy waypoints are recomputed every tick
            a.current_waypoint = next_waypoint(
                a.pos, cell_center(fe_[a.id].argmin_cell, cfg_.grid), cfg_.step_len,
                cfg_.grid, tick_);
        }
    }

    void record() {
        last_records_.clear();
        for (const AgentState& a : agents_) {
            TickRecord r;
            r.tick = tick_;
            r.time_s = static_cast<double>(tick_) * cfg_.dt();
            r.agent_id = a.id;
            r.pos = a.pos;
            r.waypoint = a.current_waypoint.pos;
            r.argmin_pos = cell_center(fe_[a.id].argmin_cell, cfg_.grid);
            r.f_min = fe_[a.id].f_min();
            r.detections = obs_[a.id].detections();
            last_records_.push_back(r);
        }
    }

    ScenarioConfig cfg_;
    int threads_ = 1;
    std::int64_t tick_ = 0;
    EvidenceGrid evidence_;
    PosteriorGrid posterior_;
    std::vector<AgentState> agents_;
    std::vector<TargetState> targets_;
    std::vector<SoftObservationField> obs_;
    std::vector<ObservationProbabilityField> p_obs_;
    std::vector<FreeEnergyField> fe_;
    std::vector<TickRecord> last_records_;
};

struct RunOptions {
    int threads = 1;
    std::function<void(const SimEngine&)> tick_hook;      // after every tick
    std::function<void(const SimEngine&)> snapshot_hook;  // every snapshot_every ticks
};

struct RunResult {
    TrajectoryLog log;
    MetricsSummary metrics;
};

inline RunResult run(const ScenarioConfig& cfg, const RunOptions& opts = {}) {
    cfg.validate();
    SimEngine engine(cfg, opts.threads);
    MetricsAccumulator acc(cfg.grid);
    RunResult result;
    const std::int64_t ticks = cfg.total_ticks();
    result.log.records.reserve(static_cast<std::size_t>(ticks) * cfg.agents.size());
    for (std::int64_t t = 1; t <= ticks; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        engine.step();
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        acc.observe_tick(t, engine.observation_fields(), engine.evidence(), engine.targets(),
                         ms);
        for (const TickRecord& r : engine.last_records()) result.log.records.push_back(r);
        if (opts.tick_hook) opts.tick_hook(engine);
        if (opts.snapshot_hook && cfg.snapshot_every > 0 && t % cfg.snapshot_every == 0)
            opts.snapshot_hook(engine);
    }
    result.metrics = acc.finalize(ticks, cfg.dt());
    return result;
}

}  // namespace gridscout
