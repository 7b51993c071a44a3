// Deterministic soft-output Gaussian sensor. Per footprint cell it emits a
// single positive or negative score; position noise on detected targets is
// the only stochastic element.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gridscout/grid.hpp"
#include "gridscout/rng.hpp"

namespace gridscout {

struct SensorSpec {
    double radius = 100.0; // meters
    double peak_t = 0.7;   // max positive score
    double peak_f = 0.3;   // max negative score
    double sigma_falloff = 100.0;  // negative-score falloff; defaults to radius
    double sigma_position = 5.0;   // std of the position estimate error, meters
    double smear_radius_multiplier = 3.0;

    // Fixed by the model: every in-range target is detected, none invented.
    static constexpr double detection_probability = 1.0;
    static constexpr double false_positive_rate = 0.0;

    void validate() const {
        if (!(radius > 0.0)) throw std::invalid_argument("SensorSpec: radius must be > 0");
        if (!(peak_t > 0.0 && peak_t < 1.0))
            throw std::invalid_argument("SensorSpec: peak_t must be in (0,1)");
        if (!(peak_f > 0.0 && peak_f < 1.0))
            throw std::invalid_argument("SensorSpec: peak_f must be in (0,1)");
        if (!(sigma_falloff > 0.0))
            throw std::invalid_argument("SensorSpec: sigma_falloff must be > 0");
        if (!(sigma_position >= 0.0))
            throw std::invalid_argument("SensorSpec: sigma_position must be >= 0");
        if (!(smear_radius_multiplier >= 0.0))
            throw std::invalid_argument("SensorSpec: smear_radius_multiplier must be >= 0");
    }
};

enum class Polarity { positive, negative };

struct CellScore {
    Polarity polarity = Polarity::negative;
    double score = 0.0;
};

// One sensor sweep: per-footprint-cell scores plus the noisy position
// estimates of the targets detected this tick. Footprint cells are unique
// and kept in row-major order.
struct SoftObservationField {
    std::vector<CellIndex> footprint;
    std::vector<CellScore> scores;
    std::vector<WorldPos> estimated_positions;
    WorldPos agent_pos;
    std::int64_t tick = 0;

    std::optional<std::size_t> find(CellIndex c) const {
        auto it = std::lower_bound(footprint.begin(), footprint.end(), c,
                                   [](CellIndex a, CellIndex b) {
                                       return a.y != b.y ? a.y < b.y : a.x < b.x;
                                   });
        if (it == footprint.end() || !(*it == c)) return std::nullopt;
        return static_cast<std::size_t>(it - footprint.begin());
    }

    int detections() const { return static_cast<int>(estimated_positions.size()); }
};

inline double gaussian_score(double distance, double sigma, double peak) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_score: sigma must be > 0");
    return peak * std::exp(-(distance * distance) / (2.0 * sigma * sigma));
}

// Sweeps the sensor at agent_pos over the given (active) target positions.
// Every target within the radius is detected; its estimated position is the
// true position plus isotropic gaussian noise. Cells near an estimate score
// positive against the estimate; all remaining footprint cells score
// negative against the distance to the agent.
inline SoftObservationField observe(WorldPos agent_pos, std::span<const WorldPos> targets,
                                    const SensorSpec& sensor, const GridSpec& grid,
                                    RngStream& rng, std::int64_t tick = 0) {
    sensor.validate();
    grid.validate();
    if (!grid.contains(agent_pos))
        throw std::out_of_range("observe: agent position outside map");

    SoftObservationField field;
    field.agent_pos = agent_pos;
    field.tick = tick;
    field.footprint = cells_within_radius(agent_pos, sensor.radius, grid);
    field.scores.resize(field.footprint.size());

    for (std::size_t i = 0; i < field.footprint.size(); ++i) {
        const double d = distance(cell_center(field.footprint[i], grid), agent_pos);
        field.scores[i] = {Polarity::negative,
                           gaussian_score(d, sensor.sigma_falloff, sensor.peak_f)};
    }

    for (const WorldPos& target : targets) {
        if (distance(target, agent_pos) > sensor.radius) continue;
        const WorldPos est{target.x + rng.normal(sensor.sigma_position),
                           target.y + rng.normal(sensor.sigma_position)};
        field.estimated_positions.push_back(est);
    }

    auto mark_positive = [&](CellIndex c, double score) {
        const auto idx = field.find(c);
        if (!idx) return;  // smear may extend past the footprint
        CellScore& cs = field.scores[*idx];
        if (cs.polarity == Polarity::positive)
            cs.score = std::max(cs.score, score);  // overlapping smears: at-least-one-target
        else
            cs = {Polarity::positive, score};
    };

    const double smear_radius = sensor.smear_radius_multiplier * sensor.sigma_position;
    for (const WorldPos& est : field.estimated_positions) {
        if (sensor.sigma_position > 0.0) {
            for (CellIndex c : cells_within_radius(est, smear_radius, grid)) {
                const double d = distance(cell_center(c, grid), est);
                mark_positive(c, gaussian_score(d, sensor.sigma_position, sensor.peak_t));
            }
        }
        // The cell holding the estimate is always positive, even when the
        // estimate misses every cell center (exact positioning included).
        if (grid.contains(est)) {
            const CellIndex holder = world_to_cell(est, grid);
            const double score =
                sensor.sigma_position > 0.0
                    ? gaussian_score(distance(cell_center(holder, grid), est),
                                     sensor.sigma_position, sensor.peak_t)
                    : sensor.peak_t;
            mark_positive(holder, score);
        }
    }
    return field;
}

inline double likelihood_from(CellScore cs) {
    return cs.polarity == Polarity::positive ? cs.score : 1.0 - cs.score;
}

// p(phi | target present) for a footprint cell; undefined elsewhere.
inline double likelihood_of(const SoftObservationField& field, CellIndex cell) {
    const auto idx = field.find(cell);
    if (!idx)
        throw std::out_of_range("likelihood_of: cell outside the sensor footprint");
    return likelihood_from(field.scores[*idx]);
}

}  // namespace gridscout
