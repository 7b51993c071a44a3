// Variational free energy over the sensor footprint and waypoint selection.
// F(cell) = KL(pignistic(fused evidence) || posterior) - ln p(phi); the next
// waypoint is a capped step toward the footprint argmin.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gridscout/bayes.hpp"
#include "gridscout/evidence.hpp"
#include "gridscout/grid.hpp"
#include "gridscout/parallel.hpp"

namespace gridscout {

struct FreeEnergyField {
    std::vector<CellIndex> footprint;
    std::vector<double> f_nats;
    CellIndex argmin_cell;
    std::size_t argmin_index = 0;
    std::int64_t tick = 0;

    double f_min() const { return f_nats[argmin_index]; }
};

struct Waypoint {
    WorldPos pos;
    std::int64_t source_tick = 0;
};

// Free energy of one cell, in nats. Outside the footprint p(phi) = 0 and
// surprise is infinite, so the request is rejected rather than evaluated.
inline double free_energy(PignisticPair pig, double posterior_t, double p_obs) {
    if (!(p_obs > 0.0))
        throw std::invalid_argument("free_energy: p_obs <= 0 means infinite surprise");
    if (!(p_obs <= 1.0)) throw std::invalid_argument("free_energy: p_obs must be <= 1");
    if (!(posterior_t > 0.0 && posterior_t < 1.0))
        throw std::invalid_argument("free_energy: posterior must be in (0,1)");
    if (!(pig.p_t >= 0.0 && pig.p_f >= 0.0))
        throw std::invalid_argument("free_energy: invalid pignistic pair");

    double kl = 0.0;
    if (pig.p_t > 0.0) kl += pig.p_t * std::log(pig.p_t / posterior_t);
    if (pig.p_f > 0.0) kl += pig.p_f * std::log(pig.p_f / (1.0 - posterior_t));
    return kl - std::log(p_obs);
}

// Evaluates F across the footprint and selects the argmin. Ties break to
// the cell closest to the agent, then to row-major order, so trajectories
// are reproducible.
inline FreeEnergyField build_field(const EvidenceGrid& evidence, const PosteriorGrid& posterior,
                                   const ObservationProbabilityField& p_obs_field,
                                   std::span<const CellIndex> footprint, int threads = 1) {
    if (footprint.empty())
        throw std::invalid_argument("build_field: empty footprint");
    if (p_obs_field.footprint.size() != footprint.size() ||
        p_obs_field.p_obs.size() != footprint.size())
        throw std::invalid_argument("build_field: footprint and p(phi) field disagree");
    for (std::size_t i = 0; i < footprint.size(); ++i)
        if (!(p_obs_field.footprint[i] == footprint[i]))
            throw std::invalid_argument("build_field: footprint and p(phi) field disagree");

    FreeEnergyField out;
    out.footprint.assign(footprint.begin(), footprint.end());
    out.f_nats.resize(footprint.size());
    out.tick = p_obs_field.tick;

    const auto n = static_cast<std::int64_t>(footprint.size());
    parallel_chunks(n, threads, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            const CellIndex c = footprint[static_cast<std::size_t>(i)];
            out.f_nats[static_cast<std::size_t>(i)] =
                free_energy(pignistic(evidence.cell(c)), posterior.p_t.at(c),
                            p_obs_field.p_obs[static_cast<std::size_t>(i)]);
        }
    });

    // sequential reduction; the total order makes it partition-independent
    std::size_t best = 0;
    double best_dist = distance(cell_center(out.footprint[0], evidence.spec),
                                p_obs_field.agent_pos);
    for (std::size_t i = 1; i < out.f_nats.size(); ++i) {
        if (out.f_nats[i] > out.f_nats[best]) continue;
        const double d = distance(cell_center(out.footprint[i], evidence.spec),
                                  p_obs_field.agent_pos);
        if (out.f_nats[i] < out.f_nats[best] || d < best_dist) {
            best = i;
            best_dist = d;
        }
    }
    out.argmin_index = best;
    out.argmin_cell = out.footprint[best];
    return out;
}

// Capped step from the agent toward the argmin position, clamped to the map.
inline Waypoint next_waypoint(WorldPos agent_pos, WorldPos argmin_pos, double step_len,
                              const GridSpec& spec, std::int64_t source_tick = 0) {
    if (!(step_len > 0.0)) throw std::invalid_argument("next_waypoint: step_len must be > 0");
    const WorldPos delta = argmin_pos - agent_pos;
    const double dist = norm(delta);
    WorldPos pos = dist <= step_len ? argmin_pos : agent_pos + (step_len / dist) * delta;
    pos.x = std::clamp(pos.x, 0.0, std::nextafter(spec.width_m(), 0.0));
    pos.y = std::clamp(pos.y, 0.0, std::nextafter(spec.height_m(), 0.0));
    return {pos, source_tick};
}

}  // namespace gridscout
