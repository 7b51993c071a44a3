// Per-cell Bayesian generative process: the prior of each tick is the
// previous posterior, observations update cells inside the footprint only.
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gridscout/grid.hpp"
#include "gridscout/sensor.hpp"

namespace gridscout {

// Keeps probabilities strictly inside (0,1): no absorbing states and the
// surprisal -ln p(phi) stays finite inside the footprint.
inline constexpr double kProbEps = 1e-9;

inline double clamp_probability(double p) {
    return std::clamp(p, kProbEps, 1.0 - kProbEps);
}

struct PosteriorGrid {
    GridSpec spec;
    Grid<double> p_t;  // p(target present), strictly in (0,1)
    std::int64_t tick = 0;

    friend bool operator==(const PosteriorGrid&, const PosteriorGrid&) = default;
};

// p(phi) per footprint cell; zero everywhere else by convention and never
// stored there.
struct ObservationProbabilityField {
    std::vector<CellIndex> footprint;
    std::vector<double> p_obs;
    WorldPos agent_pos;
    std::int64_t tick = 0;
};

// Uniform prior: assumed targets spread over the whole map.
inline PosteriorGrid init_prior(const GridSpec& spec, std::int64_t assumed_targets) {
    spec.validate();
    if (assumed_targets < 0)
        throw std::invalid_argument("init_prior: assumed_targets must be >= 0");
    const double eps =
        clamp_probability(static_cast<double>(assumed_targets) / static_cast<double>(spec.cell_count()));
    return {spec, Grid<double>(spec, eps), 0};
}

// Total probability of the observation over the two states.
inline double observation_probability(double prior_t, double lik_t) {
    if (!(prior_t > 0.0 && prior_t < 1.0))
        throw std::invalid_argument("observation_probability: prior must be in (0,1)");
    if (!(lik_t > 0.0 && lik_t < 1.0))
        throw std::invalid_argument("observation_probability: likelihood must be in (0,1)");
    return lik_t * prior_t + (1.0 - lik_t) * (1.0 - prior_t);
}

// Bayes update over the field's footprint; returns the p(phi) values used.
// Cells outside the footprint carry the prior forward untouched.
inline ObservationProbabilityField update_posterior_in_place(PosteriorGrid& grid,
                                                             const SoftObservationField& field) {
    if (field.scores.size() != field.footprint.size())
        throw std::invalid_argument("update_posterior: malformed field");
    ObservationProbabilityField out;
    out.footprint = field.footprint;
    out.p_obs.resize(field.footprint.size());
    out.agent_pos = field.agent_pos;
    out.tick = grid.tick + 1;

    for (std::size_t i = 0; i < field.footprint.size(); ++i) {
        const CellIndex c = field.footprint[i];
        if (!grid.spec.contains(c))
            throw std::out_of_range("update_posterior: footprint cell outside grid");
        const double prior = grid.p_t.at(c);
        const double lik = likelihood_from(field.scores[i]);
        const double p_obs = observation_probability(prior, lik);
        out.p_obs[i] = p_obs;
        grid.p_t.at(c) = clamp_probability(lik * prior / p_obs);
    }
    grid.tick += 1;
    return out;
}

inline std::pair<PosteriorGrid, ObservationProbabilityField> update_posterior(
    const PosteriorGrid& grid, const SoftObservationField& field) {
    PosteriorGrid out = grid;
    ObservationProbabilityField p_obs = update_posterior_in_place(out, field);
    return {std::move(out), std::move(p_obs)};
}

}  // namespace gridscout
