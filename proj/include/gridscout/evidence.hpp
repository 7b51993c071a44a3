// Dempster-Shafer evidence map: per-cell belief pairs over {target present,
// target absent}, synchronous diffusion, fusion of soft observations, and
// the pignistic transform.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "gridscout/grid.hpp"
#include "gridscout/parallel.hpp"
#include "gridscout/sensor.hpp"

namespace gridscout {

// Fusing two certain, contradictory beliefs has no defined result. Sensor
// peaks below 1 keep this out of normal operation.
struct TotalConflictError : std::domain_error {
    using std::domain_error::domain_error;
};

// Floor applied to the absence mass after diffusion; a transient zero is
// absorbing under the geometric mean and would never regrow.
inline constexpr double kMinNegativeMass = 1e-9;

struct BeliefMass {
    double m_t = 0.0;  // belief the cell holds at least one target
    double m_f = 0.0;  // belief the cell is empty

    double uncertainty() const { return 1.0 - m_t - m_f; }
    bool valid() const { return m_t >= 0.0 && m_f >= 0.0 && m_t + m_f <= 1.0; }

    friend bool operator==(const BeliefMass&, const BeliefMass&) = default;
};

struct PignisticPair {
    double p_t = 0.5;
    double p_f = 0.5;
};

struct EvidenceGrid {
    GridSpec spec;
    Grid<double> m_t;
    Grid<double> m_f;
    std::int64_t tick = 0;

    static EvidenceGrid vacuous(const GridSpec& spec) {
        spec.validate();
        return {spec, Grid<double>(spec, 0.0), Grid<double>(spec, 0.0), 0};
    }

    BeliefMass cell(CellIndex c) const { return {m_t.at(c), m_f.at(c)}; }
    void set(CellIndex c, BeliefMass bm) {
        m_t.at(c) = bm.m_t;
        m_f.at(c) = bm.m_f;
    }

    friend bool operator==(const EvidenceGrid&, const EvidenceGrid&) = default;
};

namespace detail {
inline void require_valid_mass(BeliefMass bm, const char* who) {
    if (!bm.valid())
        throw std::invalid_argument(std::string(who) + ": belief pair (" +
                                    std::to_string(bm.m_t) + "," + std::to_string(bm.m_f) +
                                    ") violates m_t, m_f >= 0, m_t + m_f <= 1");
}
inline void require_score(double score, const char* who) {
    if (!(score >= 0.0 && score <= 1.0))
        throw std::invalid_argument(std::string(who) + ": score must be in [0,1]");
}
// Round-off can push a combination an ulp past the simplex; shave the
// excess off m_f so repeated fusion stays closed.
inline BeliefMass shave_to_simplex(BeliefMass bm) {
    bm.m_t = std::min(bm.m_t, 1.0);
    if (bm.m_t + bm.m_f > 1.0) bm.m_f = 1.0 - bm.m_t;
    return bm;
}
}  // namespace detail

// Dempster combination with a positive observation (score, 0).
inline BeliefMass fuse_positive(BeliefMass cell, double score) {
    detail::require_valid_mass(cell, "fuse_positive");
    detail::require_score(score, "fuse_positive");
    const double den = 1.0 - score * cell.m_f;
    if (den <= 0.0)
        throw TotalConflictError("fuse_positive: total-conflict combination (score 1 vs m_f 1)");
    return detail::shave_to_simplex({(cell.m_t + score * (1.0 - cell.m_t - cell.m_f)) / den,
                                     ((1.0 - score) * cell.m_f) / den});
}

// Dempster combination with a negative observation (0, score).
inline BeliefMass fuse_negative(BeliefMass cell, double score) {
    detail::require_valid_mass(cell, "fuse_negative");
    detail::require_score(score, "fuse_negative");
    const double den = 1.0 - cell.m_t * score;
    if (den <= 0.0)
        throw TotalConflictError("fuse_negative: total-conflict combination (score 1 vs m_t 1)");
    return detail::shave_to_simplex({(cell.m_t * (1.0 - score)) / den,
                                     (cell.m_f + score * (1.0 - cell.m_t - cell.m_f)) / den});
}

// Splits the uncertainty mass equally between the two states.
inline PignisticPair pignistic(BeliefMass cell) {
    detail::require_valid_mass(cell, "pignistic");
    const double p_t = 0.5 * (1.0 + cell.m_t - cell.m_f);
    return {p_t, 1.0 - p_t};
}

// One synchronous diffusion step. Every output cell is computed from the
// time-t snapshot with its own clipped neighbor count N_c:
//   target mass explodes:  m_t' = 1 - prod over self+neighbors of (1 - m/(N_c+1))
//   absence mass implodes: m_f' = geometric mean over self+neighbors
inline EvidenceGrid diffuse(const EvidenceGrid& grid, int threads = 1) {
    grid.spec.validate();
    const GridSpec& spec = grid.spec;
    const int w = spec.width_cells;
    const int h = spec.height_cells;

    Grid<double> log_mf(spec);
    parallel_chunks(spec.cell_count(), threads, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) log_mf.data()[i] = std::log(grid.m_f.data()[i]);
    });

    EvidenceGrid out{spec, Grid<double>(spec), Grid<double>(spec), grid.tick + 1};
    parallel_chunks(h, threads, [&](std::int64_t y0, std::int64_t y1) {
        for (int y = static_cast<int>(y0); y < static_cast<int>(y1); ++y) {
            const int yspan = 1 + (y > 0) + (y < h - 1);
            for (int x = 0; x < w; ++x) {
                const int xspan = 1 + (x > 0) + (x < w - 1);
                const int n_c = xspan * yspan - 1;
                const double share = 1.0 / (n_c + 1);

                double survive = 1.0 - grid.m_t(x, y) * share;
                double log_sum = log_mf(x, y);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        survive *= 1.0 - grid.m_t(nx, ny) * share;
                        log_sum += log_mf(nx, ny);
                    }
                }
                const double mt = 1.0 - survive;
                double mf = std::exp(share * log_sum);
                if (mf < kMinNegativeMass) mf = kMinNegativeMass;
                if (mt + mf > 1.0) mf = 1.0 - mt;
                out.m_t(x, y) = mt;
                out.m_f(x, y) = mf;
            }
        }
    });
    return out;
}

// Fuses one observation field into the grid, in footprint order; cells
// outside the footprint are untouched. The grid must already be diffused
// for this tick.
inline void apply_observations_in_place(EvidenceGrid& grid, const SoftObservationField& field) {
    if (field.scores.size() != field.footprint.size())
        throw std::invalid_argument("apply_observations: malformed field");
    for (std::size_t i = 0; i < field.footprint.size(); ++i) {
        const CellIndex c = field.footprint[i];
        if (!grid.spec.contains(c))
            throw std::out_of_range("apply_observations: footprint cell outside grid");
        const CellScore cs = field.scores[i];
        try {
            grid.set(c, cs.polarity == Polarity::positive
                            ? fuse_positive(grid.cell(c), cs.score)
                            : fuse_negative(grid.cell(c), cs.score));
        } catch (const TotalConflictError& e) {
            throw TotalConflictError(std::string(e.what()) + " at cell (" +
                                     std::to_string(c.x) + "," + std::to_string(c.y) + ")");
        }
    }
}

inline EvidenceGrid apply_observations(const EvidenceGrid& grid,
                                       const SoftObservationField& field) {
    EvidenceGrid out = grid;
    apply_observations_in_place(out, field);
    return out;
}

}  // namespace gridscout
