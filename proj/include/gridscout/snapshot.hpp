// Grid snapshots: dense layers (evidence_T, evidence_F, posterior) and the
// sparse per-footprint free_energy layer. CSV is the lossless reference;
// PGM is a 16-bit rendering (free energy min-max scaled over the footprint).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridscout/bayes.hpp"
#include "gridscout/evidence.hpp"
#include "gridscout/free_energy.hpp"
#include "gridscout/grid.hpp"
#include "gridscout/io.hpp"

namespace gridscout {

class SnapshotError : public std::runtime_error {
public:
    explicit SnapshotError(const std::string& what) : std::runtime_error(what) {}
};

enum class SnapshotLayer { evidence_t, evidence_f, posterior, free_energy };

inline const char* layer_name(SnapshotLayer layer) {
    switch (layer) {
        case SnapshotLayer::evidence_t: return "evidence_T";
        case SnapshotLayer::evidence_f: return "evidence_F";
        case SnapshotLayer::posterior: return "posterior";
        case SnapshotLayer::free_energy: return "free_energy";
    }
    throw std::logic_error("unreachable layer");
}

inline SnapshotLayer parse_layer_name(const std::string& name) {
    if (name == "evidence_T") return SnapshotLayer::evidence_t;
    if (name == "evidence_F") return SnapshotLayer::evidence_f;
    if (name == "posterior") return SnapshotLayer::posterior;
    if (name == "free_energy") return SnapshotLayer::free_energy;
    throw SnapshotError("unknown snapshot layer \"" + name + "\"");
}

struct SnapshotData {
    SnapshotLayer layer = SnapshotLayer::evidence_t;
    std::int64_t tick = 0;
    int width_cells = 0;
    int height_cells = 0;
    std::vector<double> values;     // dense layers: row-major, width*height
    std::vector<CellIndex> cells;   // free_energy: footprint cells
    std::vector<double> f_nats;     // free_energy: parallel to cells

    bool sparse() const { return layer == SnapshotLayer::free_energy; }
};

inline SnapshotData snapshot_of(const EvidenceGrid& g, SnapshotLayer layer) {
    if (layer != SnapshotLayer::evidence_t && layer != SnapshotLayer::evidence_f)
        throw std::invalid_argument("evidence grids hold evidence_T or evidence_F layers");
    SnapshotData s;
    s.layer = layer;
    s.tick = g.tick;
    s.width_cells = g.spec.width_cells;
    s.height_cells = g.spec.height_cells;
    const Grid<double>& src = layer == SnapshotLayer::evidence_t ? g.m_t : g.m_f;
    s.values.assign(src.values().begin(), src.values().end());
    return s;
}

inline SnapshotData snapshot_of(const PosteriorGrid& g) {
    SnapshotData s;
    s.layer = SnapshotLayer::posterior;
    s.tick = g.tick;
    s.width_cells = g.spec.width_cells;
    s.height_cells = g.spec.height_cells;
    s.values.assign(g.p_t.values().begin(), g.p_t.values().end());
    return s;
}

inline SnapshotData snapshot_of(const FreeEnergyField& f, const GridSpec& spec) {
    SnapshotData s;
    s.layer = SnapshotLayer::free_energy;
    s.tick = f.tick;
    s.width_cells = spec.width_cells;
    s.height_cells = spec.height_cells;
    s.cells = f.footprint;
    s.f_nats = f.f_nats;
    return s;
}

namespace detail {

inline void check_snapshot(const SnapshotData& s) {
    if (s.width_cells < 1 || s.height_cells < 1)
        throw SnapshotError("snapshot dimensions must be positive");
    const auto cells = static_cast<std::size_t>(s.width_cells) *
                       static_cast<std::size_t>(s.height_cells);
    if (s.sparse()) {
        if (s.cells.size() != s.f_nats.size())
            throw SnapshotError("free_energy snapshot: cell/value count mismatch");
        for (const CellIndex& c : s.cells)
            if (c.x < 0 || c.x >= s.width_cells || c.y < 0 || c.y >= s.height_cells)
                throw SnapshotError("free_energy snapshot: cell outside grid");
        for (double v : s.f_nats)
            if (!std::isfinite(v)) throw SnapshotError("free_energy snapshot: non-finite value");
    } else {
        if (s.values.size() != cells)
            throw SnapshotError("snapshot payload does not match grid dimensions");
        for (double v : s.values)
            if (!std::isfinite(v)) throw SnapshotError("snapshot holds a non-finite value");
    }
}

}  // namespace detail

inline void write_snapshot_csv(const SnapshotData& s, std::ostream& out) {
    detail::check_snapshot(s);
    out << "# layer=" << layer_name(s.layer) << " tick=" << s.tick << " width=" << s.width_cells
        << " height=" << s.height_cells << '\n';
    if (s.sparse()) {
        out << "cell_x,cell_y,f_nats\n";
        for (std::size_t i = 0; i < s.cells.size(); ++i)
            out << s.cells[i].x << ',' << s.cells[i].y << ',' << format_g9(s.f_nats[i]) << '\n';
        return;
    }
    for (int y = 0; y < s.height_cells; ++y) {
        for (int x = 0; x < s.width_cells; ++x) {
            if (x > 0) out << ',';
            out << format_g9(s.values[static_cast<std::size_t>(y) * s.width_cells + x]);
        }
        out << '\n';
    }
}

// PGM P2, maxval 65535. Dense layers map [0,1] directly; free energy is
// min-max scaled over the footprint (constant fields render as 0) and
// out-of-footprint cells render as 0.
inline void write_snapshot_pgm(const SnapshotData& s, std::ostream& out) {
    detail::check_snapshot(s);
    auto quantize = [](double v) -> long {
        return std::lround(std::clamp(v, 0.0, 1.0) * 65535.0);
    };
    std::vector<long> pixels(static_cast<std::size_t>(s.width_cells) *
                                 static_cast<std::size_t>(s.height_cells),
                             0);
    if (s.sparse()) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (double v : s.f_nats) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double span = hi - lo;
        for (std::size_t i = 0; i < s.cells.size(); ++i) {
            const auto idx = static_cast<std::size_t>(s.cells[i].y) * s.width_cells + s.cells[i].x;
            pixels[idx] = span > 0.0 ? quantize((s.f_nats[i] - lo) / span) : 0;
        }
    } else {
        for (std::size_t i = 0; i < s.values.size(); ++i) pixels[i] = quantize(s.values[i]);
    }
    out << "P2\n# layer=" << layer_name(s.layer) << " tick=" << s.tick << '\n'
        << s.width_cells << ' ' << s.height_cells << "\n65535\n";
    for (int y = 0; y < s.height_cells; ++y) {
        for (int x = 0; x < s.width_cells; ++x) {
            if (x > 0) out << ' ';
            out << pixels[static_cast<std::size_t>(y) * s.width_cells + x];
        }
        out << '\n';
    }
}

inline void write_snapshot(const SnapshotData& s, const std::filesystem::path& path,
                           bool as_pgm) {
    std::ofstream out(path);
    if (!out) throw SnapshotError("cannot write snapshot file: " + path.string());
    if (as_pgm)
        write_snapshot_pgm(s, out);
    else
        write_snapshot_csv(s, out);
    if (!out) throw SnapshotError("write failed: " + path.string());
}

// Reads the CSV form back (the lossless reference used by `render`).
inline SnapshotData read_snapshot_csv(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line))
        throw SnapshotError(origin + ": empty file, expected a snapshot metadata line");
    SnapshotData s;
    {
        std::string name;
        std::istringstream meta(line);
        std::string hash, kv;
        meta >> hash;
        if (hash != "#") throw SnapshotError(origin + ": first line must start with \"# layer=...\"");
        bool have_layer = false, have_tick = false, have_w = false, have_h = false;
        while (meta >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw SnapshotError(origin + ": malformed metadata token \"" + kv + "\"");
            const std::string key = kv.substr(0, eq);
            const std::string value = kv.substr(eq + 1);
            try {
                if (key == "layer") {
                    name = value;
                    have_layer = true;
                } else if (key == "tick") {
                    s.tick = std::stoll(value);
                    have_tick = true;
                } else if (key == "width") {
                    s.width_cells = std::stoi(value);
                    have_w = true;
                } else if (key == "height") {
                    s.height_cells = std::stoi(value);
                    have_h = true;
                } else {
                    throw SnapshotError(origin + ": unknown metadata key \"" + key + "\"");
                }
            } catch (const std::logic_error&) {
                throw SnapshotError(origin + ": bad metadata value \"" + kv + "\"");
            }
        }
        if (!have_layer || !have_tick || !have_w || !have_h)
            throw SnapshotError(origin + ": metadata needs layer, tick, width, height");
        s.layer = parse_layer_name(name);
    }

    auto parse_double = [&origin](const std::string& tok, int line_no) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::logic_error&) {
            throw SnapshotError(origin + ": line " + std::to_string(line_no) +
                                ": not a number: \"" + tok + "\"");
        }
    };

    int line_no = 1;
    if (s.sparse()) {
        if (!std::getline(in, line) || line != "cell_x,cell_y,f_nats")
            throw SnapshotError(origin + ": free_energy snapshot needs a cell_x,cell_y,f_nats header");
        ++line_no;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string tok;
            std::vector<std::string> toks;
            while (std::getline(row, tok, ',')) toks.push_back(tok);
            if (toks.size() != 3)
                throw SnapshotError(origin + ": line " + std::to_string(line_no) +
                                    ": expected cell_x,cell_y,f_nats");
            CellIndex c{static_cast<int>(parse_double(toks[0], line_no)),
                        static_cast<int>(parse_double(toks[1], line_no))};
            s.cells.push_back(c);
            s.f_nats.push_back(parse_double(toks[2], line_no));
        }
    } else {
        for (int y = 0; y < s.height_cells; ++y) {
            if (!std::getline(in, line))
                throw SnapshotError(origin + ": expected " + std::to_string(s.height_cells) +
                                    " data rows, got " + std::to_string(y));
            ++line_no;
            std::istringstream row(line);
            std::string tok;
            int x = 0;
            while (std::getline(row, tok, ',')) {
                if (x >= s.width_cells)
                    throw SnapshotError(origin + ": line " + std::to_string(line_no) +
                                        ": too many columns");
                s.values.push_back(parse_double(tok, line_no));
                ++x;
            }
            if (x != s.width_cells)
                throw SnapshotError(origin + ": line " + std::to_string(line_no) + ": expected " +
                                    std::to_string(s.width_cells) + " columns, got " +
                                    std::to_string(x));
        }
    }
    detail::check_snapshot(s);
    return s;
}

inline SnapshotData read_snapshot_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SnapshotError("cannot open snapshot file: " + path.string());
    return read_snapshot_csv(in, path.filename().string());
}

// 6-digit zero-padded tick keeps directory listings in run order.
inline std::string snapshot_basename(SnapshotLayer layer, std::int64_t tick, int agent_id = -1) {
    char tickbuf[16];
    std::snprintf(tickbuf, sizeof tickbuf, "%06lld", static_cast<long long>(tick));
    std::string name = layer_name(layer);
    if (agent_id >= 0) name += "_agent" + std::to_string(agent_id);
    name += "_tick";
    name += tickbuf;
    return name;
}

}  // namespace gridscout
