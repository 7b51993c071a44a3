// Geometry of the gridded surveillance area: indexing, world<->cell
// conversion, neighborhoods and footprint queries.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridscout {

struct CellIndex {
    int x = 0;
    int y = 0;

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

struct WorldPos {
    double x = 0.0;
    double y = 0.0;

    friend WorldPos operator+(WorldPos a, WorldPos b) { return {a.x + b.x, a.y + b.y}; }
    friend WorldPos operator-(WorldPos a, WorldPos b) { return {a.x - b.x, a.y - b.y}; }
    friend WorldPos operator*(double s, WorldPos p) { return {s * p.x, s * p.y}; }
    friend bool operator==(const WorldPos&, const WorldPos&) = default;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double norm(WorldPos p) { return std::hypot(p.x, p.y); }
inline double distance(WorldPos a, WorldPos b) { return norm(a - b); }

// Square-grid map of width_cells x height_cells cells of cell_size meters.
// neighbor_count 8 is the implemented Moore topology; 6 is accepted in
// configs for a hexagonal grid whose geometry is not provided here.
struct GridSpec {
    int width_cells = 0;
    int height_cells = 0;
    double cell_size = 1.0;
    int neighbor_count = 8;

    void validate() const {
        if (width_cells < 1 || height_cells < 1)
            throw std::invalid_argument("GridSpec: grid must contain at least one cell");
        if (!(cell_size > 0.0))
            throw std::invalid_argument("GridSpec: cell_size must be > 0");
        if (neighbor_count != 6 && neighbor_count != 8)
            throw std::invalid_argument("GridSpec: neighbor_count must be 6 or 8");
    }

    std::int64_t cell_count() const {
        return static_cast<std::int64_t>(width_cells) * height_cells;
    }
    double width_m() const { return width_cells * cell_size; }
    double height_m() const { return height_cells * cell_size; }

    bool contains(CellIndex c) const {
        return c.x >= 0 && c.x < width_cells && c.y >= 0 && c.y < height_cells;
    }
    bool contains(WorldPos p) const {
        return p.x >= 0.0 && p.x < width_m() && p.y >= 0.0 && p.y < height_m();
    }

    // Canonical row-major ordering: y outer, x inner.
    std::int64_t row_major(CellIndex c) const {
        return static_cast<std::int64_t>(c.y) * width_cells + c.x;
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

namespace detail {
inline void require_valid_cell(CellIndex c, const GridSpec& spec, const char* who) {
    if (!spec.contains(c))
        throw std::out_of_range(std::string(who) + ": cell (" + std::to_string(c.x) + "," +
                                std::to_string(c.y) + ") outside " +
                                std::to_string(spec.width_cells) + "x" +
                                std::to_string(spec.height_cells) + " grid");
}
}  // namespace detail

// Visits the Moore neighborhood clipped at map edges, in fixed row-major
// order, excluding the cell itself.
template <typename Fn>
inline void for_each_neighbor(CellIndex c, const GridSpec& spec, Fn&& fn) {
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const CellIndex n{c.x + dx, c.y + dy};
            if (spec.contains(n)) fn(n);
        }
    }
}

inline int clipped_neighbor_count(CellIndex c, const GridSpec& spec) {
    int count = 0;
    for_each_neighbor(c, spec, [&](CellIndex) { ++count; });
    return count;
}

inline std::vector<CellIndex> neighbors(CellIndex c, const GridSpec& spec) {
    detail::require_valid_cell(c, spec, "neighbors");
    std::vector<CellIndex> out;
    out.reserve(8);
    for_each_neighbor(c, spec, [&](CellIndex n) { out.push_back(n); });
    return out;
}

// In-map cells whose center lies within `radius` meters of `center`.
// The center itself may be outside the map. Row-major output order.
inline std::vector<CellIndex> cells_within_radius(WorldPos center, double radius,
                                                  const GridSpec& spec) {
    if (radius < 0.0) throw std::invalid_argument("cells_within_radius: radius must be >= 0");
    std::vector<CellIndex> out;
    const double r2 = radius * radius;
    const int y0 = std::max(0, static_cast<int>(std::floor((center.y - radius) / spec.cell_size - 0.5)));
    const int y1 = std::min(spec.height_cells - 1,
                            static_cast<int>(std::ceil((center.y + radius) / spec.cell_size)));
    const int x0 = std::max(0, static_cast<int>(std::floor((center.x - radius) / spec.cell_size - 0.5)));
    const int x1 = std::min(spec.width_cells - 1,
                            static_cast<int>(std::ceil((center.x + radius) / spec.cell_size)));
    for (int y = y0; y <= y1; ++y) {
        const double cy = (y + 0.5) * spec.cell_size - center.y;
        for (int x = x0; x <= x1; ++x) {
            const double cx = (x + 0.5) * spec.cell_size - center.x;
            if (cx * cx + cy * cy <= r2) out.push_back({x, y});
        }
    }
    return out;
}

inline WorldPos cell_center(CellIndex c, const GridSpec& spec) {
    detail::require_valid_cell(c, spec, "cell_center");
    return {(c.x + 0.5) * spec.cell_size, (c.y + 0.5) * spec.cell_size};
}

inline CellIndex world_to_cell(WorldPos p, const GridSpec& spec) {
    if (!spec.contains(p))
        throw std::out_of_range("world_to_cell: position (" + std::to_string(p.x) + "," +
                                std::to_string(p.y) + ") outside map bounds");
    CellIndex c{static_cast<int>(std::floor(p.x / spec.cell_size)),
                static_cast<int>(std::floor(p.y / spec.cell_size))};
    c.x = std::min(c.x, spec.width_cells - 1);
    c.y = std::min(c.y, spec.height_cells - 1);
    return c;
}

// Dense row-major 2D array of per-cell values.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * height, fill) {}
    explicit Grid(const GridSpec& spec, T fill = T{})
        : Grid(spec.width_cells, spec.height_cells, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    T& operator()(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const T& operator()(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    T& at(CellIndex c) { return (*this)(c.x, c.y); }
    const T& at(CellIndex c) const { return (*this)(c.x, c.y); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& values() { return data_; }
    const std::vector<T>& values() const { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

}  // namespace gridscout
