#pragma once

// Voxel-grid geometry shared by both belief phases: grid extents, dense voxel
// sets, probe footprints, straight-line probe motions and the contact surface
// a blocked motion implies.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "touchloc/error.hpp"

namespace touchloc {

using Cell = std::array<int, 3>;

inline Cell operator+(const Cell& a, const Cell& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Cell operator-(const Cell& a, const Cell& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

inline double squared_distance(const Cell& a, const Cell& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

inline int manhattan(const Cell& a, const Cell& b) {
    return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
}

/// Finite 2D or 3D grid with unit voxels. Unused axes have extent 1.
class GridWorkspace {
public:
    GridWorkspace() = default;

    explicit GridWorkspace(std::span<const int> extents) {
        if (extents.size() < 2 || extents.size() > 3) {
            throw Error(ErrorKind::InvalidScenario, "grid must have 2 or 3 axes");
        }
        rank_ = static_cast<int>(extents.size());
        for (int axis = 0; axis < rank_; ++axis) {
            if (extents[axis] < 1) throw Error(ErrorKind::InvalidScenario, "grid extents must be >= 1");
            dims_[axis] = extents[axis];
        }
    }

    GridWorkspace(std::initializer_list<int> extents)
        : GridWorkspace(std::span<const int>(extents.begin(), extents.size())) {}

    int rank() const noexcept { return rank_; }
    int extent(int axis) const noexcept { return dims_[axis]; }
    const std::array<int, 3>& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept {
        return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
    }

    bool contains(const Cell& c) const noexcept {
        return c[0] >= 0 && c[1] >= 0 && c[2] >= 0 && c[0] < dims_[0] && c[1] < dims_[1] &&
               c[2] < dims_[2];
    }

    std::size_t index(const Cell& c) const noexcept {
        return static_cast<std::size_t>(c[0]) +
               static_cast<std::size_t>(dims_[0]) *
                   (static_cast<std::size_t>(c[1]) + static_cast<std::size_t>(dims_[1]) * c[2]);
    }

    Cell cell(std::size_t index) const noexcept {
        const auto x = static_cast<int>(index % dims_[0]);
        index /= dims_[0];
        const auto y = static_cast<int>(index % dims_[1]);
        const auto z = static_cast<int>(index / dims_[1]);
        return {x, y, z};
    }

    friend bool operator==(const GridWorkspace&, const GridWorkspace&) = default;

private:
    std::array<int, 3> dims_{1, 1, 1};
    int rank_ = 2;
};

/// Dense bit set over the voxels of one grid.
class VoxelSet {
public:
    VoxelSet() = default;
    explicit VoxelSet(std::size_t voxel_count)
        : words_((voxel_count + 63) / 64, 0), size_(voxel_count) {}

    static VoxelSet full(std::size_t voxel_count) {
        VoxelSet s(voxel_count);
        for (auto& w : s.words_) w = ~std::uint64_t{0};
        s.trim();
        return s;
    }

    std::size_t universe() const noexcept { return size_; }

    void insert(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void erase(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool contains(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool empty() const noexcept {
        return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
    }

    VoxelSet& operator|=(const VoxelSet& o) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    VoxelSet& operator&=(const VoxelSet& o) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    VoxelSet& operator-=(const VoxelSet& o) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    friend VoxelSet operator|(VoxelSet a, const VoxelSet& b) { return a |= b; }
    friend VoxelSet operator&(VoxelSet a, const VoxelSet& b) { return a &= b; }
    friend VoxelSet operator-(VoxelSet a, const VoxelSet& b) { return a -= b; }

    VoxelSet complement() const {
        VoxelSet c = *this;
        for (auto& w : c.words_) w = ~w;
        c.trim();
        return c;
    }

    bool intersects(const VoxelSet& o) const noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if (words_[i] & o.words_[i]) return true;
        }
        return false;
    }

    std::size_t intersection_count(const VoxelSet& o) const noexcept {
        std::size_t n = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            n += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
        }
        return n;
    }

    bool subset_of(const VoxelSet& o) const noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if (words_[i] & ~o.words_[i]) return false;
        }
        return true;
    }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            auto w = words_[wi];
            while (w) {
                const auto bit = static_cast<std::size_t>(std::countr_zero(w));
                f(wi * 64 + bit);
                w &= w - 1;
            }
        }
    }

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        for_each([&](std::size_t i) { out.push_back(i); });
        return out;
    }

    std::span<const std::uint64_t> words() const noexcept { return words_; }

    friend bool operator==(const VoxelSet&, const VoxelSet&) = default;

private:
    void trim() noexcept {
        if (const auto tail = size_ & 63; tail != 0 && !words_.empty()) {
            words_.back() &= (std::uint64_t{1} << tail) - 1;
        }
    }

    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

/// Probe reference-cell position.
struct Config {
    Cell cell{0, 0, 0};
    friend auto operator<=>(const Config&, const Config&) = default;
};

struct ProbeShape {
    std::vector<Cell> offsets{{0, 0, 0}};

    static ProbeShape box(int sx, int sy, int sz = 1) {
        ProbeShape p;
        p.offsets.clear();
        for (int z = 0; z < sz; ++z)
            for (int y = 0; y < sy; ++y)
                for (int x = 0; x < sx; ++x) p.offsets.push_back({x, y, z});
        return p;
    }

    void validate() const {
        if (offsets.empty()) throw Error(ErrorKind::InvalidScenario, "probe shape has no offsets");
        auto sorted = offsets;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw Error(ErrorKind::InvalidScenario, "probe shape offsets must be unique");
        }
    }

    /// Largest number of footprint cells projected onto a plane normal to an axis.
    std::size_t max_cross_section(int rank) const {
        std::size_t best = 1;
        for (int axis = 0; axis < rank; ++axis) {
            std::vector<Cell> proj;
            for (auto o : offsets) {
                o[axis] = 0;
                proj.push_back(o);
            }
            std::sort(proj.begin(), proj.end());
            proj.erase(std::unique(proj.begin(), proj.end()), proj.end());
            best = std::max(best, proj.size());
        }
        return best;
    }
};

/// Signed unit axis. Ordering index: +x, -x, +y, -y, +z, -z.
struct Direction {
    int axis = 0;
    int sign = 1;

    int order() const noexcept { return 2 * axis + (sign < 0 ? 1 : 0); }
    Cell step() const noexcept {
        Cell c{0, 0, 0};
        c[axis] = sign;
        return c;
    }
    std::string name() const {
        static constexpr char axes[] = {'x', 'y', 'z'};
        return std::string(1, sign > 0 ? '+' : '-') + axes[axis];
    }
    static Direction from_order(int order) { return {order / 2, order % 2 == 0 ? 1 : -1}; }

    friend bool operator==(const Direction&, const Direction&) = default;
};

inline Direction parse_direction(std::string_view s) {
    if (s.size() != 2 || (s[0] != '+' && s[0] != '-') || s[1] < 'x' || s[1] > 'z') {
        throw Error(ErrorKind::InvalidScenario, "bad direction '" + std::string(s) + "'");
    }
    return {s[1] - 'x', s[0] == '+' ? 1 : -1};
}

struct ActionSpec {
    Direction dir;
    int length = 1;

    friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
    std::string name() const { return dir.name() + std::to_string(length); }
};

/// Tie order used wherever actions compete: shorter first, then direction order.
inline bool action_order_less(const ActionSpec& a, const ActionSpec& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.dir.order() < b.dir.order();
}

/// A straight probe motion expanded into unit steps. waypoints[k-1] is q_k;
/// the start configuration is q_0 and is not part of the waypoint list.
struct DiscretizedAction {
    Config start;
    ActionSpec spec;  // length is the clipped step count n
    std::vector<Config> waypoints;

    int steps() const noexcept { return static_cast<int>(waypoints.size()); }
    /// q_k for k in [0, n], q_0 being the start.
    const Config& at(int k) const noexcept { return k == 0 ? start : waypoints[k - 1]; }
};

inline bool footprint_fits(const GridWorkspace& grid, const Config& q, const ProbeShape& shape) {
    return std::all_of(shape.offsets.begin(), shape.offsets.end(),
                       [&](const Cell& o) { return grid.contains(q.cell + o); });
}

inline DiscretizedAction discretize_action(const GridWorkspace& grid, const ProbeShape& shape,
                                           const Config& start, const ActionSpec& a) {
    if (a.length < 1 || a.dir.axis < 0 || a.dir.axis >= grid.rank() ||
        (a.dir.sign != 1 && a.dir.sign != -1)) {
        throw Error(ErrorKind::InvalidAction, "malformed action " + a.name());
    }
    DiscretizedAction d{start, a, {}};
    const Cell step = a.dir.step();
    Config q = start;
    for (int i = 0; i < a.length; ++i) {
        q.cell = q.cell + step;
        if (!footprint_fits(grid, q, shape)) break;
        d.waypoints.push_back(q);
    }
    if (d.waypoints.empty()) {
        throw Error(ErrorKind::InvalidAction, "action " + a.name() + " leaves the grid immediately");
    }
    d.spec.length = d.steps();
    return d;
}

inline VoxelSet probe_voxels(const GridWorkspace& grid, const Config& q, const ProbeShape& shape) {
    VoxelSet s(grid.size());
    for (const auto& o : shape.offsets) {
        const Cell c = q.cell + o;
        if (!grid.contains(c)) throw Error(ErrorKind::InvalidAction, "probe footprint leaves the grid");
        s.insert(grid.index(c));
    }
    return s;
}

/// Union of the footprints at q_1..q_upto.
inline VoxelSet swept_prefix(const GridWorkspace& grid, const DiscretizedAction& action,
                             const ProbeShape& shape, int upto) {
    VoxelSet s(grid.size());
    for (int k = 1; k <= upto; ++k) {
        for (const auto& o : shape.offsets) s.insert(grid.index(action.at(k).cell + o));
    }
    return s;
}

inline VoxelSet swept_voxels(const GridWorkspace& grid, const DiscretizedAction& action,
                             const ProbeShape& shape) {
    return swept_prefix(grid, action, shape, action.steps());
}

/// Cells the probe at q would enter with one more step along dir. A blocked
/// step means the target occupies at least one of them.
inline VoxelSet contact_surface(const GridWorkspace& grid, const Config& q, const Direction& dir,
                                const ProbeShape& shape) {
    const VoxelSet footprint = probe_voxels(grid, q, shape);
    VoxelSet s(grid.size());
    const Cell step = dir.step();
    for (const auto& o : shape.offsets) {
        const Cell c = q.cell + o + step;
        if (!grid.contains(c)) continue;
        const auto idx = grid.index(c);
        if (!footprint.contains(idx)) s.insert(idx);
    }
    if (s.empty()) throw Error(ErrorKind::EmptySurface, "leading face is outside the grid");
    return s;
}

/// Offsets within Euclidean distance `radius` of the origin, restricted to the grid's rank.
inline std::vector<Cell> ball_offsets(int rank, double radius) {
    const int r = static_cast<int>(std::floor(radius + 1e-9));
    const double r2 = radius * radius + 1e-9;
    std::vector<Cell> out;
    const int rz = rank == 3 ? r : 0;
    for (int z = -rz; z <= rz; ++z)
        for (int y = -r; y <= r; ++y)
            for (int x = -r; x <= r; ++x)
                if (double(x) * x + double(y) * y + double(z) * z <= r2) out.push_back({x, y, z});
    return out;
}

/// All cells farther than d_max from every cell of surface.
inline VoxelSet elimination_set(const GridWorkspace& grid, const VoxelSet& surface, double d_max) {
    VoxelSet near(grid.size());
    const auto ball = ball_offsets(grid.rank(), d_max);
    surface.for_each([&](std::size_t i) {
        const Cell c = grid.cell(i);
        for (const auto& o : ball) {
            const Cell n = c + o;
            if (grid.contains(n)) near.insert(grid.index(n));
        }
    });
    return near.complement();
}

/// Minimum center-to-center Euclidean distance between two voxel sets.
inline double set_distance(const GridWorkspace& grid, const VoxelSet& a, const VoxelSet& b) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyInput, "set_distance of an empty set");
    if (a.intersects(b)) return 0.0;
    const auto& small = a.count() <= b.count() ? a : b;
    const auto& large = &small == &a ? b : a;
    std::vector<Cell> small_cells;
    small.for_each([&](std::size_t i) { small_cells.push_back(grid.cell(i)); });
    double best = std::numeric_limits<double>::infinity();
    large.for_each([&](std::size_t i) {
        const Cell c = grid.cell(i);
        for (const auto& s : small_cells) best = std::min(best, squared_distance(c, s));
    });
    return std::sqrt(best);
}

}  // namespace touchloc

namespace touchloc {

/// Grid plus probe: the fixed geometry every belief operation runs against.
struct World {
    GridWorkspace grid;
    ProbeShape probe;
};

/// Result of executing one discretized action. `rest` is the index k of the
/// configuration q_k where the probe stopped. A collision at rest k means the
/// step into q_{k+1} was blocked, so k < n; a free motion rests at k = n.
struct Observation {
    bool collision = false;
    int rest = 0;

    friend auto operator<=>(const Observation&, const Observation&) = default;
    std::string name() const {
        return collision ? "collision@" + std::to_string(rest) : "free@" + std::to_string(rest);
    }
};

/// Canonical outcome order: the free outcome first, then collisions by rest index.
inline bool outcome_order_less(const Observation& a, const Observation& b) {
    if (a.collision != b.collision) return !a.collision;
    return a.rest < b.rest;
}

}  // namespace touchloc
