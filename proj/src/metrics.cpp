#include "smfkit/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace smfkit {

DirectionGrid DirectionGrid::make(std::size_t dimension, std::size_t count,
                                  std::uint64_t seed) {
    if (dimension == 0 || count == 0) {
        throw std::invalid_argument("DirectionGrid: dimension and count must be positive");
    }
    DirectionGrid grid;
    grid.dimension = dimension;
    grid.directions.reserve(count);
    if (dimension == 1) {
        grid.directions = {{1.0}, {-1.0}};
        return grid;
    }
    if (dimension == 2) {
        for (std::size_t i = 0; i < count; ++i) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / count;
            grid.directions.push_back({std::cos(th), std::sin(th)});
        }
        return grid;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (grid.directions.size() < count) {
        Vec d(dimension);
        for (double& v : d) v = gauss(rng);
        const double nrm = norm_two(d);
        if (nrm < 1e-9) continue;
        grid.directions.push_back((1.0 / nrm) * d);
    }
    return grid;
}

double hausdorff_lower(const CZono& z1, const CZono& z2, const DirectionGrid& grid) {
    if (z1.dim() != grid.dimension || z2.dim() != grid.dimension) {
        throw std::invalid_argument("hausdorff_lower: dimension mismatch");
    }
    double best = 0.0;
    for (const Vec& d : grid.directions) {
        const double s1 = support(z1, d);
        const double s2 = support(z2, d);
        if (!std::isfinite(s1) || !std::isfinite(s2)) {
            throw std::invalid_argument("hausdorff_lower: sets must be bounded");
        }
        best = std::max(best, std::fabs(s1 - s2));
    }
    return best;
}

GapBound gap_bound_to_state(const Box& hull, const Vec& x_true) {
    if (hull.center.size() != x_true.size()) {
        throw std::invalid_argument("gap_bound_to_state: dimension mismatch");
    }
    if (!hull.bounded()) {
        throw std::invalid_argument("gap_bound_to_state: hull must be bounded");
    }
    GapBound out;
    out.contains = true;
    for (std::size_t i = 0; i < x_true.size(); ++i) {
        const double lo = hull.center[i] - hull.half_widths[i];
        const double hi = hull.center[i] + hull.half_widths[i];
        out.bound = std::max({out.bound, std::fabs(x_true[i] - lo), std::fabs(hi - x_true[i])});
        if (x_true[i] < lo - 1e-9 || x_true[i] > hi + 1e-9) out.contains = false;
    }
    return out;
}

GapBound gap_bound_to_state(const CZono& z, const Vec& x_true) {
    return gap_bound_to_state(interval_hull(z), x_true);
}

double diameter_support(const CZono& z, const DirectionGrid& grid) {
    z.validate();
    if (z.dim() != grid.dimension) {
        throw std::invalid_argument("diameter_support: dimension mismatch");
    }
    Vec lower(z.h.size());
    for (std::size_t j = 0; j < z.h.size(); ++j) lower[j] = -z.h[j];
    SimplexSolver solver(z.a, z.b, lower, z.h);
    if (!solver.prepare()) {
        throw std::invalid_argument("diameter_support: set is empty");
    }
    double best = 0.0;
    for (const Vec& d : grid.directions) {
        const Vec gd = z.g.transpose() * d;
        const LpOutcome up = solver.optimize(-1.0 * gd);
        const LpOutcome dn = solver.optimize(gd);
        if (up.status == LpStatus::unbounded || dn.status == LpStatus::unbounded) {
            return std::numeric_limits<double>::infinity();
        }
        best = std::max(best, -up.optimum - dn.optimum);
    }
    return best;
}

double diameter_hull(const CZono& z) { return interval_hull(z).diameter(); }

double diameter_inf_hull(const CZono& z) { return interval_hull(z).diameter_inf(); }

}  // namespace smfkit
