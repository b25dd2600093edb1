#ifndef SMFKIT_METRICS_HPP
#define SMFKIT_METRICS_HPP

#include "smfkit/czono.hpp"

namespace smfkit {

// unit directions used for support sampling: uniform angles in 2-D, seeded
// uniform-on-sphere samples otherwise
struct DirectionGrid {
    std::size_t dimension = 0;
    std::vector<Vec> directions;

    static DirectionGrid make(std::size_t dimension, std::size_t count,
                              std::uint64_t seed = 2024);
};

// max over the grid of |support(z1, d) - support(z2, d)|; a guaranteed lower
// bound of the Hausdorff distance between bounded convex sets
double hausdorff_lower(const CZono& z1, const CZono& z2, const DirectionGrid& grid);

// max distance from x_true to the 2n face hyperplanes of the interval hull
struct GapBound {
    double bound = 0.0;
    bool contains = false;  // whether x_true lies inside the hull
};
GapBound gap_bound_to_state(const CZono& z, const Vec& x_true);
GapBound gap_bound_to_state(const Box& hull, const Vec& x_true);

// Euclidean / max-edge diameter of the interval hull
double diameter_hull(const CZono& z);
double diameter_inf_hull(const CZono& z);

// max directional width over the grid: a sampled lower bound of the true set
// diameter sup |s - s'| (tight as the grid refines); +inf when unbounded
double diameter_support(const CZono& z, const DirectionGrid& grid);

}  // namespace smfkit

#endif
