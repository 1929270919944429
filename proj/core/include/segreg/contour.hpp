#pragma once

#include "segreg/field.hpp"

#include <array>
#include <vector>

namespace segreg {

struct Polyline {
    std::vector<std::array<double, 2>> pts;
    bool closed = false;
    int size() const { return static_cast<int>(pts.size()); }
};

// Marching-squares extraction of the level set {u = eps} (2D only). Vertices
// sit on cell edges via linear interpolation; polylines are oriented so that
// {u > eps} lies on the left of the walking direction. Saddle cells are
// disambiguated by the cell-center average. Empty level set -> empty list.
std::vector<Polyline> extract_contour(const ScalarField& u, double eps);

struct LocalGeometry {
    std::array<double, 2> normal{0, 0}; // outward unit normal (away from {u > eps})
    double curvature = 0.0;             // signed, outward-positive convention
    bool degenerate = false;            // collinear fit, curvature forced to 0
};

// Least-squares parabola in the local chord frame over vertices
// [i - window, i + window]. Open polylines need the full window on both
// sides; closed ones wrap around.
LocalGeometry local_geometry(const Polyline& pl, int vertex, int window);

double polyline_min_distance(const Polyline& pl, std::array<double, 2> p);

} // namespace segreg
