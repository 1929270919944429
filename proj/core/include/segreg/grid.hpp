#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace segreg {

enum class DomainShape { Box, Annulus };

// Description of the domain Omega and the lattice spacing. The lattice itself
// always covers the bounding box of Omega inflated by one unit, so that the
// extension Omega_1 = {dist(x, Omega) < 1} fits with room for the disk kernel.
struct GridSpec {
    int dim = 2;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{1.0, 1.0};
    double h = 0.0;
    DomainShape shape = DomainShape::Box;
    std::array<double, 2> center{0.0, 0.0}; // annulus only
    double r_inner = 0.0;                   // annulus only
    double r_outer = 0.0;                   // annulus only
    // When set, reject domains whose diameter cannot host two supports at
    // distance 1 (diameter must exceed 1 + 2h). Enforced by problem setup for
    // k >= 2; plain field manipulation on small grids stays legal.
    bool require_partition_capacity = false;
};

// Uniform Cartesian lattice with node masks for Omega, Omega_1 and the collar
// Omega_1 \ Omega. Immutable after construction; safe for concurrent reads.
//
// Mask conventions:
//   omega    - closed membership test of the node position in Omega
//   interior - strictly inside Omega by at least h/2 (the solver's DOFs)
//   omega1   - node within distance < 1 - h/2 of some Omega node (or in Omega)
//   collar   - omega1 && !omega (Dirichlet data f_i live here)
class Grid {
public:
    GridSpec spec;
    int dim = 2;
    double h = 0.0;
    std::array<int, 2> n{0, 1};         // lattice nodes per axis; n[1] == 1 in 1D
    std::array<double, 2> origin{0, 0}; // position of node (0, 0)

    std::vector<std::uint8_t> omega;
    std::vector<std::uint8_t> omega1;
    std::vector<std::uint8_t> collar;
    std::vector<std::uint8_t> interior;

    // Edges between two non-interior nodes whose dual cell still meets Omega
    // ("skin" edges). Each entry is (linear index of the lower node, fraction
    // of the dual cell inside Omega). Used by the Dirichlet energy only.
    std::vector<std::pair<int, double>> skin_edges_x;
    std::vector<std::pair<int, double>> skin_edges_y;

    int nodes() const { return n[0] * n[1]; }
    int index(int ix, int iy) const { return ix + n[0] * iy; }
    double x(int ix) const { return origin[0] + ix * h; }
    double y(int iy) const { return origin[1] + iy * h; }
    std::array<double, 2> pos(int idx) const {
        return {x(idx % n[0]), y(idx / n[0])};
    }
    bool in_lattice(int ix, int iy) const {
        return ix >= 0 && ix < n[0] && iy >= 0 && iy < n[1];
    }

    // Analytic closed-membership test of a point in Omega.
    bool inside_omega(double px, double py) const;
    // Strict membership with a positive margin to the boundary.
    bool strictly_inside_omega(double px, double py, double margin) const;
    // Euclidean diameter of Omega (box diagonal, or annulus outer diameter).
    double diameter() const;
};

// Builds the lattice, the membership masks, the Omega_1 extension and the
// skin-edge weights. Throws InvalidInput on h <= 0, intervals shorter than
// 2h, degenerate annuli, or (when requested) insufficient diameter.
Grid build_grid(const GridSpec& spec);

// 1D and 2D box conveniences.
Grid build_grid(double xlo, double xhi, double h);
Grid build_grid(std::array<double, 2> lo, std::array<double, 2> hi, double h);

// Exact Euclidean distance (in physical units) from every lattice node to the
// nearest node of `mask`. Nodes of the set get 0. Empty set -> all entries
// are +infinity. Felzenszwalb-Huttenlocher transform, O(nodes).
std::vector<double> distance_to_set(const Grid& g, const std::vector<std::uint8_t>& mask);

// inf{|x - y| : x in a, y in b} over lattice nodes. Exact. Empty input yields
// the distinguished "undefined distance" result (nullopt).
std::optional<double> dist_between_masks(const Grid& g,
                                         const std::vector<std::uint8_t>& a,
                                         const std::vector<std::uint8_t>& b);

// Removes from `mask` every node within graph distance `rings` of its
// complement (4-neighborhood erosion, applied `rings` times).
std::vector<std::uint8_t> erode_mask(const Grid& g, const std::vector<std::uint8_t>& mask, int rings);

inline bool mask_empty(const std::vector<std::uint8_t>& m) {
    for (auto v : m)
        if (v) return false;
    return true;
}

} // namespace segreg
