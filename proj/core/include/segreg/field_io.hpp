#pragma once

#include "segreg/energy.hpp"
#include "segreg/contour.hpp"
#include "segreg/free_boundary.hpp"

#include <array>
#include <string>
#include <vector>

namespace segreg {

// Exactly the content of an SGRF dump: lattice geometry plus k components of
// row-major nodal values. Everything the analysis tools consume.
struct FieldSet {
    int dim = 2;
    std::array<int, 2> n{0, 1};
    std::array<double, 2> origin{0, 0};
    double h = 0.0;
    int k = 0;
    std::vector<std::vector<double>> values; // per component

    int nodes() const { return n[0] * n[1]; }
};

FieldSet to_field_set(const DensityVector& state);

// Rebuilds the state on a given grid (the grid lattice must match the dump).
DensityVector from_field_set(const FieldSet& fs, std::shared_ptr<const Grid> grid,
                             ProblemTag tag);

// Recovers the canonical box-hull grid of a dump: the lattice is the domain
// bounding box inflated by ceil(1/h) cells, so the box bounds are implied by
// the header. Non-box domains need their run config for exact masks.
std::shared_ptr<const Grid> grid_from_field_set(const FieldSet& fs);

// SGRF binary format, little endian:
//   "SGRF" | u16 version=1 | u8 dim | u32 n per axis | f64 origin per axis
//   | f64 h | u16 k | k * (n0*n1) f64 row-major values
void write_sgrf(const std::string& path, const FieldSet& fs);
FieldSet read_sgrf(const std::string& path);

// x[,y],value per line
void write_field_csv(const std::string& path, const FieldSet& fs, int comp);
void write_contours_csv(const std::string& path, const std::vector<Polyline>& pls);
// x0x,x0y,nux,nuy,chi,dnu,y0x,y0y,chi_j,dnu_j,lhs,rhs per line
void write_samples_csv(const std::string& path, const std::vector<FreeBoundarySample>& samples);

} // namespace segreg
