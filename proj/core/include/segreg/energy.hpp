#pragma once

#include "segreg/disk_stencil.hpp"
#include "segreg/field.hpp"

#include <vector>

namespace segreg {

enum class ProblemTag { A, B };

// Cost F(d_1, ..., d_k) = sum_i c_i d_i with c_i > 0. The only cost family
// shipped with tests; anything smoother can be swapped in behind the same
// partial-derivative interface.
struct CostSpec {
    std::vector<double> weights;
    double value(const std::vector<double>& d) const;
    double partial(int i) const;
};

// State of the k densities plus the data that pins them down.
struct DensityVector {
    ProblemTag problem = ProblemTag::A;
    int k = 0;
    std::vector<ScalarField> fields;
    std::vector<ScalarField> dirichlet_data; // problem A: f_i (values at non-interior nodes)
    CostSpec cost;                           // problem B
    bool normalized = false;                 // problem B bookkeeping

    const Grid& grid() const { return *fields.front().grid; }
    std::shared_ptr<const Grid> grid_ptr() const { return fields.front().grid; }
};

struct EnergyBreakdown {
    std::vector<double> dirichlet; // per component, the edge-based |grad u_i|^2 integral
    double penalty = 0.0;          // sum over pairs i<j of the overlap integrals (no beta)
    double beta = 0.0;
    double cost_value = 0.0;       // F(dirichlet), problem B
    double total = 0.0;
};

// Edge-based discrete Dirichlet integral over Omega. Edges incident to an
// interior node carry the full weight h^(dim-2) (this makes the quadratic
// form's Euler-Lagrange operator exactly the 3/5-point Laplacian at interior
// nodes); edges between two fixed nodes contribute the fraction of their dual
// cell inside Omega, so fixed boundary data is counted once and only where it
// intersects Omega.
double dirichlet_energy(const ScalarField& u, int threads = 1);

// Full objective at a given beta. With `strict`, problem B rejects fields
// whose l2 mass strays from 1 by more than 1e-8.
EnergyBreakdown energy(const DensityVector& state, double beta, const DiskStencil& st,
                       int threads = 1, bool strict = false);

// Variant reusing precomputed per-component convolutions Phi_j.
EnergyBreakdown energy_with_phi(const DensityVector& state, double beta,
                                const std::vector<ScalarField>& phi, int threads = 1,
                                bool strict = false);

// L2-representation gradient: at interior nodes
//   A: -2 lap u_i + 2 beta u_i sum_{j != i} Phi_j
//   B: -2 dF/dd_i lap u_i + 2 beta u_i sum_{j != i} Phi_j  (pre tangent projection)
// and 0 at non-interior nodes.
std::vector<ScalarField> gradient(const DensityVector& state, double beta, const DiskStencil& st,
                                  int threads = 1);
void gradient_with_phi(const DensityVector& state, double beta,
                       const std::vector<ScalarField>& phi, std::vector<ScalarField>& out,
                       int threads = 1);

std::vector<ScalarField> convolve_all(const DensityVector& state, const DiskStencil& st,
                                      int threads = 1);

} // namespace segreg
