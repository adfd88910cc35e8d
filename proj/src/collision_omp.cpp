// OpenMP sweeps: each output node is independent and computed with the same
// per-node arithmetic as the serial reference, so results are bitwise equal
// for any thread count.
#include "collision_detail.hpp"

namespace charkin::detail {

void sweep_grid_omp(const RuleContext& rc, const GridView& phi,
                    const std::vector<GridNodeRef>& nodes, const Complex* psi_zeta,
                    Complex* out) {
    const std::int64_t n = std::int64_t(nodes.size());
    if (rc.exact_bg) {
#pragma omp parallel for schedule(dynamic, 4)
        for (std::int64_t i = 0; i < n; ++i)
            out[i] = grid_rhs_node_bg(rc, phi, nodes[i].xi, psi_zeta);
    } else {
#pragma omp parallel for schedule(dynamic, 4)
        for (std::int64_t i = 0; i < n; ++i) out[i] = grid_rhs_node(rc, phi, nodes[i].xi);
    }
}

void sweep_radial_omp(const RuleContext& rc, const RadialView& phi,
                      const std::vector<double>& radii, double* out) {
    const std::int64_t n = std::int64_t(radii.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) out[i] = radial_rhs_node(rc, phi, radii[i]);
}

}  // namespace charkin::detail
