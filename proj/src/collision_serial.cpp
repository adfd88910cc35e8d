// Serial reference sweeps.  The OpenMP kernels must produce bitwise-identical
// results; tests compare the two directly.
#include "collision_detail.hpp"

namespace charkin::detail {

void sweep_grid_serial(const RuleContext& rc, const GridView& phi,
                       const std::vector<GridNodeRef>& nodes, const Complex* psi_zeta,
                       Complex* out) {
    if (rc.exact_bg) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            out[i] = grid_rhs_node_bg(rc, phi, nodes[i].xi, psi_zeta);
    } else {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            out[i] = grid_rhs_node(rc, phi, nodes[i].xi);
    }
}

void sweep_radial_serial(const RuleContext& rc, const RadialView& phi,
                         const std::vector<double>& radii, double* out) {
    for (std::size_t i = 0; i < radii.size(); ++i)
        out[i] = radial_rhs_node(rc, phi, radii[i]);
}

}  // namespace charkin::detail
