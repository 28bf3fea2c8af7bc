#ifndef QWIRE_CAUSTIC_HPP
#define QWIRE_CAUSTIC_HPP

#include <vector>

#include "qwire/branch.hpp"
#include "qwire/trajectory.hpp"

namespace qwire {

enum class CausticType { fold, degenerate };

// Isolated point where the complexified trajectory family's Jacobian
// vanishes with a real endpoint.
struct CausticPoint {
    double x = 0.0, y = 0.0;
    Cx y0, t;
    CausticType type = CausticType::fold;
    double det_residual = 0.0;   // |det J| at the root
    double endpoint_im = 0.0;    // imaginary part left in the endpoint
    double normal_form = 0.0;    // |F2| scaled fold coefficient
    double cond4 = 0.0;          // isolation measure of the 4x4 system
    double exclusion_radius = 0.0;
    double phase_coeff = 0.0;    // C in dPhi = (2/3) C d^{3/2}
};

struct CausticSearchOptions {
    double x_min = 0.0, x_max = 0.0;  // physical rectangle; 0,0 = auto
    double y_min = 0.0, y_max = 0.0;
    int starts = 1000;
    double tol = 1e-10;
    int max_iter = 60;
    double fold_threshold = 1e-6;
    unsigned long seed = 1;
    double box_scale = 1.2;
};

// Multistart Newton on {Im endpoint = 0, det J = 0}; empty result is a
// valid outcome. Non-isolated zero manifolds (the 1D turning line at
// eta = 0) are reported as degenerate, not folds.
std::vector<CausticPoint> find_piercings(const Flow& flow, const CausticSearchOptions& opt);

// Airy scale of the fold: the distance where the merging branches' phase
// difference reaches hbar. Fitted from branch pairs along a transversal
// ray; also returns the 3/2-power coefficient.
double caustic_exclusion_radius(const Flow& flow, CausticPoint& cp, const SolveOptions& sopt);

}  // namespace qwire

#endif
