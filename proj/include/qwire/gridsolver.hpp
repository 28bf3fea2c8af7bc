#ifndef QWIRE_GRIDSOLVER_HPP
#define QWIRE_GRIDSOLVER_HPP

#include <string>
#include <vector>

#include "qwire/profile.hpp"

namespace qwire {

struct GridSpec {
    int nx = 200;           // interior x points (x = 0 and x = xmax are boundaries)
    int ny = 161;           // y points including both ends
    double xmax = 0.0;      // 0 = auto: 2.6 * turning length
    double ymax = 0.0;      // 0 = auto: 8 * impurity width
    double cap_width = 0.0;     // 0 = auto (cap mode only): 0.30 * xmax
    double cap_strength = 0.0;  // 0 = auto
    std::string xbc = "airy";       // "airy" outgoing Robin | "cap" absorber
    std::string ybc = "radiation";  // "radiation" | "absorbing"
};

// Direct solution of the stationary wave equation at fixed energy E with
// channel inflow at x = 0 and outgoing/absorbing far boundaries.
struct GridSolution {
    GridSpec spec;
    double hx = 0.0, hy = 0.0;
    std::vector<double> xs;  // interior x grid (size nx)
    std::vector<double> ys;  // y grid (size ny)
    std::vector<Cx> psi;     // [iy * nx + ix]
    double residual = 0.0;   // discrete-equation residual, relative
    double floor = 0.0;      // smallest trustworthy |psi|
    std::string precision = "double";

    Cx at(int ix, int iy) const { return psi[size_t(iy) * xs.size() + ix]; }
};

struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// precision: "double" or "ext:<decimal digits>"
GridSolution solve_stationary_2d(const Profile& prof, const GridSpec& spec,
                                 const std::string& precision = "double");

// Interior conservation check: largest discrete current divergence over
// interior cells, relative to the peak current.
double discrete_flux_divergence(const GridSolution& g, const ModelParams& p);

// Net X-current of a solution column at fixed x index, sum over y.
double net_x_current(const GridSolution& g, const ModelParams& p, int ix);

}  // namespace qwire

#endif
