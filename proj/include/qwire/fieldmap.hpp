#ifndef QWIRE_FIELDMAP_HPP
#define QWIRE_FIELDMAP_HPP

#include <vector>

#include "qwire/caustic.hpp"
#include "qwire/continuation.hpp"

namespace qwire {

// Gridded multi-branch wavefunction and density.
struct DensityField {
    std::vector<double> xs, ys;
    std::vector<Cx> psi;             // [iy * nx + ix]
    std::vector<double> density;
    std::vector<int> branch_count;   // admitted branches per point
    std::vector<uint8_t> mask;       // 0 free, 1 inside exclusion radius, 2 unpatchable
    std::vector<int8_t> lobe;        // 0 in, 1 out, -1 none
    double xc = 0.0;                 // in/out landmark
    bool has_out = false;
    int masked_points = 0;
    int unpatchable_points = 0;
    int ambiguities = 0;

    int nx() const { return int(xs.size()); }
    Cx at(int ix, int iy) const { return psi[size_t(iy) * xs.size() + ix]; }
    double dens(int ix, int iy) const { return density[size_t(iy) * xs.size() + ix]; }
};

struct AssembleOptions {
    double mask_factor = 1.5;   // exclusion radius multiplier for the mask
    double zeta_min = 1.0;      // smallest |zeta| for a trustworthy pair anchor
};

// Uniform two-branch (fold) evaluation: actions, transport amplitudes and
// the continuously tracked argument of (phi2 - phi1).
Cx uniform_pair(Cx phi1, Cx amp1, Cx phi2, Cx amp2, double theta, double hbar,
                double extra_rel_phase);

// Sum admitted branches into psi, evaluating identified branch pairs
// through the uniform fold formula (anchored per column, continued in x).
DensityField assemble(const Flow& flow, const FieldBranches& fb,
                      std::vector<CausticPoint>& caustics, const AssembleOptions& opt);

// R = sqrt(peak out density / peak in density); 0 with below_detection
// when no out lobe exists.
double amplitude_ratio(const DensityField& f, bool* below_detection = nullptr);

struct ScanRow {
    double eps;
    double ratio;
    double wkb_exponent;  // -ln T^2 closed form at this field
};

struct ScanResult {
    std::vector<ScanRow> rows;
    bool found_crossing = false;
    double eps_star = 0.0;
    double transmission_at_star = 0.0;
    double max_ratio = 0.0;
    bool monotone = true;  // monitored expectation, reported not asserted
};

struct ScanGrid {
    int nx = 96, ny = 97;
    double x_factor = 2.3;  // x range in units of the turning length
    double y_factor = 5.0;  // y range in units of the impurity width
    int threads = 1;
};

// Field density at the given parameters; shared by the scan and run_field.
struct FieldRun {
    std::vector<CausticPoint> caustics;
    FieldBranches branches;
    DensityField field;
};
FieldRun run_field_once(const ModelParams& p, const ScanGrid& grid, const SolveOptions& sopt,
                        unsigned long seed);

ScanResult critical_field_scan(ModelParams base, double eps_min, double eps_max, int steps,
                               const ScanGrid& grid, const SolveOptions& sopt,
                               unsigned long seed);

// Least-squares parabola x = X0 + q (y - Y0)^2 through the out-lobe ridge.
struct RidgeFit {
    double x0 = 0.0, y0 = 0.0, curvature = 0.0;
    int points = 0;
    bool ok = false;
};
RidgeFit fit_out_ridge(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::vector<double>& density, double xc, double y_halfwidth);

}  // namespace qwire

#endif
