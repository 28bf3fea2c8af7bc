#ifndef QWIRE_BRANCH_HPP
#define QWIRE_BRANCH_HPP

#include <vector>

#include "qwire/trajectory.hpp"

namespace qwire {

enum class BranchLabel { in, out, other };

// One complex-trajectory solution reaching a real observation point.
struct Branch {
    Cx y0;
    Cx t;
    Cx action;    // total phase: launch phase W0(y0) plus the flow action
    Cx vanvleck;  // transport amplitude, Maslov phase included
    int maslov = 0;
    double residual = 0.0;
    double cond = 0.0;  // endpoint-Jacobian condition number
    Cx detj;
    double track_phase = 0.0;  // accumulated arg det J along the time segment
    bool admitted = false;     // recessive/bounded and forward in time
    bool recessive = false;
    bool forward = false;
    bool cut_flag = false;
    int id = -1;  // continuation identity, -1 when standalone
};

struct BranchSet {
    double x = 0.0, y = 0.0;
    std::vector<Branch> branches;  // ascending Im(action)
    int failed_seeds = 0;
    double worst_cond = 0.0;
};

struct SolveOptions {
    double tol = 1e-10;           // endpoint residual, units hbar = m = D0 = 1
    int max_iter = 50;
    double dedup_tol = 1e-8;      // in scaled (y0/a, t/tscale) coordinates
    double cond_limit = 1e8;      // step damping / caustic-proximity report
    int cloud_seeds = 64;
    double admit_slack = 1e-3;    // Im(action)/hbar >= -slack
    double forward_slack = 0.15;  // Re t >= -slack * tscale
    unsigned long seed = 1;
    double box_scale = 1.0;       // inflate the default search box
};

// Search region in (y0, t) used by seeding, runaway guards and the
// brute-force enumeration.
struct SeedBox {
    double y0r_min, y0r_max, y0i_min, y0i_max;
    double tr_min, tr_max, ti_min, ti_max;

    static SeedBox for_point(const Flow& flow, double x, double y, double scale = 1.0);
    bool contains(Cx y0, Cx t, double margin) const;
};

// Natural scales for deduplication metrics.
struct BranchScales {
    double y0;  // impurity width a
    double t;   // hbar kappa(0) / eps
    static BranchScales of(const Flow& flow);
};

// Newton iteration on the endpoint equations with the analytic Jacobian.
// Returns true on convergence; (y0, t) are updated in place.
bool newton_polish(const Flow& flow, double xo, double yo, Cx& y0, Cx& t,
                   const SolveOptions& opt, const SeedBox& box, double& res_out,
                   double& cond_out);

// Closed-form beta = 0 style seeds for an observation point (uses the
// profile constants at the impurity center and far away).
std::vector<std::pair<Cx, Cx>> closed_form_seeds(const Flow& flow, double x, double y);

// Assemble the full branch record (phase, transport amplitude, Maslov
// count, admissibility) for a converged root.
Branch make_branch(const Flow& flow, double xo, double yo, Cx y0, Cx t,
                   const SolveOptions& opt);

// Solve the two-point problem at one observation point from the default
// seed battery plus optional extra seeds.
BranchSet solve_point(const Flow& flow, double x, double y, const SolveOptions& opt,
                      const std::vector<std::pair<Cx, Cx>>& extra_seeds = {});

// Dense quasi-random enumeration over the seed box: no continuation, no
// admissibility filter; used to certify seed independence.
BranchSet brute_force_branches(const Flow& flow, double x, double y, int n_seeds,
                               const SolveOptions& opt);

// true when the two roots coincide in scaled coordinates
bool same_root(const BranchScales& sc, Cx y01, Cx t1, Cx y02, Cx t2, double tol);

void sort_branchset(BranchSet& bs);

}  // namespace qwire

#endif
