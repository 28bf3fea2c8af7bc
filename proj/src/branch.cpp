#include "qwire/branch.hpp"

#include <algorithm>
#include <cmath>

#include "qwire/halton.hpp"

namespace qwire {

namespace {

double cond2x2(const EndpointJet& j) {
    const double t1 = std::norm(j.dx_dy0) + std::norm(j.dx_dt) + std::norm(j.dy_dy0) +
                      std::norm(j.dy_dt);
    const double dd = std::norm(j.det);
    if (dd == 0.0) return 1e300;
    const double smax2 = 0.5 * (t1 + std::sqrt(std::max(0.0, t1 * t1 - 4.0 * dd)));
    return smax2 / std::sqrt(dd);
}

}  // namespace

BranchScales BranchScales::of(const Flow& flow) {
    const ModelParams& p = flow.params();
    const double hk0 = flow.profile().decay_momentum_real(0.0);
    return {p.impurity_width, hk0 / p.field};
}

SeedBox SeedBox::for_point(const Flow& flow, double x, double y, double scale) {
    const ModelParams& p = flow.params();
    const Profile& prof = flow.profile();
    const double a = p.impurity_width;
    const double hk0 = prof.decay_momentum_real(0.0);
    const double py0 = prof.channel_momentum_real(0.0);
    const double tscale = hk0 / p.field;
    const double tmax = (std::sqrt(std::max(0.0, 2.0 * p.mass * p.field * x)) + 2.0 * hk0) /
                        p.field;
    const double yimax = scale * std::max(1.6 * py0 * tscale / p.mass, 2.0 * a);
    const double lr = scale * std::max(4.0 * a, 1.3 * py0 * tmax / p.mass);
    SeedBox b;
    b.y0r_min = y - lr;
    b.y0r_max = y + lr;
    b.y0i_min = -0.35 * yimax;
    b.y0i_max = yimax;
    b.tr_min = -0.25 * scale * tmax;
    b.tr_max = scale * tmax;
    b.ti_min = -1.8 * scale * tscale;
    b.ti_max = 0.35 * scale * tscale;
    return b;
}

bool SeedBox::contains(Cx y0, Cx t, double margin) const {
    const double my = margin * (y0r_max - y0r_min);
    const double myi = margin * (y0i_max - y0i_min);
    const double mtr = margin * (tr_max - tr_min);
    const double mti = margin * (ti_max - ti_min);
    return y0.real() > y0r_min - my && y0.real() < y0r_max + my && y0.imag() > y0i_min - myi &&
           y0.imag() < y0i_max + myi && t.real() > tr_min - mtr && t.real() < tr_max + mtr &&
           t.imag() > ti_min - mti && t.imag() < ti_max + mti;
}

bool same_root(const BranchScales& sc, Cx y01, Cx t1, Cx y02, Cx t2, double tol) {
    const double d = std::abs((y01 - y02) / sc.y0) + std::abs((t1 - t2) / sc.t);
    return d < tol;
}

bool newton_polish(const Flow& flow, double xo, double yo, Cx& y0, Cx& t,
                   const SolveOptions& opt, const SeedBox& box, double& res_out,
                   double& cond_out) {
    const double scale = 1.0 + std::abs(xo) + std::abs(yo);
    double res = 1e300;
    cond_out = 0.0;
    int stalls = 0;
    for (int it = 0; it < opt.max_iter; ++it) {
        const EndpointJet j = flow.endpoint(y0, t);
        const Cx r1 = j.x - xo, r2 = j.y - yo;
        res = std::abs(r1) + std::abs(r2);
        cond_out = cond2x2(j);
        if (res <= opt.tol * scale) {
            res_out = res;
            return true;
        }
        if (std::abs(j.det) == 0.0) return false;
        Cx dy0 = (j.dx_dt * r2 - j.dy_dt * r1) / j.det;
        Cx dt = (j.dy_dy0 * r1 - j.dx_dy0 * r2) / j.det;
        double damp = 1.0;
        if (cond_out > opt.cond_limit) damp = 0.5;
        // backtracking on the residual
        bool ok = false;
        for (int bt = 0; bt < 8; ++bt) {
            const Cx ny0 = y0 + damp * dy0;
            const Cx nt = t + damp * dt;
            const EndpointJet jn = flow.endpoint(ny0, nt);
            const double nres = std::abs(jn.x - xo) + std::abs(jn.y - yo);
            if (nres < res) {
                y0 = ny0;
                t = nt;
                ok = true;
                break;
            }
            damp *= 0.5;
        }
        if (!ok) {
            if (++stalls >= 3) return false;
            y0 += damp * dy0;
            t += damp * dt;
        }
        if (!box.contains(y0, t, 0.75)) return false;
    }
    res_out = res;
    return res <= opt.tol * scale;
}

std::vector<std::pair<Cx, Cx>> closed_form_seeds(const Flow& flow, double x, double y) {
    const ModelParams& p = flow.params();
    const Profile& prof = flow.profile();
    std::vector<std::pair<Cx, Cx>> seeds;
    for (double yc : {prof.y_far(), 0.0}) {
        const double hk = prof.decay_momentum_real(yc);
        const double py = prof.channel_momentum_real(yc);
        const Cx px0(0.0, hk);
        const Cx disc = std::sqrt(px0 * px0 + 2.0 * p.mass * p.field * x);
        for (int sgn : {+1, -1}) {
            const Cx t = (-px0 + double(sgn) * disc) / p.field;
            const Cx y0 = y - py * t / p.mass;
            seeds.emplace_back(y0, t);
        }
    }
    return seeds;
}

Branch make_branch(const Flow& flow, double xo, double yo, Cx y0, Cx t,
                   const SolveOptions& opt) {
    const ModelParams& p = flow.params();
    const double m = p.mass, eps = p.field;
    Branch b;
    b.y0 = y0;
    b.t = t;

    const LaunchState ls = flow.launch(y0);
    const EndpointJet j = flow.endpoint(ls, t);
    b.residual = std::abs(j.x - xo) + std::abs(j.y - yo);
    b.cond = cond2x2(j);
    b.detj = j.det;
    b.cut_flag = ls.cs.cut_crossed;

    b.action = flow.total_phase(ls, t);

    // det J along the launch segment 0 -> t is a quadratic in time; the
    // amplitude phase follows its continuously tracked argument.
    const Cx A = -eps * ls.cs.pyp / (m * m);
    const Cx B = (ls.cs.pxp * ls.py0 - ls.px0 * ls.cs.pyp) / (m * m) - eps / m;
    const Cx C = -ls.px0 / m;
    double dtheta = 0.0;
    const double qscale = std::abs(A) * std::norm(t) + std::abs(B) * std::abs(t);
    auto seg_arg = [&](Cx root) {
        // continuous arg change of (tau - root) for tau: 0 -> t (straight
        // segment subtends less than pi)
        return std::arg((t - root) / (-root));
    };
    if (std::abs(A) * std::norm(t) > 1e-14 * (qscale + std::abs(C))) {
        const Cx disc = std::sqrt(B * B - 4.0 * A * C);
        const Cx r1 = (-B + disc) / (2.0 * A);
        const Cx r2 = (-B - disc) / (2.0 * A);
        dtheta = seg_arg(r1) + seg_arg(r2);
    } else if (std::abs(B) * std::abs(t) > 1e-14 * std::abs(C)) {
        dtheta = seg_arg(-C / B);
    }
    b.track_phase = std::arg(C) + dtheta;
    b.maslov = int(std::lround(std::abs(dtheta) / M_PI));

    const double mag = std::sqrt(std::abs(C) / std::abs(j.det));
    b.vanvleck = ls.cs.amp0 * mag * std::exp(Cx(0.0, -0.5 * dtheta));

    const double tscale = BranchScales::of(flow).t;
    b.recessive = b.action.imag() / p.hbar >= -opt.admit_slack;
    b.forward = t.real() >= -opt.forward_slack * tscale;
    b.admitted = b.recessive && b.forward;
    return b;
}

void sort_branchset(BranchSet& bs) {
    std::sort(bs.branches.begin(), bs.branches.end(), [](const Branch& a, const Branch& b) {
        if (a.action.imag() != b.action.imag()) return a.action.imag() < b.action.imag();
        if (a.action.real() != b.action.real()) return a.action.real() < b.action.real();
        return a.y0.real() < b.y0.real();
    });
}

namespace {

BranchSet solve_from_seeds(const Flow& flow, double x, double y,
                           const std::vector<std::pair<Cx, Cx>>& seeds, const SolveOptions& opt,
                           const SeedBox& box) {
    const BranchScales sc = BranchScales::of(flow);
    BranchSet bs;
    bs.x = x;
    bs.y = y;
    std::vector<std::pair<Cx, Cx>> roots;
    for (const auto& [sy0, st] : seeds) {
        Cx y0 = sy0, t = st;
        double res, cond;
        if (!newton_polish(flow, x, y, y0, t, opt, box, res, cond)) {
            ++bs.failed_seeds;
            continue;
        }
        bool dup = false;
        for (auto& [ry0, rt] : roots)
            if (same_root(sc, y0, t, ry0, rt, opt.dedup_tol)) {
                dup = true;
                break;
            }
        if (!dup) roots.emplace_back(y0, t);
    }
    for (auto& [y0, t] : roots) {
        bs.branches.push_back(make_branch(flow, x, y, y0, t, opt));
        bs.worst_cond = std::max(bs.worst_cond, bs.branches.back().cond);
    }
    sort_branchset(bs);
    for (size_t i = 0; i < bs.branches.size(); ++i) bs.branches[i].id = int(i);
    return bs;
}

}  // namespace

BranchSet solve_point(const Flow& flow, double x, double y, const SolveOptions& opt,
                      const std::vector<std::pair<Cx, Cx>>& extra_seeds) {
    const SeedBox box = SeedBox::for_point(flow, x, y, opt.box_scale);
    std::vector<std::pair<Cx, Cx>> seeds = closed_form_seeds(flow, x, y);
    for (const auto& s : extra_seeds) seeds.push_back(s);
    Halton4 h4(opt.seed);
    double u[4];
    for (int i = 0; i < opt.cloud_seeds; ++i) {
        h4.get(i + 1, u);
        seeds.emplace_back(Cx(box.y0r_min + u[0] * (box.y0r_max - box.y0r_min),
                              box.y0i_min + u[1] * (box.y0i_max - box.y0i_min)),
                           Cx(box.tr_min + u[2] * (box.tr_max - box.tr_min),
                              box.ti_min + u[3] * (box.ti_max - box.ti_min)));
    }
    return solve_from_seeds(flow, x, y, seeds, opt, box);
}

BranchSet brute_force_branches(const Flow& flow, double x, double y, int n_seeds,
                               const SolveOptions& opt) {
    const SeedBox box = SeedBox::for_point(flow, x, y, opt.box_scale);
    std::vector<std::pair<Cx, Cx>> seeds;
    seeds.reserve(size_t(n_seeds));
    Halton4 h4(opt.seed + 77);
    double u[4];
    for (int i = 0; i < n_seeds; ++i) {
        h4.get(i + 1, u);
        seeds.emplace_back(Cx(box.y0r_min + u[0] * (box.y0r_max - box.y0r_min),
                              box.y0i_min + u[1] * (box.y0i_max - box.y0i_min)),
                           Cx(box.tr_min + u[2] * (box.tr_max - box.tr_min),
                              box.ti_min + u[3] * (box.ti_max - box.ti_min)));
    }
    return solve_from_seeds(flow, x, y, seeds, opt, box);
}

}  // namespace qwire
