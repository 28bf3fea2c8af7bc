#include "qwire/fieldmap.hpp"

#include <algorithm>
#include <cmath>

#include "qwire/airy.hpp"

namespace qwire {

namespace {

double wrap2pi(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

const Branch* find_id(const BranchSet& bs, int id) {
    for (const Branch& b : bs.branches)
        if (b.id == id) return &b;
    return nullptr;
}

Cx naive_sum(const BranchSet& bs, double hbar, const std::vector<int>& skip_ids) {
    Cx acc = 0.0;
    for (const Branch& b : bs.branches) {
        if (!b.admitted) continue;
        bool skip = false;
        for (int id : skip_ids)
            if (b.id == id) skip = true;
        if (skip) continue;
        acc += b.vanvleck * std::exp(Cx(0.0, 1.0) * b.action / hbar);
    }
    return acc;
}

struct PairTrack {
    int id1 = -1, id2 = -1;
    bool active = false;
    double sigma = 0.0;           // extra relative phase on branch 2
    std::vector<double> theta;    // tracked arg(phi2 - phi1) per grid point
    std::vector<uint8_t> usable;  // both members present and sheet resolved
    std::vector<Cx> lambda;       // outer-solution matching factor
};

}  // namespace

Cx uniform_pair(Cx phi1, Cx amp1, Cx phi2, Cx amp2, double theta, double hbar,
                double extra_rel_phase) {
    const Cx a2 = amp2 * std::polar(1.0, extra_rel_phase);
    const Cx chi = 0.5 * (phi1 + phi2);
    const double mag = std::max(std::abs(phi2 - phi1), 1e-14);
    const double zm = std::pow(3.0 * mag / (4.0 * hbar), 2.0 / 3.0);
    const Cx zeta = std::polar(zm, 2.0 * theta / 3.0);
    const Cx z14 = std::polar(std::pow(zm, 0.25), theta / 6.0);
    Cx ai, aip;
    airy_complex(-zeta, ai, aip);
    const Cx em = std::polar(1.0, -M_PI / 4.0);
    const Cx ep = std::polar(1.0, M_PI / 4.0);
    const Cx P = amp1 * em + a2 * ep;
    const Cx Mm = amp1 * em - a2 * ep;
    const Cx phase = std::exp(Cx(0.0, 1.0) * chi / hbar);
    return std::sqrt(M_PI) * phase * (z14 * P * ai - Cx(0.0, 1.0) * (Mm / z14) * aip);
}

namespace {

// Anchor-fit the pair's Airy-argument sheet and phase convention against
// the admitted branch sum, then track theta along the column. Crossing a
// fold, arg(phi2 - phi1) jumps by 3 pi/2, so the column is split into
// segments at the |dPhi| minima and each segment gets its own sheet.
void setup_pair(const ColumnResult& col, PairTrack& pt, double hbar, double zeta_min,
                int& ambiguities) {
    const int n = int(col.sets.size());
    pt.theta.assign(n, 0.0);
    pt.usable.assign(n, 0);
    pt.lambda.assign(n, Cx(1.0));
    std::vector<uint8_t> have(n, 0);
    std::vector<double> mag(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const Branch* b1 = find_id(col.sets[i], pt.id1);
        const Branch* b2 = find_id(col.sets[i], pt.id2);
        if (b1 && b2) {
            have[i] = 1;
            mag[i] = std::abs(b2->action - b1->action);
        }
    }

    // contiguous runs where both members exist, split at fold crossings
    std::vector<std::pair<int, int>> segs;
    int i = 0;
    while (i < n) {
        if (!have[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && have[j + 1]) ++j;
        // split [i, j] at interior local minima of |dPhi|
        int s = i;
        for (int k = i + 1; k < j; ++k) {
            const bool dip = mag[k] < mag[k - 1] && mag[k] < mag[k + 1] &&
                             mag[k] < 0.2 * std::max(mag[i], mag[j]);
            if (dip) {
                segs.emplace_back(s, k);
                s = k + 1;
            }
        }
        segs.emplace_back(s, j);
        i = j + 1;
    }
    if (segs.empty()) {
        pt.active = false;
        return;
    }

    auto zeta_of = [&](int idx) {
        return std::pow(3.0 * mag[idx] / (4.0 * hbar), 2.0 / 3.0);
    };
    auto pair_val = [&](int q, int swap, double theta, double sg) {
        const Branch* b1 = find_id(col.sets[q], swap ? pt.id2 : pt.id1);
        const Branch* b2 = find_id(col.sets[q], swap ? pt.id1 : pt.id2);
        return uniform_pair(b1->action, b1->vanvleck, b2->action, b2->vanvleck, theta, hbar, sg);
    };
    auto raw_theta = [&](int q, int swap) {
        const Branch* b1 = find_id(col.sets[q], swap ? pt.id2 : pt.id1);
        const Branch* b2 = find_id(col.sets[q], swap ? pt.id1 : pt.id2);
        return std::arg(b2->action - b1->action);
    };

    // anchor picker: the farthest well-separated point of [s0, s1] whose
    // branch sum is not accidentally destructive, plus a check point
    auto pick_anchor = [&](int s0, int s1, int& sa, int& sb) {
        sa = sb = -1;
        for (int q = s1; q >= s0; --q) {
            if (!have[q] || zeta_of(q) < zeta_min) continue;
            const Branch* b1 = find_id(col.sets[q], pt.id1);
            const Branch* b2 = find_id(col.sets[q], pt.id2);
            const double content = std::abs(b1->vanvleck * std::exp(Cx(0, 1) * b1->action / hbar)) +
                                   std::abs(b2->vanvleck * std::exp(Cx(0, 1) * b2->action / hbar));
            if (std::abs(naive_sum(col.sets[q], hbar, {})) < 0.2 * content) continue;
            sa = q;
            break;
        }
        if (sa < 0) return false;
        for (int d : {3, 2, 1}) {
            const int c = std::max(s0, sa - d);
            if (c != sa && have[c]) {
                sb = c;
                break;
            }
        }
        return sb >= 0;
    };

    // global anchor fixes labeling, the relative transport phase and one
    // matching factor to the outer branch sum; a second point
    // discriminates the Airy sheet
    Cx lam_g = 1.0;
    {
        int ga = -1, gb = -1;
        if (!pick_anchor(0, n - 1, ga, gb)) {
            pt.active = false;
            ++ambiguities;
            return;
        }
        double best = 1e300;
        int best_swap = 0;
        double best_sigma = 0.0;
        for (int swap = 0; swap < 2; ++swap) {
            const double tha = raw_theta(ga, swap);
            const double dthb = wrap2pi(raw_theta(gb, swap) - tha);
            for (int k = -1; k <= 1; ++k)
                for (double sg : {0.0, 0.5 * M_PI, M_PI, 1.5 * M_PI}) {
                    const Cx va = pair_val(ga, swap, tha + 2.0 * M_PI * k, sg);
                    const Cx ta = naive_sum(col.sets[ga], hbar, {});
                    if (std::abs(va) == 0.0) continue;
                    const Cx lam = ta / va;
                    if (std::abs(std::log(std::abs(lam))) > 0.45) continue;
                    const Cx vb = pair_val(gb, swap, tha + 2.0 * M_PI * k + dthb, sg);
                    const Cx tb = naive_sum(col.sets[gb], hbar, {});
                    const double err = std::abs(lam * vb - tb) / (std::abs(tb) + 1e-300);
                    if (err < best) {
                        best = err;
                        best_swap = swap;
                        best_sigma = sg;
                        lam_g = lam;
                    }
                }
        }
        if (best > 0.25) {
            pt.active = false;
            ++ambiguities;
            return;
        }
        if (best_swap) std::swap(pt.id1, pt.id2);
        pt.sigma = best_sigma;
    }

    // per-segment sheet selection and theta unwrap
    for (auto [s0, s1] : segs) {
        int sa = -1, sb = -1;
        if (!pick_anchor(s0, s1, sa, sb)) continue;  // fold-hugging segment: naive
        const double tha = raw_theta(sa, 0);
        const double dthb = wrap2pi(raw_theta(sb, 0) - tha);
        double best = 1e300;
        int bk = 0;
        for (int k = -1; k <= 1; ++k) {
            const Cx va = pair_val(sa, 0, tha + 2.0 * M_PI * k, pt.sigma);
            const Cx ta = naive_sum(col.sets[sa], hbar, {});
            const Cx vb = pair_val(sb, 0, tha + 2.0 * M_PI * k + dthb, pt.sigma);
            const Cx tb = naive_sum(col.sets[sb], hbar, {});
            const double err = (std::abs(lam_g * va - ta) + std::abs(lam_g * vb - tb)) /
                               (std::abs(ta) + std::abs(tb) + 1e-300);
            if (err < best) {
                best = err;
                bk = k;
            }
        }
        if (best > 0.25) {
            ++ambiguities;
            continue;
        }
        pt.theta[sa] = tha + 2.0 * M_PI * bk;
        pt.usable[sa] = 1;
        pt.lambda[sa] = lam_g;
        for (int dir : {+1, -1}) {
            double prev = pt.theta[sa];
            for (int q = sa + dir; q >= s0 && q <= s1; q += dir) {
                pt.theta[q] = prev + wrap2pi(raw_theta(q, 0) - prev);
                prev = pt.theta[q];
                pt.usable[q] = 1;
                pt.lambda[q] = lam_g;
            }
        }
    }
    pt.active = true;
}

}  // namespace

DensityField assemble(const Flow& flow, const FieldBranches& fb,
                      std::vector<CausticPoint>& caustics, const AssembleOptions& opt) {
    const ModelParams& p = flow.params();
    const double hbar = p.hbar;
    const int nx = int(fb.xs.size()), ny = int(fb.ys.size());

    DensityField f;
    f.xs = fb.xs;
    f.ys = fb.ys;
    f.psi.assign(size_t(nx) * ny, Cx(0.0));
    f.density.assign(size_t(nx) * ny, 0.0);
    f.branch_count.assign(size_t(nx) * ny, 0);
    f.mask.assign(size_t(nx) * ny, 0);
    f.lobe.assign(size_t(nx) * ny, -1);

    for (int iy = 0; iy < ny; ++iy) {
        const ColumnResult& col = fb.columns[iy];
        std::vector<PairTrack> pairs;
        if (col.in_pair[0] >= 0 && col.in_pair[1] >= 0) {
            PairTrack pt;
            pt.id1 = col.in_pair[0];
            pt.id2 = col.in_pair[1];
            pairs.push_back(pt);
        }
        for (const ColumnResult::Event& ev : col.births) {
            PairTrack pt;
            pt.id1 = ev.id_a;
            pt.id2 = ev.id_b;
            if (pt.id1 >= 0 && pt.id2 >= 0) pairs.push_back(pt);
        }
        for (PairTrack& pt : pairs) setup_pair(col, pt, hbar, opt.zeta_min, f.ambiguities);

        for (int ix = 0; ix < nx; ++ix) {
            const BranchSet& bs = col.sets[ix];
            std::vector<int> consumed;
            Cx acc = 0.0;
            for (PairTrack& pt : pairs) {
                if (!pt.active || !pt.usable[ix]) continue;
                const Branch* b1 = find_id(bs, pt.id1);
                const Branch* b2 = find_id(bs, pt.id2);
                acc += pt.lambda[ix] * uniform_pair(b1->action, b1->vanvleck, b2->action,
                                                    b2->vanvleck, pt.theta[ix], hbar, pt.sigma);
                consumed.push_back(pt.id1);
                consumed.push_back(pt.id2);
            }
            acc += naive_sum(bs, hbar, consumed);
            int cnt = 0;
            for (const Branch& b : bs.branches)
                if (b.admitted) ++cnt;
            const size_t q = size_t(iy) * nx + ix;
            f.psi[q] = acc;
            f.density[q] = std::norm(acc);
            f.branch_count[q] = cnt;
        }
    }

    // exclusion-radius mask
    for (const CausticPoint& cp : caustics) {
        if (cp.type != CausticType::fold || cp.exclusion_radius <= 0.0) continue;
        const double r = opt.mask_factor * cp.exclusion_radius;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const double d = std::hypot(fb.xs[ix] - cp.x, fb.ys[iy] - cp.y);
                if (d < r) {
                    const size_t q = size_t(iy) * nx + ix;
                    if (f.mask[q] == 0) {
                        f.mask[q] = 1;
                        ++f.masked_points;
                    }
                }
            }
    }

    // in/out landmark: the fold whose merging branches are least
    // suppressed; lobes split at its x coordinate
    f.xc = p.depth0 * flow.profile().f_real(0.0) / p.field;
    f.has_out = false;
    double best_im = 1e300;
    for (const CausticPoint& cp : caustics) {
        if (cp.type != CausticType::fold) continue;
        if (cp.x < fb.xs.front() || cp.x > fb.xs.back()) continue;
        if (cp.y < fb.ys.front() || cp.y > fb.ys.back()) continue;
        // weight by the smallest Im action among branches at the nearest
        // grid point
        int ix = int(std::lower_bound(fb.xs.begin(), fb.xs.end(), cp.x) - fb.xs.begin());
        int iy = int(std::lower_bound(fb.ys.begin(), fb.ys.end(), cp.y) - fb.ys.begin());
        ix = std::clamp(ix, 0, nx - 1);
        iy = std::clamp(iy, 0, ny - 1);
        const BranchSet& bs = fb.columns[iy].sets[ix];
        if (bs.branches.empty()) continue;
        const double im = bs.branches.front().action.imag() / hbar;
        if (im < best_im) {
            best_im = im;
            f.xc = cp.x;
            f.has_out = true;
        }
    }
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const size_t q = size_t(iy) * nx + ix;
            f.lobe[q] = int8_t(f.has_out && fb.xs[ix] >= f.xc ? 1 : 0);
        }
    return f;
}

double amplitude_ratio(const DensityField& f, bool* below_detection) {
    double din = 0.0, dout = 0.0;
    const int nx = f.nx(), ny = int(f.ys.size());
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const size_t q = size_t(iy) * nx + ix;
            if (f.mask[q]) continue;
            if (f.lobe[q] == 1)
                dout = std::max(dout, f.density[q]);
            else
                din = std::max(din, f.density[q]);
        }
    if (below_detection) *below_detection = !f.has_out;
    if (!f.has_out || din <= 0.0) return 0.0;
    return std::sqrt(dout / din);
}

FieldRun run_field_once(const ModelParams& p, const ScanGrid& grid, const SolveOptions& sopt,
                        unsigned long seed) {
    FieldRun out;
    Profile prof(p);
    Flow flow(prof);

    CausticSearchOptions co;
    co.seed = seed;
    co.starts = 800;
    const double xt = p.depth0 * prof.f_real(0.0) / p.field;
    co.x_min = 0.0;
    co.x_max = grid.x_factor * xt;
    co.y_min = -grid.y_factor * p.impurity_width;
    co.y_max = grid.y_factor * p.impurity_width;
    out.caustics = find_piercings(flow, co);
    for (CausticPoint& cp : out.caustics)
        if (cp.type == CausticType::fold) caustic_exclusion_radius(flow, cp, sopt);

    std::vector<double> xs(grid.nx), ys(grid.ny);
    for (int i = 0; i < grid.nx; ++i)
        xs[i] = (i + 1) * grid.x_factor * xt / (grid.nx + 1);
    for (int j = 0; j < grid.ny; ++j)
        ys[j] = -grid.y_factor * p.impurity_width +
                j * 2.0 * grid.y_factor * p.impurity_width / (grid.ny - 1);

    ContinuationOptions copt;
    copt.solve = sopt;
    copt.solve.seed = seed;
    copt.threads = grid.threads;
    out.branches = continue_field(flow, xs, ys, copt);

    AssembleOptions aopt;
    out.field = assemble(flow, out.branches, out.caustics, aopt);
    return out;
}

ScanResult critical_field_scan(ModelParams base, double eps_min, double eps_max, int steps,
                               const ScanGrid& grid, const SolveOptions& sopt,
                               unsigned long seed) {
    ScanResult res;
    auto ratio_at = [&](double eps) {
        ModelParams p = base;
        p.field = eps;
        FieldRun fr = run_field_once(p, grid, sopt, seed);
        return amplitude_ratio(fr.field);
    };
    double prev_eps = 0.0, prev_r = -1.0;
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double eps = eps_min + (eps_max - eps_min) * i / double(steps - 1);
        ModelParams p = base;
        p.field = eps;
        const double r = ratio_at(eps);
        res.rows.push_back({eps, r, p.wkb_log_transmission()});
        res.max_ratio = std::max(res.max_ratio, r);
        if (prev_r >= 0.0 && r < prev_r - 1e-3) res.monotone = false;
        if (!res.found_crossing && prev_r >= 0.0 && prev_r < 1.0 && r >= 1.0) {
            res.found_crossing = true;
            lo = prev_eps;
            hi = eps;
        }
        prev_eps = eps;
        prev_r = r;
    }
    if (res.found_crossing) {
        for (int it = 0; it < 20 && (hi - lo) > 1e-3 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (ratio_at(mid) >= 1.0)
                hi = mid;
            else
                lo = mid;
        }
        res.eps_star = 0.5 * (lo + hi);
        ModelParams p = base;
        p.field = res.eps_star;
        res.transmission_at_star = std::exp(-p.wkb_log_transmission());
    }
    return res;
}

RidgeFit fit_out_ridge(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::vector<double>& density, double xc, double y_halfwidth) {
    RidgeFit fit;
    const int nx = int(xs.size()), ny = int(ys.size());
    // peak density over the out zone, for the inclusion floor
    double peak = 0.0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            if (xs[ix] >= xc) peak = std::max(peak, density[size_t(iy) * nx + ix]);
    if (peak <= 0.0) return fit;

    std::vector<double> ry, rx;
    for (int iy = 0; iy < ny; ++iy) {
        if (std::abs(ys[iy]) > y_halfwidth) continue;
        double best = 0.0;
        int bix = -1;
        for (int ix = 0; ix < nx; ++ix) {
            if (xs[ix] < xc) continue;
            const double d = density[size_t(iy) * nx + ix];
            if (d > best) {
                best = d;
                bix = ix;
            }
        }
        if (bix < 1 || bix >= nx - 1 || best < 0.05 * peak) continue;
        // parabolic sub-cell refinement of the ridge position
        const double dm = density[size_t(iy) * nx + bix - 1];
        const double dp = density[size_t(iy) * nx + bix + 1];
        const double den = dm - 2.0 * best + dp;
        double xr = xs[bix];
        if (den < 0.0) xr += 0.5 * (dm - dp) / den * (xs[1] - xs[0]);
        ry.push_back(ys[iy]);
        rx.push_back(xr);
    }
    if (ry.size() < 5) return fit;

    // least squares x = c0 + c1 y + c2 y^2
    double s[5] = {0, 0, 0, 0, 0}, t0 = 0, t1 = 0, t2 = 0;
    for (size_t i = 0; i < ry.size(); ++i) {
        const double y = ry[i], w = 1.0;
        s[0] += w;
        s[1] += w * y;
        s[2] += w * y * y;
        s[3] += w * y * y * y;
        s[4] += w * y * y * y * y;
        t0 += w * rx[i];
        t1 += w * rx[i] * y;
        t2 += w * rx[i] * y * y;
    }
    double A[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
    double b[3] = {t0, t1, t2};
    // 3x3 gaussian elimination
    for (int k = 0; k < 3; ++k) {
        int ip = k;
        for (int i = k + 1; i < 3; ++i)
            if (std::abs(A[i][k]) > std::abs(A[ip][k])) ip = i;
        std::swap(A[k], A[ip]);
        std::swap(b[k], b[ip]);
        if (A[k][k] == 0.0) return fit;
        for (int i = k + 1; i < 3; ++i) {
            const double l = A[i][k] / A[k][k];
            for (int j = k; j < 3; ++j) A[i][j] -= l * A[k][j];
            b[i] -= l * b[k];
        }
    }
    double c[3];
    for (int k = 2; k >= 0; --k) {
        double acc = b[k];
        for (int j = k + 1; j < 3; ++j) acc -= A[k][j] * c[j];
        c[k] = acc / A[k][k];
    }
    if (c[2] == 0.0) return fit;
    fit.curvature = c[2];
    fit.y0 = -c[1] / (2.0 * c[2]);
    fit.x0 = c[0] - c[1] * c[1] / (4.0 * c[2]);
    fit.points = int(ry.size());
    fit.ok = true;
    return fit;
}

}  // namespace qwire
