#include "qwire/caustic.hpp"

#include <algorithm>
#include <cmath>

#include "qwire/halton.hpp"

namespace qwire {

namespace {

// dense 4x4 solve with partial pivoting, small enough to keep local
bool solve4(double A[4][4], double b[4]) {
    int perm[4] = {0, 1, 2, 3};
    for (int k = 0; k < 4; ++k) {
        int ip = k;
        double best = std::abs(A[perm[k]][k]);
        for (int i = k + 1; i < 4; ++i)
            if (std::abs(A[perm[i]][k]) > best) {
                best = std::abs(A[perm[i]][k]);
                ip = i;
            }
        if (best == 0.0) return false;
        std::swap(perm[k], perm[ip]);
        for (int i = k + 1; i < 4; ++i) {
            const double l = A[perm[i]][k] / A[perm[k]][k];
            A[perm[i]][k] = 0.0;
            for (int j = k + 1; j < 4; ++j) A[perm[i]][j] -= l * A[perm[k]][j];
            b[perm[i]] -= l * b[perm[k]];
        }
    }
    double x[4];
    for (int k = 3; k >= 0; --k) {
        double s = b[perm[k]];
        for (int j = k + 1; j < 4; ++j) s -= A[perm[k]][j] * x[j];
        x[k] = s / A[perm[k]][k];
    }
    for (int k = 0; k < 4; ++k) b[k] = x[k];
    return true;
}

struct PiercingSystem {
    const Flow* flow;
    double dscale;  // det normalization

    void residual(Cx y0, Cx t, double F[4], EndpointJet& j) const {
        j = flow->endpoint(y0, t);
        F[0] = j.x.imag();
        F[1] = j.y.imag();
        F[2] = j.det.real() / dscale;
        F[3] = j.det.imag() / dscale;
    }

    void jacobian(const EndpointJet& j, double A[4][4]) const {
        auto row_im = [](Cx wy0, Cx wt, double* r) {
            r[0] = wy0.imag();
            r[1] = wy0.real();
            r[2] = wt.imag();
            r[3] = wt.real();
        };
        row_im(j.dx_dy0, j.dx_dt, A[0]);
        row_im(j.dy_dy0, j.dy_dt, A[1]);
        A[2][0] = j.ddet_dy0.real() / dscale;
        A[2][1] = -j.ddet_dy0.imag() / dscale;
        A[2][2] = j.ddet_dt.real() / dscale;
        A[2][3] = -j.ddet_dt.imag() / dscale;
        A[3][0] = j.ddet_dy0.imag() / dscale;
        A[3][1] = j.ddet_dy0.real() / dscale;
        A[3][2] = j.ddet_dt.imag() / dscale;
        A[3][3] = j.ddet_dt.real() / dscale;
    }
};

double norm4(const double F[4]) {
    return std::abs(F[0]) + std::abs(F[1]) + std::abs(F[2]) + std::abs(F[3]);
}

// second derivatives of the endpoint map contracted twice with the
// Jacobian kernel, projected on the left null vector
Cx fold_coefficient(const Flow& flow, Cx y0, Cx t, Cx v1, Cx v2) {
    const ModelParams& p = flow.params();
    const LaunchState ls = flow.launch(y0);
    const double m = p.mass;
    const Cx xx_y0y0 = t * ls.cs.pxpp / m;
    const Cx xx_y0t = ls.cs.pxp / m;
    const Cx xx_tt = p.field / m;
    const Cx yy_y0y0 = t * ls.cs.pypp / m;
    const Cx yy_y0t = ls.cs.pyp / m;
    const Cx d2x = xx_y0y0 * v1 * v1 + 2.0 * xx_y0t * v1 * v2 + xx_tt * v2 * v2;
    const Cx d2y = yy_y0y0 * v1 * v1 + 2.0 * yy_y0t * v1 * v2;
    const EndpointJet j = flow.endpoint(ls, t);
    // left null vector of the singular 2x2 Jacobian
    Cx u1, u2;
    if (std::abs(j.dy_dy0) + std::abs(j.dx_dy0) > std::abs(j.dy_dt) + std::abs(j.dx_dt)) {
        u1 = j.dy_dy0;
        u2 = -j.dx_dy0;
    } else {
        u1 = j.dy_dt;
        u2 = -j.dx_dt;
    }
    const double un = std::abs(u1) + std::abs(u2);
    if (un == 0.0) return 0.0;
    u1 = u1 / un;
    u2 = u2 / un;
    return 0.5 * (u1 * d2x + u2 * d2y);
}

}  // namespace

std::vector<CausticPoint> find_piercings(const Flow& flow, const CausticSearchOptions& opt) {
    const ModelParams& p = flow.params();
    const Profile& prof = flow.profile();
    const double a = p.impurity_width;
    const double hk0 = prof.decay_momentum_real(0.0);
    const double py0c = prof.channel_momentum_real(0.0);
    const double tscale = hk0 / p.field;
    const double xt = p.depth0 * prof.f_real(0.0) / p.field;

    CausticSearchOptions o = opt;
    if (o.x_max <= o.x_min) {
        o.x_min = 0.0;
        o.x_max = 2.5 * xt;
    }
    if (o.y_max <= o.y_min) {
        o.y_min = -8.0 * a;
        o.y_max = 8.0 * a;
    }

    const double tmax = (std::sqrt(2.0 * p.mass * p.field * o.x_max) + 2.0 * hk0) / p.field;
    const double yimax = o.box_scale * std::max(1.8 * py0c * tscale / p.mass, 2.0 * a);

    PiercingSystem sys{&flow, hk0 / p.mass};
    const BranchScales sc = BranchScales::of(flow);
    const double len_scale = 1.0 + xt + a;

    std::vector<CausticPoint> out;
    Halton4 h4(opt.seed + 31);
    double u[4];
    for (int s = 0; s < o.starts; ++s) {
        h4.get(s + 1, u);
        Cx y0(o.y_min + u[0] * (o.y_max - o.y_min), -0.4 * yimax + u[1] * 2.2 * yimax);
        Cx t(-0.3 * tmax + u[2] * 1.5 * tmax, -2.0 * tscale + u[3] * 2.4 * tscale);

        double F[4];
        EndpointJet j;
        bool ok = false;
        double res = 1e300;
        for (int it = 0; it < o.max_iter; ++it) {
            sys.residual(y0, t, F, j);
            res = norm4(F);
            if (res < o.tol * len_scale) {
                ok = true;
                break;
            }
            double A[4][4], b[4] = {-F[0], -F[1], -F[2], -F[3]};
            sys.jacobian(j, A);
            if (!solve4(A, b)) break;
            // backtracking
            double damp = 1.0;
            bool improved = false;
            for (int bt = 0; bt < 6; ++bt) {
                const Cx ny0 = y0 + damp * Cx(b[0], b[1]);
                const Cx nt = t + damp * Cx(b[2], b[3]);
                double Fn[4];
                EndpointJet jn;
                sys.residual(ny0, nt, Fn, jn);
                if (norm4(Fn) < res) {
                    y0 = ny0;
                    t = nt;
                    improved = true;
                    break;
                }
                damp *= 0.5;
            }
            if (!improved) break;
            if (std::abs(y0.imag()) > 3.0 * yimax || std::abs(t) > 4.0 * tmax) break;
        }
        if (!ok) continue;

        sys.residual(y0, t, F, j);
        const double xr = j.x.real(), yr = j.y.real();
        if (xr < o.x_min || xr > o.x_max || yr < o.y_min || yr > o.y_max) continue;

        bool dup = false;
        for (const CausticPoint& c : out)
            if (same_root(sc, y0, t, c.y0, c.t, 1e-4) ||
                (std::abs(xr - c.x) + std::abs(yr - c.y)) < 1e-6 * len_scale) {
                dup = true;
                break;
            }
        if (dup) continue;

        CausticPoint cp;
        cp.x = xr;
        cp.y = yr;
        cp.y0 = y0;
        cp.t = t;
        cp.det_residual = std::abs(j.det);
        cp.endpoint_im = std::abs(j.x.imag()) + std::abs(j.y.imag());

        // isolation: determinant of the 4x4 system scaled by row norms
        double A[4][4], rn = 1.0;
        sys.jacobian(j, A);
        double det4 = 1.0;
        {
            double M[4][4];
            for (int i = 0; i < 4; ++i) {
                double r = 0.0;
                for (int k = 0; k < 4; ++k) {
                    M[i][k] = A[i][k];
                    r += std::abs(A[i][k]);
                }
                rn *= std::max(r, 1e-300);
            }
            int sign = 1;
            for (int k = 0; k < 4; ++k) {
                int ip = k;
                for (int i = k + 1; i < 4; ++i)
                    if (std::abs(M[i][k]) > std::abs(M[ip][k])) ip = i;
                if (M[ip][k] == 0.0) {
                    det4 = 0.0;
                    break;
                }
                if (ip != k) {
                    for (int c2 = 0; c2 < 4; ++c2) std::swap(M[k][c2], M[ip][c2]);
                    sign = -sign;
                }
                for (int i = k + 1; i < 4; ++i) {
                    const double l = M[i][k] / M[k][k];
                    for (int c2 = k; c2 < 4; ++c2) M[i][c2] -= l * M[k][c2];
                }
            }
            if (det4 != 0.0) {
                det4 = sign;
                for (int k = 0; k < 4; ++k) det4 *= M[k][k];
            }
        }
        cp.cond4 = std::abs(det4) / rn;

        // kernel of the complex 2x2 Jacobian, in scaled coordinates
        Cx v1, v2;
        if (std::abs(j.dx_dy0) + std::abs(j.dx_dt) > std::abs(j.dy_dy0) + std::abs(j.dy_dt)) {
            v1 = -j.dx_dt;
            v2 = j.dx_dy0;
        } else {
            v1 = -j.dy_dt;
            v2 = j.dy_dy0;
        }
        const double vn = std::hypot(std::abs(v1) / sc.y0, std::abs(v2) / sc.t);
        if (vn > 0.0) {
            v1 = v1 / vn;
            v2 = v2 / vn;
        }
        const Cx f2 = fold_coefficient(flow, y0, t, v1, v2);
        cp.normal_form = std::abs(f2) / len_scale;
        // rank-deficient 4x4 systems mark non-isolated zero families
        // (the 1D turning line), not genuine piercings
        const bool isolated = cp.cond4 > 1e-4;
        cp.type = (cp.normal_form > o.fold_threshold && isolated) ? CausticType::fold
                                                                  : CausticType::degenerate;
        out.push_back(cp);
    }

    std::sort(out.begin(), out.end(), [](const CausticPoint& a_, const CausticPoint& b_) {
        if (a_.x != b_.x) return a_.x < b_.x;
        return a_.y < b_.y;
    });
    return out;
}

double caustic_exclusion_radius(const Flow& flow, CausticPoint& cp, const SolveOptions& sopt) {
    if (cp.type != CausticType::fold)
        throw std::invalid_argument("caustic_exclusion_radius: fold points only");
    const ModelParams& p = flow.params();
    const BranchScales sc = BranchScales::of(flow);
    const double r0 = 0.25 * std::min(p.depth0 / p.field, p.impurity_width);

    // sample the merging pair along a transversal ray and fit
    // |dPhi| = (2/3) C d^{3/2}
    const double ca = std::cos(0.67), sa = std::sin(0.67);
    double sum_num = 0.0;
    int nfit = 0;
    SolveOptions so = sopt;
    so.cloud_seeds = 0;
    for (int k = 0; k < 6; ++k) {
        const double d = r0 * std::pow(0.5, k);
        const double xo = cp.x + d * ca, yo = cp.y + d * sa;
        // seeds fanned around the fold root
        std::vector<std::pair<Cx, Cx>> seeds;
        for (double s : {-0.3, -0.1, -0.03, 0.03, 0.1, 0.3}) {
            seeds.emplace_back(cp.y0 + s * sc.y0, cp.t);
            seeds.emplace_back(cp.y0, cp.t + s * sc.t);
            seeds.emplace_back(cp.y0 + s * sc.y0, cp.t + s * sc.t);
        }
        BranchSet bs = solve_point(flow, xo, yo, so, seeds);
        // the two roots nearest the fold
        std::vector<const Branch*> near;
        for (const Branch& b : bs.branches)
            if (same_root(sc, b.y0, b.t, cp.y0, cp.t, 0.8)) near.push_back(&b);
        if (near.size() < 2) continue;
        std::sort(near.begin(), near.end(), [&](const Branch* a, const Branch* b) {
            return std::abs(a->y0 - cp.y0) / sc.y0 + std::abs(a->t - cp.t) / sc.t <
                   std::abs(b->y0 - cp.y0) / sc.y0 + std::abs(b->t - cp.t) / sc.t;
        });
        const double dphi = std::abs(near[0]->action - near[1]->action);
        if (dphi <= 0.0) continue;
        sum_num += dphi / std::pow(d, 1.5);
        ++nfit;
    }
    if (nfit == 0) {
        cp.exclusion_radius = 0.0;
        return 0.0;
    }
    const double C = 1.5 * (sum_num / nfit);
    cp.phase_coeff = C;
    cp.exclusion_radius = std::pow(p.hbar / C, 2.0 / 3.0);
    return cp.exclusion_radius;
}

}  // namespace qwire
