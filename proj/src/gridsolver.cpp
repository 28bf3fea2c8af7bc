#include "qwire/gridsolver.hpp"

#include <boost/multiprecision/mpfr.hpp>
#include <cmath>

#include "qwire/airy.hpp"
#include "qwire/banded.hpp"

namespace qwire {

namespace {

using mpreal = boost::multiprecision::mpfr_float;

struct Assembled {
    // physical setup shared by all precisions, computed in double
    int nx, ny;
    double hx, hy;
    double xmax, ymax;
    double cap_w, cap_s;
    double ky;  // radiation wavenumber
    bool radiation;
    bool airy_robin;
    Cx qx;  // outgoing logarithmic derivative at the outer x edge
    std::vector<double> xs, ys;
    std::vector<Cx> g;       // inflow data at x = 0
    std::vector<double> vx;  // -eps * x
    std::vector<double> gx;  // x absorber
    std::vector<double> gy;  // y absorber (absorbing mode)
    double E;
    double kin;  // hbar^2 / (2 m)
};

Assembled assemble(const Profile& prof, const GridSpec& spec) {
    const ModelParams& p = prof.params();
    Assembled A;
    A.nx = spec.nx;
    A.ny = spec.ny;
    const double xt = p.depth0 * prof.f_real(0.0) / p.field;
    A.xmax = spec.xmax > 0.0 ? spec.xmax : 2.6 * xt;
    A.ymax = spec.ymax > 0.0 ? spec.ymax : 8.0 * p.impurity_width;
    A.cap_w = spec.cap_width > 0.0 ? spec.cap_width : 0.30 * A.xmax;
    A.cap_s = spec.cap_strength > 0.0 ? spec.cap_strength
                                      : 2.0 * (std::abs(p.total_energy()) + p.field * A.xmax);
    A.radiation = spec.ybc != "absorbing";
    A.airy_robin = spec.xbc != "cap";
    A.hx = A.xmax / (A.nx + 1);
    A.hy = 2.0 * A.ymax / (A.ny - 1);
    A.E = p.total_energy();
    A.kin = p.hbar * p.hbar / (2.0 * p.mass);
    A.ky = prof.channel_momentum_real(prof.y_far()) / p.hbar;

    A.xs.resize(A.nx);
    A.vx.resize(A.nx);
    A.gx.assign(A.nx, 0.0);
    const double x0 = A.xmax - A.cap_w;
    for (int i = 0; i < A.nx; ++i) {
        const double x = (i + 1) * A.hx;
        A.xs[i] = x;
        A.vx[i] = -p.field * x;
        if (!A.airy_robin && x > x0) A.gx[i] = A.cap_s * std::pow((x - x0) / A.cap_w, 3);
    }
    if (A.airy_robin) {
        // beyond the barrier the problem is an exactly linear potential:
        // close the grid with the outgoing solution's logarithmic
        // derivative at the last unknown
        const double ex = A.E - A.kin * A.ky * A.ky;  // X-channel energy
        const double c = std::cbrt(2.0 * p.mass * p.field / (p.hbar * p.hbar));
        const double xtx = -ex / p.field;
        const AiryPair ae = airy(c * (xtx - A.nx * A.hx));
        A.qx = -c * Cx(ae.aip, -ae.bip) / Cx(ae.ai, -ae.bi);
    }
    A.ys.resize(A.ny);
    A.g.resize(A.ny);
    A.gy.assign(A.ny, 0.0);
    const double ycap = 0.25 * A.ymax;
    for (int j = 0; j < A.ny; ++j) {
        const double y = -A.ymax + j * A.hy;
        A.ys[j] = y;
        const double w0 = prof.launch_phase_real(y) / p.hbar;
        const Cx amp = prof.state(Cx(y, 0.0)).amp0;
        A.g[j] = amp * std::exp(Cx(0.0, w0));
        if (!A.radiation) {
            const double d = A.ymax - std::abs(y);
            if (d < ycap) A.gy[j] = A.cap_s * std::pow((ycap - d) / ycap, 3);
        }
    }
    return A;
}

template <class R>
GridSolution solve_core(const Profile& prof, const GridSpec& spec, double eps_machine,
                        const std::string& precname) {
    using C = Cplx<R>;
    const ModelParams& p = prof.params();
    const Assembled A = assemble(prof, spec);
    const int nx = A.nx, ny = A.ny;
    const size_t N = size_t(nx) * ny;

    // dynamic-range honesty: refuse when the expected smallest amplitude
    // sits below the precision floor
    const double theta = p.wkb_log_transmission();
    const double floor = eps_machine * 1e4;
    if (std::exp(-0.5 * theta) < floor) {
        const int digits = int(std::ceil(0.5 * theta / std::log(10.0) + 6.0));
        throw PrecisionError(
            "solve_stationary_2d: expected dynamic range exp(-" + std::to_string(0.5 * theta) +
            ") below the precision floor; rerun with --precision ext:" + std::to_string(digits));
    }

    const bool x_inner = nx <= ny;
    auto idx = [&](int ix, int iy) -> int {
        return x_inner ? iy * nx + ix : ix * ny + iy;
    };
    const int band = x_inner ? nx : ny;

    const double mem_gb = double(N) * (3.0 * band + 1) * 2.0 * sizeof(R) / 1e9;
    if (mem_gb > 3.0)
        throw std::runtime_error("solve_stationary_2d: banded factor would need " +
                                 std::to_string(mem_gb) + " GB; reduce the grid");

    BandedMatrix<C> M(int(N), band, band);
    std::vector<C> b(N, C{});

    const R rx = R(A.kin / (A.hx * A.hx));
    const R ry = R(A.kin / (A.hy * A.hy));
    const R two = R(2.0);

    for (int iy = 0; iy < ny; ++iy) {
        const bool edge = (iy == 0 || iy == ny - 1);
        for (int ix = 0; ix < nx; ++ix) {
            const int row = idx(ix, iy);
            if (!A.radiation && edge) {
                M.set(row, row, C{R(1.0), R(0.0)});
                continue;
            }
            // diagonal: 2rx + 2ry + V - E - i*(absorbers)
            C diag{two * rx + two * ry + R(A.vx[ix] - A.E), R(-(A.gx[ix] + A.gy[iy]))};
            M.add(row, row, diag);
            if (ix > 0) M.add(row, idx(ix - 1, iy), C{-rx, R(0.0)});
            if (ix < nx - 1) M.add(row, idx(ix + 1, iy), C{-rx, R(0.0)});
            if (ix == 0) {
                // inflow Dirichlet at x = 0
                const Cx gv = A.g[iy];
                b[row] += C{R(A.kin / (A.hx * A.hx) * gv.real()),
                            R(A.kin / (A.hx * A.hx) * gv.imag())};
            }
            if (ix == nx - 1 && A.airy_robin) {
                // outgoing ghost: psi_{nx} = psi_{nx-2} + 2 hx qx psi_{nx-1}
                M.add(row, idx(ix - 1, iy), C{-rx, R(0.0)});
                const Cx qq = -2.0 * A.hx * A.qx * A.kin / (A.hx * A.hx);
                M.add(row, row, C{R(qq.real()), R(qq.imag())});
            }
            if (!edge) {
                M.add(row, idx(ix, iy - 1), C{-ry, R(0.0)});
                M.add(row, idx(ix, iy + 1), C{-ry, R(0.0)});
            } else {
                // radiation ghosts from d_y psi = i ky psi at both ends:
                // psi_{-1} = psi_1 - 2 i hy ky psi_0 (bottom),
                // psi_{ny} = psi_{ny-2} + 2 i hy ky psi_{ny-1} (top)
                const int inner = (iy == 0) ? idx(ix, 1) : idx(ix, ny - 2);
                M.add(row, inner, C{-two * ry, R(0.0)});
                const double kterm = 2.0 * A.hy * A.ky * A.kin / (A.hy * A.hy);
                const double sgn = (iy == 0) ? 1.0 : -1.0;
                M.add(row, row, C{R(0.0), R(sgn * kterm)});
            }
        }
    }

    M.factor();
    std::vector<C> sol = b;
    M.solve(sol);

    // residual by independent re-application of the stencil
    R rmax = R(0.0), bmax = R(0.0);
    {
        auto av = [&](int ix, int iy) -> C {
            if (ix < 0 || ix >= nx) return C{};
            return sol[idx(ix, iy)];
        };
        for (int iy = 0; iy < ny; ++iy) {
            const bool edge = (iy == 0 || iy == ny - 1);
            for (int ix = 0; ix < nx; ++ix) {
                const int row = idx(ix, iy);
                C acc{};
                if (!A.radiation && edge) {
                    acc = sol[row];
                } else {
                    acc = C{two * rx + two * ry + R(A.vx[ix] - A.E),
                            R(-(A.gx[ix] + A.gy[iy]))} *
                          sol[row];
                    acc += C{-rx, R(0.0)} * (av(ix - 1, iy) + av(ix + 1, iy));
                    if (ix == nx - 1 && A.airy_robin) {
                        acc += C{-rx, R(0.0)} * av(ix - 1, iy);
                        const Cx qq = -2.0 * A.hx * A.qx * A.kin / (A.hx * A.hx);
                        acc += C{R(qq.real()), R(qq.imag())} * sol[row];
                    }
                    if (!edge) {
                        acc += C{-ry, R(0.0)} * (sol[idx(ix, iy - 1)] + sol[idx(ix, iy + 1)]);
                    } else {
                        const int inner = (iy == 0) ? idx(ix, 1) : idx(ix, ny - 2);
                        acc += C{-two * ry, R(0.0)} * sol[inner];
                        const double kterm = 2.0 * A.hy * A.ky * A.kin / (A.hy * A.hy);
                        const double sgn = (iy == 0) ? 1.0 : -1.0;
                        acc += C{R(0.0), R(sgn * kterm)} * sol[row];
                    }
                }
                const C r = acc - b[row];
                const R rm = band_mag(r), bm = band_mag(b[row]);
                if (rm > rmax) rmax = rm;
                if (bm > bmax) bmax = bm;
            }
        }
    }

    GridSolution out;
    out.spec = spec;
    out.spec.xmax = A.xmax;
    out.spec.ymax = A.ymax;
    out.spec.cap_width = A.cap_w;
    out.spec.cap_strength = A.cap_s;
    out.hx = A.hx;
    out.hy = A.hy;
    out.xs = A.xs;
    out.ys = A.ys;
    out.precision = precname;
    out.psi.resize(N);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const C v = sol[idx(ix, iy)];
            out.psi[size_t(iy) * nx + ix] = Cx(double(v.re), double(v.im));
        }
    out.residual = double(rmax / bmax);
    out.floor = floor;
    return out;
}

}  // namespace

GridSolution solve_stationary_2d(const Profile& prof, const GridSpec& spec,
                                 const std::string& precision) {
    if (precision == "double" || precision.empty())
        return solve_core<double>(prof, spec, 2.2e-16, "double");
    if (precision.rfind("ext:", 0) == 0) {
        const int digits = std::max(20, std::stoi(precision.substr(4)));
        mpreal::default_precision(digits);
        return solve_core<mpreal>(prof, spec, std::pow(10.0, -digits), precision);
    }
    throw std::invalid_argument("precision must be 'double' or 'ext:<digits>'");
}

double discrete_flux_divergence(const GridSolution& g, const ModelParams& p) {
    const int nx = int(g.xs.size()), ny = int(g.ys.size());
    const double cx = p.hbar / (p.mass * g.hx);
    const double cy = p.hbar / (p.mass * g.hy);
    const double xcap = g.spec.xmax - g.spec.cap_width;
    auto jx = [&](int ix, int iy) {  // current through the ix -> ix+1 face
        return cx * std::imag(std::conj(g.at(ix, iy)) * g.at(ix + 1, iy));
    };
    auto jy = [&](int ix, int iy) {
        return cy * std::imag(std::conj(g.at(ix, iy)) * g.at(ix, iy + 1));
    };
    double wmax = 0.0, jmax = 0.0;
    for (int iy = 1; iy < ny - 2; ++iy)
        for (int ix = 1; ix < nx - 2; ++ix) {
            if (g.xs[ix + 1] > xcap) continue;
            const double div = (jx(ix, iy) - jx(ix - 1, iy)) / g.hx +
                               (jy(ix, iy) - jy(ix, iy - 1)) / g.hy;
            wmax = std::max(wmax, std::abs(div));
            jmax = std::max({jmax, std::abs(jx(ix, iy)) / g.hx, std::abs(jy(ix, iy)) / g.hy});
        }
    return jmax > 0.0 ? wmax / jmax : 0.0;
}

double net_x_current(const GridSolution& g, const ModelParams& p, int ix) {
    const int nx = int(g.xs.size()), ny = int(g.ys.size());
    (void)nx;
    double s = 0.0;
    for (int iy = 0; iy < ny; ++iy)
        s += p.hbar / (p.mass * g.hx) * std::imag(std::conj(g.at(ix, iy)) * g.at(ix + 1, iy)) *
             g.hy;
    return s;
}

}  // namespace qwire
