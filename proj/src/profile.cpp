#include "qwire/profile.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qwire {

namespace {

// Continue w = sqrt(u) from the previous sample's root wprev: pick the
// root closest to wprev, noting a flip away from the principal branch.
Cx continued_sqrt(Cx u, Cx wprev, bool& flipped) {
    Cx w = std::sqrt(u);
    if (std::abs(w - wprev) > std::abs(w + wprev)) {
        w = -w;
        flipped = true;
    }
    return w;
}

bool tame(Cx ua, Cx ub) {
    const double ra = std::abs(ua), rb = std::abs(ub);
    if (ra == 0.0 || rb == 0.0) return false;
    return std::abs(std::log(rb / ra)) < 0.7 && std::abs(std::arg(ub / ua)) < 0.5;
}

// 5-point Gauss-Legendre on [0,1]
const double kGx[5] = {0.04691007703066800, 0.23076534494715845, 0.5, 0.76923465505284155,
                       0.95308992296933200};
const double kGw[5] = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                       0.23931433524968324, 0.11846344252809454};

}  // namespace

struct Profile::Tracked {
    Cx g;   // impurity radicand 1 + beta exp(-y^2/a^2)
    Cx f;   // sqrt(g)
    Cx hk;  // sqrt(2 m D0 f) = hbar kappa
    Cx sp;  // sqrt(2 m D0 (f - 1 + eta)) = p_Y
    Cx ra;  // sqrt(p_Y), for the launch amplitude
    bool cut = false;
    Cx phase = 0.0;          // accumulated int p_Y dy on the vertical leg
    bool integrate = false;
};

Profile::Profile(const ModelParams& p) : par_(p), pref_(std::sqrt(2.0 * p.mass * p.depth0)) {
    par_.validate();
    const double eta = par_.transverse_fraction;
    zero_velocity_ = (eta == 0.0);
    py_far_ = zero_velocity_ ? 0.0 : channel_momentum_real(y_far());
}

double Profile::f_real(double y) const {
    const double a = par_.impurity_width;
    return std::sqrt(1.0 + par_.impurity_amp * std::exp(-(y * y) / (a * a)));
}

double Profile::channel_momentum_real(double y) const {
    if (zero_velocity_) return 0.0;
    const double rad = f_real(y) - 1.0 + par_.transverse_fraction;
    if (rad < 0.0)
        throw std::domain_error("channel_momentum: classically forbidden along the wire at y=" +
                                std::to_string(y));
    return pref_ * std::sqrt(rad);
}

double Profile::decay_momentum_real(double y) const {
    return zero_velocity_ ? pref_ : pref_ * std::sqrt(f_real(y));
}

void Profile::walk_vertical(double yr, double yi, Tracked& tr) const {
    const double a2 = par_.impurity_width * par_.impurity_width;
    const double beta = par_.impurity_amp;
    const double eta = par_.transverse_fraction;
    const double md = par_.mass * par_.depth0;

    auto radicand = [&](double s) -> Cx {
        const Cx y(yr, s);
        return 1.0 + beta * std::exp(-(y * y) / a2);
    };

    // advance the tracked roots from the current sample to (s1, g1)
    auto advance = [&](Tracked& t, Cx g1, bool flag) {
        bool flip = false;
        const Cx f1 = continued_sqrt(g1, t.f, flip);
        const Cx hk1 = continued_sqrt(2.0 * md * f1, t.hk, flip);
        Cx sp1 = 0.0, ra1 = 0.0;
        const Cx h1 = f1 - 1.0 + eta;
        if (std::abs(h1) != 0.0) {
            sp1 = continued_sqrt(2.0 * md * h1, t.sp, flip);
            ra1 = continued_sqrt(sp1, t.ra, flip);
        }
        if (flip && flag) t.cut = true;
        t.g = g1;
        t.f = f1;
        t.hk = hk1;
        t.sp = sp1;
        t.ra = ra1;
    };

    // process segments in path order, bisecting until the radicand is
    // tame; a global sample budget bounds the refinement near radicand
    // zeros, where no step is tame and the value is flagged instead
    int budget = 4000;
    auto process = [&](auto&& self, double s0, double s1, Cx g1, int depth) -> void {
        if (!tame(tr.g, g1) && depth < 18 && budget > 0) {
            --budget;
            const double sm = 0.5 * (s0 + s1);
            self(self, s0, sm, radicand(sm), depth + 1);
            self(self, sm, s1, g1, depth + 1);
            return;
        }
        if (!tame(tr.g, g1)) tr.cut = true;  // unresolved after max depth
        if (tr.integrate) {
            Tracked node = tr;
            Cx acc = 0.0;
            const int panels = std::max(1, int(std::abs(s1 - s0) / (0.12 * par_.impurity_width)));
            const double dp = (s1 - s0) / panels;
            for (int p = 0; p < panels; ++p) {
                Cx pacc = 0.0;
                for (int k = 0; k < 5; ++k) {
                    advance(node, radicand(s0 + (p + kGx[k]) * dp), false);
                    pacc += kGw[k] * node.sp;
                }
                acc += pacc * dp;
            }
            tr.phase += acc * Cx(0.0, 1.0);  // dy = i ds on the vertical leg
        }
        advance(tr, g1, true);
    };
    process(process, 0.0, yi, radicand(yi), 0);
}

ChannelState Profile::state(Cx y) const {
    const double a2 = par_.impurity_width * par_.impurity_width;
    const double eta = par_.transverse_fraction;
    const double md = par_.mass * par_.depth0;

    if (zero_velocity_) {
        // the zero-transverse-velocity state decouples from the impurity:
        // per-column 1D decay at the unperturbed level
        ChannelState st;
        st.y = y;
        st.f = 1.0;
        st.fp = st.fpp = 0.0;
        st.px = Cx(0.0, pref_);
        st.pxp = st.pxpp = 0.0;
        st.py = st.pyp = st.pypp = 0.0;
        st.amp0 = 1.0;
        return st;
    }

    Tracked tr;
    const double yr = y.real(), yi = y.imag();
    tr.g = 1.0 + par_.impurity_amp * std::exp(-(yr * yr) / a2);
    tr.f = std::sqrt(tr.g);
    tr.hk = std::sqrt(2.0 * md * tr.f);
    tr.sp = pref_ * std::sqrt(Cx(tr.f - 1.0 + eta));
    tr.ra = std::sqrt(tr.sp);
    if (yi != 0.0) walk_vertical(yr, yi, tr);

    ChannelState st;
    st.y = y;
    st.cut_crossed = tr.cut;
    st.f = tr.f;

    const Cx g = tr.g;
    const Cx gp = -(2.0 * y / a2) * (g - 1.0);
    const Cx gpp = (g - 1.0) * (4.0 * y * y / (a2 * a2) - 2.0 / a2);
    st.fp = gp / (2.0 * st.f);
    st.fpp = (gpp - 2.0 * st.fp * st.fp) / (2.0 * st.f);

    const Cx hk = tr.hk;
    const Cx hkp = md * st.fp / hk;
    st.px = Cx(0.0, 1.0) * hk;
    st.pxp = Cx(0.0, 1.0) * hkp;
    st.pxpp = Cx(0.0, 1.0) * (md * st.fpp - hkp * hkp) / hk;

    st.py = tr.sp;
    if (std::abs(st.py) > 1e-150) {
        st.pyp = md * st.fp / st.py;
        st.pypp = (md * st.fpp - st.pyp * st.pyp) / st.py;
    } else {
        st.pyp = 0.0;
        st.pypp = 0.0;
    }

    if (eta > 0.0)
        st.amp0 = std::sqrt(py_far_) / tr.ra;
    else
        st.amp0 = 1.0;
    return st;
}

Cx Profile::launch_phase(Cx y) const {
    if (zero_velocity_) return 0.0;
    const double yr = y.real(), yi = y.imag();
    const Cx w = launch_phase_real(yr);
    if (yi == 0.0) return w;

    const double a2 = par_.impurity_width * par_.impurity_width;
    const double md = par_.mass * par_.depth0;
    Tracked tr;
    tr.g = 1.0 + par_.impurity_amp * std::exp(-(yr * yr) / a2);
    tr.f = std::sqrt(tr.g);
    tr.hk = std::sqrt(2.0 * md * tr.f);
    tr.sp = pref_ * std::sqrt(Cx(tr.f - 1.0 + par_.transverse_fraction));
    tr.ra = std::sqrt(tr.sp);
    tr.integrate = true;
    walk_vertical(yr, yi, tr);
    return w + tr.phase;
}

double Profile::launch_phase_real(double y) const {
    if (y == 0.0) return 0.0;
    auto fy = [this](double s) { return channel_momentum_real(s); };
    auto simpson = [&](auto&& self, double a, double b, double fa, double fm, double fb,
                       double whole, int depth) -> double {
        const double m = 0.5 * (a + b);
        const double flm = fy(0.5 * (a + m)), frm = fy(0.5 * (m + b));
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if (depth > 24 || std::abs(left + right - whole) < 1e-13 * (1.0 + std::abs(whole)))
            return left + right + (left + right - whole) / 15.0;
        return self(self, a, m, fa, flm, fm, left, depth + 1) +
               self(self, m, b, fm, frm, fb, right, depth + 1);
    };
    const double fa = fy(0.0), fb = fy(y), fm = fy(0.5 * y);
    const double whole = y / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(simpson, 0.0, y, fa, fm, fb, whole, 0);
}

}  // namespace qwire
