#include "qwire/airy.hpp"

#include <cmath>
#include <vector>

namespace qwire {

namespace {

using Cd = std::complex<double>;

constexpr double kAi0 = 0.35502805388781723926;   // Ai(0)
constexpr double kAip0 = 0.25881940379280679840;  // -Ai'(0)
constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kSqrtPi = 1.7724538509055160273;

// u_k coefficients of the asymptotic expansions, u_0 = 1,
// u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / (216 k (2k-1)).
const std::vector<double>& ucoef() {
    static const std::vector<double> u = [] {
        std::vector<double> v(26);
        v[0] = 1.0;
        for (int k = 1; k < 26; ++k)
            v[k] = v[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
                   (216.0 * k * (2.0 * k - 1.0));
        return v;
    }();
    return u;
}

const std::vector<double>& vcoef() {
    static const std::vector<double> v = [] {
        const auto& u = ucoef();
        std::vector<double> w(u.size());
        for (size_t k = 0; k < u.size(); ++k)
            w[k] = (6.0 * k + 1.0) / (1.0 - 6.0 * k) * u[k];
        return w;
    }();
    return v;
}

// Maclaurin series of the two entire solutions and their derivatives.
template <class T>
void airy_series(T z, T& f, T& fp, T& g, T& gp) {
    const T z3 = z * z * z;
    T tf = T(1.0);  // current f term, z^{3k} coefficient included
    T tg = z;       // current g term
    f = tf;
    g = tg;
    fp = T(0.0);
    gp = T(1.0);
    for (int k = 0; k < 80; ++k) {
        tf = tf * z3 / double((3 * k + 2) * (3 * k + 3));
        tg = tg * z3 / double((3 * k + 3) * (3 * k + 4));
        f += tf;
        g += tg;
        fp += double(3 * k + 3) * tf / z;
        gp += double(3 * k + 4) * tg / z;
        if (std::abs(tf) < 1e-18 * std::abs(f) && std::abs(tg) < 1e-18 * std::abs(g)) break;
    }
}

// truncated asymptotic sums Sum s^k u_k / zeta^k and the v analogue
template <class T>
void asym_sums(T zeta, double sgn, T& su, T& sv) {
    const auto& u = ucoef();
    const auto& v = vcoef();
    su = T(1.0);
    sv = T(1.0);
    T p = T(1.0);
    double prev = 1e300;
    for (size_t k = 1; k < u.size(); ++k) {
        p = p * sgn / zeta;
        const double mag = std::abs(p) * u[k];
        if (mag > prev) break;  // divergent tail reached
        prev = mag;
        su += p * u[k];
        sv += p * v[k];
    }
}

}  // namespace

AiryPair airy(double z) {
    AiryPair r{};
    if (std::abs(z) <= 5.0) {
        double f, fp, g, gp;
        if (z == 0.0) {
            f = 1.0;
            fp = 0.0;
            g = 0.0;
            gp = 1.0;
        } else {
            airy_series(z, f, fp, g, gp);
        }
        r.ai = kAi0 * f - kAip0 * g;
        r.aip = kAi0 * fp - kAip0 * gp;
        r.bi = kSqrt3 * (kAi0 * f + kAip0 * g);
        r.bip = kSqrt3 * (kAi0 * fp + kAip0 * gp);
        return r;
    }
    if (z > 0.0) {
        const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
        const double zq = std::pow(z, 0.25);
        double sum, svm, sup, svp;
        asym_sums(zeta, -1.0, sum, svm);
        asym_sums(zeta, 1.0, sup, svp);
        const double em = std::exp(-zeta), ep = std::exp(zeta);
        r.ai = em / (2.0 * kSqrtPi * zq) * sum;
        r.aip = -zq * em / (2.0 * kSqrtPi) * svm;
        r.bi = ep / (kSqrtPi * zq) * sup;
        r.bip = zq * ep / kSqrtPi * svp;
        return r;
    }
    // oscillatory side: split the sums into even/odd parts
    const double x = -z;
    const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
    const double zq = std::pow(x, 0.25);
    const auto& u = ucoef();
    const auto& v = vcoef();
    double ue = 0.0, uo = 0.0, ve = 0.0, vo = 0.0;
    double p = 1.0;
    double prev = 1e300;
    for (size_t k = 0; k < u.size(); ++k) {
        const double mag = p * u[k];
        if (mag > prev) break;
        prev = mag;
        const double se = (k % 4 == 0 || k % 4 == 3) ? 1.0 : -1.0;  // (-1)^{k(k+1)/2} pattern
        (void)se;
        const double sign = (k / 2 % 2 == 0) ? 1.0 : -1.0;  // (-1)^k over pair index
        if (k % 2 == 0) {
            ue += sign * mag;
            ve += sign * p * v[k];
        } else {
            uo += sign * mag;
            vo += sign * p * v[k];
        }
        p /= zeta;
    }
    const double c = std::cos(zeta - M_PI / 4.0), s = std::sin(zeta - M_PI / 4.0);
    r.ai = (c * ue + s * uo) / (kSqrtPi * zq);
    r.bi = (-s * ue + c * uo) / (kSqrtPi * zq);
    r.aip = zq / kSqrtPi * (s * ve - c * vo);
    r.bip = zq / kSqrtPi * (c * ve + s * vo);
    return r;
}

namespace {

// e^{-zeta} sector expansion, valid away from the negative real axis
void airy_asym_right(Cd z, Cd& ai, Cd& aip) {
    const Cd zh = std::sqrt(z);
    const Cd zeta = 2.0 / 3.0 * z * zh;
    const Cd zq = std::sqrt(zh);
    Cd su, sv;
    asym_sums(zeta, -1.0, su, sv);
    const Cd em = std::exp(-zeta);
    ai = em / (2.0 * kSqrtPi * zq) * su;
    aip = -zq * em / (2.0 * kSqrtPi) * sv;
}

}  // namespace

void airy_complex(Cd z, Cd& ai, Cd& aip) {
    if (std::abs(z) <= 8.0) {
        if (std::abs(z) < 1e-300) {
            ai = kAi0;
            aip = -kAip0;
            return;
        }
        Cd f, fp, g, gp;
        airy_series(z, f, fp, g, gp);
        ai = kAi0 * f - kAip0 * g;
        aip = kAi0 * fp - kAip0 * gp;
        return;
    }
    if (std::abs(std::arg(z)) <= 2.0 * M_PI / 3.0 - 0.05) {
        airy_asym_right(z, ai, aip);
        return;
    }
    // rotate into the right sector: Ai(z) = -w Ai(wz) - w^2 Ai(w^2 z),
    // w = e^{2 pi i/3}; derivative picks up the chain-rule factors.
    const Cd w = std::polar(1.0, 2.0 * M_PI / 3.0);
    const Cd w2 = std::polar(1.0, -2.0 * M_PI / 3.0);
    Cd a1, a1p, a2, a2p;
    airy_asym_right(w * z, a1, a1p);
    airy_asym_right(w2 * z, a2, a2p);
    ai = -w * a1 - w2 * a2;
    aip = -w * w * a1p - w2 * w2 * a2p;
}

}  // namespace qwire
