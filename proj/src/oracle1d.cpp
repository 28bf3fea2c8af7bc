#include "qwire/oracle1d.hpp"

#include <cmath>
#include <stdexcept>

#include "qwire/airy.hpp"

namespace qwire {

Airy1D::Airy1D(const ModelParams& p) : p_(p) {
    if (p.impurity_amp != 0.0 || p.transverse_fraction != 0.0)
        throw std::invalid_argument("Airy1D: valid for beta = 0, eta = 0 only");
    p_.validate();
    c_ = std::cbrt(2.0 * p.mass * p.field / (p.hbar * p.hbar));
    xt_ = p.depth0 / p.field;
    const AiryPair a0 = airy(c_ * xt_);
    denom_ = std::complex<double>(a0.ai, -a0.bi);
}

std::complex<double> Airy1D::psi(double x) const {
    const AiryPair a = airy(c_ * (xt_ - x));
    return std::complex<double>(a.ai, -a.bi) / denom_;
}

double Airy1D::transmission() const {
    const double kappa0 = std::sqrt(2.0 * p_.mass * p_.depth0) / p_.hbar;
    return c_ / (M_PI * kappa0 * std::norm(denom_));
}

double Airy1D::decay_rate(double x_mask) const {
    // outgoing flux of the stationary solution over the stored norm
    const double flux = p_.hbar * c_ / (M_PI * p_.mass * std::norm(denom_));
    // adaptive Simpson of |psi|^2 on [0, x_mask]
    auto f = [this](double x) { return std::norm(psi(x)); };
    auto simpson = [&](auto&& self, double a, double b, double fa, double fm, double fb,
                       double whole, int depth) -> double {
        const double m = 0.5 * (a + b);
        const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if (depth > 22 || std::abs(left + right - whole) < 1e-11 * (1.0 + std::abs(whole)))
            return left + right;
        return self(self, a, m, fa, flm, fm, left, depth + 1) +
               self(self, m, b, fm, frm, fb, right, depth + 1);
    };
    const double fa = f(0.0), fb = f(x_mask), fm = f(0.5 * x_mask);
    const double norm = simpson(simpson, 0.0, x_mask, fa, fm, fb,
                                x_mask / 6.0 * (fa + 4.0 * fm + fb), 0);
    return flux / norm;
}

}  // namespace qwire
