#ifndef QWIRE_PARAMS_HPP
#define QWIRE_PARAMS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace qwire {

// Dimensionless model of the wire + tilted barrier + extended impurity.
// Default unit system: hbar = m = D0 = 1; the field eps and impurity
// width a stay free knobs.
struct ModelParams {
    double mass = 1.0;                 // m
    double hbar = 1.0;                 // can be lowered to sharpen the semiclassical limit
    double field = 0.5;                // eps > 0, energy per unit length
    double depth0 = 1.0;               // D0 > 0, level depth below the barrier top
    double impurity_amp = 0.03;        // beta
    double impurity_width = 1.0;       // a > 0
    double transverse_fraction = 0.2;  // eta = (m vY^2/2)/D0 far from the impurity

    // Smallest value of the level profile f over the real line.
    double profile_min() const {
        return impurity_amp < 0.0 ? std::sqrt(1.0 + impurity_amp) : 1.0;
    }

    void validate() const {
        if (!(mass > 0.0)) throw std::invalid_argument("model: mass must be > 0");
        if (!(hbar > 0.0)) throw std::invalid_argument("model: hbar must be > 0");
        if (!(field > 0.0)) throw std::invalid_argument("model: field must be > 0");
        if (!(depth0 > 0.0)) throw std::invalid_argument("model: depth0 must be > 0");
        if (!(impurity_width > 0.0)) throw std::invalid_argument("model: impurity_width must be > 0");
        if (!(impurity_amp > -1.0)) throw std::invalid_argument("model: impurity_amp must be > -1");
        if (!(transverse_fraction >= 0.0) || !(transverse_fraction < profile_min()))
            throw std::invalid_argument("model: transverse_fraction must lie in [0, min f)");
    }

    // Total energy, measured from the barrier top: E = -D0 + eta*D0 < 0.
    double total_energy() const { return depth0 * (transverse_fraction - 1.0); }

    // Asymptotic channel momentum p_Y(inf) = sqrt(2 m eta D0).
    double channel_momentum_far() const {
        return std::sqrt(2.0 * mass * transverse_fraction * depth0);
    }

    // 1D turning distance D0/eps (beta = 0 exit point for the X motion).
    double turning_length() const { return depth0 / field; }

    // Closed-form WKB log-transmission for the triangular barrier:
    // -ln|T|^2 = 4 sqrt(2m) D0^{3/2} / (3 hbar eps).
    double wkb_log_transmission() const {
        return 4.0 * std::sqrt(2.0 * mass) * std::pow(depth0, 1.5) / (3.0 * hbar * field);
    }
};

}  // namespace qwire

#endif
