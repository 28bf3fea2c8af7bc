#ifndef QWIRE_PROFILE_HPP
#define QWIRE_PROFILE_HPP

#include <complex>

#include "qwire/params.hpp"

namespace qwire {

using Cx = std::complex<double>;

// Channel kinematics at a (possibly complex) wire coordinate y.
// All square roots are continued from the real axis along the canonical
// path (real segment to Re y, then vertical), so values are single-valued
// functions of y. cut_crossed marks continuations whose radicand crossed
// the negative real axis on the way; such values are continued, not
// silently reset to the principal branch.
struct ChannelState {
    Cx y;
    Cx f, fp, fpp;     // level profile factor and derivatives
    Cx px, pxp, pxpp;  // launch momentum i*hbar*kappa(y) and derivatives
    Cx py, pyp, pypp;  // channel momentum p_Y(y) and derivatives
    Cx amp0;           // launch amplitude sqrt(p_Y(far)/p_Y(y)), 1 when eta = 0
    bool cut_crossed = false;
};

// Impurity-modulated level profile f(y) = sqrt(1 + beta exp(-y^2/a^2))
// and the channel quantities derived from it.
class Profile {
  public:
    explicit Profile(const ModelParams& p);

    const ModelParams& params() const { return par_; }

    // f(y) for real y (always the positive root).
    double f_real(double y) const;

    // p_Y(y) for real y; throws if the motion along the wire is
    // classically forbidden there (radicand <= 0 with eta > 0 intent).
    double channel_momentum_real(double y) const;

    // hbar*kappa(y) for real y.
    double decay_momentum_real(double y) const;

    // Tracked evaluation at complex y.
    ChannelState state(Cx y) const;

    // Launch phase W0(y) = int_0^y p_Y ds along the canonical path.
    Cx launch_phase(Cx y) const;
    double launch_phase_real(double y) const;

    // Reference amplitude normalization point (far along the wire).
    double y_far() const { return 12.0 * par_.impurity_width; }

  private:
    ModelParams par_;
    double pref_;               // sqrt(2 m D0)
    double py_far_;             // p_Y at the normalization point
    bool zero_velocity_ = false;  // eta == 0: per-column 1D kinematics

    struct Tracked;
    void walk_vertical(double yr, double yi, Tracked& tr) const;
};

}  // namespace qwire

#endif
