#ifndef QWIRE_TRAJECTORY_HPP
#define QWIRE_TRAJECTORY_HPP

#include <complex>

#include "qwire/params.hpp"
#include "qwire/profile.hpp"

namespace qwire {

// Launch data on the wire edge x = 0: evanescent X momentum i*hbar*kappa
// and channel momentum p_Y, both evaluated at the (complex) launch
// coordinate y0.
struct LaunchState {
    Cx y0;
    Cx px0;  // i hbar kappa(y0)
    Cx py0;  // p_Y(y0)
    ChannelState cs;
};

struct TrajectoryPoint {
    Cx t;
    Cx x, y;
    Cx px, py;
    Cx action;  // reduced action W(t) = int (pX dX + pY dY) from launch
};

// Endpoint map value with first derivatives in (y0, t) and the
// derivatives of det J needed by the caustic search.
struct EndpointJet {
    Cx x, y;
    Cx dx_dy0, dx_dt, dy_dy0, dy_dt;
    Cx det;            // dx_dy0*dy_dt - dx_dt*dy_dy0
    Cx ddet_dy0, ddet_dt;
};

// Closed-form Hamiltonian flow under the constant-force barrier
// V(x) = -eps*x. No integrator anywhere: positions, momenta and actions
// are exact polynomials in t.
class Flow {
  public:
    explicit Flow(const Profile& prof);

    const ModelParams& params() const { return prof_->params(); }
    const Profile& profile() const { return *prof_; }

    // Barrier potential V(x) = -eps*x for x >= 0.
    double barrier_potential(double x) const;

    LaunchState launch(Cx y0) const;

    TrajectoryPoint at(const LaunchState& ls, Cx t) const;

    // Reduced action from launch to time t along the trajectory.
    Cx action(const LaunchState& ls, Cx t) const;

    // Time and position of the X turning point (px = 0).
    TrajectoryPoint exit_point(const LaunchState& ls) const;

    EndpointJet endpoint(Cx y0, Cx t) const;
    EndpointJet endpoint(const LaunchState& ls, Cx t) const;

    // Total branch phase: launch phase W0(y0) plus the flow action.
    Cx total_phase(const LaunchState& ls, Cx t) const;

  private:
    const Profile* prof_;
    double m_, eps_, E_;
};

}  // namespace qwire

#endif
