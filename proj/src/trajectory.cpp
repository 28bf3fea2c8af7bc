#include "qwire/trajectory.hpp"

#include <stdexcept>

namespace qwire {

Flow::Flow(const Profile& prof)
    : prof_(&prof),
      m_(prof.params().mass),
      eps_(prof.params().field),
      E_(prof.params().total_energy()) {}

double Flow::barrier_potential(double x) const {
    if (x < 0.0) throw std::domain_error("barrier_potential: x must be >= 0 (barrier region)");
    return -eps_ * x;
}

LaunchState Flow::launch(Cx y0) const {
    LaunchState ls;
    ls.cs = prof_->state(y0);
    ls.y0 = y0;
    ls.px0 = ls.cs.px;
    ls.py0 = ls.cs.py;
    return ls;
}

TrajectoryPoint Flow::at(const LaunchState& ls, Cx t) const {
    TrajectoryPoint p;
    p.t = t;
    p.x = ls.px0 * t / m_ + eps_ * t * t / (2.0 * m_);
    p.y = ls.y0 + ls.py0 * t / m_;
    p.px = ls.px0 + eps_ * t;
    p.py = ls.py0;
    p.action = action(ls, t);
    return p;
}

Cx Flow::action(const LaunchState& ls, Cx t) const {
    // W(t) = int (pX dX + pY dY) = 2 E t + px0 eps t^2/m + eps^2 t^3/(3m);
    // the energy E = (px0^2 + py0^2)/2m equals the real model energy
    // identically, for complex launch points too.
    return 2.0 * E_ * t + ls.px0 * eps_ * t * t / m_ + eps_ * eps_ * t * t * t / (3.0 * m_);
}

TrajectoryPoint Flow::exit_point(const LaunchState& ls) const {
    return at(ls, -ls.px0 / eps_);
}

EndpointJet Flow::endpoint(const LaunchState& ls, Cx t) const {
    const ChannelState& cs = ls.cs;
    EndpointJet j;
    j.x = ls.px0 * t / m_ + eps_ * t * t / (2.0 * m_);
    j.y = ls.y0 + ls.py0 * t / m_;
    j.dx_dy0 = t * cs.pxp / m_;
    j.dx_dt = (ls.px0 + eps_ * t) / m_;
    j.dy_dy0 = 1.0 + t * cs.pyp / m_;
    j.dy_dt = ls.py0 / m_;
    j.det = j.dx_dy0 * j.dy_dt - j.dx_dt * j.dy_dy0;
    // d(det)/dt and d(det)/dy0, from the second derivatives of the
    // launch momenta
    j.ddet_dt = (cs.pxp / m_) * (ls.py0 / m_) - (eps_ / m_) * j.dy_dy0 - j.dx_dt * (cs.pyp / m_);
    j.ddet_dy0 = (t * cs.pxpp / m_) * (ls.py0 / m_) + j.dx_dy0 * (cs.pyp / m_) -
                 (cs.pxp / m_) * j.dy_dy0 - j.dx_dt * (t * cs.pypp / m_);
    return j;
}

EndpointJet Flow::endpoint(Cx y0, Cx t) const { return endpoint(launch(y0), t); }

Cx Flow::total_phase(const LaunchState& ls, Cx t) const {
    return prof_->launch_phase(ls.y0) + action(ls, t);
}

}  // namespace qwire
