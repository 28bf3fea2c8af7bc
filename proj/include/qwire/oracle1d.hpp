#ifndef QWIRE_ORACLE1D_HPP
#define QWIRE_ORACLE1D_HPP

#include <complex>

#include "qwire/params.hpp"

namespace qwire {

// Exact linear-potential solution for the no-impurity, zero-velocity
// wire edge: decaying channel value at x = 0, purely outgoing wave
// beyond the turning point.
class Airy1D {
  public:
    explicit Airy1D(const ModelParams& p);

    // wavefunction normalized to psi(0) = 1
    std::complex<double> psi(double x) const;

    // flux-normalized transmission probability; approaches the WKB form
    // exp(-4 sqrt(2m) D0^{3/2} / (3 hbar eps)) for deep barriers
    double transmission() const;

    // escape rate J/N of the under-barrier state truncated at x_mask
    double decay_rate(double x_mask) const;

    double turning_point() const { return xt_; }

  private:
    ModelParams p_;
    double c_;   // (2 m eps / hbar^2)^{1/3}
    double xt_;  // D0 / eps
    std::complex<double> denom_;
};

}  // namespace qwire

#endif
