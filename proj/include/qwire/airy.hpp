#ifndef QWIRE_AIRY_HPP
#define QWIRE_AIRY_HPP

#include <complex>

namespace qwire {

struct AiryPair {
    double ai, aip, bi, bip;
};

// Ai, Ai', Bi, Bi' for real argument (series near zero, asymptotic
// expansions beyond).
AiryPair airy(double z);

// Ai and Ai' for complex argument; Maclaurin series inside |z| <= 8,
// sector asymptotics with the rotation connection outside.
void airy_complex(std::complex<double> z, std::complex<double>& ai, std::complex<double>& aip);

}  // namespace qwire

#endif
