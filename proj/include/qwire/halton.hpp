#ifndef QWIRE_HALTON_HPP
#define QWIRE_HALTON_HPP

namespace qwire {

// Deterministic low-discrepancy sequence; the offset acts as the run seed.
inline double halton(unsigned long i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * double(i % base);
        i /= base;
    }
    return r;
}

struct Halton4 {
    unsigned long offset;
    explicit Halton4(unsigned long seed) : offset(seed % 100003 + 17) {}
    void get(unsigned long i, double out[4]) const {
        static const unsigned bases[4] = {2, 3, 5, 7};
        for (int k = 0; k < 4; ++k) out[k] = halton(i + offset, bases[k]);
    }
};

}  // namespace qwire

#endif
