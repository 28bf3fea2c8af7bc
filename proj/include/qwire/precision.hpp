#ifndef QWIRE_PRECISION_HPP
#define QWIRE_PRECISION_HPP

#include <cmath>
#include <complex>
#include <limits>

namespace qwire {

// Minimal complex value type usable with multiprecision reals, where
// std::complex is not guaranteed to work.
template <class R>
struct Cplx {
    R re{}, im{};
    Cplx() = default;
    Cplx(R r) : re(std::move(r)) {}
    Cplx(R r, R i) : re(std::move(r)), im(std::move(i)) {}

    Cplx& operator+=(const Cplx& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Cplx& operator-=(const Cplx& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
};

template <class R>
Cplx<R> operator+(const Cplx<R>& a, const Cplx<R>& b) {
    return {a.re + b.re, a.im + b.im};
}
template <class R>
Cplx<R> operator-(const Cplx<R>& a, const Cplx<R>& b) {
    return {a.re - b.re, a.im - b.im};
}
template <class R>
Cplx<R> operator-(const Cplx<R>& a) {
    return {-a.re, -a.im};
}
template <class R>
Cplx<R> operator*(const Cplx<R>& a, const Cplx<R>& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class R>
Cplx<R> operator*(const R& s, const Cplx<R>& a) {
    return {s * a.re, s * a.im};
}
template <class R>
Cplx<R> operator/(const Cplx<R>& a, const Cplx<R>& b) {
    // Smith's algorithm, stable for wide dynamic range
    using std::abs;
    if (abs(b.re) >= abs(b.im)) {
        const R r = b.im / b.re;
        const R d = b.re + b.im * r;
        return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
    }
    const R r = b.re / b.im;
    const R d = b.re * r + b.im;
    return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
}

template <class R>
Cplx<R> conj(const Cplx<R>& a) {
    return {a.re, -a.im};
}

// 1-norm style magnitude, cheap and monotone enough for pivoting
template <class R>
R band_mag(const Cplx<R>& a) {
    using std::abs;
    return abs(a.re) + abs(a.im);
}
inline double band_mag(const std::complex<double>& a) {
    return std::abs(a.real()) + std::abs(a.imag());
}

}  // namespace qwire

#endif
