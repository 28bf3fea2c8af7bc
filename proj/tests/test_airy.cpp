#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qwire/airy.hpp"

using namespace qwire;

namespace {

struct Ref {
    double z, ai, aip, bi, bip;
};

// reference values computed with an independent special-function library
const Ref kRef[] = {
    {0.0, 0.3550280538878172, -0.2588194037928068, 0.6149266274460007, 0.4482883573538264},
    {0.5, 0.23169360648083343, -0.224910532664684, 0.8542770431031554, 0.5445725641405924},
    {1.0, 0.13529241631288147, -0.15914744129679328, 1.2074235949528715, 0.9324359333927756},
    {3.0, 0.006591139357460717, -0.011912976705951313, 14.037328963730229, 22.92221496638217},
    {4.9, 0.00013599211701506735, -0.00030761599633764933, 529.4253580222324, 1143.0822653649961},
    {5.1, 8.613242706478854e-05, -0.0001985325478818055, 819.2096586799606, 1807.3344813513665},
    {7.0, 7.492128863997157e-07, -2.0081508947387894e-06, 80327.79070943026, 209552.67087397128},
    {10.0, 1.1047532552898654e-10, -3.520633676738912e-10, 455641153.54822654, 1429236134.48287},
    {14.0, 9.920205491192376e-17, -3.729310110017901e-16, 428805361786534.0, 1596691411588002.8},
    {-0.5, 0.4757280916105395, -0.2040816703395474, 0.3803526597510537, 0.5059337136238472},
    {-2.5, -0.11232506769296623, 0.6788527342647943, -0.43242247184070526, -0.2204201548746298},
    {-4.9, 0.3745363547058387, 0.14695742731095712, -0.057746553140435794, 0.8272190333606801},
    {-5.1, 0.30952599628731775, 0.4945859983849362, -0.2120891315690361, 0.6894851284220518},
    {-8.0, -0.05270505035638643, 0.9355609381983064, -0.33125158075113775, -0.15945049781298207},
    {-12.0, -0.06655517505437264, 1.0231104533679707, -0.29571991207807313, -0.23673219783112154},
};

struct CRef {
    double zr, zi, air, aii, aipr, aipi;
};

const CRef kCRef[] = {
    {1.0, 1.0, 0.06045830837183795, -0.1518895658771816, -0.13062795349964754,
     0.16306759644932348},
    {-2.0, 0.5, 0.29003094106266114, 0.33030787622395835, 0.7458883289066512,
     -0.2743194885816866},
    {3.0, -2.0, -0.009677201058610238, -0.0055246891117327074, 0.020990085245160245,
     0.005347465695574647},
    {5.0, 3.0, 0.00022326280609943916, -0.00016963364609607958, -0.0006335427430931992,
     0.00026154556220239127},
    {-6.0, 1.0, -1.8665305812449655, 0.9559654835184952, 2.6829944789224838, 4.355480324086109},
    {-4.0, -6.0, 50174.26659710327, -42686.151411320054, 37220.58915109714, 170532.1827494021},
    {9.0, 2.0, 3.3450075429290916e-09, 7.389758152523508e-10, -9.942210535784425e-09,
     -3.339164644514022e-09},
    {-9.0, 3.0, -908.1465203290876, -1010.9009728774988, -2640.4487257505384, 3226.9276113179476},
};

}  // namespace

TEST_CASE("real Airy against reference values") {
    for (const Ref& r : kRef) {
        AiryPair a = airy(r.z);
        CHECK(a.ai == doctest::Approx(r.ai).epsilon(5e-8));
        CHECK(a.aip == doctest::Approx(r.aip).epsilon(5e-8));
        CHECK(a.bi == doctest::Approx(r.bi).epsilon(5e-8));
        CHECK(a.bip == doctest::Approx(r.bip).epsilon(5e-8));
    }
}

TEST_CASE("Wronskian identity") {
    for (double z = -11.0; z <= 11.0; z += 0.37) {
        AiryPair a = airy(z);
        CHECK(a.ai * a.bip - a.aip * a.bi == doctest::Approx(1.0 / M_PI).epsilon(5e-8));
    }
}

TEST_CASE("complex Airy against reference values") {
    for (const CRef& r : kCRef) {
        std::complex<double> ai, aip;
        airy_complex({r.zr, r.zi}, ai, aip);
        const double s = std::abs(std::complex<double>(r.air, r.aii));
        CHECK(std::abs(ai - std::complex<double>(r.air, r.aii)) < 1e-9 * s);
        const double sp = std::abs(std::complex<double>(r.aipr, r.aipi));
        CHECK(std::abs(aip - std::complex<double>(r.aipr, r.aipi)) < 1e-9 * sp);
    }
}

TEST_CASE("complex Airy matches real Airy on the real axis") {
    for (double z = -7.5; z <= 7.5; z += 0.5) {
        std::complex<double> ai, aip;
        airy_complex({z, 0.0}, ai, aip);
        AiryPair a = airy(z);
        CHECK(std::abs(ai.real() - a.ai) < 5e-9 * (1.0 + std::abs(a.ai)));
        CHECK(std::abs(ai.imag()) < 1e-9);
    }
}
