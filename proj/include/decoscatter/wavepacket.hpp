// Two-particle Gaussian initial state and its center-of-mass/relative split.
// Particles carry opposite carriers +-k0 and opposite offsets +-y0/2, so the
// product factorizes into a stationary COM Gaussian times an incoming
// relative packet  exp(-(y-y0)^2/(8 sigma0^2)) * exp(i k0 (y - y0)), whose
// momentum amplitude is exp(-2 sigma0^2 (k-k0)^2) * exp(-i k y0).
#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace deco {

struct PacketSpec {
    double k0 = 10.0;      // central relative momentum, > 0
    double sigma0 = 2.0;   // single-particle width, > 0
    double y0 = -25.0;     // initial relative separation, < 0 (incoming)
    double narrowness_threshold = 10.0;  // minimum sigma0*k0 for narrow-packet analytics

    double narrowness() const { return sigma0 * k0; }
    void validate() const;  // throws std::invalid_argument on violation
};

// Signed uniform momentum grid k_i = (i - n/2)*dk spanning [-k_max, k_max).
// The form (i - n/2)*dk makes bin n-i the bit-exact mirror of bin i and pins
// k = 0 onto bin n/2.
struct MomentumGrid {
    int n = 0;
    double dk = 0.0;
    std::vector<double> values;

    double k_max() const { return 0.5 * n * dk; }
    int mirror_index(int i) const { return n - i; }  // valid for 1 <= i <= n-1
};

MomentumGrid make_grid(int n, double k_max);

// Default desk-scale grid: n = 4096, k_max = k0 + 8/sigma0 (>= 8 sigma of
// momentum support on both channels).
MomentumGrid default_grid(const PacketSpec& spec);

// Continuum-normalized incoming amplitude: integral |phi|^2 dk = 1.
std::complex<double> relative_amplitude_in(double k, const PacketSpec& spec);

// The same amplitude freely evolved for time t with omega(k) = k^2/(2m);
// a pure phase, so the modulus is t-independent.
std::complex<double> relative_amplitude_free(double k, double t, const PacketSpec& spec, double m);

// Evaluates the two-particle product lambda1(x1)*lambda2(x2) and its
// COM-times-relative factorization at the same point; the two returns agree
// to rounding for all (x1, x2).
std::pair<std::complex<double>, std::complex<double>>
com_factorization_check(double x1, double x2, const PacketSpec& spec);

}  // namespace deco
