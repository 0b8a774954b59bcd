#include "decoscatter/wavepacket.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace deco {

void PacketSpec::validate() const {
    if (!(k0 > 0.0) || !std::isfinite(k0))
        throw std::invalid_argument("PacketSpec: central momentum must be positive, got " + std::to_string(k0));
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0))
        throw std::invalid_argument("PacketSpec: width must be positive, got " + std::to_string(sigma0));
    if (!(y0 < 0.0) || !std::isfinite(y0))
        throw std::invalid_argument("PacketSpec: initial separation must be negative (incoming packet), got " +
                                    std::to_string(y0));
}

MomentumGrid make_grid(int n, double k_max) {
    if (n < 2 || (n & (n - 1)) != 0)
        throw std::invalid_argument("make_grid: point count must be a power of two >= 2, got " + std::to_string(n));
    if (!(k_max > 0.0))
        throw std::invalid_argument("make_grid: k_max must be positive");
    MomentumGrid g;
    g.n = n;
    g.dk = 2.0 * k_max / n;
    g.values.resize(n);
    for (int i = 0; i < n; ++i)
        g.values[i] = static_cast<double>(i - n / 2) * g.dk;
    return g;
}

MomentumGrid default_grid(const PacketSpec& spec) {
    spec.validate();
    return make_grid(4096, spec.k0 + 8.0 / spec.sigma0);
}

std::complex<double> relative_amplitude_in(double k, const PacketSpec& spec) {
    spec.validate();
    const double c = std::sqrt(2.0 * spec.sigma0 / std::sqrt(std::numbers::pi));
    const double dk0 = k - spec.k0;
    const double mod = c * std::exp(-2.0 * spec.sigma0 * spec.sigma0 * dk0 * dk0);
    return std::polar(mod, -k * spec.y0);
}

std::complex<double> relative_amplitude_free(double k, double t, const PacketSpec& spec, double m) {
    if (!(m > 0.0))
        throw std::invalid_argument("relative_amplitude_free: mass must be positive");
    return relative_amplitude_in(k, spec) * std::polar(1.0, -k * k / (2.0 * m) * t);
}

std::pair<std::complex<double>, std::complex<double>>
com_factorization_check(double x1, double x2, const PacketSpec& spec) {
    spec.validate();
    const double s2 = spec.sigma0 * spec.sigma0;
    const double c2 = 1.0 / std::sqrt(2.0 * std::numbers::pi * s2);  // squared single-particle norm

    const double d1 = x1 - 0.5 * spec.y0;
    const double d2 = x2 + 0.5 * spec.y0;
    const std::complex<double> product =
        c2 * std::exp(-(d1 * d1 + d2 * d2) / (4.0 * s2)) *
        std::polar(1.0, spec.k0 * (x1 - x2));

    const double Y = 0.5 * (x1 + x2);
    const double y = x1 - x2;
    const double dy = y - spec.y0;
    const std::complex<double> factored =
        c2 * std::exp(-Y * Y / (2.0 * s2)) * std::exp(-dy * dy / (8.0 * s2)) *
        std::polar(1.0, spec.k0 * y);

    return {product, factored};
}

}  // namespace deco
