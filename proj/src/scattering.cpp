#include "decoscatter/scattering.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace deco {

namespace {

void require_positive_momentum(double k, const char* where) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument(std::string(where) +
                                    ": momentum must be positive (left incidence covers k < 0 by parity), got " +
                                    std::to_string(k));
}

// X(k)*conj(Y(k2)) for one sector.  All four products share the denominator
// D = (g + 2ik)(g - 2ik2) = (g^2 + 4 k k2) + 2ig(k - k2); the numerators are
//   TT: 4 k k2,   RR: g^2,   TR: -2ikg,   RT: +2i k2 g.
std::complex<double> pair_product(double k, double k2, double g, ChannelPair pair) {
    const std::complex<double> D(g * g + 4.0 * k * k2, 2.0 * g * (k - k2));
    switch (pair) {
        case ChannelPair::TT: return std::complex<double>(4.0 * k * k2, 0.0) / D;
        case ChannelPair::RR: return std::complex<double>(g * g, 0.0) / D;
        case ChannelPair::TR: return std::complex<double>(0.0, -2.0 * k * g) / D;
        case ChannelPair::RT: return std::complex<double>(0.0, 2.0 * k2 * g) / D;
    }
    throw std::logic_error("coherence_factor: unknown channel pair");
}

}  // namespace

ChannelAmplitudes amplitudes(double k, const SpinSector& sector, const ModelParams& params) {
    require_positive_momentum(k, "amplitudes");
    params.validate();

    ChannelAmplitudes out;
    out.k = k;
    out.m_s = sector.m_s();
    out.g = 2.0 * params.m * params.mu * out.m_s;

    const double d = out.g * out.g + 4.0 * k * k;  // |2ik + g|^2
    const double cross = 2.0 * k * out.g;
    out.A = std::complex<double>(-out.g * out.g / d, cross / d);
    out.B = std::complex<double>(4.0 * k * k / d, cross / d);
    return out;
}

double reflected_phase_vs_hard_wall(const ChannelAmplitudes& amp) {
    if (amp.m_s == 0.0 || amp.g == 0.0)
        throw std::domain_error("reflected_phase_vs_hard_wall: phase undefined in the m_s = 0 sector (A = 0)");
    // -A = (g^2 - 2ikg)/(g^2 + 4k^2) has strictly positive real part, so the
    // phase lives in the open interval (-pi/2, pi/2).
    return std::arg(-amp.A);
}

std::pair<double, double> bath_averaged_probabilities(double k,
                                                      const std::vector<SpinSector>& sectors,
                                                      const ModelParams& params) {
    require_positive_momentum(k, "bath_averaged_probabilities");
    params.validate();
    long double pr = 0.0L, pt = 0.0L;
    for (const auto& s : sectors) {
        const double g = 2.0 * params.m * params.mu * s.m_s();
        const double d = g * g + 4.0 * k * k;
        pr += s.weight * static_cast<long double>(g * g / d);
        pt += s.weight * static_cast<long double>(4.0 * k * k / d);
    }
    return {static_cast<double>(pr), static_cast<double>(pt)};
}

std::complex<double> coherence_factor(double k, double k2,
                                      const std::vector<SpinSector>& sectors,
                                      const ModelParams& params, ChannelPair pair) {
    require_positive_momentum(k, "coherence_factor");
    require_positive_momentum(k2, "coherence_factor");
    params.validate();

    const int N = static_cast<int>(sectors.size()) - 1;
    // Mirror sectors carry g and -g with equal weight; summing each pair as a
    // unit makes the analytic TR/RT cancellation at k2 == k exact in floats.
    std::complex<long double> acc(0.0L, 0.0L);
    auto term = [&](const SpinSector& s) {
        const double g = 2.0 * params.m * params.mu * s.m_s();
        const std::complex<double> v = pair_product(k, k2, g, pair);
        return std::complex<long double>(s.weight * v.real(), s.weight * v.imag());
    };
    for (int j = 0; 2 * j < N; ++j) acc += term(sectors[j]) + term(sectors[N - j]);
    if (N % 2 == 0) acc += term(sectors[N / 2]);
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

}  // namespace deco
