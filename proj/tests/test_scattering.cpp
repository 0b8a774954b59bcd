#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "decoscatter/scattering.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace deco;

namespace {
const ModelParams unit{1.0, 1.0, 1};

SpinSector make_sector(int twice_ms) {
    SpinSector s;
    s.twice_ms = twice_ms;
    s.weight = 1.0L;
    return s;
}
}  // namespace

TEST_CASE("m_s = 0 sector is transparent: A = 0, B = 1") {
    auto amp = amplitudes(3.7, make_sector(0), unit);
    CHECK(std::abs(amp.A) == 0.0);
    CHECK(amp.B == std::complex<double>(1.0, 0.0));
}

TEST_CASE("high-energy transparency: |A| < 1e-6 at k = 1e7*g") {
    auto amp = amplitudes(1e7, make_sector(1), {1.0, 1.0, 1});  // g = 1
    CHECK(amp.g == 1.0);
    CHECK(std::abs(amp.A) < 1e-6);
    CHECK(std::abs(amp.B) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("half-transmission point: 2k = g gives |A|^2 = |B|^2 = 1/2") {
    // g = 2*m*mu*m_s = 3 for m=1, mu=3, m_s=1/2; pick k = 3/2.
    auto amp = amplitudes(1.5, make_sector(1), {1.0, 3.0, 1});
    CHECK(amp.g == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(std::norm(amp.A) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::norm(amp.B) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("unitarity and continuity over 1e4 random parameter draws") {
    std::mt19937_64 gen(0xD5C0);
    std::uniform_real_distribution<double> logk(std::log(1e-3), std::log(1e3));
    std::uniform_real_distribution<double> mass(0.1, 10.0);
    std::uniform_real_distribution<double> coupling(-5.0, 5.0);
    double worst_unitarity = 0.0, worst_continuity = 0.0, worst_phase = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double k = std::exp(logk(gen));
        ModelParams p{mass(gen), coupling(gen), 1 + static_cast<int>(gen() % 12)};
        SpinSector s = make_sector(static_cast<int>(gen() % 25) - 12);
        auto amp = amplitudes(k, s, p);
        worst_unitarity = std::max(worst_unitarity,
                                   std::abs(std::norm(amp.A) + std::norm(amp.B) - 1.0));
        worst_continuity = std::max(worst_continuity, std::abs(1.0 + amp.A - amp.B));
        if (amp.g != 0.0)
            worst_phase = std::max(worst_phase, std::abs(reflected_phase_vs_hard_wall(amp)));
    }
    CHECK(worst_unitarity < 1e-12);
    CHECK(worst_continuity < 1e-12);
    CHECK(worst_phase < std::numbers::pi / 2);
}

TEST_CASE("reflected phase: hard-wall limit, quarter-pi point, undefined sector") {
    auto low = amplitudes(1e-9, make_sector(2), {1.0, 1.0, 2});  // g = 2, k -> 0+
    CHECK(std::abs(reflected_phase_vs_hard_wall(low)) < 1e-8);

    auto mid = amplitudes(1.5, make_sector(1), {1.0, 3.0, 1});  // 2k = g
    CHECK(reflected_phase_vs_hard_wall(mid) == doctest::Approx(-std::numbers::pi / 4).epsilon(1e-14));
    // Attractive twin sits at +pi/4: the phase is odd in g.
    auto mirror = amplitudes(1.5, make_sector(-1), {1.0, 3.0, 1});
    CHECK(reflected_phase_vs_hard_wall(mirror) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));

    CHECK_THROWS_AS(reflected_phase_vs_hard_wall(amplitudes(1.0, make_sector(0), unit)),
                    std::domain_error);
}

TEST_CASE("bath-averaged probabilities: hand-evaluated N=1 point and trivial cases") {
    // N=1, m=1, mu=1, k=1: g = +-1 in both sectors, |A|^2 = g^2/(g^2+4k^2) = 1/5.
    auto sectors = enumerate_sectors({1.0, 1.0, 1});
    auto [pr, pt] = bath_averaged_probabilities(1.0, sectors, {1.0, 1.0, 1});
    CHECK(pr == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(pt == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(pr + pt == doctest::Approx(1.0).epsilon(1e-13));

    auto [pr0, pt0] = bath_averaged_probabilities(2.5, sectors, {1.0, 0.0, 1});
    CHECK(pr0 == 0.0);
    CHECK(pt0 == 1.0);
}

TEST_CASE("bath averages are invariant under a coupling sign flip") {
    std::mt19937_64 gen(0xF11B);
    std::uniform_real_distribution<double> logk(std::log(1e-2), std::log(1e2));
    std::uniform_real_distribution<double> coupling(0.05, 4.0);
    for (int i = 0; i < 200; ++i) {
        const double k = std::exp(logk(gen));
        const double mu = coupling(gen);
        const int N = 1 + static_cast<int>(gen() % 9);
        auto sectors = enumerate_sectors({1.0, mu, N});
        auto plus = bath_averaged_probabilities(k, sectors, {1.0, mu, N});
        auto minus = bath_averaged_probabilities(k, sectors, {1.0, -mu, N});
        CHECK(std::abs(plus.first - minus.first) < 1e-12);
        CHECK(std::abs(plus.second - minus.second) < 1e-12);
        auto ctt_p = coherence_factor(k, 1.3 * k, sectors, {1.0, mu, N}, ChannelPair::TT);
        auto ctt_m = coherence_factor(k, 1.3 * k, sectors, {1.0, -mu, N}, ChannelPair::TT);
        CHECK(std::abs(std::abs(ctt_p) - std::abs(ctt_m)) < 1e-12);
    }
}

TEST_CASE("TR and RT coherence cancels to exactly zero at equal momenta") {
    for (int N : {1, 2, 3, 4, 7, 20}) {
        for (double mu : {0.3, 1.0, 2.5}) {
            auto sectors = enumerate_sectors({1.0, mu, N});
            for (double k : {0.1, 1.0, 5.0, 42.0}) {
                auto tr = coherence_factor(k, k, sectors, {1.0, mu, N}, ChannelPair::TR);
                auto rt = coherence_factor(k, k, sectors, {1.0, mu, N}, ChannelPair::RT);
                CHECK(tr.real() == 0.0);
                CHECK(tr.imag() == 0.0);
                CHECK(rt.real() == 0.0);
                CHECK(rt.imag() == 0.0);
            }
        }
    }
}

TEST_CASE("TT coherence: free case is 1; equal-momentum value equals P_transmit") {
    auto sectors = enumerate_sectors({1.0, 0.0, 3});
    auto free_tt = coherence_factor(2.0, 7.0, sectors, {1.0, 0.0, 3}, ChannelPair::TT);
    CHECK(free_tt.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(free_tt.imag() == 0.0);

    auto bath = enumerate_sectors({1.0, 0.7, 6});
    const double k = 1.9;
    auto tt = coherence_factor(k, k, bath, {1.0, 0.7, 6}, ChannelPair::TT);
    auto [pr, pt] = bath_averaged_probabilities(k, bath, {1.0, 0.7, 6});
    CHECK(std::abs(tt.real() - pt) < 1e-12);
    CHECK(tt.imag() == 0.0);
    CHECK(std::abs(tt) <= 1.0 + 1e-15);
}

TEST_CASE("momentum decoherence: |TT factor| strictly below the modulus bound") {
    // N=20, m=1, mu=0.1, k=5, k2=5.5: the sector phases of B(k)B*(k2) disagree,
    // so the weighted sum is strictly shorter than the sum of moduli.
    auto sectors = enumerate_sectors({1.0, 0.1, 20});
    const ModelParams p{1.0, 0.1, 20};
    auto factor = coherence_factor(5.0, 5.5, sectors, p, ChannelPair::TT);
    long double bound = 0.0L;
    for (const auto& s : sectors)
        bound += s.weight * std::abs(amplitudes(5.0, s, p).B) * std::abs(amplitudes(5.5, s, p).B);
    CHECK(std::abs(factor) < static_cast<double>(bound));
}

TEST_CASE("non-positive momenta are rejected") {
    auto sectors = enumerate_sectors({1.0, 1.0, 1});
    CHECK_THROWS_AS(amplitudes(0.0, sectors[0], unit), std::invalid_argument);
    CHECK_THROWS_AS(amplitudes(-1.0, sectors[0], unit), std::invalid_argument);
    CHECK_THROWS_AS(bath_averaged_probabilities(0.0, sectors, unit), std::invalid_argument);
    CHECK_THROWS_AS(coherence_factor(1.0, -2.0, sectors, unit, ChannelPair::TT),
                    std::invalid_argument);
}
