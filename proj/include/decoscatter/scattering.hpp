// Closed-form scattering of a unit-mass-pair relative coordinate on the
// delta potential mu*m_s*delta(y).  Per sector the strength enters only
// through g = 2*m*mu*m_s:
//   B(k) = 2ik/(2ik + g),  A(k) = -g/(2ik + g),  |A|^2 + |B|^2 = 1.
#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "decoscatter/spin_bath.hpp"

namespace deco {

struct ChannelAmplitudes {
    double k = 0.0;             // relative momentum, > 0 (left incidence)
    double m_s = 0.0;           // sector net spin
    double g = 0.0;             // effective strength 2*m*mu*m_s
    std::complex<double> A;     // reflection
    std::complex<double> B;     // transmission
};

enum class ChannelPair { TT, RR, TR, RT };

// Closed-form amplitudes; components are assembled from real arithmetic over
// the common denominator g^2 + 4k^2 so that A(-g) == conj(A(g)) and
// B(-g) == conj(B(g)) hold bit-exactly.
ChannelAmplitudes amplitudes(double k, const SpinSector& sector, const ModelParams& params);

// Phase of the reflected wave relative to a hard wall (A_wall = -1), i.e.
// arg(-A) = -atan(2k/g).  Strictly inside (-pi/2, pi/2) for every g != 0.
double reflected_phase_vs_hard_wall(const ChannelAmplitudes& amp);

// (P_reflect, P_transmit) = (sum w|A|^2, sum w|B|^2) over the bath sectors.
std::pair<double, double> bath_averaged_probabilities(double k,
                                                      const std::vector<SpinSector>& sectors,
                                                      const ModelParams& params);

// sum_j w_j * X_j(k) * conj(Y_j(k2)) with (X,Y) picked by the pair tag.
// Per sector the product is evaluated in closed form over the denominator
// D = (g^2 + 4 k k2) + 2ig(k - k2), and mirror sectors are summed together;
// at k2 == k the TR and RT sums cancel to exactly 0.0 + 0.0i.
std::complex<double> coherence_factor(double k, double k2,
                                      const std::vector<SpinSector>& sectors,
                                      const ModelParams& params, ChannelPair pair);

}  // namespace deco
