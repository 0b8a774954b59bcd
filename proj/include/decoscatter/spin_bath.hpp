// Net-spin sector enumeration for a bath of N spin-1/2 systems prepared
// along the x axis.  The particle-bath coupling is diagonal in the S^3
// product basis and depends on the spins only through m_s = sum_i s3_i,
// so the 2^N-term trace collapses to N+1 sectors with binomial weights.
#pragma once

#include <vector>

namespace deco {

struct ModelParams {
    double m = 1.0;   // particle mass; the relative coordinate keeps 1/(2m) kinetics
    double mu = 1.0;  // delta-coupling strength, any sign
    int N = 1;        // number of bath spins, >= 1

    void validate() const;  // throws std::invalid_argument on violation
};

struct SpinSector {
    int j = 0;          // number of up spins, 0..N
    int twice_ms = 0;   // 2*m_s = 2j - N; kept integral so half-integers stay exact
    long double weight = 0.0L;        // C(N,j)/2^N; long double so N = 10^4 has no underflow
    long double multiplicity = 1.0L;  // C(N,j); exact integer while it fits the 64-bit mantissa

    double m_s() const { return 0.5 * static_cast<double>(twice_ms); }
};

// All N+1 sectors ordered by m_s ascending.  Weights are built by the
// multiplicative recurrence w(j+1) = w(j)*(N-j)/(j+1) from w(0) = 2^-N,
// mirror-assigned so weight(j) == weight(N-j) bit-exactly, then normalized.
std::vector<SpinSector> enumerate_sectors(const ModelParams& params);

// Bath moment sum_j weight_j * m_s^p.  Mirror pairs are summed together,
// so odd p yields exactly 0.0; p = 2 gives N/4.
double sector_moment(const std::vector<SpinSector>& sectors, int p);

}  // namespace deco
