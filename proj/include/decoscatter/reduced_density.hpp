// Post-scattering reduced density matrix of the relative motion, traced
// over the spin bath.  Sampled on a signed momentum grid with the
// Delta-k-weighted trace convention: sum_i rho(k_i,k_i) dk = 1, and the
// physical (grid-stable) eigenvalues are those of rho*dk.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "decoscatter/scattering.hpp"
#include "decoscatter/spin_bath.hpp"
#include "decoscatter/wavepacket.hpp"

namespace deco {

struct DensityMatrix {
    MomentumGrid grid;
    Eigen::MatrixXcd elements;

    double trace() const;  // Delta-k-weighted, = 1 for a physical state
};

struct NarrowPacketDensity {
    double p_T = 1.0;                    // sum w |B(k0)|^2
    double p_R = 0.0;                    // sum w |A(k0)|^2
    std::complex<double> offdiag{0.0};   // +k0/-k0 coherence; exactly 0 for the spin-x bath
};

// Incoming amplitude sampled on the k > 0 bins and renormalized so the
// discrete Delta-k norm is exactly 1 (zero elsewhere).
Eigen::VectorXcd sampled_incoming(const PacketSpec& spec, const MomentumGrid& grid);

// Per-sector outgoing state: B(k)f(k) on the +k bins, A(k)f(k) on their
// mirror bins.  Unit Delta-k norm by unitarity.
Eigen::VectorXcd outgoing_sector_state(const SpinSector& sector, const PacketSpec& spec,
                                       const MomentumGrid& grid, const ModelParams& params);

// rho = sum_j weight_j |psi_j><psi_j| over the bath sectors.
DensityMatrix assemble(const std::vector<SpinSector>& sectors, const PacketSpec& spec,
                       const MomentumGrid& grid, const ModelParams& params);

// 2x2 narrow-packet reduction at k = k0; requires sigma0*k0 >= threshold.
NarrowPacketDensity narrow_packet_density(const PacketSpec& spec,
                                          const std::vector<SpinSector>& sectors,
                                          const ModelParams& params);

// -sum lambda ln lambda over the Delta-k-weighted spectrum, eigenvalues
// below 1e-12 clipped to zero.  Validates Hermiticity and positivity.
double von_neumann_entropy(const DensityMatrix& rho);

// Entropy of the narrow 2x2 state via its eigenvalue list {p_T, p_R}.
double narrow_entropy(const NarrowPacketDensity& d);

// -p ln p - (1-p) ln(1-p) with 0 ln 0 := 0.
double binary_entropy(double p);

// Tr[(rho*dk)^2]; 1 for a pure state.
double purity(const DensityMatrix& rho);

// Delta-k-weighted <k^2>/(2m) of the diagonal.
double mean_kinetic_energy(const DensityMatrix& rho, double m);

// Entropy computed from the (N+1)x(N+1) Gram matrix of the weighted sector
// states - the same nonzero spectrum as assemble()+eigensolve, at O(N^2 n)
// cost instead of O(n^3).  Used for fine grids.
double gram_entropy(const std::vector<SpinSector>& sectors, const PacketSpec& spec,
                    const MomentumGrid& grid, const ModelParams& params);

// Normalized off-diagonal survival |rho(k,k')|/sqrt(rho(k,k) rho(k',k')).
// Entries whose diagonal falls below 1e-14 are undefined and marked NaN.
Eigen::MatrixXd coherence_suppression_map(const PacketSpec& spec,
                                          const std::vector<SpinSector>& sectors,
                                          const MomentumGrid& grid, const ModelParams& params);

}  // namespace deco
