// Brute-force validator: per-sector time-dependent Schroedinger evolution of
// the relative coordinate on a position grid, with the delta potential
// regularized on the lattice.  Nothing here uses the closed-form amplitudes;
// agreement with them is the cross-check, not an input.
//
// Scheme: Crank-Nicolson (Cayley form)  (1 + i dt H/2) psi' = (1 - i dt H/2) psi
// on a Dirichlet box, H tridiagonal with off = -1/(2m dy^2).  The scheme is
// exactly unitary and, being a rational function of H, conserves <H> exactly;
// its only systematic error is the phase  omega_cn(k) = (2/dt) atan(eps dt/2)
// vs the lattice dispersion eps(k) = (1 - cos k dy)/(m dy^2), third order in
// dt and second order in dy.  momentum_spectrum_backpropagated removes the
// accumulated free phase with omega_cn itself, so residuals reflect only the
// finite delta regularization.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "decoscatter/reduced_density.hpp"
#include "decoscatter/spin_bath.hpp"
#include "decoscatter/wavepacket.hpp"

namespace deco {

enum class DeltaMode { SingleBin, NarrowGaussian };

struct GridOracleConfig {
    double y_extent = 50.0;  // box is [-L, L)
    int n_y = 8192;          // power of two
    double dt = 2.5e-3;
    double t_final = 5.5;
    DeltaMode delta_mode = DeltaMode::SingleBin;
    double gaussian_width = 0.0;  // 0 selects the default 0.05/k0
    PacketSpec spec{};
    ModelParams params{};
    int snapshot_stride = 0;  // 0 = keep only the final state

    double dy() const { return 2.0 * y_extent / n_y; }
    int steps() const;
    double evolved_time() const { return steps() * dt; }
    void validate() const;
};

// One sector's evolution record.  The scalar series are sampled at every
// step (index i = time i*dt); snapshots only at the configured stride.
struct SectorTrajectory {
    SpinSector sector;
    std::vector<double> snapshot_times;
    std::vector<Eigen::VectorXcd> snapshots;
    Eigen::VectorXcd final_state;
    std::vector<double> v1;      // sum_j V_j |psi_j|^2 dy   (first potential moment)
    std::vector<double> v2;      // sum_j V_j^2 |psi_j|^2 dy (regularized second moment)
    std::vector<double> norm;    // discrete norm per step
    std::vector<double> energy;  // <H> per step
    double edge_density_max = 0.0;   // max over time of |psi|^2 at the box walls
    double kinetic_initial = 0.0;    // <T> before the collision
    double kinetic_final = 0.0;      // <T> after the collision
};

struct MomentSeries {
    std::vector<double> t;
    std::vector<double> V;   // <V>(t), bath-averaged
    std::vector<double> V2;  // <V^2>(t), regularized
    double cutoff = 0.0;     // regularization scale 1/dy
};

SectorTrajectory evolve_sector(const SpinSector& sector, const GridOracleConfig& cfg);

// All N+1 sectors, optionally in parallel; per-sector results are
// bit-identical regardless of thread count (no shared state).
std::vector<SectorTrajectory> evolve_all_sectors(const GridOracleConfig& cfg, int threads = 1);

// Integrates |psi|^2 over y < 0 / y > 0 (the y = 0 bin split evenly).
// Throws if the final state still has >= 1e-6 probability within
// |y| < 4 sigma0 of the origin (scattering not complete).
std::pair<double, double> extract_channel_probabilities(const SectorTrajectory& traj,
                                                        const GridOracleConfig& cfg);

// Signed momentum window with dk = pi/L - an exact subset of the position
// box's Fourier bins, so Parseval carries the full norm.
MomentumGrid oracle_window_grid(const GridOracleConfig& cfg, int n_window = 512);

// Direct DFT of the final state onto the window, then the accumulated
// free-evolution phase exp(-i omega_cn(k) T) is divided out.
Eigen::VectorXcd momentum_spectrum_backpropagated(const SectorTrajectory& traj,
                                                  const GridOracleConfig& cfg,
                                                  const MomentumGrid& grid);

// rho = sum_j weight_j |phi_j><phi_j| from the backpropagated spectra;
// bin-comparable with reduced_density::assemble on the same grid.
DensityMatrix oracle_density_matrix(const std::vector<SectorTrajectory>& trajs,
                                    const GridOracleConfig& cfg, int n_window = 512);
DensityMatrix oracle_density_matrix(const GridOracleConfig& cfg, int n_window = 512,
                                    int threads = 1);

// Bath-averaged (<V>, <V^2>_regularized) time series over all sectors.
MomentSeries interaction_energy_moments(const std::vector<SectorTrajectory>& trajs,
                                        const GridOracleConfig& cfg);

}  // namespace deco
