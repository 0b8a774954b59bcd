// Open-system counterpoint: a single free particle under a Lindblad master
// equation, with the jump operator chosen either as position (the standard
// localization channel, which heats the particle at rate gamma/sigma0^2) or
// as a function of momentum (which dephases without touching the energy).
// Side by side with the spin-bath scattering numbers this separates the two
// notions: entropy growth does not require energy exchange.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "decoscatter/spin_bath.hpp"
#include "decoscatter/wavepacket.hpp"

namespace deco {

enum class JumpChoice { Position, Momentum };

struct LindbladConfig {
    int n_y = 128;           // power of two
    double y_extent = 16.0;  // box is [-L, L)
    double gamma = 0.5;      // jump rate, >= 0
    JumpChoice jump = JumpChoice::Position;
    double dt = 0.01;
    double t_final = 1.5;
    int sample_stride = 5;  // observables recorded every stride-th step
    PacketSpec spec{2.0, 1.0, -4.0};
    ModelParams params{};  // only the mass enters

    double dy() const { return 2.0 * y_extent / n_y; }
    int steps() const;
    void validate() const;
};

struct LindbladSeries {
    std::vector<double> t;
    std::vector<double> trace;
    std::vector<double> purity;
    std::vector<double> energy;   // <H>, kinetic only
    std::vector<double> entropy;  // von Neumann, nats
    std::vector<double> p2;       // <p^2>
    std::vector<double> min_eigenvalue;
};

struct LindbladResult {
    LindbladSeries series;
    Eigen::MatrixXcd final_rho;  // position basis, unit trace up to integrator drift
};

// RK4 integration of  drho/dt = -i[H, rho] + gamma (L rho L' - {L'L, rho}/2).
// H is the spectral kinetic operator; the integration runs in the eigenbasis
// of L (position on the grid, or the Fourier dual), where the dissipator is
// elementwise.  Throws std::domain_error if rho loses positivity beyond
// -1e-8.
LindbladResult evolve_lindblad(const LindbladConfig& cfg);

// Least-squares slope of <p^2>(t); for the position jump this equals
// gamma/sigma0^2, for the momentum jump it is zero.
double momentum_spread_rate(const LindbladSeries& series);

struct MechanismSummary {
    std::string label;
    double entropy_gain = 0.0;        // S(final) - S(initial), nats
    double energy_change_rel = 0.0;   // (E_final - E_initial)/E_initial
    double heating_rate = 0.0;        // d<p^2>/dt
};

// Entropy/energy bookkeeping for the exact scattering model, filled in by
// the caller from the assembled reduced density.
struct ExactSummary {
    double entropy_gain = 0.0;
    double energy_change_rel = 0.0;
};

struct ContrastReport {
    std::vector<MechanismSummary> rows;  // position jump, momentum jump, exact bath
};

// Runs both jump channels from the same base configuration and tabulates
// them against the exact-model summary.
ContrastReport contrast_report(const LindbladConfig& base, const ExactSummary& exact);

}  // namespace deco
