#include "decoscatter/reduced_density.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace deco {

namespace {

constexpr double kEigenvalueClip = 1e-12;

void require_coverage(const MomentumGrid& grid, const PacketSpec& spec) {
    const double needed = spec.k0 + 8.0 / spec.sigma0;
    if (grid.k_max() < needed * (1.0 - 1e-12))
        throw std::invalid_argument("grid covers |k| <= " + std::to_string(grid.k_max()) +
                                    " but the packet needs |k| <= " + std::to_string(needed));
}

double entropy_of_eigenvalues(const Eigen::VectorXd& ev) {
    long double s = 0.0L;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double lam = ev[i];
        if (lam < -1e-10)
            throw std::domain_error("von_neumann_entropy: eigenvalue " + std::to_string(lam) +
                                    " below the -1e-10 positivity floor");
        if (lam < kEigenvalueClip) continue;  // 0 ln 0 := 0
        s -= static_cast<long double>(lam) * std::log(lam);
    }
    return static_cast<double>(s);
}

}  // namespace

double DensityMatrix::trace() const {
    long double t = 0.0L;
    for (Eigen::Index i = 0; i < elements.rows(); ++i) t += elements(i, i).real();
    return static_cast<double>(t) * grid.dk;
}

Eigen::VectorXcd sampled_incoming(const PacketSpec& spec, const MomentumGrid& grid) {
    spec.validate();
    require_coverage(grid, spec);
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(grid.n);
    long double norm2 = 0.0L;
    for (int i = grid.n / 2 + 1; i < grid.n; ++i) {
        f[i] = relative_amplitude_in(grid.values[i], spec);
        norm2 += std::norm(f[i]) * grid.dk;
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(norm2));
    for (int i = grid.n / 2 + 1; i < grid.n; ++i) f[i] *= scale;
    return f;
}

Eigen::VectorXcd outgoing_sector_state(const SpinSector& sector, const PacketSpec& spec,
                                       const MomentumGrid& grid, const ModelParams& params) {
    const Eigen::VectorXcd f = sampled_incoming(spec, grid);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(grid.n);
    for (int i = grid.n / 2 + 1; i < grid.n; ++i) {
        const auto amp = amplitudes(grid.values[i], sector, params);
        psi[i] = amp.B * f[i];
        psi[grid.mirror_index(i)] = amp.A * f[i];
    }
    return psi;
}

DensityMatrix assemble(const std::vector<SpinSector>& sectors, const PacketSpec& spec,
                       const MomentumGrid& grid, const ModelParams& params) {
    DensityMatrix rho;
    rho.grid = grid;
    rho.elements = Eigen::MatrixXcd::Zero(grid.n, grid.n);
    for (const auto& sector : sectors) {
        const Eigen::VectorXcd psi = outgoing_sector_state(sector, spec, grid, params);
        rho.elements.noalias() += static_cast<double>(sector.weight) * (psi * psi.adjoint());
    }
    return rho;
}

NarrowPacketDensity narrow_packet_density(const PacketSpec& spec,
                                          const std::vector<SpinSector>& sectors,
                                          const ModelParams& params) {
    spec.validate();
    if (spec.narrowness() < spec.narrowness_threshold)
        throw std::invalid_argument(
            "narrow_packet_density: sigma0*k0 = " + std::to_string(spec.narrowness()) +
            " is below the narrowness threshold " + std::to_string(spec.narrowness_threshold) +
            "; use assemble() for broad packets");
    NarrowPacketDensity d;
    auto [pr, pt] = bath_averaged_probabilities(spec.k0, sectors, params);
    d.p_R = pr;
    d.p_T = pt;
    d.offdiag = coherence_factor(spec.k0, spec.k0, sectors, params, ChannelPair::TR);
    return d;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const auto& M = rho.elements;
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    const double herm_defect = (M - M.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > 1e-12 * scale)
        throw std::domain_error("von_neumann_entropy: matrix is not Hermitian (defect " +
                                std::to_string(herm_defect) + ")");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(M * rho.grid.dk,
                                                           Eigen::EigenvaluesOnly);
    return entropy_of_eigenvalues(solver.eigenvalues());
}

double narrow_entropy(const NarrowPacketDensity& d) {
    Eigen::VectorXd ev(2);
    ev << d.p_T, d.p_R;
    return entropy_of_eigenvalues(ev);
}

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("binary_entropy: probability out of [0,1]: " + std::to_string(p));
    double s = 0.0;
    if (p > kEigenvalueClip) s -= p * std::log(p);
    if (1.0 - p > kEigenvalueClip) s -= (1.0 - p) * std::log(1.0 - p);
    return s;
}

double purity(const DensityMatrix& rho) {
    // Tr[(rho dk)^2] = sum_ij |rho_ij|^2 dk^2 for Hermitian rho.
    return rho.elements.squaredNorm() * rho.grid.dk * rho.grid.dk;
}

double mean_kinetic_energy(const DensityMatrix& rho, double m) {
    if (!(m > 0.0)) throw std::invalid_argument("mean_kinetic_energy: mass must be positive");
    long double e = 0.0L;
    for (int i = 0; i < rho.grid.n; ++i) {
        const double k = rho.grid.values[i];
        e += rho.elements(i, i).real() * k * k;
    }
    return static_cast<double>(e) * rho.grid.dk / (2.0 * m);
}

double gram_entropy(const std::vector<SpinSector>& sectors, const PacketSpec& spec,
                    const MomentumGrid& grid, const ModelParams& params) {
    // rho = sum_a w_a |psi_a><psi_a| shares its nonzero spectrum with the
    // Gram matrix G_ab = sqrt(w_a w_b) <psi_a|psi_b> dk.
    const int ns = static_cast<int>(sectors.size());
    Eigen::MatrixXcd states(grid.n, ns);
    for (int a = 0; a < ns; ++a)
        states.col(a) = outgoing_sector_state(sectors[a], spec, grid, params);
    Eigen::MatrixXcd G(ns, ns);
    for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b) {
            const double wa = static_cast<double>(sectors[a].weight);
            const double wb = static_cast<double>(sectors[b].weight);
            G(a, b) = std::sqrt(wa * wb) * states.col(a).dot(states.col(b)) * grid.dk;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (G + G.adjoint()),
                                                           Eigen::EigenvaluesOnly);
    return entropy_of_eigenvalues(solver.eigenvalues());
}

Eigen::MatrixXd coherence_suppression_map(const PacketSpec& spec,
                                          const std::vector<SpinSector>& sectors,
                                          const MomentumGrid& grid, const ModelParams& params) {
    const DensityMatrix rho = assemble(sectors, spec, grid, params);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd map(grid.n, grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double di = rho.elements(i, i).real();
        for (int j = 0; j < grid.n; ++j) {
            const double dj = rho.elements(j, j).real();
            map(i, j) = (di < 1e-14 || dj < 1e-14)
                            ? nan
                            : std::abs(rho.elements(i, j)) / std::sqrt(di * dj);
        }
    }
    return map;
}

}  // namespace deco
