#include "decoscatter/oracle_grid.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace deco {

namespace {

using cplx = std::complex<double>;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Lattice single-bin dispersion and the Cayley phase the scheme actually
// accumulates per unit time for a free plane wave.
double lattice_energy(double k, double dy, double m) {
    return (1.0 - std::cos(k * dy)) / (m * dy * dy);
}

double cayley_phase_rate(double k, const GridOracleConfig& cfg) {
    const double eps = lattice_energy(k, cfg.dy(), cfg.params.m);
    return (2.0 / cfg.dt) * std::atan(0.5 * eps * cfg.dt);
}

std::vector<double> potential_profile(const SpinSector& sector, const GridOracleConfig& cfg) {
    const int n = cfg.n_y;
    const double dy = cfg.dy();
    const double lambda = cfg.params.mu * sector.m_s();
    std::vector<double> v(n, 0.0);
    if (cfg.delta_mode == DeltaMode::SingleBin) {
        v[n / 2] = lambda / dy;
        return v;
    }
    const double w = cfg.gaussian_width > 0.0 ? cfg.gaussian_width : 0.05 / cfg.spec.k0;
    long double mass = 0.0L;
    for (int j = 0; j < n; ++j) {
        const double y = (j - n / 2) * dy;
        v[j] = std::exp(-0.5 * (y / w) * (y / w));
        mass += static_cast<long double>(v[j]) * dy;
    }
    const double scale = lambda / static_cast<double>(mass);
    for (double& x : v) x *= scale;
    return v;
}

struct StepDiagnostics {
    double norm;
    double energy;
    double v1;
    double v2;
};

StepDiagnostics measure(const Eigen::VectorXcd& psi, const std::vector<double>& v,
                        const std::vector<int>& support, double off, double kin_diag, double dy) {
    const int n = static_cast<int>(psi.size());
    long double nrm = 0.0L, en = 0.0L;
    for (int j = 0; j < n; ++j) {
        const cplx p = psi[j];
        const double d2 = std::norm(p);
        nrm += d2;
        cplx h = (kin_diag + v[j]) * p;
        if (j > 0) h += off * psi[j - 1];
        if (j + 1 < n) h += off * psi[j + 1];
        en += p.real() * h.real() + p.imag() * h.imag();
    }
    long double m1 = 0.0L, m2 = 0.0L;
    for (int j : support) {
        const double d2 = std::norm(psi[j]);
        m1 += v[j] * d2;
        m2 += v[j] * v[j] * d2;
    }
    return {static_cast<double>(nrm) * dy, static_cast<double>(en) * dy,
            static_cast<double>(m1) * dy, static_cast<double>(m2) * dy};
}

}  // namespace

int GridOracleConfig::steps() const { return static_cast<int>(std::lround(t_final / dt)); }

void GridOracleConfig::validate() const {
    spec.validate();
    params.validate();
    if (!(y_extent > 0.0)) throw std::invalid_argument("grid oracle: y_extent must be > 0");
    if (!power_of_two(n_y) || n_y < 16)
        throw std::invalid_argument("grid oracle: n_y must be a power of two >= 16");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("grid oracle: dt must be > 0");
    if (!(t_final > 0.0) || steps() < 1)
        throw std::invalid_argument("grid oracle: t_final must cover at least one step");
    if (!(spec.y0 < -10.0 * spec.sigma0))
        throw std::invalid_argument(
            "grid oracle: packet must start well left of the interaction region (y0 < -10 sigma0)");
    if (!(spec.y0 > -y_extent))
        throw std::invalid_argument("grid oracle: packet center lies outside the box");
    if (delta_mode == DeltaMode::NarrowGaussian && gaussian_width > 0.0 &&
        gaussian_width * spec.k0 > 0.05 * (1.0 + 1e-12))
        throw std::invalid_argument(
            "grid oracle: regularized delta wider than 0.05/k0 distorts the phase shift");
}

SectorTrajectory evolve_sector(const SpinSector& sector, const GridOracleConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_y;
    const double dy = cfg.dy();
    const double dt = cfg.dt;
    const double m = cfg.params.m;
    const int steps = cfg.steps();

    const std::vector<double> v = potential_profile(sector, cfg);
    std::vector<int> support;
    for (int j = 0; j < n; ++j)
        if (v[j] != 0.0) support.push_back(j);

    const double off = -1.0 / (2.0 * m * dy * dy);
    const double kin_diag = 1.0 / (m * dy * dy);

    // Initial packet, normalized on the grid.
    Eigen::VectorXcd psi(n);
    {
        const double s2 = 8.0 * cfg.spec.sigma0 * cfg.spec.sigma0;
        long double nrm = 0.0L;
        for (int j = 0; j < n; ++j) {
            const double y = (j - n / 2) * dy;
            const double d = y - cfg.spec.y0;
            psi[j] = std::polar(std::exp(-d * d / s2), cfg.spec.k0 * d);
            nrm += std::norm(psi[j]);
        }
        psi /= std::sqrt(static_cast<double>(nrm) * dy);
    }

    // Cayley split: A psi' = B psi with A = 1 + i dt H/2, B = conj entries.
    // A is tridiagonal with constant off-diagonal alpha; LU factors are
    // precomputed once (l below the diagonal, u on it).
    const cplx alpha(0.0, 0.5 * dt * off);
    std::vector<cplx> bd(n), rd(n), l(n), u(n);
    for (int j = 0; j < n; ++j) {
        const double diag = kin_diag + v[j];
        bd[j] = cplx(1.0, 0.5 * dt * diag);
        rd[j] = std::conj(bd[j]);
    }
    u[0] = bd[0];
    for (int j = 1; j < n; ++j) {
        l[j] = alpha / u[j - 1];
        u[j] = bd[j] - l[j] * alpha;
    }

    SectorTrajectory traj;
    traj.sector = sector;
    traj.v1.reserve(steps + 1);
    traj.v2.reserve(steps + 1);
    traj.norm.reserve(steps + 1);
    traj.energy.reserve(steps + 1);

    auto record = [&](int step) {
        const StepDiagnostics d = measure(psi, v, support, off, kin_diag, dy);
        traj.norm.push_back(d.norm);
        traj.energy.push_back(d.energy);
        traj.v1.push_back(d.v1);
        traj.v2.push_back(d.v2);
        const double edge = std::max(std::norm(psi[0]), std::norm(psi[n - 1]));
        traj.edge_density_max = std::max(traj.edge_density_max, edge);
        if (cfg.snapshot_stride > 0 && (step % cfg.snapshot_stride == 0 || step == steps)) {
            traj.snapshot_times.push_back(step * dt);
            traj.snapshots.push_back(psi);
        }
    };

    record(0);
    traj.kinetic_initial = traj.energy[0] - traj.v1[0];

    std::vector<cplx> z(n);
    for (int step = 1; step <= steps; ++step) {
        // rhs = B psi, forward/backward sweeps solve A psi = rhs in place.
        z[0] = rd[0] * psi[0] - alpha * psi[1];
        for (int j = 1; j < n - 1; ++j)
            z[j] = rd[j] * psi[j] - alpha * (psi[j - 1] + psi[j + 1]) - l[j] * z[j - 1];
        z[n - 1] = rd[n - 1] * psi[n - 1] - alpha * psi[n - 2] - l[n - 1] * z[n - 2];
        psi[n - 1] = z[n - 1] / u[n - 1];
        for (int j = n - 2; j >= 0; --j) psi[j] = (z[j] - alpha * psi[j + 1]) / u[j];
        record(step);
    }

    traj.kinetic_final = traj.energy.back() - traj.v1.back();
    traj.final_state = psi;

    double drift = 0.0;
    for (double nr : traj.norm) drift = std::max(drift, std::abs(nr - 1.0));
    if (drift > 1e-8)
        throw std::runtime_error("grid oracle: norm drifted by " + std::to_string(drift));
    if (traj.edge_density_max >= 1e-8)
        throw std::runtime_error("grid oracle: probability reached the box walls; enlarge y_extent");
    return traj;
}

std::vector<SectorTrajectory> evolve_all_sectors(const GridOracleConfig& cfg, int threads) {
    const std::vector<SpinSector> sectors = enumerate_sectors(cfg.params);
    std::vector<SectorTrajectory> out(sectors.size());
    const int workers =
        std::max(1, std::min<int>(threads, static_cast<int>(sectors.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < sectors.size(); ++i) out[i] = evolve_sector(sectors[i], cfg);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= sectors.size()) return;
            try {
                out[i] = evolve_sector(sectors[i], cfg);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::pair<double, double> extract_channel_probabilities(const SectorTrajectory& traj,
                                                        const GridOracleConfig& cfg) {
    const int n = cfg.n_y;
    const double dy = cfg.dy();
    if (traj.final_state.size() != n)
        throw std::invalid_argument("channel probabilities: trajectory does not match the config");
    long double origin = 0.0L, left = 0.0L, right = 0.0L;
    for (int j = 0; j < n; ++j) {
        const double y = (j - n / 2) * dy;
        const double d2 = std::norm(traj.final_state[j]) * dy;
        if (std::abs(y) < 4.0 * cfg.spec.sigma0) origin += d2;
        if (j < n / 2)
            left += d2;
        else if (j > n / 2)
            right += d2;
        else {
            left += 0.5 * d2;
            right += 0.5 * d2;
        }
    }
    if (origin >= 1e-6)
        throw std::runtime_error(
            "channel probabilities: packet still overlaps the origin; evolve longer");
    return {static_cast<double>(right), static_cast<double>(left)};  // (P_T, P_R)
}

MomentumGrid oracle_window_grid(const GridOracleConfig& cfg, int n_window) {
    if (!power_of_two(n_window) || n_window < 16 || n_window > cfg.n_y)
        throw std::invalid_argument("momentum window: n must be a power of two in [16, n_y]");
    const double dk = std::numbers::pi / cfg.y_extent;
    const double need = cfg.spec.k0 + 8.0 / cfg.spec.sigma0;
    if (0.5 * n_window * dk < need * (1.0 - 1e-12))
        throw std::invalid_argument("momentum window: does not cover the packet support");
    MomentumGrid grid;
    grid.n = n_window;
    grid.dk = dk;
    grid.values.resize(n_window);
    for (int i = 0; i < n_window; ++i) grid.values[i] = (i - n_window / 2) * dk;
    return grid;
}

Eigen::VectorXcd momentum_spectrum_backpropagated(const SectorTrajectory& traj,
                                                  const GridOracleConfig& cfg,
                                                  const MomentumGrid& grid) {
    const int n = cfg.n_y;
    const double dy = cfg.dy();
    if (traj.final_state.size() != n)
        throw std::invalid_argument("momentum spectrum: trajectory does not match the config");
    const double t = cfg.evolved_time();
    const double scale = dy / std::sqrt(2.0 * std::numbers::pi);
    Eigen::VectorXcd phi(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double k = grid.values[i];
        cplx acc = 0.0;
        cplx cur = std::polar(1.0, -k * (-(n / 2) * dy));
        const cplx step = std::polar(1.0, -k * dy);
        for (int j = 0; j < n; ++j) {
            if ((j & 255) == 0) cur = std::polar(1.0, -k * ((j - n / 2) * dy));
            acc += traj.final_state[j] * cur;
            cur *= step;
        }
        phi[i] = acc * scale * std::polar(1.0, cayley_phase_rate(k, cfg) * t);
    }
    return phi;
}

DensityMatrix oracle_density_matrix(const std::vector<SectorTrajectory>& trajs,
                                    const GridOracleConfig& cfg, int n_window) {
    if (trajs.empty()) throw std::invalid_argument("oracle density: no trajectories");
    DensityMatrix rho;
    rho.grid = oracle_window_grid(cfg, n_window);
    rho.elements = Eigen::MatrixXcd::Zero(n_window, n_window);
    for (const SectorTrajectory& traj : trajs) {
        const Eigen::VectorXcd phi = momentum_spectrum_backpropagated(traj, cfg, rho.grid);
        rho.elements += static_cast<double>(traj.sector.weight) * (phi * phi.adjoint());
    }
    return rho;
}

DensityMatrix oracle_density_matrix(const GridOracleConfig& cfg, int n_window, int threads) {
    return oracle_density_matrix(evolve_all_sectors(cfg, threads), cfg, n_window);
}

MomentSeries interaction_energy_moments(const std::vector<SectorTrajectory>& trajs,
                                        const GridOracleConfig& cfg) {
    if (trajs.empty()) throw std::invalid_argument("energy moments: no trajectories");
    const std::size_t len = trajs[0].v1.size();
    for (const SectorTrajectory& traj : trajs)
        if (traj.v1.size() != len || traj.v2.size() != len)
            throw std::invalid_argument("energy moments: trajectories have mismatched lengths");
    MomentSeries series;
    series.cutoff = 1.0 / cfg.dy();
    series.t.resize(len);
    series.V.resize(len);
    series.V2.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        series.t[i] = static_cast<double>(i) * cfg.dt;
        long double m1 = 0.0L, m2 = 0.0L;
        for (const SectorTrajectory& traj : trajs) {
            m1 += traj.sector.weight * static_cast<long double>(traj.v1[i]);
            m2 += traj.sector.weight * static_cast<long double>(traj.v2[i]);
        }
        series.V[i] = static_cast<double>(m1);
        series.V2[i] = static_cast<double>(m2);
    }
    return series;
}

}  // namespace deco
