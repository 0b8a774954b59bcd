#include "decoscatter/lindblad.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace deco {

namespace {

using cplx = std::complex<double>;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double spectrum_entropy(const Eigen::VectorXd& ev) {
    long double s = 0.0L;
    for (double lambda : ev) {
        if (lambda <= 1e-12) continue;  // positivity is enforced by the caller
        s -= static_cast<long double>(lambda) * std::log(lambda);
    }
    return static_cast<double>(s);
}

// Unitary DFT between the position grid and its momentum bins k_m = m*pi/L.
Eigen::MatrixXcd fourier_matrix(const LindbladConfig& cfg) {
    const int n = cfg.n_y;
    const double dy = cfg.dy();
    const double dk = std::numbers::pi / cfg.y_extent;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::MatrixXcd u(n, n);
    for (int m = 0; m < n; ++m) {
        const double k = (m - n / 2) * dk;
        for (int j = 0; j < n; ++j) {
            const double y = (j - n / 2) * dy;
            u(m, j) = std::polar(scale, -k * y);
        }
    }
    return u;
}

}  // namespace

int LindbladConfig::steps() const { return static_cast<int>(std::lround(t_final / dt)); }

void LindbladConfig::validate() const {
    spec.validate();
    params.validate();
    if (!power_of_two(n_y) || n_y < 16)
        throw std::invalid_argument("lindblad: n_y must be a power of two >= 16");
    if (!(y_extent > 0.0)) throw std::invalid_argument("lindblad: y_extent must be > 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("lindblad: gamma must be finite and >= 0");
    if (!(dt > 0.0) || steps() < 1)
        throw std::invalid_argument("lindblad: need dt > 0 covering at least one step");
    if (sample_stride < 1) throw std::invalid_argument("lindblad: sample_stride must be >= 1");
    if (!(spec.y0 > -y_extent) || !(8.0 * spec.sigma0 < y_extent))
        throw std::invalid_argument("lindblad: packet does not fit inside the box");
}

LindbladResult evolve_lindblad(const LindbladConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_y;
    const double dy = cfg.dy();
    const double dk = std::numbers::pi / cfg.y_extent;
    const double m = cfg.params.m;

    const Eigen::MatrixXcd u = fourier_matrix(cfg);

    // Kinetic spectrum and the two candidate jump spectra on their own axes.
    Eigen::VectorXd kin(n), ydiag(n), kdiag(n);
    for (int i = 0; i < n; ++i) {
        const double k = (i - n / 2) * dk;
        const double y = (i - n / 2) * dy;
        kin[i] = k * k / (2.0 * m);
        kdiag[i] = cfg.spec.sigma0 * k;
        ydiag[i] = y / cfg.spec.sigma0;
    }

    // The integration basis diagonalizes the jump operator; the dissipator is
    // then elementwise.  Position jump: H = U^dag diag(kin) U is dense.
    // Momentum jump: H shares the Fourier eigenbasis and stays diagonal.
    const bool position_jump = cfg.jump == JumpChoice::Position;
    const Eigen::VectorXd& l = position_jump ? ydiag : kdiag;
    Eigen::MatrixXcd h;
    if (position_jump) {
        h = u.adjoint() * kin.asDiagonal() * u;
        h = 0.5 * (h + Eigen::MatrixXcd(h.adjoint()));
    } else {
        h = kin.cast<cplx>().asDiagonal();
    }

    // Pure Gaussian start, normalized in the integration basis.
    Eigen::VectorXcd psi(n);
    for (int j = 0; j < n; ++j) {
        const double d = (j - n / 2) * dy - cfg.spec.y0;
        psi[j] = std::polar(std::exp(-d * d / (8.0 * cfg.spec.sigma0 * cfg.spec.sigma0)),
                            cfg.spec.k0 * d);
    }
    psi /= psi.norm();
    if (!position_jump) psi = u * psi;
    Eigen::MatrixXcd rho = psi * psi.adjoint();

    const Eigen::MatrixXd gain = l * l.transpose();
    const Eigen::VectorXcd l2 = l.cwiseProduct(l).cast<cplx>();
    auto rhs = [&](const Eigen::MatrixXcd& r) -> Eigen::MatrixXcd {
        Eigen::MatrixXcd d = cplx(0.0, -1.0) * (h * r - r * h);
        if (cfg.gamma > 0.0) {
            d.array() += cfg.gamma * gain.array().cast<cplx>() * r.array();
            d -= (0.5 * cfg.gamma) * (l2.asDiagonal() * r + r * l2.asDiagonal());
        }
        return d;
    };

    Eigen::MatrixXcd p2_op;
    if (position_jump) {
        p2_op = u.adjoint() * Eigen::VectorXd(2.0 * m * kin).asDiagonal() * u;
        p2_op = 0.5 * (p2_op + Eigen::MatrixXcd(p2_op.adjoint()));
    }

    LindbladResult out;
    const int steps = cfg.steps();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
    auto record = [&](int step) {
        if (step != 0 && step != steps && step % cfg.sample_stride != 0) return;
        out.series.t.push_back(step * cfg.dt);
        out.series.trace.push_back(rho.trace().real());
        out.series.purity.push_back((rho * rho).trace().real());
        out.series.energy.push_back((h * rho).trace().real());
        if (position_jump)
            out.series.p2.push_back((p2_op * rho).trace().real());
        else {
            long double acc = 0.0L;
            for (int i = 0; i < n; ++i)
                acc += 2.0 * m * kin[i] * rho(i, i).real();
            out.series.p2.push_back(static_cast<double>(acc));
        }
        solver.compute(rho, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = solver.eigenvalues();
        out.series.min_eigenvalue.push_back(ev.minCoeff());
        if (ev.minCoeff() < -1e-8)
            throw std::domain_error("lindblad: density matrix lost positivity");
        out.series.entropy.push_back(spectrum_entropy(ev));
    };

    record(0);
    Eigen::MatrixXcd k1, k2, k3, k4;
    for (int step = 1; step <= steps; ++step) {
        k1 = rhs(rho);
        k2 = rhs(rho + (0.5 * cfg.dt) * k1);
        k3 = rhs(rho + (0.5 * cfg.dt) * k2);
        k4 = rhs(rho + cfg.dt * k3);
        rho += (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + Eigen::MatrixXcd(rho.adjoint()));
        record(step);
    }

    out.final_rho = position_jump ? rho : Eigen::MatrixXcd(u.adjoint() * rho * u);
    return out;
}

double momentum_spread_rate(const LindbladSeries& series) {
    const std::size_t n = series.t.size();
    if (n < 2) throw std::invalid_argument("spread rate: need at least two samples");
    long double st = 0.0L, sp = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        st += series.t[i];
        sp += series.p2[i];
    }
    const double tbar = static_cast<double>(st) / n;
    const double pbar = static_cast<double>(sp) / n;
    long double cov = 0.0L, var = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = series.t[i] - tbar;
        cov += dt * (series.p2[i] - pbar);
        var += dt * dt;
    }
    return static_cast<double>(cov / var);
}

ContrastReport contrast_report(const LindbladConfig& base, const ExactSummary& exact) {
    ContrastReport report;
    for (JumpChoice jump : {JumpChoice::Position, JumpChoice::Momentum}) {
        LindbladConfig cfg = base;
        cfg.jump = jump;
        const LindbladResult res = evolve_lindblad(cfg);
        MechanismSummary row;
        row.label = jump == JumpChoice::Position ? "position jump" : "momentum jump";
        row.entropy_gain = res.series.entropy.back() - res.series.entropy.front();
        row.energy_change_rel =
            (res.series.energy.back() - res.series.energy.front()) / res.series.energy.front();
        row.heating_rate = momentum_spread_rate(res.series);
        report.rows.push_back(row);
    }
    MechanismSummary bath;
    bath.label = "spin bath (exact)";
    bath.entropy_gain = exact.entropy_gain;
    bath.energy_change_rel = exact.energy_change_rel;
    bath.heating_rate = 0.0;
    report.rows.push_back(bath);
    return report;
}

}  // namespace deco
