#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "decoscatter/reduced_density.hpp"

#include <cmath>

using namespace deco;

namespace {
const PacketSpec bench{10.0, 2.0, -25.0};
const ModelParams n1{1.0, 1.0, 1};

MomentumGrid test_grid(const PacketSpec& spec, int n = 512) {
    return make_grid(n, spec.k0 + 8.0 / spec.sigma0);
}
}  // namespace

TEST_CASE("free outgoing state equals the incoming amplitude") {
    auto grid = test_grid(bench);
    const ModelParams free_params{1.0, 0.0, 1};
    auto sectors = enumerate_sectors(free_params);
    auto f = sampled_incoming(bench, grid);
    auto psi = outgoing_sector_state(sectors[0], bench, grid, free_params);
    CHECK((psi - f).cwiseAbs().maxCoeff() == 0.0);

    // The m_s = 0 sector of an interacting bath is the same free case.
    auto sectors2 = enumerate_sectors({1.0, 1.0, 2});
    auto psi0 = outgoing_sector_state(sectors2[1], bench, grid, {1.0, 1.0, 2});
    REQUIRE(sectors2[1].twice_ms == 0);
    CHECK((psi0 - f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("outgoing sector state keeps unit Delta-k norm") {
    auto grid = test_grid(bench);
    auto sectors = enumerate_sectors({1.0, 1.3, 4});
    for (const auto& s : sectors) {
        auto psi = outgoing_sector_state(s, bench, grid, {1.0, 1.3, 4});
        CHECK(std::abs(psi.squaredNorm() * grid.dk - 1.0) < 1e-8);
    }
}

TEST_CASE("reflected-side norm matches |A(k0)|^2 for the narrow benchmark packet") {
    auto grid = test_grid(bench);
    auto sectors = enumerate_sectors(n1);
    auto psi = outgoing_sector_state(sectors[1], bench, grid, n1);  // m_s = +1/2, g = 1
    long double reflected = 0.0L;
    for (int i = 0; i < grid.n / 2; ++i) reflected += std::norm(psi[i]) * grid.dk;
    const double expect = std::norm(amplitudes(bench.k0, sectors[1], n1).A);  // = 1/401
    CHECK(std::abs(static_cast<double>(reflected) - expect) < 1e-3);
    CHECK(expect == doctest::Approx(1.0 / 401.0).epsilon(1e-12));
}

TEST_CASE("insufficient grid coverage is rejected") {
    auto small = make_grid(256, bench.k0);  // misses the +8/sigma0 band
    CHECK_THROWS_AS(sampled_incoming(bench, small), std::invalid_argument);
}

TEST_CASE("assembled density matrix: Hermitian, positive, unit trace, correct rank") {
    auto grid = test_grid(bench);
    auto sectors = enumerate_sectors({1.0, 0.8, 3});
    auto rho = assemble(sectors, bench, grid, {1.0, 0.8, 3});

    CHECK(std::abs(rho.trace() - 1.0) < 1e-8);
    const double scale = rho.elements.cwiseAbs().maxCoeff();
    CHECK((rho.elements - rho.elements.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.elements * grid.dk,
                                                       Eigen::EigenvaluesOnly);
    int rank = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        CHECK(es.eigenvalues()[i] >= -1e-10);
        if (es.eigenvalues()[i] > 1e-10) ++rank;
    }
    CHECK(rank <= 2 * static_cast<int>(sectors.size()));
}

TEST_CASE("free case is pure: purity 1, entropy 0") {
    auto grid = test_grid(bench);
    const ModelParams free_params{1.0, 0.0, 2};
    auto sectors = enumerate_sectors(free_params);
    auto rho = assemble(sectors, bench, grid, free_params);
    CHECK(std::abs(purity(rho) - 1.0) < 1e-8);
    CHECK(von_neumann_entropy(rho) < 1e-8);
}

TEST_CASE("N=1 narrow packet: eigenvalues cluster at {p_T, p_R}") {
    auto grid = test_grid(bench);
    auto sectors = enumerate_sectors(n1);
    auto rho = assemble(sectors, bench, grid, n1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.elements * grid.dk,
                                                       Eigen::EigenvaluesOnly);
    auto ev = es.eigenvalues();
    auto [pr, pt] = bath_averaged_probabilities(bench.k0, sectors, n1);
    // Two nonzero eigenvalues; everything else at numerical zero.
    CHECK(ev[ev.size() - 1] == doctest::Approx(pt).epsilon(1e-2));
    CHECK(ev[ev.size() - 2] == doctest::Approx(pr).epsilon(1e-2));
    for (Eigen::Index i = 0; i < ev.size() - 2; ++i) CHECK(std::abs(ev[i]) < 1e-10);
}

TEST_CASE("mirror off-diagonal rho(k, -k) vanishes to rounding dust") {
    auto grid = test_grid(bench);
    auto sectors = enumerate_sectors({1.0, 1.0, 4});
    auto rho = assemble(sectors, bench, grid, {1.0, 1.0, 4});
    const double scale = rho.elements.cwiseAbs().maxCoeff();
    for (int i = grid.n / 2 + 1; i < grid.n; ++i)
        CHECK(std::abs(rho.elements(i, grid.mirror_index(i))) <= 1e-12 * scale);
}

TEST_CASE("narrow-packet reduction: frozen N=1 point and trivial free case") {
    PacketSpec spec{1.0, 20.0, -300.0};  // sigma0*k0 = 20, narrow
    auto sectors = enumerate_sectors(n1);
    auto d = narrow_packet_density(spec, sectors, n1);
    CHECK(d.p_R == doctest::Approx(0.2).epsilon(1e-14));   // hand value: g^2/(g^2+4k^2) = 1/5
    CHECK(d.p_T == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(d.offdiag.real() == 0.0);
    CHECK(d.offdiag.imag() == 0.0);
    CHECK(d.p_T + d.p_R == doctest::Approx(1.0).epsilon(1e-13));

    const ModelParams free_params{1.0, 0.0, 1};
    auto d0 = narrow_packet_density(spec, enumerate_sectors(free_params), free_params);
    CHECK(d0.p_T == 1.0);
    CHECK(d0.p_R == 0.0);

    PacketSpec broad{1.0, 2.0, -25.0};  // sigma0*k0 = 2 < 10
    CHECK_THROWS_AS(narrow_packet_density(broad, sectors, n1), std::invalid_argument);
}

TEST_CASE("entropy: two-level test matrix gives ln 2; narrow N=1 point gives H(0.2)") {
    DensityMatrix half;
    half.grid = make_grid(2, 1.0);
    half.elements = Eigen::MatrixXcd::Zero(2, 2);
    half.elements(0, 0) = 0.5 / half.grid.dk;
    half.elements(1, 1) = 0.5 / half.grid.dk;
    CHECK(von_neumann_entropy(half) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    PacketSpec spec{1.0, 20.0, -300.0};
    auto d = narrow_packet_density(spec, enumerate_sectors(n1), n1);
    const double expect = -0.2 * std::log(0.2) - 0.8 * std::log(0.8);
    CHECK(narrow_entropy(d) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(binary_entropy(d.p_R) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("entropy rejects a non-Hermitian matrix") {
    DensityMatrix bad;
    bad.grid = make_grid(2, 1.0);
    bad.elements = Eigen::MatrixXcd::Zero(2, 2);
    bad.elements(0, 0) = 0.5 / bad.grid.dk;
    bad.elements(1, 1) = 0.5 / bad.grid.dk;
    bad.elements(0, 1) = std::complex<double>(0.0, 0.2);
    bad.elements(1, 0) = std::complex<double>(0.0, 0.2);  // conj would be -0.2i
    CHECK_THROWS_AS(von_neumann_entropy(bad), std::domain_error);
}

TEST_CASE("narrow-packet entropy never exceeds ln 2; flip symmetry holds") {
    for (int N : {1, 2, 5, 40, 100}) {
        for (double mu : {0.05, 0.7, 3.0}) {
            for (double k0 : {0.3, 1.0, 8.0, 50.0}) {
                PacketSpec spec{k0, 40.0 / k0, -400.0 / k0};  // sigma0*k0 = 40
                ModelParams p{1.0, mu, N};
                auto sectors = enumerate_sectors(p);
                const double s = narrow_entropy(narrow_packet_density(spec, sectors, p));
                CHECK(s <= std::log(2.0) + 1e-10);
                ModelParams pm{1.0, -mu, N};
                const double sm = narrow_entropy(narrow_packet_density(spec, sectors, pm));
                CHECK(std::abs(s - sm) < 1e-10);
            }
        }
    }
}

TEST_CASE("Gram-route entropy equals the dense eigensolve") {
    auto grid = test_grid(bench, 256);
    auto sectors = enumerate_sectors({1.0, 1.5, 3});
    auto rho = assemble(sectors, bench, grid, {1.0, 1.5, 3});
    const double dense = von_neumann_entropy(rho);
    const double gram = gram_entropy(sectors, bench, grid, {1.0, 1.5, 3});
    CHECK(gram == doctest::Approx(dense).epsilon(1e-9));
}

TEST_CASE("assembled entropy converges to the binary prediction as the packet narrows") {
    // sigma0*k0 = 50 at the half-transmission point g = 2k0, where the
    // narrow prediction is exactly ln 2.
    PacketSpec spec{5.0, 10.0, -120.0};
    ModelParams p{1.0, 10.0, 1};
    auto sectors = enumerate_sectors(p);
    auto grid = make_grid(2048, spec.k0 + 8.0 / spec.sigma0);
    const double full = gram_entropy(sectors, spec, grid, p);
    const double narrow = narrow_entropy(narrow_packet_density(spec, sectors, p));
    CHECK(std::abs(full - narrow) / narrow < 0.01);
}

TEST_CASE("kinetic energy of the assembled state equals the incoming packet's") {
    auto grid = test_grid(bench);
    auto sectors = enumerate_sectors({1.0, 1.2, 2});
    auto rho = assemble(sectors, bench, grid, {1.0, 1.2, 2});
    auto f = sampled_incoming(bench, grid);
    long double ein = 0.0L;
    for (int i = 0; i < grid.n; ++i)
        ein += std::norm(f[i]) * grid.values[i] * grid.values[i];
    const double incoming = static_cast<double>(ein) * grid.dk / 2.0;
    CHECK(std::abs(mean_kinetic_energy(rho, 1.0) - incoming) / incoming < 1e-6);
}

TEST_CASE("suppression map: free case is 1, mirror points are 0, broad packet decoheres monotonically") {
    PacketSpec broad{1.0, 2.0, -25.0};  // sigma0*k0 = 2
    auto grid = make_grid(512, broad.k0 + 8.0 / broad.sigma0);

    const ModelParams free_params{1.0, 0.0, 2};
    auto free_map = coherence_suppression_map(broad, enumerate_sectors(free_params), grid, free_params);
    int defined = 0;
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j)
            if (!std::isnan(free_map(i, j))) {
                ++defined;
                CHECK(std::abs(free_map(i, j) - 1.0) < 1e-10);
            }
    CHECK(defined > 0);

    ModelParams p{1.0, 0.1, 100};
    auto sectors = enumerate_sectors(p);
    auto map = coherence_suppression_map(broad, sectors, grid, p);

    // TR mirror points: rounding dust at most.
    auto rho = assemble(sectors, broad, grid, p);
    const double scale = rho.elements.cwiseAbs().maxCoeff();
    for (int i = grid.n / 2 + 1; i < grid.n; ++i)
        CHECK(std::abs(rho.elements(i, grid.mirror_index(i))) <= 1e-12 * scale);

    // TT block: suppression decreases monotonically with |k - k'| across the
    // central +-2 sigma band.
    int i0 = 0;
    double best = 1e300;
    for (int i = grid.n / 2 + 1; i < grid.n; ++i)
        if (std::abs(grid.values[i] - broad.k0) < best) {
            best = std::abs(grid.values[i] - broad.k0);
            i0 = i;
        }
    const double sigma_k = 1.0 / (2.0 * std::sqrt(2.0) * broad.sigma0);
    double prev = 1.0 + 1e-12;
    for (int j = i0 + 1; j < grid.n && grid.values[j] <= broad.k0 + 2.0 * sigma_k; ++j) {
        REQUIRE(!std::isnan(map(i0, j)));
        CHECK(map(i0, j) <= prev + 1e-12);
        prev = map(i0, j);
    }
}
