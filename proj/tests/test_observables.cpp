#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dicke/model.hpp"
#include "dicke/observables.hpp"
#include "dicke/steady_state.hpp"

using namespace dicke;

namespace {

DenseMatrix random_density(int dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;
    DenseMatrix m(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) m(i, j) = Cplx(gauss(rng), gauss(rng));
    DenseMatrix rho = m * m.adjoint();
    return rho / rho.trace().real();
}

DenseVector coherent_amplitudes(int n_max, Cplx alpha) {
    DenseVector amps(n_max + 1);
    Cplx term = std::exp(-0.5 * std::norm(alpha));
    amps[0] = term;
    for (int n = 1; n <= n_max; ++n) {
        term *= alpha / std::sqrt(static_cast<double>(n));
        amps[n] = term;
    }
    return amps;
}

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

}  // namespace

TEST_CASE("expectation values") {
    const HilbertDims dims{3, 2};
    const JointOps ops = build_joint_ops(dims);
    SECTION("identity averages to one") {
        const DenseMatrix rho = random_density(dims.joint_dim(), 5);
        CHECK(std::abs(expect(sparse_identity(dims.joint_dim()), rho) - Cplx(1.0)) < 1e-12);
    }
    SECTION("Jz on the down state") {
        const auto dm = basis_state(dims, 0, 0);
        CHECK(expect(ops.jz, dm).real() == Catch::Approx(-1.0).margin(1e-14));
    }
    SECTION("photon number of a coherent state") {
        const int n_max = 20;
        const DenseVector amps = coherent_amplitudes(n_max, Cplx(1.0, 0.0));
        const DenseMatrix rho = amps * amps.adjoint();
        const auto cav = build_cavity_ops(n_max);
        CHECK(expect(cav.n, rho).real() == Catch::Approx(1.0).margin(1e-6));
    }
    SECTION("dimension mismatch") {
        const DenseMatrix rho = random_density(4, 6);
        CHECK_THROWS_AS(expect(ops.jz, rho), std::invalid_argument);
    }
}

TEST_CASE("partial trace") {
    const HilbertDims dims{2, 2};
    SECTION("product states reduce to their factors") {
        const DenseMatrix rc = random_density(dims.cavity_dim(), 11);
        const DenseMatrix rs = random_density(dims.spin_dim(), 12);
        DenseMatrix joint = DenseMatrix::Zero(dims.joint_dim(), dims.joint_dim());
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int s = 0; s < 3; ++s)
                    for (int t = 0; t < 3; ++t)
                        joint(dims.index(i, s), dims.index(j, t)) = rc(i, j) * rs(s, t);
        const DensityMatrix dm{dims, joint};
        CHECK((partial_trace(dm, Subsystem::Cavity) - rc).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((partial_trace(dm, Subsystem::Spin) - rs).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("maximally entangled 2x2 block reduces to maximally mixed") {
        const HilbertDims d2{1, 1};
        DenseVector bell = DenseVector::Zero(4);
        bell[d2.index(0, 0)] = 1.0 / std::sqrt(2.0);
        bell[d2.index(1, 1)] = 1.0 / std::sqrt(2.0);
        const DensityMatrix dm{d2, bell * bell.adjoint()};
        const DenseMatrix reduced = partial_trace(dm, Subsystem::Cavity);
        CHECK((reduced - 0.5 * DenseMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("reduced expectation agrees with the joint one") {
        const DensityMatrix dm{dims, random_density(dims.joint_dim(), 13)};
        const JointOps ops = build_joint_ops(dims);
        const auto cav = build_cavity_ops(dims.n_max);
        const Cplx joint_val = expect(ops.n_phot, dm);
        const Cplx reduced_val = expect(cav.n, partial_trace(dm, Subsystem::Cavity));
        CHECK(std::abs(joint_val - reduced_val) < 1e-12);
    }
}

TEST_CASE("second-order coherence g2(0)") {
    const int n_max = 30;
    const HilbertDims dims{n_max, 1};
    const auto embed = [&](const DenseMatrix& rho_cav) {
        DenseMatrix rho = DenseMatrix::Zero(dims.joint_dim(), dims.joint_dim());
        for (int i = 0; i <= n_max; ++i)
            for (int j = 0; j <= n_max; ++j)
                rho(dims.index(i, 0), dims.index(j, 0)) = rho_cav(i, j);
        return DensityMatrix{dims, rho};
    };
    SECTION("coherent state is Poissonian") {
        const DenseVector amps = coherent_amplitudes(n_max, Cplx(1.2, 0.4));
        CHECK(g2_zero(embed(amps * amps.adjoint())) == Catch::Approx(1.0).margin(1e-8));
    }
    SECTION("single Fock excitation") {
        DenseMatrix rho = DenseMatrix::Zero(n_max + 1, n_max + 1);
        rho(1, 1) = 1.0;
        CHECK(g2_zero(embed(rho)) == Catch::Approx(0.0).margin(1e-14));
    }
    SECTION("thermal state bunches") {
        const double nbar = 0.5;
        DenseMatrix rho = DenseMatrix::Zero(n_max + 1, n_max + 1);
        double norm = 0.0;
        for (int n = 0; n <= n_max; ++n) {
            rho(n, n) = std::pow(nbar / (1.0 + nbar), n);
            norm += rho(n, n).real();
        }
        rho /= norm;
        CHECK(g2_zero(embed(rho)) == Catch::Approx(2.0).margin(1e-4));
    }
    SECTION("vacuum raises the dedicated error") {
        DenseMatrix rho = DenseMatrix::Zero(n_max + 1, n_max + 1);
        rho(0, 0) = 1.0;
        CHECK_THROWS_AS(g2_zero(embed(rho)), VacuumFieldError);
    }
}

TEST_CASE("Wigner function by displaced parity") {
    SECTION("vacuum value at the origin") {
        DenseMatrix rho = DenseMatrix::Zero(10, 10);
        rho(0, 0) = 1.0;
        CHECK(wigner_at(rho, Cplx(0.0, 0.0)) == Catch::Approx(kTwoOverPi).margin(1e-6));
    }
    SECTION("coherent state peaks at its amplitude with the vacuum height") {
        const Cplx alpha0(1.3, -0.6);
        const int n_max = 16;  // |alpha|^2 + 6 sqrt(|alpha|^2) ~ 10
        const DenseVector amps = coherent_amplitudes(n_max, alpha0);
        const DenseMatrix rho = amps * amps.adjoint();
        CHECK(wigner_at(rho, alpha0) == Catch::Approx(kTwoOverPi).margin(1e-4));
        // Gaussian profile: one vacuum unit away the value drops by e^{-2}
        CHECK(wigner_at(rho, alpha0 + Cplx(1.0, 0.0)) ==
              Catch::Approx(kTwoOverPi * std::exp(-2.0)).margin(1e-4));
    }
    SECTION("single Fock state is negative at the origin") {
        DenseMatrix rho = DenseMatrix::Zero(10, 10);
        rho(1, 1) = 1.0;
        CHECK(wigner_at(rho, Cplx(0.0, 0.0)) == Catch::Approx(-kTwoOverPi).margin(1e-6));
    }
    SECTION("grid integral is normalized in the alpha plane", "[property]") {
        // sum W dx dy / 2 = int W d^2alpha = 1 (alpha = (x+iy)/sqrt(2))
        const DenseMatrix rho = random_density(6, 21);
        std::vector<double> xs, ys;
        const int n = 61;
        const double extent = 7.0;
        for (int i = 0; i < n; ++i) xs.push_back(-extent + 2.0 * extent * i / (n - 1.0));
        ys = xs;
        const auto grid = wigner(rho, xs, ys);
        const double cell = (xs[1] - xs[0]) * (ys[1] - ys[0]);
        CHECK(grid.values.sum() * cell / 2.0 == Catch::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("atomic Q-function on the Bloch sphere") {
    const int n_atoms = 6;
    SECTION("coherent state has unit self-overlap at its own angles") {
        const double theta = 1.1, phi = 2.3;
        const DenseVector eta = spin_coherent_state(n_atoms, theta, phi);
        const DenseMatrix rho = eta * eta.adjoint();
        const auto grid = spin_qfunction(rho, {theta}, {phi});
        CHECK(grid.values(0, 0) == Catch::Approx(1.0).margin(1e-10));
        // and 1 is the global maximum of Q for a pure coherent state
        std::vector<double> thetas, phis;
        for (int i = 0; i < 40; ++i) thetas.push_back(std::numbers::pi * i / 39.0);
        for (int j = 0; j < 40; ++j) phis.push_back(2.0 * std::numbers::pi * j / 40.0);
        const auto full = spin_qfunction(rho, thetas, phis);
        CHECK(full.values.maxCoeff() <= 1.0 + 1e-10);
    }
    SECTION("down state concentrates at the theta = 0 pole") {
        DenseMatrix rho = DenseMatrix::Zero(n_atoms + 1, n_atoms + 1);
        rho(0, 0) = 1.0;  // |n=0> = down
        const auto grid = spin_qfunction(rho, {0.0, std::numbers::pi}, {0.0, 1.0});
        CHECK(grid.values(0, 0) == Catch::Approx(1.0).margin(1e-12));
        CHECK(grid.values(0, 1) == Catch::Approx(1.0).margin(1e-12));
        CHECK(grid.values(1, 0) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("resolution of identity normalizes Q", "[property]") {
        // (N+1)/(4pi) * int Q sin(theta) dtheta dphi = 1
        const DenseMatrix rho = random_density(n_atoms + 1, 33);
        const int nt = 128, np = 128;
        std::vector<double> thetas(nt), phis(np);
        for (int i = 0; i < nt; ++i) thetas[i] = std::numbers::pi * (i + 0.5) / nt;
        for (int j = 0; j < np; ++j) phis[j] = 2.0 * std::numbers::pi * j / np;
        const auto grid = spin_qfunction(rho, thetas, phis);
        double integral = 0.0;
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < np; ++j)
                integral += grid.values(i, j) * std::sin(thetas[i]);
        integral *= (std::numbers::pi / nt) * (2.0 * std::numbers::pi / np);
        CHECK((n_atoms + 1) / (4.0 * std::numbers::pi) * integral ==
              Catch::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("purity") {
    CHECK(purity(DenseMatrix(basis_state(HilbertDims{2, 1}, 0, 0).rho)) ==
          Catch::Approx(1.0).margin(1e-14));
    const int d = 6;
    CHECK(purity(DenseMatrix(DenseMatrix::Identity(d, d) / d)) ==
          Catch::Approx(1.0 / d).margin(1e-14));
    DenseMatrix half = DenseMatrix::Zero(4, 4);
    half(0, 0) = 0.5;
    half(2, 2) = 0.5;
    CHECK(purity(half) == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("fidelity") {
    SECTION("self-fidelity is one") {
        const DenseMatrix rho = random_density(5, 41);
        CHECK(fidelity(rho, rho) == Catch::Approx(1.0).margin(1e-8));
    }
    SECTION("orthogonal pure states") {
        DenseMatrix a = DenseMatrix::Zero(3, 3), b = DenseMatrix::Zero(3, 3);
        a(0, 0) = 1.0;
        b(1, 1) = 1.0;
        CHECK(fidelity(a, b) == Catch::Approx(0.0).margin(1e-10));
    }
    SECTION("commuting qubit pair: F = sum sqrt(p q) = sqrt(3)/2") {
        DenseMatrix rho = DenseMatrix::Zero(2, 2), sigma = DenseMatrix::Zero(2, 2);
        rho(0, 0) = 0.75;
        rho(1, 1) = 0.25;
        sigma(0, 0) = 0.25;
        sigma(1, 1) = 0.75;
        CHECK(fidelity(rho, sigma) ==
              Catch::Approx(std::sqrt(3.0) / 2.0).margin(1e-10));
    }
    SECTION("symmetry on random pairs", "[property]") {
        for (unsigned seed = 0; seed < 4; ++seed) {
            const DenseMatrix a = random_density(4, 50 + seed);
            const DenseMatrix b = random_density(4, 60 + seed);
            CHECK(std::abs(fidelity(a, b) - fidelity(b, a)) < 1e-8);
        }
    }
}

TEST_CASE("logarithmic negativity") {
    SECTION("product states are PPT") {
        const HilbertDims dims{2, 2};
        const DenseMatrix rc = random_density(3, 71);
        const DenseMatrix rs = random_density(3, 72);
        DenseMatrix joint = DenseMatrix::Zero(9, 9);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int s = 0; s < 3; ++s)
                    for (int t = 0; t < 3; ++t)
                        joint(dims.index(i, s), dims.index(j, t)) = rc(i, j) * rs(s, t);
        CHECK(log_negativity(DensityMatrix{dims, joint}) ==
              Catch::Approx(0.0).margin(1e-8));
    }
    SECTION("Bell pair carries one ebit") {
        const HilbertDims dims{1, 1};
        DenseVector bell = DenseVector::Zero(4);
        bell[dims.index(0, 0)] = 1.0 / std::sqrt(2.0);
        bell[dims.index(1, 1)] = 1.0 / std::sqrt(2.0);
        CHECK(log_negativity(DensityMatrix{dims, bell * bell.adjoint()}) ==
              Catch::Approx(1.0).margin(1e-8));
    }
    SECTION("either partial transpose gives the same value", "[property]") {
        const HilbertDims dims{2, 3};
        const DensityMatrix dm{dims, random_density(dims.joint_dim(), 81)};
        CHECK(std::abs(log_negativity(dm, Subsystem::Cavity) -
                       log_negativity(dm, Subsystem::Spin)) < 1e-10);
    }
}

TEST_CASE("steady-state entanglement peaks near the first-order boundary", "[slow]") {
    // g/(2pi) = 0.1 MHz, N = 10: E_N has a local maximum within 0.5w of U = -2w
    // on a 0.25w grid (measured peak cell: U = -2.25w)
    ModelParams p = params_from_mhz(0.05, 1.0, 0.2, 0.1, 0.0, 10, 9);
    std::vector<double> u_over_w;
    for (double u = -3.0; u <= -0.99; u += 0.25) u_over_w.push_back(u);
    std::vector<double> en;
    for (double u : u_over_w) {
        p.u = u * p.omega;
        const SparseMatrix l = build_liouvillian(p);
        const auto ss = solve_inverse_power(l, p.dims());
        en.push_back(log_negativity(ss.rho));
    }
    std::size_t peak = 0;
    for (std::size_t i = 1; i < en.size(); ++i)
        if (en[i] > en[peak]) peak = i;
    CHECK(peak > 0);
    CHECK(peak + 1 < en.size());
    CHECK(std::abs(u_over_w[peak] - (-2.0)) <= 0.5);
}
