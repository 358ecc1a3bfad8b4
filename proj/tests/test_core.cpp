#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "phonolab/afield.hpp"
#include "phonolab/fft.hpp"
#include "phonolab/grid.hpp"
#include "phonolab/lattice.hpp"
#include "phonolab/rng.hpp"

using namespace phonolab;

namespace {

RField random_field(const Grid3& g, std::uint64_t seed, double amp = 1.0) {
    RngStream rng(seed, 0);
    RField f(static_cast<std::size_t>(g.size()));
    for (double& v : f) v = amp * (2.0 * rng.uniform() - 1.0);
    return f;
}

FieldState random_state(int L, std::uint64_t seed, double amp = 1.0) {
    Grid3 g(L);
    FieldState s = FieldState::zero(L);
    s.q = random_field(g, seed, amp);
    s.p = random_field(g, seed + 1, amp);
    return s;
}

double sup_diff(const RField& a, const RField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("dft: delta at origin transforms to the constant 1") {
    Grid3 g(4);
    RField f(static_cast<std::size_t>(g.size()), 0.0);
    f[0] = 1.0;
    CField fh = dft(g, f);
    for (auto v : fh) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(v.imag()) < 1e-14);
    }
}

TEST_CASE("dft: cosine mode lands on +-k0 with value L^3/2") {
    Grid3 g(8);
    IVec3 n0 = {1, 3, 0};
    RField f(static_cast<std::size_t>(g.size()));
    for (std::int64_t i = 0; i < g.size(); ++i) {
        IVec3 c = g.coords(i);
        f[static_cast<std::size_t>(i)] =
            std::cos(2.0 * M_PI * (n0[0] * c[0] + n0[1] * c[1] + n0[2] * c[2]) / 8.0);
    }
    CField fh = dft(g, f);
    std::int64_t plus = g.index(1, 3, 0);
    std::int64_t minus = g.negate(plus);
    double half = g.size() / 2.0;
    for (std::int64_t i = 0; i < g.size(); ++i) {
        double expect = (i == plus || i == minus) ? half : 0.0;
        CHECK(std::abs(fh[static_cast<std::size_t>(i)] - std::complex<double>(expect, 0.0)) <
              1e-9);
    }
}

TEST_CASE("dft: matches the direct definition and round-trips") {
    Grid3 g(3);
    RngStream rng(7, 0);
    CField f(static_cast<std::size_t>(g.size()));
    for (auto& v : f) v = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    CField fh = dft(g, f);
    CField oracle = testing::dft_direct(g, f);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(fh[i] - oracle[i]) < 1e-12);

    CField back = idft(g, fh);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(back[i] - f[i]) < 1e-12);
}

TEST_CASE("dft: Parseval with the L^-3 spectral measure") {
    Grid3 g(8);
    RField f = random_field(g, 11);
    CField fh = dft(g, f);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        lhs += f[i] * f[i];
        rhs += std::norm(fh[i]);
    }
    rhs /= static_cast<double>(g.size());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("stencil: built-in nearest neighbor") {
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    CHECK(nn.value_sum() == 0.0);
    CHECK(nn.offsets().size() == 7);
    CHECK(nn.fourier({0, 0, 0}) == doctest::Approx(0.0).epsilon(1e-15));
    // alphahat(1/2,0,0) = 6 - 2cos(pi) - 2 - 2 = 4
    CHECK(nn.fourier({0.5, 0, 0}) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("stencil: symmetry and zero-sum are enforced") {
    CHECK_THROWS_AS(CouplingStencil({{0, 0, 0}, {1, 0, 0}}, {1.0, -1.0}), ModelError);
    CHECK_THROWS_AS(CouplingStencil({{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}}, {6.0, -1.0, -1.0}),
                    ModelError);  // sum != 0
    // stability: alphahat < 0 away from zero
    CHECK_THROWS_AS(CouplingStencil({{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}}, {-2.0, 1.0, 1.0}),
                    ModelError);
}

TEST_CASE("stencil: folding into a small box merges aliased offsets") {
    CouplingStencil s311 = CouplingStencil::nn_nnn_for_cosine(1.0);
    bool folded = false;
    CouplingStencil f = s311.fold_to_box(2, &folded);
    CHECK(folded);
    CHECK(f.value_sum() == 0.0);
    bool nn_folded = true;
    CouplingStencil fnn = CouplingStencil::nearest_neighbor().fold_to_box(4, &nn_folded);
    CHECK_FALSE(nn_folded);
    CHECK(fnn.offsets().size() == 7);
}

TEST_CASE("dispersion: cosine form values forced by the closed formula") {
    DispersionModel m = DispersionModel::cosine(1.0);
    CHECK(m.omega({0, 0, 0}) == doctest::Approx(1.0));
    CHECK(m.omega({0.5, 0.5, 0.5}) == doctest::Approx(7.0));
    DispersionModel nn = DispersionModel::by_name("nn", 1.0);
    CHECK(nn.omega({0.5, 0, 0}) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("dispersion: nn-nnn-311 stencil reproduces the cosine form exactly") {
    for (double w0 : {0.5, 1.0, 2.0}) {
        DispersionModel direct = DispersionModel::cosine(w0);
        DispersionModel viaStencil = DispersionModel::by_name("nn-nnn-311", w0);
        Grid3 g(8);
        for (std::int64_t i = 0; i < g.size(); ++i)
            CHECK(viaStencil.omega(g, i) == doctest::Approx(direct.omega(g, i)).epsilon(1e-13));
        // also off the grid
        CHECK(viaStencil.omega({0.13, 0.27, 0.41}) ==
              doctest::Approx(direct.omega({0.13, 0.27, 0.41})).epsilon(1e-13));
    }
}

TEST_CASE("dispersion: evenness and the omega0 lower bound on the grid") {
    Grid3 g(8);
    for (const char* name : {"nn", "nn-nnn-311", "cosine", "flat"}) {
        DispersionModel m = DispersionModel::by_name(name, 1.0);
        for (std::int64_t i = 0; i < g.size(); ++i) {
            CHECK(m.omega(g, i) >= 1.0 - 1e-12);
            CHECK(m.omega(g, i) ==
                  doctest::Approx(m.omega(g, g.negate(i))).epsilon(1e-13));
        }
    }
}

TEST_CASE("dispersion: gradient matches finite differences") {
    for (const char* name : {"nn", "nn-nnn-311", "cosine"}) {
        DispersionModel m = DispersionModel::by_name(name, 1.0);
        Vec3 k = {0.17, 0.35, 0.62};
        auto grad = m.grad_omega(k);
        const double h = 1e-6;
        for (int a = 0; a < 3; ++a) {
            Vec3 kp = k, km = k;
            kp[a] += h;
            km[a] -= h;
            double fd = (m.omega(kp) - m.omega(km)) / (2.0 * h);
            CHECK(grad[a] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("energy: ground configuration and constant fields") {
    PotentialSpec pot;
    pot.omega0 = 1.3;
    pot.lambda = 0.0;
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    FieldState z = FieldState::zero(4);
    CHECK(energy(z, nn, pot) == 0.0);

    // zero-sum stencil annihilates constants: only the on-site term remains
    FieldState c = FieldState::zero(2);
    const double cval = 0.7;
    for (double& v : c.q) v = cval;
    CHECK(energy(c, nn, pot) ==
          doctest::Approx(0.5 * pot.omega0 * pot.omega0 * cval * cval * 8.0).epsilon(1e-14));
}

TEST_CASE("energy: random state matches the direct double-sum oracle") {
    PotentialSpec pot;
    pot.omega0 = 1.0;
    pot.lambda = 1.0;
    pot.epsilon = 0.04;
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    FieldState s = random_state(4, 42);
    double fast = energy(s, nn, pot);
    double slow = testing::energy_direct(s, nn, pot);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));

    // folded/NNN couplings on a tiny box
    CouplingStencil s311 = CouplingStencil::nn_nnn_for_cosine(1.0);
    FieldState s3 = random_state(3, 43);
    CHECK(energy(s3, s311, pot) ==
          doctest::Approx(testing::energy_direct(s3, s311, pot)).epsilon(1e-12));
}

TEST_CASE("energy: non-finite fields raise BlowUpError") {
    PotentialSpec pot;
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    FieldState s = FieldState::zero(2);
    s.q[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(energy(s, nn, pot), BlowUpError);
}

TEST_CASE("forces: zero field, then a single spike against the nn couplings") {
    PotentialSpec pot;
    pot.omega0 = 1.2;
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    FieldState z = FieldState::zero(4);
    RField f0 = forces(z, nn, pot);
    for (double v : f0) CHECK(v == 0.0);

    FieldState s = FieldState::zero(4);
    s.q[0] = 1.0;
    RField f = forces(s, nn, pot);
    Grid3 g(4);
    CHECK(f[0] == doctest::Approx(-6.0 - pot.omega0 * pot.omega0).epsilon(1e-14));
    for (int a = 0; a < 3; ++a)
        for (int sgn : {-1, 1}) {
            IVec3 e = {0, 0, 0};
            e[a] = sgn;
            std::int64_t i = g.index_wrapped(e[0], e[1], e[2]);
            CHECK(f[static_cast<std::size_t>(i)] == doctest::Approx(1.0).epsilon(1e-14));
        }
}

TEST_CASE("forces: spectral and stencil routes agree to 1e-12") {
    PotentialSpec pot;
    pot.lambda = 1.0;
    pot.epsilon = 0.09;
    for (int L : {4, 8}) {
        for (bool use311 : {false, true}) {
            CouplingStencil st = use311 ? CouplingStencil::nn_nnn_for_cosine(1.0)
                                        : CouplingStencil::nearest_neighbor();
            FieldState s = random_state(L, 100 + L + use311);
            RField a = forces(s, st, pot, ForceRoute::Stencil);
            RField b = forces(s, st, pot, ForceRoute::Spectral);
            CHECK(sup_diff(a, b) < 1e-12 * (1.0 + sup_diff(a, RField(a.size(), 0.0))));
        }
    }
}

TEST_CASE("forces: minus the energy gradient by central differences") {
    PotentialSpec pot;
    pot.lambda = 1.0;
    pot.epsilon = 0.04;
    for (bool quartic : {false, true}) {
        pot.quartic_stabilizer = quartic;
        CouplingStencil nn = CouplingStencil::nearest_neighbor();
        FieldState s = random_state(4, 7 + quartic);
        RField f = forces(s, nn, pot);
        RField grad = testing::energy_gradient_fd(s, nn, pot, 2e-6);
        double scale = 0.0;
        for (double v : f) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(std::abs(f[i] + grad[i]) < 1e-6 * std::max(1.0, scale));
    }
}

TEST_CASE("forces: zero-sum coupling leaves constants with only the on-site pull") {
    PotentialSpec pot;
    pot.omega0 = 1.4;
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    FieldState s = FieldState::zero(4);
    for (double& v : s.q) v = 0.37;
    RField f = forces(s, nn, pot);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(f[i] + pot.omega0 * pot.omega0 * s.q[i] == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("verlet: zero state is a fixed point; T=0 is the identity") {
    PotentialSpec pot;
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    FieldState z = FieldState::zero(4);
    FieldState z2 = verlet_step(z, 0.01, nn, pot);
    CHECK(sup_diff(z2.q, z.q) == 0.0);
    FieldState s = random_state(4, 3);
    FieldState s2 = evolve(s, 0.0, 0.01, nn, pot);
    CHECK(sup_diff(s2.q, s.q) == 0.0);
    CHECK(s2.t == s.t);
}

TEST_CASE("verlet: single harmonic mode rotates at omega(k) with order-2 error") {
    const int L = 8;
    Grid3 g(L);
    PotentialSpec pot;
    pot.omega0 = 1.0;
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    DispersionModel model = DispersionModel::by_name("nn", 1.0);
    IVec3 n0 = {2, 1, 0};
    double w = model.omega({n0[0] / double(L), n0[1] / double(L), n0[2] / double(L)});

    auto run_error = [&](double h) {
        FieldState s = FieldState::zero(L);
        for (std::int64_t i = 0; i < g.size(); ++i) {
            IVec3 c = g.coords(i);
            s.q[static_cast<std::size_t>(i)] =
                std::cos(2.0 * M_PI * (n0[0] * c[0] + n0[1] * c[1] + n0[2] * c[2]) / L);
        }
        const double T = 2.0;
        FieldState f = evolve(s, T, h, nn, pot);
        // exact: q(t) = cos(w t) q0, p(t) = -w sin(w t) q0
        double err = 0.0;
        for (std::int64_t i = 0; i < g.size(); ++i) {
            double q0 = s.q[static_cast<std::size_t>(i)];
            err = std::max(err, std::abs(f.q[static_cast<std::size_t>(i)] - std::cos(w * T) * q0));
            err = std::max(err,
                           std::abs(f.p[static_cast<std::size_t>(i)] + w * std::sin(w * T) * q0));
        }
        return err;
    };
    double e1 = run_error(0.01);
    double e2 = run_error(0.005);
    double order = std::log2(e1 / e2);
    CHECK(order > 1.9);
    CHECK(order < 2.2);
}

TEST_CASE("verlet: energy drift is second order in h for the cubic dynamics") {
    PotentialSpec pot;
    pot.lambda = 1.0;
    pot.epsilon = 0.04;
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    FieldState s = random_state(8, 5, 0.3);

    auto drift = [&](double h) {
        double H0 = energy(s, nn, pot);
        FieldState f = evolve(s, 4.0, h, nn, pot);
        return std::abs(energy(f, nn, pot) - H0) / std::abs(H0);
    };
    double d1 = drift(0.02);
    double d2 = drift(0.01);
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("verlet: lambda=0 evolution conserves energy to integrator accuracy") {
    PotentialSpec pot;
    pot.omega0 = 1.0;
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    FieldState s = random_state(8, 17, 0.5);
    double H0 = energy(s, nn, pot);
    double h = 0.05 / std::sqrt(13.0);  // 0.05/omega_max for nn at omega0=1
    FieldState f = evolve(s, 5.0, h, nn, pot);
    double drift = std::abs(energy(f, nn, pot) - H0) / H0;
    // bounded oscillation O((h omega)^2), no secular growth
    CHECK(drift < 0.5 * h * h * 13.0);

    // per-mode harmonic energy conserved to O(h^2)
    Grid3 g(8);
    DispersionModel model = DispersionModel::by_name("nn", 1.0);
    CField q0 = dft(g, s.q), p0 = dft(g, s.p), q1 = dft(g, f.q), p1 = dft(g, f.p);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        double w = model.omega(g, i);
        std::size_t ii = static_cast<std::size_t>(i);
        double e0 = 0.5 * (std::norm(p0[ii]) + w * w * std::norm(q0[ii]));
        double e1 = 0.5 * (std::norm(p1[ii]) + w * w * std::norm(q1[ii]));
        CHECK(std::abs(e1 - e0) <= 4.0 * h * h * w * w * (e0 + 1e-9));
    }
}

TEST_CASE("verlet: time reversal recovers the initial state") {
    PotentialSpec pot;
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    FieldState s = random_state(6, 23, 0.5);
    FieldState f = evolve(s, 3.0, 0.01, nn, pot);
    for (double& v : f.p) v = -v;
    FieldState back = evolve(f, 3.0, 0.01, nn, pot);
    for (double& v : back.p) v = -v;
    CHECK(sup_diff(back.q, s.q) < 1e-8);
    CHECK(sup_diff(back.p, s.p) < 1e-8);
}

TEST_CASE("verlet: runaway cubic amplitude aborts with BlowUpError") {
    PotentialSpec pot;
    pot.lambda = 5.0;
    pot.epsilon = 1.0;
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    FieldState s = FieldState::zero(4);
    for (double& v : s.q) v = -9.0;
    CHECK_THROWS_AS(evolve(s, 10.0, 0.01, nn, pot), BlowUpError);
}

TEST_CASE("afield: round trip is the identity both ways") {
    const int L = 6;
    Grid3 g(L);
    DispersionModel model = DispersionModel::by_name("nn-nnn-311", 1.0);

    FieldState s = random_state(L, 31);
    AField a = to_afield(s, model);
    FieldState back = from_afield(a, model);
    CHECK(sup_diff(back.q, s.q) < 1e-12);
    CHECK(sup_diff(back.p, s.p) < 1e-12);

    // arbitrary complex a also round-trips through the real phase point
    RngStream rng(77, 0);
    AField arb = AField::zero(L);
    for (auto& v : arb.a) v = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
    FieldState mid = from_afield(arb, model);
    AField again = to_afield(mid, model);
    double err = 0.0;
    for (std::size_t i = 0; i < arb.a.size(); ++i)
        err = std::max(err, std::abs(arb.a[i] - again.a[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("afield: single-mode displacement reads off sqrt(omega/2)") {
    const int L = 4;
    Grid3 g(L);
    DispersionModel model = DispersionModel::by_name("nn", 1.0);
    // real displacement with qhat = 1 at +-k0, p = 0
    std::int64_t k0 = g.index(1, 0, 0);
    FieldState s = FieldState::zero(L);
    for (std::int64_t i = 0; i < g.size(); ++i) {
        IVec3 c = g.coords(i);
        s.q[static_cast<std::size_t>(i)] = 2.0 / g.size() * std::cos(2.0 * M_PI * c[0] / L);
    }
    AField a = to_afield(s, model);
    double w = model.omega(g, k0);
    CHECK(a.a[static_cast<std::size_t>(k0)].real() ==
          doctest::Approx(std::sqrt(w / 2.0)).epsilon(1e-12));
    CHECK(a.a[static_cast<std::size_t>(g.negate(k0))].real() ==
          doctest::Approx(std::sqrt(w / 2.0)).epsilon(1e-12));
    CHECK(std::abs(a.a[static_cast<std::size_t>(k0)].imag()) < 1e-13);
}

TEST_CASE("afield: spectral harmonic energy equals the lattice Hamiltonian") {
    const int L = 6;
    DispersionModel model = DispersionModel::by_name("nn", 1.3);
    CouplingStencil nn = CouplingStencil::nearest_neighbor();
    PotentialSpec pot;
    pot.omega0 = 1.3;
    for (int rep = 0; rep < 3; ++rep) {
        FieldState s = random_state(L, 50 + rep);
        AField a = to_afield(s, model);
        Totals tot = conserved_totals(a, model);
        double H0 = energy(s, nn, pot);
        CHECK(tot.energy == doctest::Approx(H0).epsilon(1e-10));
    }
}

TEST_CASE("afield: harmonic propagation is a pure phase with the flow property") {
    const int L = 4;
    DispersionModel model = DispersionModel::cosine(1.0);
    RngStream rng(3, 0);
    AField a = AField::zero(L);
    for (auto& v : a.a) v = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};

    AField id = a;
    harmonic_propagate(id, 0.0, model);
    for (std::size_t i = 0; i < a.a.size(); ++i) CHECK(id.a[i] == a.a[i]);

    AField one = a;
    harmonic_propagate(one, 0.7, model);
    for (std::size_t i = 0; i < a.a.size(); ++i)
        CHECK(std::abs(std::abs(one.a[i]) - std::abs(a.a[i])) < 1e-13);

    AField two = one;
    harmonic_propagate(two, 0.4, model);
    AField direct = a;
    harmonic_propagate(direct, 1.1, model);
    for (std::size_t i = 0; i < a.a.size(); ++i)
        CHECK(std::abs(two.a[i] - direct.a[i]) < 1e-12);
}

TEST_CASE("afield: integrator matches the exact harmonic flow at second order") {
    const int L = 6;
    DispersionModel model = DispersionModel::by_name("nn-nnn-311", 1.0);
    CouplingStencil st = CouplingStencil::nn_nnn_for_cosine(1.0);
    PotentialSpec pot;
    pot.omega0 = 1.0;
    FieldState s = random_state(L, 4, 0.5);
    AField a0 = to_afield(s, model);

    auto err_at = [&](double h) {
        const double T = 1.0;
        FieldState f = evolve(s, T, h, st, pot);
        AField num = to_afield(f, model);
        AField ex = a0;
        harmonic_propagate(ex, T, model);
        double err = 0.0;
        for (std::size_t i = 0; i < num.a.size(); ++i)
            err = std::max(err, std::abs(num.a[i] - ex.a[i]));
        return err;
    };
    double e1 = err_at(0.01), e2 = err_at(0.005);
    CHECK(std::log2(e1 / e2) > 1.9);
}

TEST_CASE("snapshot: binary round trip is exact, csv smoke") {
    PotentialSpec pot;
    pot.lambda = 0.7;
    pot.epsilon = 0.25;
    pot.omega0 = 1.1;
    FieldState s = random_state(3, 9);
    s.t = 2.5;
    std::stringstream buf;
    write_snapshot(buf, s, pot);
    PotentialSpec pot2;
    FieldState r = read_snapshot(buf, &pot2);
    CHECK(r.L == s.L);
    CHECK(r.t == s.t);
    CHECK(pot2.lambda == pot.lambda);
    CHECK(pot2.epsilon == pot.epsilon);
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        CHECK(r.q[i] == s.q[i]);
        CHECK(r.p[i] == s.p[i]);
    }
    std::stringstream csv;
    write_snapshot_csv(csv, s);
    CHECK(csv.str().substr(0, 10) == "x,y,z,q,p\n");
}
