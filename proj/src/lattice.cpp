#include "phonolab/lattice.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "phonolab/fft.hpp"

namespace phonolab {

void PotentialSpec::validate() const {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw ConfigError("potential: epsilon must be in (0,1]");
    if (!(omega0 > 0.0)) throw ConfigError("potential: omega0 must be > 0");
}

FieldState FieldState::zero(int L) {
    FieldState s;
    s.L = L;
    s.q.assign(static_cast<std::size_t>(L) * L * L, 0.0);
    s.p.assign(static_cast<std::size_t>(L) * L * L, 0.0);
    return s;
}

void FieldState::check_finite() const {
    for (double v : q)
        if (!std::isfinite(v)) throw BlowUpError("field state: non-finite displacement");
    for (double v : p)
        if (!std::isfinite(v)) throw BlowUpError("field state: non-finite momentum");
}

namespace {

// Stencil bound to a box: folded offsets plus per-axis wrapped index maps so
// the force loop does three table lookups per neighbor.
struct BoundStencil {
    CouplingStencil folded;
    bool was_folded = false;
    int L;
    std::vector<std::array<std::vector<int>, 3>> axis_maps;

    BoundStencil(const CouplingStencil& st, int L_)
        : folded(st.fold_to_box(L_, &was_folded)), L(L_) {
        axis_maps.resize(folded.offsets().size());
        for (std::size_t j = 0; j < folded.offsets().size(); ++j)
            for (int a = 0; a < 3; ++a) {
                axis_maps[j][a].resize(L);
                for (int c = 0; c < L; ++c)
                    axis_maps[j][a][c] = ((c + folded.offsets()[j][a]) % L + L) % L;
            }
    }

    // out_x += sum_j alpha_j q_{x+o_j}
    void convolve(const RField& q, RField& out) const {
        const auto& vals = folded.values();
        for (std::size_t j = 0; j < vals.size(); ++j) {
            const double a = vals[j];
            const std::vector<int>& mx = axis_maps[j][0];
            const std::vector<int>& my = axis_maps[j][1];
            const std::vector<int>& mz = axis_maps[j][2];
            std::size_t idx = 0;
            for (int z = 0; z < L; ++z) {
                const std::size_t base_z = static_cast<std::size_t>(mz[z]) * L * L;
                for (int y = 0; y < L; ++y) {
                    const std::size_t base = base_z + static_cast<std::size_t>(my[y]) * L;
                    for (int x = 0; x < L; ++x, ++idx) out[idx] += a * q[base + mx[x]];
                }
            }
        }
    }
};

void check_state(const FieldState& s) {
    std::size_t n = static_cast<std::size_t>(s.L) * s.L * s.L;
    if (s.q.size() != n || s.p.size() != n)
        throw ConfigError("field state: q/p extents do not match L");
}

void add_potential_force(const RField& q, const PotentialSpec& pot, RField& f) {
    const double w2 = pot.omega0 * pot.omega0;
    const double c3 = std::sqrt(pot.epsilon) * pot.lambda;  // dV3/du = sqrt(eps) lambda u^2
    if (pot.quartic_stabilizer) {
        const double c4 = 4.0 * pot.quartic_coeff();
        for (std::size_t i = 0; i < q.size(); ++i)
            f[i] -= w2 * q[i] + c3 * q[i] * q[i] + c4 * q[i] * q[i] * q[i];
    } else {
        for (std::size_t i = 0; i < q.size(); ++i) f[i] -= w2 * q[i] + c3 * q[i] * q[i];
    }
}

RField spectral_harmonic_force(const Grid3& g, const RField& q, const CouplingStencil& st) {
    CField qhat = dft(g, q);
    for (std::int64_t i = 0; i < g.size(); ++i)
        qhat[static_cast<std::size_t>(i)] *= -st.fourier(g.kvec(i));
    return idft_real(g, qhat);
}

struct Engine {
    Grid3 grid;
    BoundStencil bound;
    PotentialSpec pot;
    ForceRoute route;

    Engine(int L, const CouplingStencil& st, const PotentialSpec& p, ForceRoute r)
        : grid(L), bound(st, L), pot(p), route(r) {
        pot.validate();
    }

    RField force(const RField& q) const {
        RField f;
        if (route == ForceRoute::Spectral) {
            f = spectral_harmonic_force(grid, q, bound.folded);
        } else {
            f.assign(q.size(), 0.0);
            bound.convolve(q, f);
            for (double& v : f) v = -v;
        }
        add_potential_force(q, pot, f);
        return f;
    }
};

void enforce_ceiling(const FieldState& s, double ceiling) {
    double m = 0.0;
    for (double v : s.q) {
        if (!std::isfinite(v)) throw BlowUpError("evolve: non-finite displacement at t=" +
                                                 std::to_string(s.t));
        m = std::max(m, std::abs(v));
    }
    if (m > ceiling) {
        std::ostringstream msg;
        msg << "evolve: amplitude " << m << " exceeds ceiling " << ceiling << " at t=" << s.t
            << " (cubic-only potential is unbounded below)";
        throw BlowUpError(msg.str());
    }
}

}  // namespace

double energy(const FieldState& s, const CouplingStencil& stencil, const PotentialSpec& pot) {
    check_state(s);
    pot.validate();
    s.check_finite();
    BoundStencil bound(stencil, s.L);

    const double w2 = pot.omega0 * pot.omega0;
    double quad = 0.0;
    for (std::size_t i = 0; i < s.q.size(); ++i)
        quad += s.p[i] * s.p[i] + w2 * s.q[i] * s.q[i];

    RField conv(s.q.size(), 0.0);
    bound.convolve(s.q, conv);
    double inter = 0.0;
    for (std::size_t i = 0; i < s.q.size(); ++i) inter += s.q[i] * conv[i];

    const double c3 = pot.cubic_coeff();
    const double c4 = pot.quartic_stabilizer ? pot.quartic_coeff() : 0.0;
    double onsite = 0.0;
    for (double u : s.q) onsite += c3 * u * u * u + c4 * u * u * u * u;

    double h = 0.5 * quad + 0.5 * inter + onsite;
    if (!std::isfinite(h)) throw BlowUpError("energy: non-finite Hamiltonian");
    return h;
}

RField forces(const FieldState& s, const CouplingStencil& stencil, const PotentialSpec& pot,
              ForceRoute route) {
    check_state(s);
    Engine eng(s.L, stencil, pot, route);
    RField f = eng.force(s.q);
    for (double v : f)
        if (!std::isfinite(v)) throw BlowUpError("forces: non-finite output");
    return f;
}

FieldState verlet_step(const FieldState& s, double h, const CouplingStencil& stencil,
                       const PotentialSpec& pot, const EvolveOptions& opts) {
    if (!(h > 0.0)) throw ConfigError("verlet_step: h must be > 0");
    return evolve(s, h, h, stencil, pot, opts);
}

FieldState evolve(FieldState s, double T, double h, const CouplingStencil& stencil,
                  const PotentialSpec& pot, const EvolveOptions& opts) {
    check_state(s);
    if (T < 0.0) throw ConfigError("evolve: T must be >= 0");
    if (!(h > 0.0)) throw ConfigError("evolve: h must be > 0");
    Engine eng(s.L, stencil, pot, opts.route);
    const double ceiling =
        opts.amplitude_ceiling > 0.0 ? opts.amplitude_ceiling : 10.0 / std::sqrt(pot.epsilon);

    std::int64_t steps = static_cast<std::int64_t>(std::llround(T / h));
    if (steps * h < T - 1e-12 * std::max(1.0, T)) ++steps;
    enforce_ceiling(s, ceiling);

    RField f = eng.force(s.q);
    for (std::int64_t n = 0; n < steps; ++n) {
        for (std::size_t i = 0; i < s.q.size(); ++i) {
            s.p[i] += 0.5 * h * f[i];
            s.q[i] += h * s.p[i];
        }
        f = eng.force(s.q);
        for (std::size_t i = 0; i < s.p.size(); ++i) s.p[i] += 0.5 * h * f[i];
        s.t += h;
        enforce_ceiling(s, ceiling);
        if (opts.observer_stride > 0 && opts.observer && (n + 1) % opts.observer_stride == 0)
            opts.observer(s, n + 1);
    }
    return s;
}

double default_timestep(const DispersionModel& model, const Grid3& g) {
    return 0.05 / model.omega_max(g);
}

namespace {
constexpr char kMagic[4] = {'P', 'H', 'S', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}
}  // namespace

void write_snapshot(std::ostream& os, const FieldState& s, const PotentialSpec& pot) {
    check_state(s);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(s.L));
    put_u32(os, 0);  // reserved
    put_f64(os, s.t);
    put_f64(os, pot.epsilon);
    put_f64(os, pot.lambda);
    put_f64(os, pot.omega0);
    for (double v : s.q) put_f64(os, v);
    for (double v : s.p) put_f64(os, v);
}

FieldState read_snapshot(std::istream& is, PotentialSpec* pot_out) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw ConfigError("snapshot: bad magic");
    if (get_u32(is) != kVersion) throw ConfigError("snapshot: unsupported version");
    int L = static_cast<int>(get_u32(is));
    (void)get_u32(is);
    FieldState s = FieldState::zero(L);
    s.t = get_f64(is);
    PotentialSpec pot;
    pot.epsilon = get_f64(is);
    pot.lambda = get_f64(is);
    pot.omega0 = get_f64(is);
    for (double& v : s.q) v = get_f64(is);
    for (double& v : s.p) v = get_f64(is);
    if (!is) throw ConfigError("snapshot: truncated payload");
    if (pot_out) *pot_out = pot;
    return s;
}

void write_snapshot_csv(std::ostream& os, const FieldState& s) {
    check_state(s);
    Grid3 g(s.L);
    os << "x,y,z,q,p\n";
    char buf[96];
    for (std::int64_t i = 0; i < g.size(); ++i) {
        IVec3 c = g.coords(i);
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g\n", c[0], c[1], c[2],
                      s.q[static_cast<std::size_t>(i)], s.p[static_cast<std::size_t>(i)]);
        os << buf;
    }
}

}  // namespace phonolab
