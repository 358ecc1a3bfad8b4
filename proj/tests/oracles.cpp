#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace phonolab::testing {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
using cplx = std::complex<double>;
const cplx kI(0.0, 1.0);
}  // namespace

CField dft_direct(const Grid3& g, const CField& f) {
    CField out(f.size(), {0.0, 0.0});
    for (std::int64_t k = 0; k < g.size(); ++k) {
        Vec3 kv = g.kvec(k);
        cplx acc(0.0, 0.0);
        for (std::int64_t x = 0; x < g.size(); ++x) {
            IVec3 c = g.coords(x);
            double phase = -kTwoPi * (kv[0] * c[0] + kv[1] * c[1] + kv[2] * c[2]);
            acc += f[static_cast<std::size_t>(x)] * std::polar(1.0, phase);
        }
        out[static_cast<std::size_t>(k)] = acc;
    }
    return out;
}

double energy_direct(const FieldState& s, const CouplingStencil& st, const PotentialSpec& pot) {
    Grid3 g(s.L);
    // alpha(x-y) looked up from the offset table after wrapping into the box
    auto alpha_of = [&](IVec3 d) {
        double v = 0.0;
        for (std::size_t j = 0; j < st.offsets().size(); ++j) {
            IVec3 o = st.offsets()[j];
            bool match = true;
            for (int a = 0; a < 3; ++a) {
                int delta = ((d[a] - o[a]) % s.L + s.L) % s.L;
                if (delta != 0) match = false;
            }
            if (match) v += st.values()[j];
        }
        return v;
    };

    double quad = 0.0, inter = 0.0, onsite = 0.0;
    const double w2 = pot.omega0 * pot.omega0;
    const double c3 = pot.cubic_coeff();
    const double c4 = pot.quartic_stabilizer ? pot.quartic_coeff() : 0.0;
    for (std::int64_t x = 0; x < g.size(); ++x) {
        double qx = s.q[static_cast<std::size_t>(x)];
        quad += s.p[static_cast<std::size_t>(x)] * s.p[static_cast<std::size_t>(x)] + w2 * qx * qx;
        onsite += c3 * qx * qx * qx + c4 * qx * qx * qx * qx;
        IVec3 cx = g.coords(x);
        for (std::int64_t y = 0; y < g.size(); ++y) {
            IVec3 cy = g.coords(y);
            IVec3 d = {cx[0] - cy[0], cx[1] - cy[1], cx[2] - cy[2]};
            double a = alpha_of(d);
            if (a != 0.0) inter += a * qx * s.q[static_cast<std::size_t>(y)];
        }
    }
    return 0.5 * quad + 0.5 * inter + onsite;
}

RField energy_gradient_fd(const FieldState& s, const CouplingStencil& st,
                          const PotentialSpec& pot, double step) {
    RField grad(s.q.size());
    FieldState tmp = s;
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        tmp.q[i] = s.q[i] + step;
        double ep = energy(tmp, st, pot);
        tmp.q[i] = s.q[i] - step;
        double em = energy(tmp, st, pot);
        tmp.q[i] = s.q[i];
        grad[i] = (ep - em) / (2.0 * step);
    }
    return grad;
}

// --------------------------------------------------------------------------
// From-scratch diagram generation: bonds constructed by id with explicit
// interval bookkeeping, matchings enumerated exhaustively and filtered.

namespace {

struct RawBond {
    int top = 0, bottom = 0;  // bottom 0 means still open
    int sigma = 0;
    bool branched = false;
    std::array<int, 2> kids = {-1, -1};
};

struct RawState {
    int n = 0;
    std::vector<RawBond> bonds;
    std::vector<int> branch_of_level;  // level -> bond id
};

void all_matchings(std::vector<int>& items, std::vector<std::pair<int, int>>& acc,
                   const std::function<void(const std::vector<std::pair<int, int>>&)>& fn) {
    if (items.empty()) {
        fn(acc);
        return;
    }
    int first = items[0];
    for (std::size_t j = 1; j < items.size(); ++j) {
        int partner = items[j];
        std::vector<int> rest;
        for (std::size_t i = 1; i < items.size(); ++i)
            if (i != j) rest.push_back(items[i]);
        acc.emplace_back(first, partner);
        all_matchings(rest, acc, fn);
        acc.pop_back();
    }
}

// Reconstruct the drawing-order schedule (open-list indices) from the
// id-based branch choices, then render the canonical key.
std::string render_key(const RawState& st,
                       const std::vector<std::pair<int, int>>& pairing) {
    const int n = st.n;
    std::vector<int> open = {0, 1};
    std::string key = "s=";
    for (int m = 2 * n; m >= 1; --m) {
        int b = st.branch_of_level[static_cast<std::size_t>(m)];
        auto it = std::find(open.begin(), open.end(), b);
        int j = static_cast<int>(it - open.begin());
        key += (m == 2 * n ? "" : ",") + std::to_string(j);
        open[static_cast<std::size_t>(j)] = st.bonds[static_cast<std::size_t>(b)].kids[0];
        open.insert(open.begin() + j + 1, st.bonds[static_cast<std::size_t>(b)].kids[1]);
    }
    key += "|o=";
    for (std::size_t b = 2; b < st.bonds.size(); ++b)
        key += st.bonds[b].sigma > 0 ? '+' : '-';
    key += "|p=";
    std::vector<std::pair<int, int>> sorted = pairing;
    for (auto& pr : sorted)
        if (pr.first > pr.second) std::swap(pr.first, pr.second);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        key += (i ? "," : "") + std::to_string(sorted[i].first) + "-" +
               std::to_string(sorted[i].second);
    return key;
}

void raw_sigma_and_pairings(RawState& st, std::size_t bond_idx,
                            std::vector<std::string>& keys) {
    if (bond_idx == st.bonds.size()) {
        // collect open bonds (leaves)
        std::vector<int> leaves;
        for (std::size_t b = 0; b < st.bonds.size(); ++b)
            if (!st.bonds[b].branched) leaves.push_back(static_cast<int>(b));
        if (static_cast<int>(leaves.size()) != 2 * st.n + 2)
            throw std::logic_error("brute force: leaf count");
        std::vector<std::pair<int, int>> acc;
        all_matchings(leaves, acc, [&](const std::vector<std::pair<int, int>>& match) {
            for (const auto& [a, b] : match)
                if (st.bonds[static_cast<std::size_t>(a)].sigma ==
                    st.bonds[static_cast<std::size_t>(b)].sigma)
                    return;  // up pairs only with down
            keys.push_back(render_key(st, match));
        });
        return;
    }
    if (bond_idx < 2) {  // roots carry fixed orientations
        raw_sigma_and_pairings(st, bond_idx + 1, keys);
        return;
    }
    for (int s : {-1, +1}) {
        st.bonds[bond_idx].sigma = s;
        raw_sigma_and_pairings(st, bond_idx + 1, keys);
    }
}

void raw_branch(RawState& st, int level, std::vector<std::string>& keys) {
    if (level == 0) {
        raw_sigma_and_pairings(st, 0, keys);
        return;
    }
    const std::size_t count = st.bonds.size();
    for (std::size_t b = 0; b < count; ++b) {
        RawBond& bd = st.bonds[b];
        if (bd.branched || bd.top <= level) continue;
        int c1 = static_cast<int>(st.bonds.size());
        bd.branched = true;
        bd.bottom = level;
        bd.kids = {c1, c1 + 1};
        st.branch_of_level[static_cast<std::size_t>(level)] = static_cast<int>(b);
        st.bonds.push_back(RawBond{level, 0, 0, false, {-1, -1}});
        st.bonds.push_back(RawBond{level, 0, 0, false, {-1, -1}});
        raw_branch(st, level - 1, keys);
        st.bonds.pop_back();
        st.bonds.pop_back();
        bd.branched = false;
        bd.bottom = 0;
        bd.kids = {-1, -1};
    }
}

}  // namespace

std::vector<std::string> brute_force_diagram_keys(int order) {
    std::vector<std::string> keys;
    if (order == 0) {
        keys.push_back("s=|o=|p=0-1");
        return keys;
    }
    RawState st;
    st.n = order;
    st.bonds = {RawBond{2 * order + 1, 0, -1, false, {-1, -1}},
                RawBond{2 * order + 1, 0, +1, false, {-1, -1}}};
    st.branch_of_level.assign(static_cast<std::size_t>(2 * order + 1), -1);
    raw_branch(st, 2 * order, keys);
    std::sort(keys.begin(), keys.end());
    return keys;
}

long long brute_force_matching_count(int points) {
    if (points == 0) return 1;
    if (points % 2 == 1) return 0;
    // match point 0 with each partner and recurse on the rest
    long long total = 0;
    for (int j = 1; j < points; ++j) total += brute_force_matching_count(points - 2);
    return total;
}

// --------------------------------------------------------------------------
// Time integrals: elementary antiderivatives with small-argument series.

namespace {

// E(x) = int_0^tau exp(i s x) ds
cplx phase_integral(double tau, double x) {
    if (std::abs(x * tau) < 0.5) {
        cplx acc(0.0, 0.0);
        cplx term(tau, 0.0);
        for (int j = 0; j < 24; ++j) {
            acc += term;
            term *= kI * x * tau / static_cast<double>(j + 2);
        }
        return acc;
    }
    return (std::exp(kI * x * tau) - 1.0) / (kI * x);
}

// M_m = int_0^tau s^m exp(i s A) ds
cplx power_phase_integral(double tau, double A, int m) {
    if (std::abs(A * tau) < 2.0) {
        cplx acc(0.0, 0.0);
        cplx c(1.0, 0.0);
        for (int j = 0; j < 40; ++j) {
            acc += c * std::pow(tau, m + j + 1) / static_cast<double>(m + j + 1);
            c *= kI * A / static_cast<double>(j + 1);
        }
        return acc;
    }
    cplx M = phase_integral(tau, A);
    const cplx etau = std::exp(kI * A * tau);
    for (int j = 1; j <= m; ++j)
        M = (std::pow(tau, j) * etau - static_cast<double>(j) * M) / (kI * A);
    return M;
}

}  // namespace

std::complex<double> time_double_integral(double tau, double phi_mid, double phi_bot) {
    const double delta = phi_bot - phi_mid;
    if (std::abs(delta * tau) >= 0.5)
        return (phase_integral(tau, phi_bot) - phase_integral(tau, phi_mid)) / (kI * delta);
    // Taylor in delta: sum_j (i delta)^j/(j+1)! M_{j+1}(phi_mid)
    cplx acc(0.0, 0.0);
    cplx c(1.0, 0.0);
    double fact = 1.0;
    for (int j = 0; j <= 14; ++j) {
        fact *= (j + 1);
        acc += c / fact * power_phase_integral(tau, phi_mid, j + 1);
        c *= kI * delta;
    }
    return acc;
}

std::complex<double> time_double_integral_quad(double tau, double phi_mid, double phi_bot) {
    const double delta = phi_bot - phi_mid;
    auto inner = [&](double s) {
        if (std::abs(delta * s) < 1e-5) {
            // s (1 + i delta s / 2 + (i delta s)^2/6)
            cplx z = kI * delta * s;
            return s * (1.0 + z / 2.0 + z * z / 6.0);
        }
        return (std::exp(kI * delta * s) - 1.0) / (kI * delta);
    };
    auto g = [&](double s) { return std::exp(kI * phi_mid * s) * inner(s); };
    // composite Simpson with doubling
    cplx prev(0.0, 0.0);
    for (int panels = 64; panels <= 65536; panels *= 2) {
        cplx acc = g(0.0) + g(tau);
        for (int i = 1; i < panels; ++i)
            acc += (i % 2 ? 4.0 : 2.0) * g(tau * i / panels);
        acc *= tau / (3.0 * panels);
        if (panels > 64 && std::abs(acc - prev) < 1e-13 * (1.0 + std::abs(acc))) return acc;
        prev = acc;
    }
    return prev;
}

RField duhamel_w1(const Grid3& g, const DispersionModel& model, const RField& W,
                  double lambda, double eps, double t_kinetic) {
    const std::int64_t G = g.size();
    const int L = g.side();
    const double tau = t_kinetic / eps;

    std::vector<double> omega = model.omega_table(g);
    std::vector<double> isq(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) isq[i] = 1.0 / std::sqrt(omega[i]);
    double sum_w_over_omega = 0.0;
    for (std::int64_t u = 0; u < G; ++u)
        sum_w_over_omega += W[static_cast<std::size_t>(u)] / omega[static_cast<std::size_t>(u)];

    auto fold = [&](int sgn, std::int64_t a, int s2, std::int64_t b) {
        // index of sgn*a + s2*b componentwise mod L
        IVec3 ca = g.coords(a), cb = g.coords(b);
        return g.index_wrapped(sgn * ca[0] + s2 * cb[0], sgn * ca[1] + s2 * cb[1],
                               sgn * ca[2] + s2 * cb[2]);
    };

    const double vertex_c = lambda / std::sqrt(8.0);
    const double inv_vol = 1.0 / static_cast<double>(G);

    RField out(static_cast<std::size_t>(G), 0.0);

    struct Arg {
        std::int64_t k;
        int sigma;
    };

    for (std::int64_t q = 0; q < G; ++q) {
        cplx total(0.0, 0.0);
        for (int ell = 0; ell < 2; ++ell) {
            const int sig_ell = ell == 0 ? -1 : +1;   // left root down, right root up
            const int sig_other = -sig_ell;
            for (int sp : {-1, +1}) {
                for (int spp : {-1, +1}) {
                    for (std::int64_t kp = 0; kp < G; ++kp) {
                        // momentum delta of the first vertex:
                        // -sig_ell q + sp k' + spp k'' = 0
                        std::int64_t kpp = fold(sig_ell * spp, q, -sp * spp, kp);
                        const double phi1 = vertex_c * isq[static_cast<std::size_t>(q)] *
                                            isq[static_cast<std::size_t>(kp)] *
                                            isq[static_cast<std::size_t>(kpp)];
                        const Arg m[3] = {{q, sig_other}, {kp, sp}, {kpp, spp}};
                        const double phi_mid =
                            sig_other * omega[static_cast<std::size_t>(q)] +
                            sp * omega[static_cast<std::size_t>(kp)] +
                            spp * omega[static_cast<std::size_t>(kpp)];

                        for (int r = 0; r < 3; ++r) {
                            // survivors of the second substitution, in order
                            const Arg& old0 = m[r == 0 ? 1 : 0];
                            const Arg& old1 = m[r == 2 ? 1 : 2];
                            const Arg& mr = m[r];
                            for (int s3 : {-1, +1}) {
                                for (int s4 : {-1, +1}) {
                                    const double base = -eps * sig_ell * mr.sigma * phi1;
                                    // pairing (old0,old1)(u,v): u free, needs
                                    // m_r == 0, opposite arrows everywhere
                                    if (s3 == -s4 && old0.sigma == -old1.sigma &&
                                        old0.k == old1.k && mr.k == 0) {
                                        const double phi2_base =
                                            vertex_c * isq[0];
                                        const double phi_bot =
                                            old0.sigma * omega[static_cast<std::size_t>(old0.k)] +
                                            old1.sigma * omega[static_cast<std::size_t>(old1.k)];
                                        cplx tt = time_double_integral(tau, phi_mid, phi_bot);
                                        total += base * phi2_base * sum_w_over_omega *
                                                 W[static_cast<std::size_t>(old0.k)] * inv_vol * tt;
                                    }
                                    // pairing (old0,u)(old1,v)
                                    if (s3 == -old0.sigma && s4 == -old1.sigma) {
                                        std::int64_t u = old0.k;
                                        std::int64_t v =
                                            fold(s4 * mr.sigma, mr.k, -s4 * s3, u);
                                        if (v == old1.k) {
                                            const double phi2 =
                                                vertex_c * isq[static_cast<std::size_t>(mr.k)] *
                                                isq[static_cast<std::size_t>(u)] *
                                                isq[static_cast<std::size_t>(v)];
                                            const double phi_bot =
                                                old0.sigma * omega[static_cast<std::size_t>(old0.k)] +
                                                old1.sigma * omega[static_cast<std::size_t>(old1.k)] +
                                                s3 * omega[static_cast<std::size_t>(u)] +
                                                s4 * omega[static_cast<std::size_t>(v)];
                                            cplx tt =
                                                time_double_integral(tau, phi_mid, phi_bot);
                                            total += base * phi2 *
                                                     W[static_cast<std::size_t>(old0.k)] *
                                                     W[static_cast<std::size_t>(old1.k)] *
                                                     inv_vol * tt;
                                        }
                                    }
                                    // pairing (old0,v)(old1,u)
                                    if (s4 == -old0.sigma && s3 == -old1.sigma) {
                                        std::int64_t u = old1.k;
                                        std::int64_t v =
                                            fold(s4 * mr.sigma, mr.k, -s4 * s3, u);
                                        if (v == old0.k) {
                                            const double phi2 =
                                                vertex_c * isq[static_cast<std::size_t>(mr.k)] *
                                                isq[static_cast<std::size_t>(u)] *
                                                isq[static_cast<std::size_t>(v)];
                                            const double phi_bot =
                                                old0.sigma * omega[static_cast<std::size_t>(old0.k)] +
                                                old1.sigma * omega[static_cast<std::size_t>(old1.k)] +
                                                s3 * omega[static_cast<std::size_t>(u)] +
                                                s4 * omega[static_cast<std::size_t>(v)];
                                            cplx tt =
                                                time_double_integral(tau, phi_mid, phi_bot);
                                            total += base * phi2 *
                                                     W[static_cast<std::size_t>(old0.k)] *
                                                     W[static_cast<std::size_t>(old1.k)] *
                                                     inv_vol * tt;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out[static_cast<std::size_t>(q)] = total.real();
    }
    return out;
}

}  // namespace phonolab::testing
