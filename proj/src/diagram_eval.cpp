#include <algorithm>
#include <cmath>

#include "phonolab/diagrams.hpp"

namespace phonolab {

namespace {

constexpr int kMaxNodes = 11;

// Divided difference of exp(t z) over nearly coincident nodes via the
// complete-homogeneous-symmetric series, recentered at the node mean:
//   DD(z_0..z_r) = e^{t mu} sum_{s>=0} t^{r+s}/(r+s)! h_s(z - mu).
// Safe whenever t * spread is a few units or less.
std::complex<double> dd_series(const std::complex<double>* z, int count, double t) {
    std::complex<double> mu(0.0, 0.0);
    for (int i = 0; i < count; ++i) mu += z[i];
    mu /= static_cast<double>(count);

    const int r = count - 1;
    constexpr int kTerms = 44;
    std::complex<double> h[kTerms];
    h[0] = 1.0;
    for (int s = 1; s < kTerms; ++s) h[s] = 0.0;
    for (int i = 0; i < count; ++i) {
        const std::complex<double> w = z[i] - mu;
        for (int s = 1; s < kTerms; ++s) h[s] += w * h[s - 1];
    }

    double c = 1.0;  // t^(r+s) / (r+s)!
    for (int j = 1; j <= r; ++j) c *= t / j;
    std::complex<double> acc(0.0, 0.0);
    for (int s = 0; s < kTerms; ++s) {
        std::complex<double> term = c * h[s];
        acc += term;
        if (s > 2 && std::abs(term) < 1e-18 * std::abs(acc)) break;
        c *= t / (r + s + 1);
    }
    return std::exp(t * mu) * acc;
}

}  // namespace

std::complex<double> exp_divided_difference(const std::complex<double>* nodes, int count,
                                            double t) {
    if (count == 1) return std::exp(t * nodes[0]);
    if (count > kMaxNodes) throw ConfigError("exp_divided_difference: too many nodes");
    if (t == 0.0) return {0.0, 0.0};  // empty simplex

    std::complex<double> z[kMaxNodes];
    for (int i = 0; i < count; ++i) z[i] = nodes[i];
    std::sort(z, z + count, [](const std::complex<double>& a, const std::complex<double>& b) {
        if (a.imag() != b.imag()) return a.imag() < b.imag();
        return a.real() < b.real();
    });

    // Contiguous clusters: adjacent nodes closer than 1/t stay together and
    // go through the recentered series; across clusters the plain difference
    // quotient divides by at least 1/t.
    int cluster[kMaxNodes];
    cluster[0] = 0;
    for (int i = 1; i < count; ++i)
        cluster[i] = (std::abs(z[i] - z[i - 1]) * t > 1.0) ? cluster[i - 1] + 1 : cluster[i - 1];

    std::complex<double> dd[kMaxNodes][kMaxNodes];
    for (int i = 0; i < count; ++i) dd[i][i] = std::exp(t * z[i]);
    for (int len = 1; len < count; ++len) {
        for (int i = 0; i + len < count; ++i) {
            const int j = i + len;
            if (cluster[i] == cluster[j])
                dd[i][j] = dd_series(z + i, len + 1, t);
            else
                dd[i][j] = (dd[i + 1][j] - dd[i][j - 1]) / (z[j] - z[i]);
        }
    }
    return dd[0][count - 1];
}

namespace {

struct SlabMember {
    int bond;
    double sigma;
};

}  // namespace

CField evaluate_diagram(const FeynmanDiagram& d, const MomentumAssignment& ma,
                        const DiagramEvalParams& p) {
    const int n = d.order;
    Grid3 g(p.L);
    const std::int64_t G = g.size();
    if (static_cast<std::int64_t>(p.W.size()) != G)
        throw ConfigError("evaluate_diagram: W table does not match grid");
    if (!(p.eps > 0.0)) throw ConfigError("evaluate_diagram: eps must be > 0");

    std::vector<double> omega = p.model.omega_table(g);
    std::vector<double> inv_sqrt_omega(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) inv_sqrt_omega[i] = 1.0 / std::sqrt(omega[i]);

    std::vector<int> cx(static_cast<std::size_t>(G)), cy(cx), cz(cx);
    for (std::int64_t i = 0; i < G; ++i) {
        IVec3 c = g.coords(i);
        cx[static_cast<std::size_t>(i)] = c[0];
        cy[static_cast<std::size_t>(i)] = c[1];
        cz[static_cast<std::size_t>(i)] = c[2];
    }

    const int nb = static_cast<int>(d.bonds.size());
    const int nf = ma.n_free;
    const int width = nf + 1;

    std::vector<std::vector<SlabMember>> slabs(static_cast<std::size_t>(2 * n + 1));
    for (int m = 0; m <= 2 * n; ++m)
        for (int b = 0; b < nb; ++b) {
            const Bond& bd = d.bonds[static_cast<std::size_t>(b)];
            if (bd.bottom <= m && bd.top >= m + 1)
                slabs[static_cast<std::size_t>(m)].push_back({b, double(bd.sigma)});
        }

    std::vector<std::array<int, 3>> branches;
    std::vector<double> branch_sigma;
    for (int b = 0; b < nb; ++b) {
        const Bond& bd = d.bonds[static_cast<std::size_t>(b)];
        if (bd.children[0] >= 0) {
            branches.push_back({b, bd.children[0], bd.children[1]});
            branch_sigma.push_back(double(bd.sigma));
        }
    }
    std::vector<int> pair_rep;
    for (int b = 0; b < nb; ++b)
        if (d.bonds[static_cast<std::size_t>(b)].pair > b) pair_rep.push_back(b);

    // vertex phi = lambda (8 w w' w'')^{-1/2}; one factor per branch point
    const double vertex_const = p.lambda / std::sqrt(8.0);

    CField table(static_cast<std::size_t>(G), {0.0, 0.0});

    std::vector<std::int64_t> qlist;
    if (ma.external_pinned) {
        qlist.push_back(0);
    } else {
        qlist.resize(static_cast<std::size_t>(G));
        for (std::int64_t i = 0; i < G; ++i) qlist[static_cast<std::size_t>(i)] = i;
    }

    std::vector<std::int64_t> f(static_cast<std::size_t>(std::max(nf, 1)), 0);
    std::vector<int> bond_fx(static_cast<std::size_t>(nb)), bond_fy(bond_fx), bond_fz(bond_fx);
    std::vector<int> bond_cq(static_cast<std::size_t>(nb));
    for (int b = 0; b < nb; ++b)
        bond_cq[static_cast<std::size_t>(b)] = static_cast<int>(
            ma.bond_momentum[static_cast<std::size_t>(b)].coef[static_cast<std::size_t>(width - 1)]);

    std::vector<std::int64_t> idx(static_cast<std::size_t>(nb));
    std::vector<std::complex<double>> nodes(static_cast<std::size_t>(2 * n + 1));

    std::int64_t total_f = 1;
    for (int i = 0; i < nf; ++i) total_f *= G;

    const int L = p.L;
    auto wrap = [L](int v) { return ((v % L) + L) % L; };

    for (std::int64_t step = 0; step < total_f; ++step) {
        std::int64_t rem = step;
        for (int i = 0; i < nf; ++i) {
            f[static_cast<std::size_t>(i)] = rem % G;
            rem /= G;
        }
        for (int b = 0; b < nb; ++b) {
            const auto& coef = ma.bond_momentum[static_cast<std::size_t>(b)].coef;
            long long sx = 0, sy = 0, sz = 0;
            for (int i = 0; i < nf; ++i) {
                const long long c = coef[static_cast<std::size_t>(i)];
                if (c == 0) continue;
                const std::size_t fi = static_cast<std::size_t>(f[static_cast<std::size_t>(i)]);
                sx += c * cx[fi];
                sy += c * cy[fi];
                sz += c * cz[fi];
            }
            bond_fx[static_cast<std::size_t>(b)] = static_cast<int>(((sx % L) + L) % L);
            bond_fy[static_cast<std::size_t>(b)] = static_cast<int>(((sy % L) + L) % L);
            bond_fz[static_cast<std::size_t>(b)] = static_cast<int>(((sz % L) + L) % L);
        }

        for (std::int64_t q : qlist) {
            for (int b = 0; b < nb; ++b) {
                const int c = bond_cq[static_cast<std::size_t>(b)];
                if (c == 0) {
                    idx[static_cast<std::size_t>(b)] =
                        g.index(bond_fx[static_cast<std::size_t>(b)],
                                bond_fy[static_cast<std::size_t>(b)],
                                bond_fz[static_cast<std::size_t>(b)]);
                } else {
                    idx[static_cast<std::size_t>(b)] = g.index(
                        wrap(bond_fx[static_cast<std::size_t>(b)] + c * cx[static_cast<std::size_t>(q)]),
                        wrap(bond_fy[static_cast<std::size_t>(b)] + c * cy[static_cast<std::size_t>(q)]),
                        wrap(bond_fz[static_cast<std::size_t>(b)] + c * cz[static_cast<std::size_t>(q)]));
                }
            }

            double weight = 1.0;
            for (std::size_t br = 0; br < branches.size(); ++br) {
                const auto& t3 = branches[br];
                weight *=
                    branch_sigma[br] * vertex_const *
                    inv_sqrt_omega[static_cast<std::size_t>(idx[static_cast<std::size_t>(t3[0])])] *
                    inv_sqrt_omega[static_cast<std::size_t>(idx[static_cast<std::size_t>(t3[1])])] *
                    inv_sqrt_omega[static_cast<std::size_t>(idx[static_cast<std::size_t>(t3[2])])];
            }
            for (int b : pair_rep)
                weight *= p.W[static_cast<std::size_t>(idx[static_cast<std::size_t>(b)])];
            if (weight == 0.0) continue;

            for (int m = 0; m <= 2 * n; ++m) {
                double phi = 0.0;
                for (const SlabMember& sm : slabs[static_cast<std::size_t>(m)])
                    phi += sm.sigma *
                           omega[static_cast<std::size_t>(idx[static_cast<std::size_t>(sm.bond)])];
                nodes[static_cast<std::size_t>(m)] = std::complex<double>(0.0, phi / p.eps);
            }
            table[static_cast<std::size_t>(q)] +=
                weight * exp_divided_difference(nodes.data(), 2 * n + 1, p.t);
        }
    }

    // (-1)^n eps^-n and the L^-3 weight per free momentum sum
    double pref = (n % 2 == 0 ? 1.0 : -1.0) * std::pow(p.eps, -n) *
                  std::pow(static_cast<double>(G), -n);
    for (auto& v : table) v *= pref;
    return table;
}

CorrectionResult wigner_correction(int order, const DiagramEvalParams& p) {
    Grid3 g(p.L);
    CField acc(static_cast<std::size_t>(g.size()), {0.0, 0.0});
    CorrectionResult res;

    visit_diagrams(order, [&](const FeynmanDiagram& d) {
        MomentumAssignment ma = assign_momenta(d);
        ++res.diagrams;
        const bool excluded = ma.degenerate || ma.external_pinned;
        if (excluded && !p.include_degenerate) {
            ++res.excluded;
            return;
        }
        CField t = evaluate_diagram(d, ma, p);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += t[i];
    });

    res.values.resize(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        res.values[i] = acc[i].real();
        res.max_imag = std::max(res.max_imag, std::abs(acc[i].imag()));
    }
    return res;
}

}  // namespace phonolab
