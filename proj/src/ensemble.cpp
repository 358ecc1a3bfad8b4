#include "phonolab/ensemble.hpp"

#include <cmath>

#include "phonolab/fft.hpp"
#include "phonolab/rng.hpp"

namespace phonolab {

void GaussianEnsembleSpec::validate() const {
    Grid3 g(L);
    if (static_cast<std::int64_t>(W.size()) != g.size())
        throw ConfigError("ensemble: W table does not match grid");
    for (double w : W)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ConfigError("ensemble: W(k) must be finite and >= 0");
    if (envelope) {
        if (envelope->size() != W.size())
            throw ConfigError("ensemble: envelope does not match grid");
        for (double v : *envelope)
            if (!(v >= 0.0)) throw ConfigError("ensemble: envelope must be >= 0");
    }
}

AField draw_sample(const GaussianEnsembleSpec& spec, std::uint64_t sample_index) {
    spec.validate();
    Grid3 g(spec.L);
    RngStream rng(spec.seed, sample_index);
    AField out = AField::zero(spec.L);
    const double vol = static_cast<double>(g.size());
    for (std::int64_t i = 0; i < g.size(); ++i) {
        auto [g1, g2] = rng.gaussian_pair();
        double amp = std::sqrt(0.5 * vol * spec.W[static_cast<std::size_t>(i)]);
        out.a[static_cast<std::size_t>(i)] = {amp * g1, amp * g2};
    }
    if (spec.envelope) {
        CField psi = idft(g, out.a);
        for (std::int64_t i = 0; i < g.size(); ++i)
            psi[static_cast<std::size_t>(i)] *=
                std::sqrt((*spec.envelope)[static_cast<std::size_t>(i)]);
        out.a = dft(g, psi);
    }
    return out;
}

HomogeneousWigner wigner_homogeneous(const std::vector<AField>& samples) {
    if (samples.empty()) throw ConfigError("wigner_homogeneous: need at least one sample");
    const int L = samples[0].L;
    Grid3 g(L);
    const std::size_t n = static_cast<std::size_t>(g.size());
    const int S = static_cast<int>(samples.size());
    const double vol = static_cast<double>(g.size());

    HomogeneousWigner out;
    out.L = L;
    out.samples = S;
    out.mean.assign(n, 0.0);
    out.stderr_.assign(n, 0.0);

    for (const AField& s : samples) {
        if (s.L != L) throw ConfigError("wigner_homogeneous: mixed grid sizes");
        for (std::size_t i = 0; i < n; ++i) out.mean[i] += std::norm(s.a[i]) / vol;
    }
    for (std::size_t i = 0; i < n; ++i) out.mean[i] /= S;

    if (S > 1) {
        // Jackknife over samples; for the plain mean this reduces to the
        // usual standard error of the mean.
        for (const AField& s : samples) {
            for (std::size_t i = 0; i < n; ++i) {
                double xi = std::norm(s.a[i]) / vol;
                double leave_out = (out.mean[i] * S - xi) / (S - 1);
                double d = leave_out - out.mean[i];
                out.stderr_[i] += d * d;
            }
        }
        const double fac = static_cast<double>(S - 1) / S;
        for (std::size_t i = 0; i < n; ++i) out.stderr_[i] = std::sqrt(fac * out.stderr_[i]);
    }
    return out;
}

InhomogeneousWigner wigner_inhomogeneous(const std::vector<AField>& samples, double eps,
                                         const WindowBox& window) {
    if (samples.empty()) throw ConfigError("wigner_inhomogeneous: need at least one sample");
    const int L = samples[0].L;
    Grid3 g(L);

    const double inv_eps = 1.0 / eps;
    if (std::abs(inv_eps - std::llround(inv_eps)) > 1e-9)
        throw ConfigError("wigner_inhomogeneous: 1/eps must be an integer");
    const double eL = eps * L;
    if (std::abs(eL - std::llround(eL)) > 1e-9)
        throw ConfigError("wigner_inhomogeneous: eps*L must be an integer");

    IVec3 lo = window.lo, hi = window.hi;
    for (int a = 0; a < 3; ++a) {
        if (hi[a] < 0) hi[a] = L - 1;
        if (lo[a] < 0 || hi[a] >= L || lo[a] > hi[a])
            throw ConfigError("wigner_inhomogeneous: window out of range");
    }

    InhomogeneousWigner out;
    out.L = L;
    out.eps = eps;
    out.samples = static_cast<int>(samples.size());
    for (int z = lo[2]; z <= hi[2]; ++z)
        for (int y = lo[1]; y <= hi[1]; ++y)
            for (int x = lo[0]; x <= hi[0]; ++x) out.sites.push_back(g.index(x, y, z));

    const std::size_t nk = static_cast<std::size_t>(g.size());
    const std::size_t ns = out.sites.size();
    std::vector<std::complex<double>> acc(ns * nk, {0.0, 0.0});

    const double two_pi = 6.283185307179586476925286766559;
    const double inv_vol = 1.0 / static_cast<double>(g.size());

    // Stream over the separation u; covariance row C_u(k) is estimated over
    // samples and scattered to all window sites with the phase factor.
    CField row(nk);
    for (std::int64_t u = 0; u < g.size(); ++u) {
        IVec3 uc = g.coords(u);
        IVec3 us = {g.signed_coord(uc[0]), g.signed_coord(uc[1]), g.signed_coord(uc[2])};
        IVec3 h1, h2;
        for (int a = 0; a < 3; ++a) {
            h1[a] = us[a] / 2;  // trunc toward zero
            h2[a] = us[a] - h1[a];
        }

        std::fill(row.begin(), row.end(), std::complex<double>(0.0, 0.0));
        for (const AField& s : samples) {
            for (std::int64_t k = 0; k < g.size(); ++k) {
                IVec3 kc = g.coords(k);
                std::int64_t km = g.index_wrapped(kc[0] - h1[0], kc[1] - h1[1], kc[2] - h1[2]);
                std::int64_t kp = g.index_wrapped(kc[0] + h2[0], kc[1] + h2[1], kc[2] + h2[2]);
                row[static_cast<std::size_t>(k)] +=
                    std::conj(s.a[static_cast<std::size_t>(km)]) *
                    s.a[static_cast<std::size_t>(kp)];
            }
        }
        const double norm = inv_vol / static_cast<double>(samples.size());

        for (std::size_t si = 0; si < ns; ++si) {
            IVec3 xc = g.coords(out.sites[si]);
            double phase = two_pi *
                           (double(xc[0]) * uc[0] + double(xc[1]) * uc[1] +
                            double(xc[2]) * uc[2]) /
                           static_cast<double>(L);
            std::complex<double> ph = std::polar(norm, phase);
            std::complex<double>* dst = acc.data() + si * nk;
            for (std::size_t k = 0; k < nk; ++k) dst[k] += ph * row[k];
        }
    }

    out.values.resize(ns * nk);
    double imag_max = 0.0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        out.values[i] = acc[i].real();
        imag_max = std::max(imag_max, std::abs(acc[i].imag()));
    }
    out.max_imag_residue = imag_max;
    return out;
}

Totals mean_totals(const std::vector<AField>& samples, const DispersionModel& model) {
    if (samples.empty()) throw ConfigError("mean_totals: need at least one sample");
    Totals tot;
    for (const AField& s : samples) {
        Totals t = conserved_totals(s, model);
        tot.phonon_number += t.phonon_number;
        tot.energy += t.energy;
    }
    tot.phonon_number /= samples.size();
    tot.energy /= samples.size();
    return tot;
}

Totals table_totals(const Grid3& g, const RField& W, const DispersionModel& model) {
    Totals tot;
    for (std::int64_t i = 0; i < g.size(); ++i) {
        tot.phonon_number += W[static_cast<std::size_t>(i)];
        tot.energy += model.omega(g, i) * W[static_cast<std::size_t>(i)];
    }
    tot.phonon_number /= static_cast<double>(g.size());
    tot.energy /= static_cast<double>(g.size());
    return tot;
}

}  // namespace phonolab
