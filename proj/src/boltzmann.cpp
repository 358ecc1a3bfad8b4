#include "phonolab/boltzmann.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace phonolab {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 6.283185307179586476925286766559;

RField rk4_step(const RField& W, double dt, const CollisionKernel& K) {
    const std::size_t n = W.size();
    RField k1 = K.apply(W);
    RField tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = W[i] + 0.5 * dt * k1[i];
    RField k2 = K.apply(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = W[i] + 0.5 * dt * k2[i];
    RField k3 = K.apply(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = W[i] + dt * k3[i];
    RField k4 = K.apply(tmp);
    RField out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = W[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

double sup_diff(const RField& a, const RField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
}  // namespace

Trajectory solve_homogeneous(const RField& W0, double t_end, double dt,
                             const CollisionKernel& kernel, const SolveOptions& opts) {
    if (!(dt > 0.0)) throw ConfigError("solve_homogeneous: dt must be > 0");
    if (t_end < 0.0) throw ConfigError("solve_homogeneous: t_end must be >= 0");

    Trajectory traj;
    RField W = W0;
    double t = 0.0;
    traj.times.push_back(t);
    traj.snapshots.push_back(W);
    traj.energies.push_back(kernel.energy_functional(W));
    traj.min_value = *std::min_element(W.begin(), W.end());

    std::int64_t step = 0;
    while (t < t_end - 1e-12 * std::max(1.0, t_end)) {
        double h = std::min(dt, t_end - t);
        if (opts.adaptive) {
            int halvings = 0;
            for (;;) {
                RField full = rk4_step(W, h, kernel);
                RField half = rk4_step(rk4_step(W, 0.5 * h, kernel), 0.5 * h, kernel);
                if (sup_diff(full, half) <= opts.step_tol) {
                    W = std::move(half);
                    break;
                }
                h *= 0.5;
                if (++halvings > opts.max_halvings)
                    throw StepError("solve_homogeneous: step-doubling did not converge");
            }
        } else {
            W = rk4_step(W, h, kernel);
        }
        t += h;
        ++step;
        double mn = *std::min_element(W.begin(), W.end());
        traj.min_value = std::min(traj.min_value, mn);
        if (mn < -opts.negativity_tol) traj.negativity_warning = true;
        bool record = opts.snapshot_stride > 0 && step % opts.snapshot_stride == 0;
        if (record || t >= t_end - 1e-12 * std::max(1.0, t_end)) {
            traj.times.push_back(t);
            traj.snapshots.push_back(W);
            traj.energies.push_back(kernel.energy_functional(W));
        }
    }
    if (traj.times.size() == 1) {  // t_end == 0
        traj.times.push_back(0.0);
        traj.snapshots.push_back(W);
        traj.energies.push_back(traj.energies[0]);
    }
    return traj;
}

InhomogeneousState free_streaming_step(const InhomogeneousState& s, double dt,
                                       const DispersionModel& model) {
    const int M = s.rgrid.M;
    Grid3 kg(s.N), rg(M);
    const std::size_t nk = s.nk();
    InhomogeneousState out = s;

    for (std::int64_t k = 0; k < kg.size(); ++k) {
        auto grad = model.grad_omega(kg.kvec(k));
        // departure displacement in cell units
        double d[3];
        for (int a = 0; a < 3; ++a) d[a] = dt * grad[a] / kTwoPi / s.rgrid.spacing;
        int base[3];
        double frac[3];
        for (int a = 0; a < 3; ++a) {
            double shifted = -d[a];
            double fl = std::floor(shifted);
            base[a] = static_cast<int>(fl);
            frac[a] = shifted - fl;
        }
        for (std::int64_t r = 0; r < rg.size(); ++r) {
            IVec3 c = rg.coords(r);
            double acc = 0.0;
            for (int dz = 0; dz <= 1; ++dz)
                for (int dy = 0; dy <= 1; ++dy)
                    for (int dx = 0; dx <= 1; ++dx) {
                        double w = (dx ? frac[0] : 1.0 - frac[0]) *
                                   (dy ? frac[1] : 1.0 - frac[1]) *
                                   (dz ? frac[2] : 1.0 - frac[2]);
                        if (w == 0.0) continue;
                        std::int64_t src = rg.index_wrapped(c[0] + base[0] + dx,
                                                            c[1] + base[1] + dy,
                                                            c[2] + base[2] + dz);
                        acc += w * s.values[static_cast<std::size_t>(src) * nk +
                                            static_cast<std::size_t>(k)];
                    }
            out.values[static_cast<std::size_t>(r) * nk + static_cast<std::size_t>(k)] = acc;
        }
    }
    return out;
}

InhomogeneousTrajectory solve_inhomogeneous(const InhomogeneousState& W0, double t_end,
                                            double dt, const CollisionKernel& kernel,
                                            const SolveOptions& opts) {
    if (kernel.config().N != W0.N)
        throw ConfigError("solve_inhomogeneous: kernel grid does not match state");
    InhomogeneousTrajectory traj;
    InhomogeneousState s = W0;
    double t = 0.0;
    traj.times.push_back(t);
    traj.snapshots.push_back(s);

    const std::size_t nk = s.nk();
    std::int64_t step = 0;
    while (t < t_end - 1e-12 * std::max(1.0, t_end)) {
        double h = std::min(dt, t_end - t);
        s = free_streaming_step(s, 0.5 * h, kernel.config().model);
        for (std::size_t r = 0; r < s.nr(); ++r) {
            RField slice(s.values.begin() + r * nk, s.values.begin() + (r + 1) * nk);
            slice = rk4_step(slice, h, kernel);
            std::copy(slice.begin(), slice.end(), s.values.begin() + r * nk);
        }
        s = free_streaming_step(s, 0.5 * h, kernel.config().model);
        t += h;
        ++step;
        bool record = opts.snapshot_stride > 0 && step % opts.snapshot_stride == 0;
        if (record || t >= t_end - 1e-12 * std::max(1.0, t_end)) {
            traj.times.push_back(t);
            traj.snapshots.push_back(s);
        }
    }
    return traj;
}

TensorView view_of(const KTensor& t) {
    return {t.order(), [&t](const std::int64_t* idx) { return t.at(idx); }};
}

TensorView product_closure(const KTensor& top, const RField& tail) {
    return {top.order() + 1, [&top, &tail](const std::int64_t* idx) {
                return top.at(idx) * tail[static_cast<std::size_t>(idx[top.order()])];
            }};
}

CollisionGeometry::CollisionGeometry(const CollisionKernel& kernel)
    : grid_(kernel.config().N), channels_(kernel.config().channels) {
    const std::int64_t n = grid_.size();
    if (n * n * static_cast<std::int64_t>(channels_.size()) > (std::int64_t(1) << 24))
        throw ConfigError("CollisionGeometry: grid too large for dense weights");

    const auto& cfg = kernel.config();
    const auto& omega = kernel.omega();
    const int N = cfg.N;
    const double pref =
        4.0 * kPi * cfg.lambda * cfg.lambda / 8.0 / static_cast<double>(n);

    wt_.resize(channels_.size());
    partner_.resize(channels_.size());
    for (std::size_t c = 0; c < channels_.size(); ++c) {
        const int s1 = channels_[c].s1, s2 = channels_[c].s2;
        std::vector<int> fold(N * N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) fold[a * N + b] = ((-s2 * (a + s1 * b)) % N + N) % N;
        wt_[c].assign(static_cast<std::size_t>(n) * n, 0.0);
        partner_[c].assign(static_cast<std::size_t>(n) * n, 0);
        for (std::int64_t k = 0; k < n; ++k) {
            const int kx = static_cast<int>(k % N);
            const int ky = static_cast<int>((k / N) % N);
            const int kz = static_cast<int>(k / (static_cast<std::int64_t>(N) * N));
            for (std::int64_t k1 = 0; k1 < n; ++k1) {
                const int x1 = static_cast<int>(k1 % N);
                const int y1 = static_cast<int>((k1 / N) % N);
                const int z1 = static_cast<int>(k1 / (static_cast<std::int64_t>(N) * N));
                std::int64_t k2 =
                    fold[kx * N + x1] +
                    static_cast<std::int64_t>(N) *
                        (fold[ky * N + y1] + static_cast<std::int64_t>(N) * fold[kz * N + z1]);
                double arg = omega[k] + s1 * omega[k1] + s2 * omega[k2];
                wt_[c][static_cast<std::size_t>(k * n + k1)] =
                    pref * cfg.moll(arg) / (omega[k] * omega[k1] * omega[k2]);
                partner_[c][static_cast<std::size_t>(k * n + k1)] = k2;
            }
        }
    }
}

RField CollisionGeometry::apply(const RField& W) const {
    const std::int64_t n = grid_.size();
    RField out(W.size(), 0.0);
    for (std::size_t c = 0; c < channels_.size(); ++c) {
        const double s2 = channels_[c].s2;
        for (std::int64_t k = 0; k < n; ++k) {
            const double* wt = wt_[c].data() + k * n;
            const std::int64_t* pr = partner_[c].data() + k * n;
            double acc = 0.0;
            for (std::int64_t k1 = 0; k1 < n; ++k1) {
                double w1 = W[static_cast<std::size_t>(k1)];
                acc += wt[k1] * (w1 * W[static_cast<std::size_t>(pr[k1])] +
                                 2.0 * s2 * W[static_cast<std::size_t>(k)] * w1);
            }
            out[static_cast<std::size_t>(k)] += acc;
        }
    }
    return out;
}

RField CollisionGeometry::gain(const RField& u, const RField& v) const {
    const std::int64_t n = grid_.size();
    RField out(u.size(), 0.0);
    for (std::size_t c = 0; c < channels_.size(); ++c) {
        for (std::int64_t k = 0; k < n; ++k) {
            const double* wt = wt_[c].data() + k * n;
            const std::int64_t* pr = partner_[c].data() + k * n;
            double acc = 0.0;
            for (std::int64_t k1 = 0; k1 < n; ++k1)
                acc += wt[k1] * u[static_cast<std::size_t>(k1)] *
                       v[static_cast<std::size_t>(pr[k1])];
            out[static_cast<std::size_t>(k)] += acc;
        }
    }
    return out;
}

RField CollisionGeometry::loss_density(const RField& v) const {
    const std::int64_t n = grid_.size();
    RField out(v.size(), 0.0);
    for (std::size_t c = 0; c < channels_.size(); ++c) {
        const double s2 = channels_[c].s2;
        for (std::int64_t k = 0; k < n; ++k) {
            const double* wt = wt_[c].data() + k * n;
            double acc = 0.0;
            for (std::int64_t k1 = 0; k1 < n; ++k1)
                acc += wt[k1] * v[static_cast<std::size_t>(k1)];
            out[static_cast<std::size_t>(k)] += 2.0 * s2 * acc;
        }
    }
    return out;
}

KTensor hierarchy_collision(const TensorView& f_np1, int n, const CollisionGeometry& geom) {
    if (f_np1.order != n + 1) throw ConfigError("hierarchy_collision: view order != n+1");
    const std::int64_t nk = geom.grid().size();
    KTensor out(n, nk);

    std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
    std::vector<std::int64_t> arg(static_cast<std::size_t>(n) + 1, 0);
    const std::int64_t total = static_cast<std::int64_t>(out.data().size());

    for (std::int64_t flat = 0; flat < total; ++flat) {
        // unpack flat -> idx (first index fastest)
        std::int64_t rem = flat;
        for (int i = 0; i < n; ++i) {
            idx[static_cast<std::size_t>(i)] = rem % nk;
            rem /= nk;
        }
        double acc = 0.0;
        for (int l = 0; l < n; ++l) {
            const std::int64_t kl = idx[static_cast<std::size_t>(l)];
            for (int c = 0; c < geom.channel_count(); ++c) {
                const double s2 = geom.channel(c).s2;
                const double* wt = geom.weights(c).data() + kl * nk;
                for (std::int64_t kp = 0; kp < nk; ++kp) {
                    const double w = wt[kp];
                    if (w == 0.0) continue;
                    const std::int64_t kpp = geom.partner(c, kl, kp);
                    // gain: slot l -> k', append k''
                    for (int i = 0; i < n; ++i) arg[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)];
                    arg[static_cast<std::size_t>(l)] = kp;
                    arg[static_cast<std::size_t>(n)] = kpp;
                    double bracket = f_np1.eval(arg.data());
                    // loss: original slots, append k'
                    arg[static_cast<std::size_t>(l)] = kl;
                    arg[static_cast<std::size_t>(n)] = kp;
                    bracket += 2.0 * s2 * f_np1.eval(arg.data());
                    acc += w * bracket;
                }
            }
        }
        out.data()[static_cast<std::size_t>(flat)] = acc;
    }
    return out;
}

namespace {

// Factorized-chain engine for the perturbative series: a term is a scalar
// coefficient with one function id per slot; applying C_{m,m+1} maps each
// term to 2m terms built from the gain and loss primitives. Results of the
// primitives are memoized by operand ids.
struct ChainEngine {
    const CollisionGeometry& geom;
    std::vector<RField> funcs;
    std::map<std::pair<int, int>, int> gain_memo;   // symmetric
    std::map<int, int> rho_memo;
    std::map<std::pair<int, int>, int> prod_memo;   // symmetric

    explicit ChainEngine(const CollisionGeometry& g) : geom(g) {}

    int add(RField f) {
        funcs.push_back(std::move(f));
        return static_cast<int>(funcs.size()) - 1;
    }

    int gain(int a, int b) {
        auto key = std::minmax(a, b);
        auto it = gain_memo.find(key);
        if (it != gain_memo.end()) return it->second;
        int id = add(geom.gain(funcs[static_cast<std::size_t>(a)],
                               funcs[static_cast<std::size_t>(b)]));
        gain_memo[key] = id;
        return id;
    }

    int rho(int a) {
        auto it = rho_memo.find(a);
        if (it != rho_memo.end()) return it->second;
        int id = add(geom.loss_density(funcs[static_cast<std::size_t>(a)]));
        rho_memo[a] = id;
        return id;
    }

    int prod(int a, int b) {
        auto key = std::minmax(a, b);
        auto it = prod_memo.find(key);
        if (it != prod_memo.end()) return it->second;
        RField r = funcs[static_cast<std::size_t>(a)];
        const RField& g = funcs[static_cast<std::size_t>(b)];
        for (std::size_t i = 0; i < r.size(); ++i) r[i] *= g[i];
        int id = add(std::move(r));
        prod_memo[key] = id;
        return id;
    }
};

struct ChainTerm {
    double coef;
    std::vector<int> slots;
};

}  // namespace

SeriesExpansion perturbative_series(const RField& W0, double t, int order,
                                    const CollisionGeometry& geom) {
    if (order < 0 || order > 4) throw ConfigError("perturbative_series: order must be 0..4");
    if (static_cast<std::int64_t>(W0.size()) != geom.grid().size())
        throw ConfigError("perturbative_series: W0 does not match grid");

    SeriesExpansion out;
    out.t = t;
    out.terms.push_back(W0);
    out.partial_sums.push_back(W0);

    ChainEngine eng(geom);
    const int w0 = eng.add(W0);

    double tn_fact = 1.0;
    for (int n = 1; n <= order; ++n) {
        tn_fact *= t / n;
        std::vector<ChainTerm> terms = {{1.0, std::vector<int>(static_cast<std::size_t>(n) + 1, w0)}};
        for (int m = n; m >= 1; --m) {
            std::vector<ChainTerm> next;
            next.reserve(terms.size() * 2 * static_cast<std::size_t>(m));
            for (const ChainTerm& term : terms) {
                const int extra = term.slots.back();
                for (int l = 0; l < m; ++l) {
                    ChainTerm g;
                    g.coef = term.coef;
                    g.slots.assign(term.slots.begin(), term.slots.end() - 1);
                    g.slots[static_cast<std::size_t>(l)] =
                        eng.gain(term.slots[static_cast<std::size_t>(l)], extra);
                    next.push_back(std::move(g));

                    ChainTerm lo;
                    lo.coef = term.coef;
                    lo.slots.assign(term.slots.begin(), term.slots.end() - 1);
                    lo.slots[static_cast<std::size_t>(l)] =
                        eng.prod(term.slots[static_cast<std::size_t>(l)], eng.rho(extra));
                    next.push_back(std::move(lo));
                }
            }
            terms = std::move(next);
        }
        RField Wn(W0.size(), 0.0);
        for (const ChainTerm& term : terms) {
            const RField& f = eng.funcs[static_cast<std::size_t>(term.slots[0])];
            for (std::size_t i = 0; i < Wn.size(); ++i) Wn[i] += term.coef * f[i];
        }
        for (double& v : Wn) v *= tn_fact;
        RField partial = out.partial_sums.back();
        for (std::size_t i = 0; i < partial.size(); ++i) partial[i] += Wn[i];
        out.terms.push_back(std::move(Wn));
        out.partial_sums.push_back(std::move(partial));
    }
    return out;
}

namespace {

std::vector<KTensor> hierarchy_rhs(const std::vector<KTensor>& f,
                                   const CollisionGeometry& geom) {
    const int n_max = static_cast<int>(f.size());
    std::vector<KTensor> d;
    d.reserve(f.size());
    for (int n = 1; n <= n_max; ++n) {
        if (n < n_max) {
            d.push_back(hierarchy_collision(view_of(f[static_cast<std::size_t>(n)]), n, geom));
        } else {
            const KTensor& top = f[static_cast<std::size_t>(n - 1)];
            const RField& f1 = f[0].data();
            d.push_back(hierarchy_collision(product_closure(top, f1), n, geom));
        }
    }
    return d;
}

void axpy(std::vector<KTensor>& y, double a, const std::vector<KTensor>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto& yd = y[i].data();
        const auto& xd = x[i].data();
        for (std::size_t j = 0; j < yd.size(); ++j) yd[j] += a * xd[j];
    }
}

}  // namespace

FactorizationReport factorization_check(const RField& W0, double t, int n_max, double dt,
                                        const CollisionGeometry& geom,
                                        const CollisionKernel& kernel) {
    if (n_max < 1 || n_max > 3) throw ConfigError("factorization_check: n_max must be 1..3");
    const std::int64_t nk = geom.grid().size();

    // factorized initial data f_n = W0^{x n}
    std::vector<KTensor> f;
    for (int n = 1; n <= n_max; ++n) {
        KTensor tn(n, nk);
        std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
        for (std::int64_t flat = 0; flat < static_cast<std::int64_t>(tn.data().size()); ++flat) {
            std::int64_t rem = flat;
            double v = 1.0;
            for (int i = 0; i < n; ++i) {
                v *= W0[static_cast<std::size_t>(rem % nk)];
                rem /= nk;
            }
            tn.data()[static_cast<std::size_t>(flat)] = v;
        }
        f.push_back(std::move(tn));
    }

    const std::int64_t steps = std::max<std::int64_t>(1, std::llround(t / dt));
    const double h = t / static_cast<double>(steps);
    for (std::int64_t s = 0; s < steps; ++s) {
        std::vector<KTensor> k1 = hierarchy_rhs(f, geom);
        std::vector<KTensor> tmp = f;
        axpy(tmp, 0.5 * h, k1);
        std::vector<KTensor> k2 = hierarchy_rhs(tmp, geom);
        tmp = f;
        axpy(tmp, 0.5 * h, k2);
        std::vector<KTensor> k3 = hierarchy_rhs(tmp, geom);
        tmp = f;
        axpy(tmp, h, k3);
        std::vector<KTensor> k4 = hierarchy_rhs(tmp, geom);
        axpy(f, h / 6.0, k1);
        axpy(f, h / 3.0, k2);
        axpy(f, h / 3.0, k3);
        axpy(f, h / 6.0, k4);
    }

    Trajectory traj = solve_homogeneous(W0, t, dt, kernel);
    const RField& W = traj.snapshots.back();

    FactorizationReport rep;
    rep.t = t;
    rep.n_max = n_max;
    for (std::int64_t k = 0; k < nk; ++k)
        rep.max_f1_dev = std::max(rep.max_f1_dev,
                                  std::abs(f[0].data()[static_cast<std::size_t>(k)] -
                                           W[static_cast<std::size_t>(k)]));
    if (n_max >= 2) {
        for (std::int64_t k2 = 0; k2 < nk; ++k2)
            for (std::int64_t k1 = 0; k1 < nk; ++k1) {
                double v = f[1].data()[static_cast<std::size_t>(k2 * nk + k1)];
                double w = W[static_cast<std::size_t>(k1)] * W[static_cast<std::size_t>(k2)];
                rep.max_f2_dev = std::max(rep.max_f2_dev, std::abs(v - w));
            }
    }
    return rep;
}

}  // namespace phonolab
