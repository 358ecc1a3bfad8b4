#include "phonolab/collision.hpp"

#include <algorithm>
#include <cmath>

namespace phonolab {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993;
}  // namespace

double Mollifier::operator()(double x) const {
    if (kind == Kind::Gaussian) {
        double z = x / eta;
        if (std::abs(z) > 40.0) return 0.0;
        return kInvSqrt2Pi / eta * std::exp(-0.5 * z * z);
    }
    return (eta / kPi) / (x * x + eta * eta);
}

void CollisionConfig::validate() const {
    if (!(moll.eta > 0.0)) throw ConfigError("collision: mollifier width must be > 0");
    if (N < 2) throw ConfigError("collision: grid side must be >= 2");
    if (channels.empty()) throw ConfigError("collision: no channels");
    for (const Channel& c : channels) {
        if (std::abs(c.s1) != 1 || std::abs(c.s2) != 1)
            throw ConfigError("collision: channel signs must be +-1");
        if (c.s1 == 1 && c.s2 == 1)
            throw ConfigError("collision: (+,+) channel is excluded (argument >= 3 omega0)");
    }
}

CollisionKernel::CollisionKernel(CollisionConfig cfg) : cfg_(std::move(cfg)), grid_(cfg_.N) {
    cfg_.validate();
    omega_ = cfg_.model.omega_table(grid_);
    inv_omega_.resize(omega_.size());
    for (std::size_t i = 0; i < omega_.size(); ++i) inv_omega_[i] = 1.0 / omega_[i];
    eta_min_ = 2.0 * cfg_.model.max_group_speed() / cfg_.N;
    check_resolution();
}

void CollisionKernel::check_resolution() const {
    if (cfg_.enforce_resolution && cfg_.moll.eta < eta_min_) {
        throw ResolutionError("collision: eta=" + std::to_string(cfg_.moll.eta) +
                              " below resolution criterion eta_min=" + std::to_string(eta_min_) +
                              " (2 * max group speed / N)");
    }
}

std::vector<double> CollisionKernel::apply(const std::vector<double>& W) const {
    const int N = cfg_.N;
    const std::int64_t n = grid_.size();
    if (static_cast<std::int64_t>(W.size()) != n)
        throw ConfigError("collision: W table does not match grid");

    // Per-channel fold maps: k2 = -s2 (k + s1 k1) componentwise mod N.
    const std::size_t nch = cfg_.channels.size();
    std::vector<std::vector<int>> fold(nch, std::vector<int>(N * N));
    for (std::size_t c = 0; c < nch; ++c) {
        const int s1 = cfg_.channels[c].s1, s2 = cfg_.channels[c].s2;
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                fold[c][a * N + b] = ((-s2 * (a + s1 * b)) % N + N) % N;
    }

    const double pref = 4.0 * kPi * cfg_.lambda * cfg_.lambda / 8.0 / static_cast<double>(n);
    const bool two_term = cfg_.form == CollisionForm::TwoTerm;
    std::vector<double> out(W.size(), 0.0);

#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        const int kx = static_cast<int>(k % N);
        const int ky = static_cast<int>((k / N) % N);
        const int kz = static_cast<int>(k / (static_cast<std::int64_t>(N) * N));
        const double wk = omega_[k];
        const double uk = inv_omega_[k];
        const double Wk = W[k];
        double acc = 0.0;
        for (std::size_t c = 0; c < nch; ++c) {
            const int s1 = cfg_.channels[c].s1, s2 = cfg_.channels[c].s2;
            const int* fm = fold[c].data();
            const int* fx = fm + kx * N;
            const int* fy = fm + ky * N;
            const int* fz = fm + kz * N;
            std::int64_t k1 = 0;
            for (int z1 = 0; z1 < N; ++z1) {
                const std::int64_t z2 = static_cast<std::int64_t>(fz[z1]) * N * N;
                for (int y1 = 0; y1 < N; ++y1) {
                    const std::int64_t zy2 = z2 + static_cast<std::int64_t>(fy[y1]) * N;
                    for (int x1 = 0; x1 < N; ++x1, ++k1) {
                        const std::int64_t k2 = zy2 + fx[x1];
                        const double arg = wk + s1 * omega_[k1] + s2 * omega_[k2];
                        const double dl = cfg_.moll(arg);
                        if (dl == 0.0) continue;
                        const double W1 = W[k1], W2 = W[k2];
                        const double bracket =
                            two_term ? (W1 * W2 + 2.0 * s2 * Wk * W1)
                                     : (W1 * W2 + s1 * Wk * W2 + s2 * Wk * W1);
                        acc += dl * inv_omega_[k1] * inv_omega_[k2] * bracket;
                    }
                }
            }
        }
        out[k] = pref * uk * acc;
    }
    return out;
}

double CollisionKernel::energy_functional(const std::vector<double>& W) const {
    double e = 0.0;
    for (std::size_t i = 0; i < W.size(); ++i) e += omega_[i] * W[i];
    return e / static_cast<double>(grid_.size());
}

namespace {

// Least-squares/Richardson eta->0 limit assuming leading O(eta^2) error.
void extrapolate_eta2(const std::vector<double>& etas, const std::vector<double>& vals,
                      double* limit, double* err) {
    const std::size_t m = etas.size();
    if (m == 1) {
        *limit = vals[0];
        *err = std::abs(vals[0]);
        return;
    }
    auto rich = [&](std::size_t i, std::size_t j) {
        double a = etas[i] * etas[i], b = etas[j] * etas[j];
        return (vals[j] * a - vals[i] * b) / (a - b);
    };
    double last = rich(m - 2, m - 1);
    *limit = last;
    if (m >= 3) {
        double prev = rich(m - 3, m - 2);
        *err = std::abs(last - prev);
    } else {
        *err = std::abs(last - vals[m - 1]);
    }
}

}  // namespace

MeasureReport collision_measure(const CollisionConfig& cfg, const std::vector<double>& etas) {
    cfg.validate();
    const int N = cfg.N;
    Grid3 grid(N);
    const std::int64_t n = grid.size();
    std::vector<double> omega = cfg.model.omega_table(grid);
    const double eta_min = 2.0 * cfg.model.max_group_speed() / N;

    std::vector<int> addm(N * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) addm[a * N + b] = (a + b) % N;

    MeasureReport rep;
    for (double eta : etas) {
        if (cfg.enforce_resolution && eta < eta_min)
            throw ResolutionError("collision_measure: eta below resolution criterion");
        Mollifier moll{cfg.moll.kind, eta};
        double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total)
        for (std::int64_t k = 0; k < n; ++k) {
            const int kx = static_cast<int>(k % N);
            const int ky = static_cast<int>((k / N) % N);
            const int kz = static_cast<int>(k / (static_cast<std::int64_t>(N) * N));
            const int* ax = addm.data() + kx * N;
            const int* ay = addm.data() + ky * N;
            const int* az = addm.data() + kz * N;
            const double wk = omega[k];
            double acc = 0.0;
            std::int64_t kp = 0;
            for (int zp = 0; zp < N; ++zp) {
                const std::int64_t zs = static_cast<std::int64_t>(az[zp]) * N * N;
                for (int yp = 0; yp < N; ++yp) {
                    const std::int64_t zys = zs + static_cast<std::int64_t>(ay[yp]) * N;
                    for (int xp = 0; xp < N; ++xp, ++kp)
                        acc += moll(wk + omega[kp] - omega[zys + ax[xp]]);
                }
            }
            total += acc;
        }
        rep.etas.push_back(eta);
        rep.values.push_back(total / (static_cast<double>(n) * static_cast<double>(n)));
    }
    extrapolate_eta2(rep.etas, rep.values, &rep.extrapolated, &rep.error_bar);
    return rep;
}

C0Report c0_bound(const CollisionConfig& cfg, const std::vector<double>& etas) {
    cfg.validate();
    const int N = cfg.N;
    Grid3 grid(N);
    const std::int64_t n = grid.size();
    std::vector<double> omega = cfg.model.omega_table(grid);
    const double eta_min = 2.0 * cfg.model.max_group_speed() / N;

    std::vector<int> addm(N * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) addm[a * N + b] = (a + b) % N;

    C0Report rep;
    for (double eta : etas) {
        if (cfg.enforce_resolution && eta < eta_min)
            throw ResolutionError("c0_bound: eta below resolution criterion");
        Mollifier moll{cfg.moll.kind, eta};
        std::vector<double> inner(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < n; ++k) {
            const int kx = static_cast<int>(k % N);
            const int ky = static_cast<int>((k / N) % N);
            const int kz = static_cast<int>(k / (static_cast<std::int64_t>(N) * N));
            const int* ax = addm.data() + kx * N;
            const int* ay = addm.data() + ky * N;
            const int* az = addm.data() + kz * N;
            const double wk = omega[k];
            double acc = 0.0;
            std::int64_t kp = 0;
            for (int zp = 0; zp < N; ++zp) {
                const std::int64_t zs = static_cast<std::int64_t>(az[zp]) * N * N;
                for (int yp = 0; yp < N; ++yp) {
                    const std::int64_t zys = zs + static_cast<std::int64_t>(ay[yp]) * N;
                    for (int xp = 0; xp < N; ++xp, ++kp)
                        acc += moll(wk + omega[kp] - omega[zys + ax[xp]]);
                }
            }
            inner[static_cast<std::size_t>(k)] = acc / static_cast<double>(n);
        }
        std::int64_t arg = 0;
        double sup = inner[0];
        for (std::int64_t k = 1; k < n; ++k)
            if (inner[static_cast<std::size_t>(k)] > sup) {
                sup = inner[static_cast<std::size_t>(k)];
                arg = k;
            }
        rep.etas.push_back(eta);
        rep.sup_values.push_back(sup);
        rep.argmax.push_back(arg);
    }
    const std::size_t m = rep.sup_values.size();
    if (m >= 2 && rep.sup_values[m - 1] != 0.0)
        rep.relative_variation =
            std::abs(rep.sup_values[m - 1] - rep.sup_values[m - 2]) / rep.sup_values[m - 1];
    return rep;
}

GapReport no_collision_check(const DispersionModel& model, int levels, int coarse) {
    Grid3 grid(coarse);
    const std::int64_t n = grid.size();
    std::vector<double> omega = model.omega_table(grid);
    const int N = coarse;

    std::vector<int> addm(N * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) addm[a * N + b] = (a + b) % N;

    struct Cand {
        double gap;
        Vec3 k, kp;
    };
    const std::size_t keep = 48;
    std::vector<Cand> cands;

    auto consider = [&](std::vector<Cand>& v, double gap, const Vec3& k, const Vec3& kp) {
        if (v.size() < keep) {
            v.push_back({gap, k, kp});
            std::push_heap(v.begin(), v.end(),
                           [](const Cand& a, const Cand& b) { return a.gap < b.gap; });
        } else if (gap < v.front().gap) {
            std::pop_heap(v.begin(), v.end(),
                          [](const Cand& a, const Cand& b) { return a.gap < b.gap; });
            v.back() = {gap, k, kp};
            std::push_heap(v.begin(), v.end(),
                           [](const Cand& a, const Cand& b) { return a.gap < b.gap; });
        }
    };

    GapReport rep;
    for (std::int64_t k = 0; k < n; ++k) {
        const int kx = static_cast<int>(k % N);
        const int ky = static_cast<int>((k / N) % N);
        const int kz = static_cast<int>(k / (static_cast<std::int64_t>(N) * N));
        const int* ax = addm.data() + kx * N;
        const int* ay = addm.data() + ky * N;
        const int* az = addm.data() + kz * N;
        std::int64_t kp = 0;
        for (int zp = 0; zp < N; ++zp) {
            const std::int64_t zs = static_cast<std::int64_t>(az[zp]) * N * N;
            for (int yp = 0; yp < N; ++yp) {
                const std::int64_t zys = zs + static_cast<std::int64_t>(ay[yp]) * N;
                for (int xp = 0; xp < N; ++xp, ++kp) {
                    double gap = std::abs(omega[k] + omega[kp] - omega[zys + ax[xp]]);
                    consider(cands, gap, grid.kvec(k), grid.kvec(kp));
                }
            }
        }
    }

    double spacing = 1.0 / coarse;
    auto gap_at = [&](const Vec3& k, const Vec3& kp) {
        Vec3 ks;
        for (int a = 0; a < 3; ++a) ks[a] = k[a] + kp[a];
        return std::abs(model.omega(k) + model.omega(kp) - model.omega(ks));
    };

    for (int lev = 0; lev < levels; ++lev) {
        spacing *= 0.5;
        std::vector<Cand> next;
        for (const Cand& c : cands) {
            // 5^6 local cloud at half the previous spacing
            for (int dz = -2; dz <= 2; ++dz)
                for (int dy = -2; dy <= 2; ++dy)
                    for (int dx = -2; dx <= 2; ++dx)
                        for (int ez = -2; ez <= 2; ++ez)
                            for (int ey = -2; ey <= 2; ++ey)
                                for (int ex = -2; ex <= 2; ++ex) {
                                    Vec3 k = {c.k[0] + dx * spacing, c.k[1] + dy * spacing,
                                              c.k[2] + dz * spacing};
                                    Vec3 kp = {c.kp[0] + ex * spacing, c.kp[1] + ey * spacing,
                                               c.kp[2] + ez * spacing};
                                    consider(next, gap_at(k, kp), k, kp);
                                }
        }
        cands = std::move(next);
        double best = cands[0].gap;
        for (const Cand& c : cands) best = std::min(best, c.gap);
        rep.per_level_min.push_back(best);
    }

    const Cand* best = &cands[0];
    for (const Cand& c : cands)
        if (c.gap < best->gap) best = &c;
    rep.min_gap = best->gap;
    rep.argmin_k = best->k;
    rep.argmin_kp = best->kp;
    return rep;
}

double vertex_phi(const Vec3& k, const Vec3& k1, const Vec3& k2, double lambda,
                  const DispersionModel& model) {
    double w = model.omega(k), w1 = model.omega(k1), w2 = model.omega(k2);
    if (!(w > 0.0) || !(w1 > 0.0) || !(w2 > 0.0))
        throw ModelError("vertex_phi: omega must be positive");
    return lambda / std::sqrt(8.0 * w * w1 * w2);
}

}  // namespace phonolab
