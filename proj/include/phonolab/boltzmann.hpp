// Time integration of the homogeneous kinetic equation dW/dt = C W, the
// transport split for the inhomogeneous equation, the collision hierarchy
// C_{n,n+1} on symmetric k-tensors, and the perturbative t-expansion built
// from iterated hierarchy applications on factorized data.
#pragma once

#include <functional>
#include <vector>

#include "phonolab/collision.hpp"
#include "phonolab/grid.hpp"

namespace phonolab {

struct Trajectory {
    std::vector<double> times;
    std::vector<RField> snapshots;  // first = initial, last = final
    std::vector<double> energies;   // energy functional per snapshot
    double min_value = 0.0;
    bool negativity_warning = false;
};

struct SolveOptions {
    int snapshot_stride = 0;       // 0: initial and final only
    double negativity_tol = 1e-9;  // warn when W drops below -tol
    bool adaptive = false;         // halve dt on step-doubling error
    double step_tol = 1e-8;
    int max_halvings = 8;
};

Trajectory solve_homogeneous(const RField& W0, double t_end, double dt,
                             const CollisionKernel& kernel, const SolveOptions& opts = {});

// --- inhomogeneous transport -------------------------------------------------

struct SpatialGrid {
    int M = 0;          // sites per dimension
    double spacing = 1; // macroscopic cell size (the Wigner eps)
};

struct InhomogeneousState {
    SpatialGrid rgrid;
    int N = 0;       // k-grid side
    RField values;   // [site][k] row-major

    std::size_t nk() const { return static_cast<std::size_t>(N) * N * N; }
    std::size_t nr() const { return static_cast<std::size_t>(rgrid.M) * rgrid.M * rgrid.M; }
};

// Semi-Lagrangian advection along r with velocity grad omega / 2 pi
// (trilinear periodic interpolation; unconditionally stable).
InhomogeneousState free_streaming_step(const InhomogeneousState& s, double dt,
                                       const DispersionModel& model);

struct InhomogeneousTrajectory {
    std::vector<double> times;
    std::vector<InhomogeneousState> snapshots;
};

// Strang splitting: half transport, pointwise-in-r collision, half transport.
InhomogeneousTrajectory solve_inhomogeneous(const InhomogeneousState& W0, double t_end,
                                            double dt, const CollisionKernel& kernel,
                                            const SolveOptions& opts = {});

// --- hierarchy ---------------------------------------------------------------

// Dense symmetric tensor over (k-grid)^order, first index fastest.
class KTensor {
public:
    KTensor(int order, std::int64_t nk) : order_(order), nk_(nk) {
        std::int64_t total = 1;
        for (int i = 0; i < order; ++i) {
            total *= nk;
            if (total > (std::int64_t(1) << 26))
                throw ConfigError("KTensor: resource guard exceeded");
        }
        v_.assign(static_cast<std::size_t>(total), 0.0);
    }

    int order() const { return order_; }
    std::int64_t nk() const { return nk_; }
    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }

    std::int64_t flatten(const std::int64_t* idx) const {
        std::int64_t f = 0;
        for (int i = order_ - 1; i >= 0; --i) f = f * nk_ + idx[i];
        return f;
    }
    double at(const std::int64_t* idx) const { return v_[static_cast<std::size_t>(flatten(idx))]; }

private:
    int order_;
    std::int64_t nk_;
    std::vector<double> v_;
};

// Read-only view of an (order)-argument table; lets the top hierarchy order
// close with a lazy product instead of materializing the next tensor.
struct TensorView {
    int order = 0;
    std::function<double(const std::int64_t*)> eval;
};

TensorView view_of(const KTensor& t);
// f_{n+1}(k_1..k_n, k') = top(k_1..k_n) * tail(k')
TensorView product_closure(const KTensor& top, const RField& tail);

// Precomputed collision geometry: weight(k, k', channel) covering vertex,
// mollified energy delta, and the k'-sum quadrature weight. Guarded to small
// grids (the hierarchy/series workhorse).
class CollisionGeometry {
public:
    explicit CollisionGeometry(const CollisionKernel& kernel);

    const Grid3& grid() const { return grid_; }
    int channel_count() const { return static_cast<int>(channels_.size()); }
    const Channel& channel(int c) const { return channels_[static_cast<std::size_t>(c)]; }
    // weight table for channel c: wt[k * N^3 + k1]
    const std::vector<double>& weights(int c) const { return wt_[static_cast<std::size_t>(c)]; }
    std::int64_t partner(int c, std::int64_t k, std::int64_t k1) const {
        return partner_[static_cast<std::size_t>(c)][static_cast<std::size_t>(k * grid_.size() + k1)];
    }

    RField apply(const RField& W) const;            // == CollisionKernel::apply
    RField gain(const RField& u, const RField& v) const;   // sum wt u(k') v(k'')
    RField loss_density(const RField& v) const;             // sum 2 s'' wt v(k')

private:
    Grid3 grid_;
    std::vector<Channel> channels_;
    std::vector<std::vector<double>> wt_;
    std::vector<std::vector<std::int64_t>> partner_;
};

// C_{n,n+1} f_{n+1}: per argument slot l, channels and k'-sum with the same
// vertex/delta weights as the collision operator and the bracket
// [f(.., k' at slot l, .., k'') + 2 s'' f(.., k_n, k')].
KTensor hierarchy_collision(const TensorView& f_np1, int n, const CollisionGeometry& geom);

struct SeriesExpansion {
    double t = 0.0;
    std::vector<RField> terms;         // terms[n] = W_n(.,t), n = 0..N
    std::vector<RField> partial_sums;  // running sums of terms
};

// W_n = (t^n / n!) (C_{1,2} ... C_{n,n+1} W0^{x(n+1)}), evaluated on
// factorized chains without materializing tensors.
SeriesExpansion perturbative_series(const RField& W0, double t, int order,
                                    const CollisionGeometry& geom);

struct FactorizationReport {
    double t = 0.0;
    int n_max = 0;
    double max_f1_dev = 0.0;  // sup |f1(t) - W(t)|
    double max_f2_dev = 0.0;  // sup |f2(t) - W(t) x W(t)|
};

// Evolve the truncated hierarchy (closure: factorize at top order) and
// compare against the scalar solution.
FactorizationReport factorization_check(const RField& W0, double t, int n_max, double dt,
                                        const CollisionGeometry& geom,
                                        const CollisionKernel& kernel);

}  // namespace phonolab
