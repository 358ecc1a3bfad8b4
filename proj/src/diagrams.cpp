#include "phonolab/diagrams.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

namespace phonolab {

namespace {

long long schedule_count(int n) {
    long long c = 1;
    for (int j = 2; j <= 2 * n + 1; ++j) c *= j;
    return c;
}

long long matching_count(int n) {
    // (2n+2)! / (2^{n+1} (n+1)!)
    long long num = 1;
    for (int j = 2; j <= 2 * n + 2; ++j) num *= j;
    long long den = 1;
    for (int j = 1; j <= n + 1; ++j) den *= 2 * j;
    return num / den;
}

}  // namespace

std::string FeynmanDiagram::key() const {
    std::ostringstream os;
    os << "s=";
    for (std::size_t i = 0; i < schedule.size(); ++i)
        os << (i ? "," : "") << schedule[i];
    os << "|o=";
    for (std::size_t b = 2; b < bonds.size(); ++b) os << (bonds[b].sigma > 0 ? '+' : '-');
    os << "|p=";
    bool first = true;
    for (std::size_t b = 0; b < bonds.size(); ++b) {
        if (bonds[b].pair >= 0 && static_cast<int>(b) < bonds[b].pair) {
            os << (first ? "" : ",") << b << "-" << bonds[b].pair;
            first = false;
        }
    }
    return os.str();
}

void FeynmanDiagram::validate() const {
    const int n = order;
    if (static_cast<int>(bonds.size()) != 4 * n + 2)
        throw std::logic_error("diagram: bond count != 4n+2");
    if (bonds[0].sigma != -1 || bonds[1].sigma != 1)
        throw std::logic_error("diagram: root orientations must be (down, up)");
    std::vector<int> branch_at(2 * n + 2, -1);
    for (std::size_t b = 0; b < bonds.size(); ++b) {
        const Bond& bd = bonds[b];
        if (bd.top <= bd.bottom) throw std::logic_error("diagram: bond spans nothing");
        if (bd.children[0] >= 0) {
            if (branch_at[bd.bottom] != -1)
                throw std::logic_error("diagram: two branch points on one level");
            branch_at[bd.bottom] = static_cast<int>(b);
            for (int c : bd.children)
                if (bonds[static_cast<std::size_t>(c)].top != bd.bottom)
                    throw std::logic_error("diagram: child does not start at branch level");
        } else if (bd.bottom != 0) {
            throw std::logic_error("diagram: leaf bond does not reach level 0");
        }
        if (bd.bottom == 0) {
            if (bd.pair < 0) throw std::logic_error("diagram: unpaired level-0 bond");
            const Bond& other = bonds[static_cast<std::size_t>(bd.pair)];
            if (other.pair != static_cast<int>(b))
                throw std::logic_error("diagram: pairing not symmetric");
            if (other.sigma == bd.sigma)
                throw std::logic_error("diagram: pairing must join up with down");
        }
    }
    for (int m = 1; m <= 2 * n; ++m)
        if (branch_at[m] < 0) throw std::logic_error("diagram: level without branch point");
    if (static_cast<int>(level0.size()) != 2 * n + 2)
        throw std::logic_error("diagram: level-0 bond count != 2n+2");
}

namespace {

// Builds the tree for one branch schedule, then walks orientation masks and
// up-down pairings. Bonds are created in schedule order; the open list keeps
// drawing order by replacing the branched bond with its children in place.
void emit_for_schedule(int n, const std::vector<int>& schedule,
                       const std::function<void(const FeynmanDiagram&)>& fn) {
    FeynmanDiagram base;
    base.order = n;
    base.schedule = schedule;
    base.bonds.resize(2);
    base.bonds[0] = Bond{2 * n + 1, 0, -1, -1, {-1, -1}, -1, true};
    base.bonds[1] = Bond{2 * n + 1, 0, +1, -1, {-1, -1}, -1, true};

    std::vector<int> open = {0, 1};
    for (int m = 2 * n; m >= 1; --m) {
        int j = schedule[static_cast<std::size_t>(2 * n - m)];
        int b = open[static_cast<std::size_t>(j)];
        int c1 = static_cast<int>(base.bonds.size());
        int c2 = c1 + 1;
        base.bonds[static_cast<std::size_t>(b)].bottom = m;
        base.bonds[static_cast<std::size_t>(b)].children = {c1, c2};
        base.bonds.push_back(Bond{m, 0, 0, b, {-1, -1}, -1, false});
        base.bonds.push_back(Bond{m, 0, 0, b, {-1, -1}, -1, false});
        open[static_cast<std::size_t>(j)] = c1;
        open.insert(open.begin() + j + 1, c2);
    }
    base.level0 = open;

    const int created = 4 * n;  // bonds 2 .. 4n+1 carry free orientations
    for (int mask = 0; mask < (1 << created); ++mask) {
        FeynmanDiagram d = base;
        for (int i = 0; i < created; ++i)
            d.bonds[static_cast<std::size_t>(2 + i)].sigma = (mask >> i) & 1 ? 1 : -1;

        std::vector<int> up, down;
        for (int b : d.level0)
            (d.bonds[static_cast<std::size_t>(b)].sigma > 0 ? up : down).push_back(b);
        if (up.size() != down.size()) continue;  // no admissible pairing

        // all bijections up -> down
        std::vector<int> perm(down.size());
        std::iota(perm.begin(), perm.end(), 0);
        do {
            FeynmanDiagram dd = d;
            for (std::size_t i = 0; i < up.size(); ++i) {
                int a = up[i], b = down[static_cast<std::size_t>(perm[i])];
                dd.bonds[static_cast<std::size_t>(a)].pair = b;
                dd.bonds[static_cast<std::size_t>(b)].pair = a;
            }
            fn(dd);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

void visit_schedules(int n, std::vector<int>& schedule, int level, int open_count,
                     const std::function<void(const FeynmanDiagram&)>& fn) {
    if (level == 0) {
        emit_for_schedule(n, schedule, fn);
        return;
    }
    for (int j = 0; j < open_count; ++j) {
        schedule.push_back(j);
        visit_schedules(n, schedule, level - 1, open_count + 1, fn);
        schedule.pop_back();
    }
}

}  // namespace

void visit_diagrams(int order, const std::function<void(const FeynmanDiagram&)>& fn) {
    if (order < 0 || order > 3) throw ConfigError("diagrams: resource guard exceeded (order <= 3)");
    if (order == 0) {
        FeynmanDiagram d;
        d.order = 0;
        d.bonds.resize(2);
        d.bonds[0] = Bond{1, 0, -1, -1, {-1, -1}, 1, true};
        d.bonds[1] = Bond{1, 0, +1, -1, {-1, -1}, 0, true};
        d.level0 = {0, 1};
        fn(d);
        return;
    }
    std::vector<int> schedule;
    visit_schedules(order, schedule, 2 * order, 2, fn);
}

std::vector<FeynmanDiagram> enumerate_diagrams(int order) {
    if (order > 2)
        throw ConfigError("enumerate_diagrams: materialized enumeration guarded to order <= 2");
    std::vector<FeynmanDiagram> out;
    visit_diagrams(order, [&out](const FeynmanDiagram& d) { out.push_back(d); });
    return out;
}

// ---------------------------------------------------------------------------
// Momentum assignment: exact rational elimination of the linear system given
// by Kirchhoff's rule at each branch and equality along each pairing.

namespace {

struct Rat {
    long long n = 0, d = 1;

    static long long gcd(long long a, long long b) {
        a = a < 0 ? -a : a;
        b = b < 0 ? -b : b;
        while (b) {
            long long t = a % b;
            a = b;
            b = t;
        }
        return a;
    }
    void reduce() {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        long long g = gcd(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        if (n == 0) d = 1;
    }
    Rat() = default;
    Rat(long long v) : n(v), d(1) {}
    Rat(long long nn, long long dd) : n(nn), d(dd) { reduce(); }
    bool zero() const { return n == 0; }
    Rat operator+(const Rat& o) const { return Rat(n * o.d + o.n * d, d * o.d); }
    Rat operator-(const Rat& o) const { return Rat(n * o.d - o.n * d, d * o.d); }
    Rat operator*(const Rat& o) const { return Rat(n * o.n, d * o.d); }
    Rat operator/(const Rat& o) const { return Rat(n * o.d, d * o.n); }
    Rat operator-() const { return Rat(-n, d); }
    bool operator==(const Rat& o) const { return n == o.n && d == o.d; }
};

}  // namespace

MomentumAssignment assign_momenta(const FeynmanDiagram& d) {
    const int n = d.order;
    const int nv = 4 * n;           // non-root bond momenta (bond id - 2)
    const int cq = nv, cp = nv + 1;  // symbol columns
    const int ncols = nv + 2;

    std::vector<std::vector<Rat>> rows;
    auto blank = [&]() { return std::vector<Rat>(static_cast<std::size_t>(ncols)); };
    auto col_of_bond = [&](int b) { return b == 0 ? cq : (b == 1 ? cp : b - 2); };

    // Kirchhoff at each branch: -sigma_r k_r + sigma_c1 k_c1 + sigma_c2 k_c2 = 0
    for (std::size_t b = 0; b < d.bonds.size(); ++b) {
        const Bond& bd = d.bonds[b];
        if (bd.children[0] < 0) continue;
        auto row = blank();
        row[static_cast<std::size_t>(col_of_bond(static_cast<int>(b)))] =
            row[static_cast<std::size_t>(col_of_bond(static_cast<int>(b)))] + Rat(-bd.sigma);
        for (int c : bd.children) {
            int col = col_of_bond(c);
            row[static_cast<std::size_t>(col)] =
                row[static_cast<std::size_t>(col)] +
                Rat(d.bonds[static_cast<std::size_t>(c)].sigma);
        }
        rows.push_back(std::move(row));
    }
    // Pairing: k_i - k_j = 0
    for (std::size_t b = 0; b < d.bonds.size(); ++b) {
        if (d.bonds[b].pair < 0 || static_cast<int>(b) > d.bonds[b].pair) continue;
        auto row = blank();
        int ci = col_of_bond(static_cast<int>(b));
        int cj = col_of_bond(d.bonds[b].pair);
        row[static_cast<std::size_t>(ci)] = row[static_cast<std::size_t>(ci)] + Rat(1);
        row[static_cast<std::size_t>(cj)] = row[static_cast<std::size_t>(cj)] - Rat(1);
        rows.push_back(std::move(row));
    }

    // Elimination order: internal bonds first, then level-0 bonds in reverse
    // drawing order, so the free basis lands on level-0 pair momenta.
    std::vector<int> order_vars;
    std::vector<bool> is_level0(static_cast<std::size_t>(nv), false);
    for (int b : d.level0)
        if (b >= 2) is_level0[static_cast<std::size_t>(b - 2)] = true;
    for (int v = 0; v < nv; ++v)
        if (!is_level0[static_cast<std::size_t>(v)]) order_vars.push_back(v);
    for (auto it = d.level0.rbegin(); it != d.level0.rend(); ++it)
        if (*it >= 2) order_vars.push_back(*it - 2);

    std::vector<int> pivot_row_of(static_cast<std::size_t>(nv), -1);
    std::vector<bool> row_used(rows.size(), false);
    for (int v : order_vars) {
        int pr = -1;
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (!row_used[r] && !rows[r][static_cast<std::size_t>(v)].zero()) {
                pr = static_cast<int>(r);
                break;
            }
        if (pr < 0) continue;  // v is free
        row_used[static_cast<std::size_t>(pr)] = true;
        pivot_row_of[static_cast<std::size_t>(v)] = pr;
        Rat piv = rows[static_cast<std::size_t>(pr)][static_cast<std::size_t>(v)];
        for (auto& c : rows[static_cast<std::size_t>(pr)]) c = c / piv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<int>(r) == pr) continue;
            Rat f = rows[r][static_cast<std::size_t>(v)];
            if (f.zero()) continue;
            for (std::size_t c = 0; c < rows[r].size(); ++c)
                rows[r][c] = rows[r][c] - f * rows[static_cast<std::size_t>(pr)][c];
        }
    }

    MomentumAssignment ma;

    // leftover rows constrain the externals only
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (row_used[r]) continue;
        for (int v = 0; v < nv; ++v)
            if (!rows[r][static_cast<std::size_t>(v)].zero())
                throw std::logic_error("assign_momenta: inconsistent system");
        Rat a = rows[r][static_cast<std::size_t>(cq)];
        Rat b = rows[r][static_cast<std::size_t>(cp)];
        if (a.zero() && b.zero()) continue;
        if (a == -b) {
            ma.has_global_delta = true;  // a (q - p) = 0
        } else {
            ma.external_pinned = true;  // pins q and/or p to zero
        }
    }

    // free basis: level-0 first in drawing order, then anything else
    std::vector<int> free_vars;
    for (int b : d.level0)
        if (b >= 2 && pivot_row_of[static_cast<std::size_t>(b - 2)] < 0)
            free_vars.push_back(b - 2);
    for (int v = 0; v < nv; ++v)
        if (pivot_row_of[static_cast<std::size_t>(v)] < 0 &&
            std::find(free_vars.begin(), free_vars.end(), v) == free_vars.end())
            free_vars.push_back(v);
    ma.n_free = static_cast<int>(free_vars.size());
    for (int v : free_vars) ma.free_bonds.push_back(v + 2);

    std::vector<int> free_col(static_cast<std::size_t>(nv), -1);
    for (std::size_t i = 0; i < free_vars.size(); ++i)
        free_col[static_cast<std::size_t>(free_vars[i])] = static_cast<int>(i);

    const std::size_t width = free_vars.size() + 1;  // + q
    auto expr_of_var = [&](int v) {
        AffineExpr e;
        e.coef.assign(width, 0);
        int pr = pivot_row_of[static_cast<std::size_t>(v)];
        if (pr < 0) {
            e.coef[static_cast<std::size_t>(free_col[static_cast<std::size_t>(v)])] = 1;
            return e;
        }
        const auto& row = rows[static_cast<std::size_t>(pr)];
        // v + sum_j row[j] x_j = 0  ->  v = -sum row[j] x_j
        for (int u = 0; u < nv; ++u) {
            if (u == v || row[static_cast<std::size_t>(u)].zero()) continue;
            int fc = free_col[static_cast<std::size_t>(u)];
            if (fc < 0) throw std::logic_error("assign_momenta: non-reduced row");
            Rat c = -row[static_cast<std::size_t>(u)];
            if (c.d != 1) throw std::logic_error("assign_momenta: non-integer coefficient");
            e.coef[static_cast<std::size_t>(fc)] += c.n;
        }
        // q and p columns; p folds onto q through the global delta
        Rat aq = -row[static_cast<std::size_t>(cq)];
        Rat ap = -row[static_cast<std::size_t>(cp)];
        Rat tot = ma.external_pinned ? Rat(0) : aq + ap;
        if (tot.d != 1) throw std::logic_error("assign_momenta: non-integer q coefficient");
        e.coef[width - 1] += tot.n;
        return e;
    };

    ma.bond_momentum.resize(d.bonds.size());
    for (std::size_t b = 0; b < d.bonds.size(); ++b) {
        if (static_cast<int>(b) == 0 || static_cast<int>(b) == 1) {
            AffineExpr e;
            e.coef.assign(width, 0);
            if (!ma.external_pinned) e.coef[width - 1] = 1;  // q (p == q)
            ma.bond_momentum[b] = std::move(e);
        } else {
            ma.bond_momentum[b] = expr_of_var(static_cast<int>(b) - 2);
        }
    }

    for (std::size_t b = 2; b < d.bonds.size(); ++b)
        if (ma.bond_momentum[b].is_zero()) ma.degenerate = true;

    // Rank sanity: connected diagrams carry n free internal momenta plus the
    // global delta; disconnected pairings pin both roots and gain one.
    const int expected = ma.external_pinned ? n + 1 : n;
    if (ma.n_free != expected || (!ma.external_pinned && !ma.has_global_delta))
        throw std::logic_error("assign_momenta: unexpected rank");
    return ma;
}

// ---------------------------------------------------------------------------

namespace {

// Canonical sign: flip so the first nonzero coefficient is positive.
AffineExpr canonical_sign(const AffineExpr& e) {
    for (long long c : e.coef) {
        if (c > 0) return e;
        if (c < 0) {
            AffineExpr f = e;
            for (long long& v : f.coef) v = -v;
            return f;
        }
    }
    return e;
}

}  // namespace

std::string Classification::label() const {
    switch (kind) {
        case Kind::Leading:
            return "leading";
        case Kind::SubleadingSlab:
            return "subleading:slab" + std::to_string(failing_slab);
        case Kind::SubleadingForcedZero:
            return "subleading:forced-zero";
        case Kind::SubleadingPinned:
            return "subleading:pinned";
    }
    return "?";
}

Classification classify(const FeynmanDiagram& d, const MomentumAssignment& ma) {
    Classification cls;
    if (ma.external_pinned) {
        cls.kind = Classification::Kind::SubleadingPinned;
        return cls;
    }
    if (ma.degenerate) {
        cls.kind = Classification::Kind::SubleadingForcedZero;
        return cls;
    }
    const int n = d.order;
    for (int m = 0; m <= n; ++m) {
        // bonds crossing the slab between lines 2m and 2m+1
        std::vector<std::pair<std::vector<long long>, int>> classes;  // expr -> sigma sum
        int crossing = 0;
        for (std::size_t b = 0; b < d.bonds.size(); ++b) {
            const Bond& bd = d.bonds[b];
            if (!(bd.bottom <= 2 * m && bd.top >= 2 * m + 1)) continue;
            ++crossing;
            AffineExpr ce = canonical_sign(ma.bond_momentum[b]);
            bool found = false;
            for (auto& [expr, ssum] : classes)
                if (expr == ce.coef) {
                    ssum += bd.sigma;
                    found = true;
                    break;
                }
            if (!found) classes.emplace_back(ce.coef, bd.sigma);
        }
        if (crossing != 2 * (n - m + 1))
            throw std::logic_error("classify: slab crossing count mismatch");
        for (const auto& [expr, ssum] : classes) {
            if (ssum != 0) {
                cls.kind = Classification::Kind::SubleadingSlab;
                cls.failing_slab = m;
                return cls;
            }
        }
    }
    cls.kind = Classification::Kind::Leading;
    return cls;
}

std::vector<DiagramRecord> diagram_census(int order) {
    std::vector<DiagramRecord> recs;
    visit_diagrams(order, [&recs](const FeynmanDiagram& d) {
        d.validate();
        DiagramRecord r;
        r.diagram = d;
        r.momenta = assign_momenta(d);
        r.cls = classify(d, r.momenta);
        recs.push_back(std::move(r));
    });
    return recs;
}

void write_census(std::ostream& os, const std::vector<DiagramRecord>& recs) {
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const DiagramRecord& r = recs[i];
        os << "diagram n=" << r.diagram.order << " id=" << i << " " << r.diagram.key()
           << " class=" << r.cls.label() << " free=" << r.momenta.n_free
           << " degenerate=" << (r.momenta.degenerate ? 1 : 0)
           << " pinned=" << (r.momenta.external_pinned ? 1 : 0) << "\n";
    }
}

BoundReport naive_bound_report(int n, double t, double eps, double c) {
    BoundReport rep;
    rep.n = n;
    rep.t = t;
    rep.eps = eps;
    rep.c = c;
    double fact2n = 1.0;
    for (int j = 2; j <= 2 * n; ++j) fact2n *= j;
    rep.time_factor = std::pow(t / eps, 2 * n) / fact2n;
    rep.ell_factor = fact2n;
    rep.k_factor = std::pow(c, 2 * n);
    rep.pairing_factor = static_cast<double>(matching_count(n));
    rep.bound = std::pow(eps, n) * rep.time_factor * rep.ell_factor * rep.k_factor *
                rep.pairing_factor;
    rep.census_schedules = schedule_count(n);
    rep.census_pairings = matching_count(n);
    if (n <= 2) {
        long long count = 0;
        visit_diagrams(n, [&count](const FeynmanDiagram&) { ++count; });
        rep.census_diagrams = count;
    }
    return rep;
}

FeynmanDiagram figure_diagram() {
    // Schedule in open-list indices: level 4 branches the left root, level 3
    // its right child, level 2 the right root, level 1 the first child.
    FeynmanDiagram out;
    visit_diagrams(2, [&out](const FeynmanDiagram& d) {
        if (out.order != 0) return;
        static const std::vector<int> want_schedule = {0, 1, 3, 0};
        if (d.schedule != want_schedule) return;
        // bonds k1..k8 are ids 2..9 in creation order
        static const int sig[8] = {+1, -1, +1, +1, -1, -1, +1, -1};
        for (int i = 0; i < 8; ++i)
            if (d.bonds[static_cast<std::size_t>(2 + i)].sigma != sig[i]) return;
        if (d.bonds[8].pair != 7 || d.bonds[9].pair != 4 || d.bonds[5].pair != 6) return;
        out = d;
    });
    if (out.order == 0) throw std::logic_error("figure_diagram: not found in enumeration");
    return out;
}

}  // namespace phonolab
