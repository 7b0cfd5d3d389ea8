#include "vacq/solver.hpp"

#include <algorithm>
#include <cmath>

#include "vacq/kernel.hpp"

namespace vacq {

namespace {

MixedDistribution assemble(double atom0, const std::vector<double>& mass, double h,
                           double x_max, double boundary, BoundaryKind kind) {
    MixedDistribution d;
    d.atom0 = atom0;
    d.x_max = x_max;
    d.boundary_mass = boundary;
    d.boundary_kind = kind;
    d.cdf.resize(mass.size() + 1);
    d.cdf[0] = atom0;
    for (std::size_t k = 0; k < mass.size(); ++k) d.cdf[k + 1] = d.cdf[k] + mass[k];
    d.density = node_density(mass, h);
    return d;
}

// |delta atom| + sup |delta cdf| between successive sweeps
double sweep_residual(double atom_a, const std::vector<double>& mass_a, double atom_b,
                      const std::vector<double>& mass_b) {
    double res = std::abs(atom_a - atom_b);
    double ca = atom_a, cb = atom_b, sup = 0.0;
    for (std::size_t k = 0; k < mass_a.size(); ++k) {
        ca += mass_a[k];
        cb += mass_b[k];
        sup = std::max(sup, std::abs(ca - cb));
    }
    return res + sup;
}

struct BalkGrid {
    std::size_t iK;    // node index of K; panels 0..iK-1 lie below K
    std::size_t mtot;  // total panels; x_max = mtot * h
    double h;
    double T, K;
    std::vector<double> gv;  // gv[d + iK - 1] = G((d)h - h/2 + T), d = i - k
    std::vector<double> g_node;  // G(i*h + T), i = 0..mtot
    const ConvDist* conv;

    void build(std::size_t new_mtot) {
        mtot = new_mtot;
        gv.resize(mtot + iK);
        for (std::size_t s = 0; s < gv.size(); ++s) {
            double d = static_cast<double>(s) - static_cast<double>(iK - 1);
            gv[s] = conv->cdf(d * h - 0.5 * h + T);
        }
        g_node.resize(mtot + 1);
        for (std::size_t i = 0; i <= mtot; ++i)
            g_node[i] = conv->cdf(static_cast<double>(i) * h + T);
    }
};

struct BalkState {
    double atom = 1.0;
    std::vector<double> mass;  // panels on (0, x_max)
    double beta = 0.0;         // mass parked at x_max (beyond the window)
};

// cdf of the state at node grid positions; parked mass sits at x_max exactly
std::vector<double> balk_cdf_nodes(const BalkState& st) {
    std::vector<double> c(st.mass.size() + 1);
    c[0] = st.atom;
    for (std::size_t k = 0; k < st.mass.size(); ++k) c[k + 1] = c[k] + st.mass[k];
    return c;
}

double interp_nodes(const std::vector<double>& c, double h, double x_max, double y) {
    if (y <= 0.0) return 0.0;
    if (y >= x_max) return 1.0;  // parked tail included at and beyond x_max
    double pos = y / h;
    std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= c.size()) return c.back();
    double t = pos - static_cast<double>(i);
    return c[i] + t * (c[i + 1] - c[i]);
}

// one application of the balking workload map; returns the sweep residual
double balking_sweep(BalkState& st, const BalkGrid& g) {
    const std::vector<double> cdf = balk_cdf_nodes(st);
    const double x_max = static_cast<double>(g.mtot) * g.h;
    const double below_K = cdf[g.iK];
    std::vector<double> U(g.mtot + 1);
    for (std::size_t i = 0; i <= g.mtot; ++i) {
        // joiners: workload below K picks up one service + one vacation
        double s = st.atom * g.g_node[i];
        for (std::size_t k = 0; k < g.iK; ++k) s += st.mass[k] * g.gv[i + g.iK - 1 - k];
        // balkers: workload in [K, x_i + T] drains straight past x_i
        double y = static_cast<double>(i) * g.h + g.T;
        if (y > g.K) s += std::max(0.0, interp_nodes(cdf, g.h, x_max, y) - below_K);
        U[i] = std::min(s, 1.0);
    }
    BalkState next;
    next.atom = U[0];
    next.mass.resize(g.mtot);
    for (std::size_t k = 0; k < g.mtot; ++k) next.mass[k] = std::max(U[k + 1] - U[k], 0.0);
    next.beta = std::max(1.0 - U[g.mtot], 0.0);
    double total = next.atom + next.beta;
    for (double v : next.mass) total += v;
    double scale = 1.0 / total;
    next.atom *= scale;
    next.beta *= scale;
    for (double& v : next.mass) v *= scale;

    // residual against the old state on the common window
    std::vector<double> old_mass = st.mass;
    double old_atom = st.atom;
    st = std::move(next);
    return sweep_residual(st.atom, st.mass, old_atom, old_mass);
}

double corollary2_blocking(const BalkState& st, const BalkGrid& g) {
    const std::vector<double> cdf = balk_cdf_nodes(st);
    const double x_max = static_cast<double>(g.mtot) * g.h;
    double bk = st.atom * (1.0 - g.conv->cdf(g.K + g.T));
    for (std::size_t k = 0; k < g.iK; ++k) {
        double mid = (static_cast<double>(k) + 0.5) * g.h;
        bk += st.mass[k] * (1.0 - g.conv->cdf(g.K - mid + g.T));
    }
    bk += 1.0 - interp_nodes(cdf, g.h, x_max, g.K + g.T);
    return bk;
}

void require_solvable(const QueueConfig& config, std::size_t grid_size, double tol) {
    config.validate();
    if (grid_size < 16) throw SpecError("solver needs grid_size >= 16");
    if (!(tol > 0.0)) throw SpecError("solver needs tol > 0");
    StabilityResult stab = check_stability(config);
    if (!stab.stable)
        throw UnstableError("P(sigma + v < T) = 0: the queue never empties and no "
                            "stationary law exists");
}

}  // namespace

SolverResult solve_reneging_stationary(const QueueConfig& config, std::size_t grid_size,
                                       double tol, std::size_t max_iter) {
    require_solvable(config, grid_size, tol);
    if (config.discipline != Discipline::reneging)
        throw SpecError("solve_reneging_stationary needs a reneging config");
    KernelParams params = KernelParams::make(config);
    const std::size_t m = grid_size;
    const double K = config.K;
    const double h = K / static_cast<double>(m);

    // transition kernel of the served-wait chain, atom column + panel columns
    // evaluated at panel midpoints (second order even across the density jump
    // at K - T, where node-value quadrature degrades to first order)
    std::vector<double> S0(m + 1), lossM(m), SM((m + 1) * m);
    const double loss0 = loss_sum(0.0, params);
    for (std::size_t i = 0; i <= m; ++i) {
        double x = std::min(static_cast<double>(i) * h, K);
        S0[i] = kernel_sum(x, 0.0, params);
        for (std::size_t k = 0; k < m; ++k) {
            double mid = (static_cast<double>(k) + 0.5) * h;
            SM[i * m + k] = kernel_sum(x, mid, params);
        }
    }
    for (std::size_t k = 0; k < m; ++k)
        lossM[k] = loss_sum((static_cast<double>(k) + 0.5) * h, params);

    double atom = 1.0;
    std::vector<double> mass(m, 0.0);
    std::vector<double> history;
    double residual = 0.0;
    bool converged = false;
    std::size_t it = 0;
    std::vector<double> U(m + 1), next(m);
    while (it < max_iter) {
        ++it;
        for (std::size_t i = 0; i <= m; ++i) {
            double s = atom * S0[i];
            const double* row = &SM[i * m];
            for (std::size_t k = 0; k < m; ++k) s += row[k] * mass[k];
            U[i] = s;
        }
        double new_atom = U[0];
        for (std::size_t k = 0; k < m; ++k) next[k] = std::max(U[k + 1] - U[k], 0.0);
        double total = new_atom;
        for (double v : next) total += v;
        double scale = 1.0 / total;
        new_atom *= scale;
        for (double& v : next) v *= scale;
        residual = sweep_residual(new_atom, next, atom, mass);
        atom = new_atom;
        mass = next;
        history.push_back(residual);
        if (residual < tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw ConvergenceError("reneging fixed point not reached", residual,
                               static_cast<long long>(it));

    // expected losses per served customer gives the rejection fraction, and
    // the full law is the served law scaled down by it
    double L = atom * loss0;
    for (std::size_t k = 0; k < m; ++k) L += lossM[k] * mass[k];
    const double BK = L / (1.0 + L);
    const double scale = 1.0 - BK;
    std::vector<double> scaled(m);
    for (std::size_t k = 0; k < m; ++k) scaled[k] = mass[k] * scale;
    SolverResult out;
    out.dist = assemble(atom * scale, scaled, h, K, BK, BoundaryKind::deadline_atom);
    out.dist.validate();
    out.BK = BK;
    out.iterations = it;
    out.residual = residual;
    out.converged = true;
    out.residual_history = std::move(history);
    return out;
}

SolverResult solve_balking_stationary(const QueueConfig& config, std::size_t grid_size,
                                      double tol, std::size_t max_iter) {
    require_solvable(config, grid_size, tol);
    if (config.discipline != Discipline::balking)
        throw SpecError("solve_balking_stationary needs a balking config");
    KernelParams params = KernelParams::make(config);

    BalkGrid g;
    g.iK = grid_size;
    g.h = config.K / static_cast<double>(grid_size);
    g.T = config.T;
    g.K = config.K;
    g.conv = params.conv.get();
    std::size_t mtot =
        g.iK + static_cast<std::size_t>(std::ceil(10.0 * params.conv->mean() / g.h));
    g.build(mtot);

    BalkState st;
    st.mass.assign(g.mtot, 0.0);
    std::vector<double> history;
    double residual = 0.0;
    std::size_t it = 0;
    int doublings = 0;
    bool done = false;
    while (it < max_iter) {
        ++it;
        residual = balking_sweep(st, g);
        history.push_back(residual);
        if (residual < tol) {
            if (st.beta < tol) {
                done = true;
                break;
            }
            // converged but mass still parks at the window edge: widen and go on
            if (++doublings > 32)
                throw ConvergenceError("balking window kept growing without containing "
                                       "the stationary tail",
                                       st.beta, static_cast<long long>(it));
            g.build(g.mtot * 2);
            st.mass.resize(g.mtot, 0.0);
        }
    }
    if (!done)
        throw ConvergenceError("balking fixed point not reached", residual,
                               static_cast<long long>(it));

    SolverResult out;
    out.dist = assemble(st.atom, st.mass, g.h, static_cast<double>(g.mtot) * g.h, st.beta,
                        BoundaryKind::truncation_tail);
    out.dist.validate();
    out.BK = corollary2_blocking(st, g);
    out.iterations = it;
    out.residual = residual;
    out.converged = true;
    out.residual_history = std::move(history);
    return out;
}

std::vector<MixedDistribution> iterate_transient(const QueueConfig& config,
                                                 std::size_t n_steps,
                                                 std::size_t grid_size) {
    config.validate();
    if (n_steps < 1) throw SpecError("iterate_transient needs n_steps >= 1");
    if (grid_size < 16) throw SpecError("iterate_transient needs grid_size >= 16");
    KernelParams params = KernelParams::make(config);
    const ConvDist& conv = *params.conv;

    if (config.discipline == Discipline::balking) {
        BalkGrid g;
        g.iK = grid_size;
        g.h = config.K / static_cast<double>(grid_size);
        g.T = config.T;
        g.K = config.K;
        g.conv = &conv;
        g.build(g.iK + static_cast<std::size_t>(std::ceil(10.0 * conv.mean() / g.h)));
        BalkState st;
        st.mass.assign(g.mtot, 0.0);
        std::vector<MixedDistribution> out;
        out.reserve(n_steps);
        for (std::size_t n = 0; n < n_steps; ++n) {
            balking_sweep(st, g);
            out.push_back(assemble(st.atom, st.mass, g.h, static_cast<double>(g.mtot) * g.h,
                                   st.beta, BoundaryKind::truncation_tail));
            out.back().validate();
        }
        return out;
    }

    // reneging: each step convolves against the whole history, because a loss
    // run of length k anchors the new wait k laws back
    if (n_steps > 10000)
        throw SpecError("iterate_transient reneging history guard: n_steps <= 10^4");
    const std::size_t m = grid_size;
    const double K = config.K;
    const double T = config.T;
    const double h = K / static_cast<double>(m);

    // loss-run depth worth keeping: a run of k losses needs sigma + v >= kT
    std::size_t k_cut = 1;
    while (k_cut < 100000 && 1.0 - conv.cdf(static_cast<double>(k_cut) * T) >= 1e-14)
        ++k_cut;
    k_cut = std::min(k_cut, n_steps);

    // Toeplitz kernel rows per loss depth: tk[k][i - j + m - 1] =
    // G((i-j)h - h/2 + (k+1)T); gk[k][j] = G(K - mid_j + kT)
    std::vector<std::vector<double>> tk(k_cut + 1), gk(k_cut + 1);
    std::vector<double> gK(k_cut + 1);
    std::vector<std::vector<double>> gn(k_cut + 1);  // gn[k][i] = G(x_i + (k+1)T)
    for (std::size_t k = 0; k <= k_cut; ++k) {
        tk[k].resize(2 * m);
        for (std::size_t s = 0; s < 2 * m; ++s) {
            double d = static_cast<double>(s) - static_cast<double>(m - 1);
            tk[k][s] = conv.cdf(d * h - 0.5 * h + static_cast<double>(k + 1) * T);
        }
        gn[k].resize(m + 1);
        for (std::size_t i = 0; i <= m; ++i)
            gn[k][i] =
                conv.cdf(static_cast<double>(i) * h + static_cast<double>(k + 1) * T);
        gk[k].resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            double mid = (static_cast<double>(j) + 0.5) * h;
            gk[k][j] = conv.cdf(K - mid + static_cast<double>(k) * T);
        }
        gK[k] = conv.cdf(K + static_cast<double>(k) * T);
    }

    struct Law {
        double atom;
        std::vector<double> mass;
        double atomK;
    };
    std::vector<Law> hist;
    hist.push_back(Law{1.0, std::vector<double>(m, 0.0), 0.0});  // empty start

    // first node with x_i + T > K; below it only the k = 0 term contributes
    std::size_t i_gate = 0;
    while (i_gate <= m && static_cast<double>(i_gate) * h + T <= K) ++i_gate;

    std::vector<MixedDistribution> out;
    out.reserve(n_steps);
    std::vector<double> U(m + 1);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const Law& cur = hist[n];
        for (std::size_t i = 0; i <= m; ++i) {
            double s = cur.atom * gn[0][i];
            const double* row = &tk[0][i + m - 1];
            for (std::size_t j = 0; j < m; ++j) s += cur.mass[j] * row[-static_cast<long>(j)];
            U[i] = s;
        }
        std::size_t k_hi = std::min(n, k_cut);
        for (std::size_t k = 1; k <= k_hi; ++k) {
            const Law& anc = hist[n - k];
            double c = anc.atom * gK[k];
            for (std::size_t j = 0; j < m; ++j) c += anc.mass[j] * gk[k][j];
            for (std::size_t i = i_gate; i <= m; ++i) {
                double t = anc.atom * gn[k][i];
                const double* row = &tk[k][i + m - 1];
                for (std::size_t j = 0; j < m; ++j)
                    t += anc.mass[j] * row[-static_cast<long>(j)];
                U[i] += std::max(0.0, t - c);
            }
        }
        Law next;
        next.atom = U[0];
        next.mass.resize(m);
        for (std::size_t j = 0; j < m; ++j) next.mass[j] = std::max(U[j + 1] - U[j], 0.0);
        next.atomK = std::max(1.0 - U[m], 0.0);
        out.push_back(assemble(next.atom, next.mass, h, K, next.atomK,
                               BoundaryKind::deadline_atom));
        out.back().validate();
        hist.push_back(std::move(next));
    }
    return out;
}

}  // namespace vacq
