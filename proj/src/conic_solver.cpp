// Primal barrier path-following method.
//
// minimize c^T x  s.t.  A x = b,  G_i x + h_i in K_i
//
// Equalities are eliminated through a null-space basis Z (x = x0 + Z y).
// Each centering step minimizes t c^T x + sum_i F_i(G_i x + h_i) with damped
// Newton steps; t grows geometrically until nu / t falls below the tolerance.
// A strictly feasible start is found by a phase-I problem that shifts every
// cone along an interior direction e_i by a scalar s and drives s below zero.
// Both phases carry a large-radius ball barrier around the start point, which
// keeps the centering problems bounded without measurably moving the optimum.

#include <algorithm>
#include <cmath>
#include <limits>

#include "mauav/conic.hpp"

namespace mauav::conic {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearBlock {
    ConeKind kind;
    std::vector<int> vars;
    Eigen::MatrixXd g;  // rows x vars.size()
    Eigen::VectorXd h;
};

struct PsdEntry {
    int row;
    int col;
    double coef;
};

struct PsdBlock {
    int order = 0;
    std::vector<int> vars;
    std::vector<std::vector<PsdEntry>> entries;  // per local variable, both triangles
    Eigen::MatrixXd constant;
};

struct Ball {
    Eigen::VectorXd center;
    double radius2 = kInf;
};

struct Problem {
    int n = 0;
    Eigen::VectorXd c;
    std::vector<LinearBlock> linear;
    std::vector<PsdBlock> psd;
    Ball ball;
    double nu = 0.0;
};

double cone_nu(ConeKind k, int dim) {
    switch (k) {
        case ConeKind::Nonnegative: return 1.0;
        case ConeKind::SecondOrder: return 2.0;
        case ConeKind::Exponential:
        case ConeKind::ShiftedExponential: return 3.0;
        case ConeKind::Psd: return static_cast<double>(dim);
    }
    return 0.0;
}

int psd_row_index(int r, int c) { return c * (c + 1) / 2 + r; }

// Interior direction used by phase I.
Eigen::VectorXd interior_direction(ConeKind k, int dim) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    switch (k) {
        case ConeKind::Nonnegative: e[0] = 1.0; break;
        case ConeKind::SecondOrder: e[0] = 1.0; break;
        case ConeKind::Exponential: e << -1.0, 1.0, 1.0; break;
        case ConeKind::ShiftedExponential: e << -1.0, 1.0, 0.0; break;
        case ConeKind::Psd: break;
    }
    return e;
}

LinearBlock lower_linear(const ConeConstraint& cc) {
    LinearBlock b;
    b.kind = cc.kind;
    std::vector<int> vars;
    for (const auto& r : cc.rows)
        for (const auto& t : r.terms) vars.push_back(t.var);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    b.vars = vars;
    const int rows = static_cast<int>(cc.rows.size());
    b.g = Eigen::MatrixXd::Zero(rows, static_cast<int>(vars.size()));
    b.h.resize(rows);
    for (int i = 0; i < rows; ++i) {
        b.h[i] = cc.rows[i].constant;
        for (const auto& t : cc.rows[i].terms) {
            const auto pos = std::lower_bound(vars.begin(), vars.end(), t.var) - vars.begin();
            b.g(i, pos) += t.coef;
        }
    }
    return b;
}

PsdBlock lower_psd(const ConeConstraint& cc) {
    PsdBlock b;
    b.order = cc.order;
    b.constant = Eigen::MatrixXd::Zero(b.order, b.order);
    std::vector<int> vars;
    for (const auto& r : cc.rows)
        for (const auto& t : r.terms) vars.push_back(t.var);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    b.vars = vars;
    b.entries.resize(vars.size());
    for (int col = 0; col < b.order; ++col)
        for (int row = 0; row <= col; ++row) {
            const Affine& a = cc.rows[psd_row_index(row, col)];
            b.constant(row, col) = a.constant;
            b.constant(col, row) = a.constant;
            for (const auto& t : a.terms) {
                const auto pos = std::lower_bound(vars.begin(), vars.end(), t.var) - vars.begin();
                b.entries[pos].push_back({row, col, t.coef});
                if (row != col) b.entries[pos].push_back({col, row, t.coef});
            }
        }
    return b;
}

Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<int>& vars) {
    Eigen::VectorXd out(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) out[i] = x[vars[i]];
    return out;
}

Eigen::MatrixXd psd_matrix(const PsdBlock& b, const Eigen::VectorXd& x) {
    Eigen::MatrixXd s = b.constant;
    for (std::size_t j = 0; j < b.vars.size(); ++j) {
        const double v = x[b.vars[j]];
        if (v == 0.0) continue;
        for (const auto& e : b.entries[j]) s(e.row, e.col) += v * e.coef;
    }
    return s;
}

// Barrier value of one linear block at s; +inf outside the interior.
double linear_barrier(ConeKind kind, const Eigen::VectorXd& s) {
    switch (kind) {
        case ConeKind::Nonnegative:
            return s[0] > 0.0 ? -std::log(s[0]) : kInf;
        case ConeKind::SecondOrder: {
            const double t = s[0];
            const double u = s.tail(s.size() - 1).norm();
            if (!(t > u)) return kInf;
            return -std::log((t - u) * (t + u));
        }
        case ConeKind::Exponential: {
            const double x = s[0], y = s[1], z = s[2];
            if (!(y > 0.0) || !(z > 0.0)) return kInf;
            const double psi = y * std::log(z / y) - x;
            if (!(psi > 0.0)) return kInf;
            return -std::log(psi) - std::log(y) - std::log(z);
        }
        case ConeKind::ShiftedExponential: {
            const double x = s[0], y = s[1], u = s[2];
            const double z = y + u;
            if (!(y > 0.0) || !(z > 0.0)) return kInf;
            const double psi = y * std::log1p(u / y) - x;
            if (!(psi > 0.0)) return kInf;
            return -std::log(psi) - std::log(y) - std::log(z);
        }
        case ConeKind::Psd: break;
    }
    return kInf;
}

void linear_derivatives(ConeKind kind, const Eigen::VectorXd& s, Eigen::VectorXd& g, Eigen::MatrixXd& h) {
    const auto dim = s.size();
    g.resize(dim);
    h.resize(dim, dim);
    switch (kind) {
        case ConeKind::Nonnegative:
            g[0] = -1.0 / s[0];
            h(0, 0) = 1.0 / (s[0] * s[0]);
            return;
        case ConeKind::SecondOrder: {
            const double t = s[0];
            const double u = s.tail(dim - 1).norm();
            const double d = (t - u) * (t + u);
            Eigen::VectorXd js = s;
            js[0] = -t;
            g = 2.0 * js / d;
            h = (4.0 / (d * d)) * js * js.transpose();
            h.diagonal().array() += 2.0 / d;
            h(0, 0) -= 4.0 / d;
            return;
        }
        case ConeKind::Exponential:
        case ConeKind::ShiftedExponential: {
            const bool shifted = kind == ConeKind::ShiftedExponential;
            const double x = s[0], y = s[1], z = shifted ? s[1] + s[2] : s[2];
            const double lzy = shifted ? std::log1p(s[2] / y) : std::log(z / y);
            const double psi = y * lzy - x;
            Eigen::Vector3d dpsi(-1.0, lzy - 1.0, y / z);
            Eigen::Matrix3d d2psi = Eigen::Matrix3d::Zero();
            d2psi(1, 1) = -1.0 / y;
            d2psi(1, 2) = d2psi(2, 1) = 1.0 / z;
            d2psi(2, 2) = -y / (z * z);
            g = -dpsi / psi;
            g[1] -= 1.0 / y;
            g[2] -= 1.0 / z;
            h = dpsi * dpsi.transpose() / (psi * psi) - d2psi / psi;
            h(1, 1) += 1.0 / (y * y);
            h(2, 2) += 1.0 / (z * z);
            if (shifted) {
                // z = y + u: fold the z derivatives into y.
                g[1] += g[2];
                h.row(1) += h.row(2);
                h.col(1) += h.col(2);
            }
            return;
        }
        case ConeKind::Psd: break;
    }
}

double barrier_value(const Problem& p, const Eigen::VectorXd& x) {
    double f = 0.0;
    for (const auto& b : p.linear) {
        const double v = linear_barrier(b.kind, b.g * gather(x, b.vars) + b.h);
        if (!std::isfinite(v)) return kInf;
        f += v;
    }
    for (const auto& b : p.psd) {
        Eigen::LLT<Eigen::MatrixXd> llt(psd_matrix(b, x));
        if (llt.info() != Eigen::Success) return kInf;
        const Eigen::MatrixXd& l = llt.matrixLLT();
        for (int i = 0; i < b.order; ++i) {
            if (!(l(i, i) > 0.0)) return kInf;
            f -= 2.0 * std::log(l(i, i));
        }
    }
    if (std::isfinite(p.ball.radius2)) {
        const double d = p.ball.radius2 - (x - p.ball.center).squaredNorm();
        if (!(d > 0.0)) return kInf;
        f -= std::log(d);
    }
    return f;
}

void barrier_derivatives(const Problem& p, const Eigen::VectorXd& x, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
    grad.setZero(p.n);
    hess.setZero(p.n, p.n);
    Eigen::VectorXd gs;
    Eigen::MatrixXd hs;
    for (const auto& b : p.linear) {
        linear_derivatives(b.kind, b.g * gather(x, b.vars) + b.h, gs, hs);
        const Eigen::VectorXd gl = b.g.transpose() * gs;
        const Eigen::MatrixXd hl = b.g.transpose() * hs * b.g;
        for (std::size_t i = 0; i < b.vars.size(); ++i) {
            grad[b.vars[i]] += gl[i];
            for (std::size_t j = 0; j < b.vars.size(); ++j) hess(b.vars[i], b.vars[j]) += hl(i, j);
        }
    }
    for (const auto& b : p.psd) {
        Eigen::LLT<Eigen::MatrixXd> llt(psd_matrix(b, x));
        const Eigen::MatrixXd u = llt.solve(Eigen::MatrixXd::Identity(b.order, b.order));
        const std::size_t nv = b.vars.size();
        for (std::size_t i = 0; i < nv; ++i) {
            double gi = 0.0;
            for (const auto& e : b.entries[i]) gi -= e.coef * u(e.col, e.row);
            grad[b.vars[i]] += gi;
            for (std::size_t j = i; j < nv; ++j) {
                double hij = 0.0;
                for (const auto& ei : b.entries[i])
                    for (const auto& ej : b.entries[j]) hij += ei.coef * ej.coef * u(ej.col, ei.row) * u(ei.col, ej.row);
                hess(b.vars[i], b.vars[j]) += hij;
                if (i != j) hess(b.vars[j], b.vars[i]) += hij;
            }
        }
    }
    if (std::isfinite(p.ball.radius2)) {
        const Eigen::VectorXd r = x - p.ball.center;
        const double d = p.ball.radius2 - r.squaredNorm();
        grad += 2.0 * r / d;
        hess += (4.0 / (d * d)) * r * r.transpose();
        hess.diagonal().array() += 2.0 / d;
    }
}

// Smallest shift sigma with s + sigma e in the interior (bisection for the
// exponential cone, closed form otherwise).
double required_shift(ConeKind kind, const Eigen::VectorXd& s) {
    switch (kind) {
        case ConeKind::Nonnegative: return -s[0];
        case ConeKind::SecondOrder: return s.tail(s.size() - 1).norm() - s[0];
        case ConeKind::Exponential:
        case ConeKind::ShiftedExponential: {
            const Eigen::VectorXd e = interior_direction(kind, 3);
            auto inside = [&](double sigma) { return std::isfinite(linear_barrier(kind, s + sigma * e)); };
            double hi = 1.0;
            while (!inside(hi)) hi *= 2.0;
            double lo = hi - 1.0;
            double step = 1.0;
            while (inside(lo)) {
                step *= 2.0;
                lo = hi - step;
                if (step > 1e12) return lo;
            }
            for (int i = 0; i < 80; ++i) {
                const double mid = 0.5 * (lo + hi);
                (inside(mid) ? hi : lo) = mid;
            }
            return hi;
        }
        case ConeKind::Psd: break;
    }
    return 0.0;
}

double max_required_shift(const Problem& p, const Eigen::VectorXd& x) {
    double req = -kInf;
    for (const auto& b : p.linear) req = std::max(req, required_shift(b.kind, b.g * gather(x, b.vars) + b.h));
    for (const auto& b : p.psd) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(psd_matrix(b, x), Eigen::EigenvaluesOnly);
        req = std::max(req, -es.eigenvalues().minCoeff());
    }
    return req;
}

struct Basis {
    bool identity = true;
    Eigen::MatrixXd z;
};

enum class CenterResult { Converged, Stalled, StepLimit, Stopped };

constexpr int kCenteringSteps = 200;
constexpr double kCenteredDecrement = 1e-9;
constexpr double kQuadraticRegion = 0.0625;

template <class StopFn>
CenterResult center(const Problem& p, const Basis& basis, Eigen::VectorXd& x, double t, int& budget, StopFn stop) {
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    double fx = barrier_value(p, x);
    double last_lambda2 = kInf;
    for (int steps = 0; budget > 0; ++steps) {
        if (steps == kCenteringSteps) return CenterResult::Stalled;
        --budget;
        barrier_derivatives(p, x, grad, hess);
        const Eigen::VectorXd g = t * p.c + grad;
        Eigen::VectorXd gr;
        Eigen::MatrixXd hr;
        if (basis.identity) {
            gr = g;
            hr = hess;
        } else {
            gr = basis.z.transpose() * g;
            hr = basis.z.transpose() * hess * basis.z;
        }
        if (gr.size() == 0) return CenterResult::Converged;
        Eigen::VectorXd dy;
        double ridge = 0.0;
        const double scale = std::max(1e-300, hr.diagonal().cwiseAbs().maxCoeff());
        for (int attempt = 0; attempt < 8; ++attempt) {
            Eigen::MatrixXd hreg = hr;
            hreg.diagonal().array() += ridge;
            Eigen::LLT<Eigen::MatrixXd> llt(hreg);
            if (llt.info() == Eigen::Success) {
                dy = -llt.solve(gr);
                if (dy.allFinite()) break;
            }
            ridge = ridge == 0.0 ? 1e-14 * scale : ridge * 100.0;
            dy.resize(0);
        }
        if (dy.size() == 0) return CenterResult::Stalled;
        const double lambda2 = -gr.dot(dy);
        if (lambda2 < 0.0 || !std::isfinite(lambda2)) return CenterResult::Stalled;
        if (lambda2 * 0.5 <= kCenteredDecrement) return CenterResult::Converged;

        const Eigen::VectorXd dx = basis.identity ? dy : Eigen::VectorXd(basis.z * dy);
        const double slope = g.dot(dx);
        const double cdx = p.c.dot(dx);
        double alpha = 1.0;
        double fnew = kInf;
        // Inside the quadratic convergence region the full step is taken without the
        // descent test, whose function differences are lost in rounding near the centre.
        // Rounding caps how far the decrement can fall; once full steps stop halving it the
        // point is as centred as it gets.
        if (lambda2 < kQuadraticRegion && !(lambda2 < 0.5 * last_lambda2) && lambda2 * 0.5 <= 1e-6)
            return CenterResult::Converged;
        const bool contracting = lambda2 < 0.5 * last_lambda2;
        last_lambda2 = lambda2;
        if (lambda2 < kQuadraticRegion && contracting) {
            fnew = barrier_value(p, x + dx);
            if (std::isfinite(fnew)) {
                x += dx;
                fx = fnew;
                if (stop(x)) return CenterResult::Stopped;
                continue;
            }
        }
        while (alpha > 1e-14) {
            fnew = barrier_value(p, x + alpha * dx);
            if (std::isfinite(fnew) && t * alpha * cdx + (fnew - fx) <= 0.25 * alpha * slope) break;
            alpha *= 0.5;
        }
        if (alpha <= 1e-14) return lambda2 * 0.5 <= 1e-6 ? CenterResult::Converged : CenterResult::Stalled;
        x += alpha * dx;
        fx = fnew;
        if (stop(x)) return CenterResult::Stopped;
    }
    return CenterResult::StepLimit;
}

Problem lower(const ConicProgram& prog, double& objective_scale) {
    Problem p;
    p.n = prog.variable_count();
    p.c = Eigen::VectorXd::Zero(p.n);
    const double sign = prog.sense() == Sense::Maximize ? -1.0 : 1.0;
    for (const auto& t : prog.objective().terms) p.c[t.var] += sign * t.coef;
    objective_scale = p.c.size() ? p.c.cwiseAbs().maxCoeff() : 0.0;
    if (!(objective_scale > 0.0)) objective_scale = 1.0;
    p.c /= objective_scale;
    for (const auto& cc : prog.cones()) {
        p.nu += cone_nu(cc.kind, cc.order);
        if (cc.kind == ConeKind::Psd) p.psd.push_back(lower_psd(cc));
        else p.linear.push_back(lower_linear(cc));
    }
    return p;
}

double cone_margin(const Problem& p, const Eigen::VectorXd& x) {
    return -max_required_shift(p, x);
}

}  // namespace

Solution solve(const ConicProgram& prog, const SolverOptions& opts) {
    Solution sol;
    double scale = 1.0;
    Problem p = lower(prog, scale);
    const int n = p.n;
    int budget = opts.max_newton_steps;

    // Equality elimination.
    const int m = static_cast<int>(prog.equalities().size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        b[i] = -prog.equalities()[i].constant;
        for (const auto& t : prog.equalities()[i].terms) a(i, t.var) += t.coef;
    }
    Eigen::VectorXd hint = Eigen::VectorXd::Zero(n);
    for (const auto& [var, v] : prog.start_hint()) hint[var] = v;

    Basis basis;
    Eigen::VectorXd x0 = hint;
    if (m > 0) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
        x0 = hint + cod.solve(b - a * hint);
        const double res = (a * x0 - b).cwiseAbs().maxCoeff();
        if (res > 1e-9 * (1.0 + b.cwiseAbs().maxCoeff())) {
            sol.status = Status::Infeasible;
            sol.x = x0;
            sol.message = "linear equalities are inconsistent";
            return sol;
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
        const int rank = static_cast<int>(qr.rank());
        const Eigen::MatrixXd q = qr.householderQ();
        basis.identity = false;
        basis.z = q.rightCols(n - rank);
    }

    auto finish = [&](Status st, const Eigen::VectorXd& x, double t, const std::string& msg) {
        sol.status = st;
        sol.x = x;
        sol.objective = prog.objective().eval(x);
        sol.residuals.equality = m > 0 ? (a * x - b).cwiseAbs().maxCoeff() : 0.0;
        sol.residuals.cone_margin = cone_margin(p, x);
        sol.residuals.gap = t > 0.0 ? (p.nu + (std::isfinite(p.ball.radius2) ? 1.0 : 0.0)) / t * scale : kInf;
        sol.newton_steps = opts.max_newton_steps - budget;
        sol.message = msg;
        return sol;
    };

    const bool fixed_point = !basis.identity && basis.z.cols() == 0;
    if (fixed_point) {
        const double req = max_required_shift(p, x0);
        if (req <= 1e-9) return finish(Status::Optimal, x0, kInf, "feasible set is a single point");
        return finish(Status::Infeasible, x0, kInf, "unique equality solution violates a cone");
    }

    const double radius = 1e5 * (1.0 + x0.cwiseAbs().maxCoeff());
    p.ball.center = x0;
    p.ball.radius2 = radius * radius;

    // Phase I.
    Eigen::VectorXd x = x0;
    if (p.linear.empty() && p.psd.empty()) {
        // Only the ball remains; a nonzero reduced objective is unbounded.
    } else if (max_required_shift(p, x0) >= 0.0) {
        const double req = max_required_shift(p, x0);
        Problem q;
        q.n = n + 1;
        q.c = Eigen::VectorXd::Zero(q.n);
        q.c[n] = 1.0;
        q.nu = p.nu + 1.0;
        for (const auto& blk : p.linear) {
            LinearBlock nb = blk;
            nb.vars.push_back(n);
            nb.g.conservativeResize(Eigen::NoChange, nb.g.cols() + 1);
            nb.g.col(nb.g.cols() - 1) = interior_direction(blk.kind, static_cast<int>(blk.h.size()));
            q.linear.push_back(std::move(nb));
        }
        for (const auto& blk : p.psd) {
            PsdBlock nb = blk;
            nb.vars.push_back(n);
            std::vector<PsdEntry> diag;
            for (int i = 0; i < blk.order; ++i) diag.push_back({i, i, 1.0});
            nb.entries.push_back(std::move(diag));
            q.psd.push_back(std::move(nb));
        }
        const double floor = std::max(1.0, std::abs(req));
        LinearBlock lb;
        lb.kind = ConeKind::Nonnegative;
        lb.vars = {n};
        lb.g = Eigen::MatrixXd::Ones(1, 1);
        lb.h = Eigen::VectorXd::Constant(1, floor);
        q.linear.push_back(lb);
        q.ball.center = Eigen::VectorXd::Zero(q.n);
        q.ball.center.head(n) = x0;
        q.ball.center[n] = 0.0;
        const double s_extent = req + 1.0 + 0.1 * std::abs(req) + floor;
        q.ball.radius2 = p.ball.radius2 + s_extent * s_extent * 4.0;

        Basis qb;
        if (!basis.identity) {
            qb.identity = false;
            qb.z = Eigen::MatrixXd::Zero(q.n, basis.z.cols() + 1);
            qb.z.topLeftCorner(n, basis.z.cols()) = basis.z;
            qb.z(n, basis.z.cols()) = 1.0;
        }
        Eigen::VectorXd xs(q.n);
        xs.head(n) = x0;
        xs[n] = req + 1.0 + 0.1 * std::abs(req);
        double t = 1.0;
        bool found = false;
        while (budget > 0) {
            const auto res = center(q, qb, xs, t, budget, [&](const Eigen::VectorXd& v) { return v[n] < 0.0; });
            if (xs[n] < 0.0) {
                found = true;
                break;
            }
            const double gap = q.nu / t;
            if (res == CenterResult::Converged && gap < 1e-10 * floor) {
                if (xs[n] - gap > 1e-9 * floor)
                    return finish(Status::Infeasible, xs.head(n), kInf, "phase I: no strictly feasible point");
                return finish(Status::NumericalFailure, xs.head(n), kInf, "phase I: feasible set has empty interior");
            }
            if (res == CenterResult::Stalled && gap < 1e-6 * floor) {
                if (xs[n] > 1e-6 * floor)
                    return finish(Status::Infeasible, xs.head(n), kInf, "phase I stalled with positive shift");
                return finish(Status::NumericalFailure, xs.head(n), kInf, "phase I stalled");
            }
            t *= opts.barrier_growth;
        }
        if (!found) return finish(Status::NumericalFailure, xs.head(n), kInf, "phase I iteration limit");
        x = xs.head(n);
    }

    // Phase II.
    p.ball.center = x;
    p.ball.radius2 = std::max(p.ball.radius2, std::pow(1e5 * (1.0 + x.cwiseAbs().maxCoeff()), 2));
    const double nu = p.nu + 1.0;
    double t = 1.0;
    while (true) {
        const auto res = center(p, basis, x, t, budget, [](const Eigen::VectorXd&) { return false; });
        const double fval = p.c.dot(x);
        const double gap = nu / t;
        // Gap bound relative to the unscaled objective, floored at gap_floor objective units.
        const double target = opts.tolerance * std::max(opts.gap_floor / scale, std::abs(fval));
        // Early central points may wander far along directions the objective barely weighs;
        // only a final point near the ball is evidence of unboundedness.
        const bool at_ball = (x - p.ball.center).squaredNorm() > 0.81 * p.ball.radius2;
        const bool done = (res == CenterResult::Converged && gap <= target) ||
                          (res == CenterResult::Stalled && gap <= 1e3 * target);
        if (done && at_ball)
            return finish(Status::NumericalFailure, x, t, "iterate reached the bounding ball; problem looks unbounded");
        if (res == CenterResult::Converged && gap <= target) return finish(Status::Optimal, x, t, "");
        if (res == CenterResult::Stalled) {
            if (gap <= 1e3 * target) return finish(Status::Optimal, x, t, "stalled near the optimum");
            return finish(Status::NumericalFailure, x, t, "centering stalled");
        }
        if (res == CenterResult::StepLimit || budget <= 0)
            return finish(Status::NumericalFailure, x, t, "Newton step limit reached");
        t *= opts.barrier_growth;
    }
}

}  // namespace mauav::conic
