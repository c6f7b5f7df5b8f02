#include "wellsep/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wellsep/errors.hpp"

namespace wellsep {

std::string to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-12;

// Tableau rows 0..m-1 are constraints, column `cols` is the rhs.
struct Tableau {
    std::size_t rows, cols;
    Matrix t;
    std::vector<std::size_t> basis;

    void pivot(std::size_t r, std::size_t c) {
        const double p = t[r][c];
        for (auto& v : t[r]) v /= p;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i == r) continue;
            const double f = t[i][c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
            t[i][c] = 0.0;
        }
        basis[r] = c;
    }
};

// Minimises the objective row (index rows) over columns < usable.
// Returns false if unbounded.
bool run_simplex(Tableau& tab, std::size_t obj_row, std::size_t usable, std::size_t& pivots) {
    for (;;) {
        std::size_t enter = usable;
        for (std::size_t j = 0; j < usable; ++j)
            if (tab.t[obj_row][j] < -kPivotTol) {
                enter = j;  // Bland: lowest index
                break;
            }
        if (enter == usable) return true;
        std::size_t leave = tab.rows;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tab.rows; ++i) {
            const double a = tab.t[i][enter];
            if (a <= kPivotTol) continue;
            const double ratio = tab.t[i][tab.cols] / a;
            if (ratio < best - 1e-15 ||
                (std::abs(ratio - best) <= 1e-15 && leave < tab.rows && tab.basis[i] < tab.basis[leave])) {
                best = ratio;
                leave = i;
            }
        }
        if (leave == tab.rows) return false;
        tab.pivot(leave, enter);
        ++pivots;
    }
}

}  // namespace

LpSolution solve_equality_lp(const Matrix& a, const std::vector<double>& b,
                             const std::vector<double>& c) {
    const std::size_t m = a.size();
    const std::size_t n = c.size();
    if (b.size() != m) throw ArgumentError("rhs length does not match constraint rows");
    for (const auto& row : a)
        if (row.size() != n) throw ArgumentError("constraint row length does not match objective");

    // Columns: n structural, m artificial, then rhs.
    Tableau tab{m, n + m, Matrix(m + 2, std::vector<double>(n + m + 1, 0.0)),
                std::vector<std::size_t>(m)};
    for (std::size_t i = 0; i < m; ++i) {
        const double s = b[i] < 0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) tab.t[i][j] = s * a[i][j];
        tab.t[i][n + i] = 1.0;
        tab.t[i][n + m] = s * b[i];
        tab.basis[i] = n + i;
    }
    const std::size_t phase1 = m, phase2 = m + 1;
    // Phase one objective: sum of artificials, expressed in nonbasic terms.
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= n + m; ++j)
            if (j < n || j == n + m) tab.t[phase1][j] -= tab.t[i][j];
    for (std::size_t j = 0; j < n; ++j) tab.t[phase2][j] = c[j];

    LpSolution sol;
    run_simplex(tab, phase1, n + m, sol.pivots);
    if (-tab.t[phase1][n + m] > 1e-9) {
        sol.status = LpStatus::infeasible;
        return sol;
    }
    // Drive remaining artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis[i] < n) continue;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(tab.t[i][j]) > 1e-9) {
                tab.pivot(i, j);
                ++sol.pivots;
                break;
            }
    }
    // Any artificial still basic sits on a redundant row at value zero; forbid
    // artificials from re-entering by restricting the usable columns.
    if (!run_simplex(tab, phase2, n, sol.pivots)) {
        sol.status = LpStatus::unbounded;
        return sol;
    }
    sol.status = LpStatus::optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (tab.basis[i] < n) sol.x[tab.basis[i]] = tab.t[i][n + m];
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += c[j] * sol.x[j];
    return sol;
}

AssignmentLp make_assignment_lp(std::size_t k, double gamma2) {
    if (k < 2) throw ArgumentError("k must be at least 2");
    if (!(gamma2 >= 0.0)) throw ArgumentError("gamma2 must be non-negative");
    AssignmentLp lp;
    lp.k = k;
    lp.gamma2 = gamma2;
    const std::size_t cols = k + 2;
    lp.a.assign(2, std::vector<double>(cols, 0.0));
    for (std::size_t j = 0; j <= k; ++j) {
        lp.a[0][j] = 1.0;
        lp.a[1][j] = static_cast<double>(j);
    }
    lp.a[1][k + 1] = -1.0;
    const double kd = static_cast<double>(k);
    lp.b = {1.0, kd * (2.0 * kd - 3.0) / (2.0 * kd - 2.0) + gamma2};
    lp.c.assign(cols, 0.0);
    lp.c[k - 1] = 1.0 / kd;
    lp.c[k] = 1.0;
    return lp;
}

DualPointCheck check_dual_point(const AssignmentLp& lp, const std::vector<double>& u,
                                double tolerance) {
    if (u.size() != 2) throw ArgumentError("dual point must have two entries");
    DualPointCheck chk;
    chk.u = u;
    const std::size_t cols = lp.c.size();
    chk.residuals.resize(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        chk.residuals[j] = lp.a[0][j] * u[0] + lp.a[1][j] * u[1] - lp.c[j];
        chk.max_violation = std::max(chk.max_violation, chk.residuals[j]);
    }
    chk.feasible = chk.max_violation <= tolerance;
    chk.value = lp.b[0] * u[0] + lp.b[1] * u[1];
    return chk;
}

AssignmentLpResult solve_assignment_lp(std::size_t k, double gamma2) {
    AssignmentLpResult res;
    res.lp = make_assignment_lp(k, gamma2);
    const double kd = static_cast<double>(k);
    res.closed_form = 0.5 + gamma2 * (kd - 1.0) / kd;
    res.claimed_bound = 0.5 + gamma2;
    res.stated_dual = check_dual_point(res.lp, {2.0 - kd, (kd - 1.0) / kd});

    const auto primal = solve_equality_lp(res.lp.a, res.lp.b, res.lp.c);
    if (primal.status != LpStatus::optimal) {
        res.feasible = false;
        res.infeasibility = "rhs " + std::to_string(res.lp.b[1]) +
                            " exceeds k = " + std::to_string(k) +
                            "; sum of j a_j cannot reach it";
        return res;
    }
    res.feasible = true;
    res.primal = primal.x;
    res.primal_objective = primal.objective;

    // Dual: max b^T u s.t. A^T u <= c, u free. Written as
    // min -b^T (p - q) with A^T p - A^T q + s = c and p, q, s >= 0.
    const std::size_t cols = res.lp.c.size();
    Matrix da(cols, std::vector<double>(4 + cols, 0.0));
    for (std::size_t j = 0; j < cols; ++j) {
        da[j][0] = res.lp.a[0][j];
        da[j][1] = res.lp.a[1][j];
        da[j][2] = -res.lp.a[0][j];
        da[j][3] = -res.lp.a[1][j];
        da[j][4 + j] = 1.0;
    }
    std::vector<double> dc(4 + cols, 0.0);
    dc[0] = -res.lp.b[0];
    dc[1] = -res.lp.b[1];
    dc[2] = res.lp.b[0];
    dc[3] = res.lp.b[1];
    const auto dual = solve_equality_lp(da, res.lp.c, dc);
    if (dual.status == LpStatus::optimal) {
        res.dual = {dual.x[0] - dual.x[2], dual.x[1] - dual.x[3]};
        res.dual_objective = -dual.objective;
    } else {
        res.dual_objective = std::numeric_limits<double>::quiet_NaN();
    }
    res.duality_gap = std::abs(res.primal_objective - res.dual_objective);
    return res;
}

}  // namespace wellsep
