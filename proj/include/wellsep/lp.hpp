#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace wellsep {

using Matrix = std::vector<std::vector<double>>;

enum class LpStatus { optimal, infeasible, unbounded };

std::string to_string(LpStatus s);

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

/// min c^T x subject to A x = b, x >= 0. Dense two-phase simplex with Bland's
/// rule, meant for instances with a handful of rows.
LpSolution solve_equality_lp(const Matrix& a, const std::vector<double>& b,
                             const std::vector<double>& c);

/// The exceptional-vertex LP over variables (a_0, ..., a_k, z):
///   min a_{k-1}/k + a_k
///   s.t. sum_j a_j = 1,  sum_j j a_j - z = k(2k-3)/(2k-2) + gamma2,  a, z >= 0.
struct AssignmentLp {
    std::size_t k = 0;
    double gamma2 = 0.0;
    Matrix a;               // 2 x (k+2)
    std::vector<double> b;  // 2
    std::vector<double> c;  // k+2
};

AssignmentLp make_assignment_lp(std::size_t k, double gamma2);

struct DualPointCheck {
    std::vector<double> u;          // (2-k, (k-1)/k)
    std::vector<double> residuals;  // (A^T u - c)_j; feasible iff all <= 0
    double max_violation = 0.0;     // max(0, max_j residual_j)
    bool feasible = false;
    double value = 0.0;             // b^T u
};

DualPointCheck check_dual_point(const AssignmentLp& lp, const std::vector<double>& u,
                                double tolerance = 1e-12);

struct AssignmentLpResult {
    AssignmentLp lp;
    bool feasible = false;
    std::string infeasibility;     // set when the rhs exceeds k
    std::vector<double> primal;    // a_0..a_k, z
    double primal_objective = 0.0;
    std::vector<double> dual;      // optimal (u1, u2) of max b^T u, A^T u <= c
    double dual_objective = 0.0;
    double duality_gap = 0.0;      // |primal - dual|
    DualPointCheck stated_dual;    // the closed-form dual point
    double closed_form = 0.0;      // 1/2 + gamma2 (k-1)/k
    double claimed_bound = 0.0;    // 1/2 + gamma2, the weaker stated value
};

/// Solves the primal and the dual as separate LPs and evaluates the
/// closed-form dual point. Throws ArgumentError when k < 2 or gamma2 < 0.
AssignmentLpResult solve_assignment_lp(std::size_t k, double gamma2);

}  // namespace wellsep
