#include "smfkit/lp.hpp"

#include <cmath>
#include <limits>

#include "smfkit/linalg.hpp"

namespace smfkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SimplexSolver::SimplexSolver(const Matrix& eq_a, const Vec& eq_b, const Vec& lower,
                             const Vec& upper, LpSettings settings)
    : n_rows_(eq_a.rows()),
      n_struct_(eq_a.cols()),
      n_total_(eq_a.cols() + eq_a.rows()),
      settings_(settings) {
    if (eq_b.size() != n_rows_ || lower.size() != n_struct_ || upper.size() != n_struct_) {
        throw std::invalid_argument("SimplexSolver: dimensions mismatch");
    }
    for (std::size_t j = 0; j < n_struct_; ++j) {
        if (lower[j] > upper[j]) {
            throw std::invalid_argument("SimplexSolver: lower bound exceeds upper bound");
        }
    }

    lower_ = lower;
    upper_ = upper;
    // artificial variables live in [0, +inf) during phase 1
    for (std::size_t i = 0; i < n_rows_; ++i) {
        lower_.push_back(0.0);
        upper_.push_back(kInf);
    }

    state_.assign(n_total_, VarState::free_at_zero);
    for (std::size_t j = 0; j < n_struct_; ++j) {
        if (std::isfinite(lower_[j])) {
            state_[j] = VarState::at_lower;
        } else if (std::isfinite(upper_[j])) {
            state_[j] = VarState::at_upper;
        }
    }

    // residuals at the initial nonbasic point decide the artificial signs so
    // that the all-artificial basis starts feasible
    tab_ = Matrix(n_rows_, n_total_);
    rhs_ = Vec(n_rows_, 0.0);
    basis_.resize(n_rows_);
    xb_.assign(n_rows_, 0.0);
    for (std::size_t i = 0; i < n_rows_; ++i) {
        double r = eq_b[i];
        for (std::size_t j = 0; j < n_struct_; ++j) r -= eq_a(i, j) * value_of(j);
        const double sign = r >= 0.0 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < n_struct_; ++j) tab_(i, j) = sign * eq_a(i, j);
        tab_(i, n_struct_ + i) = 1.0;
        rhs_[i] = sign * eq_b[i];
        basis_[i] = n_struct_ + i;
        state_[n_struct_ + i] = VarState::basic;
    }
    compute_basic_values();
}

double SimplexSolver::value_of(std::size_t j) const {
    switch (state_[j]) {
        case VarState::at_lower:
            return lower_[j];
        case VarState::at_upper:
            return upper_[j];
        case VarState::free_at_zero:
            return 0.0;
        case VarState::basic:
            for (std::size_t i = 0; i < n_rows_; ++i) {
                if (basis_[i] == j) return xb_[i];
            }
            throw std::logic_error("SimplexSolver: basic variable missing from basis");
    }
    return 0.0;
}

void SimplexSolver::compute_basic_values() {
    for (std::size_t i = 0; i < n_rows_; ++i) xb_[i] = rhs_[i];
    for (std::size_t j = 0; j < n_total_; ++j) {
        if (state_[j] == VarState::basic) continue;
        double v = 0.0;
        if (state_[j] == VarState::at_lower) v = lower_[j];
        if (state_[j] == VarState::at_upper) v = upper_[j];
        if (v == 0.0) continue;
        for (std::size_t i = 0; i < n_rows_; ++i) xb_[i] -= tab_(i, j) * v;
    }
}

void SimplexSolver::pivot(std::size_t row, std::size_t col) {
    const double piv = tab_(row, col);
    const double inv = 1.0 / piv;
    for (std::size_t j = 0; j < n_total_; ++j) tab_(row, j) *= inv;
    rhs_[row] *= inv;
    tab_(row, col) = 1.0;  // clean up roundoff
    for (std::size_t i = 0; i < n_rows_; ++i) {
        if (i == row) continue;
        const double f = tab_(i, col);
        if (f == 0.0) continue;
        for (std::size_t j = 0; j < n_total_; ++j) tab_(i, j) -= f * tab_(row, j);
        rhs_[i] -= f * rhs_[row];
        tab_(i, col) = 0.0;
    }
}

bool SimplexSolver::run_simplex(const Vec& cost, bool phase_one) {
    unbounded_hit_ = false;
    const std::size_t bland_switch = 20 * (n_rows_ + n_total_) + 200;
    for (std::size_t iter = 0;; ++iter) {
        if (iter >= settings_.pivot_cap) {
            throw numerical_error("SimplexSolver: pivot cap exceeded");
        }
        const bool bland = iter >= bland_switch;

        // reduced costs r_j = c_j - c_B . tab_j
        Vec cb(n_rows_);
        for (std::size_t i = 0; i < n_rows_; ++i) cb[i] = cost[basis_[i]];

        std::size_t enter = n_total_;
        int enter_dir = 0;
        double best_score = settings_.feasibility_tol;
        for (std::size_t j = 0; j < n_total_; ++j) {
            if (state_[j] == VarState::basic) continue;
            if (j >= n_struct_ && !phase_one) continue;  // artificials stay parked
            double rj = cost[j];
            for (std::size_t i = 0; i < n_rows_; ++i) {
                if (cb[i] != 0.0) rj -= cb[i] * tab_(i, j);
            }
            int dir = 0;
            if (state_[j] == VarState::at_lower && rj < -settings_.feasibility_tol) dir = +1;
            if (state_[j] == VarState::at_upper && rj > settings_.feasibility_tol) dir = -1;
            if (state_[j] == VarState::free_at_zero &&
                std::fabs(rj) > settings_.feasibility_tol) {
                dir = rj < 0.0 ? +1 : -1;
            }
            if (dir == 0) continue;
            if (bland) {
                enter = j;
                enter_dir = dir;
                break;
            }
            if (std::fabs(rj) > best_score) {
                best_score = std::fabs(rj);
                enter = j;
                enter_dir = dir;
            }
        }
        if (enter == n_total_) return true;  // optimal for this phase

        // ratio test: how far can the entering variable move
        double t_max = kInf;
        std::size_t leave_row = n_rows_;
        bool leave_at_upper = false;
        for (std::size_t i = 0; i < n_rows_; ++i) {
            const double alpha = tab_(i, enter);
            if (std::fabs(alpha) <= settings_.pivot_tol) continue;
            const double delta = -static_cast<double>(enter_dir) * alpha;
            double t_cand = kInf;
            bool hits_upper = false;
            if (delta > 0.0 && std::isfinite(upper_[basis_[i]])) {
                t_cand = (upper_[basis_[i]] - xb_[i]) / delta;
                hits_upper = true;
            } else if (delta < 0.0 && std::isfinite(lower_[basis_[i]])) {
                t_cand = (xb_[i] - lower_[basis_[i]]) / (-delta);
            }
            if (t_cand == kInf) continue;
            if (t_cand < 0.0) t_cand = 0.0;
            if (t_cand < t_max - 1e-12 ||
                (t_cand < t_max + 1e-12 &&
                 (leave_row == n_rows_ || basis_[i] < basis_[leave_row]))) {
                t_max = t_cand;
                leave_row = i;
                leave_at_upper = hits_upper;
            }
        }
        double t_flip = kInf;
        if (state_[enter] != VarState::free_at_zero && std::isfinite(lower_[enter]) &&
            std::isfinite(upper_[enter])) {
            t_flip = upper_[enter] - lower_[enter];
        }

        if (t_max == kInf && t_flip == kInf) {
            if (phase_one) {
                throw numerical_error("SimplexSolver: unbounded phase-1 subproblem");
            }
            unbounded_hit_ = true;
            return false;
        }

        if (t_flip <= t_max) {
            // the entering variable runs to its opposite bound; no basis change
            state_[enter] =
                state_[enter] == VarState::at_lower ? VarState::at_upper : VarState::at_lower;
            compute_basic_values();
            continue;
        }

        const double enter_value =
            value_of(enter) + static_cast<double>(enter_dir) * t_max;
        const std::size_t leaving = basis_[leave_row];
        state_[leaving] = leave_at_upper ? VarState::at_upper : VarState::at_lower;
        pivot(leave_row, enter);
        basis_[leave_row] = enter;
        state_[enter] = VarState::basic;
        compute_basic_values();
        // pin the new basic value against drift
        xb_[leave_row] = enter_value;
    }
}

bool SimplexSolver::prepare() {
    if (prepared_) return feasible_;
    prepared_ = true;

    Vec cost(n_total_, 0.0);
    for (std::size_t j = n_struct_; j < n_total_; ++j) cost[j] = 1.0;
    run_simplex(cost, /*phase_one=*/true);

    double infeas = 0.0;
    for (std::size_t i = 0; i < n_rows_; ++i) {
        if (basis_[i] >= n_struct_) infeas += std::fabs(xb_[i]);
    }
    if (infeas > settings_.feasibility_tol * (1.0 + norm_inf(rhs_))) {
        feasible_ = false;
        return false;
    }

    // park the artificials at zero and try to drive basic ones out
    for (std::size_t j = n_struct_; j < n_total_; ++j) upper_[j] = 0.0;
    for (std::size_t i = 0; i < n_rows_; ++i) {
        if (basis_[i] < n_struct_) continue;
        std::size_t target = n_total_;
        for (std::size_t j = 0; j < n_struct_; ++j) {
            if (state_[j] != VarState::basic && std::fabs(tab_(i, j)) > settings_.pivot_tol) {
                target = j;
                break;
            }
        }
        if (target == n_total_) continue;  // redundant row; artificial stays at 0
        const std::size_t leaving = basis_[i];
        state_[leaving] = VarState::at_lower;
        const double entering_value = value_of(target);
        pivot(i, target);
        basis_[i] = target;
        state_[target] = VarState::basic;
        compute_basic_values();
        xb_[i] = entering_value;
    }
    feasible_ = true;
    return true;
}

LpOutcome SimplexSolver::optimize(const Vec& objective) {
    if (objective.size() != n_struct_) {
        throw std::invalid_argument("SimplexSolver::optimize: objective size mismatch");
    }
    if (!prepare()) {
        return {LpStatus::infeasible, 0.0, {}};
    }
    Vec cost = objective;
    cost.resize(n_total_, 0.0);
    if (!run_simplex(cost, /*phase_one=*/false)) {
        return {LpStatus::unbounded, -kInf, {}};
    }
    LpOutcome out;
    out.status = LpStatus::optimal;
    out.witness.resize(n_struct_);
    out.optimum = 0.0;
    for (std::size_t j = 0; j < n_struct_; ++j) {
        out.witness[j] = value_of(j);
        out.optimum += objective[j] * out.witness[j];
    }
    return out;
}

LpOutcome solve(const LpProblem& problem, LpSettings settings) {
    SimplexSolver solver(problem.eq_a, problem.eq_b, problem.lower, problem.upper, settings);
    return solver.optimize(problem.objective);
}

bool feasible(const Matrix& eq_a, const Vec& eq_b, const Vec& lower, const Vec& upper,
              LpSettings settings) {
    SimplexSolver solver(eq_a, eq_b, lower, upper, settings);
    return solver.prepare();
}

}  // namespace smfkit
