#ifndef SMFKIT_LP_HPP
#define SMFKIT_LP_HPP

#include <cstdint>
#include <vector>

#include "smfkit/matrix.hpp"

namespace smfkit {

// minimize objective . x  subject to  eq_a x = eq_b,  lower <= x <= upper.
// Bound entries may be -inf / +inf; they are handled natively by the solver.
struct LpProblem {
    Vec objective;
    Matrix eq_a;
    Vec eq_b;
    Vec lower;
    Vec upper;
};

enum class LpStatus : std::uint8_t { optimal, infeasible, unbounded };

struct LpOutcome {
    LpStatus status = LpStatus::infeasible;
    double optimum = 0.0;
    Vec witness;  // structural variable values at the optimum
};

struct LpSettings {
    double feasibility_tol = 1e-9;
    double pivot_tol = 1e-11;
    std::size_t pivot_cap = 1'000'000;
};

// Bounded-variable primal simplex over a dense tableau.  Phase 1 uses
// artificial variables (no big-M); after prepare() succeeds, optimize() can be
// called repeatedly with different objectives, warm-starting from the current
// basis.  This makes interval hulls (2n objectives over one feasible region)
// cheap.
class SimplexSolver {
  public:
    SimplexSolver(const Matrix& eq_a, const Vec& eq_b, const Vec& lower, const Vec& upper,
                  LpSettings settings = {});

    // phase 1; returns true when the constraint system is feasible
    bool prepare();
    // phase 2 from the current basis; prepare() must have succeeded
    LpOutcome optimize(const Vec& objective);

  private:
    enum class VarState : std::uint8_t { basic, at_lower, at_upper, free_at_zero };

    double value_of(std::size_t j) const;
    void compute_basic_values();
    bool run_simplex(const Vec& cost, bool phase_one);
    void pivot(std::size_t row, std::size_t col);

    std::size_t n_rows_;
    std::size_t n_struct_;
    std::size_t n_total_;  // structural + artificial
    Matrix tab_;           // current B^-1 A, n_rows x n_total
    Vec rhs_;              // original right-hand side
    Vec lower_, upper_;
    Vec xb_;               // values of basic variables by row
    std::vector<std::size_t> basis_;
    std::vector<VarState> state_;
    LpSettings settings_;
    bool prepared_ = false;
    bool feasible_ = false;
    bool unbounded_hit_ = false;
};

LpOutcome solve(const LpProblem& problem, LpSettings settings = {});
bool feasible(const Matrix& eq_a, const Vec& eq_b, const Vec& lower, const Vec& upper,
              LpSettings settings = {});

}  // namespace smfkit

#endif
