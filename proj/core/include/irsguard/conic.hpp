#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "irsguard/numeric.hpp"

namespace irsguard::conic {

// Sparse real row a with value a . x.
struct SparseRow {
  std::vector<int> index;
  std::vector<double> value;

  void add(int i, double v);
  double dot(const RealVector& x) const;
};

// One term x_var * C of an affine Hermitian map, with the coefficient stored
// in factored form C = sum_r alpha_r * pool[left_r] * pool[right_r]^H.
// The factors of a single term must add up to a Hermitian matrix.
struct FactoredTerm {
  int var = -1;
  std::vector<cd> alpha;
  std::vector<int> left;
  std::vector<int> right;
};

// F(x) = constant + sum_t x[var_t] * C_t must be PSD.
struct PsdConstraint {
  std::string label;
  ComplexMatrix constant;
  ComplexMatrix pool;  // dim x q, columns referenced by terms
  std::vector<FactoredTerm> terms;

  PsdConstraint() = default;
  PsdConstraint(std::string name, Eigen::Index dim);

  Eigen::Index dim() const { return constant.rows(); }

  // Adds a column to the vector pool and returns its index.
  int add_vector(const ComplexVector& u);
  // Adds a dense Hermitian coefficient via its eigendecomposition.
  void add_dense_term(int var, const ComplexMatrix& coeff);
  // Adds coeff * (u u^H) for pooled vector u.
  void add_outer_term(int var, int u, double coeff);

  ComplexMatrix evaluate(const RealVector& x) const;
  // Dense coefficient of term t (for testing and dumps).
  ComplexMatrix coefficient(std::size_t t) const;
};

// -weight * log(row . x + offset); requires the argument to stay positive.
struct LogTerm {
  double weight = 1.0;
  SparseRow row;
  double offset = 0.0;
};

// row . x <= rhs, or row . x == rhs for equalities.
struct LinearConstraint {
  SparseRow row;
  double rhs = 0.0;
  std::string label;
};

struct ConicProblem {
  int num_vars = 0;
  RealVector objective;  // linear part
  double objective_constant = 0.0;
  std::vector<LogTerm> log_terms;
  std::vector<PsdConstraint> psd;
  std::vector<LinearConstraint> inequalities;
  std::vector<LinearConstraint> equalities;

  explicit ConicProblem(int n = 0);
  int add_variables(int count);
  void add_lower_bound(int var, double lower, std::string label = {});
  void add_upper_bound(int var, double upper, std::string label = {});

  // Objective value; +inf when a log argument is nonpositive.
  double objective_value(const RealVector& x) const;
};

enum class SolveStatus { optimal, infeasible, max_iter, numerical };

const char* to_string(SolveStatus s);

struct SolverOptions {
  double gap_tolerance = 1e-7;   // bound on f(x) - f* at termination
  double feasibility_tolerance = 1e-7;
  double barrier_growth = 20.0;  // t <- growth * t between centering passes
  double initial_t = 1.0;  // divided by max(1, ||c||) of the reduced problem
  int max_newton_per_centering = 80;
  int max_total_newton = 2000;
  double centering_tolerance = 1e-9;  // Newton decrement^2 / 2
  // An initial point must have every block's minimum eigenvalue above this
  // value to bypass phase I.
  double interior_margin = 1e-10;
  bool verbose = false;  // one line per centering pass on stderr
};

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical;
  RealVector x;
  double objective = 0.0;
  double gap_bound = 0.0;
  double max_psd_violation = 0.0;
  double max_linear_residual = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
  std::string message;
  // Dual estimates: psd_duals[i] pairs with problem.psd[i], ineq_duals with
  // problem.inequalities.
  std::vector<ComplexMatrix> psd_duals;
  RealVector ineq_duals;
};

// Path-following barrier method. If warm_start is given and strictly
// feasible it is used as the starting point, otherwise a phase-I problem is
// solved first.
ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {},
                    const RealVector* warm_start = nullptr);

namespace detail {
// Phase-II barrier t f(x) + phi(x) of a problem without equalities, and its
// gradient and Hessian. Exposed for derivative checks.
double barrier_value(const ConicProblem& problem, const RealVector& x, double t);
bool barrier_derivatives(const ConicProblem& problem, const RealVector& x, double t, RealVector& g, RealMatrix& h);
}  // namespace detail

// Real-variable layout of an n x n Hermitian matrix: n diagonal entries
// followed by (Re, Im) pairs of the strictly-upper entries in row order.
// With a fixed unit diagonal only the off-diagonal pairs are variables and
// the identity is an implicit constant part.
class HermitianLayout {
 public:
  HermitianLayout() = default;
  HermitianLayout(Eigen::Index n, int offset, bool unit_diagonal = false);

  Eigen::Index n() const { return n_; }
  int offset() const { return offset_; }
  bool unit_diagonal() const { return unit_diagonal_; }
  int size() const { return static_cast<int>(unit_diagonal_ ? n_ * (n_ - 1) : n_ * n_); }

  struct Basis {
    int var;
    int row;
    int col;
    enum Kind { diagonal, real_part, imag_part } kind;
  };
  const std::vector<Basis>& basis() const { return basis_; }

  // Writes A into x[offset, offset + n^2).
  void embed(const ComplexMatrix& a, RealVector& x) const;
  Hermitian extract(const RealVector& x) const;
  // Dense basis matrix E_b, so that A = sum_b x_b E_b.
  ComplexMatrix basis_matrix(const Basis& b) const;
  // Coefficients c_b with Re Tr(C A) = sum_b c_b x_b for Hermitian C.
  void linear_functional(const ComplexMatrix& c, double scale, RealVector& objective) const;
  void linear_functional(const ComplexMatrix& c, double scale, SparseRow& row) const;

  // Adds the congruence scale * T A T^H to a PSD constraint, with T given by
  // pooled column indices (one per matrix column). Only the variable part is
  // added; a fixed unit diagonal must be folded into the constant by the caller.
  void add_congruence(PsdConstraint& f, const std::vector<int>& t_cols, double scale) const;

 private:
  Eigen::Index n_ = 0;
  int offset_ = 0;
  bool unit_diagonal_ = false;
  std::vector<Basis> basis_;
};

HermitianLayout embed_hermitian(Eigen::Index n, int offset = 0);
HermitianLayout unit_diagonal_layout(Eigen::Index n, int offset = 0);

// Plain-text dump of a problem (format documented in README).
void dump(const ConicProblem& problem, std::ostream& os);

}  // namespace irsguard::conic
