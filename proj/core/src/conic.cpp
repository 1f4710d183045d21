#include "irsguard/conic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <iostream>
#include <sstream>

#include "irsguard/errors.hpp"

namespace irsguard::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void SparseRow::add(int i, double v) {
  if (v == 0.0) return;
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] == i) {
      value[k] += v;
      return;
    }
  }
  index.push_back(i);
  value.push_back(v);
}

double SparseRow::dot(const RealVector& x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * x(index[k]);
  return s;
}

PsdConstraint::PsdConstraint(std::string name, Eigen::Index dim)
    : label(std::move(name)), constant(ComplexMatrix::Zero(dim, dim)), pool(dim, 0) {}

int PsdConstraint::add_vector(const ComplexVector& u) {
  if (u.size() != dim()) throw ConfigError("PsdConstraint::add_vector: dimension mismatch");
  pool.conservativeResize(Eigen::NoChange, pool.cols() + 1);
  pool.col(pool.cols() - 1) = u;
  return static_cast<int>(pool.cols() - 1);
}

void PsdConstraint::add_dense_term(int var, const ComplexMatrix& coeff) {
  const auto ed = eig_hermitian(0.5 * (coeff + coeff.adjoint()));
  const double scale = ed.values.cwiseAbs().maxCoeff();
  FactoredTerm t;
  t.var = var;
  for (Eigen::Index i = 0; i < ed.values.size(); ++i) {
    if (std::abs(ed.values(i)) <= 1e-15 * scale) continue;
    const int u = add_vector(ed.vectors.col(i));
    t.alpha.emplace_back(ed.values(i), 0.0);
    t.left.push_back(u);
    t.right.push_back(u);
  }
  if (!t.alpha.empty()) terms.push_back(std::move(t));
}

void PsdConstraint::add_outer_term(int var, int u, double coeff) {
  FactoredTerm t;
  t.var = var;
  t.alpha.emplace_back(coeff, 0.0);
  t.left.push_back(u);
  t.right.push_back(u);
  terms.push_back(std::move(t));
}

ComplexMatrix PsdConstraint::coefficient(std::size_t t) const {
  const auto& term = terms[t];
  ComplexMatrix c = ComplexMatrix::Zero(dim(), dim());
  for (std::size_t r = 0; r < term.alpha.size(); ++r)
    c += term.alpha[r] * pool.col(term.left[r]) * pool.col(term.right[r]).adjoint();
  return c;
}

ComplexMatrix PsdConstraint::evaluate(const RealVector& x) const {
  // F = constant + P M P^H with M(left, right) = sum of x_var * alpha
  const Eigen::Index q = pool.cols();
  ComplexMatrix m = ComplexMatrix::Zero(q, q);
  bool any = false;
  for (const auto& term : terms) {
    const double xv = x(term.var);
    if (xv == 0.0) continue;
    any = true;
    for (std::size_t r = 0; r < term.alpha.size(); ++r) m(term.left[r], term.right[r]) += xv * term.alpha[r];
  }
  ComplexMatrix f = constant;
  if (any) f.noalias() += pool * m * pool.adjoint();
  return 0.5 * (f + f.adjoint());
}

ConicProblem::ConicProblem(int n) : num_vars(n), objective(RealVector::Zero(n)) {}

int ConicProblem::add_variables(int count) {
  const int first = num_vars;
  num_vars += count;
  objective.conservativeResize(num_vars);
  objective.tail(count).setZero();
  return first;
}

void ConicProblem::add_lower_bound(int var, double lower, std::string label) {
  LinearConstraint c;
  c.row.add(var, -1.0);
  c.rhs = -lower;
  c.label = std::move(label);
  inequalities.push_back(std::move(c));
}

void ConicProblem::add_upper_bound(int var, double upper, std::string label) {
  LinearConstraint c;
  c.row.add(var, 1.0);
  c.rhs = upper;
  c.label = std::move(label);
  inequalities.push_back(std::move(c));
}

double ConicProblem::objective_value(const RealVector& x) const {
  double f = objective_constant + objective.dot(x);
  for (const auto& lt : log_terms) {
    const double arg = lt.row.dot(x) + lt.offset;
    if (!(arg > 0.0)) return kInf;
    f -= lt.weight * std::log(arg);
  }
  return f;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::numerical: return "numerical";
  }
  return "unknown";
}

namespace {

// Barrier objective t * f0(x) + phi(x) over a problem without equalities.
// In phase-I mode the objective is the last variable and log terms become
// shifted positivity constraints. Phase I also keeps x inside a large ball so
// that centering stays bounded when the feasible set is not.
class Barrier {
 public:
  Barrier(const ConicProblem& p, bool phase_one, double ball_radius2 = 0.0)
      : p_(p), phase_one_(phase_one), ball2_(ball_radius2) {
    theta_ = static_cast<double>(p.inequalities.size());
    for (const auto& b : p.psd) theta_ += static_cast<double>(b.dim());
    if (phase_one_) theta_ += static_cast<double>(p.log_terms.size()) + 2.0;
    n_ = p.num_vars + (phase_one_ ? 1 : 0);
  }

  int n() const { return n_; }
  double theta() const { return theta_; }

  double shift(const RealVector& x) const { return phase_one_ ? x(n_ - 1) : 0.0; }

  double f0(const RealVector& x) const {
    if (phase_one_) return x(n_ - 1);
    return p_.objective_value(x.head(p_.num_vars));
  }

  // Returns +inf outside the domain.
  double value(const RealVector& x, double t) const {
    const RealVector xs = x.head(p_.num_vars);
    const double s = shift(x);
    double v = 0.0;
    if (phase_one_) {
      v = t * s;
      for (const auto& lt : p_.log_terms) {
        const double arg = lt.row.dot(xs) + lt.offset + s;
        if (!(arg > 0.0)) return kInf;
        v -= std::log(arg);
      }
      const double floor_slack = s + 1.0;
      if (!(floor_slack > 0.0)) return kInf;
      v -= std::log(floor_slack);
      const double ball = ball2_ - xs.squaredNorm();
      if (!(ball > 0.0)) return kInf;
      v -= std::log(ball);
    } else {
      const double f = p_.objective_value(xs);
      if (!std::isfinite(f)) return kInf;
      v = t * f;
    }
    for (const auto& c : p_.inequalities) {
      const double slack = c.rhs - c.row.dot(xs) + s;
      if (!(slack > 0.0)) return kInf;
      v -= std::log(slack);
    }
    for (const auto& b : p_.psd) {
      ComplexMatrix f = b.evaluate(xs);
      if (s != 0.0) f.diagonal().array() += s;
      Eigen::LLT<ComplexMatrix> llt(f);
      if (llt.info() != Eigen::Success) return kInf;
      const auto& l = llt.matrixLLT();
      double ld = 0.0;
      for (Eigen::Index i = 0; i < f.rows(); ++i) {
        const double d = l(i, i).real();
        if (!(d > 0.0)) return kInf;
        ld += std::log(d);
      }
      v -= 2.0 * ld;
    }
    return v;
  }

  // Gradient and Hessian; x must lie in the domain.
  bool derivatives(const RealVector& x, double t, RealVector& g, RealMatrix& h) const {
    const int nv = p_.num_vars;
    const RealVector xs = x.head(nv);
    const double s = shift(x);
    g.setZero(n_);
    h.setZero(n_, n_);
    const int sidx = n_ - 1;

    auto add_row = [&](const SparseRow& row, double gcoef, double hcoef, bool with_shift,
                       double shift_sign) {
      // gradient of scalar phi(a.x + shift_sign*s): gcoef * a, Hessian hcoef * a a^T
      for (std::size_t i = 0; i < row.index.size(); ++i) {
        g(row.index[i]) += gcoef * row.value[i];
        for (std::size_t j = 0; j < row.index.size(); ++j)
          h(row.index[i], row.index[j]) += hcoef * row.value[i] * row.value[j];
        if (with_shift) {
          h(row.index[i], sidx) += hcoef * row.value[i] * shift_sign;
          h(sidx, row.index[i]) += hcoef * row.value[i] * shift_sign;
        }
      }
      if (with_shift) {
        g(sidx) += gcoef * shift_sign;
        h(sidx, sidx) += hcoef;
      }
    };

    if (phase_one_) {
      g(sidx) += t;
      for (const auto& lt : p_.log_terms) {
        const double arg = lt.row.dot(xs) + lt.offset + s;
        if (!(arg > 0.0)) return false;
        add_row(lt.row, -1.0 / arg, 1.0 / (arg * arg), true, 1.0);
      }
      const double fs = s + 1.0;
      g(sidx) -= 1.0 / fs;
      h(sidx, sidx) += 1.0 / (fs * fs);
      const double ball = ball2_ - xs.squaredNorm();
      if (!(ball > 0.0)) return false;
      g.head(nv) += (2.0 / ball) * xs;
      h.topLeftCorner(nv, nv) += (4.0 / (ball * ball)) * xs * xs.transpose();
      h.topLeftCorner(nv, nv).diagonal().array() += 2.0 / ball;
    } else {
      g.head(nv) += t * p_.objective;
      for (const auto& lt : p_.log_terms) {
        const double arg = lt.row.dot(xs) + lt.offset;
        if (!(arg > 0.0)) return false;
        add_row(lt.row, -t * lt.weight / arg, t * lt.weight / (arg * arg), false, 0.0);
      }
    }
    for (const auto& c : p_.inequalities) {
      // -log(rhs - a.x + s)
      const double slack = c.rhs - c.row.dot(xs) + s;
      if (!(slack > 0.0)) return false;
      SparseRow neg = c.row;
      for (auto& v : neg.value) v = -v;
      add_row(neg, -1.0 / slack, 1.0 / (slack * slack), phase_one_, 1.0);
    }
    for (const auto& b : p_.psd) {
      if (!block_derivatives(b, xs, s, g, h)) return false;
    }
    return true;
  }

  // PSD block contributions: grad_i = -Re tr(F^-1 C_i), hess_ij = Re tr(F^-1 C_i F^-1 C_j).
  bool block_derivatives(const PsdConstraint& b, const RealVector& xs, double s, RealVector& g,
                         RealMatrix& h) const {
    ComplexMatrix f = b.evaluate(xs);
    if (s != 0.0) f.diagonal().array() += s;
    Eigen::LLT<ComplexMatrix> llt(f);
    if (llt.info() != Eigen::Success) return false;
    const auto lower = llt.matrixL();
    const ComplexMatrix y = lower.solve(b.pool);
    const ComplexMatrix gamma = y.adjoint() * y;

    const std::size_t nt = b.terms.size();
    for (std::size_t ti = 0; ti < nt; ++ti) {
      const auto& a = b.terms[ti];
      cd tr = 0.0;
      for (std::size_t r = 0; r < a.alpha.size(); ++r) tr += a.alpha[r] * gamma(a.right[r], a.left[r]);
      g(a.var) -= tr.real();
      for (std::size_t tj = ti; tj < nt; ++tj) {
        const auto& c = b.terms[tj];
        cd acc = 0.0;
        for (std::size_t r = 0; r < a.alpha.size(); ++r)
          for (std::size_t q = 0; q < c.alpha.size(); ++q)
            acc += a.alpha[r] * c.alpha[q] * gamma(a.right[r], c.left[q]) * gamma(c.right[q], a.left[r]);
        const double val = acc.real();
        h(a.var, c.var) += val;
        if (tj != ti) h(c.var, a.var) += val;
      }
    }
    if (phase_one_) {
      // the shift enters as s * I
      const int sidx = n_ - 1;
      const ComplexMatrix finv = llt.solve(ComplexMatrix::Identity(f.rows(), f.cols()));
      g(sidx) -= finv.trace().real();
      h(sidx, sidx) += finv.squaredNorm();
      // cross terms Re tr(F^-1 C_i F^-1) = Re sum alpha * (F^-1 u_r)^H (F^-1 u_l)
      const ComplexMatrix w = llt.matrixU().solve(y);
      const ComplexMatrix wg = w.adjoint() * w;
      for (const auto& a : b.terms) {
        cd acc = 0.0;
        for (std::size_t r = 0; r < a.alpha.size(); ++r) acc += a.alpha[r] * wg(a.right[r], a.left[r]);
        h(a.var, sidx) += acc.real();
        h(sidx, a.var) += acc.real();
      }
    }
    return true;
  }

 private:
  const ConicProblem& p_;
  bool phase_one_;
  double ball2_ = 0.0;
  double theta_ = 0.0;
  int n_ = 0;
};

struct NewtonResult {
  bool ok = true;
  int steps = 0;
};

// Symmetric solve with Jacobi scaling and regularization fallback.
bool newton_direction(const RealMatrix& h, const RealVector& g, RealVector& dx) {
  const Eigen::Index n = h.rows();
  RealVector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = h(i, i) > 0.0 ? 1.0 / std::sqrt(h(i, i)) : 1.0;
  RealMatrix hs = d.asDiagonal() * h * d.asDiagonal();
  const RealVector gs = d.cwiseProduct(g);
  double reg = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    RealMatrix a = hs;
    if (reg > 0.0) a.diagonal().array() += reg;
    Eigen::LLT<RealMatrix> llt(a);
    if (llt.info() == Eigen::Success) {
      const RealVector ys = llt.solve(-gs);
      if (ys.allFinite()) {
        dx = d.cwiseProduct(ys);
        return true;
      }
    }
    reg = reg == 0.0 ? 1e-12 : reg * 100.0;
  }
  return false;
}

enum class Centering { centered, budget, failed };

// Damped Newton at fixed t. Stops early when early_stop holds (reported as
// centered). Hitting the per-call step cap reports Centering::budget.
Centering center(const Barrier& bar, RealVector& x, double t, const SolverOptions& opt, int& budget, int& steps,
                 const std::function<bool(const RealVector&)>& early_stop) {
  RealVector g, dx;
  RealMatrix h;
  double fx = bar.value(x, t);
  if (!std::isfinite(fx)) return Centering::failed;
  for (int it = 0; it < opt.max_newton_per_centering; ++it) {
    if (budget-- <= 0) return Centering::budget;
    if (!bar.derivatives(x, t, g, h)) return Centering::failed;
    if (!newton_direction(h, g, dx)) return Centering::failed;
    const double slope = g.dot(dx);
    const double decrement = -slope;
    ++steps;
    if (decrement * 0.5 <= opt.centering_tolerance) return Centering::centered;
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const RealVector xn = x + alpha * dx;
      const double fn = bar.value(xn, t);
      if (std::isfinite(fn) && fn <= fx + 0.25 * alpha * slope) {
        x = xn;
        fx = fn;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    // With a decrement this small a full step always passes the Armijo test
    // in exact arithmetic, so a shortened step means f is at roundoff level.
    if (alpha < 1.0 && decrement < std::max(1e-6, 1e-14 * std::abs(fx))) return Centering::centered;
    if (!moved) return Centering::failed;
    if (early_stop && early_stop(x)) return Centering::centered;
  }
  return Centering::budget;
}

struct Reduced {
  ConicProblem problem;
  RealVector x_particular;
  RealMatrix nullspace;  // empty when no equalities
  bool active = false;
};

Reduced eliminate_equalities(const ConicProblem& p) {
  Reduced r;
  if (p.equalities.empty()) return r;
  r.active = true;
  const int n = p.num_vars;
  const int m = static_cast<int>(p.equalities.size());
  RealMatrix a = RealMatrix::Zero(m, n);
  RealVector b(m);
  for (int i = 0; i < m; ++i) {
    const auto& row = p.equalities[i].row;
    for (std::size_t k = 0; k < row.index.size(); ++k) a(i, row.index[k]) += row.value[k];
    b(i) = p.equalities[i].rhs;
  }
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-12 * std::max(smax, 1.0)) ++rank;
  svd.setThreshold(1e-12 * std::max(smax, 1.0) / std::max(smax, 1e-300));
  r.x_particular = svd.solve(b);
  r.nullspace = svd.matrixV().rightCols(n - rank);
  const RealMatrix& nsp = r.nullspace;
  const int nr = n - rank;

  ConicProblem q(nr);
  q.objective = nsp.transpose() * p.objective;
  q.objective_constant = p.objective_constant + p.objective.dot(r.x_particular);
  auto map_row = [&](const SparseRow& row, double& offset) {
    RealVector dense = RealVector::Zero(n);
    for (std::size_t k = 0; k < row.index.size(); ++k) dense(row.index[k]) += row.value[k];
    offset += dense.dot(r.x_particular);
    const RealVector red = nsp.transpose() * dense;
    SparseRow out;
    for (int j = 0; j < nr; ++j)
      if (std::abs(red(j)) > 1e-15 * (1.0 + dense.cwiseAbs().maxCoeff())) out.add(j, red(j));
    return out;
  };
  for (const auto& lt : p.log_terms) {
    LogTerm t = lt;
    t.row = map_row(lt.row, t.offset);
    q.log_terms.push_back(std::move(t));
  }
  for (const auto& c : p.inequalities) {
    LinearConstraint d = c;
    double off = 0.0;
    d.row = map_row(c.row, off);
    d.rhs = c.rhs - off;
    q.inequalities.push_back(std::move(d));
  }
  for (const auto& blk : p.psd) {
    PsdConstraint nb = blk;
    nb.terms.clear();
    nb.constant = blk.evaluate(r.x_particular);
    for (int j = 0; j < nr; ++j) {
      FactoredTerm t;
      t.var = j;
      for (const auto& old : blk.terms) {
        const double c = nsp(old.var, j);
        if (std::abs(c) <= 1e-15) continue;
        for (std::size_t k = 0; k < old.alpha.size(); ++k) {
          t.alpha.push_back(c * old.alpha[k]);
          t.left.push_back(old.left[k]);
          t.right.push_back(old.right[k]);
        }
      }
      if (!t.alpha.empty()) nb.terms.push_back(std::move(t));
    }
    q.psd.push_back(std::move(nb));
  }
  r.problem = std::move(q);
  return r;
}

double worst_violation(const ConicProblem& p, const RealVector& x, bool include_logs) {
  double worst = -kInf;
  for (const auto& c : p.inequalities) worst = std::max(worst, c.row.dot(x) - c.rhs);
  if (include_logs)
    for (const auto& lt : p.log_terms) worst = std::max(worst, -(lt.row.dot(x) + lt.offset));
  for (const auto& b : p.psd) worst = std::max(worst, -min_eigenvalue(b.evaluate(x)));
  return worst;
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverOptions& opt, const RealVector* warm_start) {
  const auto t_begin = std::chrono::steady_clock::now();
  ConicSolution sol;
  Reduced red = eliminate_equalities(problem);
  const ConicProblem& p = red.active ? red.problem : problem;
  const int n = p.num_vars;

  RealVector x = RealVector::Zero(n);
  if (warm_start && warm_start->size() == problem.num_vars) {
    x = red.active ? RealVector(red.nullspace.transpose() * (*warm_start - red.x_particular)) : *warm_start;
  }

  int budget = opt.max_total_newton;
  int steps = 0;
  auto finish = [&](SolveStatus st, const RealVector& y, double t, std::string msg) {
    sol.status = st;
    sol.x = red.active ? RealVector(red.x_particular + red.nullspace * y) : y;
    sol.objective = problem.objective_value(sol.x);
    sol.iterations = steps;
    sol.message = std::move(msg);
    sol.gap_bound = t > 0.0 ? Barrier(p, false).theta() / t : kInf;
    double viol = 0.0;
    sol.psd_duals.clear();
    for (const auto& b : problem.psd) {
      const ComplexMatrix f = b.evaluate(sol.x);
      viol = std::max(viol, -min_eigenvalue(f));
      if (st == SolveStatus::optimal && t > 0.0) {
        Eigen::LLT<ComplexMatrix> llt(f);
        if (llt.info() == Eigen::Success)
          sol.psd_duals.push_back(llt.solve(ComplexMatrix::Identity(f.rows(), f.cols())) / t);
        else
          sol.psd_duals.push_back(ComplexMatrix::Zero(f.rows(), f.cols()));
      }
    }
    sol.max_psd_violation = viol;
    double res = 0.0;
    sol.ineq_duals = RealVector::Zero(static_cast<Eigen::Index>(problem.inequalities.size()));
    for (std::size_t i = 0; i < problem.inequalities.size(); ++i) {
      const auto& c = problem.inequalities[i];
      const double slack = c.rhs - c.row.dot(sol.x);
      res = std::max(res, -slack);
      if (st == SolveStatus::optimal && t > 0.0 && slack > 0.0)
        sol.ineq_duals(static_cast<Eigen::Index>(i)) = 1.0 / (t * slack);
    }
    for (const auto& c : problem.equalities) res = std::max(res, std::abs(c.row.dot(sol.x) - c.rhs));
    sol.max_linear_residual = res;
    sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return sol;
  };

  if (n == 0) {
    // Nothing to optimize: report feasibility of the constant problem.
    const double w = worst_violation(p, x, true);
    return finish(w < 0.0 ? SolveStatus::optimal : SolveStatus::infeasible, x, kInf,
                  w < 0.0 ? "no variables" : "constant problem infeasible");
  }

  // Phase I when the starting point is not strictly interior.
  const double viol0 = worst_violation(p, x, true);
  if (!(viol0 < -opt.interior_margin)) {
    Barrier ph1(p, true, 1e12 * (1.0 + x.squaredNorm()));
    RealVector xs(n + 1);
    xs.head(n) = x;
    xs(n) = std::max(viol0, 0.0) * 1.5 + 1.0;
    if (!(xs(n) + 1.0 > 0.0)) xs(n) = 1.0;
    double t = 1.0;
    bool found = false;
    auto below_zero = [&](const RealVector& y) { return y(n) < -1e-3 && worst_violation(p, y.head(n), true) < 0.0; };
    for (int outer = 0; outer < 60; ++outer) {
      const int before = steps;
      const Centering c = center(ph1, xs, t, opt, budget, steps, below_zero);
      if (opt.verbose)
        std::cerr << "conic phase I: t " << t << " newton " << steps - before << " s " << xs(n) << " |x| "
                  << xs.head(n).norm() << (c == Centering::centered ? "" : " (not centered)") << "\n";
      if (c == Centering::failed || (c == Centering::budget && budget <= 0)) {
        if (xs(n) < 0.0 && worst_violation(p, xs.head(n), true) < 0.0) {
          found = true;
          break;
        }
        return finish(c == Centering::failed ? SolveStatus::numerical : SolveStatus::max_iter, xs.head(n), 0.0,
                      "phase I centering failed");
      }
      if (xs(n) < 0.0 && worst_violation(p, xs.head(n), true) < 0.0) {
        found = true;
        break;
      }
      if (ph1.theta() / t < 1e-10) break;
      t *= opt.barrier_growth;
    }
    if (!found) {
      std::ostringstream os;
      os << "phase I optimum " << xs(n) << " >= 0";
      return finish(SolveStatus::infeasible, xs.head(n), 0.0, os.str());
    }
    x = xs.head(n);
  }

  // Path following with an adaptive growth factor. A centering that runs out
  // of steps is resumed at a smaller t; the gap bound theta/t is only claimed
  // at a centered point.
  Barrier bar(p, false);
  double t = opt.initial_t / std::max(1.0, p.objective.norm());
  double mu = opt.barrier_growth;
  double t_prev = 0.0;  // last centered t
  RealVector x_prev;
  for (int outer = 0; outer < 400; ++outer) {
    const int before = steps;
    const Centering c = center(bar, x, t, opt, budget, steps, nullptr);
    if (opt.verbose)
      std::cerr << "conic: t " << t << " newton " << steps - before << " f " << bar.f0(x)
                << (c == Centering::centered ? "" : " (not centered)") << "\n";
    if (c == Centering::centered) {
      if (bar.theta() / t <= opt.gap_tolerance) return finish(SolveStatus::optimal, x, t, "");
      t_prev = t;
      x_prev = x;
      if (steps - before <= opt.max_newton_per_centering / 4) mu = std::min(opt.barrier_growth, mu * mu);
      t *= mu;
      continue;
    }
    if (budget <= 0 || c == Centering::failed) {
      if (t_prev > 0.0 && bar.theta() / t_prev <= 10.0 * opt.gap_tolerance)
        return finish(SolveStatus::optimal, x_prev, t_prev, "centering stalled near tolerance");
      const SolveStatus st = budget <= 0 ? SolveStatus::max_iter : SolveStatus::numerical;
      if (t_prev > 0.0) return finish(st, x_prev, t_prev, "centering failed");
      return finish(st, x, 0.0, "centering failed");
    }
    // Out of steps for this t: the iterate is still interior, so retarget.
    if (t_prev > 0.0) {
      mu = std::sqrt(mu);
      if (mu < 1.01) return finish(SolveStatus::numerical, x_prev, t_prev, "barrier growth underflow");
      t = t_prev * mu;
    } else {
      t *= 0.1;
    }
  }
  return finish(SolveStatus::max_iter, x, t, "outer iteration cap");
}

namespace detail {

double barrier_value(const ConicProblem& p, const RealVector& x, double t) { return Barrier(p, false).value(x, t); }

bool barrier_derivatives(const ConicProblem& p, const RealVector& x, double t, RealVector& g, RealMatrix& h) {
  return Barrier(p, false).derivatives(x, t, g, h);
}

}  // namespace detail

HermitianLayout::HermitianLayout(Eigen::Index n, int offset, bool unit_diagonal)
    : n_(n), offset_(offset), unit_diagonal_(unit_diagonal) {
  int k = offset;
  if (!unit_diagonal)
    for (Eigen::Index i = 0; i < n; ++i)
      basis_.push_back({k++, static_cast<int>(i), static_cast<int>(i), Basis::diagonal});
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      basis_.push_back({k++, static_cast<int>(i), static_cast<int>(j), Basis::real_part});
      basis_.push_back({k++, static_cast<int>(i), static_cast<int>(j), Basis::imag_part});
    }
}

HermitianLayout embed_hermitian(Eigen::Index n, int offset) {
  if (n < 1) throw ConfigError("embed_hermitian: n must be >= 1");
  return HermitianLayout(n, offset);
}

HermitianLayout unit_diagonal_layout(Eigen::Index n, int offset) {
  if (n < 1) throw ConfigError("unit_diagonal_layout: n must be >= 1");
  return HermitianLayout(n, offset, true);
}

void HermitianLayout::embed(const ComplexMatrix& a, RealVector& x) const {
  for (const auto& b : basis_) {
    switch (b.kind) {
      case Basis::diagonal: x(b.var) = a(b.row, b.row).real(); break;
      case Basis::real_part: x(b.var) = 0.5 * (a(b.row, b.col).real() + a(b.col, b.row).real()); break;
      case Basis::imag_part: x(b.var) = 0.5 * (a(b.row, b.col).imag() - a(b.col, b.row).imag()); break;
    }
  }
}

Hermitian HermitianLayout::extract(const RealVector& x) const {
  ComplexMatrix a = ComplexMatrix::Zero(n_, n_);
  if (unit_diagonal_) a.setIdentity();
  for (const auto& b : basis_) {
    const double v = x(b.var);
    switch (b.kind) {
      case Basis::diagonal: a(b.row, b.row) = v; break;
      case Basis::real_part:
        a(b.row, b.col) += v;
        a(b.col, b.row) += v;
        break;
      case Basis::imag_part:
        a(b.row, b.col) += cd(0.0, v);
        a(b.col, b.row) -= cd(0.0, v);
        break;
    }
  }
  return Hermitian(a);
}

ComplexMatrix HermitianLayout::basis_matrix(const Basis& b) const {
  ComplexMatrix e = ComplexMatrix::Zero(n_, n_);
  switch (b.kind) {
    case Basis::diagonal: e(b.row, b.row) = 1.0; break;
    case Basis::real_part:
      e(b.row, b.col) = 1.0;
      e(b.col, b.row) = 1.0;
      break;
    case Basis::imag_part:
      e(b.row, b.col) = cd(0.0, 1.0);
      e(b.col, b.row) = cd(0.0, -1.0);
      break;
  }
  return e;
}

namespace {

// Re Tr(C E_b) for Hermitian C.
double basis_functional(const ComplexMatrix& c, const HermitianLayout::Basis& b) {
  switch (b.kind) {
    case HermitianLayout::Basis::diagonal: return c(b.row, b.row).real();
    case HermitianLayout::Basis::real_part: return c(b.col, b.row).real() + c(b.row, b.col).real();
    case HermitianLayout::Basis::imag_part:
      // Tr(C E) = C_ba * i + C_ab * (-i)
      return (c(b.col, b.row) * cd(0.0, 1.0) - c(b.row, b.col) * cd(0.0, 1.0)).real();
  }
  return 0.0;
}

}  // namespace

void HermitianLayout::linear_functional(const ComplexMatrix& c, double scale, RealVector& objective) const {
  for (const auto& b : basis_) objective(b.var) += scale * basis_functional(c, b);
}

void HermitianLayout::linear_functional(const ComplexMatrix& c, double scale, SparseRow& row) const {
  for (const auto& b : basis_) row.add(b.var, scale * basis_functional(c, b));
}

void HermitianLayout::add_congruence(PsdConstraint& f, const std::vector<int>& t_cols, double scale) const {
  if (static_cast<Eigen::Index>(t_cols.size()) != n_)
    throw ConfigError("add_congruence: column count mismatch");
  if (scale == 0.0) return;
  const cd i_unit(0.0, 1.0);
  for (const auto& b : basis_) {
    FactoredTerm t;
    t.var = b.var;
    const int ca = t_cols[b.row];
    const int cb = t_cols[b.col];
    switch (b.kind) {
      case Basis::diagonal:
        t.alpha = {scale};
        t.left = {ca};
        t.right = {ca};
        break;
      case Basis::real_part:
        t.alpha = {scale, scale};
        t.left = {ca, cb};
        t.right = {cb, ca};
        break;
      case Basis::imag_part:
        t.alpha = {scale * i_unit, -scale * i_unit};
        t.left = {ca, cb};
        t.right = {cb, ca};
        break;
    }
    f.terms.push_back(std::move(t));
  }
}

void dump(const ConicProblem& p, std::ostream& os) {
  os.precision(17);
  os << "conic-problem v1\n";
  os << "vars " << p.num_vars << "\n";
  os << "objective_constant " << p.objective_constant << "\n";
  os << "objective";
  for (int i = 0; i < p.num_vars; ++i)
    if (p.objective(i) != 0.0) os << ' ' << i << ':' << p.objective(i);
  os << "\n";
  auto row = [&](const SparseRow& r) {
    for (std::size_t k = 0; k < r.index.size(); ++k) os << ' ' << r.index[k] << ':' << r.value[k];
  };
  for (const auto& lt : p.log_terms) {
    os << "log " << lt.weight << ' ' << lt.offset;
    row(lt.row);
    os << "\n";
  }
  for (const auto& c : p.inequalities) {
    os << "leq " << c.rhs;
    row(c.row);
    os << "\n";
  }
  for (const auto& c : p.equalities) {
    os << "eq " << c.rhs;
    row(c.row);
    os << "\n";
  }
  auto mat = [&](const ComplexMatrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = r; c < m.cols(); ++c)
        if (m(r, c) != cd(0.0, 0.0)) os << ' ' << r << ',' << c << ':' << m(r, c).real() << ',' << m(r, c).imag();
  };
  for (const auto& b : p.psd) {
    os << "psd " << b.dim() << ' ' << (b.label.empty() ? "-" : b.label) << "\n";
    os << "  const";
    mat(b.constant);
    os << "\n";
    for (std::size_t t = 0; t < b.terms.size(); ++t) {
      os << "  var " << b.terms[t].var;
      mat(b.coefficient(t));
      os << "\n";
    }
  }
}

}  // namespace irsguard::conic
