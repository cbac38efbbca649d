#include "stride/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <array>
#include <ostream>

namespace stride {

void SolveOptions::validate() const {
  if (!(feasibility_tolerance > 0.0) || !(optimality_tolerance > 0.0))
    throw StructuralError("solver tolerances must be positive");
  if (max_iterations < 1) throw StructuralError("max_iterations must be >= 1");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimedOut: return "timed_out";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

// Augmented Lagrangian with per-row adaptive penalties (grown on raw
// violations, so badly scaled rows still meet the unscaled tolerance) and a
// bound-projected truncated-Newton inner solver. Hessian-vector products
// come from forward-over-reverse sweeps on the expression tape.
class AugmentedLagrangianSolver {
 public:
  AugmentedLagrangianSolver(const TranscribedProblem& p, const SolveOptions& o) : p_(p), opt_(o) {
    n_ = p.num_vars;
    n_eq_ = static_cast<int>(p.equalities.size());
    n_ineq_ = static_cast<int>(p.inequalities.size());
  }

  SolveResult run();

 private:
  void to_unscaled(const std::vector<double>& xs, std::vector<double>& x) const {
    for (int i = 0; i < n_; ++i) x[i] = xs[i] * var_scale_[i];
  }

  double eval(const std::vector<double>& xs);
  double al_value() const;
  void al_gradient(std::vector<double>& grad);
  void al_hessian_vector(const std::vector<double>& v_scaled, std::vector<double>& hv_scaled);
  void compute_preconditioner();
  void newton_cg_direction(const std::vector<double>& masked_grad, const std::vector<bool>& free,
                           double tol, std::vector<double>& dir);
  int inner_loop(std::vector<double>& xs, double tol, const Clock::time_point& deadline, bool has_deadline,
                 double& final_pg);

  double violation_unscaled() const;
  double multiplier_norm() const {
    double m = 0.0;
    for (double v : lambda_) m = std::max(m, std::abs(v));
    for (double v : mu_) m = std::max(m, std::abs(v));
    return m;
  }
  double max_penalty_in_use() const {
    double m = 0.0;
    for (double r : rho_eq_) m = std::max(m, r);
    for (double r : rho_ineq_) m = std::max(m, r);
    return m;
  }

  void project(std::vector<double>& xs) const {
    for (int i = 0; i < n_; ++i) xs[i] = std::clamp(xs[i], lb_[i], ub_[i]);
  }
  double projected_gradient_norm(const std::vector<double>& xs, const std::vector<double>& g) const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double step = std::clamp(xs[i] - g[i], lb_[i], ub_[i]) - xs[i];
      m = std::max(m, std::abs(step));
    }
    return m;
  }

  const TranscribedProblem& p_;
  SolveOptions opt_;
  int n_ = 0, n_eq_ = 0, n_ineq_ = 0;

  std::vector<double> var_scale_, lb_, ub_;
  std::vector<double> row_scale_eq_, row_scale_ineq_;
  double cost_scale_ = 1.0;

  std::vector<double> lambda_, mu_;
  // penalties are shared per constraint family: rows in a family carry the
  // same units, and family-level growth avoids per-row whack-a-mole when the
  // active violating row rotates between outer iterations
  static constexpr int kFamilies = 9;
  std::array<double, kFamilies> rho_family_{};
  std::array<double, kFamilies> prev_family_max_{};
  std::vector<int> fam_eq_, fam_ineq_;
  std::vector<double> rho_eq_, rho_ineq_;

  TranscribedProblem::EvalBuffer buf_;
  std::vector<double> x_world_;
  std::vector<double> adjoint_scratch_, adjoint_dot_scratch_;
  std::vector<double> eq_vals_, ineq_vals_;  // scaled row values at the last eval
  double f_raw_ = 0.0;

  std::vector<double> tangent_, value_dots_, hv_world_;
  std::vector<double> cg_r_, cg_p_, cg_hp_, cg_z_, precond_;

  std::uint64_t work_ = 0;
  int inner_total_ = 0;
};

double AugmentedLagrangianSolver::eval(const std::vector<double>& xs) {
  to_unscaled(xs, x_world_);
  p_.forward(x_world_, buf_);
  work_ += static_cast<std::uint64_t>(p_.pool.size());
  f_raw_ = p_.cost_value(buf_);
  for (int i = 0; i < n_eq_; ++i) eq_vals_[i] = row_scale_eq_[i] * buf_.values[p_.equalities[i].root];
  for (int i = 0; i < n_ineq_; ++i) ineq_vals_[i] = row_scale_ineq_[i] * buf_.values[p_.inequalities[i].root];
  return f_raw_;
}

double AugmentedLagrangianSolver::al_value() const {
  double v = cost_scale_ * f_raw_;
  for (int i = 0; i < n_eq_; ++i) {
    const double h = eq_vals_[i];
    v += lambda_[i] * h + 0.5 * rho_eq_[i] * h * h;
  }
  for (int i = 0; i < n_ineq_; ++i) {
    const double t = mu_[i] + rho_ineq_[i] * ineq_vals_[i];
    if (t > 0.0) v += (t * t - mu_[i] * mu_[i]) / (2.0 * rho_ineq_[i]);
    else v += -mu_[i] * mu_[i] / (2.0 * rho_ineq_[i]);
  }
  return v;
}

void AugmentedLagrangianSolver::al_gradient(std::vector<double>& grad) {
  std::vector<double> wq(n_eq_), wg(n_ineq_);
  for (int i = 0; i < n_eq_; ++i) wq[i] = (lambda_[i] + rho_eq_[i] * eq_vals_[i]) * row_scale_eq_[i];
  for (int i = 0; i < n_ineq_; ++i) {
    const double t = mu_[i] + rho_ineq_[i] * ineq_vals_[i];
    wg[i] = t > 0.0 ? t * row_scale_ineq_[i] : 0.0;
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  p_.weighted_gradient(buf_, cost_scale_, wq, wg, grad, adjoint_scratch_);
  work_ += 2 * static_cast<std::uint64_t>(p_.pool.size());
  for (int i = 0; i < n_; ++i) grad[i] *= var_scale_[i];
}

void AugmentedLagrangianSolver::al_hessian_vector(const std::vector<double>& v_scaled,
                                                  std::vector<double>& hv_scaled) {
  for (int i = 0; i < n_; ++i) tangent_[i] = v_scaled[i] * var_scale_[i];
  p_.pool.tangent_forward(buf_.values, tangent_, value_dots_);
  adjoint_scratch_.assign(p_.pool.size(), 0.0);
  adjoint_dot_scratch_.assign(p_.pool.size(), 0.0);
  adjoint_scratch_[p_.cost_root] += cost_scale_;
  for (int i = 0; i < n_eq_; ++i) {
    const std::int32_t root = p_.equalities[i].root;
    const double se = row_scale_eq_[i];
    adjoint_scratch_[root] += (lambda_[i] + rho_eq_[i] * eq_vals_[i]) * se;
    adjoint_dot_scratch_[root] += rho_eq_[i] * se * se * value_dots_[root];
  }
  for (int i = 0; i < n_ineq_; ++i) {
    const double t = mu_[i] + rho_ineq_[i] * ineq_vals_[i];
    if (t <= 0.0) continue;
    const std::int32_t root = p_.inequalities[i].root;
    const double si = row_scale_ineq_[i];
    adjoint_scratch_[root] += t * si;
    adjoint_dot_scratch_[root] += rho_ineq_[i] * si * si * value_dots_[root];
  }
  std::fill(hv_world_.begin(), hv_world_.end(), 0.0);
  p_.pool.reverse_pair(buf_.values, value_dots_, adjoint_scratch_, adjoint_dot_scratch_, hv_world_);
  work_ += 3 * static_cast<std::uint64_t>(p_.pool.size());
  hv_scaled.resize(n_);
  for (int i = 0; i < n_; ++i) hv_scaled[i] = hv_world_[i] * var_scale_[i];
}

// Jacobi preconditioner from the Gauss-Newton diagonal of the augmented
// Lagrangian; recomputed once per inner loop (the affine majority of row
// gradients is constant anyway).
void AugmentedLagrangianSolver::compute_preconditioner() {
  precond_.assign(n_, 1e-8);
  const auto accumulate = [&](std::int32_t root, double weight) {
    if (weight == 0.0) return;
    const SparseGradient g = p_.pool.gradient(root, x_world_);
    for (const auto& [var, val] : g.entries) {
      const double sv = val * var_scale_[var];
      precond_[var] += weight * sv * sv;
    }
  };
  for (int i = 0; i < n_eq_; ++i)
    accumulate(p_.equalities[i].root, rho_eq_[i] * row_scale_eq_[i] * row_scale_eq_[i]);
  for (int i = 0; i < n_ineq_; ++i) {
    const double t = mu_[i] + rho_ineq_[i] * ineq_vals_[i];
    if (t > 0.0) accumulate(p_.inequalities[i].root, rho_ineq_[i] * row_scale_ineq_[i] * row_scale_ineq_[i]);
  }
  accumulate(p_.cost_root, cost_scale_);
  for (double& d : precond_) d = std::max(d, 1e-8);
}

// Steihaug-style truncated preconditioned CG on the free subspace: solves
// H d = -g, stops on negative curvature or the forcing tolerance.
void AugmentedLagrangianSolver::newton_cg_direction(const std::vector<double>& masked_grad,
                                                    const std::vector<bool>& free, double tol,
                                                    std::vector<double>& dir) {
  std::vector<double>& r = cg_r_;
  std::vector<double>& z = cg_z_;
  std::vector<double>& pvec = cg_p_;
  std::vector<double>& hp = cg_hp_;
  dir.assign(n_, 0.0);
  r = masked_grad;
  for (double& v : r) v = -v;
  z.assign(n_, 0.0);
  double rz = 0.0, gnorm2 = 0.0;
  for (int i = 0; i < n_; ++i) {
    if (free[i]) z[i] = r[i] / precond_[i];
    rz += r[i] * z[i];
    gnorm2 += masked_grad[i] * masked_grad[i];
  }
  const double gnorm = std::sqrt(gnorm2);
  if (gnorm == 0.0 || !(rz > 0.0)) {
    dir = z;
    return;
  }
  const double forcing = std::max(0.3 * tol, 0.1 * gnorm);
  pvec = z;
  for (int cg = 0; cg < opt_.cg_max_iterations; ++cg) {
    al_hessian_vector(pvec, hp);
    for (int i = 0; i < n_; ++i)
      if (!free[i]) hp[i] = 0.0;
    double php = 0.0, pp = 0.0;
    for (int i = 0; i < n_; ++i) {
      php += pvec[i] * hp[i];
      pp += pvec[i] * pvec[i];
    }
    if (!(php > 1e-12 * pp)) {
      // negative or vanishing curvature: keep the progress so far, or fall
      // back to the preconditioned gradient on the first iteration
      if (cg == 0) dir = z;
      return;
    }
    const double alpha = rz / php;
    for (int i = 0; i < n_; ++i) {
      dir[i] += alpha * pvec[i];
      r[i] -= alpha * hp[i];
    }
    double rinf = 0.0;
    for (int i = 0; i < n_; ++i) rinf = std::max(rinf, std::abs(r[i]));
    if (rinf <= forcing) return;
    double rz_new = 0.0;
    for (int i = 0; i < n_; ++i) {
      z[i] = free[i] ? r[i] / precond_[i] : 0.0;
      rz_new += r[i] * z[i];
    }
    if (!(rz_new > 0.0)) return;
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n_; ++i) pvec[i] = z[i] + beta * pvec[i];
  }
}

int AugmentedLagrangianSolver::inner_loop(std::vector<double>& xs, double tol,
                                          const Clock::time_point& deadline, bool has_deadline,
                                          double& final_pg) {
  std::vector<double> grad(n_), masked(n_), dir(n_), trial(n_);
  std::vector<bool> free(n_, true);
  eval(xs);
  double phi = al_value();
  al_gradient(grad);
  compute_preconditioner();

  int stalls = 0;
  int iters = 0;
  for (; iters < opt_.inner_max_iterations; ++iters) {
    final_pg = projected_gradient_norm(xs, grad);
    if (final_pg <= tol) break;
    if (has_deadline && Clock::now() > deadline) break;

    // mask coordinates pinned at an active bound
    for (int i = 0; i < n_; ++i) {
      const bool at_lower = std::isfinite(lb_[i]) &&
                            xs[i] - lb_[i] <= 1e-10 * (1.0 + std::abs(lb_[i])) && grad[i] > 0.0;
      const bool at_upper = std::isfinite(ub_[i]) &&
                            ub_[i] - xs[i] <= 1e-10 * (1.0 + std::abs(ub_[i])) && grad[i] < 0.0;
      free[i] = !(at_lower || at_upper);
      masked[i] = free[i] ? grad[i] : 0.0;
    }
    newton_cg_direction(masked, free, tol, dir);
    double gd = 0.0, dn = 0.0, gn = 0.0;
    for (int i = 0; i < n_; ++i) {
      gd += masked[i] * dir[i];
      dn += dir[i] * dir[i];
      gn += masked[i] * masked[i];
    }
    if (!(gd < -1e-12 * std::sqrt(dn * gn)) || !std::isfinite(gd)) {
      for (int i = 0; i < n_; ++i) dir[i] = -masked[i];
    }

    // projected backtracking line search with a machine-precision allowance
    double alpha = 1.0;
    bool accepted = false;
    double phi_new = phi;
    for (int ls = 0; ls < 40; ++ls) {
      for (int i = 0; i < n_; ++i) trial[i] = std::clamp(xs[i] + alpha * dir[i], lb_[i], ub_[i]);
      eval(trial);
      phi_new = al_value();
      double descent = 0.0;
      for (int i = 0; i < n_; ++i) descent += grad[i] * (trial[i] - xs[i]);
      const double noise = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(phi));
      if (std::isfinite(phi_new) && phi_new <= phi + 1e-4 * descent + noise && descent < 0.0) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;

    double step_inf = 0.0;
    for (int i = 0; i < n_; ++i) step_inf = std::max(step_inf, std::abs(trial[i] - xs[i]));
    xs.swap(trial);
    al_gradient(grad);
    phi = phi_new;
    if (step_inf <= 1e-13) {
      if (++stalls >= 3) break;  // at the precision floor
    } else {
      stalls = 0;
    }
  }
  eval(xs);  // leave row values consistent with xs
  inner_total_ += iters;
  return iters;
}

double AugmentedLagrangianSolver::violation_unscaled() const {
  double v = 0.0;
  for (int i = 0; i < n_eq_; ++i) v = std::max(v, std::abs(eq_vals_[i] / row_scale_eq_[i]));
  for (int i = 0; i < n_ineq_; ++i) v = std::max(v, ineq_vals_[i] / row_scale_ineq_[i]);
  return v;
}

SolveResult AugmentedLagrangianSolver::run() {
  const auto t_start = Clock::now();
  const bool has_deadline = opt_.max_wall_time > 0.0;
  const auto deadline = t_start + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(std::max(opt_.max_wall_time, 0.0)));

  SolveResult res;
  opt_.validate();
  if (opt_.warm_start && static_cast<int>(opt_.warm_start->size()) != n_)
    throw StructuralError("warm start length does not match the problem");

  // variable scaling from bound widths
  var_scale_.assign(n_, 1.0);
  lb_.assign(n_, -kInfinity);
  ub_.assign(n_, kInfinity);
  for (int i = 0; i < n_; ++i) {
    const double lo = p_.lower(i), hi = p_.upper(i);
    if (std::isfinite(lo) && std::isfinite(hi) && hi > lo)
      var_scale_[i] = std::clamp((hi - lo) / 4.0, 1.0, 1e4);
    lb_[i] = lo / var_scale_[i];
    ub_[i] = hi / var_scale_[i];
  }

  buf_.values.reserve(p_.pool.size());
  x_world_.assign(n_, 0.0);
  tangent_.assign(n_, 0.0);
  hv_world_.assign(n_, 0.0);
  eq_vals_.assign(n_eq_, 0.0);
  ineq_vals_.assign(n_ineq_, 0.0);
  row_scale_eq_.assign(n_eq_, 1.0);
  row_scale_ineq_.assign(n_ineq_, 1.0);
  lambda_.assign(n_eq_, 0.0);
  mu_.assign(n_ineq_, 0.0);
  rho_family_.fill(opt_.initial_penalty);
  prev_family_max_.fill(kInfinity);
  fam_eq_.resize(n_eq_);
  fam_ineq_.resize(n_ineq_);
  for (int i = 0; i < n_eq_; ++i) fam_eq_[i] = static_cast<int>(p_.equalities[i].family);
  for (int i = 0; i < n_ineq_; ++i) fam_ineq_[i] = static_cast<int>(p_.inequalities[i].family);
  rho_eq_.assign(n_eq_, opt_.initial_penalty);
  rho_ineq_.assign(n_ineq_, opt_.initial_penalty);

  std::vector<double> xs(n_, 0.0);
  if (opt_.warm_start) {
    for (int i = 0; i < n_; ++i) xs[i] = (*opt_.warm_start)[i] / var_scale_[i];
  } else {
    for (int i = 0; i < n_; ++i) {
      if (std::isfinite(lb_[i]) && std::isfinite(ub_[i])) xs[i] = 0.5 * (lb_[i] + ub_[i]);
      else if (std::isfinite(lb_[i])) xs[i] = lb_[i];
      else if (std::isfinite(ub_[i])) xs[i] = ub_[i];
    }
  }
  project(xs);

  eval(xs);
  bool finite = std::isfinite(f_raw_);
  for (int i = 0; i < n_eq_ && finite; ++i) finite = std::isfinite(eq_vals_[i]);
  for (int i = 0; i < n_ineq_ && finite; ++i) finite = std::isfinite(ineq_vals_[i]);
  if (!finite) {
    res.status = SolveStatus::Infeasible;
    res.diagnostic = "non-finite function evaluation at the start point";
    res.solution = x_world_;
    res.wall_time = std::chrono::duration<double>(Clock::now() - t_start).count();
    return res;
  }

  // row scaling by initial-point gradient norms, clipped to [1e-2, 1e2]
  const auto scaled_row_norm = [&](std::int32_t root) {
    const SparseGradient g = p_.pool.gradient(root, x_world_);
    double n2 = 0.0;
    for (const auto& [var, val] : g.entries) {
      const double sv = val * var_scale_[var];
      n2 += sv * sv;
    }
    return std::sqrt(n2);
  };
  for (int i = 0; i < n_eq_; ++i)
    row_scale_eq_[i] = 1.0 / std::clamp(scaled_row_norm(p_.equalities[i].root), 1e-2, 1e2);
  for (int i = 0; i < n_ineq_; ++i)
    row_scale_ineq_[i] = 1.0 / std::clamp(scaled_row_norm(p_.inequalities[i].root), 1e-2, 1e2);
  cost_scale_ = 1.0 / std::clamp(scaled_row_norm(p_.cost_root), 1.0, 1e6);
  eval(xs);

  double omega = 1e-1;
  double best_violation = kInfinity;
  int stagnant = 0;
  double pg = kInfinity;
  double kkt = kInfinity;

  int outer = 0;
  for (outer = 0; outer < opt_.max_iterations; ++outer) {
    const double dual_scale = std::max(1.0, multiplier_norm());
    const double omega_floor = 0.8 * opt_.optimality_tolerance * dual_scale;
    inner_loop(xs, std::max(omega, omega_floor), deadline, has_deadline, pg);

    const double v = violation_unscaled();

    // first-order multiplier update; the AL gradient with updated
    // multipliers equals the Lagrangian gradient, so `pg` doubles as the
    // stationarity measure (reported normalized by the dual scale)
    for (int i = 0; i < n_eq_; ++i) lambda_[i] += rho_eq_[i] * eq_vals_[i];
    for (int i = 0; i < n_ineq_; ++i) mu_[i] = std::max(0.0, mu_[i] + rho_ineq_[i] * ineq_vals_[i]);

    kkt = pg / std::max(1.0, multiplier_norm());
    if (std::getenv("STRIDE_SOLVER_DEBUG")) {
      int worst_eq = -1, worst_ineq = -1;
      double we = 0.0, wi = 0.0;
      for (int i = 0; i < n_eq_; ++i) {
        const double raw = std::abs(eq_vals_[i] / row_scale_eq_[i]);
        if (raw > we) { we = raw; worst_eq = i; }
      }
      for (int i = 0; i < n_ineq_; ++i) {
        const double raw = ineq_vals_[i] / row_scale_ineq_[i];
        if (raw > wi) { wi = raw; worst_ineq = i; }
      }
      std::fprintf(stderr,
                   "outer %d rho_max %.3g omega %.3g pg %.3g dual %.3g v %.3g inner %d "
                   "weq %.3g (%s rho %.3g s %.3g) wineq %.3g (%s rho %.3g s %.3g)\n",
                   outer, max_penalty_in_use(), omega, pg, multiplier_norm(), v, inner_total_, we,
                   worst_eq >= 0 ? to_string(p_.equalities[worst_eq].family) : "-",
                   worst_eq >= 0 ? rho_eq_[worst_eq] : 0.0, worst_eq >= 0 ? row_scale_eq_[worst_eq] : 0.0,
                   wi, worst_ineq >= 0 ? to_string(p_.inequalities[worst_ineq].family) : "-",
                   worst_ineq >= 0 ? rho_ineq_[worst_ineq] : 0.0,
                   worst_ineq >= 0 ? row_scale_ineq_[worst_ineq] : 0.0);
    }
    if (opt_.iteration_log)
      (*opt_.iteration_log) << outer << "," << f_raw_ << "," << v << "," << kkt << "\n";

    if (v <= opt_.feasibility_tolerance && kkt <= opt_.optimality_tolerance) {
      res.status = SolveStatus::Converged;
      break;
    }
    if (has_deadline && Clock::now() > deadline) {
      res.status = SolveStatus::TimedOut;
      res.diagnostic = "wall-time limit reached";
      break;
    }

    // family-level penalty growth on raw violations that fail to shrink
    const double target = 0.5 * opt_.feasibility_tolerance;
    std::array<double, kFamilies> family_max{};
    for (int i = 0; i < n_eq_; ++i)
      family_max[fam_eq_[i]] =
          std::max(family_max[fam_eq_[i]], std::abs(eq_vals_[i] / row_scale_eq_[i]));
    for (int i = 0; i < n_ineq_; ++i)
      family_max[fam_ineq_[i]] =
          std::max(family_max[fam_ineq_[i]], std::max(ineq_vals_[i] / row_scale_ineq_[i], 0.0));
    for (int f = 0; f < kFamilies; ++f) {
      if (family_max[f] > target && family_max[f] > 0.25 * prev_family_max_[f])
        rho_family_[f] = std::min(rho_family_[f] * 5.0, opt_.max_penalty);
      prev_family_max_[f] = family_max[f];
    }
    for (int i = 0; i < n_eq_; ++i) rho_eq_[i] = rho_family_[fam_eq_[i]];
    for (int i = 0; i < n_ineq_; ++i) rho_ineq_[i] = rho_family_[fam_ineq_[i]];
    omega = std::max(omega * 0.3, omega_floor);

    if (v < best_violation * (1.0 - 1e-3)) {
      best_violation = v;
      stagnant = 0;
    } else {
      ++stagnant;
      if (stagnant >= 10 && v > opt_.feasibility_tolerance) {
        res.status = SolveStatus::Infeasible;
        res.diagnostic = "constraint violation stagnated above tolerance";
        break;
      }
    }
  }
  if (outer == opt_.max_iterations) res.status = SolveStatus::MaxIterations;

  to_unscaled(xs, x_world_);
  res.solution = x_world_;
  res.objective = f_raw_;
  res.kkt_residual = kkt;
  res.constraint_violation = violation_unscaled();
  res.iterations = inner_total_;
  res.work_units = work_;
  res.wall_time = std::chrono::duration<double>(Clock::now() - t_start).count();
  return res;
}

}  // namespace

SolveResult solve(const TranscribedProblem& problem, const SolveOptions& options) {
  AugmentedLagrangianSolver s(problem, options);
  return s.run();
}

}  // namespace stride
