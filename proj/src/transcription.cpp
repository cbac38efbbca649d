#include "stride/transcription.hpp"

#include "stride/relaxations.hpp"

#include <algorithm>
#include <cmath>

namespace stride {

KinematicPolytope KinematicConfig::com_polytope() const {
  return KinematicPolytope::box(com_lower, com_upper);
}

KinematicPolytope KinematicConfig::reach_polytope(Foot swing_foot) const {
  if (swing_foot == Foot::Left) return KinematicPolytope::box(reach_lower, reach_upper);
  // mirror the lateral window for a right-foot swing
  const Vec3 lo(reach_lower.x(), -reach_upper.y(), reach_lower.z());
  const Vec3 hi(reach_upper.x(), -reach_lower.y(), reach_upper.z());
  return KinematicPolytope::box(lo, hi);
}

HorizonSpec HorizonSpec::make(int steps, Foot swing_first, int knots_per_phase, double t_max) {
  if (steps < 1) throw StructuralError("horizon must cover at least one step");
  HorizonSpec h;
  h.steps = steps;
  h.knots_per_phase = knots_per_phase;
  h.t_max = t_max;
  h.swing_first = swing_first;
  Foot swing = swing_first;
  for (int i = 0; i < steps; ++i) {
    const Foot stance = other(swing);
    h.phases.push_back({PhaseKind::PreSwing, {Foot::Left, Foot::Right}, knots_per_phase});
    h.phases.push_back({PhaseKind::Swing, {stance}, knots_per_phase});
    h.phases.push_back({PhaseKind::PostLanding, {Foot::Left, Foot::Right}, knots_per_phase});
    swing = other(swing);
  }
  h.validate();
  return h;
}

void HorizonSpec::validate() const {
  if (steps < 1 || static_cast<int>(phases.size()) != 3 * steps)
    throw StructuralError("horizon must contain three phases per step");
  Foot swing = swing_first;
  for (int i = 0; i < steps; ++i) {
    const PhaseSpec& pre = phases[3 * i];
    const PhaseSpec& sw = phases[3 * i + 1];
    const PhaseSpec& post = phases[3 * i + 2];
    pre.validate();
    sw.validate();
    post.validate();
    if (pre.kind != PhaseKind::PreSwing || sw.kind != PhaseKind::Swing || post.kind != PhaseKind::PostLanding)
      throw StructuralError("phase kinds must cycle pre-swing, swing, post-landing");
    if (sw.active_feet[0] != other(swing)) throw StructuralError("swing foot must alternate between steps");
    swing = other(swing);
  }
}

std::pair<Footstep, Footstep> initial_footsteps(const Terrain& terrain) {
  Footstep left, right;
  left.surface_index = terrain.start_surfaces.first;
  right.surface_index = terrain.start_surfaces.second;
  left.position = terrain.surface(left.surface_index).center();
  right.position = terrain.surface(right.surface_index).center();
  return {left, right};
}

namespace {

int state_dim_of(Fidelity f) { return f == Fidelity::Full ? 9 : 6; }

struct Placement {
  bool is_var = false;
  Vec3 position = Vec3::Zero();  // when constant
  int footstep = -1;             // when variable
  int surface = -1;
  Mat3 rotation = Mat3::Identity();  // zero-yaw orientation on the surface
};

class Builder {
 public:
  Builder(const HorizonSpec& horizon, const Terrain& terrain, const HorizonContext& context,
          const std::vector<StepModel>& models, const TranscriptionOptions& options, const LgGuidance* guidance)
      : horizon_(horizon),
        terrain_(terrain),
        ctx_(context),
        models_(models),
        opt_(options),
        guidance_(guidance) {}

  TranscribedProblem build();

 private:
  void check_inputs() const;
  void plan_structure();
  void allocate();
  void emit();

  Expr sx(int knot, int comp) { return p_.pool.var(p_.structure.state_knots[knot].offset + comp); }
  Expr force(const PhaseStructure& ph, int interval_knot, int contact, int axis) {
    return p_.pool.var(ph.control_offsets[interval_knot] + 3 * contact + axis);
  }
  Expr contact_pos(const ContactDescriptor& c, int axis) {
    if (c.is_constant) return p_.pool.constant(c.position(axis));
    const Expr v = p_.pool.var(p_.structure.footstep_offsets[c.footstep] + axis);
    return c.offset(axis) == 0.0 ? v : v + c.offset(axis);
  }
  Expr placement_pos(const Placement& pl, int axis) {
    if (!pl.is_var) return p_.pool.constant(pl.position(axis));
    return p_.pool.var(p_.structure.footstep_offsets[pl.footstep] + axis);
  }
  Expr lincomb(const Vec3& w, const std::array<Expr, 3>& v) {
    Expr acc;
    for (int j = 0; j < 3; ++j) {
      if (w(j) == 0.0) continue;
      const Expr term = p_.pool.scale(w(j), v[j]);
      acc = acc.valid() ? acc + term : term;
    }
    return acc.valid() ? acc : p_.pool.constant(0.0);
  }
  Expr duration_expr(int phase) {
    const PhaseStructure& ph = p_.structure.phases[phase];
    return ph.duration_var >= 0 ? p_.pool.var(ph.duration_var) : p_.pool.constant(ph.duration_fixed);
  }

  void add_eq(Expr e, ConvexityTag tag, ConstraintFamily fam, int phase = -1, int knot = -1) {
    p_.equalities.push_back({e.id(), tag, fam, static_cast<std::int16_t>(phase), static_cast<std::int16_t>(knot)});
  }
  void add_ineq(Expr e, ConvexityTag tag, ConstraintFamily fam, int phase = -1, int knot = -1) {
    p_.inequalities.push_back({e.id(), tag, fam, static_cast<std::int16_t>(phase), static_cast<std::int16_t>(knot)});
  }
  void add_cost(Expr e) { cost_ = cost_.valid() ? cost_ + e : e; }

  const HorizonSpec& horizon_;
  const Terrain& terrain_;
  const HorizonContext& ctx_;
  const std::vector<StepModel>& models_;
  const TranscriptionOptions& opt_;
  const LgGuidance* guidance_;

  TranscribedProblem p_;
  Expr cost_;
  std::vector<std::array<Placement, 2>> placements_before_step_;  // [step][Left/Right]
  std::vector<Placement> landing_placement_;                      // [step]
};

void Builder::check_inputs() const {
  horizon_.validate();
  terrain_.validate();
  if (static_cast<int>(ctx_.step_surfaces.size()) < horizon_.steps) {
    throw StructuralError("terrain provides no surface for horizon step " +
                          std::to_string(ctx_.step_surfaces.size()));
  }
  if (static_cast<int>(models_.size()) != horizon_.steps)
    throw StructuralError("one StepModel is required per horizon step");
  if (ctx_.swing_first != horizon_.swing_first)
    throw StructuralError("context swing foot does not match the horizon");
  for (int i = 0; i < horizon_.steps; ++i) terrain_.surface(ctx_.step_surfaces[i]);
  if (guidance_) {
    if (horizon_.steps != 1) throw StructuralError("guided problems cover exactly one step");
    if (guidance_->epsilon < 0.0) throw StructuralError("timing slack epsilon must be >= 0");
    if (!(guidance_->t_tilde[0] > 0.0 && guidance_->t_tilde[1] > guidance_->t_tilde[0] &&
          guidance_->t_tilde[2] > guidance_->t_tilde[1]))
      throw StructuralError("predicted timings must be positive and increasing");
  }
  for (int i = 0; i < horizon_.steps; ++i) {
    if (!models_[i].fixed_timing) continue;
    for (double d : models_[i].phase_durations)
      if (!(d > 0.0)) throw StructuralError("fixed phase durations must be positive");
  }
  if (models_[0].fidelity != Fidelity::Full && horizon_.steps > 1)
    throw StructuralError("relaxed fidelity before the end of the execution horizon");
}

void Builder::plan_structure() {
  const int n_k = horizon_.knots_per_phase;
  auto& st = p_.structure;
  st.t_max = horizon_.effective_t_max();
  st.mass = opt_.robot.mass;
  st.gravity = opt_.robot.gravity;
  st.swing_first = ctx_.swing_first;

  // foot placements as steps land
  std::array<Placement, 2> current;
  const auto init_placement = [&](const Footstep& f) {
    Placement pl;
    pl.is_var = false;
    pl.position = f.position;
    pl.surface = f.surface_index;
    pl.rotation = surface_rotation(terrain_.surface(f.surface_index));
    return pl;
  };
  current[0] = init_placement(ctx_.left);
  current[1] = init_placement(ctx_.right);

  Foot swing = ctx_.swing_first;
  for (int i = 0; i < horizon_.steps; ++i) {
    placements_before_step_.push_back(current);
    Placement landing;
    landing.is_var = true;
    landing.footstep = i;
    landing.surface = ctx_.step_surfaces[i];
    landing.rotation = surface_rotation(terrain_.surface(landing.surface));
    landing_placement_.push_back(landing);
    st.footstep_surfaces.push_back(landing.surface);
    current[swing == Foot::Left ? 0 : 1] = landing;
    swing = other(swing);
  }

  const auto contacts_for = [&](const Placement& pl, Foot foot, Fidelity fid) {
    std::vector<ContactDescriptor> out;
    ContactDescriptor base;
    base.foot = foot;
    base.surface = pl.surface;
    base.is_constant = !pl.is_var;
    base.footstep = pl.footstep;
    if (fid == Fidelity::PontonPoint) {
      base.corner = -1;
      base.position = pl.position;
      base.offset = Vec3::Zero();
      out.push_back(base);
      return out;
    }
    const auto corners = opt_.robot.foot.local_corners();
    for (int c = 0; c < 4; ++c) {
      ContactDescriptor d = base;
      d.corner = c;
      d.offset = pl.rotation * corners[c];
      d.position = pl.position + d.offset;
      out.push_back(d);
    }
    return out;
  };

  swing = ctx_.swing_first;
  for (int i = 0; i < horizon_.steps; ++i) {
    const StepModel& model = models_[i];
    const Foot stance = other(swing);
    const auto& before = placements_before_step_[i];
    const Placement& landing = landing_placement_[i];
    for (int r = 0; r < 3; ++r) {
      PhaseStructure ph;
      ph.spec = horizon_.phases[3 * i + r];
      ph.fidelity = model.fidelity;
      ph.step = i;
      ph.state_dim = state_dim_of(model.fidelity);
      ph.first_knot = (3 * i + r) * n_k;
      ph.landing_surface = landing.surface;
      ph.duration_var = -1;
      ph.duration_fixed = model.fixed_timing ? model.phase_durations[r] : 0.0;
      const auto add_foot = [&](const Placement& pl, Foot f) {
        auto cs = contacts_for(pl, f, model.fidelity);
        ph.contacts.insert(ph.contacts.end(), cs.begin(), cs.end());
      };
      if (ph.spec.kind == PhaseKind::PreSwing) {
        add_foot(before[0], Foot::Left);
        add_foot(before[1], Foot::Right);
      } else if (ph.spec.kind == PhaseKind::Swing) {
        add_foot(before[stance == Foot::Left ? 0 : 1], stance);
      } else {
        // post-landing: stance foot plus the newly landed swing foot
        const Placement& l = swing == Foot::Left ? landing : before[0];
        const Placement& r2 = swing == Foot::Right ? landing : before[1];
        add_foot(l, Foot::Left);
        add_foot(r2, Foot::Right);
      }
      st.phases.push_back(std::move(ph));
    }
    swing = other(swing);
  }
}

void Builder::allocate() {
  const int n_k = horizon_.knots_per_phase;
  const int n_ph = 3 * horizon_.steps;
  auto& st = p_.structure;

  // state knots: shared phase boundaries; dim is the max over covering phases
  const int n_knots = n_ph * n_k + 1;
  std::vector<int> dims(n_knots, 0);
  for (int q = 0; q < n_ph; ++q)
    for (int k = 0; k <= n_k; ++k)
      dims[q * n_k + k] = std::max(dims[q * n_k + k], st.phases[q].state_dim);
  int cursor = 0;
  for (int g = 0; g < n_knots; ++g) {
    st.state_knots.push_back({cursor, dims[g]});
    cursor += dims[g];
  }
  const int x_len = cursor;

  for (int q = 0; q < n_ph; ++q) {
    auto& ph = st.phases[q];
    for (int k = 0; k < n_k; ++k) {
      ph.control_offsets.push_back(cursor);
      cursor += static_cast<int>(ph.contacts.size()) * 3;
    }
  }
  const int u_len = cursor - x_len;

  for (int i = 0; i < horizon_.steps; ++i) {
    st.footstep_offsets.push_back(cursor);
    cursor += 3;
  }
  const int p_len = 3 * horizon_.steps;

  int t_len = 0;
  for (int q = 0; q < n_ph; ++q) {
    if (!models_[st.phases[q].step].fixed_timing) {
      st.phases[q].duration_var = cursor;
      ++cursor;
      ++t_len;
    }
  }

  int psi_len = 0;
  for (int q = 0; q < n_ph; ++q) {
    auto& ph = st.phases[q];
    if (ph.fidelity != Fidelity::PontonRectangular && ph.fidelity != Fidelity::PontonPoint) continue;
    for (int k = 0; k < n_k; ++k) {
      for (int c = 0; c < static_cast<int>(ph.contacts.size()); ++c) {
        for (int axis = 0; axis < 3; ++axis) {
          // (p - com) x f, component `axis` = a[axis+1]*f[axis+2] - a[axis+2]*f[axis+1]
          const int a1 = (axis + 1) % 3;
          const int a2 = (axis + 2) % 3;
          ph.cells.push_back({cursor, cursor + 1, c, a1, a2, 1.0, k});
          cursor += 2;
          ph.cells.push_back({cursor, cursor + 1, c, a2, a1, -1.0, k});
          cursor += 2;
          psi_len += 4;
        }
      }
    }
  }

  p_.num_vars = cursor;
  p_.layout = {{"X", 0, x_len},
               {"U", x_len, u_len},
               {"P", x_len + u_len, p_len},
               {"T", x_len + u_len + p_len, t_len},
               {"PSI", x_len + u_len + p_len + t_len, psi_len}};

  p_.lower = Eigen::VectorXd::Constant(p_.num_vars, -kInfinity);
  p_.upper = Eigen::VectorXd::Constant(p_.num_vars, kInfinity);
  const double f_bound = opt_.force_bound_factor * opt_.robot.mass * opt_.robot.gravity.norm();
  for (int i = x_len; i < x_len + u_len; ++i) {
    p_.lower(i) = -f_bound;
    p_.upper(i) = f_bound;
  }
  const double min_duration = horizon_.knots_per_phase * opt_.min_knot_duration;
  for (int q = 0; q < 3 * horizon_.steps; ++q) {
    const int dv = st.phases[q].duration_var;
    if (dv >= 0) {
      p_.lower(dv) = min_duration;
      p_.upper(dv) = st.t_max;
    }
  }
  for (int i = p_.num_vars - psi_len; i < p_.num_vars; ++i) p_.lower(i) = 0.0;

  if (guidance_)
    for (int r = 0; r < 3; ++r)
      if (st.phases[r].duration_var < 0) throw StructuralError("guided problems require free timings");
}

void Builder::emit() {
  auto& pool = p_.pool;
  auto& st = p_.structure;
  const int n_k = horizon_.knots_per_phase;
  const int n_ph = 3 * horizon_.steps;
  const double inv_m = 1.0 / opt_.robot.mass;

  // initial state
  const Vec9 x0 = ctx_.x_init.flatten();
  for (int j = 0; j < st.state_knots[0].dim; ++j)
    add_eq(sx(0, j) - x0(j), ConvexityTag::Affine, ConstraintFamily::InitialState, 0, 0);

  // footstep surface containment and reachability
  Foot swing = ctx_.swing_first;
  for (int i = 0; i < horizon_.steps; ++i) {
    const ContactSurface& surf = terrain_.surface(ctx_.step_surfaces[i]);
    const SurfaceHalfplanes hp = surface_to_halfplanes(surf);
    const std::array<Expr, 3> pvar{pool.var(st.footstep_offsets[i]), pool.var(st.footstep_offsets[i] + 1),
                                   pool.var(st.footstep_offsets[i] + 2)};
    add_eq(lincomb(hp.d, pvar) - hp.e, ConvexityTag::Affine, ConstraintFamily::SurfacePlane, 3 * i);
    for (int r = 0; r < 4; ++r)
      add_ineq(lincomb(hp.S.row(r).transpose(), pvar) - hp.s(r), ConvexityTag::Affine,
               ConstraintFamily::SurfaceBounds, 3 * i);

    const Placement& prev = placements_before_step_[i][swing == Foot::Left ? 1 : 0];
    const KinematicPolytope reach = opt_.kinematics.reach_polytope(swing);
    std::array<Expr, 3> rel;
    for (int j = 0; j < 3; ++j) rel[j] = pvar[j] - placement_pos(prev, j);
    for (int r = 0; r < reach.size(); ++r) {
      const Vec3 w = prev.rotation * reach.rows.row(r).transpose();
      add_ineq(lincomb(w, rel) - reach.offsets(r), ConvexityTag::Affine, ConstraintFamily::Reachability, 3 * i);
    }
    swing = other(swing);
  }

  // switch times are cumulative sums of the duration variables; only the
  // total-duration cap (and any guidance windows) need rows
  std::vector<Expr> t_end(n_ph);
  bool any_free_duration = false;
  for (int q = 0; q < n_ph; ++q) {
    t_end[q] = q == 0 ? duration_expr(q) : t_end[q - 1] + duration_expr(q);
    any_free_duration = any_free_duration || st.phases[q].duration_var >= 0;
  }
  if (any_free_duration)
    add_ineq(t_end[n_ph - 1] - st.t_max, ConvexityTag::Affine, ConstraintFamily::Timing, n_ph - 1);
  if (guidance_) {
    for (int r = 0; r < 3; ++r) {
      const double lo = (1.0 - guidance_->epsilon) * guidance_->t_tilde[r];
      const double hi = (1.0 + guidance_->epsilon) * guidance_->t_tilde[r];
      add_ineq(pool.constant(lo) - t_end[r], ConvexityTag::Affine, ConstraintFamily::Timing, r);
      add_ineq(t_end[r] - hi, ConvexityTag::Affine, ConstraintFamily::Timing, r);
    }
  }

  // per-phase dynamics, friction, trust regions, CoM polytopes, running cost
  for (int q = 0; q < n_ph; ++q) {
    const PhaseStructure& ph = st.phases[q];
    const bool full = ph.fidelity == Fidelity::Full;
    const bool ponton = ph.fidelity == Fidelity::PontonRectangular || ph.fidelity == Fidelity::PontonPoint;
    const bool timing_free = ph.duration_var >= 0;
    const Expr tau = pool.scale(1.0 / n_k, duration_expr(q));
    const ConvexityTag dyn_tag = timing_free ? ConvexityTag::Nonconvex : ConvexityTag::Affine;
    const int nc = static_cast<int>(ph.contacts.size());

    for (int k = 0; k < n_k; ++k) {
      const int g = ph.first_knot + k;

      std::vector<std::array<Expr, 3>> f(nc);
      for (int c = 0; c < nc; ++c)
        for (int j = 0; j < 3; ++j) f[c][j] = force(ph, k, c, j);

      // com acceleration from forces: (1/m) sum f - g
      std::array<Expr, 3> accel;
      for (int j = 0; j < 3; ++j) {
        Expr s = f[0][j];
        for (int c = 1; c < nc; ++c) s = s + f[c][j];
        accel[j] = pool.scale(inv_m, s) - opt_.robot.gravity(j);
      }

      // forward Euler: positions and velocities
      for (int j = 0; j < 3; ++j) {
        add_eq((sx(g + 1, j) - sx(g, j)) - tau * sx(g, 3 + j), dyn_tag, ConstraintFamily::Dynamics, q, k);
        add_eq((sx(g + 1, 3 + j) - sx(g, 3 + j)) - tau * accel[j], dyn_tag, ConstraintFamily::Dynamics, q, k);
      }

      std::vector<std::array<Expr, 3>> lever(nc);
      if (full || ponton) {
        for (int c = 0; c < nc; ++c)
          for (int j = 0; j < 3; ++j) lever[c][j] = contact_pos(ph.contacts[c], j) - sx(g, j);
      }

      if (full) {
        // angular momentum: L+ = L + tau * sum (p - c) x f
        for (int j = 0; j < 3; ++j) {
          const int j1 = (j + 1) % 3;
          const int j2 = (j + 2) % 3;
          Expr moment;
          for (int c = 0; c < nc; ++c) {
            const Expr m = lever[c][j1] * f[c][j2] - lever[c][j2] * f[c][j1];
            moment = moment.valid() ? moment + m : m;
          }
          add_eq((sx(g + 1, 6 + j) - sx(g, 6 + j)) - tau * moment, ConvexityTag::Nonconvex,
                 ConstraintFamily::Dynamics, q, k);
        }
      }

      // linearized friction cone in each contact's surface frame
      for (int c = 0; c < nc; ++c) {
        const ContactSurface& surf = terrain_.surface(ph.contacts[c].surface);
        const double mu = surf.friction;
        const Expr fn = lincomb(surf.unit_normal, f[c]);
        const Expr mu_fn = pool.scale(mu, fn);
        for (const Vec3& tangent : {Vec3(surf.border1().normalized()), Vec3(surf.border2().normalized())}) {
          const Expr ft = lincomb(tangent, f[c]);
          add_ineq(ft - mu_fn, ConvexityTag::Affine, ConstraintFamily::FrictionCone, q, k);
          add_ineq((-ft) - mu_fn, ConvexityTag::Affine, ConstraintFamily::FrictionCone, q, k);
        }
      }

      Expr psi_sum;
      if (ponton) {
        for (const PsiCell& cell : ph.cells) {
          if (cell.knot != k) continue;
          const Expr alpha = lever[cell.contact][cell.lever_axis];
          const Expr beta = f[cell.contact][cell.force_axis];
          relax_bilinear(p_, alpha, beta, cell.psi_plus, cell.psi_minus, q, k);
          const Expr pair = pool.var(cell.psi_plus) + pool.var(cell.psi_minus);
          psi_sum = psi_sum.valid() ? psi_sum + pair : pair;
        }
      }

      // running cost for this interval
      Expr base;
      {
        Expr acc2 = square(accel[0]) + square(accel[1]) + square(accel[2]);
        base = pool.scale(opt_.accel_weight, acc2);
        if (full) {
          const Expr l2 = square(sx(g, 6)) + square(sx(g, 7)) + square(sx(g, 8));
          base = base + pool.scale(opt_.momentum_weight, l2);
        }
        if (ponton && psi_sum.valid()) base = base + pool.scale(opt_.psi_weight, psi_sum);
      }
      add_cost(tau * base);
    }

    // CoM kinematic polytope at every knot of the phase, per active foot
    const KinematicPolytope com_box = opt_.kinematics.com_polytope();
    std::vector<const ContactDescriptor*> feet;
    for (const ContactDescriptor& c : ph.contacts)
      if (c.corner <= 0) feet.push_back(&c);  // corner 0 or point contact: one entry per foot
    for (int k = 0; k <= n_k; ++k) {
      const int g = ph.first_knot + k;
      for (const ContactDescriptor* foot : feet) {
        // foot center: corner-0 contacts carry an offset, remove it
        const Mat3 rot = foot->is_constant
                             ? surface_rotation(terrain_.surface(foot->surface))
                             : landing_placement_[foot->footstep].rotation;
        std::array<Expr, 3> rel;
        for (int j = 0; j < 3; ++j) {
          Expr center = foot->is_constant
                            ? pool.constant(foot->position(j) - foot->offset(j))
                            : Expr(pool.var(st.footstep_offsets[foot->footstep] + j));
          rel[j] = sx(g, j) - center;
        }
        for (int r = 0; r < com_box.size(); ++r) {
          const Vec3 w = rot * com_box.rows.row(r).transpose();
          add_ineq(lincomb(w, rel) - com_box.offsets(r), ConvexityTag::Affine, ConstraintFamily::ComPolytope,
                   q, k);
        }
      }
    }
  }

  // terminal cost
  const KnotRef terminal = st.state_knots.back();
  const int terminal_knot = static_cast<int>(st.state_knots.size()) - 1;
  Expr term;
  if (guidance_) {
    const Vec9 target = guidance_->x_star.flatten();
    for (int j = 0; j < terminal.dim; ++j) {
      const Expr d = square(sx(terminal_knot, j) - target(j));
      term = term.valid() ? term + d : d;
    }
    for (int j = 0; j < 3; ++j)
      term = term + square(pool.var(st.footstep_offsets[0] + j) - guidance_->p_star(j));
  } else {
    const Vec9 goal = ctx_.x_goal.flatten();
    for (int j = 0; j < terminal.dim; ++j) {
      const Expr d = square(sx(terminal_knot, j) - goal(j));
      term = term.valid() ? term + d : d;
    }
  }
  add_cost(pool.scale(opt_.terminal_weight, term));

  p_.cost_root = cost_.id();
}

TranscribedProblem Builder::build() {
  check_inputs();
  plan_structure();
  allocate();
  emit();
  p_.validate();
  return std::move(p_);
}

}  // namespace

TranscribedProblem build_horizon_problem(const HorizonSpec& horizon, const Terrain& terrain,
                                         const HorizonContext& context, const std::vector<StepModel>& models,
                                         const TranscriptionOptions& options, const LgGuidance* guidance) {
  Builder b(horizon, terrain, context, models, options, guidance);
  return b.build();
}

TranscribedProblem build_baseline(const HorizonSpec& horizon, const Terrain& terrain,
                                  const CentroidalState& x_init, const CentroidalState& x_goal,
                                  const TranscriptionOptions& options) {
  if (static_cast<int>(terrain.step_sequence.size()) < horizon.steps)
    throw StructuralError("terrain step sequence is missing surface for step " +
                          std::to_string(terrain.step_sequence.size()));
  HorizonContext ctx;
  ctx.x_init = x_init;
  ctx.x_goal = x_goal;
  std::tie(ctx.left, ctx.right) = initial_footsteps(terrain);
  ctx.step_surfaces.assign(terrain.step_sequence.begin(), terrain.step_sequence.begin() + horizon.steps);
  ctx.swing_first = horizon.swing_first;
  const std::vector<StepModel> models(horizon.steps, StepModel{});
  return build_horizon_problem(horizon, terrain, ctx, models, options);
}

// ---------------------------------------------------------------------------
// Plans

CentroidalState MotionPlan::terminal_state() const {
  return CentroidalState::unflatten(states.back().back());
}

Vec3 MotionPlan::contact_position(int phase, int contact) const {
  const ContactDescriptor& c = phases[phase].contacts[contact];
  if (c.is_constant) return c.position;
  return footsteps[c.footstep] + c.offset;
}

void MotionPlan::validate() const {
  if (states.size() != phases.size() || forces.size() != phases.size())
    throw StructuralError("plan phase arrays have inconsistent sizes");
  double prev = 0.0;
  for (double t : switch_times) {
    if (t + 1e-12 < prev) throw StructuralError("plan switch times are not monotone");
    prev = t;
  }
  if (t_max > 0.0 && !switch_times.empty() && switch_times.back() > t_max + 1e-9)
    throw StructuralError("plan exceeds the maximum duration");
  for (std::size_t q = 1; q < states.size(); ++q)
    if ((states[q].front() - states[q - 1].back()).head(6).norm() > 1e-12)
      throw StructuralError("phase boundary states are not continuous");
}

MotionPlan extract_plan(const TranscribedProblem& problem, std::span<const double> solution) {
  if (static_cast<int>(solution.size()) != problem.num_vars)
    throw StructuralError("solution length does not match the problem");
  const auto& st = problem.structure;
  MotionPlan plan;
  plan.phases = st.phases;
  plan.t_max = st.t_max;
  const int n_ph = static_cast<int>(st.phases.size());
  double t_prev = 0.0;
  for (int q = 0; q < n_ph; ++q) {
    const PhaseStructure& ph = st.phases[q];
    const int n_k = ph.spec.knot_count;
    std::vector<Vec9> xs;
    for (int k = 0; k <= n_k; ++k) {
      const KnotRef knot = st.state_knots[ph.first_knot + k];
      Vec9 x = Vec9::Zero();
      for (int j = 0; j < std::min(knot.dim, 9); ++j) x(j) = solution[knot.offset + j];
      xs.push_back(x);
    }
    plan.states.push_back(std::move(xs));

    std::vector<std::vector<Vec3>> fk;
    for (int k = 0; k < n_k; ++k) {
      std::vector<Vec3> fc;
      for (std::size_t c = 0; c < ph.contacts.size(); ++c) {
        const int off = ph.control_offsets[k] + 3 * static_cast<int>(c);
        fc.emplace_back(solution[off], solution[off + 1], solution[off + 2]);
      }
      fk.push_back(std::move(fc));
    }
    plan.forces.push_back(std::move(fk));

    const double duration = ph.duration_var >= 0 ? solution[ph.duration_var] : ph.duration_fixed;
    plan.switch_times.push_back(t_prev + duration);
    plan.tau.push_back(duration / n_k);
    t_prev += duration;
  }
  for (int i = 0; i < static_cast<int>(st.footstep_offsets.size()); ++i) {
    const int off = st.footstep_offsets[i];
    plan.footsteps.emplace_back(solution[off], solution[off + 1], solution[off + 2]);
  }
  return plan;
}

MotionPlan plan_prefix(const MotionPlan& plan, int steps) {
  const int n_ph = 3 * steps;
  if (n_ph > plan.phase_count()) throw StructuralError("plan prefix longer than the plan");
  MotionPlan out;
  out.phases.assign(plan.phases.begin(), plan.phases.begin() + n_ph);
  out.states.assign(plan.states.begin(), plan.states.begin() + n_ph);
  out.forces.assign(plan.forces.begin(), plan.forces.begin() + n_ph);
  out.switch_times.assign(plan.switch_times.begin(), plan.switch_times.begin() + n_ph);
  out.tau.assign(plan.tau.begin(), plan.tau.begin() + n_ph);
  out.footsteps.assign(plan.footsteps.begin(), plan.footsteps.begin() + std::min<std::size_t>(steps, plan.footsteps.size()));
  out.t_max = plan.t_max;
  return out;
}

// ---------------------------------------------------------------------------
// Initial guesses

namespace {

/// Fills the decision vector from semantic quantities; psi variables are set
/// at their tight lower bounds.
std::vector<double> encode_guess(const TranscribedProblem& problem, const std::vector<Vec9>& knot_states,
                                 const std::vector<std::vector<std::vector<Vec3>>>& phase_forces,
                                 const std::vector<Vec3>& footsteps, const std::vector<double>& switch_times) {
  const auto& st = problem.structure;
  std::vector<double> x(problem.num_vars, 0.0);
  for (std::size_t g = 0; g < st.state_knots.size(); ++g)
    for (int j = 0; j < st.state_knots[g].dim; ++j) x[st.state_knots[g].offset + j] = knot_states[g](j);
  double t_prev = 0.0;
  for (std::size_t q = 0; q < st.phases.size(); ++q) {
    const PhaseStructure& ph = st.phases[q];
    for (int k = 0; k < ph.spec.knot_count; ++k)
      for (std::size_t c = 0; c < ph.contacts.size(); ++c)
        for (int j = 0; j < 3; ++j) x[ph.control_offsets[k] + 3 * c + j] = phase_forces[q][k][c](j);
    if (ph.duration_var >= 0) x[ph.duration_var] = switch_times[q] - t_prev;
    t_prev = switch_times[q];
  }
  for (std::size_t i = 0; i < st.footstep_offsets.size(); ++i)
    for (int j = 0; j < 3; ++j) x[st.footstep_offsets[i] + j] = footsteps[i](j);

  for (std::size_t q = 0; q < st.phases.size(); ++q) {
    const PhaseStructure& ph = st.phases[q];
    for (const PsiCell& cell : ph.cells) {
      const ContactDescriptor& c = ph.contacts[cell.contact];
      const Vec3 pc = c.is_constant ? c.position : footsteps[c.footstep] + c.offset;
      const Vec9& xs = knot_states[ph.first_knot + cell.knot];
      const double alpha = pc(cell.lever_axis) - xs(cell.lever_axis);
      const double beta = phase_forces[q][cell.knot][cell.contact](cell.force_axis);
      x[cell.psi_plus] = (alpha + beta) * (alpha + beta);
      x[cell.psi_minus] = (alpha - beta) * (alpha - beta);
    }
  }
  return x;
}

}  // namespace

std::vector<double> default_initial_guess(const TranscribedProblem& problem, const Terrain& terrain,
                                          const HorizonContext& context, const TranscriptionOptions& options) {
  const auto& st = problem.structure;
  const int n_knots = static_cast<int>(st.state_knots.size());
  const Vec3 start = context.x_init.com;
  const Vec3 target =
      terrain.surface(st.footstep_surfaces.back()).center() + Vec3(0, 0, options.robot.nominal_com_height);

  std::vector<Vec9> knot_states(n_knots, Vec9::Zero());
  const double total_t = 0.3 * 3 * st.phases.size() / 3.0;  // uniform 0.3 s phases
  for (int g = 0; g < n_knots; ++g) {
    const double s = n_knots > 1 ? static_cast<double>(g) / (n_knots - 1) : 0.0;
    Vec9 x = Vec9::Zero();
    x.segment<3>(0) = start + s * (target - start);
    x.segment<3>(3) = (target - start) / std::max(total_t, 1e-6);
    knot_states[g] = x;
  }
  knot_states[0] = context.x_init.flatten();

  std::vector<std::vector<std::vector<Vec3>>> forces;
  const double w = options.robot.mass * options.robot.gravity.norm();
  for (const PhaseStructure& ph : st.phases) {
    std::vector<std::vector<Vec3>> fk(ph.spec.knot_count);
    for (auto& fc : fk) fc.assign(ph.contacts.size(), Vec3(0, 0, w / ph.contacts.size()));
    forces.push_back(std::move(fk));
  }

  std::vector<Vec3> footsteps;
  for (int s : st.footstep_surfaces) footsteps.push_back(terrain.surface(s).center());

  std::vector<double> times;
  double t_prev = 0.0;
  for (const PhaseStructure& ph : st.phases) {
    t_prev += ph.duration_var >= 0 ? 0.3 : ph.duration_fixed;
    times.push_back(t_prev);
  }

  return encode_guess(problem, knot_states, forces, footsteps, times);
}

std::vector<double> shifted_warm_start(const TranscribedProblem& next_problem, const MotionPlan& previous,
                                       const Terrain& terrain, const HorizonContext& next_context,
                                       const TranscriptionOptions& options) {
  const auto& st = next_problem.structure;
  std::vector<double> base = default_initial_guess(next_problem, terrain, next_context, options);

  // re-decode the default guess into semantic arrays, then overwrite with the
  // shifted previous plan where it is available
  const int n_knots = static_cast<int>(st.state_knots.size());
  std::vector<Vec9> knot_states(n_knots, Vec9::Zero());
  for (int g = 0; g < n_knots; ++g)
    for (int j = 0; j < st.state_knots[g].dim; ++j) knot_states[g](j) = base[st.state_knots[g].offset + j];

  const int n_k = st.phases.front().spec.knot_count;
  const int shift_phases = 3;  // one executed step
  const double t_shift = previous.switch_times.size() >= 3 ? previous.switch_times[2] : 0.0;

  for (int g = 0; g < n_knots; ++g) {
    const int src_global = g + shift_phases * n_k;
    const int src_phase = std::min(src_global / n_k, previous.phase_count() - 1);
    if (src_global > previous.phase_count() * n_k) continue;  // past the previous horizon: keep default
    const int src_knot = src_global - src_phase * n_k;
    knot_states[g] = previous.states[src_phase][src_knot];
  }
  knot_states[0] = next_context.x_init.flatten();

  std::vector<std::vector<std::vector<Vec3>>> forces;
  std::vector<double> times;
  for (std::size_t q = 0; q < st.phases.size(); ++q) {
    const PhaseStructure& ph = st.phases[q];
    const int src_q = static_cast<int>(q) + shift_phases;
    std::vector<std::vector<Vec3>> fk(ph.spec.knot_count);
    for (int k = 0; k < ph.spec.knot_count; ++k) {
      fk[k].assign(ph.contacts.size(), Vec3::Zero());
      for (std::size_t c = 0; c < ph.contacts.size(); ++c) {
        const int off = ph.control_offsets[k] + 3 * static_cast<int>(c);
        fk[k][c] = Vec3(base[off], base[off + 1], base[off + 2]);
      }
      if (src_q < previous.phase_count()) {
        const PhaseStructure& src_ph = previous.phases[src_q];
        // map forces between foot models: split rectangular<-point, sum point<-rectangular
        for (std::size_t c = 0; c < ph.contacts.size(); ++c) {
          const ContactDescriptor& dst = ph.contacts[c];
          Vec3 f = Vec3::Zero();
          int matched = 0;
          for (std::size_t sc = 0; sc < src_ph.contacts.size(); ++sc) {
            if (src_ph.contacts[sc].foot != dst.foot) continue;
            f += previous.forces[src_q][k][sc];
            ++matched;
          }
          if (matched == 0) continue;
          const int dst_per_foot = dst.corner >= 0 ? 4 : 1;
          fk[k][c] = f / dst_per_foot;
        }
      }
    }
    forces.push_back(std::move(fk));

    double t_end = 0.0;
    if (ph.duration_var >= 0) {
      if (src_q < previous.phase_count())
        t_end = std::max(previous.switch_times[src_q] - t_shift, 0.05 * (q + 1));
      else
        t_end = (times.empty() ? 0.0 : times.back()) + 0.3;
    } else {
      t_end = (times.empty() ? 0.0 : times.back()) + ph.duration_fixed;
    }
    times.push_back(t_end);
  }
  for (std::size_t q = 1; q < times.size(); ++q) times[q] = std::max(times[q], times[q - 1] + 1e-3);

  std::vector<Vec3> footsteps;
  for (std::size_t i = 0; i < st.footstep_offsets.size(); ++i) {
    const std::size_t src = i + 1;
    if (src < previous.footsteps.size())
      footsteps.push_back(previous.footsteps[src]);
    else
      footsteps.push_back(terrain.surface(st.footstep_surfaces[i]).center());
  }

  return encode_guess(next_problem, knot_states, forces, footsteps, times);
}

std::vector<double> encode_plan(const TranscribedProblem& problem, const MotionPlan& plan) {
  const auto& st = problem.structure;
  if (plan.phase_count() != static_cast<int>(st.phases.size()))
    throw StructuralError("plan and problem phase counts differ");
  const int n_knots = static_cast<int>(st.state_knots.size());
  std::vector<Vec9> knot_states(n_knots, Vec9::Zero());
  for (std::size_t q = 0; q < st.phases.size(); ++q) {
    const PhaseStructure& ph = st.phases[q];
    for (int k = 0; k <= ph.spec.knot_count; ++k) knot_states[ph.first_knot + k] = plan.states[q][k];
  }

  std::vector<std::vector<std::vector<Vec3>>> forces;
  std::vector<double> times;
  for (std::size_t q = 0; q < st.phases.size(); ++q) {
    const PhaseStructure& ph = st.phases[q];
    const PhaseStructure& src_ph = plan.phases[q];
    std::vector<std::vector<Vec3>> fk(ph.spec.knot_count);
    for (int k = 0; k < ph.spec.knot_count; ++k) {
      fk[k].assign(ph.contacts.size(), Vec3::Zero());
      for (std::size_t c = 0; c < ph.contacts.size(); ++c) {
        const ContactDescriptor& dst = ph.contacts[c];
        Vec3 f = Vec3::Zero();
        int matched = 0;
        for (std::size_t sc = 0; sc < src_ph.contacts.size(); ++sc) {
          if (src_ph.contacts[sc].foot != dst.foot) continue;
          if (dst.corner >= 0 && src_ph.contacts[sc].corner >= 0) {
            if (src_ph.contacts[sc].corner == dst.corner) {
              f = plan.forces[q][k][sc];
              matched = 1;
            }
            continue;
          }
          f += plan.forces[q][k][sc];
          ++matched;
        }
        if (matched == 0) continue;
        fk[k][c] = dst.corner >= 0 && src_ph.contacts.front().corner < 0 ? f / 4.0 : f;
      }
    }
    forces.push_back(std::move(fk));
    times.push_back(plan.switch_times[q]);
  }
  return encode_guess(problem, knot_states, forces, plan.footsteps, times);
}

// ---------------------------------------------------------------------------
// Dynamics and residuals

CentroidalState dynamics_step(const CentroidalState& x, const std::vector<Vec3>& forces,
                              const std::vector<Vec3>& contact_points, double tau, double mass,
                              const Vec3& gravity) {
  if (forces.size() != contact_points.size())
    throw StructuralError("dynamics_step: forces and contact points differ in length");
  if (!(tau > 0.0)) throw StructuralError("dynamics_step: time step must be positive");
  CentroidalState out;
  Vec3 f_sum = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  for (std::size_t c = 0; c < forces.size(); ++c) {
    f_sum += forces[c];
    moment += (contact_points[c] - x.com).cross(forces[c]);
  }
  out.com = x.com + tau * x.com_velocity;
  out.com_velocity = x.com_velocity + tau * (f_sum / mass - gravity);
  out.angular_momentum = x.angular_momentum + tau * moment;
  return out;
}

double ResidualReport::max() const {
  return std::max({dynamics, friction, polytope, surface, timing});
}

ResidualReport evaluate_residuals(const MotionPlan& plan, const Terrain& terrain, double mass,
                                  const Vec3& gravity, const KinematicConfig& kinematics,
                                  double min_knot_duration) {
  ResidualReport rep;
  const int n_ph = plan.phase_count();

  double t_prev = 0.0;
  for (int q = 0; q < n_ph; ++q) {
    const PhaseStructure& ph = plan.phases[q];
    const int n_k = ph.spec.knot_count;
    const double tau = plan.tau[q];
    const bool full = ph.fidelity == Fidelity::Full;

    std::vector<Vec3> points(ph.contacts.size());
    for (std::size_t c = 0; c < ph.contacts.size(); ++c) points[c] = plan.contact_position(q, static_cast<int>(c));

    for (int k = 0; k < n_k; ++k) {
      const CentroidalState x = CentroidalState::unflatten(plan.states[q][k]);
      const CentroidalState pred = dynamics_step(x, plan.forces[q][k], points, tau, mass, gravity);
      const Vec9 next = plan.states[q][k + 1];
      const Vec9 dv = pred.flatten() - next;
      double err = dv.head(6).cwiseAbs().maxCoeff();
      if (full) err = std::max(err, dv.tail(3).cwiseAbs().maxCoeff());
      rep.dynamics = std::max(rep.dynamics, err);

      for (std::size_t c = 0; c < ph.contacts.size(); ++c) {
        const ContactSurface& surf = terrain.surface(ph.contacts[c].surface);
        const Vec3& f = plan.forces[q][k][c];
        const double fn = surf.unit_normal.dot(f);
        const double mu_fn = surf.friction * fn;
        for (const Vec3& tangent : {Vec3(surf.border1().normalized()), Vec3(surf.border2().normalized())}) {
          const double ft = tangent.dot(f);
          rep.friction = std::max({rep.friction, ft - mu_fn, -ft - mu_fn});
        }
      }
    }

    // CoM polytope at each knot, per active foot
    const KinematicPolytope com_box = kinematics.com_polytope();
    for (int k = 0; k <= n_k; ++k) {
      const Vec3 com = plan.states[q][k].head<3>();
      for (std::size_t c = 0; c < ph.contacts.size(); ++c) {
        const ContactDescriptor& cd = ph.contacts[c];
        if (cd.corner > 0) continue;  // once per foot
        const Vec3 foot_center = plan.contact_position(q, static_cast<int>(c)) - cd.offset;
        const Mat3 rot = surface_rotation(terrain.surface(cd.surface));
        rep.polytope = std::max(rep.polytope, com_box.max_violation(rot.transpose() * (com - foot_center)));
      }
    }

    const double t_end = plan.switch_times[q];
    rep.timing = std::max(rep.timing, (t_prev + ph.spec.knot_count * min_knot_duration) - t_end);
    t_prev = t_end;
  }
  if (plan.t_max > 0.0 && !plan.switch_times.empty())
    rep.timing = std::max(rep.timing, plan.switch_times.back() - plan.t_max);
  rep.timing = std::max(rep.timing, 0.0);

  // footstep surface containment and step-to-step reachability
  struct FootPlace {
    Vec3 pos = Vec3::Zero();
    int surface = -1;
    bool valid = false;
  };
  std::array<FootPlace, 2> prev;  // [Left, Right]
  if (!plan.phases.empty()) {
    for (const ContactDescriptor& c : plan.phases[0].contacts) {
      if (c.corner > 0 || !c.is_constant) continue;
      auto& fp = prev[c.foot == Foot::Left ? 0 : 1];
      fp = {c.position - c.offset, c.surface, true};
    }
  }
  for (std::size_t i = 0; i < plan.footsteps.size(); ++i) {
    const Foot swing = other(plan.phases[3 * i + 1].spec.active_feet[0]);
    const int surf_idx = plan.phases[3 * i].landing_surface;
    const ContactSurface& surf = terrain.surface(surf_idx);
    const SurfaceDistance sd = surface_distance(surf, plan.footsteps[i]);
    rep.surface = std::max({rep.surface, std::abs(sd.plane), sd.boundary});
    const FootPlace& stance_place = prev[swing == Foot::Left ? 1 : 0];
    if (stance_place.valid) {
      const Mat3 rot = surface_rotation(terrain.surface(stance_place.surface));
      const KinematicPolytope reach = kinematics.reach_polytope(swing);
      rep.polytope = std::max(
          rep.polytope, reach.max_violation(rot.transpose() * (plan.footsteps[i] - stance_place.pos)));
    }
    prev[swing == Foot::Left ? 0 : 1] = {plan.footsteps[i], surf_idx, true};
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Swing spline

SwingSpline::SwingSpline(const Vec3& p_from, const Vec3& p_to, double clearance, double duration)
    : from_(p_from), to_(p_to), duration_(duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("swing duration must be positive");
  apex_z_ = std::max(p_from.z(), p_to.z()) + clearance;
}

Vec3 SwingSpline::position(double t) const {
  const double u = std::clamp(t / duration_, 0.0, 1.0);
  const double s = u * u * (3.0 - 2.0 * u);
  Vec3 p = from_ + s * (to_ - from_);
  // two Hermite arcs through the apex, zero slope at both ends and the apex
  if (u <= 0.5) {
    const double v = 2.0 * u;
    const double h = v * v * (3.0 - 2.0 * v);
    p.z() = from_.z() + h * (apex_z_ - from_.z());
  } else {
    const double v = 2.0 * u - 1.0;
    const double h = v * v * (3.0 - 2.0 * v);
    p.z() = apex_z_ + h * (to_.z() - apex_z_);
  }
  return p;
}

std::vector<Vec3> SwingSpline::sample(int count) const {
  std::vector<Vec3> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(position(duration_ * i / (count - 1)));
  return out;
}

SwingSpline swing_spline(const Vec3& p_from, const Vec3& p_to, double clearance, double duration) {
  return SwingSpline(p_from, p_to, clearance, duration);
}

}  // namespace stride
