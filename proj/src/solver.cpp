#include "mpjr/solver.hpp"

#include <cmath>
#include <string>

#include "mpjr/errors.hpp"

namespace mpjr {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

System::System(Mesh mesh, std::vector<MpjrElement> interface)
    : mesh_(std::move(mesh)), interface_(std::move(interface)) {
  num_dofs_ = mesh_.num_dofs();

  std::vector<char> prescribed(num_dofs_, 0);
  for (const auto& c : mesh_.constraints) {
    if (c.dof < 0 || c.dof >= num_dofs_) throw DataError("constraint on unknown DOF");
    prescribed[c.dof] = 1;
  }
  free_index_.assign(num_dofs_, -1);
  for (int d = 0; d < num_dofs_; ++d) {
    if (!prescribed[d]) {
      free_index_[d] = static_cast<int>(free_dofs_.size());
      free_dofs_.push_back(d);
    }
  }
  if (free_dofs_.empty()) throw DataError("system has no free DOFs");

  std::vector<Triplet> full;
  std::vector<Triplet> reduced;
  for (int e = 0; e < static_cast<int>(mesh_.bulk_elements.size()); ++e) {
    const Eigen::MatrixXd ke = bulk_element_stiffness(mesh_, e);
    const auto dofs = element_dofs(mesh_, e);
    for (std::size_t a = 0; a < dofs.size(); ++a) {
      for (std::size_t b = 0; b < dofs.size(); ++b) {
        full.emplace_back(dofs[a], dofs[b], ke(a, b));
        const int fa = free_index_[dofs[a]];
        const int fb = free_index_[dofs[b]];
        if (fa >= 0 && fb >= 0) reduced.emplace_back(fa, fb, ke(a, b));
      }
    }
  }
  bulk_.resize(num_dofs_, num_dofs_);
  bulk_.setFromTriplets(full.begin(), full.end());
  bulk_free_.resize(num_free(), num_free());
  bulk_free_.setFromTriplets(reduced.begin(), reduced.end());

  iface_dofs_.reserve(interface_.size());
  for (const auto& el : interface_) iface_dofs_.push_back(element_dofs(el));
}

void System::apply_constraints(Eigen::VectorXd& u, double u_bar) const {
  for (const auto& c : mesh_.constraints) u[c.dof] = c.value + c.load_factor * u_bar;
}

Eigen::VectorXd System::residual(const Eigen::VectorXd& u) const {
  Eigen::VectorXd r = bulk_ * u;
  for (std::size_t e = 0; e < interface_.size(); ++e) {
    const auto& dofs = iface_dofs_[e];
    const auto resp = element_residual_tangent(interface_[e], gather(interface_[e], u));
    for (std::size_t a = 0; a < dofs.size(); ++a) r[dofs[a]] += resp.residual[a];
  }
  return r;
}

System::Assembly System::assemble(const Eigen::VectorXd& u, bool convex) const {
  Assembly out;
  out.residual = bulk_ * u;
  std::vector<Triplet> trip;
  std::size_t reserve = 0;
  for (const auto& d : iface_dofs_) reserve += d.size() * d.size();
  trip.reserve(reserve);
  for (std::size_t e = 0; e < interface_.size(); ++e) {
    const auto& dofs = iface_dofs_[e];
    const auto resp = element_residual_tangent(interface_[e], gather(interface_[e], u), convex);
    for (std::size_t a = 0; a < dofs.size(); ++a) {
      out.residual[dofs[a]] += resp.residual[a];
      const int fa = free_index_[dofs[a]];
      if (fa < 0) continue;
      for (std::size_t b = 0; b < dofs.size(); ++b) {
        const int fb = free_index_[dofs[b]];
        // Zero entries are kept so the sparsity pattern never changes.
        if (fb >= 0) trip.emplace_back(fa, fb, resp.tangent(a, b));
      }
    }
  }
  SpMat iface(num_free(), num_free());
  iface.setFromTriplets(trip.begin(), trip.end());
  out.tangent_free = bulk_free_ + iface;
  return out;
}

SpMat System::full_tangent(const Eigen::VectorXd& u) const {
  std::vector<Triplet> trip;
  for (std::size_t e = 0; e < interface_.size(); ++e) {
    const auto& dofs = iface_dofs_[e];
    const auto resp = element_residual_tangent(interface_[e], gather(interface_[e], u));
    for (std::size_t a = 0; a < dofs.size(); ++a) {
      for (std::size_t b = 0; b < dofs.size(); ++b) trip.emplace_back(dofs[a], dofs[b], resp.tangent(a, b));
    }
  }
  SpMat iface(num_dofs_, num_dofs_);
  iface.setFromTriplets(trip.begin(), trip.end());
  return bulk_ + iface;
}

Eigen::VectorXd System::free_part(const Eigen::VectorXd& full) const {
  Eigen::VectorXd f(num_free());
  for (int k = 0; k < num_free(); ++k) f[k] = full[free_dofs_[k]];
  return f;
}

double System::energy(const Eigen::VectorXd& u) const {
  double e = 0.5 * u.dot(bulk_ * u);
  for (const auto& el : interface_) e += element_energy(el, gather(el, u));
  return e;
}

double System::reaction_force(const Eigen::VectorXd& residual) const {
  double p = 0.0;
  for (const auto& c : mesh_.constraints) {
    if (c.load_factor != 0.0) p += c.load_factor * residual[c.dof];
  }
  return p;
}

double System::support_force(const Eigen::VectorXd& residual) const {
  const int n = mesh_.normal_axis();
  double p = 0.0;
  for (const auto& c : mesh_.constraints) {
    if (c.load_factor == 0.0 && c.dof / mesh_.dim < mesh_.num_bulk_nodes && c.dof % mesh_.dim == n) {
      p += residual[c.dof];
    }
  }
  return p;
}

std::vector<GapState> System::interface_states(const Eigen::VectorXd& u) const {
  std::vector<GapState> states;
  states.reserve(interface_.size());
  for (const auto& el : interface_) states.push_back(element_gap(el, gather(el, u)));
  return states;
}

NewtonSolver::NewtonSolver(const System& system, SolverOptions options)
    : system_(system), options_(options) {}

// Cholesky only: under displacement control a stable equilibrium has a
// positive definite free tangent, so failure flags a (possible) instability.
bool NewtonSolver::factorize(const SpMat& k) {
  if (k.nonZeros() != pattern_nnz_) {
    llt_.cholmod().print = 0;
    llt_.cholmod().quick_return_if_not_posdef = 1;
    llt_.analyzePattern(k);
    pattern_nnz_ = k.nonZeros();
  }
  llt_.factorize(k);
  return llt_.info() == Eigen::Success;
}

StepResult NewtonSolver::newton(const Eigen::VectorXd& u_start, double u_bar) {
  StepResult res;
  res.u = u_start;
  res.u_bar = u_bar;
  system_.apply_constraints(res.u, u_bar);

  auto asm_ = system_.assemble(res.u);
  Eigen::VectorXd r = system_.free_part(asm_.residual);
  const double r0 = r.norm();
  const double tol = options_.tol_abs + options_.tol_rel * r0;
  double e1 = -1.0;

  for (int it = 1; it <= options_.max_iterations; ++it) {
    res.iterations = it;
    if (!factorize(asm_.tangent_free)) break;
    const Eigen::VectorXd du = -llt_.solve(r);
    if (!du.allFinite()) break;
    const double e = std::abs(du.dot(r));
    if (e1 < 0.0) e1 = e;

    for (int k = 0; k < system_.num_free(); ++k) res.u[system_.free_dofs()[k]] += du[k];
    asm_ = system_.assemble(res.u);
    r = system_.free_part(asm_.residual);
    res.residual_norm = r.norm();

    if (!std::isfinite(res.residual_norm)) break;
    if (res.residual_norm <= tol) {
      res.converged = true;
      return res;
    }
    // Secondary guard: energy increment stagnated at roundoff level.
    if (it > 1 && e1 > 0.0 && e <= 1e-16 * e1 && res.residual_norm <= 1e3 * tol) {
      res.converged = true;
      return res;
    }
    if (res.residual_norm > 1e10 * std::max(r0, tol)) break;
  }
  res.converged = false;
  return res;
}

StepResult NewtonSolver::bisect(const Eigen::VectorXd& u_from, double from, double to,
                                int depth) {
  StepResult r = newton(u_from, to);
  r.depth = depth;
  if (r.converged) return r;
  const int spent = r.iterations;
  if (depth >= options_.max_depth) {
    r.u = u_from;
    r.u_bar = from;
    return r;
  }
  const double mid = 0.5 * (from + to);
  StepResult first = bisect(u_from, from, mid, depth + 1);
  first.iterations += spent;
  if (!first.converged) return first;
  StepResult second = bisect(first.u, mid, to, depth + 1);
  second.iterations += first.iterations;
  second.depth = std::max(first.depth, second.depth);
  return second;
}

StepResult NewtonSolver::relax(const Eigen::VectorXd& u_start, double u_bar, double tolerance) {
  StepResult res;
  res.u = u_start;
  res.u_bar = u_bar;
  system_.apply_constraints(res.u, u_bar);

  const auto& kb = system_.bulk_stiffness();
  double diag_scale = 0.0;
  for (int d : system_.free_dofs()) diag_scale += kb.coeff(d, d);
  diag_scale /= system_.num_free();
  SpMat shift(system_.num_free(), system_.num_free());
  shift.setIdentity();

  auto asm_ = system_.assemble(res.u);
  Eigen::VectorXd r = system_.free_part(asm_.residual);
  double energy = system_.energy(res.u);

  for (int it = 1; it <= 2000; ++it) {
    res.iterations = it;
    res.residual_norm = r.norm();
    if (res.residual_norm <= tolerance) {
      res.converged = true;
      return res;
    }

    // True tangent when positive definite (quadratic convergence near a
    // stable minimum), else the convexified one, shifted only if needed.
    bool ok = factorize(asm_.tangent_free);
    if (!ok) {
      const SpMat kc = system_.assemble(res.u, true).tangent_free;
      double mu = 0.0;
      for (int attempt = 0; attempt < 40 && !ok; ++attempt) {
        ok = factorize(mu == 0.0 ? kc : SpMat(kc + mu * diag_scale * shift));
        mu = mu == 0.0 ? 1e-10 : 10.0 * mu;
      }
    }
    if (!ok) break;

    const Eigen::VectorXd du = -llt_.solve(r);
    const double slope = r.dot(du);
    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial = res.u;
    for (int ls = 0; ls < 60; ++ls) {
      trial = res.u;
      for (int k = 0; k < system_.num_free(); ++k) trial[system_.free_dofs()[k]] += alpha * du[k];
      const double e_trial = system_.energy(trial);
      if (e_trial <= energy + 1e-4 * alpha * slope) {
        accepted = true;
        energy = e_trial;
        break;
      }
      // Near the minimum the energy test is lost in roundoff; accept any
      // full step that reduces the residual.
      if (ls == 0) {
        const double r_trial = system_.free_part(system_.residual(trial)).norm();
        if (r_trial < 0.5 * res.residual_norm) {
          accepted = true;
          energy = e_trial;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    res.u = trial;
    asm_ = system_.assemble(res.u);
    r = system_.free_part(asm_.residual);
  }
  res.residual_norm = r.norm();
  res.converged = res.residual_norm <= tolerance;
  return res;
}

StepResult NewtonSolver::solve_step(const Eigen::VectorXd& u_prev, double u_bar_prev,
                                    double u_bar_target) {
  StepResult r = bisect(u_prev, u_bar_prev, u_bar_target, 0);
  if (r.converged || !options_.snap_relaxation) return r;

  Eigen::VectorXd start = r.u;
  system_.apply_constraints(start, u_bar_target);
  const double r0 = system_.free_part(system_.residual(start)).norm();
  StepResult relaxed = relax(r.u, u_bar_target, options_.tol_abs + options_.tol_rel * r0);
  relaxed.iterations += r.iterations;
  relaxed.depth = r.depth;
  if (relaxed.converged) {
    relaxed.snapped = true;
    return relaxed;
  }
  return r;
}

RunHistory run(const System& system, const LoadPath& path, const SolverOptions& options,
               const StepCallback& on_step) {
  if (!(path.unit_length > 0.0)) throw DataError("load path unit length must be positive");
  for (const auto& ramp : path.ramps) {
    if (ramp.increments < 1) throw DataError("every ramp needs at least one increment");
  }

  NewtonSolver solver(system, options);
  RunHistory history;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(system.num_dofs());
  double u_bar = 0.0;
  int step = 0;

  for (std::size_t ri = 0; ri < path.ramps.size(); ++ri) {
    const Ramp& ramp = path.ramps[ri];
    const double start = u_bar;
    const double end = ramp.target * path.unit_length;
    for (int i = 1; i <= ramp.increments; ++i) {
      const double target = start + (end - start) * i / ramp.increments;
      const double time = static_cast<double>(ri) + static_cast<double>(i) / ramp.increments;
      StepResult res = solver.solve_step(u, u_bar, target);
      if (!res.converged) {
        history.failures.push_back({time, target, res.residual_norm});
        if (!options.continue_on_snap) {
          history.final_u = u;
          throw RunFailure("step at u_bar=" + std::to_string(target) +
                               " did not converge (residual " +
                               std::to_string(res.residual_norm) + ")",
                           std::move(history));
        }
        // Continue from the last equilibrium reached inside the step.
        u = res.u;
        u_bar = res.u_bar;
        continue;
      }
      u = std::move(res.u);
      u_bar = target;

      StepRecord rec;
      rec.step = ++step;
      rec.pseudo_time = time;
      rec.u_bar = u_bar;
      rec.u_bar_over_unit = u_bar / path.unit_length;
      rec.reaction = system.reaction_force(system.residual(u));
      rec.iterations = res.iterations;
      rec.depth = res.depth;
      rec.snapped = res.snapped;
      rec.ramp = static_cast<int>(ri);
      history.steps.push_back(rec);
      if (options.snapshot_every > 0 && rec.step % options.snapshot_every == 0) {
        history.snapshots.push_back({rec.step, u});
      }
      if (on_step) on_step(rec, u);
    }
  }
  history.final_u = u;
  return history;
}

}  // namespace mpjr
