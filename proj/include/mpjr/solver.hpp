#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/CholmodSupport>

#include "mpjr/bulk_fem.hpp"
#include "mpjr/mpjr_element.hpp"

namespace mpjr {

// Bulk mesh plus interface layer with a fixed DOF numbering. Prescribed DOFs
// come from mesh.constraints and are eliminated from the linear solves.
class System {
 public:
  System(Mesh mesh, std::vector<MpjrElement> interface);

  const Mesh& mesh() const { return mesh_; }
  const std::vector<MpjrElement>& interface() const { return interface_; }
  int num_dofs() const { return num_dofs_; }
  int num_free() const { return static_cast<int>(free_dofs_.size()); }
  const std::vector<int>& free_dofs() const { return free_dofs_; }
  // Free index of a global DOF, or -1 when prescribed.
  int free_index(int dof) const { return free_index_[dof]; }

  const Eigen::SparseMatrix<double>& bulk_stiffness() const { return bulk_; }

  // Copies the prescribed values for far-field displacement u_bar into u.
  void apply_constraints(Eigen::VectorXd& u, double u_bar) const;

  struct Assembly {
    Eigen::VectorXd residual;                 // all DOFs; reactions on prescribed ones
    Eigen::SparseMatrix<double> tangent_free; // free-free block, fixed sparsity pattern
  };
  Assembly assemble(const Eigen::VectorXd& u, bool convex = false) const;

  // Full tangent over all DOFs (bulk + interface), for inspection and tests.
  Eigen::SparseMatrix<double> full_tangent(const Eigen::VectorXd& u) const;

  Eigen::VectorXd residual(const Eigen::VectorXd& u) const;
  Eigen::VectorXd free_part(const Eigen::VectorXd& full) const;

  // Stored bulk energy plus interface potential.
  double energy(const Eigen::VectorXd& u) const;

  // Sum of reactions on DOFs driven by u_bar (the indenter): positive = net attraction.
  double reaction_force(const Eigen::VectorXd& residual) const;
  // Sum of normal reactions on the fixed bottom DOFs.
  double support_force(const Eigen::VectorXd& residual) const;

  std::vector<GapState> interface_states(const Eigen::VectorXd& u) const;

 private:
  Mesh mesh_;
  std::vector<MpjrElement> interface_;
  int num_dofs_ = 0;
  std::vector<int> free_dofs_;
  std::vector<int> free_index_;
  Eigen::SparseMatrix<double> bulk_;
  Eigen::SparseMatrix<double> bulk_free_;
  std::vector<std::vector<int>> iface_dofs_;
};

struct SolverOptions {
  double tol_rel = 1e-8;
  double tol_abs = 1e-12;
  int max_iterations = 25;
  int max_depth = 10;
  bool continue_on_snap = true;
  // Energy-descent search for the post-jump equilibrium when Newton cannot
  // follow the path past a limit point.
  bool snap_relaxation = true;
  int snapshot_every = 0;
};

struct StepResult {
  bool converged = false;
  Eigen::VectorXd u;
  double u_bar = 0.0;         // far-field displacement actually reached
  int iterations = 0;         // Newton iterations summed over substeps
  int depth = 0;              // deepest bisection level used
  double residual_norm = 0.0; // free residual at exit
  bool snapped = false;       // equilibrium found by energy descent after a failure
};

class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, double residual_norm)
      : std::runtime_error(what), residual_norm_(residual_norm) {}
  double residual_norm() const noexcept { return residual_norm_; }

 private:
  double residual_norm_;
};

class NewtonSolver {
 public:
  NewtonSolver(const System& system, SolverOptions options);

  // Full Newton from `u_prev` (converged at u_bar_prev) to `u_bar_target`,
  // bisecting the increment on failure.
  StepResult solve_step(const Eigen::VectorXd& u_prev, double u_bar_prev,
                        double u_bar_target);

  // Plain Newton at fixed u_bar without substepping.
  StepResult newton(const Eigen::VectorXd& u_start, double u_bar);

  // Regularized Newton with an energy line search; converges to a local
  // minimum of the total energy at fixed u_bar.
  StepResult relax(const Eigen::VectorXd& u_start, double u_bar, double tolerance);

  const SolverOptions& options() const { return options_; }

 private:
  StepResult bisect(const Eigen::VectorXd& u_from, double from, double to, int depth);
  bool factorize(const Eigen::SparseMatrix<double>& k);

  const System& system_;
  SolverOptions options_;
  Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>> llt_;
  Eigen::Index pattern_nnz_ = -1;
};

struct Ramp {
  double target = 0.0;  // in units of LoadPath::unit_length
  int increments = 1;
  bool operator==(const Ramp&) const = default;
};

struct LoadPath {
  std::vector<Ramp> ramps;
  double unit_length = 1.0;  // typically h_rms
};

struct StepRecord {
  int step = 0;
  double pseudo_time = 0.0;
  double u_bar = 0.0;
  double u_bar_over_unit = 0.0;
  double reaction = 0.0;
  int iterations = 0;
  int depth = 0;
  bool snapped = false;
  int ramp = 0;
};

struct FailureRecord {
  double pseudo_time = 0.0;
  double u_bar = 0.0;
  double residual_norm = 0.0;
};

struct Snapshot {
  int step = 0;
  Eigen::VectorXd u;
};

struct RunHistory {
  std::vector<StepRecord> steps;
  std::vector<FailureRecord> failures;
  std::vector<Snapshot> snapshots;
  Eigen::VectorXd final_u;
};

class RunFailure : public std::runtime_error {
 public:
  RunFailure(const std::string& what, RunHistory history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const RunHistory& history() const noexcept { return history_; }

 private:
  RunHistory history_;
};

using StepCallback = std::function<void(const StepRecord&, const Eigen::VectorXd&)>;

/// Runs the ramps in order from u_bar = 0 and the undeformed state. Throws
/// RunFailure (carrying the partial history) when a step cannot be solved
/// and continue_on_snap is off.
RunHistory run(const System& system, const LoadPath& path, const SolverOptions& options,
               const StepCallback& on_step = {});

}  // namespace mpjr
