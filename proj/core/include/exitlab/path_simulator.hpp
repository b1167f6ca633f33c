#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exitlab/geometry.hpp"
#include "exitlab/jump_kernel.hpp"
#include "exitlab/rng.hpp"
#include "exitlab/stats.hpp"

namespace exitlab {

enum class SmallJumpMode { Drop, GaussianSubstitute };

struct SimConfig {
  double epsilon_abs = 0.0;    // explicit cutoff; 0 selects radius * epsilon_rel
  double epsilon_rel = 1e-3;
  SmallJumpMode small_jump_mode = SmallJumpMode::Drop;
  double t_max_abs = 0.0;      // explicit horizon; 0 selects t_max_factor / L(radius)
  double t_max_factor = 1000.0;
  std::uint64_t master_seed = 1;
  std::int64_t n_paths = 10000;
  bool project_to_boundary = false;  // diagnostic: emulate boundary-supported exit laws
  unsigned max_threads = 0;
};

double effective_epsilon(const SimConfig& cfg, const Ball& ball);
double effective_t_max(const JumpKernel& kernel, const SimConfig& cfg, const Ball& ball);

struct ExitSample {
  Point start{};
  Ball ball;
  Point exit_position{};
  double exit_time = 0.0;
  std::int64_t n_jumps = 0;
  bool censored = false;
};

/// One exit trajectory.  Event-driven: Exp waiting times at the cutoff rate,
/// jump displacements above the cutoff, optional Brownian substitute for the
/// dropped small jumps, thinning in perturbed mode.  The stream is derived
/// from (master_seed, stream_tag, path_index), so paths are reproducible
/// under any scheduling.  A start outside the open ball exits immediately at
/// time zero (exit measures are Dirac there).
ExitSample simulate_exit(const JumpKernel& kernel, const Point& start, const Ball& ball,
                         const SimConfig& cfg, std::int64_t path_index,
                         std::uint64_t stream_tag = 0);

struct ExitTimeEstimate {
  MeanCI time;
  double censored_fraction = 0.0;
  bool valid = false;  // censored fraction <= 1%
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool bounds_checked = false;
  bool bounds_ok = false;
};

/// Mean exit time with a 99% CI; when sandwich = (lo, hi) is supplied the
/// estimate also reports whether the CI sits inside [lo, hi].
ExitTimeEstimate estimate_exit_time_mean(const JumpKernel& kernel, const Point& start,
                                         const Ball& ball, const SimConfig& cfg,
                                         std::optional<std::pair<double, double>> sandwich = {},
                                         std::uint64_t stream_tag = 0);

/// Test functions for the Dynkin check.  PsiComposite is f(y) = psi(|y-c|/r)
/// with psi(u) = u^2 - 2 on [-1,1], a C^2 quintic cutoff on [1,2], zero
/// outside, -2 <= psi <= 0.  RadialBump is a smooth compactly supported bump.
enum class TestFunction { Constant, PsiComposite, RadialBump };

double eval_test_function(TestFunction f, const Point& y, const Ball& ball, int d);

struct ResidualReport {
  double lhs = 0.0;            // E f(X_{tau ^ t}) - f(x)   (resp. P[X in A])
  double rhs = 0.0;            // path-time integral of the full-kernel rate
  double residual = 0.0;       // lhs - rhs, paired per path
  double sigma = 0.0;          // std error of the paired residual
  double small_jump_bias = 0.0;  // resolved sub-cutoff component of rhs (>= 0)
  double bias_sigma = 0.0;
  double epsilon = 0.0;
  std::int64_t n = 0;
  std::string note;
};

/// Dynkin formula residual: E f(X_{tau^t}) - f(x) against the Monte Carlo
/// time integral of the generator, with the generator integral evaluated by
/// symmetric quadrature.  small_jump_bias isolates the |h| < eps part of the
/// generator integral (a control variate: the above-cutoff part telescopes
/// exactly along simulated paths), so the cutoff bias is resolved far below
/// the crude noise level.  Requires drop mode.
ResidualReport check_dynkin(const JumpKernel& kernel, TestFunction f, const Ball& ball,
                            double t_horizon, const SimConfig& cfg);

/// Levy system formula residual for an annular sector A disjoint from the
/// ball: exit frequency into A against the path-time quadrature of
/// int_A k(|z - X_u|) dz.  Same bias decomposition as check_dynkin; the
/// sub-cutoff component vanishes identically when dist(ball, A) > eps.
ResidualReport check_levy_system(const JumpKernel& kernel, const Ball& ball,
                                 const AnnularSector& sector, double t_horizon,
                                 const SimConfig& cfg);

/// int_A (spatial jump density at |z-y|) dz for y in the ball; closed form
/// for stable profiles in 1d, quadrature otherwise.
double sector_jump_rate(const JumpKernel& kernel, const Point& y, const Ball& ball,
                        const AnnularSector& sector);

/// Full-kernel generator applied to the test function at y (symmetric
/// radial/spherical quadrature); head_eps splits off the |h| < head_eps part
/// when positive.
struct GeneratorSplit {
  double above_cutoff = 0.0;
  double below_cutoff = 0.0;
  double total() const { return above_cutoff + below_cutoff; }
};
GeneratorSplit generator_apply(const JumpKernel& kernel, TestFunction f, const Ball& ball,
                               const Point& y, double head_eps);

}  // namespace exitlab
