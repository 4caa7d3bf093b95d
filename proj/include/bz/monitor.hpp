#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bz/comparison.hpp"
#include "bz/grid.hpp"
#include "bz/model.hpp"
#include "bz/semigroup.hpp"
#include "bz/stepper.hpp"
#include "bz/trajectory.hpp"

namespace bz {

/// Axis-aligned box in (u, v)-space.  Infinite upper edges give the quadrant.
struct RegionBox {
  std::string name;
  double lo_u = 0.0;
  double hi_u = std::numeric_limits<double>::infinity();
  double lo_v = 0.0;
  double hi_v = std::numeric_limits<double>::infinity();

  bool bounded() const;
  double width() const;  ///< smallest finite edge length (1 for the quadrant)
};

RegionBox nonneg_quadrant();
RegionBox square_box(double m);  ///< [0, m]²
RegionBox region_S(const ModelParams& p);  ///< (q, ū)²
RegionBox natural_box(double q_nat, double u_nat);

struct EnvelopeRow {
  double t = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double min_v = 0.0;
  double max_v = 0.0;
};

struct Violation {
  double time = 0.0;
  std::size_t index = 0;
  char variable = 'u';
  double value = 0.0;
  double overshoot = 0.0;
};

struct RegionReport {
  RegionBox region;
  double tol = 0.0;
  std::size_t snapshot_stride = 1;  ///< steps between checked snapshots
  std::vector<EnvelopeRow> envelope;
  std::vector<Violation> violations;  ///< first kMaxViolations overshoots beyond tol
  std::size_t violation_count = 0;
  double worst_overshoot = 0.0;
  std::size_t snapshots_checked = 0;
  bool pass = true;
};

inline constexpr std::size_t kMaxViolations = 64;

/// Incremental box check, usable as a stepper Monitor.  Every observed
/// snapshot is scanned exactly; envelope rows are kept every envelope_every
/// snapshots (and for the last one seen).
class RegionTracker {
 public:
  RegionTracker(RegionBox region, double tol, std::size_t snapshot_stride = 1, std::size_t envelope_every = 1);
  void observe(const StatePair& s);
  /// Envelope with the last observed snapshot appended if it was skipped.
  RegionReport report() const;

 private:
  RegionReport rep_;
  std::size_t envelope_every_;
  std::optional<EnvelopeRow> last_;
};

/// Scans every stored snapshot of traj.
RegionReport check_box(const Trajectory& traj, const RegionBox& region, double tol, std::size_t snapshot_stride = 1);

/// True if every grid value of u and v lies strictly inside the box.
bool strictly_inside(const StatePair& s, const RegionBox& region);

struct InvarianceConfig {
  std::size_t samples = 50;
  double T = 10.0;
  GridSpec grid{1, 100.0, 128};
  int max_mode = 4;          ///< band limit of the random initial data
  double margin = 0.01;      ///< initial data kept this fraction of the width inside
  double tol = 1e-8;
  double dt = 0.0;           ///< 0: max_stable_dt for the region's box
  HeatMode mode = HeatMode::Kernel;
  StepperScheme scheme = StepperScheme::ImexStrang;
  std::size_t check_stride = 1;  ///< steps between checks
  unsigned threads = 0;          ///< 0: hardware concurrency
  std::uint64_t seed = 1;
};

struct SampleVerdict {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double worst_overshoot = 0.0;
  std::size_t violation_count = 0;
  std::optional<Violation> first_violation;
  EnvelopeRow extremes;  ///< min/max of u and v over the whole run
  bool pass = true;
};

struct InvarianceReport {
  RegionBox region;
  InvarianceConfig config;
  double dt = 0.0;
  std::vector<SampleVerdict> samples;  ///< ordered by sample index
  double worst_overshoot = 0.0;
  bool pass = true;
};

/// Random smooth data inside region (shrunk by margin), each sample simulated
/// to T and checked at every check_stride-th step.  Samples run on worker
/// threads; the result does not depend on the thread count.  For the quadrant
/// the initial data are drawn in [0, 1]² and only the lower edges are checked.
/// Throws DomainError if the diffusion length sqrt(2·max(1,d)·T) exceeds L/4.
InvarianceReport invariance_experiment(const ModelParams& p, const RegionBox& region, const InvarianceConfig& cfg);

/// Seed of sample i derived from the experiment seed.
std::uint64_t sample_seed(std::uint64_t seed, std::size_t index);

struct EntryResult {
  std::optional<double> entry_time;  ///< first snapshot time fully inside S
  double T_sharp = 0.0;
  double entry_tol = 0.0;
  bool satisfied = false;
};

/// First snapshot time at which (u, v) lies in S = (q, ū)² and whether it is
/// at most chain.T_sharp + entry_tol (t* = trajectory start).  Throws
/// DomainError if the trajectory ends before T_sharp.
EntryResult entry_check(const Trajectory& traj, const TrapChainResult& chain, const ModelParams& p,
                        double entry_tol);

struct CheckResult {
  std::string name;
  double worst_excess = 0.0;  ///< max over trials of (observed - allowed); pass iff <= 0
  std::size_t trials = 0;
  bool pass = true;
  /// false for properties that hold only up to Gibbs-level error on rough
  /// data; reported but not part of the verdict
  bool gating = true;
};

struct SemigroupReport {
  std::vector<CheckResult> checks;
  double smoothing_constant = 0.0;  ///< observed sup t^{1/2}|∇e^{tΔ}f|∞ / |f|∞
  bool pass = true;
};

/// Randomised checks of the heat, damped and evolution-family estimates
/// (contraction, minimum, decay, semigroup law, mean, eigenmodes, smoothing,
/// the ψ bound and lower bound, the 4/3 bound, the 2|ξ0| bound with ξ > c).
SemigroupReport semigroup_suite(const GridSpec& grid, std::size_t trials, std::uint64_t seed, const ModelParams& p);

enum class ProbeShape { Uniform, Bump };

struct InstabilityReport {
  double amplitude = 0.0;
  double T = 0.0;
  ProbeShape shape = ProbeShape::Uniform;
  double initial_max = 0.0;
  double final_max = 0.0;
  double final_min = 0.0;
  double growth = 0.0;  ///< final_max / amplitude (0 for zero amplitude)
  bool grew = false;    ///< growth >= 10
  /// min u > 0 at every checked snapshot with t > 0 and min u(T) >= kStrictFloor
  bool strictly_positive = false;
  double min_positive_time_value = 0.0;  ///< smallest min u over checked t > 0
  /// min over |x - center| <= r of u(T) for r = L/8, L/4, L/2 (bump only)
  std::vector<double> ball_minima;
};

inline constexpr double kStrictFloor = 1e-14;

/// Perturbs (0, 0) by u0 = amplitude (uniform) or an amplitude bump on zero
/// background, v0 = 0, and simulates to T.  Requires 0 <= amplitude < q.
InstabilityReport instability_probe(const ModelParams& p, double amplitude, double T, ProbeShape shape,
                                    const GridSpec& grid, const StepperConfig& cfg);

}  // namespace bz
