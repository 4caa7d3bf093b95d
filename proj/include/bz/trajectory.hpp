#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bz/grid.hpp"

namespace bz {

/// Time-ordered snapshots of (u, v) on one grid.
class Trajectory {
 public:
  Trajectory(const GridSpec& grid, std::string provenance);

  /// Appends a snapshot; its time must exceed the last one and its grid match.
  void push_back(StatePair s);

  const GridSpec& grid() const { return grid_; }
  const std::string& provenance() const { return provenance_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const StatePair& operator[](std::size_t i) const { return samples_[i]; }
  const StatePair& front() const { return samples_.front(); }
  const StatePair& back() const { return samples_.back(); }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

  double start_time() const { return samples_.front().time; }
  double end_time() const { return samples_.back().time; }
  std::vector<double> times() const;

  /// Linear interpolation in time between the bracketing snapshots.  Throws
  /// DomainError outside [start_time, end_time].
  StatePair at(double t) const;

 private:
  GridSpec grid_;
  std::string provenance_;
  std::vector<StatePair> samples_;
};

/// Sup over shared sample times of |a.u - b.u|∞ + ... ; the sample times of
/// `b` at which `a` also has a snapshot (to 1e-12 relative) are compared.
double trajectory_gap(const Trajectory& a, const Trajectory& b);

/// Writes "t,min_u,max_u,min_v,max_v,grad_u,grad_v" rows.
void write_envelope_csv(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace bz
