#include "bz/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bz/error.hpp"

namespace bz {

Trajectory::Trajectory(const GridSpec& grid, std::string provenance)
    : grid_(grid), provenance_(std::move(provenance)) {}

void Trajectory::push_back(StatePair s) {
  if (!(s.u.grid() == grid_)) throw DomainError("Trajectory: snapshot grid mismatch");
  if (!samples_.empty() && !(s.time > samples_.back().time)) {
    throw DomainError("Trajectory: snapshot times must be strictly increasing");
  }
  ensure_finite(s.u, "Trajectory u");
  ensure_finite(s.v, "Trajectory v");
  samples_.push_back(std::move(s));
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(samples_.size());
  for (const auto& s : samples_) t.push_back(s.time);
  return t;
}

StatePair Trajectory::at(double t) const {
  if (samples_.empty()) throw DomainError("Trajectory::at: empty trajectory");
  const double eps = 1e-12 * std::max(1.0, std::abs(end_time()));
  if (t < start_time() - eps || t > end_time() + eps) {
    throw DomainError("Trajectory::at: time outside the stored span");
  }
  auto it = std::lower_bound(samples_.begin(), samples_.end(), t,
                             [](const StatePair& s, double x) { return s.time < x; });
  if (it == samples_.end()) return samples_.back();
  if (it->time == t || it == samples_.begin()) return *it;
  const StatePair& hi = *it;
  const StatePair& lo = *(it - 1);
  const double w = (t - lo.time) / (hi.time - lo.time);
  Field u(grid_);
  Field v(grid_);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = (1.0 - w) * lo.u[i] + w * hi.u[i];
    v[i] = (1.0 - w) * lo.v[i] + w * hi.v[i];
  }
  return {std::move(u), std::move(v), t};
}

double trajectory_gap(const Trajectory& a, const Trajectory& b) {
  double gap = 0.0;
  std::size_t ia = 0;
  std::size_t shared = 0;
  for (const auto& sb : b) {
    while (ia < a.size() && a[ia].time < sb.time - 1e-12 * std::max(1.0, std::abs(sb.time))) ++ia;
    if (ia == a.size()) break;
    if (std::abs(a[ia].time - sb.time) <= 1e-12 * std::max(1.0, std::abs(sb.time))) {
      gap = std::max(gap, sup_distance(a[ia].u, sb.u) + sup_distance(a[ia].v, sb.v));
      ++shared;
    }
  }
  if (shared == 0) throw DomainError("trajectory_gap: no shared sample times");
  return gap;
}

void write_envelope_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << "t,min_u,max_u,min_v,max_v,grad_u,grad_v\n";
  for (const auto& s : traj) {
    os << format_double(s.time) << ',' << format_double(min_value(s.u)) << ',' << format_double(max_value(s.u))
       << ',' << format_double(min_value(s.v)) << ',' << format_double(max_value(s.v)) << ','
       << format_double(grad_sup_norm(s.u)) << ',' << format_double(grad_sup_norm(s.v)) << '\n';
  }
  if (!os) throw Error("write failed for " + path.string());
}

}  // namespace bz
