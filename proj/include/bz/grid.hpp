#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace bz {

/// Uniform periodic grid on the torus [0, L)^dim with N points per axis.
class GridSpec {
 public:
  GridSpec(int dim, double extent, std::size_t points);

  int dim() const { return dim_; }
  double extent() const { return extent_; }
  std::size_t points() const { return points_; }
  double spacing() const { return extent_ / static_cast<double>(points_); }
  std::size_t size() const { return dim_ == 1 ? points_ : points_ * points_; }

  /// Coordinate of grid index i along one axis.
  double coord(std::size_t i) const { return spacing() * static_cast<double>(i); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int dim_;
  double extent_;
  std::size_t points_;
};

/// Samples of a scalar function on a GridSpec.  2-D data is row-major with
/// the x index fastest.
class Field {
 public:
  explicit Field(const GridSpec& grid, double fill = 0.0);
  Field(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// (u, v) at one time instant.
struct StatePair {
  Field u;
  Field v;
  double time = 0.0;

  StatePair(Field u_in, Field v_in, double t = 0.0);
};

/// Throws NumericalError naming `context` if any value is NaN or infinite.
void ensure_finite(const Field& f, const char* context);

double sup_norm(const Field& f);
double min_value(const Field& f);
double max_value(const Field& f);
double mean_value(const Field& f);

/// Sup over grid points of the Euclidean norm of the centered-difference
/// gradient.
double grad_sup_norm(const Field& f);

/// sup |a - b|; grids must match.
double sup_distance(const Field& a, const Field& b);

// --- constructors -----------------------------------------------------------

Field constant_field(const GridSpec& grid, double c);

/// Independent uniform samples in [lo, hi].
Field random_uniform_field(const GridSpec& grid, double lo, double hi, std::uint64_t seed);

/// baseline + amplitude·exp(-|x - center|²/width²), distance measured on the torus.
Field gaussian_bump(const GridSpec& grid, std::array<double, 2> center, double width,
                    double amplitude, double baseline = 0.0);

/// baseline + amplitude·cos(2π(k·x)/L + phase).
Field single_mode(const GridSpec& grid, std::array<int, 2> k, double amplitude,
                  double baseline = 0.0, double phase = 0.0);

/// Smooth random field: a random trigonometric polynomial with wavenumbers
/// |k_i| <= max_mode, affinely mapped so that its grid min and max are lo and hi.
Field band_limited_random_field(const GridSpec& grid, int max_mode, double lo, double hi,
                                std::uint64_t seed);

// --- serialization ----------------------------------------------------------

/// "index,value" rows with a header line.
void write_field_csv(const std::filesystem::path& path, const Field& f);

/// Binary P5 image with maxval 255; values are min-max scaled and the scale is
/// recorded in a comment line.  2-D fields only.
void write_field_pgm(const std::filesystem::path& path, const Field& f);

/// Shortest round-trip decimal representation, used by every text writer so
/// outputs are byte-reproducible.
std::string format_double(double x);

}  // namespace bz
