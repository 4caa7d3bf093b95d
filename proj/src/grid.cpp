#include "bz/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "bz/error.hpp"

namespace bz {

GridSpec::GridSpec(int dim, double extent, std::size_t points)
    : dim_(dim), extent_(extent), points_(points) {
  if (dim != 1 && dim != 2) throw DomainError("GridSpec: dim must be 1 or 2");
  if (!(extent > 0.0) || !std::isfinite(extent)) throw DomainError("GridSpec: extent must be positive");
  if (points < 8 || points % 2 != 0) throw DomainError("GridSpec: points must be even and at least 8");
}

Field::Field(const GridSpec& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DomainError("Field: value count does not match grid");
}

StatePair::StatePair(Field u_in, Field v_in, double t) : u(std::move(u_in)), v(std::move(v_in)), time(t) {
  if (!(u.grid() == v.grid())) throw DomainError("StatePair: u and v live on different grids");
  if (!(t >= 0.0)) throw DomainError("StatePair: time must be non-negative");
}

void ensure_finite(const Field& f, const char* context) {
  const auto vals = f.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!std::isfinite(vals[i])) {
      throw NumericalError(std::string(context) + ": non-finite value at index " + std::to_string(i));
    }
  }
}

double sup_norm(const Field& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double min_value(const Field& f) {
  const auto vals = f.values();
  return *std::min_element(vals.begin(), vals.end());
}

double max_value(const Field& f) {
  const auto vals = f.values();
  return *std::max_element(vals.begin(), vals.end());
}

double mean_value(const Field& f) {
  double s = 0.0;
  for (double x : f.values()) s += x;
  return s / static_cast<double>(f.size());
}

double grad_sup_norm(const Field& f) {
  const GridSpec& g = f.grid();
  const std::size_t n = g.points();
  const double inv2h = 1.0 / (2.0 * g.spacing());
  double best = 0.0;
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = (f[(i + 1) % n] - f[(i + n - 1) % n]) * inv2h;
      best = std::max(best, std::abs(dx));
    }
    return best;
  }
  for (std::size_t iy = 0; iy < n; ++iy) {
    const std::size_t up = (iy + 1) % n;
    const std::size_t dn = (iy + n - 1) % n;
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double dx = (f[iy * n + (ix + 1) % n] - f[iy * n + (ix + n - 1) % n]) * inv2h;
      const double dy = (f[up * n + ix] - f[dn * n + ix]) * inv2h;
      best = std::max(best, std::hypot(dx, dy));
    }
  }
  return best;
}

double sup_distance(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw DomainError("sup_distance: grids differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Field constant_field(const GridSpec& grid, double c) { return Field(grid, c); }

Field random_uniform_field(const GridSpec& grid, double lo, double hi, std::uint64_t seed) {
  if (!(lo <= hi)) throw DomainError("random_uniform_field: lo > hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Field f(grid);
  for (double& x : f.values()) x = std::clamp(dist(rng), lo, hi);
  return f;
}

namespace {

double torus_offset(double a, double b, double extent) {
  double d = std::fmod(std::abs(a - b), extent);
  return std::min(d, extent - d);
}

}  // namespace

Field gaussian_bump(const GridSpec& grid, std::array<double, 2> center, double width, double amplitude,
                    double baseline) {
  if (!(width > 0.0)) throw DomainError("gaussian_bump: width must be positive");
  Field f(grid);
  const std::size_t n = grid.points();
  const double len = grid.extent();
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = torus_offset(grid.coord(i), center[0], len);
      f[i] = baseline + amplitude * std::exp(-(r * r) / (width * width));
    }
    return f;
  }
  for (std::size_t iy = 0; iy < n; ++iy) {
    const double ry = torus_offset(grid.coord(iy), center[1], len);
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double rx = torus_offset(grid.coord(ix), center[0], len);
      f[iy * n + ix] = baseline + amplitude * std::exp(-(rx * rx + ry * ry) / (width * width));
    }
  }
  return f;
}

Field single_mode(const GridSpec& grid, std::array<int, 2> k, double amplitude, double baseline,
                  double phase) {
  Field f(grid);
  const std::size_t n = grid.points();
  const double w = 2.0 * std::numbers::pi / grid.extent();
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = baseline + amplitude * std::cos(w * k[0] * grid.coord(i) + phase);
    }
    return f;
  }
  for (std::size_t iy = 0; iy < n; ++iy) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      f[iy * n + ix] =
          baseline + amplitude * std::cos(w * (k[0] * grid.coord(ix) + k[1] * grid.coord(iy)) + phase);
    }
  }
  return f;
}

Field band_limited_random_field(const GridSpec& grid, int max_mode, double lo, double hi,
                                std::uint64_t seed) {
  if (!(lo <= hi)) throw DomainError("band_limited_random_field: lo > hi");
  if (max_mode < 1) throw DomainError("band_limited_random_field: max_mode must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  Field raw(grid);
  const std::size_t n = grid.points();
  const double w = 2.0 * std::numbers::pi / grid.extent();
  const int ky_max = grid.dim() == 2 ? max_mode : 0;
  for (int ky = -ky_max; ky <= ky_max; ++ky) {
    for (int kx = 0; kx <= max_mode; ++kx) {
      if (kx == 0 && ky <= 0) continue;  // each ±k pair once, no mean mode
      const double amp = unit(rng) / (1.0 + std::hypot(kx, ky));
      const double ph = angle(rng);
      if (grid.dim() == 1) {
        for (std::size_t i = 0; i < n; ++i) raw[i] += amp * std::cos(w * kx * grid.coord(i) + ph);
      } else {
        for (std::size_t iy = 0; iy < n; ++iy) {
          for (std::size_t ix = 0; ix < n; ++ix) {
            raw[iy * n + ix] += amp * std::cos(w * (kx * grid.coord(ix) + ky * grid.coord(iy)) + ph);
          }
        }
      }
    }
  }
  const double rmin = min_value(raw);
  const double rmax = max_value(raw);
  Field f(grid, lo);
  if (rmax > rmin) {
    const double scale = (hi - lo) / (rmax - rmin);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::clamp(lo + (raw[i] - rmin) * scale, lo, hi);
  }
  return f;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_field_csv(const std::filesystem::path& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << "index,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) os << i << ',' << format_double(f[i]) << '\n';
  if (!os) throw Error("write failed for " + path.string());
}

void write_field_pgm(const std::filesystem::path& path, const Field& f) {
  if (f.grid().dim() != 2) throw DomainError("write_field_pgm: 2-D fields only");
  const std::size_t n = f.grid().points();
  const double lo = min_value(f);
  const double hi = max_value(f);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << "P5\n# scale min=" << format_double(lo) << " max=" << format_double(hi) << '\n'
     << n << ' ' << n << "\n255\n";
  std::vector<unsigned char> pixels(f.size());
  const double span = hi - lo;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double s = span > 0.0 ? (f[i] - lo) / span : 0.0;
    pixels[i] = static_cast<unsigned char>(std::lround(std::clamp(s, 0.0, 1.0) * 255.0));
  }
  os.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!os) throw Error("write failed for " + path.string());
}

}  // namespace bz
