#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "bz/error.hpp"
#include "bz/grid.hpp"

using namespace bz;

TEST_CASE("grid spec validation") {
  CHECK_THROWS_AS(GridSpec(3, 1.0, 16), DomainError);
  CHECK_THROWS_AS(GridSpec(1, 0.0, 16), DomainError);
  CHECK_THROWS_AS(GridSpec(1, 1.0, 6), DomainError);
  CHECK_THROWS_AS(GridSpec(1, 1.0, 9), DomainError);
  const GridSpec g(2, 10.0, 16);
  CHECK(g.size() == 256);
  CHECK(g.spacing() == doctest::Approx(0.625));
}

TEST_CASE("norms on simple fields") {
  const GridSpec g(1, 1.0, 8);
  CHECK(sup_norm(constant_field(g, -2.5)) == 2.5);
  Field f(g, 0.0);
  f[0] = -3.0;
  f[3] = 1.0;
  f[5] = 2.0;
  CHECK(sup_norm(f) == 3.0);
  CHECK(min_value(f) == -3.0);
  CHECK(max_value(f) == 2.0);
  CHECK(grad_sup_norm(constant_field(g, 4.0)) == 0.0);
  Field nan(g, 0.0);
  nan[2] = std::nan("");
  CHECK_THROWS_AS(ensure_finite(nan, "test"), NumericalError);
}

TEST_CASE("random field extrema match a naive scan") {
  const GridSpec g(2, 5.0, 32);
  const Field f = random_uniform_field(g, -1.0, 3.0, 42);
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < f.size(); ++i) {
    lo = std::min(lo, f[i]);
    hi = std::max(hi, f[i]);
  }
  CHECK(min_value(f) == lo);
  CHECK(max_value(f) == hi);
  CHECK(lo >= -1.0);
  CHECK(hi <= 3.0);
  CHECK(random_uniform_field(g, -1.0, 3.0, 42).values()[17] == f[17]);
}

TEST_CASE("sup norm of a sampled mode") {
  const double L = 7.0;
  const GridSpec g(1, L, 64);
  const double A = 1.3;
  const Field f = single_mode(g, {3, 0}, A, 0.0, 0.4);
  const double err_bound = A * std::pow(std::numbers::pi * 3 * g.spacing() / L, 2) / 2;
  CHECK(sup_norm(f) <= A);
  CHECK(sup_norm(f) >= A - err_bound);
}

TEST_CASE("centered gradient converges at second order") {
  const double L = 3.0;
  const double exact = 2 * std::numbers::pi / L;
  double prev_err = 0.0;
  for (std::size_t n : {16u, 32u, 64u, 128u}) {
    const GridSpec g(1, L, n);
    const Field f = single_mode(g, {1, 0}, 1.0, 0.0, 0.0);
    const double err = std::abs(grad_sup_norm(f) - exact);
    if (prev_err > 0.0) CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.05));
    prev_err = err;
  }
  const GridSpec g(2, L, 32);
  const Field a = single_mode(g, {1, 0}, 1.0);
  const Field b = single_mode(g, {0, 2}, 0.5);
  Field s(g);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a[i] + b[i];
  CHECK(grad_sup_norm(s) <= grad_sup_norm(a) + grad_sup_norm(b) + 1e-12);
}

TEST_CASE("constructors respect their ranges") {
  const GridSpec g(2, 20.0, 32);
  const Field bump = gaussian_bump(g, {0.0, 0.0}, 2.0, 0.7, 0.1);
  CHECK(max_value(bump) == doctest::Approx(0.8));
  CHECK(min_value(bump) >= 0.1);
  // torus distance: the bump at the origin is symmetric across the seam
  CHECK(bump[1] == doctest::Approx(bump[31]));
  const Field band = band_limited_random_field(g, 3, 0.2, 0.9, 5);
  CHECK(min_value(band) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(max_value(band) == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("serialization") {
  const auto dir = std::filesystem::temp_directory_path() / "bz_grid_test";
  std::filesystem::create_directories(dir);
  const GridSpec g(2, 1.0, 8);
  const Field f = single_mode(g, {1, 1}, 1.0, 2.0);
  write_field_csv(dir / "f.csv", f);
  std::ifstream is(dir / "f.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line == "index,value");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 64);
  write_field_pgm(dir / "f.pgm", f);
  CHECK(std::filesystem::file_size(dir / "f.pgm") > 64);
  CHECK_THROWS(write_field_pgm(dir / "g.pgm", constant_field(GridSpec(1, 1.0, 8), 0.0)));
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  std::filesystem::remove_all(dir);
}
