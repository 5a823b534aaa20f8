#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "isslab/catalog.hpp"
#include "isslab/config.hpp"

using namespace isslab;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path =
      (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("config parsing: sections, types, unknown-key tracking") {
  auto cfg = Config::parse_text(
      "experiment=demo\n# comment\n[grid]\nn = 64\nlength=3.14\n");
  CHECK(cfg.get_string("experiment", "") == "demo");
  CHECK(cfg.get_int("grid.n", 0) == 64);
  CHECK(cfg.get_double("grid.length", 0.0) == doctest::Approx(3.14));
  CHECK(cfg.unconsumed().empty());

  auto cfg2 = Config::parse_text("a=1\nb=2\n");
  cfg2.get_int("a", 0);
  auto leftover = cfg2.unconsumed();
  REQUIRE(leftover.size() == 1);
  CHECK(leftover[0] == "b");

  CHECK_THROWS_AS(Config::parse_text("not a kv line\n"), std::invalid_argument);
}

TEST_CASE("catalog spec strings") {
  auto f = comparison_from_spec("power(2)");
  CHECK(f(3.0) == doctest::Approx(9.0));
  auto g = comparison_from_spec("saturating");
  CHECK(g(1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(comparison_from_spec("nope(1)"), std::invalid_argument);

  auto mu = timefun_from_spec("step(1, 0, 2)");
  CHECK(mu(0.5) == doctest::Approx(0.0));
  CHECK(mu(1.5) == doctest::Approx(2.0));

  auto u = input_from_spec("sine(0.5, 2)", 3);
  CHECK(u.dim() == 3);
  CHECK(u.value(0.25)[1] == doctest::Approx(0.5 * std::sin(0.5)));
}

TEST_CASE("CSV-backed comparison function and input signal") {
  const std::string cmp_path =
      temp_file("isslab_cmp.csv", "arg,value\n0,0\n1,0.5\n2,2.0\n4,8.0\n");
  auto f = comparison_from_csv(cmp_path);
  CHECK(f(1.0) == doctest::Approx(0.5));
  CHECK(f(1.5) == doctest::Approx(1.25));  // piecewise linear
  CHECK(f.domain_max() == doctest::Approx(4.0));

  const std::string u_path =
      temp_file("isslab_input.csv", "t,u1,u2\n0,1,0\n1,0,1\n2,0.5,0.5\n");
  auto u = input_from_csv(u_path);
  CHECK(u.dim() == 2);
  CHECK(u.value(0.5)[0] == doctest::Approx(0.5));
  CHECK(u.value(0.5)[1] == doctest::Approx(0.5));
}

TEST_CASE("matrix-block generator from CSV propagates exactly") {
  // A = -I on [0, 1), then -2I: W(2, 0) = e^{-1} * e^{-2} on the diagonal.
  const std::string path = temp_file(
      "isslab_blocks.csv",
      "t,a11,a12,a21,a22\n0,-1,0,0,-1\n1,-2,0,0,-2\n");
  auto gen = generator_from_blocks_csv(path, 2);
  CHECK(gen.is_piecewise_constant());
  Propagator w(gen);
  Vec x = w.apply(2.0, 0.0, {1.0, 3.0});
  CHECK(x[0] == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(3.0 * std::exp(-3.0)).epsilon(1e-12));
  // Mid-block start.
  Vec y = w.apply(1.5, 0.5, {1.0, 0.0});
  CHECK(y[0] == doctest::Approx(std::exp(-0.5 - 1.0)).epsilon(1e-12));
}

TEST_CASE("matrix_piecewise rejects bad blocks") {
  Mat a(2, 2), b(3, 3);
  CHECK_THROWS_AS(GeneratorSpec::matrix_piecewise({{0.0, a}, {1.0, b}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GeneratorSpec::matrix_piecewise({{1.0, a}, {0.5, a}}),
                  std::invalid_argument);
}
