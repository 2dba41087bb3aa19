#include <doctest.h>

#include <cmath>
#include <functional>

#include "fpk/grid.hpp"
#include "fpk/weight.hpp"

using namespace fpk;

namespace {

template <class Fn>
Errc code_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<Errc>(0);
}

}  // namespace

TEST_CASE("build_grid accepts the order window and fixes the spacing") {
  auto g = build_grid(-1.0, 1.0, 31, 0.4, 2.0);
  CHECK(g->h() == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  CHECK(g->n_nodes() == 31);
  CHECK(g->node(0) == doctest::Approx(-1.0 + 1.0 / 16.0));

  auto g2 = build_grid(0.0, 1.0, 7, 0.3, 2.5);  // ps = 0.75: 0.75 < 1 < 1.5
  CHECK(g2->h() == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
}

TEST_CASE("build_grid rejects bad inputs with the named error classes") {
  CHECK(code_of([] { build_grid(-1.0, 1.0, 31, 0.6, 2.0); }) == Errc::order_window);  // ps = 1.2
  CHECK(code_of([] { build_grid(-1.0, 1.0, 31, 0.2, 2.0); }) == Errc::order_window);  // 2ps = 0.8
  CHECK(code_of([] { build_grid(1.0, -1.0, 31, 0.4, 2.0); }) == Errc::bad_bounds);
  CHECK(code_of([] { build_grid(-1.0, 1.0, 0, 0.4, 2.0); }) == Errc::invalid_argument);
}

TEST_CASE("node widths tile Omega exactly") {
  for (int n : {1, 2, 5, 31}) {
    auto g = build_grid(-1.0, 1.0, n, 0.4, 2.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += g->node_width(i);
    CHECK(total == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("DiscreteFunction validates its length") {
  auto g = build_grid(-1.0, 1.0, 3, 0.4, 2.0);
  CHECK_THROWS_AS(DiscreteFunction(g, {1.0, 2.0}), Error);
  DiscreteFunction u(g, {1.0, 2.0, 3.0});
  CHECK_FALSE(u.is_zero());
  CHECK(zeros_like(g).is_zero());
}

TEST_CASE("weight parser: grammar and sign classes") {
  auto g = build_grid(-1.0, 1.0, 31, 0.4, 2.0);

  BoundWeight one = parse_weight("1").on(*g);
  CHECK(one.sign_class == SignClass::nonnegative);
  CHECK(one.sup_abs == 1.0);

  BoundWeight x = parse_weight("x").on(*g);
  CHECK(x.sign_class == SignClass::sign_changing);

  BoundWeight negone = parse_weight("-1").on(*g);
  CHECK(negone.sign_class == SignClass::nonpositive);

  BoundWeight zero = parse_weight("0").on(*g);
  CHECK(zero.sign_class == SignClass::zero);

  WeightSpec w = parse_weight("sin(pi*x) + 2*cos(x)^2 - exp(-abs(x))/1.5");
  const double xx = 0.37;
  const double expect =
      std::sin(3.14159265358979323846 * xx) + 2.0 * std::cos(xx) * std::cos(xx) -
      std::exp(-std::fabs(xx)) / 1.5;
  CHECK(w.eval(xx) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("weight parser: precedence and unary minus follow the grammar") {
  CHECK(parse_weight("2+3*4").eval(0.0) == doctest::Approx(14.0));
  CHECK(parse_weight("2*3^2").eval(0.0) == doctest::Approx(18.0));
  CHECK(parse_weight("1 - 2 - 3").eval(0.0) == doctest::Approx(-4.0));
  // base := '-' base binds before '^': -x^2 reads as (-x)^2.
  CHECK(parse_weight("-x^2").eval(2.0) == doctest::Approx(4.0));
  CHECK(parse_weight("1.5e-2").eval(0.0) == doctest::Approx(0.015));
}

TEST_CASE("weight parser: errors carry a position") {
  try {
    parse_weight("sin(pi*x");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse_error);
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
  CHECK(code_of([] { parse_weight("foo(x)"); }) == Errc::parse_error);
  CHECK(code_of([] { parse_weight("1 + * 2"); }) == Errc::parse_error);
  CHECK(code_of([] { parse_weight("2^3^2"); }) == Errc::parse_error);  // single '^' per factor
  CHECK(code_of([] { parse_weight(""); }) == Errc::parse_error);
}

TEST_CASE("weight evaluation fails on non-finite nodal values") {
  auto g = build_grid(-1.0, 1.0, 3, 0.4, 2.0);
  WeightSpec w = parse_weight("1/(x-x)");
  CHECK(code_of([&] { w.on(*g); }) == Errc::eval_error);
}
