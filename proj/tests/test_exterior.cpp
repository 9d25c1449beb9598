#include <doctest.h>

#include <sstream>

#include "g2flow/exterior.hpp"
#include "oracle.hpp"

using namespace g2flow;

namespace {

double diff(const PForm& a, const PForm& b) {
  REQUIRE(a.degree() == b.degree());
  return (a - b).max_abs();
}

Vec7 random_vec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec7 v;
  for (int i = 0; i < 7; ++i) v(i) = u(rng);
  return v;
}

}  // namespace

TEST_CASE("basis is lexicographic with binomial sizes") {
  for (int p = 0; p <= 7; ++p) {
    const auto sets = oracle::subsets(p);
    REQUIRE(static_cast<int>(sets.size()) == binomial7(p));
    for (std::size_t k = 0; k < sets.size(); ++k) {
      std::array<int, 7> idx{};
      const int n = Basis::indices(Basis::get().masks[static_cast<std::size_t>(p)][k], idx);
      REQUIRE(n == p);
      for (int i = 0; i < p; ++i) CHECK(idx[static_cast<std::size_t>(i)] == sets[k][static_cast<std::size_t>(i)]);
    }
  }
  CHECK(PForm(3).size() == 35);
  CHECK_THROWS_AS(PForm(8), DegreeError);
}

TEST_CASE("wedge examples") {
  CHECK(diff(wedge(PForm::basis({0}), PForm::basis({1})), PForm::basis({0, 1})) == 0.0);
  CHECK(wedge(PForm::basis({0, 1}), PForm::basis({0, 1})).max_abs() == 0.0);
  CHECK(diff(wedge(PForm::basis({0, 1, 2}), PForm::basis({3, 4, 5, 6})), PForm::basis({0, 1, 2, 3, 4, 5, 6})) == 0.0);
  // e^2 ^ e^1 = -e^12
  CHECK(diff(wedge(PForm::basis({1}), PForm::basis({0})), PForm::basis({0, 1}, -1.0)) == 0.0);
  CHECK_THROWS_AS(wedge(PForm(4), PForm(4)), DegreeError);
}

TEST_CASE("wedge matches brute-force oracle and graded commutativity") {
  std::mt19937_64 rng(11);
  for (int p = 0; p <= 7; ++p)
    for (int q = 0; p + q <= 7; ++q) {
      const PForm a = oracle::random_form(rng, p), b = oracle::random_form(rng, q);
      const PForm w = wedge(a, b);
      CHECK(diff(w, oracle::to(oracle::wedge(oracle::from(a), oracle::from(b)), p + q)) <= 1e-13);
      const double sign = (p * q) % 2 ? -1.0 : 1.0;
      CHECK(diff(w, sign * wedge(b, a)) <= 1e-13);
    }
}

TEST_CASE("interior examples and antiderivation") {
  const PForm phi = PForm::from_terms(3, {{1, {1, 2, 3}}, {1, {1, 4, 5}}, {1, {1, 6, 7}}, {1, {2, 4, 6}},
                                          {-1, {2, 5, 7}}, {-1, {3, 4, 7}}, {-1, {3, 5, 6}}});
  CHECK(diff(interior(Vec7::Unit(0), PForm::basis({0, 1})), PForm::basis({1})) == 0.0);
  CHECK(diff(interior(Vec7::Unit(0), phi), PForm::basis({1, 2}) + PForm::basis({3, 4}) + PForm::basis({5, 6})) == 0.0);
  CHECK(interior(Vec7::Unit(2), PForm::basis({0, 1})).max_abs() == 0.0);

  std::mt19937_64 rng(12);
  for (int p = 1; p <= 7; ++p) {
    const Vec7 v = random_vec(rng);
    const PForm a = oracle::random_form(rng, p);
    const std::vector<double> vv(v.data(), v.data() + 7);
    CHECK(diff(interior(v, a), oracle::to(oracle::interior(vv, oracle::from(a)), p - 1)) <= 1e-13);
    if (p >= 2) CHECK(interior(v, interior(v, a)).max_abs() <= 1e-13);
    for (int q = 1; p + q <= 7; ++q) {
      const PForm b = oracle::random_form(rng, q);
      const double s = p % 2 ? -1.0 : 1.0;
      CHECK(diff(interior(v, wedge(a, b)), wedge(interior(v, a), b) + s * wedge(a, interior(v, b))) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(interior(Vec7::Unit(0), PForm::scalar(1.0)), DegreeError);
}

TEST_CASE("euclidean star matches oracle and squares to one") {
  std::mt19937_64 rng(13);
  for (int p = 0; p <= 7; ++p) {
    const PForm a = oracle::random_form(rng, p);
    const PForm s = euclidean_star(a);
    CHECK(diff(s, oracle::to(oracle::star(oracle::from(a)), 7 - p)) <= 1e-14);
    CHECK(diff(euclidean_star(s), a) <= 1e-14);
    // a ^ *a = |a|^2 vol
    CHECK(wedge(a, s)[0] == doctest::Approx(a.norm_euclid() * a.norm_euclid()).epsilon(1e-13));
  }
  CHECK(diff(euclidean_star(PForm::basis({3, 4, 5, 6})), PForm::basis({0, 1, 2})) == 0.0);
}

TEST_CASE("pullback matches oracle and is functorial") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat7 m, n;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      m(i, j) = u(rng);
      n(i, j) = u(rng);
    }
  for (int p = 0; p <= 7; ++p) {
    const PForm a = oracle::random_form(rng, p);
    CHECK(diff(pullback(m, a), oracle::to(oracle::pullback(m, oracle::from(a)), p)) <= 1e-12);
    // (M N)^* = N^* M^* with M^*e^i = sum_j M(i,j) e^j
    CHECK(diff(pullback(m * n, a), pullback(n, pullback(m, a))) <= 1e-11);
  }
  CHECK(pullback(m, PForm::basis({0, 1, 2, 3, 4, 5, 6}))[0] == doctest::Approx(m.determinant()).epsilon(1e-12));
  for (int p = 0; p <= 7; ++p) CHECK((compound_all(m)[static_cast<std::size_t>(p)] - compound(m, p)).norm() == 0.0);
}

TEST_CASE("text round trip") {
  std::mt19937_64 rng(15);
  const PForm a = oracle::random_form(rng, 4);
  std::ostringstream os;
  os << a;
  CHECK(diff(parse_pform(os.str()), a) == 0.0);
  CHECK_THROWS(parse_pform("3 1 2"));
  CHECK_THROWS(parse_pform("0 1 2"));
}
