#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mhdbl/profile.hpp"

using namespace mhdbl;

namespace {
GridPtr make_grid(double eps = 1e-3) { return HalfLineGrid::build(eps, 12.0, 257, 0.5); }
}

TEST_CASE("exp-approach satisfies the wall conditions exactly") {
  auto p = build_profile("exp-approach", {}, make_grid());
  CHECK(p.us(0.0) == 0.0);
  CHECK(p.hs(0.0, 1) == 0.0);
  CHECK(p.u_far() == doctest::Approx(0.5));
  CHECK(p.h_far() == doctest::Approx(1.0));
}

TEST_CASE("gamma0 from dense sampling sits near the far-field limit") {
  auto p = build_profile("exp-approach", {}, make_grid());
  // H_E^2 - U_E^2 = 1 - 0.25, approached from above as Y grows
  CHECK(p.gamma0() >= 0.75);
  CHECK(p.gamma0() < 0.7501);
  const auto rep = validate_assumptions(p);
  CHECK(rep.a1_pass);
  CHECK(rep.a2_pass);
  CHECK(rep.a3_pass);
  CHECK(rep.a4_pass);
  CHECK(rep.all_pass);
}

TEST_CASE("wall offset violates (A1) at construction") {
  CHECK_THROWS_AS(build_profile("exp-approach", {0.5, 1.0, 0.1, 0.3}, make_grid()),
                  AssumptionError);
}

TEST_CASE("velocity-dominated tanh profile fails (A4), reported not thrown") {
  auto p = build_profile("tanh", {1.2, 1.0}, make_grid());
  const auto rep = validate_assumptions(p);
  CHECK(rep.a1_pass);
  CHECK_FALSE(rep.a4_pass);
  CHECK(rep.gamma0 < 0.0);
  CHECK_FALSE(rep.all_pass);
}

TEST_CASE("constant profile: Mbar = 0, gamma0 = 1") {
  auto p = build_profile("constant", {}, make_grid());
  const auto rep = validate_assumptions(p);
  CHECK(rep.all_pass);
  CHECK(rep.mbar == 0.0);
  CHECK(rep.gamma0 == doctest::Approx(1.0));
}

TEST_CASE("gauss-bump is non-monotone yet admissible") {
  auto p = build_profile("gauss-bump", {}, make_grid());
  const auto rep = validate_assumptions(p);
  CHECK(rep.all_pass);
  CHECK(p.us(0.7) > p.us(3.0));  // rises then decays: no monotonicity
  CHECK(p.u_far() == 0.0);
}

TEST_CASE("derived fields are consistent identities") {
  auto g = make_grid();
  auto p = build_profile("exp-approach", {}, g);
  const double rt = std::sqrt(g->eps());
  for (std::size_t i = 0; i < g->size(); i += 10) {
    const double Y = g->node(i) / rt;
    CHECK(std::abs(p.ap(Y) * p.hs(Y) - p.us(Y)) <= 1e-13 * (1.0 + std::abs(p.us(Y))));
    CHECK(std::abs(p.bp(Y) * p.hs(Y) - p.hs(Y, 1)) <=
          1e-13 * (1.0 + std::abs(p.hs(Y, 1))));
    const double G = p.gs(Y);
    CHECK(G >= p.gamma0() - 1e-12);
    CHECK(G <= p.gamma_hi() * p.gamma_hi() + 1e-12);
  }
}

TEST_CASE("sampled U_s differentiates to the closed form at second order") {
  std::vector<double> errs;
  for (int lvl = 0; lvl < 3; ++lvl) {
    auto g = HalfLineGrid::build(1e-2, 12.0, 256 * (1 << lvl) + 1, 0.5);
    auto p = build_profile("exp-approach", {}, g);
    const double rt = std::sqrt(g->eps());
    const auto d = derivative(p.Us(), 1);
    double err = 0.0;
    for (std::size_t i = 1; i + 1 < g->size(); ++i)
      err = std::max(err, std::abs(d[i] - p.us(g->node(i) / rt, 1) / rt));
    errs.push_back(err);
  }
  const double rate = std::log2(errs[0] / errs[2]) / 2.0;
  CHECK(rate > 1.8);
  CHECK(rate < 2.2);
}

TEST_CASE("tabulated profiles require explicit derivatives") {
  const char* path4 = "tab_profile_4col.txt";
  {
    std::ofstream out(path4);
    out << "# 0.5 1.0\n";
    for (int i = 0; i <= 100; ++i) out << 0.5 * i << " 0.0 1.0 0\n";
  }
  auto g = make_grid();
  CHECK_THROWS_AS(build_profile_tabulated(path4, g), std::invalid_argument);

  const char* path10 = "tab_profile_10col.txt";
  {
    std::ofstream out(path10);
    out << "# 0.5 1.0\n";
    out.precision(15);
    for (int i = 0; i <= 400; ++i) {
      const double Y = 0.1 * i;
      const double e = std::exp(-Y), e2 = std::exp(-Y * Y);
      out << Y << " " << 0.5 * (1.0 - e) << " " << 1.0 + 0.1 * e2 << " 0 " << 0.5 * e
          << " " << -0.5 * e << " " << 0.5 * e << " " << 0.1 * (-2.0 * Y) * e2 << " "
          << 0.1 * (4.0 * Y * Y - 2.0) * e2 << " "
          << 0.1 * (12.0 * Y - 8.0 * Y * Y * Y) * e2 << "\n";
    }
  }
  auto pt = build_profile_tabulated(path10, g);
  auto pe = build_profile("exp-approach", {}, g);
  for (double Y : {0.05, 0.73, 2.2, 11.0}) CHECK(std::abs(pt.us(Y) - pe.us(Y)) < 2e-3);
  CHECK(pt.u_far() == doctest::Approx(0.5));
  std::remove(path4);
  std::remove(path10);
}
