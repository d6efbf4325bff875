#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ibig/oracle.hpp"
#include "ibig/oracle_check.hpp"

using namespace ibig;

namespace {

// Random assignment with a few focal sets over a small frame; theta always
// keeps some mass so combinations never conflict totally.
OracleAssignment random_assignment(std::mt19937_64& rng, int width) {
  OracleAssignment a{width, {}};
  const int foci = 1 + static_cast<int>(rng() % 4);
  double total = 0.1;
  a.masses[a.theta()] = 0.1;
  for (int i = 0; i < foci; ++i) {
    std::uint32_t focus = 0;
    while (focus == 0) focus = static_cast<std::uint32_t>(rng()) & a.theta();
    const double m = 0.05 + unit_draw(rng);
    a.masses[focus] += m;
    total += m;
  }
  for (auto& [f, m] : a.masses) m /= total;
  return a;
}

double distance(const OracleAssignment& a, const OracleAssignment& b) {
  double d = 0.0;
  for (const auto& [f, m] : a.masses) d = std::max(d, std::abs(m - b[f]));
  for (const auto& [f, m] : b.masses) d = std::max(d, std::abs(m - a[f]));
  return d;
}

}  // namespace

TEST(Oracle, VacuousIsIdentity) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_assignment(rng, 4);
    EXPECT_LE(distance(dempster(a, OracleAssignment::vacuous(4)), a), algebra_tolerance);
    EXPECT_LE(distance(dempster(OracleAssignment::vacuous(4), a), a), algebra_tolerance);
  }
}

TEST(Oracle, ComplementaryFoci) {
  // A = {a}, A^c = {b, c}
  const auto r = oracle_combine({OracleAssignment::simple_support(3, 0b001, 0.6),
                                 OracleAssignment::simple_support(3, 0b110, 0.5)});
  EXPECT_NEAR(r[0b001], 0.3 / 0.7, algebra_tolerance);
  EXPECT_NEAR(r[0b110], 0.2 / 0.7, algebra_tolerance);
  EXPECT_NEAR(r[0b111], 0.2 / 0.7, algebra_tolerance);
  EXPECT_EQ(r.masses.size(), 3u);
}

TEST(Oracle, PermutationInvariant) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    std::vector<OracleAssignment> list;
    for (int i = 0; i < 3; ++i) list.push_back(random_assignment(rng, 5));
    const auto base = oracle_combine(list);
    std::vector<int> idx{0, 1, 2};
    while (std::next_permutation(idx.begin(), idx.end())) {
      const auto r = oracle_combine({list[idx[0]], list[idx[1]], list[idx[2]]});
      EXPECT_LE(distance(base, r), algebra_tolerance);
    }
  }
}

TEST(Oracle, TotalConflict) {
  EXPECT_THROW(dempster(OracleAssignment::simple_support(2, 0b01, 1.0), OracleAssignment::simple_support(2, 0b10, 1.0)),
               ConflictError);
}

TEST(Oracle, FrameLimits) {
  EXPECT_THROW(oracle_combine({OracleAssignment::vacuous(13)}), SizeError);
  EXPECT_NO_THROW(oracle_combine({OracleAssignment::vacuous(13)}, 13));
  EXPECT_THROW(oracle_combine(std::vector<OracleAssignment>{}), DomainError);
  EXPECT_THROW(dempster(OracleAssignment::vacuous(2), OracleAssignment::vacuous(3)), DomainError);
}

TEST(Oracle, BeliefSumsSubsets) {
  OracleAssignment a{3, {{0b001, 0.2}, {0b011, 0.3}, {0b110, 0.1}, {0b111, 0.4}}};
  EXPECT_NEAR(oracle_belief(a, 0b011), 0.5, algebra_tolerance);
  EXPECT_NEAR(oracle_belief(a, 0b111), 1.0, algebra_tolerance);
  EXPECT_NEAR(oracle_belief(a, 0b100), 0.0, algebra_tolerance);
}
