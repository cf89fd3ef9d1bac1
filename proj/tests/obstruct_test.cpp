#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <tuple>

#include "qp2/obstruct.hpp"

namespace {

using qp2::Integer;

const qp2::FactorStore& bundled() {
  static const qp2::FactorStore store = [] {
    qp2::FactorStore s;
#ifdef QP2_DATA_DIR
    s.load(qp2::bundled_factor_file());
#endif
    return s;
  }();
  return store;
}

TEST(Mod8, Examples) {
  EXPECT_EQ(qp2::mod8_test(3), 3u);  // N_12 = 691
  EXPECT_FALSE(qp2::mod8_test(2));   // N_8 = 1
  EXPECT_TRUE(qp2::mod8_test(6));
  EXPECT_THROW(qp2::mod8_test(0), qp2::DomainError);
}

TEST(Mod8, CarlitzFamilyMembership) {
  EXPECT_EQ(qp2::carlitz_family_member(3), (qp2::CarlitzMember{1, 0}));
  EXPECT_EQ(qp2::carlitz_family_member(33), (qp2::CarlitzMember{5, 0}));
  EXPECT_FALSE(qp2::carlitz_family_member(4));
  EXPECT_FALSE(qp2::carlitz_family_member(17));  // gap 4
  EXPECT_FALSE(qp2::carlitz_family_member(7));
}

TEST(Mod8, FamilyAlwaysFires) {
  auto& table = qp2::BernoulliTable::global();
  for (unsigned i : qp2::kCarlitzGaps)
    for (unsigned a = 0; a <= 8; ++a) {
      const std::uint64_t k = (1ull << (a + i)) + (1ull << a);
      auto w = qp2::mod8_test(k);
      ASSERT_TRUE(w) << k;
      if (4 * k <= 512) {
        const auto& b = qp2::divided_bernoulli(4 * k, table);
        EXPECT_EQ(qp2::mod_floor(b.numerator, 8), *w) << k;
      }
    }
}

TEST(Scan, Examples) {
  EXPECT_EQ(qp2::scan_obstructing_prime(64, 10000), 67u);
  EXPECT_EQ(qp2::scan_obstructing_prime(260, 10000), 37u);
  EXPECT_FALSE(qp2::scan_obstructing_prime(68, 30000));
  EXPECT_FALSE(qp2::scan_obstructing_prime(64, 60));  // bound below the witness
}

TEST(Scan, HintVerification) {
  EXPECT_TRUE(qp2::verify_prime_hint(34, Integer("29835096585483934621")));
  EXPECT_TRUE(qp2::verify_prime_hint(65, Integer("15897346573")));
  EXPECT_FALSE(qp2::verify_prime_hint(64, 37));
  EXPECT_FALSE(qp2::verify_prime_hint(64, 7));  // 7 = -1 mod 8
}

TEST(Scan, SoundAgainstExactNumerators) {
  auto& table = qp2::BernoulliTable::global();
  for (std::uint64_t k = 1; 4 * k <= 600; ++k) {
    auto p = qp2::scan_obstructing_prime(k, 2000);
    if (!p) continue;
    EXPECT_TRUE(qp2::is_pm3_mod8(*p));
    EXPECT_TRUE(qp2::divides(qp2::from_u64(*p), qp2::divided_bernoulli(4 * k, table).numerator)) << k;
  }
}

TEST(Scan, HintsFromStore) {
  auto h = qp2::hint_obstructions(34, bundled());
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].p, Integer("29835096585483934621"));
  EXPECT_EQ(h[0].route, qp2::DivisibilityRoute::Exact);
  EXPECT_TRUE(qp2::hint_obstructions(68, bundled()).empty());
  // N_64's and N_128's factors are all = +-1 mod 8
  EXPECT_TRUE(qp2::hint_obstructions(16, bundled()).empty());
  EXPECT_TRUE(qp2::hint_obstructions(32, bundled()).empty());
}

TEST(Kummer, IrregularPairValidation) {
  EXPECT_NO_THROW(qp2::make_irregular_pair(37, 32));
  EXPECT_THROW(qp2::make_irregular_pair(37, 30), qp2::DomainError);
  EXPECT_NO_THROW(qp2::make_irregular_pair(691, 12));
  EXPECT_THROW(qp2::make_irregular_pair(41, 32), qp2::DomainError);   // 41 = 1 mod 8
}

TEST(Kummer, TabulatedPairsAreAllBelow400) {
  // the published list omits 379 | N_100 (379 has irregularity index 2)
  auto expected = qp2::tabulated_pairs();
  expected.insert(expected.end() - 2, {379, 100});
  EXPECT_EQ(qp2::irregular_pairs_below(400), expected);
}

std::vector<qp2::ResidueClass> classes(std::uint64_t p, std::uint64_t m) {
  return qp2::kummer_family(qp2::make_irregular_pair(p, m)).classes;
}

TEST(Kummer, ClassListsVerbatim) {
  using C = std::vector<qp2::ResidueClass>;
  EXPECT_EQ(classes(37, 32), (C{{2, 2}, {0, 4}}));
  EXPECT_EQ(classes(67, 58), (C{{5, 5}, {1, 7}}));
  EXPECT_EQ(classes(101, 68), (C{{12, 12}, {0, 4}, {2, 19}, {3, 14}, {6, 7}, {8, 16}, {10, 15}, {11, 18}}));
  EXPECT_EQ(classes(59, 44), (C{{24, 24}, {0, 23}, {1, 10}, {2, 12}, {3, 5}, {4, 8}, {6, 22},
                                {7, 14}, {9, 17}, {11, 26}, {13, 19}, {15, 18}, {16, 27}, {20, 21}}));
  EXPECT_EQ(classes(283, 20), (C{{0, 2}, {4, 40}, {14, 22}, {16, 30}, {18, 34}, {24, 42}}));
  EXPECT_EQ(classes(293, 156), (C{{1, 8}}));
  EXPECT_EQ(classes(379, 174), (C{{2, 9}, {3, 14}, {8, 15}}));
  // The printed 389 row has (3,39), which gives 4(2^3+2^39) = 104 (mod 388), where
  // (5,39) is meant, and leaves out (0,47) and (37,43).
  EXPECT_EQ(classes(389, 200), (C{{17, 17}, {0, 47}, {1, 23}, {5, 39}, {8, 45}, {10, 26}, {13, 20},
                                  {16, 35}, {19, 42}, {28, 31}, {36, 41}, {37, 43}}));
  EXPECT_NE(4 * ((1ull << 3) + (1ull << 39)) % 388, 200u);
  // the 347 row is truncated; its printed classes must all be present
  auto c347 = classes(347, 280);
  for (auto c : C{{134, 134}, {0, 47}, {26, 141}})
    EXPECT_NE(std::find(c347.begin(), c347.end(), c), c347.end()) << c.a << "," << c.b;
  EXPECT_EQ(c347[0], (qp2::ResidueClass{134, 134}));

  for (auto [p, m] : std::vector<std::pair<int, int>>{{131, 22}, {149, 130}, {157, 62}, {157, 110}, {307, 88}})
    EXPECT_TRUE(classes(p, m).empty()) << p << " " << m;
}

TEST(Kummer, Periods) {
  const std::map<std::uint64_t, unsigned> expected{{37, 6},   {59, 28}, {67, 10},  {101, 20}, {283, 46},
                                                   {293, 9},  {347, 172}, {379, 18}, {389, 48}};
  for (const auto& pair : qp2::tabulated_pairs()) {
    auto f = qp2::kummer_family(pair);
    EXPECT_EQ(f.preperiod, 0u) << pair.p;  // p-1 has 2-adic valuation at most 2
    if (expected.count(pair.p)) EXPECT_EQ(f.period, expected.at(pair.p)) << pair.p;
  }
}

TEST(Kummer, RandomMembersAreObstructed) {
  std::mt19937_64 rng(20240601);
  for (const auto& pair : qp2::tabulated_pairs()) {
    auto f = qp2::kummer_family(pair);
    for (const auto& c : f.classes) {
      for (int t = 0; t < 20; ++t) {
        const unsigned a = c.a + f.period * (rng() % 3);
        const unsigned b = c.b + f.period * (rng() % 3);
        if (std::max(a, b) > 58) continue;
        const std::uint64_t k = (1ull << a) + (1ull << b);
        ASSERT_EQ(4 * k % (pair.p - 1), pair.m) << pair.p << " " << a << " " << b;
        ASSERT_TRUE(f.covers(k));
        ASSERT_TRUE(qp2::divides_numerator(qp2::from_u64(pair.p), 4 * k).divides);
        if (4 * k <= 2048)
          EXPECT_TRUE(qp2::divides(qp2::from_u64(pair.p), qp2::divided_bernoulli(4 * k).numerator));
      }
    }
  }
}

TEST(Kummer, CoversExactlyTheResidueCondition) {
  for (const auto& pair : qp2::tabulated_pairs()) {
    auto f = qp2::kummer_family(pair);
    for (unsigned a = 0; a < 50; ++a)
      for (unsigned b = a; b < 50; ++b) {
        const std::uint64_t k = (1ull << a) + (1ull << b);
        EXPECT_EQ(f.covers(k), 4 * k % (pair.p - 1) == pair.m) << pair.p << " " << a << " " << b;
      }
  }
}

TEST(Kummer, FamilyStrings) {
  auto f37 = qp2::kummer_family({37, 32});
  EXPECT_EQ(qp2::dimension_family(f37, f37.classes[0]), "2^{6r+5}+2^{6s+5}");
  EXPECT_EQ(qp2::dimension_family(f37, f37.classes[1]), "2^{6r+3}+2^{6s+7}");
  auto f59 = qp2::kummer_family({59, 44});
  EXPECT_EQ(qp2::dimension_family(f59, f59.classes[1]), "2^{28r+3}+2^{28s+26}");
  auto f283 = qp2::kummer_family({283, 20});
  EXPECT_EQ(qp2::dimension_family(f283, f283.classes[1]), "2^{46r+7}+2^{46s+43}");
  auto f293 = qp2::kummer_family({293, 156});
  EXPECT_EQ(qp2::dimension_family(f293, f293.classes[0]), "2^{9r+4}+2^{9s+11}");
  EXPECT_FALSE(qp2::power_of_two_family(f293));

  std::vector<std::string> powers;
  for (std::uint64_t p : {37, 67, 101, 59, 389, 347}) {
    for (const auto& pair : qp2::tabulated_pairs())
      if (pair.p == p) powers.push_back(*qp2::power_of_two_family(qp2::kummer_family(pair)));
  }
  EXPECT_EQ(powers, (std::vector<std::string>{"2^{6r+6}", "2^{10r+9}", "2^{20r+16}", "2^{28r+28}",
                                              "2^{48r+21}", "2^{172r+138}"}));
}

TEST(Kummer, FamilyOf37MatchesDimensionSet) {
  auto f = qp2::kummer_family({37, 32});
  std::set<std::uint64_t> dims;
  for (unsigned r = 0; 6 * r + 7 < 62; ++r)
    for (unsigned s = 0; 6 * s + 7 < 62; ++s) {
      dims.insert((1ull << (6 * r + 5)) + (1ull << (6 * s + 5)));
      dims.insert((1ull << (6 * r + 3)) + (1ull << (6 * s + 7)));
    }
  for (unsigned a = 0; a + 3 < 59; ++a)
    for (unsigned b = a; b + 3 < 59; ++b) {
      const std::uint64_t k = (1ull << a) + (1ull << b);
      EXPECT_EQ(f.covers(k), dims.count(8 * k) == 1) << a << " " << b;
    }
}

TEST(PrimeTable, RowsAndPrimes) {
  auto rows = qp2::prime_table(256, 8192, qp2::kDefaultScanBound, &bundled());
  const std::vector<std::tuple<std::string, std::string, std::uint64_t>> expected{
      {"(5,1)", "29835096585483934621", 272}, {"(5,5)", "67", 512},   {"(6,0)", "15897346573", 520},
      {"(6,2)", "?", 544},                    {"(6,6)", "?", 1024},   {"(7,1)", "67", 1040},
      {"(7,3)", "811", 1088},                 {"(7,7)", "?", 2048},   {"(8,0)", "26251", 2056},
      {"(8,2)", "37", 2080},                  {"(8,4)", "59", 2176},  {"(8,8)", "37", 4096},
      {"(9,0)", "4349", 4104},                {"(9,1)", "1669", 4112}, {"(9,3)", "?", 4160},
      {"(9,5)", "?", 4352},                   {"(9,9)", "?", 8192}};
  ASSERT_EQ(rows.size(), expected.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].label(), std::get<0>(expected[i]));
    EXPECT_EQ(rows[i].obstruction ? qp2::to_string(rows[i].obstruction->p) : "?", std::get<1>(expected[i]))
        << rows[i].dimension();
    EXPECT_EQ(rows[i].dimension(), std::get<2>(expected[i]));
  }
  const auto md = qp2::render_prime_table(rows);
  EXPECT_NE(md.find("| (7,3) | 811 | 1088 | No |"), std::string::npos);
  EXPECT_NE(md.find("| (6,2) | ? | 544 | ? |"), std::string::npos);
}

TEST(KummerTable, Rendering) {
  std::vector<qp2::KummerFamily> fams;
  for (const auto& pair : qp2::tabulated_pairs()) fams.push_back(qp2::kummer_family(pair));
  const auto md = qp2::render_kummer_table(fams);
  EXPECT_NE(md.find("| 37 \\| N_32 | (2,2); (0,4) (mod 6) | 2^{6r+5}+2^{6s+5}; 2^{6r+3}+2^{6s+7} |"),
            std::string::npos);
  EXPECT_NE(md.find("| 157 \\| N_62 and N_110 | no such (a,b) |"), std::string::npos);
}

}  // namespace
