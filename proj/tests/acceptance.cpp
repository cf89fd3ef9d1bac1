// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failing criteria.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <tuple>

#include "qp2/report.hpp"

namespace {

using qp2::Integer;
using qp2::Rational;
using qp2::Status;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;  // keep the first failure
    pass = false;
  }
  void require(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

const qp2::FactorStore& bundled() {
  static const qp2::FactorStore store = [] {
    qp2::FactorStore s;
    auto r = s.load(qp2::bundled_factor_file());
    if (!r.errors.empty()) throw qp2::VerificationError("bundled factor file", r.errors.front());
    return s;
  }();
  return store;
}

qp2::ClassifyOptions with_store() {
  qp2::ClassifyOptions o;
  o.store = &bundled();
  return o;
}

std::uint64_t rational_mod_p(const Rational& q, std::uint64_t p) {
  const Integer P = qp2::from_u64(p);
  return qp2::to_u64(qp2::mod_floor(q.get_num() * *qp2::inverse_mod(qp2::mod_floor(q.get_den(), P), P), P));
}

Outcome existence_band() {
  Outcome o;
  std::set<std::uint64_t> exists;
  for (const auto& v : qp2::classify_range(4, 512, with_store())) {
    if (v.status == Status::Unknown) o.fail("unknown at " + std::to_string(v.n));
    if (v.status == Status::Exists) exists.insert(v.n);
    if (!qp2::recheck(v)) o.fail("recheck failed at " + std::to_string(v.n));
  }
  o.require(exists == std::set<std::uint64_t>{4, 8, 16, 32, 128, 256}, "wrong existence set");
  if (o.pass) o.detail = "exists at 4 8 16 32 128 256";
  return o;
}

Outcome high_band() {
  Outcome o;
  std::set<std::uint64_t> unknown;
  std::size_t count = 0;
  for (const auto& v : qp2::classify_range(513, 8191, with_store())) {
    ++count;
    if (v.status == Status::Exists) o.fail("exists at " + std::to_string(v.n));
    if (v.status == Status::Unknown) unknown.insert(v.n);
  }
  o.require(unknown == std::set<std::uint64_t>{544, 1024, 2048, 4160, 4352}, "wrong unknown set");
  if (o.pass) o.detail = std::to_string(count) + " dimensions, unknown at 544 1024 2048 4160 4352";
  return o;
}

Outcome certificates() {
  Outcome o;
  for (std::uint64_t n : {8, 16, 32, 128, 256}) {
    const auto v = qp2::classify(n, with_store());
    if (!v.certificate) {
      o.fail("no certificate at " + std::to_string(n));
      continue;
    }
    o.require(qp2::check_plane_conditions(n / 8, v.certificate->x, v.certificate->y).ok(),
              "certificate fails at " + std::to_string(n));
    if (n <= 32)
      o.require(qp2::hattori_stong_full_check(n / 8, v.certificate->x, v.certificate->y),
                "full integrality fails at " + std::to_string(n));
  }
  // the classical planes, sign of x being a representative choice
  for (auto [k, x, y] : {std::tuple{1, 2, 7}, {2, 6, 39}}) {
    o.require(qp2::check_plane_conditions(k, x, y).ok() && qp2::hattori_stong_full_check(k, x, y),
              "classical pair rejected for k = " + std::to_string(k));
  }
  if (o.pass) o.detail = "8 16 32 128 256 verified; (2,7) and (6,39) verified";
  return o;
}

Outcome prime_table() {
  Outcome o;
  const std::vector<std::pair<std::string, std::string>> expected{
      {"(5,1)", "29835096585483934621"}, {"(5,5)", "67"}, {"(6,0)", "15897346573"}, {"(6,2)", "?"},
      {"(6,6)", "?"}, {"(7,1)", "67"}, {"(7,3)", "811"}, {"(7,7)", "?"}, {"(8,0)", "26251"}, {"(8,2)", "37"},
      {"(8,4)", "59"}, {"(8,8)", "37"}, {"(9,0)", "4349"}, {"(9,1)", "1669"}, {"(9,3)", "?"}, {"(9,5)", "?"},
      {"(9,9)", "?"}};
  const auto rows = qp2::prime_table(256, 8192, qp2::kDefaultScanBound, &bundled());
  if (rows.size() != expected.size()) {
    o.fail("expected " + std::to_string(expected.size()) + " rows, got " + std::to_string(rows.size()));
    return o;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string prime = r.obstruction ? qp2::to_string(r.obstruction->p) : "?";
    o.require(r.label() == expected[i].first && prime == expected[i].second,
              "row " + r.label() + " has prime " + prime);
    if (!r.obstruction)
      o.require(qp2::classify(r.dimension(), with_store()).status == Status::Unknown,
                "row " + r.label() + " not reported unknown");
  }
  if (o.pass) o.detail = "17 rows match";
  return o;
}

Outcome kummer_table() {
  Outcome o;
  using C = std::vector<qp2::ResidueClass>;
  auto classes = [](std::uint64_t p, std::uint64_t m) { return qp2::kummer_family({p, m}).classes; };
  o.require(classes(37, 32) == C{{2, 2}, {0, 4}}, "37 classes");
  o.require(classes(67, 58) == C{{5, 5}, {1, 7}}, "67 classes");
  o.require(classes(101, 68) == C{{12, 12}, {0, 4}, {2, 19}, {3, 14}, {6, 7}, {8, 16}, {10, 15}, {11, 18}},
            "101 classes");
  for (auto [p, m] : std::vector<std::pair<int, int>>{{131, 22}, {149, 130}, {157, 62}, {157, 110}, {307, 88}})
    o.require(classes(p, m).empty(), std::to_string(p) + " not empty");
  const auto f37 = qp2::kummer_family({37, 32});
  o.require(qp2::dimension_family(f37, f37.classes[0]) == "2^{6r+5}+2^{6s+5}" &&
                qp2::dimension_family(f37, f37.classes[1]) == "2^{6r+3}+2^{6s+7}",
            "37 family strings");
  o.require(qp2::power_of_two_family(f37) == "2^{6r+6}", "37 power family");
  o.require(qp2::power_of_two_family(qp2::kummer_family({67, 58})) == "2^{10r+9}", "67 power family");
  if (o.pass) o.detail = "classes, empties and family strings match";
  return o;
}

Outcome carlitz() {
  Outcome o;
  for (unsigned i : qp2::kCarlitzGaps)
    for (unsigned a = 0; a <= 8; ++a) {
      const std::uint64_t k = (1ull << (a + i)) + (1ull << a);
      const auto w = qp2::mod8_test(k);
      o.require(w && (*w == 3 || *w == 5), "family member " + std::to_string(k) + " not obstructed");
      if (4 * k <= 512) {
        const auto r = mpz_fdiv_ui(qp2::divided_bernoulli(4 * k).numerator.get_mpz_t(), 8);
        o.require(w && r == *w, "exact residue differs at k = " + std::to_string(k));
      }
    }
  for (std::uint64_t k = 1; k <= 128; ++k)
    o.require(qp2::n_mod8_carlitz(k) == mpz_fdiv_ui(qp2::divided_bernoulli(4 * k).numerator.get_mpz_t(), 8),
              "shortcut differs at k = " + std::to_string(k));
  if (o.pass) o.detail = "45 family members, k <= 128 shortcut exact";
  return o;
}

Outcome spin() {
  Outcome o;
  for (std::uint64_t n = 8; n <= 8192; n += 8)
    o.require(qp2::spin_classify(n).possible == (n == 8 || n == 16), "wrong verdict at " + std::to_string(n));
  for (std::uint64_t k = 1; k <= (1u << 20); ++k)
    if (qp2::spin_bound(k, 1)) o.require(k <= 2, "bound survivor k = " + std::to_string(k));
  if (o.pass) o.detail = "possible only at 8 and 16; survivors k = 1, 2";
  return o;
}

Outcome projective_spaces() {
  Outcome o;
  std::vector<qp2::ProjSpace> all;
  for (std::uint64_t n : {32, 128, 256}) {
    const auto v = qp2::classify(n, with_store());
    o.require(v.status == Status::Exists, "no plane at " + std::to_string(n));
    const auto d = qp2::derive(n / 8, v.status == Status::Exists);
    all.insert(all.end(), d.begin(), d.end());
  }
  using S = std::set<std::uint64_t>;
  const std::map<std::uint64_t, S> expected{{8, {4, 16, 32}}, {16, {8, 16}}, {32, {4, 8}}, {64, {4}}};
  const auto by = qp2::spaces_by_degree(all);
  for (std::uint64_t d : {8, 16, 32, 64})
    o.require(by.count(d) && by.at(d) == expected.at(d), "degree " + std::to_string(d) + " list differs");
  if (o.pass) o.detail = "d8: 4 16 32; d16: 8 16; d32: 4 8; d64: 4";
  return o;
}

Outcome properties() {
  Outcome o;
  for (unsigned long l = 1; l <= 64; ++l)
    for (unsigned long k = 1; k <= 64; ++k)
      o.require(qp2::divides(Integer(l), qp2::M(l, k)), "l does not divide M_l(k)");
  for (unsigned long k = 1; k <= 200; ++k) {
    Integer fact;
    mpz_fac_ui(fact.get_mpz_t(), 4 * k - 1);
    o.require(qp2::divides(qp2::vsc_denominator(2 * k).odd, qp2::odd_part(fact)), "odd denominator divisibility");
  }
  for (unsigned long a = 1; a <= 10; ++a)
    for (unsigned long k = 1; k <= 40; ++k) {
      Rational v = Rational(qp2::pow_ui(Integer(a), 2 * k - 1) * (qp2::pow_ui(Integer(a), 2 * k) - 1)) *
                   qp2::abs_bernoulli(2 * k) / Rational(2 * k);
      v.canonicalize();
      o.require(qp2::in_z_half(v), "odd exponent variant outside Z[1/2]");
    }
  for (unsigned long k = 1; k <= 4; ++k)
    for (unsigned long l = 1; l <= 2 * k; ++l)
      o.require(qp2::e_class_bruteforce(l, k) == qp2::e_class_formula(l, k), "e class formula differs");
  for (unsigned long k = 1; k <= 3; ++k)
    o.require(qp2::classify(8 * k).status == (qp2::brute_force_small(k, 60).empty() ? Status::NotExists
                                                                                    : Status::Exists),
              "brute force disagrees at k = " + std::to_string(k));
  for (std::uint32_t p : qp2::primes_up_to(200)) {
    if (p < 5) continue;
    for (std::uint64_t m = 2; m <= 300; m += 2) {
      if (m % (p - 1) == 0) continue;
      const auto exact = rational_mod_p(qp2::divided_bernoulli(m).value(), p);
      o.require(qp2::divided_bernoulli_mod_p(m, p) == exact, "mod p value differs");
      o.require(rational_mod_p(qp2::divided_bernoulli(m % (p - 1)).value(), p) == exact, "Kummer congruence fails");
    }
  }
  if (o.pass) o.detail = "six suites hold";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"existence band 4..512", existence_band},
      {"high band 513..8191", high_band},
      {"certificates", certificates},
      {"prime table", prime_table},
      {"irregular pair families", kummer_table},
      {"mod 8 families", carlitz},
      {"spin planes", spin},
      {"derived projective spaces", projective_spaces},
      {"property suites", properties},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << r.detail << " ("
              << secs << " s)" << std::endl;
  }
  return failures;
}
