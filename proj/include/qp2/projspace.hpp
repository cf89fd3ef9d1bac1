#pragma once

// Rational projective spaces QP^n_d (cohomology Q[a]/a^(n+1), |a| = d) obtained
// from a rational projective plane QP^2_{4k}: keep only p_k and p_2k and
// regrade, giving QP^{2m}_{4k/m} whenever 4k/m is even.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "qp2/errors.hpp"

namespace qp2 {

struct ProjSpace {
  std::uint64_t n = 2;  // truncation length
  std::uint64_t d = 0;  // generator degree
  std::uint64_t m = 1;
  bool self = false;         // the plane itself (m = 1)
  bool degree_two = false;   // d = 2: allowed by evenness alone
  std::uint64_t total_dim() const { return n * d; }
  std::string name() const { return "QP^" + std::to_string(n) + "_" + std::to_string(d); }
  bool operator==(const ProjSpace&) const = default;
};

/// Spaces derived from an existing QP^2 in dimension 8k, ordered by m.
inline std::vector<ProjSpace> derive(std::uint64_t k, bool plane_exists) {
  if (k == 0) throw DomainError("derive: k must be positive");
  if (!plane_exists) {
    throw DomainError("derive: no rational projective plane known in dimension " + std::to_string(8 * k));
  }
  std::vector<ProjSpace> out;
  for (std::uint64_t m = 1; m <= 4 * k; ++m) {
    if ((4 * k) % m || ((4 * k) / m) % 2) continue;
    const std::uint64_t d = 4 * k / m;
    out.push_back({2 * m, d, m, m == 1, d == 2});
  }
  return out;
}

/// Generator degree -> lengths n, dropping the planes themselves.
inline std::map<std::uint64_t, std::set<std::uint64_t>> spaces_by_degree(const std::vector<ProjSpace>& spaces) {
  std::map<std::uint64_t, std::set<std::uint64_t>> out;
  for (const auto& s : spaces)
    if (!s.self) out[s.d].insert(s.n);
  return out;
}

/// Known independently of this construction; listed, not derived.
inline constexpr const char* kOddCayleyAnaloguesNote =
    "QP^n_8 exists for every odd n > 2 (rational Cayley plane analogues, earlier literature); "
    "listed as known context, not derived here.";

}  // namespace qp2
