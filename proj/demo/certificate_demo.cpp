// Walks the certificate path for the existing planes: the congruence, its
// solution, the Pontryagin numbers, and the integrality checks.

#include <iostream>

#include "qp2/classify.hpp"

int main(int argc, char** argv) {
  qp2::FactorStore store;
  store.load(qp2::bundled_factor_file());
  qp2::ClassifyOptions opt;
  opt.store = &store;

  std::vector<std::uint64_t> dims{8, 16, 32, 128, 256};
  if (argc > 1) dims.assign(1, std::stoull(argv[1]));

  for (auto n : dims) {
    const auto v = qp2::classify(n, opt);
    std::cout << "n = " << n << ": " << qp2::to_string(v.status) << '\n';
    if (!v.certificate) {
      if (v.witness) std::cout << "  " << qp2::describe(*v.witness) << '\n';
      continue;
    }
    const auto k = *v.k;
    const auto eq = qp2::build_equation(k);
    const auto& c = *v.certificate;
    std::cout << "  a xbar^2 = c (mod b) with b = " << eq.b << "\n  xbar = " << c.xbar << ", l = " << c.l << '\n';
    // x, y are the Pontryagin numbers p_k^2 = x^2 and p_2k = y
    std::cout << "  x = " << c.x << "\n  y = " << c.y << '\n';
    const auto r = qp2::check_plane_conditions(k, c.x, c.y);
    std::cout << "  signature " << r.signature << ", e1 " << r.e1_value << ", e1^2 " << r.e1e1_value << " -> "
              << (r.ok() ? "ok" : "FAILED") << '\n';
    if (k <= 4)
      std::cout << "  full lattice check: " << (qp2::hattori_stong_full_check(k, c.x, c.y) ? "ok" : "FAILED") << '\n';
    std::cout << "  recheck: " << (qp2::recheck(v) ? "ok" : "FAILED") << '\n';
  }
}
