#pragma once

// Verdict pipeline for a single dimension n, cheapest test first:
// shape filters, N_4k mod 8, small irregular primes and stored hints,
// a Jacobi screen, then local solvability over a verified factorization
// of the modulus. A solvable equation is turned into a certificate that
// is re-checked before Exists is reported.

#include <atomic>
#include <chrono>
#include <functional>
#include <thread>
#include <variant>

#include "qp2/obstruct.hpp"
#include "qp2/qrsolve.hpp"

namespace qp2 {

enum class Status { Exists, NotExists, Unknown };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Exists: return "exists";
    case Status::NotExists: return "not-exists";
    case Status::Unknown: return "unknown";
  }
  return "?";
}

namespace witness {
struct NotMultipleOfFour {};
struct NotEightK {};
struct WrongBinaryShape {
  unsigned weight = 0;
};
struct ModEight {
  unsigned residue = 0;
};
struct IrregularPrime {
  PrimeObstruction obstruction;
};
struct JacobiMinusOne {
  Integer a, b, c;
};
struct LocalUnsolvable {
  PrimePower pp;
  Integer a, c;
};
}  // namespace witness

using ObstructionWitness =
    std::variant<witness::NotMultipleOfFour, witness::NotEightK, witness::WrongBinaryShape, witness::ModEight,
                 witness::IrregularPrime, witness::JacobiMinusOne, witness::LocalUnsolvable>;

inline std::string witness_kind(const ObstructionWitness& w) {
  static const char* names[] = {"not-multiple-of-four", "not-eight-k", "wrong-binary-shape", "mod-eight",
                                "irregular-prime",      "jacobi-minus-one", "local-unsolvable"};
  return names[w.index()];
}

inline std::string describe(const ObstructionWitness& w) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, witness::NotMultipleOfFour>) return "n is not a multiple of 4";
        else if constexpr (std::is_same_v<T, witness::NotEightK>) return "n is not a multiple of 8";
        else if constexpr (std::is_same_v<T, witness::WrongBinaryShape>)
          return "k has binary weight " + std::to_string(v.weight) + " > 2";
        else if constexpr (std::is_same_v<T, witness::ModEight>)
          return "N_4k = " + std::to_string(v.residue) + " (mod 8)";
        else if constexpr (std::is_same_v<T, witness::IrregularPrime>)
          return to_string(v.obstruction.p) + " divides N_" + std::to_string(v.obstruction.n) + " (" +
                 to_string(v.obstruction.source) + ", " + to_string(v.obstruction.route) + ")";
        else if constexpr (std::is_same_v<T, witness::JacobiMinusOne>)
          return "Jacobi symbol of c/a modulo b is -1";
        else
          return "a x^2 = c has no solution modulo " + to_string(v.pp.p) + "^" + std::to_string(v.pp.r);
      },
      w);
}

/// CP^2: the only plane outside n = 8k. p_1 = 3, signature 1.
struct ComplexPlaneData {
  int p1 = 3;
  int signature = 1;
};

struct Evidence {
  std::string test;
  std::string outcome;
  bool decisive = false;
  double seconds = 0;
};

struct Verdict {
  std::uint64_t n = 0;
  std::optional<std::uint64_t> k;
  std::string shape;  // "2^a" or "2^b+2^a", empty if not applicable
  Status status = Status::Unknown;
  std::optional<Certificate> certificate;
  std::optional<ComplexPlaneData> complex_plane;
  std::optional<ObstructionWitness> witness;
  std::vector<Evidence> evidence;
  std::string missing;  // unfactored part of the modulus, for Unknown
  double seconds = 0;
};

struct ClassifyOptions {
  std::uint64_t scan_bound = kDefaultScanBound;
  const FactorStore* store = nullptr;
  BernoulliTable* table = nullptr;  // global table when null
  FactorBudget budget{};
  // keep running the cheap obstruction tests after a decision, for reports
  bool full_evidence = false;
};

namespace detail {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline std::string shape_string(std::uint64_t k) {
  auto s = shape_of(k);
  if (!s) return {};
  if (s->power_of_two) return "2^" + std::to_string(s->a);
  return "2^" + std::to_string(s->b) + "+2^" + std::to_string(s->a);
}

}  // namespace detail

inline Verdict classify(std::uint64_t n, const ClassifyOptions& opt = {}) {
  BernoulliTable& table = opt.table ? *opt.table : BernoulliTable::global();
  const auto started = std::chrono::steady_clock::now();
  detail::Stopwatch sw;
  Verdict v;
  v.n = n;
  auto finish = [&]() -> Verdict {
    v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return v;
  };
  auto note = [&](std::string test, std::string outcome, bool decisive) {
    v.evidence.push_back({std::move(test), std::move(outcome), decisive, sw.lap()});
  };
  auto reject = [&](ObstructionWitness w, const std::string& test) {
    note(test, describe(w), true);
    v.status = Status::NotExists;
    v.witness = std::move(w);
  };

  if (n == 0) throw DomainError("classify: n must be positive");
  if (n == 4) {
    v.status = Status::Exists;
    v.complex_plane = ComplexPlaneData{};
    note("dimension-4", "CP^2", true);
    return finish();
  }
  if (n % 4) {
    reject(witness::NotMultipleOfFour{}, "multiple-of-4");
    return finish();
  }
  if (n % 8) {
    reject(witness::NotEightK{}, "multiple-of-8");
    return finish();
  }
  const std::uint64_t k = n / 8;
  v.k = k;
  v.shape = detail::shape_string(k);
  if (binary_weight(k) > 2) {
    reject(witness::WrongBinaryShape{binary_weight(k)}, "binary-shape");
    return finish();
  }
  note("binary-shape", "k = " + v.shape, false);

  auto decided = [&] { return v.status != Status::Unknown; };

  if (auto r = mod8_test(k)) {
    reject(witness::ModEight{*r}, "mod-8");
  } else {
    note("mod-8", "N_4k = " + std::to_string(n_mod8_carlitz(k)) + " (mod 8)", false);
  }
  if (decided() && !opt.full_evidence) return finish();

  try {
    auto obs = find_prime_obstruction(k, opt.scan_bound, opt.store, table);
    if (obs && !decided()) {
      reject(witness::IrregularPrime{*obs}, "irregular-prime");
    } else if (obs) {
      note("irregular-prime", describe(witness::IrregularPrime{*obs}), false);
    } else {
      note("irregular-prime", "none below " + std::to_string(opt.scan_bound) + " and no stored hint", false);
    }
  } catch (const CapabilityError& e) {
    note("irregular-prime", std::string("hint not checkable: ") + e.what(), false);
  }
  if (decided()) return finish();

  QrEquation eq;
  try {
    eq = build_equation(k, table);
  } catch (const DomainError& e) {
    note("equation", e.what(), false);
    v.missing = "exact Bernoulli numbers beyond the configured limit";
    return finish();
  }
  note("equation", "a, b, c with gcd " + to_string(eq.gcd_removed) + " removed; b has " +
                       std::to_string(mpz_sizeinbase(eq.b.get_mpz_t(), 10)) + " digits",
       false);

  const auto screen = jacobi_screen(eq);
  if (screen == JacobiScreen::MinusOne) {
    reject(witness::JacobiMinusOne{eq.a, eq.b, eq.c}, "jacobi");
    return finish();
  }
  note("jacobi", to_string(screen), false);

  const FactorStore empty;
  auto fb = factors_of_B(eq, opt.store ? *opt.store : empty, opt.budget);
  note("factor-b", fb.complete() ? "complete: " + fb.provenance() : "partial: " + fb.provenance(), false);
  auto d = decide(eq, fb);
  switch (d.status) {
    case QrStatus::Unsolvable:
      reject(witness::LocalUnsolvable{*d.witness, eq.a, eq.c}, "local-solvability");
      break;
    case QrStatus::Undecided:
      note("local-solvability", "solvable at every known prime power; " +
                                    std::to_string(mpz_sizeinbase(d.missing.get_mpz_t(), 10)) +
                                    "-digit part of b unfactored",
           false);
      v.missing = to_string(d.missing);
      break;
    case QrStatus::Solvable:
      try {
        v.certificate = make_certificate(eq, d.xbar, table);
        v.status = Status::Exists;
        note("certificate", "x = " + to_string(v.certificate->x) + ", y = " + to_string(v.certificate->y), true);
      } catch (const CertificateError& e) {
        note("certificate", e.what(), false);
      }
      break;
  }
  return finish();
}

/// Multiples of 4 in [lo, hi], in order. Workers pull dimensions from a
/// shared counter; each result lands in its own slot.
inline std::vector<Verdict> classify_range(std::uint64_t lo, std::uint64_t hi, const ClassifyOptions& opt = {},
                                           unsigned jobs = 0,
                                           const std::function<void(const Verdict&)>& progress = {}) {
  if (lo > hi) throw DomainError("classify_range: lo > hi");
  std::vector<std::uint64_t> dims;
  for (std::uint64_t n = (lo + 3) / 4 * 4; n <= hi; n += 4)
    if (n > 0) dims.push_back(n);
  std::vector<Verdict> out(dims.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, std::max<std::size_t>(1, dims.size()));
  std::atomic<std::size_t> next{0};
  std::mutex progress_mu;
  std::exception_ptr failure;
  auto work = [&] {
    try {
      for (std::size_t i; (i = next++) < dims.size();) {
        out[i] = classify(dims[i], opt);
        if (progress) {
          std::lock_guard lock(progress_mu);
          progress(out[i]);
        }
      }
    } catch (...) {
      std::lock_guard lock(progress_mu);
      if (!failure) failure = std::current_exception();
      next = dims.size();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Independent re-check of a NotExists witness or an Exists certificate.
inline bool recheck(const Verdict& v, BernoulliTable& table = BernoulliTable::global()) {
  if (v.status == Status::Exists) {
    if (v.complex_plane) return v.n == 4;
    if (!v.certificate || !v.k) return false;
    const auto& c = *v.certificate;
    if (!check_plane_conditions(*v.k, c.x, c.y, table).ok()) return false;
    if (*v.k <= 4 && !hattori_stong_full_check(*v.k, c.x, c.y, table)) return false;
    return true;
  }
  if (v.status != Status::NotExists || !v.witness) return v.status == Status::Unknown;
  const std::uint64_t n = v.n;
  return std::visit(
      [&](const auto& w) -> bool {
        using T = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<T, witness::NotMultipleOfFour>) return n % 4 != 0;
        else if constexpr (std::is_same_v<T, witness::NotEightK>) return n % 4 == 0 && n % 8 != 0 && n != 4;
        else if constexpr (std::is_same_v<T, witness::WrongBinaryShape>)
          return n % 8 == 0 && binary_weight(n / 8) == w.weight && w.weight > 2;
        else if constexpr (std::is_same_v<T, witness::ModEight>) {
          if (n / 2 <= table.exact_limit())
            return mod_floor(table.get(n / 2).numerator, 8) == w.residue;
          return n_mod8_carlitz(n / 8) == w.residue && (w.residue == 3 || w.residue == 5);
        } else if constexpr (std::is_same_v<T, witness::IrregularPrime>) {
          const auto& o = w.obstruction;
          if (o.n != n / 2 || !is_pm3_mod8(o.p) || !is_prime(o.p)) return false;
          bool any = false;
          if (fits_u64(o.p) && to_u64(o.p) <= kDefaultVoronoiLimit) {
            const std::uint64_t p = to_u64(o.p);
            if (o.n % (p - 1) == 0 || divided_bernoulli_mod_p(o.n % (p - 1), p) != 0) return false;
            any = true;
          }
          if (o.n <= table.exact_limit()) {
            if (!divides(o.p, table.get(o.n).numerator)) return false;
            any = true;
          }
          return any;
        } else if constexpr (std::is_same_v<T, witness::JacobiMinusOne>) {
          if (gcd(w.a * w.c, w.b) != 1) return false;
          return jacobi(w.a, w.b) * jacobi(w.c, w.b) == -1 && w.b == build_equation(n / 8, table).b;
        } else {
          const auto eq = build_equation(n / 8, table);
          if (w.a != eq.a || w.c != eq.c || !is_prime(w.pp.p) || !divides(w.pp.value(), eq.b)) return false;
          // valuations, then Euler's criterion on the unit part (units lift by Hensel)
          const Integer m = w.pp.value();
          const Integer am = mod_floor(w.a, m), cm = mod_floor(w.c, m);
          const unsigned long r = w.pp.r;
          const unsigned long va = am == 0 ? r : std::min(valuation(am, w.pp.p), r);
          const unsigned long vc = cm == 0 ? r : std::min(valuation(cm, w.pp.p), r);
          if (vc >= r) return false;
          if (va > vc || (vc - va) % 2) return true;
          const Integer unit = mod_floor(am / pow_ui(w.pp.p, va) * (cm / pow_ui(w.pp.p, vc)), w.pp.p);
          return powmod(unit, (w.pp.p - 1) / 2, w.pp.p) == w.pp.p - 1;
        }
      },
      *v.witness);
}

}  // namespace qp2
