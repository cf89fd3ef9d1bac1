// qp2: command-line front end for the rational projective plane classifier.
//
// Exit codes: 0 success, 1 usage error, 2 data verification failure
// (rejected factor records, failing certificate).

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "qp2/report.hpp"

namespace {

enum class Format { Markdown, Json, Tsv };

struct Settings {
  std::uint64_t scan_bound = qp2::kDefaultScanBound;
  std::vector<std::string> factor_files;
  unsigned long exact_limit = qp2::BernoulliTable::kDefaultExactLimit;
  bool json = false, markdown = false, tsv = false;
  unsigned jobs = 0;
  Format format() const { return json ? Format::Json : tsv ? Format::Tsv : Format::Markdown; }
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::filesystem::path cache_dir() {
  if (const char* d = std::getenv("QP_CACHE_DIR"); d && *d) return d;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "qp2";
  if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "qp2";
  return std::filesystem::temp_directory_path() / "qp2-cache";
}

// The cache only saves recomputation; a bad file is reported and ignored.
class BernoulliCache {
 public:
  explicit BernoulliCache(qp2::BernoulliTable& t) : table_(t), path_(cache_dir() / "bernoulli.tsv") {
    try {
      table_.load(path_);
    } catch (const std::exception& e) {
      std::cerr << "warning: ignoring Bernoulli cache " << path_ << ": " << e.what() << '\n';
    }
    start_ = table_.computed_through();
  }
  ~BernoulliCache() {
    if (table_.computed_through() <= start_) return;
    try {
      std::filesystem::create_directories(path_.parent_path());
      table_.save(path_);
    } catch (const std::exception& e) {
      std::cerr << "warning: could not write Bernoulli cache " << path_ << ": " << e.what() << '\n';
    }
  }

 private:
  qp2::BernoulliTable& table_;
  std::filesystem::path path_;
  unsigned long start_ = 0;
};

qp2::FactorStore load_store(const Settings& s) {
  qp2::FactorStore store;
  std::vector<std::filesystem::path> files{qp2::bundled_factor_file()};
  for (const auto& f : s.factor_files) files.emplace_back(f);
  std::vector<std::string> errors;
  for (const auto& f : files) {
    if (!std::filesystem::exists(f)) {
      errors.push_back(f.string() + ": no such file");
      continue;
    }
    auto r = store.load(f);
    for (auto& e : r.errors) errors.push_back(f.string() + ": " + e);
  }
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += e + "\n";
    throw DataError(msg);
  }
  return store;
}

qp2::ClassifyOptions options(const Settings& s, const qp2::FactorStore& store) {
  qp2::ClassifyOptions o;
  o.scan_bound = s.scan_bound;
  o.store = &store;
  return o;
}

std::uint64_t plane_k(std::uint64_t n) {
  if (n == 0 || n % 8) throw CLI::ValidationError("dimension", "must be a positive multiple of 8");
  return n / 8;
}

void print_verdict(const qp2::Verdict& v, Format f) {
  if (f == Format::Json) {
    std::cout << qp2::to_json(v).dump(2) << '\n';
    return;
  }
  if (f == Format::Tsv) {
    std::cout << qp2::to_tsv({v});
    return;
  }
  std::cout << "dimension " << v.n << ": " << qp2::to_string(v.status) << '\n';
  if (v.k) std::cout << "k = " << *v.k << (v.shape.empty() ? "" : " = " + v.shape) << '\n';
  if (v.witness) std::cout << "witness: " << qp2::describe(*v.witness) << '\n';
  if (v.certificate) {
    const auto& c = *v.certificate;
    std::cout << "certificate: xbar = " << c.xbar << ", l = " << c.l << "\n  x = p_k^2 root = " << c.x
              << "\n  y = p_2k = " << c.y << '\n';
  }
  if (v.complex_plane) std::cout << "CP^2: p_1 = 3, signature 1\n";
  if (!v.missing.empty()) std::cout << "missing: " << v.missing << '\n';
  std::cout << "\n| test | outcome | decisive | seconds |\n|---|---|---|---|\n";
  for (const auto& e : v.evidence)
    std::cout << "| " << e.test << " | " << e.outcome << " | " << (e.decisive ? "yes" : "") << " | " << e.seconds
              << " |\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Existence of rational projective planes by dimension"};
  app.require_subcommand(1);
  Settings s;
  app.add_option("--scan-bound", s.scan_bound, "largest prime tried against N_4k")->capture_default_str();
  app.add_option("--factors", s.factor_files, "extra factor file (repeatable)")->check(CLI::ExistingFile);
  app.add_option("--exact-limit", s.exact_limit, "largest exact Bernoulli index")->capture_default_str();
  auto* fj = app.add_flag("--json", s.json, "JSON output");
  auto* fm = app.add_flag("--markdown", s.markdown, "markdown output (default)");
  auto* ft = app.add_flag("--tsv", s.tsv, "tab-separated output");
  fj->excludes(fm, ft);
  fm->excludes(ft);
  app.add_option("--jobs", s.jobs, "worker threads (default: all cores)");
  app.fallthrough();

  std::uint64_t n = 0, lo = 0, hi = 0;
  auto* c_classify = app.add_subcommand("classify", "classify one dimension");
  c_classify->add_option("n", n)->required();

  auto* c_range = app.add_subcommand("range", "classify every multiple of 4 in [lo, hi]");
  c_range->add_option("lo", lo)->required();
  c_range->add_option("hi", hi)->required();

  std::uint64_t t1_lo = 256, t1_hi = 8192;
  auto* c_t1 = app.add_subcommand("table1", "weight-two dimensions not settled by N_4k mod 8, with primes");
  c_t1->add_option("--lo", t1_lo, "exclusive lower dimension")->capture_default_str();
  c_t1->add_option("--hi", t1_hi, "inclusive upper dimension")->capture_default_str();

  std::uint64_t below = 0;
  auto* c_t2 = app.add_subcommand("table2", "dimension families from irregular pairs");
  c_t2->add_option("--below", below, "use every irregular pair with p < this bound instead of the tabulated ones");

  std::uint64_t mod_p = 0;
  auto* c_bern = app.add_subcommand("bernoulli", "divided Bernoulli number B_n/n");
  c_bern->add_option("n", n)->required();
  c_bern->add_option("--mod", mod_p, "reduce modulo this odd prime");

  auto* c_eq = app.add_subcommand("equation", "quadratic residue equation for dimension n");
  c_eq->add_option("n", n)->required();

  std::string xs, ys;
  auto* c_cert = app.add_subcommand("verify-cert", "check p_k^2 = x^2, p_2k = y in dimension n");
  c_cert->add_option("n", n)->required();
  c_cert->add_option("x", xs)->required();
  c_cert->add_option("y", ys)->required();

  std::uint64_t spin_max = 8192;
  auto* c_spin = app.add_subcommand("spin", "dimensions allowing a Spin rational projective plane");
  c_spin->add_option("--max", spin_max, "largest dimension")->capture_default_str();

  auto* c_proj = app.add_subcommand("projspaces", "projective spaces derived from the plane in dimension n");
  c_proj->add_option("n", n)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  auto& table = qp2::BernoulliTable::global();
  table.set_exact_limit(s.exact_limit);
  BernoulliCache cache(table);
  const Format fmt = s.format();

  try {
    if (*c_classify) {
      const auto store = load_store(s);
      print_verdict(qp2::classify(n, options(s, store)), fmt);
    } else if (*c_range) {
      if (lo > hi) throw CLI::ValidationError("range", "lo must not exceed hi");
      const auto store = load_store(s);
      auto vs = qp2::classify_range(lo, hi, options(s, store), s.jobs);
      if (fmt == Format::Json) std::cout << qp2::to_json(vs).dump(2) << '\n';
      else if (fmt == Format::Tsv) std::cout << qp2::to_tsv(vs);
      else std::cout << qp2::to_markdown(vs);
    } else if (*c_t1) {
      const auto store = load_store(s);
      auto rows = qp2::prime_table(t1_lo, t1_hi, s.scan_bound, &store);
      if (fmt == Format::Json) std::cout << qp2::to_json(rows).dump(2) << '\n';
      else if (fmt == Format::Tsv) std::cout << qp2::to_tsv(rows);
      else std::cout << qp2::render_prime_table(rows);
    } else if (*c_t2) {
      std::vector<qp2::KummerFamily> fams;
      for (const auto& pair : below ? qp2::irregular_pairs_below(below) : qp2::tabulated_pairs())
        fams.push_back(qp2::kummer_family(pair));
      if (fmt == Format::Json) {
        qp2::Json arr = qp2::Json::array();
        for (const auto& f : fams) arr.push_back(qp2::to_json(f));
        std::cout << arr.dump(2) << '\n';
      } else if (fmt == Format::Tsv) {
        std::cout << qp2::to_tsv(fams);
      } else {
        std::cout << qp2::render_kummer_table(fams) << "\nPower-of-two dimensions:\n";
        for (const auto& f : fams)
          if (auto pw = qp2::power_of_two_family(f)) std::cout << "- " << *pw << " (p = " << f.pair.p << ")\n";
      }
    } else if (*c_bern) {
      if (n < 2 || n % 2) throw CLI::ValidationError("n", "must be even and at least 2");
      qp2::Json j = {{"n", n}};
      if (mod_p) {
        if (!qp2::is_prime(mod_p) || mod_p < 3) throw CLI::ValidationError("--mod", "must be an odd prime");
        j["p"] = mod_p;
        if (n % (mod_p - 1) == 0) j["mod_p"] = "p divides the denominator";
        else j["mod_p"] = qp2::divided_bernoulli_mod_p(n % (mod_p - 1), mod_p);
      } else {
        const auto& b = qp2::divided_bernoulli(n, table);
        j["sign"] = b.sign;
        j["numerator"] = qp2::to_string(b.numerator);
        j["denominator"] = qp2::to_string(b.denominator);
        j["odd_denominator"] = qp2::to_string(b.odd_denominator);
        j["numerator_mod_8"] = qp2::to_u64(qp2::mod_floor(b.numerator, 8));
      }
      if (fmt == Format::Json) {
        std::cout << j.dump(2) << '\n';
      } else {
        for (const auto& [key, val] : j.items())
          std::cout << key << (fmt == Format::Tsv ? "\t" : " = ") << (val.is_string() ? val.get<std::string>() : val.dump())
                    << '\n';
      }
    } else if (*c_eq) {
      const auto eq = qp2::build_equation(plane_k(n), table);
      const bool two = !eq.shape.power_of_two;
      const std::string A = two ? "A" : "a", B = two ? "B" : "b", C = two ? "C" : "c";
      qp2::Json j = {{"dimension", n},
                     {"k", eq.k},
                     {"shape", qp2::to_string(eq.shape)},
                     {A, qp2::to_string(eq.a)},
                     {B, qp2::to_string(eq.b)},
                     {C, qp2::to_string(eq.c)},
                     {A + "_unreduced", qp2::to_string(eq.a_full)},
                     {B + "_unreduced", qp2::to_string(eq.b_full)},
                     {C + "_unreduced", qp2::to_string(eq.c_full)},
                     {"gcd_removed", qp2::to_string(eq.gcd_removed)},
                     {"rho", qp2::to_string(eq.rho)},
                     {"xbar_odd", eq.odd_xbar},
                     {"jacobi", qp2::to_string(qp2::jacobi_screen(eq))}};
      if (fmt == Format::Json) {
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "solve " << A << " xbar^2 = " << C << " (mod " << B << ")"
                  << (eq.odd_xbar ? " with xbar odd" : "") << '\n';
        for (const auto& [key, val] : j.items())
          std::cout << key << (fmt == Format::Tsv ? "\t" : " = ") << (val.is_string() ? val.get<std::string>() : val.dump())
                    << '\n';
      }
    } else if (*c_cert) {
      const auto k = plane_k(n);
      qp2::Integer x, y;
      if (x.set_str(xs, 10) != 0 || y.set_str(ys, 10) != 0)
        throw CLI::ValidationError("verify-cert", "x and y must be integers");
      const auto r = qp2::check_plane_conditions(k, x, y, table);
      std::optional<bool> hs;
      if (k <= 4) hs = qp2::hattori_stong_full_check(k, x, y, table);
      const bool pass = r.ok() && hs.value_or(true);
      qp2::Json j = {{"dimension", n},
                     {"signature", qp2::to_string(r.signature)},
                     {"e1", qp2::to_string(r.e1_value)},
                     {"e1e1", qp2::to_string(r.e1e1_value)},
                     {"signature_ok", r.signature_ok},
                     {"e1_ok", r.e1_ok},
                     {"e1e1_ok", r.e1e1_ok}};
      if (hs) j["full_integrality_ok"] = *hs;
      j["result"] = pass ? "pass" : "fail";
      if (fmt == Format::Json) {
        std::cout << j.dump(2) << '\n';
      } else {
        for (const auto& [key, val] : j.items())
          std::cout << key << (fmt == Format::Tsv ? "\t" : " = ") << (val.is_string() ? val.get<std::string>() : val.dump())
                    << '\n';
      }
      return pass ? 0 : 2;
    } else if (*c_spin) {
      std::vector<std::uint64_t> possible;
      for (std::uint64_t d = 4; d <= spin_max; d += 4)
        if (qp2::spin_classify(d).possible) possible.push_back(d);
      std::vector<std::uint64_t> survivors;
      for (std::uint64_t k = 1; k <= (1u << 20); ++k)
        if (qp2::spin_bound(k, 1)) survivors.push_back(k);
      qp2::Json j = {{"max_dimension", spin_max}, {"possible", possible}, {"bound_survivors_to_2^20", survivors}};
      if (fmt == Format::Json) {
        std::cout << j.dump(2) << '\n';
      } else if (fmt == Format::Tsv) {
        std::cout << "dimension\tpossible\n";
        for (auto d : possible) std::cout << d << "\tyes\n";
      } else {
        std::cout << "Spin rational projective planes possible in dimensions <= " << spin_max << ":";
        for (auto d : possible) std::cout << ' ' << d;
        std::cout << "\nk <= 2^20 passing the 2-adic signature bound:";
        for (auto k : survivors) std::cout << ' ' << k;
        std::cout << '\n';
      }
    } else if (*c_proj) {
      const auto store = load_store(s);
      const auto v = qp2::classify(n, options(s, store));
      if (v.status != qp2::Status::Exists || !v.k) {
        std::cerr << "no rational projective plane established in dimension " << n << " (" << qp2::to_string(v.status)
                  << ")\n";
        return 1;
      }
      const auto spaces = qp2::derive(*v.k, true);
      if (fmt == Format::Json) {
        qp2::Json arr = qp2::Json::array();
        for (const auto& sp : spaces) arr.push_back(qp2::to_json(sp));
        std::cout << qp2::Json{{"dimension", n}, {"spaces", arr}, {"note", qp2::kOddCayleyAnaloguesNote}}.dump(2)
                  << '\n';
      } else {
        for (const auto& sp : spaces) {
          const char* tag = sp.self ? "the plane itself" : sp.degree_two ? "generator in degree 2" : "";
          std::cout << sp.name();
          if (fmt == Format::Tsv) std::cout << '\t' << tag;
          else if (*tag) std::cout << "  " << tag;
          std::cout << '\n';
        }
        if (fmt == Format::Markdown) std::cout << "\nnote: " << qp2::kOddCayleyAnaloguesNote << '\n';
      }
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data verification failed:\n" << e.what();
    return 2;
  } catch (const qp2::VerificationError& e) {
    std::cerr << "data verification failed: " << e.what() << '\n';
    return 2;
  } catch (const qp2::ParseError& e) {
    std::cerr << "data verification failed: " << e.what() << '\n';
    return 2;
  } catch (const qp2::ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const qp2::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
