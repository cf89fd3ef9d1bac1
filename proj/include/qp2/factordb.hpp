#pragma once

// Factor tables for Bernoulli numerators N_n, Mersenne numbers 2^n - 1 and
// literal integers. Every record is checked (primality of each factor,
// divisibility or exact product) before it is accepted.
//
// Line format: TARGET<TAB>p[^e],p[^e],...<TAB>complete|partial[<TAB>provenance]
// TARGET is "N <n>", "M <n>" or a decimal literal. '#' starts a comment.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qp2/bernoulli.hpp"

namespace qp2 {

enum class TargetKind { Numerator, Mersenne, Literal };

struct FactorTarget {
  TargetKind kind = TargetKind::Literal;
  unsigned long n = 0;  // index for Numerator / Mersenne
  Integer literal;

  static FactorTarget numerator(unsigned long n) { return {TargetKind::Numerator, n, 0}; }
  static FactorTarget mersenne(unsigned long n) { return {TargetKind::Mersenne, n, 0}; }
  static FactorTarget of(const Integer& v) { return {TargetKind::Literal, 0, v}; }

  std::string label() const {
    switch (kind) {
      case TargetKind::Numerator: return "N " + std::to_string(n);
      case TargetKind::Mersenne: return "M " + std::to_string(n);
      case TargetKind::Literal: break;
    }
    return to_string(literal);
  }

  bool value_available(const BernoulliTable& table) const {
    return kind != TargetKind::Numerator || n <= table.exact_limit();
  }

  Integer value(BernoulliTable& table = BernoulliTable::global()) const {
    switch (kind) {
      case TargetKind::Numerator: return table.get(n).numerator;
      case TargetKind::Mersenne: return pow2(n) - 1;
      case TargetKind::Literal: break;
    }
    return literal;
  }

  friend bool operator<(const FactorTarget& a, const FactorTarget& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.n != b.n) return a.n < b.n;
    return a.literal < b.literal;
  }
  friend bool operator==(const FactorTarget& a, const FactorTarget& b) {
    return a.kind == b.kind && a.n == b.n && a.literal == b.literal;
  }
};

struct FactorizationRecord {
  FactorTarget target;
  std::vector<PrimePower> factors;
  bool complete = false;
  std::string provenance;

  Integer product() const {
    Integer p = 1;
    for (const auto& f : factors) p *= f.value();
    return p;
  }
};

inline bool operator==(const FactorizationRecord& a, const FactorizationRecord& b) {
  return a.target == b.target && a.factors == b.factors && a.complete == b.complete &&
         a.provenance == b.provenance;
}

/// A factorization of a concrete integer whose listed primes were certified
/// and whose exponents are exact. Only verify_factorization builds one.
class VerifiedFactorization {
 public:
  const Integer& value() const { return value_; }
  const std::vector<PrimePower>& factors() const { return factors_; }
  /// value / prod(factors); 1 iff complete
  const Integer& remainder() const { return remainder_; }
  bool complete() const { return remainder_ == 1; }
  const std::string& provenance() const { return provenance_; }

  friend VerifiedFactorization verify_factorization(const Integer& value,
                                                    const std::vector<PrimePower>& factors,
                                                    std::string provenance);

 private:
  VerifiedFactorization() = default;
  Integer value_, remainder_;
  std::vector<PrimePower> factors_;
  std::string provenance_;
};

/// Certifies each listed prime, recomputes exact exponents and the cofactor.
/// Throws VerificationError on a composite or non-dividing factor.
inline VerifiedFactorization verify_factorization(const Integer& value,
                                                  const std::vector<PrimePower>& factors,
                                                  std::string provenance) {
  const std::string label = to_string(value);
  if (value < 1) throw VerificationError(label, "target must be positive");
  VerifiedFactorization v;
  v.value_ = value;
  v.remainder_ = value;
  v.provenance_ = std::move(provenance);
  std::vector<PrimePower> fs = factors;
  sort_factors(fs);
  for (const auto& f : fs) {
    if (!is_prime(f.p)) throw VerificationError(label, to_string(f.p) + " is not prime");
    const unsigned long r = valuation(v.remainder_, f.p);
    if (r == 0) throw VerificationError(label, to_string(f.p) + " does not divide the target");
    v.remainder_ /= pow_ui(f.p, r);
    v.factors_.push_back({f.p, r});
  }
  return v;
}

/// Parse "p", "p^e" (decimal).
inline PrimePower parse_prime_power(const std::string& s, std::size_t line, std::size_t column) {
  const auto caret = s.find('^');
  const std::string base = s.substr(0, caret);
  auto all_digits = [](const std::string& t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!all_digits(base)) throw ParseError(line, column, "expected a decimal factor, got '" + s + "'");
  PrimePower pp{Integer(base), 1};
  if (caret != std::string::npos) {
    const std::string e = s.substr(caret + 1);
    if (!all_digits(e) || e.size() > 9)
      throw ParseError(line, column + caret + 1, "bad exponent in '" + s + "'");
    pp.r = std::stoul(e);
    if (pp.r == 0) throw ParseError(line, column + caret + 1, "exponent must be positive");
  }
  return pp;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  std::string text;
  std::size_t column;  // 1-based
};

// TAB-separated; " | " is accepted as an alternative separator.
inline std::vector<Field> split_fields(const std::string& line) {
  const char sep = line.find('\t') != std::string::npos ? '\t' : '|';
  std::vector<Field> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    const std::string raw = line.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    const auto lead = raw.find_first_not_of(" \r");
    out.push_back({trim(raw), start + 1 + (lead == std::string::npos ? 0 : lead)});
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// Parse one non-comment line; no verification.
inline FactorizationRecord parse_record(const std::string& line, std::size_t line_no) {
  const auto fields = detail::split_fields(line);
  if (fields.size() < 3 || fields.size() > 4)
    throw ParseError(line_no, 1, "expected 3 or 4 fields, got " + std::to_string(fields.size()));
  FactorizationRecord rec;

  const auto& t = fields[0];
  auto parse_index = [&](const std::string& s, std::size_t col) {
    if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw ParseError(line_no, col, "bad index '" + s + "'");
    return std::stoul(s);
  };
  if (t.text.size() > 1 && (t.text[0] == 'N' || t.text[0] == 'M') && t.text[1] == ' ') {
    const unsigned long n = parse_index(detail::trim(t.text.substr(2)), t.column + 2);
    if (t.text[0] == 'N') {
      if (n == 0 || n % 2) throw ParseError(line_no, t.column + 2, "N index must be even and positive");
      rec.target = FactorTarget::numerator(n);
    } else {
      if (n == 0) throw ParseError(line_no, t.column + 2, "M index must be positive");
      rec.target = FactorTarget::mersenne(n);
    }
  } else {
    if (t.text.empty() || !std::all_of(t.text.begin(), t.text.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw ParseError(line_no, t.column, "target must be 'N <n>', 'M <n>' or a decimal literal");
    rec.target = FactorTarget::of(Integer(t.text));
  }

  const auto& f = fields[1];
  std::size_t start = 0;
  while (start <= f.text.size()) {
    const auto comma = f.text.find(',', start);
    const std::string item = detail::trim(f.text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    rec.factors.push_back(parse_prime_power(item, line_no, f.column + start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }

  const auto& c = fields[2];
  if (c.text == "complete") rec.complete = true;
  else if (c.text == "partial") rec.complete = false;
  else throw ParseError(line_no, c.column, "expected 'complete' or 'partial', got '" + c.text + "'");

  if (fields.size() == 4) rec.provenance = fields[3].text;
  return rec;
}

/// Checks a parsed record against its target; throws VerificationError.
inline void verify_record(const FactorizationRecord& rec, BernoulliTable& table = BernoulliTable::global()) {
  const std::string label = rec.target.label();
  for (const auto& f : rec.factors) {
    if (f.p < 2 || !is_prime(f.p)) throw VerificationError(label, to_string(f.p) + " is not prime");
  }
  if (rec.target.value_available(table)) {
    const Integer v = rec.target.value(table);
    const Integer prod = rec.product();
    if (rec.complete && prod != v) throw VerificationError(label, "product of factors differs from the target");
    if (!rec.complete && !divides(prod, v)) throw VerificationError(label, "factors do not divide the target");
    return;
  }
  // Numerator beyond the exact range: only simple factors can be checked.
  if (rec.complete) throw VerificationError(label, "complete record needs the exact numerator");
  for (const auto& f : rec.factors) {
    if (f.r != 1) throw VerificationError(label, "exponent > 1 needs the exact numerator");
    if (f.p == 2 || !divides_numerator(f.p, rec.target.n, table).divides)
      throw VerificationError(label, to_string(f.p) + " does not divide the numerator");
  }
}

inline std::string format_record(const FactorizationRecord& rec) {
  std::string s = rec.target.label() + "\t";
  for (std::size_t i = 0; i < rec.factors.size(); ++i) {
    if (i) s += ",";
    s += to_string(rec.factors[i].p);
    if (rec.factors[i].r != 1) s += "^" + std::to_string(rec.factors[i].r);
  }
  s += rec.complete ? "\tcomplete" : "\tpartial";
  if (!rec.provenance.empty()) s += "\t" + rec.provenance;
  return s;
}

struct LoadReport {
  std::vector<FactorizationRecord> accepted;
  std::vector<std::string> errors;  // one per rejected line
  bool ok() const { return errors.empty(); }
};

/// Load-once store of verified records, keyed by target. Records for the
/// same target are merged (union of factors, complete if either is).
class FactorStore {
 public:
  LoadReport load_text(std::istream& in, BernoulliTable& table = BernoulliTable::global()) {
    LoadReport report;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (detail::trim(line).empty()) continue;
      try {
        FactorizationRecord rec = parse_record(line, line_no);
        verify_record(rec, table);
        sort_factors(rec.factors);
        insert(rec);
        report.accepted.push_back(std::move(rec));
      } catch (const ParseError& e) {
        report.errors.push_back(std::string("parse error: ") + e.what());
      } catch (const VerificationError& e) {
        report.errors.push_back("line " + std::to_string(line_no) + ": verification failed: " + e.what());
      }
    }
    return report;
  }

  LoadReport load(const std::filesystem::path& path, BernoulliTable& table = BernoulliTable::global()) {
    std::ifstream in(path);
    if (!in) {
      LoadReport r;
      r.errors.push_back("cannot open " + path.string());
      return r;
    }
    return load_text(in, table);
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    for (const auto& [target, rec] : records_) out << format_record(rec) << "\n";
  }

  /// Adds an already verified record.
  void insert(const FactorizationRecord& rec) {
    auto it = records_.find(rec.target);
    if (it == records_.end()) {
      records_.emplace(rec.target, rec);
      return;
    }
    auto& cur = it->second;
    for (const auto& f : rec.factors) {
      auto same = std::find_if(cur.factors.begin(), cur.factors.end(), [&](const PrimePower& g) { return g.p == f.p; });
      if (same == cur.factors.end()) cur.factors.push_back(f);
      else same->r = std::max(same->r, f.r);
    }
    sort_factors(cur.factors);
    if (rec.complete && !cur.complete) {
      cur.complete = true;
      cur.provenance = rec.provenance;
    }
  }

  const FactorizationRecord* find(const FactorTarget& t) const {
    auto it = records_.find(t);
    return it == records_.end() ? nullptr : &it->second;
  }

  const std::map<FactorTarget, FactorizationRecord>& records() const { return records_; }

 private:
  std::map<FactorTarget, FactorizationRecord> records_;
};

#ifdef QP2_DATA_DIR
inline std::filesystem::path bundled_factor_file() { return std::filesystem::path(QP2_DATA_DIR) / "factors.tsv"; }
#endif

}  // namespace qp2
