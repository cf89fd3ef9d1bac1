#pragma once

// Rendering of verdicts and tables as JSON, markdown and TSV. Big integers
// are written as decimal strings in JSON.

#include <json.hpp>

#include <sstream>

#include "qp2/classify.hpp"
#include "qp2/projspace.hpp"
#include "qp2/spin.hpp"

namespace qp2 {

using Json = nlohmann::ordered_json;

inline Json to_json(const Certificate& c) {
  return {{"k", c.k},
          {"xbar", to_string(c.xbar)},
          {"l", to_string(c.l)},
          {"x", to_string(c.x)},
          {"y", to_string(c.y)},
          {"z", to_string(c.z)}};
}

inline Json to_json(const ObstructionWitness& w) {
  Json j = {{"kind", witness_kind(w)}, {"detail", describe(w)}};
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, witness::WrongBinaryShape>) j["weight"] = v.weight;
        else if constexpr (std::is_same_v<T, witness::ModEight>) j["residue"] = v.residue;
        else if constexpr (std::is_same_v<T, witness::IrregularPrime>) {
          j["p"] = to_string(v.obstruction.p);
          j["numerator_index"] = v.obstruction.n;
          j["source"] = to_string(v.obstruction.source);
          j["route"] = to_string(v.obstruction.route);
          if (!v.obstruction.provenance.empty()) j["provenance"] = v.obstruction.provenance;
        } else if constexpr (std::is_same_v<T, witness::JacobiMinusOne>) {
          j["a"] = to_string(v.a);
          j["b"] = to_string(v.b);
          j["c"] = to_string(v.c);
        } else if constexpr (std::is_same_v<T, witness::LocalUnsolvable>) {
          j["p"] = to_string(v.pp.p);
          j["r"] = v.pp.r;
          j["a"] = to_string(v.a);
          j["c"] = to_string(v.c);
        }
      },
      w);
  return j;
}

inline Json to_json(const Verdict& v, bool with_timings = true) {
  Json j = {{"dimension", v.n}, {"status", to_string(v.status)}};
  if (v.k) j["k"] = *v.k;
  if (!v.shape.empty()) j["shape"] = v.shape;
  if (v.certificate) j["certificate"] = to_json(*v.certificate);
  if (v.complex_plane) j["certificate"] = {{"p1", v.complex_plane->p1}, {"signature", v.complex_plane->signature}};
  if (v.witness) j["witness"] = to_json(*v.witness);
  if (!v.missing.empty()) j["missing"] = v.missing;
  Json ev = Json::array();
  for (const auto& e : v.evidence) {
    Json x = {{"test", e.test}, {"outcome", e.outcome}, {"decisive", e.decisive}};
    if (with_timings) x["seconds"] = e.seconds;
    ev.push_back(std::move(x));
  }
  j["evidence"] = std::move(ev);
  if (with_timings) j["timings"] = {{"total_seconds", v.seconds}};
  return j;
}

inline Json to_json(const std::vector<Verdict>& vs, bool with_timings = true) {
  Json arr = Json::array();
  for (const auto& v : vs) arr.push_back(to_json(v, with_timings));
  return arr;
}

/// Inverse of to_json(Verdict); throws ParseError on malformed input.
inline Verdict verdict_from_json(const Json& j) {
  try {
    Verdict v;
    v.n = j.at("dimension").get<std::uint64_t>();
    const auto status = j.at("status").get<std::string>();
    if (status == "exists") v.status = Status::Exists;
    else if (status == "not-exists") v.status = Status::NotExists;
    else if (status == "unknown") v.status = Status::Unknown;
    else throw ParseError(0, 0, "unknown status " + status);
    if (j.contains("k")) v.k = j["k"].get<std::uint64_t>();
    if (j.contains("shape")) v.shape = j["shape"].get<std::string>();
    if (j.contains("certificate")) {
      const auto& c = j["certificate"];
      if (c.contains("p1")) {
        v.complex_plane = ComplexPlaneData{c["p1"].get<int>(), c["signature"].get<int>()};
      } else {
        auto big = [&](const char* key) { return Integer(c.at(key).get<std::string>()); };
        v.certificate = Certificate{c.at("k").get<unsigned long>(), big("xbar"), big("l"), big("x"), big("y"),
                                    big("z")};
      }
    }
    if (j.contains("witness")) {
      const auto& w = j["witness"];
      const auto kind = w.at("kind").get<std::string>();
      auto big = [&](const char* key) { return Integer(w.at(key).get<std::string>()); };
      if (kind == "not-multiple-of-four") v.witness = witness::NotMultipleOfFour{};
      else if (kind == "not-eight-k") v.witness = witness::NotEightK{};
      else if (kind == "wrong-binary-shape") v.witness = witness::WrongBinaryShape{w.at("weight").get<unsigned>()};
      else if (kind == "mod-eight") v.witness = witness::ModEight{w.at("residue").get<unsigned>()};
      else if (kind == "irregular-prime") {
        PrimeObstruction o;
        o.p = big("p");
        o.n = w.at("numerator_index").get<std::uint64_t>();
        o.source = w.at("source") == "hint" ? PrimeSource::Hint : PrimeSource::Scan;
        const auto route = w.at("route").get<std::string>();
        o.route = route == "exact" ? DivisibilityRoute::Exact
                  : route == "voronoi" ? DivisibilityRoute::Voronoi
                                       : DivisibilityRoute::DenominatorPrime;
        if (w.contains("provenance")) o.provenance = w["provenance"].get<std::string>();
        v.witness = witness::IrregularPrime{o};
      } else if (kind == "jacobi-minus-one") v.witness = witness::JacobiMinusOne{big("a"), big("b"), big("c")};
      else if (kind == "local-unsolvable")
        v.witness = witness::LocalUnsolvable{{big("p"), w.at("r").get<unsigned long>()}, big("a"), big("c")};
      else throw ParseError(0, 0, "unknown witness kind " + kind);
    }
    if (j.contains("missing")) v.missing = j["missing"].get<std::string>();
    for (const auto& e : j.at("evidence")) {
      v.evidence.push_back({e.at("test").get<std::string>(), e.at("outcome").get<std::string>(),
                            e.at("decisive").get<bool>(), e.value("seconds", 0.0)});
    }
    if (j.contains("timings")) v.seconds = j["timings"].value("total_seconds", 0.0);
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, 0, e.what());
  }
}

inline std::string short_reason(const Verdict& v) {
  if (v.witness) return describe(*v.witness);
  if (v.certificate) return "x = " + to_string(v.certificate->x) + ", y = " + to_string(v.certificate->y);
  if (v.complex_plane) return "CP^2";
  if (!v.evidence.empty()) return v.evidence.back().outcome;
  return {};
}

inline std::string to_markdown(const std::vector<Verdict>& vs) {
  std::ostringstream os;
  os << "| n | k | status | reason |\n|---|---|---|---|\n";
  for (const auto& v : vs) {
    os << "| " << v.n << " | " << (v.k ? std::to_string(*v.k) : "") << " | " << to_string(v.status) << " | "
       << short_reason(v) << " |\n";
  }
  return os.str();
}

inline std::string tsv_escape(std::string s) {
  for (char& c : s)
    if (c == '\t' || c == '\n') c = ' ';
  return s;
}

inline std::string to_tsv(const std::vector<Verdict>& vs) {
  std::ostringstream os;
  os << "n\tk\tstatus\twitness\tdetail\n";
  for (const auto& v : vs) {
    os << v.n << '\t' << (v.k ? std::to_string(*v.k) : "") << '\t' << to_string(v.status) << '\t'
       << (v.witness ? witness_kind(*v.witness) : v.certificate || v.complex_plane ? "certificate" : "") << '\t'
       << tsv_escape(short_reason(v)) << '\n';
  }
  return os.str();
}

inline Json to_json(const std::vector<PrimeTableRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j = {{"label", r.label()}, {"k", r.k}, {"dimension", r.dimension()}};
    if (r.obstruction) {
      j["prime"] = to_string(r.obstruction->p);
      j["source"] = to_string(r.obstruction->source);
      j["exists"] = "No";
    } else {
      j["prime"] = "?";
      j["exists"] = "?";
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

inline std::string to_tsv(const std::vector<PrimeTableRow>& rows) {
  std::ostringstream os;
  os << "a_b\tprime\tdimension\texists\n";
  for (const auto& r : rows)
    os << r.label() << '\t' << (r.obstruction ? to_string(r.obstruction->p) : "?") << '\t' << r.dimension()
       << '\t' << (r.obstruction ? "No" : "?") << '\n';
  return os.str();
}

inline Json to_json(const KummerFamily& f) {
  Json classes = Json::array(), dims = Json::array();
  for (const auto& c : f.classes) {
    classes.push_back({c.a, c.b});
    dims.push_back(dimension_family(f, c));
  }
  Json j = {{"p", f.pair.p}, {"m", f.pair.m}, {"period", f.period}, {"preperiod", f.preperiod},
            {"classes", classes}, {"dimensions", dims}};
  if (auto pw = power_of_two_family(f)) j["powers_of_two"] = *pw;
  return j;
}

inline std::string to_tsv(const std::vector<KummerFamily>& fams) {
  std::ostringstream os;
  os << "p\tm\tperiod\tclasses\tdimensions\n";
  for (const auto& f : fams) {
    os << f.pair.p << '\t' << f.pair.m << '\t' << f.period << '\t';
    for (std::size_t i = 0; i < f.classes.size(); ++i)
      os << (i ? ";" : "") << "(" << f.classes[i].a << "," << f.classes[i].b << ")";
    os << '\t';
    for (std::size_t i = 0; i < f.classes.size(); ++i) os << (i ? ";" : "") << dimension_family(f, f.classes[i]);
    os << '\n';
  }
  return os.str();
}

inline Json to_json(const ProjSpace& s) {
  return {{"name", s.name()}, {"n", s.n},         {"d", s.d},
          {"m", s.m},         {"self", s.self},   {"degree_two", s.degree_two}};
}

}  // namespace qp2
