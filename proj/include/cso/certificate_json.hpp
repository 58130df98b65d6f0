#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "cso/approxkak.hpp"
#include "cso/errors.hpp"
#include "cso/rational.hpp"

// Structured certificate documents. Rationals travel as "p/q" strings; the
// layout is described in docs/certificate.schema.json.

namespace cso {

inline constexpr const char* kCertificateFormat = "cso-approx-certificate";
inline constexpr int kCertificateVersion = 1;

namespace detail {

inline nlohmann::ordered_json bound_to_json(const CertifiedBound& b) {
  return {{"bound", to_string(b.value)}, {"exact", b.exact}};
}

inline CertifiedBound bound_from_json(const nlohmann::json& j) {
  return {parse_rational(j.at("bound").get<std::string>()), j.at("exact").get<bool>()};
}

inline OracleProvenance provenance_from_string(const std::string& s) {
  if (s == "exact_kakutani") return OracleProvenance::exact_kakutani;
  if (s == "scan") return OracleProvenance::scan;
  if (s == "user") return OracleProvenance::user;
  throw DomainError("unknown oracle provenance '" + s + "'");
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const ApproxCertificate& c) {
  using nlohmann::ordered_json;
  ordered_json plan;
  plan["N"] = c.plan.N;
  plan["m"] = c.plan.marks;
  ordered_json deltas = ordered_json::array();
  for (const auto& d : c.plan.delta) deltas.push_back(to_string(d));
  plan["delta"] = std::move(deltas);
  plan["c"] = c.plan.oracle_index;

  ordered_json zeroed = ordered_json::array();
  for (const auto& z : c.zeroed_weights)
    zeroed.push_back({{"k", z.k}, {"index", z.index}, {"bound", to_string(z.bound.value)}, {"exact", z.bound.exact}});
  ordered_json pairs = ordered_json::array();
  for (const auto& p : c.pair_bounds)
    pairs.push_back({{"k", p.k}, {"bound", to_string(p.bound.value)}, {"exact", p.bound.exact}});

  ordered_json j;
  j["format"] = kCertificateFormat;
  j["version"] = kCertificateVersion;
  j["sequence"] = c.sequence;
  j["oracle"] = to_string(c.oracle);
  j["eps"] = to_string(c.eps);
  j["rounds"] = c.plan.rounds();
  j["plan"] = std::move(plan);
  j["zeroed_weights"] = std::move(zeroed);
  j["pair_bounds"] = std::move(pairs);
  j["t_prime_distance"] = detail::bound_to_json(c.t_prime_distance);
  j["t_double_prime_distance"] = detail::bound_to_json(c.t_double_prime_distance);
  j["prefix_distance"] = detail::bound_to_json(c.prefix_distance);
  j["verified_prefix"] = c.verified_prefix;
  j["tail_slot"] = c.tail_slot;
  j["verification"] = c.exactly_verified ? "exact" : "enclosure";
  j["verdict"] = "certified";
  return j;
}

/// Parses a certificate document; structural problems raise DomainError.
inline ApproxCertificate certificate_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kCertificateFormat) throw DomainError("not a certificate document");
    if (j.at("version").get<int>() != kCertificateVersion) throw DomainError("unsupported certificate version");
    ApproxCertificate c;
    c.sequence = j.at("sequence").get<std::string>();
    c.oracle = detail::provenance_from_string(j.at("oracle").get<std::string>());
    c.eps = parse_rational(j.at("eps").get<std::string>());
    const auto& plan = j.at("plan");
    c.plan.eps = c.eps;
    c.plan.N = plan.at("N").get<std::uint64_t>();
    c.plan.marks = plan.at("m").get<std::vector<std::uint64_t>>();
    for (const auto& d : plan.at("delta")) c.plan.delta.push_back(parse_rational(d.get<std::string>()));
    c.plan.oracle_index = plan.at("c").get<std::vector<std::uint64_t>>();
    if (j.at("rounds").get<unsigned>() != c.plan.rounds()) throw DomainError("rounds does not match plan.delta");
    for (const auto& z : j.at("zeroed_weights"))
      c.zeroed_weights.push_back({z.at("k").get<int>(), z.at("index").get<std::uint64_t>(), detail::bound_from_json(z)});
    for (const auto& p : j.at("pair_bounds"))
      c.pair_bounds.push_back({p.at("k").get<unsigned>(), detail::bound_from_json(p)});
    c.t_prime_distance = detail::bound_from_json(j.at("t_prime_distance"));
    c.t_double_prime_distance = detail::bound_from_json(j.at("t_double_prime_distance"));
    c.prefix_distance = detail::bound_from_json(j.at("prefix_distance"));
    c.verified_prefix = j.at("verified_prefix").get<std::uint64_t>();
    c.tail_slot = j.at("tail_slot").get<int>();
    const auto mode = j.at("verification").get<std::string>();
    if (mode != "exact" && mode != "enclosure") throw DomainError("unknown verification mode '" + mode + "'");
    c.exactly_verified = mode == "exact";
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed certificate: ") + e.what());
  }
}

}  // namespace cso
