// csotool: command-line front end for the cso library.
//
// Exit codes: 0 success, 2 domain error, 3 search or convergence failure,
// 4 certificate verification failure, 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "cso/cso.hpp"

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kOther = 1, kDomain = 2, kSearch = 3, kVerify = 4 };

struct Config {
  std::string seq = "kakutani";
  std::uint64_t n = 16;
  std::string eps = "1/8";
  unsigned rounds = 3;
  std::uint64_t prefix = 4096;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  std::string oracle = "kakutani";
  std::uint64_t search_limit = std::uint64_t{1} << 24;
  std::string matrix;
  std::string cert;
  unsigned restarts = 16;
  unsigned max_iters = 1000;
  double tol = 0;
  bool adjoint = false;
};

fs::path resolve_output(const std::string& out) {
  fs::path p(out);
  if (p.is_relative())
    if (const char* dir = std::getenv("CSOTOOL_OUTPUT_DIR"); dir && *dir) p = fs::path(dir) / p;
  return p;
}

void emit(const Config& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  const fs::path p = resolve_output(cfg.out);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw cso::DomainError("cannot write '" + p.string() + "'");
  f << text;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string format_or(const Config& cfg, const char* fallback) { return cfg.format.empty() ? fallback : cfg.format; }

cso::Rational positive_eps(const Config& cfg) {
  const cso::Rational e = cso::parse_rational(cfg.eps);
  if (e <= 0) throw cso::DomainError("--eps must be positive");
  return e;
}

ordered_json strings(const std::vector<cso::Rational>& v) {
  ordered_json a = ordered_json::array();
  for (const auto& r : v) a.push_back(cso::to_string(r));
  return a;
}

ordered_json complex_matrix_json(const Eigen::MatrixXcd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_weights(const Config& cfg) {
  if (cfg.n < 1) throw cso::DomainError("--n must be >= 1");
  const auto seq = cso::sequence_by_name(cfg.seq);
  const auto w = cso::prefix(seq, cfg.n);
  const std::string fmt = format_or(cfg, "csv");
  if (fmt == "json") {
    emit(cfg, dump({{"sequence", seq.name()}, {"n", cfg.n}, {"weights", strings(w)}}));
  } else {
    std::ostringstream s;
    s << "n,alpha\n";
    for (std::size_t i = 0; i < w.size(); ++i) s << i + 1 << ',' << cso::to_string(w[i]) << '\n';
    emit(cfg, s.str());
  }
  return kOk;
}

int cmd_truncate(const Config& cfg) {
  if (cfg.prefix < 1) throw cso::DomainError("--prefix must be >= 1");
  const auto seq = cso::sequence_by_name(cfg.seq);
  const cso::Rational eps = positive_eps(cfg);
  const auto alpha = cso::prefix(seq, cfg.prefix);
  const auto beta = cso::truncate_by_threshold(seq, eps, cfg.prefix);
  const auto d = cso::decompose(beta);
  const std::string fmt = format_or(cfg, "json");
  if (fmt == "csv") {
    std::ostringstream s;
    s << "n,alpha,beta\n";
    for (std::size_t i = 0; i < beta.size(); ++i)
      s << i + 1 << ',' << cso::to_string(alpha[i]) << ',' << cso::to_string(beta[i]) << '\n';
    emit(cfg, s.str());
    return kOk;
  }
  ordered_json j;
  j["sequence"] = seq.name();
  j["eps"] = cso::to_string(eps);
  j["prefix"] = cfg.prefix;
  j["beta"] = strings(beta);
  j["zero_positions"] = d.zero_positions;
  j["block_sizes"] = d.block_sizes();
  j["palindromic"] = cso::is_cso_truncation(d);
  j["distance"] = cso::to_string(cso::shift_distance(alpha, beta));
  emit(cfg, dump(j));
  return kOk;
}

int cmd_approximate(const Config& cfg) {
  const auto seq = cso::sequence_by_name(cfg.seq);
  const cso::Rational eps = positive_eps(cfg);
  if (cfg.rounds < 1) throw cso::DomainError("--rounds must be >= 1");
  cso::COracle oracle;
  if (cfg.oracle == "kakutani")
    oracle = cso::make_kakutani_oracle();
  else
    oracle = cso::make_scan_oracle(seq, cfg.search_limit);
  const auto cert = cso::certify(seq, eps, cfg.rounds, oracle);
  emit(cfg, dump(cso::to_json(cert)));
  return kOk;
}

int cmd_verify(const Config& cfg) {
  std::ifstream in(cfg.cert);
  if (!in) throw cso::DomainError("cannot open certificate '" + cfg.cert + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw cso::DomainError(std::string("malformed certificate: ") + e.what());
  }
  const auto cert = cso::certificate_from_json(j);
  const auto seq = cso::sequence_by_name(cert.sequence);
  const auto report = cso::verify(seq, cert);
  ordered_json r{{"ok", report.ok}, {"failures", report.failures}};
  emit(cfg, dump(r));
  for (const auto& f : report.failures) std::cerr << "verify: " << f << '\n';
  return report.ok ? kOk : kVerify;
}

int cmd_spectrum(const Config& cfg) {
  const auto seq = cso::sequence_by_name(cfg.seq);
  const double tol = cfg.tol > 0 ? cfg.tol : 1e-9;
  const auto rep = cso::accumulation_analysis(seq, cfg.prefix, tol);
  const std::string fmt = format_or(cfg, "json");
  if (fmt == "csv") {
    std::ostringstream s;
    s.precision(17);
    s << "center,lo,hi,multiplicity,multiplicity_half,multiplicity_even,accumulating\n";
    for (const auto& c : rep.clusters)
      s << c.center << ',' << c.lo << ',' << c.hi << ',' << c.multiplicity << ',' << c.multiplicity_half << ','
        << c.multiplicity_even << ',' << (c.accumulating ? "true" : "false") << '\n';
    emit(cfg, s.str());
    return kOk;
  }
  ordered_json clusters = ordered_json::array();
  for (const auto& c : rep.clusters)
    clusters.push_back({{"center", c.center},
                        {"lo", c.lo},
                        {"hi", c.hi},
                        {"multiplicity", c.multiplicity},
                        {"multiplicity_half", c.multiplicity_half},
                        {"multiplicity_even", c.multiplicity_even},
                        {"accumulating", c.accumulating}});
  emit(cfg, dump({{"sequence", seq.name()}, {"prefix", rep.prefix_len}, {"tolerance", rep.tolerance},
                  {"clusters", std::move(clusters)}}));
  return kOk;
}

int cmd_fit(const Config& cfg) {
  const Eigen::MatrixXcd t = cso::load_complex_matrix(cfg.matrix);
  cso::FitOptions o;
  o.restarts = cfg.restarts;
  o.max_iters = cfg.max_iters;
  if (cfg.tol > 0) o.tol = cfg.tol;
  o.seed = cfg.seed;
  const auto r = cso::fit(t, o);
  ordered_json j;
  j["dimension"] = t.rows();
  j["residual"] = r.residual;
  j["objective"] = r.objective;
  j["converged"] = r.converged;
  j["restarts_used"] = r.restarts_used;
  j["best_restart"] = r.best_restart;
  j["iterations"] = r.iterations;
  j["seed"] = cfg.seed;
  j["S"] = complex_matrix_json(r.best_S);
  emit(cfg, dump(j));
  return r.converged ? kOk : kSearch;
}

int cmd_sst(const Config& cfg) {
  cso::DenseOperator t(cso::load_complex_matrix(cfg.matrix));
  if (cfg.adjoint) t = t.adjoint();
  const std::string fmt = format_or(cfg, "csv");
  if (fmt == "csv") {
    std::ostringstream s;
    cso::write_residual_csv(s, cso::residual_grid(t));
    emit(cfg, s.str());
    return kOk;
  }
  // JSON: per-n approximant summary with the reversal conjugation on A_n.
  ordered_json rows = ordered_json::array();
  for (std::size_t n = 1; n <= t.dimension(); ++n) {
    const Eigen::MatrixXcd a = cso::principal_submatrix(t, n);
    const auto r = cso::sst_approximant(a, cso::ConjugationSpec::block_reversal({n}));
    rows.push_back({{"n", n},
                    {"dimension", r.op.dimension()},
                    {"norm", r.op.norm()},
                    {"witness_defect", cso::conjugation_defect(r.op.matrix(), r.witness)}});
  }
  emit(cfg, dump({{"dimension", t.dimension()}, {"operator_norm", t.norm()}, {"approximants", std::move(rows)}}));
  return kOk;
}

int cmd_distinct(const Config& cfg) {
  const auto seq = cso::sequence_by_name(cfg.seq);
  const auto r = cso::check_distinct(seq, cfg.prefix);
  ordered_json j{{"sequence", seq.name()}, {"prefix", cfg.prefix}, {"distinct", r.distinct}};
  j["witness"] = r.witness ? ordered_json::array({r.witness->first, r.witness->second}) : ordered_json(nullptr);
  emit(cfg, dump(j));
  return kOk;
}

int cmd_corollary(const Config& cfg) {
  const auto seq = cso::sequence_by_name(cfg.seq);
  if (cfg.n < 1 || cfg.n > 62) throw cso::DomainError("--n must be in 1..62");
  const auto rows = cso::corollary_check(seq, static_cast<unsigned>(cfg.n));
  const std::string fmt = format_or(cfg, "json");
  if (fmt == "csv") {
    std::ostringstream s;
    s << "n,alpha_pow2,symmetry_defect\n";
    for (const auto& r : rows) s << r.n << ',' << cso::to_string(r.alpha_pow2) << ',' << cso::to_string(r.symmetry_defect) << '\n';
    emit(cfg, s.str());
    return kOk;
  }
  ordered_json a = ordered_json::array();
  for (const auto& r : rows)
    a.push_back({{"n", r.n}, {"alpha_pow2", cso::to_string(r.alpha_pow2)},
                 {"symmetry_defect", cso::to_string(r.symmetry_defect)}});
  emit(cfg, dump({{"sequence", seq.name()}, {"rows", std::move(a)}}));
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"csotool: complex symmetric approximation of weighted shifts"};
  app.require_subcommand(1);
  Config cfg;
  const auto formats = CLI::IsMember({"json", "csv"});

  auto seq_opt = [&](CLI::App* c) {
    c->add_option("--seq", cfg.seq, "kakutani, example or file:<path>")->capture_default_str();
  };
  auto out_opts = [&](CLI::App* c) {
    c->add_option("--out", cfg.out, "output file (relative paths resolve against $CSOTOOL_OUTPUT_DIR)");
    c->add_option("--format", cfg.format, "json or csv")->check(formats);
  };

  auto* weights = app.add_subcommand("weights", "first n weights as exact rationals");
  seq_opt(weights);
  weights->add_option("--n", cfg.n, "number of weights")->capture_default_str();
  out_opts(weights);

  auto* truncate = app.add_subcommand("truncate", "zero weights <= eps and report the block structure");
  seq_opt(truncate);
  truncate->add_option("--eps", cfg.eps, "threshold p/q")->capture_default_str();
  truncate->add_option("--prefix", cfg.prefix, "prefix length")->capture_default_str();
  out_opts(truncate);

  auto* approximate = app.add_subcommand("approximate", "certify a complex symmetric eps-approximant");
  seq_opt(approximate);
  approximate->add_option("--eps", cfg.eps, "tolerance p/q")->capture_default_str();
  approximate->add_option("--rounds", cfg.rounds, "rounds K")->capture_default_str();
  approximate->add_option("--oracle", cfg.oracle, "kakutani or scan")
      ->check(CLI::IsMember({"kakutani", "scan"}))
      ->capture_default_str();
  approximate->add_option("--search-limit", cfg.search_limit, "scan oracle index limit")->capture_default_str();
  out_opts(approximate);

  auto* verify = app.add_subcommand("verify", "independently re-check a certificate");
  verify->add_option("cert", cfg.cert, "certificate JSON")->required();
  out_opts(verify);

  auto* spectrum = app.add_subcommand("spectrum", "cluster the weight values of |T|");
  seq_opt(spectrum);
  spectrum->add_option("--prefix", cfg.prefix, "prefix length")->capture_default_str();
  spectrum->add_option("--tol", cfg.tol, "cluster gap tolerance (default 1e-9)");
  out_opts(spectrum);

  auto* fit = app.add_subcommand("fit", "fit a conjugation to a small matrix");
  fit->add_option("--matrix", cfg.matrix, "matrix file")->required();
  fit->add_option("--restarts", cfg.restarts, "total starts")->capture_default_str();
  fit->add_option("--max-iters", cfg.max_iters, "iterations per start")->capture_default_str();
  fit->add_option("--tol", cfg.tol, "target residual (default 1e-10)");
  fit->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  out_opts(fit);

  auto* sst = app.add_subcommand("sst", "strong-* truncation residuals");
  sst->add_option("--matrix", cfg.matrix, "matrix file")->required();
  sst->add_flag("--adjoint", cfg.adjoint, "use the adjoint of the matrix");
  out_opts(sst);

  auto* distinct = app.add_subcommand("distinct", "check that a prefix has pairwise distinct weights");
  seq_opt(distinct);
  distinct->add_option("--prefix", cfg.prefix, "prefix length")->capture_default_str();
  out_opts(distinct);

  auto* corollary = app.add_subcommand("corollary", "alpha_{2^n} and the symmetry defect up to 2^n");
  seq_opt(corollary);
  corollary->add_option("--n", cfg.n, "largest exponent")->capture_default_str();
  out_opts(corollary);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kDomain;
  }

  if (*weights) return cmd_weights(cfg);
  if (*truncate) return cmd_truncate(cfg);
  if (*approximate) return cmd_approximate(cfg);
  if (*verify) return cmd_verify(cfg);
  if (*spectrum) return cmd_spectrum(cfg);
  if (*fit) return cmd_fit(cfg);
  if (*sst) return cmd_sst(cfg);
  if (*distinct) return cmd_distinct(cfg);
  return cmd_corollary(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const cso::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const cso::SearchExhausted& e) {
    std::cerr << "error: " << e.what() << " (near miss " << e.near_miss() << ", " << e.near_miss_reason() << ")\n";
    return kSearch;
  } catch (const cso::ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSearch;
  } catch (const cso::ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSearch;
  } catch (const cso::VerificationFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerify;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
}
