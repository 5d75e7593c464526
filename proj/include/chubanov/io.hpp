#ifndef CHUBANOV_IO_HPP
#define CHUBANOV_IO_HPP

// Problem and certificate JSON files, seeded instance generation, and the
// exp(-phi(rho)) curve.
//
// File coordinates differ from internal ones only on PSD blocks: files hold
// the plain matrix entries of the upper triangle, internally off-diagonal
// entries carry a sqrt(2) factor (and the matching A columns a 1/sqrt(2)
// factor, so A x is unchanged).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "chubanov/algebra.hpp"
#include "chubanov/errors.hpp"
#include "chubanov/projection.hpp"
#include "chubanov/rescale.hpp"
#include "chubanov/solver.hpp"

namespace chubanov {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Coordinate conversion

/// Per-coordinate factor f with internal = f * file for elements
/// (sqrt(2) on PSD off-diagonals, 1 elsewhere). A columns scale by 1/f.
inline Eigen::VectorXd file_to_internal_scale(const ConeSpec& spec) {
  Eigen::VectorXd f = Eigen::VectorXd::Ones(spec.dim());
  for (std::size_t k = 0; k < spec.num_blocks(); ++k) {
    const BlockSpec& b = spec.block(k);
    if (b.kind != BlockKind::psd) continue;
    for (int j = 0; j < b.n; ++j)
      for (int i = 0; i < j; ++i) f(spec.offset(k) + svec_index(i, j)) = std::sqrt(2.0);
  }
  return f;
}

inline Element element_from_file(const SpecPtr& spec, const Eigen::VectorXd& file_coords) {
  if (file_coords.size() != spec->dim()) throw StructuralError("element length does not match the cone dimension");
  return Element(spec, file_coords.cwiseProduct(file_to_internal_scale(*spec)));
}

inline Eigen::VectorXd element_to_file(const Element& x) {
  return x.coords().cwiseQuotient(file_to_internal_scale(x.spec()));
}

// ---------------------------------------------------------------------------
// JSON helpers

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + "." + key, "missing field");
  return *it;
}

inline long require_int(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number_integer()) throw ParseError(path + "." + key, "expected an integer");
  return v.get<long>();
}

inline double require_number(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number()) throw ParseError(path + "." + key, "expected a number");
  return v.get<double>();
}

inline Eigen::VectorXd require_vector(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_array()) throw ParseError(path + "." + key, "expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ParseError(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

inline json to_json_array(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path, e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Cone lists

/// Parses [{type: nonneg, count}, {type: soc, dim}, {type: psd, order}, ...].
inline SpecPtr cone_from_json(const json& cone, const std::string& path = "cone") {
  if (!cone.is_array() || cone.empty()) throw ParseError(path, "expected a non-empty array of cone blocks");
  std::vector<BlockSpec> blocks;
  for (std::size_t i = 0; i < cone.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json& t = detail::require(cone[i], "type", p);
    if (!t.is_string()) throw ParseError(p + ".type", "expected a string");
    const std::string type = t.get<std::string>();
    if (type == "nonneg") {
      const long count = detail::require_int(cone[i], "count", p);
      if (count < 1) throw ParseError(p + ".count", "must be >= 1");
      for (long c = 0; c < count; ++c) blocks.push_back(BlockSpec::rank1());
    } else if (type == "soc") {
      const long dim = detail::require_int(cone[i], "dim", p);
      if (dim < 2) throw ParseError(p + ".dim", "must be >= 2");
      blocks.push_back(BlockSpec::soc(static_cast<int>(dim)));
    } else if (type == "psd") {
      const long order = detail::require_int(cone[i], "order", p);
      if (order < 1) throw ParseError(p + ".order", "must be >= 1");
      blocks.push_back(BlockSpec::psd(static_cast<int>(order)));
    } else {
      throw ParseError(p + ".type", "unknown cone type '" + type + "'");
    }
  }
  return make_spec(std::move(blocks));
}

/// Inverse of cone_from_json; runs of Rank1 blocks collapse to one nonneg entry.
inline json cone_to_json(const ConeSpec& spec) {
  json out = json::array();
  for (std::size_t k = 0; k < spec.num_blocks();) {
    const BlockSpec& b = spec.block(k);
    if (b.kind == BlockKind::rank1) {
      std::size_t run = 0;
      while (k + run < spec.num_blocks() && spec.block(k + run).kind == BlockKind::rank1) ++run;
      out.push_back({{"type", "nonneg"}, {"count", run}});
      k += run;
      continue;
    }
    if (b.kind == BlockKind::soc)
      out.push_back({{"type", "soc"}, {"dim", b.n}});
    else
      out.push_back({{"type", "psd"}, {"order", b.n}});
    ++k;
  }
  return out;
}

/// Compact cone string such as "nonneg:3,soc:4,psd:2".
inline SpecPtr cone_from_string(const std::string& text) {
  json arr = json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ParseError("cone", "expected type:size, got '" + item + "'");
    const std::string type = item.substr(0, colon);
    long size = 0;
    try {
      size = std::stol(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw ParseError("cone", "bad size in '" + item + "'");
    }
    if (type == "nonneg")
      arr.push_back({{"type", type}, {"count", size}});
    else if (type == "soc")
      arr.push_back({{"type", type}, {"dim", size}});
    else if (type == "psd")
      arr.push_back({{"type", type}, {"order", size}});
    else
      throw ParseError("cone", "unknown cone type '" + type + "'");
  }
  return cone_from_json(arr);
}

// ---------------------------------------------------------------------------
// Problem files

inline ProblemInstance problem_from_json(const json& j) {
  SpecPtr spec = cone_from_json(detail::require(j, "cone", "$"), "$.cone");
  const json& a = detail::require(j, "A", "$");
  const long rows = detail::require_int(a, "rows", "$.A");
  const long cols = detail::require_int(a, "cols", "$.A");
  if (rows < 0) throw ParseError("$.A.rows", "must be >= 0");
  if (cols != spec->dim())
    throw StructuralError("$.A.cols is " + std::to_string(cols) + " but the cone dimension is " +
                          std::to_string(spec->dim()));
  const Eigen::VectorXd data = detail::require_vector(a, "data", "$.A");
  if (data.size() != rows * cols)
    throw StructuralError("$.A.data has " + std::to_string(data.size()) + " entries, expected rows*cols = " +
                          std::to_string(rows * cols));
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long c = 0; c < cols; ++c) m(i, c) = data(i * cols + c);
  const Eigen::VectorXd f = file_to_internal_scale(*spec);
  m = m * f.cwiseInverse().asDiagonal();
  return ProblemInstance(std::move(spec), std::move(m));
}

inline json problem_to_json(const ProblemInstance& inst) {
  const Eigen::MatrixXd m = inst.A * file_to_internal_scale(*inst.spec).asDiagonal();
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(i, c));
  return {{"cone", cone_to_json(*inst.spec)}, {"A", {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}}}};
}

inline ProblemInstance load(const std::string& path) { return problem_from_json(detail::read_json_file(path)); }

inline void save_problem(const std::string& path, const ProblemInstance& inst) {
  detail::write_text_file(path, problem_to_json(inst).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Certificate files

inline json certificate_to_json(const Certificate& cert) {
  json j;
  j["type"] = to_string(cert.kind());
  switch (cert.kind()) {
    case CertificateKind::primal: j["x"] = detail::to_json_array(element_to_file(cert.primal().x)); break;
    case CertificateKind::dual:
      j["y"] = detail::to_json_array(element_to_file(cert.dual().y));
      j["u"] = detail::to_json_array(cert.dual().u);
      break;
    case CertificateKind::epsilon_infeasible: {
      const auto& e = cert.epsilon_infeasible();
      j["block"] = e.block;
      j["eps_k"] = e.eps_k;
      j["threshold"] = e.threshold;
      j["eps"] = e.eps;
      j["trivial"] = e.trivial;
      j["note"] = e.note;
      json tr = json::array();
      for (const auto& r : e.transcript)
        tr.push_back({{"iteration", r.iteration},
                      {"block", r.block},
                      {"rho", r.rho},
                      {"w_eigenvalues", detail::to_json_array(r.w_eigenvalues)},
                      {"delta", r.delta}});
      j["transcript"] = tr;
      break;
    }
    case CertificateKind::budget_exceeded:
      j["reason"] = std::get<BudgetExceededCertificate>(cert.payload).reason;
      break;
  }
  json good = json::array();
  for (long g : cert.stats.good_iterations) good.push_back(g);
  j["stats"] = {{"bp_iterations", cert.stats.bp_iterations},
                {"rescale_iterations", cert.stats.rescale_iterations},
                {"eps_ledger", cert.stats.eps_ledger},
                {"good_iterations", good}};
  return j;
}

inline Certificate certificate_from_json(const json& j, const SpecPtr& spec) {
  Certificate cert;
  const json& t = detail::require(j, "type", "$");
  if (!t.is_string()) throw ParseError("$.type", "expected a string");
  const std::string type = t.get<std::string>();
  if (type == "primal") {
    cert.payload = PrimalCertificate{element_from_file(spec, detail::require_vector(j, "x", "$"))};
  } else if (type == "dual") {
    cert.payload = DualCertificate{element_from_file(spec, detail::require_vector(j, "y", "$")),
                                   detail::require_vector(j, "u", "$")};
  } else if (type == "epsilon_infeasible") {
    EpsilonInfeasibleCertificate e;
    const long block = detail::require_int(j, "block", "$");
    if (block < 0) throw ParseError("$.block", "must be >= 0");
    e.block = static_cast<std::size_t>(block);
    e.eps_k = detail::require_number(j, "eps_k", "$");
    e.threshold = detail::require_number(j, "threshold", "$");
    e.eps = detail::require_number(j, "eps", "$");
    if (j.contains("trivial")) e.trivial = j.at("trivial").get<bool>();
    if (j.contains("note")) e.note = j.at("note").get<std::string>();
    const json& tr = detail::require(j, "transcript", "$");
    if (!tr.is_array()) throw ParseError("$.transcript", "expected an array");
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const std::string p = "$.transcript[" + std::to_string(i) + "]";
      RescaleRecord r;
      r.iteration = detail::require_int(tr[i], "iteration", p);
      r.block = static_cast<std::size_t>(detail::require_int(tr[i], "block", p));
      r.rho = detail::require_number(tr[i], "rho", p);
      r.w_eigenvalues = detail::require_vector(tr[i], "w_eigenvalues", p);
      r.delta = detail::require_number(tr[i], "delta", p);
      e.transcript.push_back(std::move(r));
    }
    cert.payload = std::move(e);
  } else if (type == "budget_exceeded") {
    BudgetExceededCertificate b;
    if (j.contains("reason")) b.reason = j.at("reason").get<std::string>();
    cert.payload = std::move(b);
  } else {
    throw ParseError("$.type", "unknown certificate type '" + type + "'");
  }
  if (j.contains("stats")) {
    const json& s = j.at("stats");
    cert.stats.bp_iterations = s.value("bp_iterations", 0L);
    cert.stats.rescale_iterations = s.value("rescale_iterations", 0L);
    cert.stats.eps_ledger = s.value("eps_ledger", std::vector<double>{});
    cert.stats.good_iterations = s.value("good_iterations", std::vector<long>{});
  }
  return cert;
}

inline void save_certificate(const std::string& path, const Certificate& cert) {
  detail::write_text_file(path, certificate_to_json(cert).dump(2) + "\n");
}

inline Certificate load_certificate(const std::string& path, const SpecPtr& spec) {
  return certificate_from_json(detail::read_json_file(path), spec);
}

// ---------------------------------------------------------------------------
// Instance generation

enum class InstanceKind { feasible, infeasible };

struct GenerateOptions {
  /// Feasible witness: e + h with ||h_k|| <= perturbation per block (< 1 keeps it interior).
  double perturbation = 0.5;
  /// When set, the feasible witness instead gets eigenvalues log-uniform in
  /// [margin, 1], with one eigenvalue of block 0 pinned to `margin`.
  std::optional<double> margin;
};

struct GeneratedInstance {
  ProblemInstance instance;
  InstanceKind kind = InstanceKind::feasible;
  Element witness;    // feasible: interior x0 with A x0 = 0; infeasible: y0 = A* u
  Eigen::VectorXd u;  // infeasible only
};

namespace detail {

inline Eigen::VectorXd gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

/// Random block element with the given eigenvalues (descending not required).
inline Eigen::VectorXd block_with_eigenvalues(const BlockSpec& b, const Eigen::VectorXd& lambda, std::mt19937_64& rng) {
  switch (b.kind) {
    case BlockKind::rank1: return lambda;
    case BlockKind::soc: {
      Eigen::VectorXd u = gaussian(rng, b.n - 1);
      u.normalize();
      Eigen::VectorXd x(b.n);
      x(0) = 0.5 * (lambda(0) + lambda(1));
      x.tail(b.n - 1) = 0.5 * (lambda(0) - lambda(1)) * u;
      return x;
    }
    case BlockKind::psd: {
      Eigen::MatrixXd g(b.n, b.n);
      for (int c = 0; c < b.n; ++c) g.col(c) = gaussian(rng, b.n);
      const Eigen::MatrixXd q = g.householderQr().householderQ();
      return svec(q * lambda.asDiagonal() * q.transpose());
    }
  }
  return {};
}

inline Element random_interior(const SpecPtr& spec, double perturbation, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Element x = Element::identity(spec);
  for (std::size_t k = 0; k < spec->num_blocks(); ++k) {
    const BlockSpec& b = spec->block(k);
    Eigen::VectorXd h = gaussian(rng, b.dim());
    const double hn = std::sqrt(b.gram_weight()) * h.norm();
    if (hn > 0) h *= perturbation * unif(rng) / hn;
    x.block(k) += h;
  }
  return x;
}

inline Element random_with_margin(const SpecPtr& spec, double margin, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Element x = Element::zero(spec);
  for (std::size_t k = 0; k < spec->num_blocks(); ++k) {
    const BlockSpec& b = spec->block(k);
    Eigen::VectorXd lambda(b.rank());
    for (int i = 0; i < b.rank(); ++i) lambda(i) = std::exp(std::log(margin) * unif(rng));
    if (k == 0) lambda(0) = margin;
    x.block(k) = block_with_eigenvalues(b, lambda, rng);
  }
  return x;
}

}  // namespace detail

/// Seeded instance with a known answer. Feasible: m random rows orthogonal
/// to an interior x0 (requires m < d). Infeasible: the first row is W y0 for
/// an interior y0, so y0 = A* e_1; the other rows are random.
inline GeneratedInstance generate(const SpecPtr& spec, int m, InstanceKind kind, std::uint64_t seed,
                                  const GenerateOptions& opts = {}) {
  if (m < 0) throw DomainError("generate: m must be >= 0");
  std::mt19937_64 rng(seed);
  const int d = spec->dim();
  GeneratedInstance g;
  g.kind = kind;
  Eigen::MatrixXd a(m, d);
  if (kind == InstanceKind::feasible) {
    if (m >= d) throw DomainError("generate: feasible instances need m < d");
    g.witness = opts.margin ? detail::random_with_margin(spec, *opts.margin, rng)
                            : detail::random_interior(spec, opts.perturbation, rng);
    const Eigen::VectorXd& x0 = g.witness.coords();
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd row = detail::gaussian(rng, d);
      row -= (row.dot(x0) / x0.squaredNorm()) * x0;
      row -= (row.dot(x0) / x0.squaredNorm()) * x0;
      a.row(i) = row.transpose();
    }
  } else {
    if (m < 1) throw DomainError("generate: infeasible instances need m >= 1");
    g.witness = detail::random_interior(spec, opts.perturbation, rng);
    a.row(0) = spec->gram_weights().cwiseProduct(g.witness.coords()).transpose();
    for (int i = 1; i < m; ++i) a.row(i) = detail::gaussian(rng, d).transpose();
    g.u = Eigen::VectorXd::Unit(m, 0);
  }
  g.instance = ProblemInstance(spec, std::move(a));
  return g;
}

/// The generator's witness as a certificate of its own instance.
inline Certificate witness_certificate(const GeneratedInstance& g) {
  Certificate c;
  if (g.kind == InstanceKind::feasible)
    c.payload = PrimalCertificate{g.witness};
  else
    c.payload = DualCertificate{g.witness, g.u};
  return c;
}

// ---------------------------------------------------------------------------
// exp(-phi(rho)) curve

struct PhiPoint {
  double rho = 0.0;
  double value = 0.0;  // exp(-phi(rho))
};

/// `steps` evenly spaced samples over [rho_min, rho_max], endpoints included.
inline std::vector<PhiPoint> phi_curve(double rho_min, double rho_max, int steps) {
  if (!(rho_min >= 1.0)) throw DomainError("phi_curve: rho_min must be >= 1");
  if (!(rho_max > rho_min)) throw DomainError("phi_curve: rho_max must exceed rho_min");
  if (steps < 1) throw DomainError("phi_curve: steps must be >= 1");
  std::vector<PhiPoint> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double rho = steps == 1 ? rho_min : rho_min + (rho_max - rho_min) * i / (steps - 1);
    out.push_back({rho, std::exp(-phi(rho))});
  }
  return out;
}

inline void write_phi_csv(std::ostream& os, const std::vector<PhiPoint>& pts) {
  os << "rho,exp_neg_phi\n";
  char buf[64];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.rho, p.value);
    os << buf;
  }
}

}  // namespace chubanov

#endif  // CHUBANOV_IO_HPP
