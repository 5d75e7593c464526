// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chubanov/cli.hpp"
#include "test_support.hpp"

using namespace chubanov;
using chubanov::testing::Family;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr Family kFamilies[] = {Family::rank1, Family::soc, Family::psd, Family::mixed};

/// Counts checks and failures; keeps the first failure message.
struct Tally {
  long checks = 0;
  long failures = 0;
  std::string first_failure;

  void check(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    if (failures++ == 0) first_failure = what;
  }
  bool passed() const { return failures == 0 && checks > 0; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Line {
  bool pass = false;
  std::string text;
};

Line report(const Tally& t, const std::string& summary) {
  Line l{t.passed(), summary + " (" + std::to_string(t.checks) + " checks"};
  if (t.failures > 0) l.text += ", " + std::to_string(t.failures) + " failed, first: " + t.first_failure;
  l.text += ")";
  return l;
}

// Criterion 1

void algebra_sample(const SpecPtr& s, std::mt19937_64& rng, Tally& t, const std::string& tag) {
  constexpr double tol = 1e-10;
  const Element x = chubanov::testing::random_element(s, rng);
  const Element y = chubanov::testing::random_element(s, rng);
  const Element z = chubanov::testing::random_element(s, rng);
  const double nx = norm(x), ny = norm(y), nz = norm(z);

  t.check(norm(jordan_product(x, y) - jordan_product(y, x)) <= tol * nx * ny, tag + " commutativity");
  const Element x2 = jordan_product(x, x);
  t.check(norm(jordan_product(x, jordan_product(x2, y)) - jordan_product(x2, jordan_product(x, y))) <=
              tol * nx * nx * nx * ny,
          tag + " Jordan identity");
  t.check(std::abs(inner(jordan_product(x, y), z) - inner(x, jordan_product(y, z))) <= tol * nx * ny * nz,
          tag + " trace associativity");

  const SpectralDecomposition sd = spectral_decomposition(x);
  t.check(norm(Element(s, sd.reconstruct()) - x) <= tol * nx, tag + " spectral reconstruction");
  const Element e = Element::identity(s);
  for (std::size_t k = 0; k < s->num_blocks(); ++k) {
    const BlockSpec& b = s->block(k);
    const auto& fr = sd.blocks[k];
    VectorXd sum = VectorXd::Zero(b.dim());
    for (std::size_t i = 0; i < fr.idempotents.size(); ++i) {
      const VectorXd& ci = fr.idempotents[i];
      sum += ci;
      t.check(std::abs(block_ops::inner(b, ci, ci) - 1.0) <= tol, tag + " unit idempotent");
      for (std::size_t j = i; j < fr.idempotents.size(); ++j) {
        const VectorXd p = block_ops::jordan_product(b, ci, fr.idempotents[j]);
        const VectorXd expected = i == j ? ci : VectorXd::Zero(b.dim());
        t.check((p - expected).norm() <= tol, tag + " frame orthogonality");
      }
    }
    t.check((sum - e.block(k)).norm() <= tol, tag + " frame sums to identity");
  }

  // Quadratic representation.
  const Element w = chubanov::testing::random_interior(s, rng);
  const double nw = norm(w);
  t.check(norm(quad_apply(w, e) - jordan_product(w, w)) <= tol * nw * nw, tag + " Q_w(e) = w^2");
  t.check(norm(quad_apply(w, inverse(w)) - w) <= tol * nw * nw * norm(inverse(w)), tag + " Q_w(w^-1) = w");
  const Element xi = chubanov::testing::random_interior(s, rng);
  t.check(is_interior(quad_apply(w, xi), 0.0), tag + " Q_w preserves int K");
  for (std::size_t k = 0; k < s->num_blocks(); ++k) {
    const BlockSpec& b = s->block(k);
    const Element wk = w.block_element(k);
    const MatrixXd m1 = quad_matrix(wk, 1.0);
    const double a = 0.5 + std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    t.check((quad_matrix(wk, a) - a * a * m1).norm() <= tol * a * a * m1.norm(), tag + " Q_{aw} scaling");
    const double power = 2.0 * b.dim() / b.rank();
    t.check(std::abs(m1.determinant() / std::pow(det(inv_sqrt(wk)), power) - 1.0) <= 1e-8,
            tag + " det quad_matrix");
    // Matrix of Q_w assembled column by column.
    MatrixXd qw(b.dim(), b.dim());
    for (int c = 0; c < b.dim(); ++c) {
      Element basis = Element::zero(wk.spec_ptr());
      basis.coords()(c) = 1.0;
      qw.col(c) = quad_apply(wk, basis).coords();
    }
    t.check(std::abs(qw.determinant() / std::pow(det(wk), power) - 1.0) <= 1e-8, tag + " det Q_x = (det x)^{2d/r}");
  }

  // Dual norms.
  const double slack = tol * nx * ny;
  t.check(inner(x, y) <= norm(y, NormKind::one) * norm(x, NormKind::inf) + slack, tag + " <x,y> <= |y|_1 |x|_inf");
  t.check(inner(x, y) <= norm(y, NormKind::one_inf) * norm(x, NormKind::inf_one) + slack,
          tag + " <x,y> <= |y|_1inf |x|_inf1");
  t.check(norm(y, NormKind::inf_one) <= std::sqrt(static_cast<double>(s->num_blocks())) * ny * (1 + tol),
          tag + " |y|_inf1 <= sqrt(l) |y|");

  // Attainment: the frame witness reaches |y|_inf1, sampled unit points stay below.
  const SpectralDecomposition sy = spectral_decomposition(y);
  Element witness = Element::zero(s);
  for (std::size_t k = 0; k < s->num_blocks(); ++k) {
    const auto& fr = sy.blocks[k];
    Eigen::Index best = 0;
    fr.eigenvalues.cwiseAbs().maxCoeff(&best);
    witness.block(k) = (fr.eigenvalues(best) >= 0 ? 1.0 : -1.0) * fr.idempotents[best];
  }
  const double dual = norm(y, NormKind::inf_one);
  t.check(std::abs(norm(witness, NormKind::one_inf) - 1.0) <= tol, tag + " witness unit norm");
  t.check(std::abs(inner(y, witness) - dual) <= tol * ny, tag + " witness attains |y|_inf1");
  for (int i = 0; i < 4; ++i) {
    Element u = chubanov::testing::random_element(s, rng);
    u *= 1.0 / norm(u, NormKind::one_inf);
    t.check(inner(y, u) <= dual + tol * ny, tag + " sampled <y,u> <= |y|_inf1");
  }
}

Line criterion_algebra() {
  Tally t;
  std::mt19937_64 rng(1001);
  for (Family f : kFamilies) {
    for (int i = 0; i < 1000; ++i) {
      // Single simple blocks for the pure families, products for the mixed one.
      const SpecPtr s = f == Family::mixed ? chubanov::testing::random_spec(rng, f, 2, 4)
                                           : chubanov::testing::random_spec(rng, f, 1, 1);
      algebra_sample(s, rng, t, chubanov::testing::family_name(f) + std::string(" ") + cone_to_json(*s).dump());
    }
  }
  return report(t, "algebra conformance, 1000 elements per family");
}

// Criterion 2

Line criterion_constants() {
  struct Row {
    double rho, z_rho, exp_neg_phi;
  };
  // 40-digit reference evaluations of the closed forms.
  constexpr Row rows[] = {
      {1.5, 0.15026888717234441531, 0.95854488942622572051}, {2.0, 0.1464466094067262378, 0.91779021574842427226},
      {3.0, 0.11511544309734095207, 0.87010495644778781256}, {10.0, 0.040238569533280318002, 0.79717588005181807341},
      {100.0, 0.0042071555363650775979, 0.76817911540989857049},
  };
  Tally t;
  t.check(std::abs(phi(2.0) - (1.5 - std::sqrt(2.0))) <= 1e-15, "phi(2) = 3/2 - sqrt2");
  t.check(std::abs(kPhiTwo - (1.5 - std::sqrt(2.0))) <= 1e-15, "kPhiTwo");
  t.check(std::exp(-phi(2.0)) < 0.918, "exp(-phi(2)) < 0.918");
  for (const Row& r : rows) {
    t.check(std::abs(z_rho(r.rho) - r.z_rho) <= 1e-12, "z_rho at " + fmt("%g", r.rho));
    t.check(std::abs(std::exp(-phi(r.rho)) - r.exp_neg_phi) <= 1e-12, "exp(-phi) at " + fmt("%g", r.rho));
    for (int rk : {1, 2, 3, 6})
      t.check(std::abs(beta_from_rho(r.rho, rk) - (rk - r.z_rho)) <= 1e-12, "beta at " + fmt("%g", r.rho));
  }
  t.check(std::abs(beta_from_rho(2.0, 3) - 2.8535533905932737622) <= 1e-12, "beta(2, 3)");
  return report(t, "analytic constants, exp(-phi(2)) = " + fmt("%.12f", std::exp(-phi(2.0))));
}

// Criterion 3

Line criterion_log_det() {
  Tally t;
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 1e300;
  for (Family f : kFamilies) {
    for (int i = 0; i < 1000; ++i) {
      const SpecPtr s = chubanov::testing::random_spec(rng, f, 1, 3);
      const double r = s->rank();
      Element h = chubanov::testing::random_element(s, rng);
      h *= 0.999 * r * u(rng) / norm(h);
      const double hn = norm(h);
      const double lhs = -log_det(Element::identity(s) * r + h);
      const double rhs = -r * std::log(r) - trace(h) / r + hn * hn / (2.0 * r * (r - hn));
      worst = std::min(worst, rhs - lhs);
      t.check(rhs - lhs >= -1e-10, "slack " + fmt("%.3g", rhs - lhs) + " on " + cone_to_json(*s).dump());
    }
  }
  return report(t, "log-det bound, 1000 h per family, min slack " + fmt("%.3g", worst));
}

// Criterion 4

Line criterion_basic_procedure() {
  Tally t;
  std::mt19937_64 rng(1004);
  std::map<std::string, int> outcomes;
  int instances = 0;
  for (Family f : kFamilies) {
    for (int i = 0; i < 50; ++i, ++instances) {
      const SpecPtr s = chubanov::testing::random_spec(rng, f, 1, 4);
      const int d = s->dim();
      ProblemInstance inst(s, MatrixXd::Zero(1, d));
      if (i % 2 == 0 || d < 3) {
        const int m = chubanov::testing::uniform_int(rng, 1, std::max(1, d - 1));
        MatrixXd a(m, d);
        for (int r = 0; r < m; ++r) a.row(r) = chubanov::testing::gaussian(rng, d).transpose();
        inst = ProblemInstance(s, a);
      } else {
        GenerateOptions o;
        o.margin = 1e-4;
        inst = generate(s, d - 2, InstanceKind::feasible, 5000 + instances, o).instance;
      }
      const std::string tag = chubanov::testing::family_name(f) + std::string(" #") + std::to_string(i);
      const Projector proj(inst);
      const Element start = Element::identity(s) * (1.0 / s->rank());
      const double tau = threshold_factor(*s);
      BasicStatus status[2] = {};
      int v = 0;
      for (BpStop stop : {BpStop::z_zero, BpStop::y_minus_z}) {
        SolverConfig cfg;
        cfg.bp_stop = stop;
        try {
          const BasicOutcome out = run_basic(proj, start, cfg, [&](const BasicStep& st) {
            const double before = 1.0 / (st.z_norm * st.z_norm);
            const double after = 1.0 / (st.z_next_norm * st.z_next_norm);
            t.check(after - before >= 1.0 - 1e-9, tag + " potential growth " + fmt("%.12g", after - before));
          });
          status[v] = out.status;
          t.check(out.iterations <= cfg.bp_budget(*s), tag + " iteration bound");
          switch (out.status) {
            case BasicStatus::primal_found:
              t.check(is_interior(out.point) &&
                          (inst.A * out.point.coords()).norm() <= 1e-8 * inst.A.norm() * out.point.coords().norm(),
                      tag + " primal contract");
              break;
            case BasicStatus::dual_found:
              t.check(min_eigenvalue(out.point) >= -1e-12 * norm(out.point) && norm(out.point) > 0.0 &&
                          norm(proj(out.point)) <= 1e-10 * norm(out.point),
                      tag + " dual contract");
              break;
            case BasicStatus::threshold_met:
              t.check(norm(out.projected) <= tau * one_inf_norm_in_cone(out.point) * (1 + 1e-12),
                      tag + " threshold contract");
              break;
          }
          outcomes[std::string(stop == BpStop::z_zero ? "z_zero " : "y_minus_z ") + to_string(out.status)]++;
        } catch (const BudgetExceededError&) {
          t.check(false, tag + " budget exceeded");
        }
        ++v;
      }
      // The two stop rules may differ in when they stop, never in which side of the alternative they certify.
      const bool contradict = (status[0] == BasicStatus::primal_found && status[1] == BasicStatus::dual_found) ||
                              (status[0] == BasicStatus::dual_found && status[1] == BasicStatus::primal_found);
      t.check(!contradict, tag + " stop rules disagree");
    }
  }
  std::string summary = "basic procedure, " + std::to_string(instances) + " instances x 2 stop rules:";
  for (const auto& [k, n] : outcomes) summary += " " + k + "=" + std::to_string(n);
  return report(t, summary);
}

// Criteria 5, 6, 7: shared solver runs.

struct RescaleAudit {
  Tally volume;
  Tally halfspace;
  long good_blocks = 0;
  std::mt19937_64 rng{1005};

  SolverObserver observer() {
    SolverObserver obs;
    obs.on_rescale = [this](long it, const RescaleDecision& dec, const ScalingState&, const MatrixXd&) {
      for (std::size_t k = 0; k < dec.blocks.size(); ++k) {
        const BlockDecision& b = dec.blocks[k];
        if (!b.applied) continue;
        const int r = b.w.spec().rank();
        const std::string tag = "iteration " + std::to_string(it) + " block " + std::to_string(k);
        if (b.rho >= 2.0) {
          ++good_blocks;
          volume.check(b.log_volume_delta <= -kPhiTwo / r + 1e-12,
                       tag + " delta " + fmt("%.6g", b.log_volume_delta) + " rho " + fmt("%.6g", b.rho));
        }
        const MatrixXd q = block_scaling(b.w, r);
        for (int i = 0; i < 2; ++i) {
          Element x = chubanov::testing::random_interior(b.w.spec_ptr(), rng);
          x *= 1.0 / trace(x);
          const double lhs = inner(b.w, Element(b.w.spec_ptr(), q * x.coords()));
          halfspace.check(std::abs(lhs - r) <= 1e-8, tag + " <w, Q x> - r = " + fmt("%.3g", lhs - r));
        }
      }
    };
    return obs;
  }
};

SpecPtr family_spec(std::mt19937_64& rng, Family f) {
  for (;;) {
    SpecPtr s;
    switch (f) {
      case Family::rank1: s = make_spec(nonneg_blocks(chubanov::testing::uniform_int(rng, 2, 8))); break;
      case Family::mixed: s = chubanov::testing::random_spec(rng, f, 2, 4); break;
      default: s = chubanov::testing::random_spec(rng, f, 1, 3); break;
    }
    if (s->dim() >= 2) return s;
  }
}

struct EndToEnd {
  Line line;
  RescaleAudit audit;
};

void end_to_end(EndToEnd& res) {
  Tally t;
  std::map<std::string, int> outcomes;
  long max_rescale = 0;
  int feasible = 0, infeasible = 0;
  const SolverObserver obs = res.audit.observer();
  for (Family f : kFamilies) {
    std::mt19937_64 rng(2000 + static_cast<int>(f));
    const std::string fam = chubanov::testing::family_name(f);
    auto run = [&](const GeneratedInstance& g, BpStop stop, const std::string& tag) {
      SolverConfig cfg;
      cfg.bp_stop = stop;
      const Certificate c = solve(g.instance, cfg, obs);
      const long bound = SolverConfig::rescale_bound(*g.instance.spec, 1e-6);
      max_rescale = std::max(max_rescale, c.stats.rescale_iterations);
      t.check(c.stats.rescale_iterations <= bound,
              tag + " rescalings " + std::to_string(c.stats.rescale_iterations) + " > " + std::to_string(bound));
      t.check(verify(g.instance, c, 1e-8).passed(), tag + " " + to_string(c.kind()) + " failed verification");
      outcomes[(g.kind == InstanceKind::feasible ? "feasible/" : "infeasible/") +
               std::string(stop == BpStop::z_zero ? "z_zero/" : "y_minus_z/") + to_string(c.kind())]++;
      return c.kind();
    };
    for (int i = 0; i < 50; ++i, ++feasible) {
      const SpecPtr s = family_spec(rng, f);
      const int d = s->dim();
      GeneratedInstance g;
      if (i % 2 == 0) {
        g = generate(s, chubanov::testing::uniform_int(rng, 1, d - 1), InstanceKind::feasible, 3000 + i);
      } else {
        GenerateOptions o;
        o.margin = 1e-4;
        g = generate(s, std::max(1, d - 2), InstanceKind::feasible, 3000 + i, o);
      }
      for (BpStop stop : {BpStop::z_zero, BpStop::y_minus_z}) {
        const std::string tag = fam + " feasible #" + std::to_string(i);
        t.check(run(g, stop, tag) == CertificateKind::primal, tag + " did not return primal");
      }
    }
    for (int i = 0; i < 50; ++i, ++infeasible) {
      const SpecPtr s = family_spec(rng, f);
      const GeneratedInstance g =
          generate(s, chubanov::testing::uniform_int(rng, 1, s->dim() - 1), InstanceKind::infeasible, 4000 + i);
      const std::string tag = fam + " infeasible #" + std::to_string(i);
      t.check(run(g, BpStop::y_minus_z, tag) == CertificateKind::dual, tag + " did not return dual");
      // The default rule may also end through the epsilon ledger; never with a primal point.
      const CertificateKind k = run(g, BpStop::z_zero, tag);
      t.check(k == CertificateKind::dual || k == CertificateKind::epsilon_infeasible, tag + " returned " + to_string(k));
    }
  }
  std::string summary = "end-to-end, " + std::to_string(feasible) + " feasible and " + std::to_string(infeasible) +
                        " infeasible instances, max rescalings " + std::to_string(max_rescale) + ":";
  for (const auto& [k, n] : outcomes) summary += " " + k + "=" + std::to_string(n);
  res.line = report(t, summary);
}

GeneratedInstance hard_feasible(std::uint64_t seed, Family f) {
  std::mt19937_64 rng(seed);
  SpecPtr spec;
  do spec = family_spec(rng, f);
  while (spec->dim() < 3);
  GenerateOptions o;
  o.margin = 1e-4;
  return generate(spec, spec->dim() - 2, InstanceKind::feasible, seed, o);
}

Line criterion_ledger(RescaleAudit& audit) {
  Tally t;
  long rescalings = 0;
  double worst = 1e300;
  for (Family f : kFamilies) {
    for (std::uint64_t seed = 7000; seed < 7025; ++seed) {
      const GeneratedInstance g = hard_feasible(seed, f);
      const SpecPtr& s = g.instance.spec;
      const Element xs = g.witness * (1.0 / one_inf_norm_in_cone(g.witness));
      const std::string tag = chubanov::testing::family_name(f) + std::string(" seed ") + std::to_string(seed);
      SolverObserver obs = audit.observer();
      const auto audit_rescale = obs.on_rescale;
      obs.on_rescale = [&](long it, const RescaleDecision& dec, const ScalingState& st, const MatrixXd& next) {
        audit_rescale(it, dec, st, next);
        ++rescalings;
        const Element u = st.map_primal_inverse(xs);
        for (std::size_t k = 0; k < s->num_blocks(); ++k) {
          const double bound =
              std::log(static_cast<double>(s->block_rank(k))) + std::log(eigenvalues(xs.block_element(k)).minCoeff());
          worst = std::min(worst, st.eps(k) - bound);
          t.check(st.eps(k) >= bound - 1e-8, tag + " eps_k below log r_k + log lambda_min");
          t.check(block_trace(u, k) <= 1.0 + 1e-8, tag + " inverse-mapped witness leaves <u_k, e_k> <= 1");
          t.check(is_interior(u, 0.0), tag + " inverse-mapped witness interior");
        }
      };
      const Certificate c = solve(g.instance, SolverConfig{}, obs);
      t.check(c.kind() == CertificateKind::primal, tag + " did not return primal");
    }
  }
  t.check(rescalings > 0, "no rescalings observed");
  return report(t, "ledger soundness over " + std::to_string(rescalings) + " rescalings, min slack " +
                       fmt("%.3g", worst));
}

// Criterion 8

struct Trace {
  std::map<long, std::vector<MatrixXd>> iterates;
  std::vector<MatrixXd> w;
  std::vector<double> ledger;
  std::string kind;
};

Line criterion_sdp() {
  Tally t;
  int compared = 0;
  long iterates_compared = 0;
  for (std::uint64_t seed = 0; seed < 400 && compared < 12; ++seed) {
    std::mt19937_64 rng(seed);
    const int n = chubanov::testing::uniform_int(rng, 2, 6);
    const SpecPtr spec = make_spec({BlockSpec::psd(n)});
    GenerateOptions o;
    o.margin = 1e-4;
    const GeneratedInstance g = generate(spec, spec->dim() - 2, InstanceKind::feasible, 8000 + seed, o);
    const SolverConfig cfg;

    Trace gen;
    SolverObserver gobs;
    gobs.on_basic_step = [&](long it, const BasicStep& st) { gen.iterates[it].push_back(smat(st.y.coords(), n)); };
    gobs.on_rescale = [&](long, const RescaleDecision& dec, const ScalingState& st, const MatrixXd&) {
      gen.w.push_back(smat(dec.blocks[0].w.coords(), n));
      gen.ledger.push_back(st.eps(0));
    };
    gen.kind = to_string(solve(g.instance, cfg, gobs).kind());
    if (gen.w.size() < 5) continue;

    Trace dir;
    sdp::Observer dobs;
    dobs.on_iterate = [&](long outer, long, const MatrixXd& y) { dir.iterates[outer].push_back(y); };
    dobs.on_rescale = [&](long, const MatrixXd& w, double, double eps) {
      dir.w.push_back(w);
      dir.ledger.push_back(eps);
    };
    const sdp::Result r = sdp::solve(sdp::from_instance(g.instance), cfg, dobs);
    ++compared;
    const std::string tag = "seed " + std::to_string(seed);
    const char* direct_kind = r.status == sdp::Status::primal                ? "primal"
                              : r.status == sdp::Status::dual              ? "dual"
                              : r.status == sdp::Status::epsilon_infeasible ? "epsilon_infeasible"
                                                                           : "budget_exceeded";
    t.check(gen.kind == direct_kind, tag + " outcome " + gen.kind + " vs " + direct_kind);
    t.check(gen.w.size() == dir.w.size(), tag + " rescale count");
    for (std::size_t i = 0; i < std::min(gen.w.size(), dir.w.size()); ++i) {
      t.check((gen.w[i] - dir.w[i]).norm() <= 1e-8 * gen.w[i].norm(), tag + " w at rescale " + std::to_string(i));
      t.check(std::abs(gen.ledger[i] - dir.ledger[i]) <= 1e-8, tag + " ledger at rescale " + std::to_string(i));
    }
    for (const auto& [outer, ys] : gen.iterates) {
      const auto it = dir.iterates.find(outer);
      if (it == dir.iterates.end() || it->second.size() < ys.size()) {
        t.check(false, tag + " missing direct iterates at outer " + std::to_string(outer));
        continue;
      }
      for (std::size_t j = 0; j < ys.size(); ++j, ++iterates_compared)
        t.check((ys[j] - it->second[j]).norm() <= 1e-8, tag + " iterate " + std::to_string(j));
    }
  }
  t.check(compared >= 10, "only " + std::to_string(compared) + " instances with 5 or more rescalings");
  return report(t, "SDP direct path agreement on " + std::to_string(compared) + " instances, " +
                       std::to_string(iterates_compared) + " iterates");
}

// Criterion 9

Line criterion_phi_curve() {
  Tally t;
  long rows = 0;
  for (const char* max : {"10", "1000"}) {
    const char* argv[] = {"chubanov", "phi-curve", "--min", "1", "--max", max, "--steps", "400"};
    std::ostringstream out, err;
    const int code = run_cli(8, argv, out, err);
    t.check(code == 0, "phi-curve exit code " + std::to_string(code));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    t.check(line == "rho,exp_neg_phi", "header " + line);
    double prev_rho = 0.0, prev = 2.0;
    bool first = true;
    while (std::getline(in, line)) {
      ++rows;
      const auto comma = line.find(',');
      const double rho = std::stod(line.substr(0, comma));
      const double v = std::stod(line.substr(comma + 1));
      if (first) t.check(rho == 1.0 && v == 1.0, "value at rho = 1 is " + fmt("%.17g", v));
      else t.check(rho > prev_rho && v < prev, "not decreasing at rho " + fmt("%g", rho));
      if (rho >= 2.0) t.check(v < 0.918, "value " + fmt("%.6f", v) + " at rho " + fmt("%g", rho));
      prev_rho = rho;
      prev = v;
      first = false;
    }
  }
  t.check(rows == 800, "row count " + std::to_string(rows));
  return report(t, "phi-curve over rho in [1, 10] and [1, 1000]");
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  std::vector<Line> lines(10);
  lines[1] = criterion_algebra();
  lines[2] = criterion_constants();
  lines[3] = criterion_log_det();
  lines[4] = criterion_basic_procedure();
  EndToEnd e2e;
  end_to_end(e2e);
  lines[6] = e2e.line;
  lines[7] = criterion_ledger(e2e.audit);
  lines[5] = report(e2e.audit.volume, "volume reduction, " + std::to_string(e2e.audit.good_blocks) +
                                          " block rescalings with rho >= 2");
  lines[5].pass = lines[5].pass && e2e.audit.halfspace.passed();
  lines[5].text += "; half-space identity " + std::to_string(e2e.audit.halfspace.checks) + " checks, " +
                   std::to_string(e2e.audit.halfspace.failures) + " failed" +
                   (e2e.audit.halfspace.failures ? ", first: " + e2e.audit.halfspace.first_failure : "");
  lines[8] = criterion_sdp();
  lines[9] = criterion_phi_curve();

  bool all = true;
  for (int i = 1; i <= 9; ++i) {
    std::cout << (lines[i].pass ? "PASS " : "FAIL ") << i << " " << lines[i].text << "\n";
    all = all && lines[i].pass;
  }
  const double secs = std::chrono::duration<double>(clock::now() - t0).count();
  std::cout << (all ? "all criteria passed" : "some criteria failed") << " in " << fmt("%.1f", secs) << " s\n";
  return all ? 0 : 1;
}
