#include "slk/experiments.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "slk/evolve.hpp"
#include "slk/fields.hpp"
#include "slk/holder.hpp"
#include "slk/parallel.hpp"
#include "slk/stable.hpp"

namespace slk {
namespace {

using nlohmann::json;

struct Task {
  std::string id;
  std::function<AuditRecord()> fn;
};

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

double parse_suffix(const std::string& id, const std::string& prefix) {
  try {
    std::size_t used = 0;
    const std::string rest = id.substr(prefix.size());
    const double v = std::stod(rest, &used);
    if (used == rest.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("malformed id: " + id);
}

/// Corpus members plus the parametric families cusp-G, wave-K, bump-rR, gauss-S, const-C.
FunctionField field_by_id(const std::string& id, int dim) {
  for (auto& f : corpus(dim))
    if (f.id == id) return f;
  if (id.rfind("cusp-", 0) == 0) return cusp(dim, parse_suffix(id, "cusp-"));
  if (id.rfind("wave-", 0) == 0) return wave(dim, parse_suffix(id, "wave-"));
  if (id.rfind("bump-r", 0) == 0) return bump(dim, parse_suffix(id, "bump-r"));
  if (id.rfind("gauss-", 0) == 0) return gaussian(dim, parse_suffix(id, "gauss-"));
  if (id.rfind("const-", 0) == 0) return constant_field(dim, parse_suffix(id, "const-"));
  throw InvalidArgument("unknown field: " + id);
}

std::string cusp_id(double g) {
  std::ostringstream os;
  os << "cusp-" << g;
  return os.str();
}

std::vector<std::string> fields_or(const ExperimentConfig& c, std::vector<std::string> fallback) {
  return c.fields.empty() ? fallback : c.fields;
}

AuditRecord base(const ExperimentConfig& c, const std::string& audit, const std::string& field) {
  AuditRecord r;
  r.audit_id = audit;
  r.field_id = field;
  r.alpha = c.alpha;
  r.beta = c.beta;
  return r;
}

/// Runs the tasks on the worker pool; results keep task order.
std::vector<AuditRecord> run_tasks(const std::vector<Task>& tasks, const std::string& hash) {
  std::vector<AuditRecord> out(tasks.size());
  parallel_chunks(tasks.size(), tasks.size(), [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        out[i] = tasks[i].fn();
      } catch (const std::exception& ex) {
        out[i] = AuditRecord{};
        out[i].audit_id = tasks[i].id;
        out[i].pass = false;
        out[i].note = std::string("error: ") + ex.what();
      }
      out[i].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out[i].config_hash = hash;
    }
  });
  return out;
}

// ---- holder family -------------------------------------------------------

ProbeBox holder_box(int dim) {
  ProbeBox b;
  b.dim = dim;
  b.half_width = 8.0;
  b.spacing = dim == 1 ? 1.0 / 64 : 1.0 / 8;
  return b;
}

void verify_holder(const ExperimentConfig& c, std::vector<Task>& tasks) {
  static const double pairs[6][2] = {{0.3, 0.5}, {0.3, 0.7}, {0.5, 0.7}, {0.5, 1.5}, {0.7, 1.3}, {1.3, 1.7}};
  std::vector<std::string> ids;
  for (const auto& f : corpus(c.dim)) ids.push_back(f.id);
  for (const auto& id : fields_or(c, ids))
    tasks.push_back({"interp/" + id, [&c, id] {
                       const auto f = field_by_id(id, c.dim);
                       auto r = base(c, "interp", id);
                       r.pass = true;
                       r.score = 0.0;
                       int skipped = 0;
                       for (const auto& ab : pairs)
                         for (double eps : {0.5, 0.1, 0.02}) {
                           const auto b = interp_bound(f, ab[0], ab[1], eps, holder_box(c.dim));
                           if (!b.applicable) {
                             ++skipped;
                             continue;
                           }
                           r.pass = r.pass && b.pass;
                           const double ratio = b.rhs > 0 ? b.lhs / b.rhs : 0.0;
                           if (ratio >= r.score) {
                             r.score = ratio;
                             r.lhs = b.lhs;
                             r.rhs = b.rhs;
                             r.constant = b.constant;
                           }
                         }
                       r.note = std::to_string(18 - skipped) + " of 18 cases applicable";
                       return r;
                     }});
  const std::vector<std::string> prod = {"wave-2", "bump-r2", "gauss-1"};
  for (const auto& a : prod)
    for (const auto& b : prod)
      tasks.push_back({"product/" + a + "*" + b, [&c, a, b] {
                         auto r = base(c, "product", a + "*" + b);
                         r.pass = true;
                         for (double s : {0.3, 0.7, 1.5}) {
                           const auto q = product_bound(field_by_id(a, c.dim), field_by_id(b, c.dim), s,
                                                        holder_box(c.dim));
                           r.pass = r.pass && q.pass && q.applicable;
                           const double ratio = q.rhs > 0 ? q.lhs / q.rhs : 0.0;
                           if (ratio >= r.score) {
                             r.score = ratio;
                             r.lhs = q.lhs;
                             r.rhs = q.rhs;
                             r.constant = q.constant;
                           }
                         }
                         return r;
                       }});
  for (const std::string id : {"cusp-0.5", "wave-1", "bump-r1"})
    tasks.push_back({"mollify/" + id, [&c, id] {
                       std::vector<double> eps;
                       for (int k = 4; k <= 8; ++k) eps.push_back(std::ldexp(1.0, -k));
                       const auto a = mollify_bounds_audit(field_by_id(id, c.dim), 0.5, eps, holder_box(c.dim));
                       auto r = base(c, "mollify", id);
                       r.beta = 0.5;
                       // Growth of each ratio column relative to its coarsest entry; decay is fine.
                       double growth = 1.0, measured = 0.0;
                       for (int col = 0; col < 3; ++col) {
                         auto at = [&](const MollifyRow& row) { return col == 0 ? row.c0 : col == 1 ? row.c1 : row.c2; };
                         const double first = at(a.rows.front());
                         for (const auto& row : a.rows) {
                           measured = std::max(measured, at(row));
                           if (first > 1e-12) growth = std::max(growth, at(row) / first);
                           else if (at(row) > 1e-12) growth = std::numeric_limits<double>::infinity();
                         }
                       }
                       r.lhs = measured;
                       r.rhs = a.c1 * a.holder_norm;
                       r.constant = a.c1;
                       r.score = growth;
                       r.pass = a.pass && growth < c.tol.mollifier_factor;
                       return r;
                     }});
}

// ---- differences ---------------------------------------------------------

AuditRecord fd_record(const ExperimentConfig& c, const std::string& id, double gamma) {
  const auto a = fd_bounds_audit(field_by_id(id, c.dim), gamma);
  auto r = base(c, "fd", id);
  r.beta = gamma;
  r.pass = a.pass;
  r.rhs = a.norm;
  for (const auto& fc : a.cases) {
    if (!fc.applicable) continue;
    r.lhs = std::max(r.lhs, fc.worst);
    if (fc.worst > 0) r.score = std::max(r.score, fc.worst_doubled / fc.worst);
    r.constant = std::max(r.constant, fc.proof_constant);
  }
  return r;
}

void verify_differences(const ExperimentConfig& c, std::vector<Task>& tasks) {
  std::vector<std::string> ids;
  for (const auto& f : corpus(c.dim))
    if (f.regularity >= c.gamma) ids.push_back(f.id);
  for (const auto& id : fields_or(c, ids))
    tasks.push_back({"fd/" + id, [&c, id] { return fd_record(c, id, c.gamma); }});
}

void audit_corollary(const ExperimentConfig& c, std::vector<Task>& tasks) {
  for (const auto& id : fields_or(c, {"gauss-1"}))
    tasks.push_back({"corollary/" + id, [&c, id] {
                       const auto k = build_kernel(c.kernel, c.alpha, c.dim);
                       std::vector<double> ks;
                       for (int j = 1; j <= 6; ++j) ks.push_back(std::ldexp(1.0, -j));
                       const std::vector<Point> xs = {Point(0, 0), Point(0.5, 0), Point(1.5, 0)};
                       const auto f = field_by_id(id, c.dim);
                       const auto fi = fd_integral_audit(f, k, c.beta, ks, xs);
                       const auto s = smoothness_of_L0u_audit(f, k, c.beta, fi.worst);
                       auto r = base(c, "corollary", id);
                       r.lhs = s.report.total;
                       r.rhs = s.u_norm;
                       r.constant = fi.worst;
                       r.score = fi.worst > 0 ? fi.worst_refined / fi.worst : 1.0;
                       r.pass = fi.pass && s.pass;
                       return r;
                     }});
}

// ---- stable densities ----------------------------------------------------

void density(const ExperimentConfig& c, std::vector<Task>& tasks, Table& table) {
  const StableDensity sd{c.alpha, c.dim, c.t, {}};
  validate(sd);
  table.columns = {"x", "q"};
  for (int i = 0; i < c.n; ++i) {
    const double x = c.n == 1 ? 0.0 : -c.xmax + 2 * c.xmax * i / (c.n - 1);
    table.rows.push_back({x, stable_density(sd, Point(x, 0))});
  }
  tasks.push_back({"density", [&c, sd] {
                     auto r = base(c, "density", "q");
                     r.beta = 0.0;
                     double err = 0.0, mn = std::numeric_limits<double>::infinity();
                     for (int i = 0; i < c.n; ++i) {
                       const double x = c.n == 1 ? 0.0 : -c.xmax + 2 * c.xmax * i / (c.n - 1);
                       const double q = stable_density(sd, Point(x, 0));
                       mn = std::min(mn, q);
                       if (c.alpha == 1.0 && c.dim == 1) {
                         const double cauchy = c.t / (M_PI * (c.t * c.t + x * x));
                         err = std::max(err, std::abs(q - cauchy));
                       }
                     }
                     r.lhs = err;
                     r.rhs = c.tol.density;
                     r.pass = mn > 0 && err <= c.tol.density;
                     r.note = c.alpha == 1.0 && c.dim == 1 ? "compared with the Cauchy density" : "positivity only";
                     return r;
                   }});
}

void integrability(const ExperimentConfig& c, std::vector<Task>& tasks) {
  for (double a : {1.0, 1.5})
    for (int k = 0; k <= 2; ++k)
      tasks.push_back({"integrability/" + std::to_string(k), [&c, a, k] {
                         const auto au = derivative_integrability_audit({a, 1, 1.0, {}}, k);
                         auto r = base(c, "integrability", "D" + std::to_string(k) + "q");
                         r.alpha = a;
                         r.beta = 0.0;
                         r.lhs = au.value;
                         r.score = au.stability_score;
                         r.rhs = c.tol.integrability;
                         r.pass = std::isfinite(au.value) && au.stability_score <= c.tol.integrability;
                         return r;
                       }});
}

// ---- nonlocal symbol -----------------------------------------------------

void symbol_audit(const ExperimentConfig& c, std::vector<Task>& tasks) {
  tasks.push_back({"symbol", [&c] {
                     const auto k = constant_kernel(c.alpha, c.dim, c.kernel.a);
                     const double value = apply_L0(k, wave(c.dim, c.xi), Point::Zero());
                     const double expect = -c.kernel.a * kappa(c.dim, c.alpha) * std::pow(std::abs(c.xi), c.alpha);
                     auto r = base(c, "symbol", [&] {
                       std::ostringstream os;
                       os << "wave-" << c.xi;
                       return os.str();
                     }());
                     r.beta = 0.0;
                     r.lhs = value;
                     r.rhs = expect;
                     r.score = std::abs(value - expect);
                     r.pass = r.score <= c.tol.symbol;
                     return r;
                   }});
}

// ---- evolve family -------------------------------------------------------

void decay(const ExperimentConfig& c, std::vector<Task>& tasks) {
  const std::vector<double> ts = {0.01, 0.0215, 0.0464, 0.1, 0.215, 0.464, 1.0};
  for (const auto& id : fields_or(c, {"step", "bump-r1", "wave-1"}))
    for (double a : {0.8, 1.5})
      tasks.push_back({"decay/" + id, [&c, id, a, ts] {
                         auto sg = SemigroupSpec::for_kernel(constant_kernel(a, 1, 1.0));
                         sg.seed = c.seed;
                         const auto au = derivative_decay_audit(sg, ts, field_by_id(id, 1));
                         auto r = base(c, "decay", id);
                         r.alpha = a;
                         r.beta = 0.0;
                         double mx = 0.0;
                         for (const auto& row : au.rows) mx = std::max(mx, row.d1 / au.f_sup);
                         r.lhs = mx;
                         r.rhs = au.bound1;
                         r.constant = au.c1;
                         r.score = mx > 0 ? au.bound1 / mx : std::numeric_limits<double>::infinity();
                         r.pass = mx <= au.bound1 * (1 + 1e-9) && r.score <= c.tol.decay_factor;
                         return r;
                       }});
}

void resolvent(const ExperimentConfig& c, std::vector<Task>& tasks, Table& table) {
  const auto k = constant_kernel(c.alpha, 1, c.kernel.a);
  const auto sg = SemigroupSpec::for_kernel(k);
  PotentialSpec ps;
  ps.lambda = c.lambda;
  const auto id = fields_or(c, {"gauss-1"}).front();
  const auto f = field_by_id(id, 1);
  const auto u = resolvent_field(ps, sg, f);
  table.columns = {"x", "f", "Rf"};
  for (int i = 0; i <= c.grids.front(); ++i) {
    const double x = -4.0 + 8.0 * i / c.grids.front();
    table.rows.push_back({x, f(Point(x, 0)), u(Point(x, 0))});
  }
  tasks.push_back({"resolvent/" + id, [&c, k, ps, f, u, id] {
                     QuadratureSpec q;
                     q.outer_cut = 16;
                     q.ring_levels = 8;
                     q.panel_width = 0.25;
                     double worst = 0.0;
                     for (int i = 0; i < 20; ++i) {
                       const Point x(-2.0 + 0.21 * i, 0);
                       worst = std::max(worst, std::abs(apply_L0(k, u, x, q) - ps.lambda * u(x) + f(x)));
                     }
                     const double fs = sup_norm(f, ProbeBox::standard(1));
                     auto r = base(c, "resolvent-identity", id);
                     r.lhs = worst;
                     r.rhs = c.tol.resolvent * fs;
                     r.pass = worst < r.rhs;
                     return r;
                   }});
}

void gain(const ExperimentConfig& c, std::vector<Task>& tasks) {
  for (const auto& id : fields_or(c, {cusp_id(c.beta)}))
    tasks.push_back({"gain/" + id, [&c, id] {
                       PotentialSpec ps;
                       ps.lambda = c.lambda;
                       ps.t_min_factor = 1e-6;
                       const auto sg = SemigroupSpec::for_kernel(constant_kernel(c.alpha, 1, c.kernel.a));
                       const auto f = field_by_id(id, 1);
                       const int n = c.grids.front();
                       const auto g = holder_gain_audit(ps, sg, f, c.beta, n);
                       // The same norm of f itself on the same two lattices.
                       const double gamma = c.alpha + c.beta;
                       ProbeBox b1, b2;
                       b1.dim = b2.dim = 1;
                       b1.half_width = b2.half_width = 4;
                       b1.spacing = 8.0 / n;
                       b2.spacing = 8.0 / (2 * n);
                       b1.fd_step = b1.spacing;
                       b2.fd_step = b2.spacing;
                       const double f1 = holder_norm(f, gamma, b1).total, f2 = holder_norm(f, gamma, b2).total;
                       auto r = base(c, "gain", id);
                       r.lhs = g.lhs;
                       r.rhs = g.rhs;
                       r.constant = g.constant;
                       r.score = g.constant > 0 ? g.constant_refined / g.constant : 1.0;
                       const double growth = f1 > 0 ? f2 / f1 : 0.0;
                       const bool stable = r.score <= c.tol.gain_factor && r.score >= 1 / c.tol.gain_factor;
                       r.pass = stable && growth > c.tol.f_growth;
                       std::ostringstream os;
                       os << "f norm growth " << growth;
                       r.note = os.str();
                       return r;
                     }});
}

// ---- solver family -------------------------------------------------------

AssembleOptions assemble_options(const ExperimentConfig& c) {
  AssembleOptions o;
  if (!c.zero_order.empty()) o.zero_order = zero_order_term(c.zero_order);
  if (!c.drift.empty()) o.first_order = drift_term(c.drift);
  return o;
}

double period_for(const KernelConfig& k) { return k.name == "constant" || k.name == "bumped" ? 2 * M_PI : 2 * k.period; }

void solve_family(const ExperimentConfig& c, std::vector<Task>& tasks) {
  const auto id = fields_or(c, {cusp_id(c.beta)}).front();
  tasks.push_back({"solve/" + id, [&c, id] {
                     const auto k = build_kernel(c.kernel, c.alpha, c.dim);
                     const GridSpec g(c.dim, c.grids.front(), period_for(c.kernel));
                     const auto op = assemble(k, g, c.lambda, assemble_options(c));
                     if (!c.dump_matrix.empty()) write_matrix(c.dump_matrix, op.matrix());
                     const auto f = sample_torus(field_by_id(id, c.dim), g);
                     const auto rep = solve(op, f, c.beta);
                     auto r = base(c, "solve", id);
                     r.lhs = rep.u_norm;
                     r.rhs = rep.u_sup + rep.f_norm;
                     r.constant = rep.apriori_constant;
                     r.score = rep.residual_inf;
                     r.pass = true;
                     if (!c.zero_order.empty()) {
                       const double bound = sup_norm(f) / c.lambda + c.tol.zero_order;
                       r.pass = rep.u_sup <= bound;
                       std::ostringstream os;
                       os << "sup u " << rep.u_sup << " vs " << bound;
                       r.note = os.str();
                     }
                     return r;
                   }});
}

void apriori(const ExperimentConfig& c, std::vector<Task>& tasks) {
  const auto id = fields_or(c, {cusp_id(c.beta)}).front();
  tasks.push_back({"apriori/" + id, [&c, id] {
                     const auto k = build_kernel(c.kernel, c.alpha, c.dim);
                     const auto res = apriori_experiment(k, field_by_id(id, c.dim), c.beta, c.grids, c.lambda,
                                                         period_for(c.kernel), assemble_options(c));
                     auto r = base(c, "apriori", id);
                     r.lhs = res.reports.back().u_norm;
                     r.rhs = res.reports.back().u_sup + res.reports.back().f_norm;
                     r.constant = res.reports.back().apriori_constant;
                     r.score = res.score;
                     r.pass = res.score < c.tol.apriori_factor;
                     return r;
                   }});
  if (!c.drift.empty())
    tasks.push_back({"apriori-drift/" + id, [&c, id] {
                       const auto k = build_kernel(c.kernel, c.alpha, c.dim);
                       const auto f = field_by_id(id, c.dim);
                       const GridSpec g(c.dim, c.grids.back(), period_for(c.kernel));
                       const auto with = solve(assemble(k, g, c.lambda, assemble_options(c)), sample_torus(f, g), c.beta);
                       const auto without = solve(assemble(k, g, c.lambda), sample_torus(f, g), c.beta);
                       auto r = base(c, "first-order", id);
                       r.lhs = with.apriori_constant;
                       r.rhs = without.apriori_constant;
                       r.score = r.lhs / r.rhs;
                       r.pass = r.score < c.tol.first_order_factor && r.score > 1 / c.tol.first_order_factor;
                       return r;
                     }});
}

void freezing(const ExperimentConfig& c, std::vector<Task>& tasks) {
  const auto id = fields_or(c, {cusp_id(c.beta)}).front();
  tasks.push_back({"freezing/" + id, [&c, id] {
                     const auto k = build_kernel(c.kernel, c.alpha, c.dim);
                     const GridSpec g(c.dim, c.grids.front(), period_for(c.kernel));
                     const auto op = assemble(k, g, c.lambda, assemble_options(c));
                     const auto f = sample_torus(field_by_id(id, c.dim), g);
                     const auto rep = solve(op, f, c.beta);
                     std::vector<double> rs;
                     for (double r = 0.05; r <= g.period() / 8; r *= 2) rs.push_back(r);
                     const auto rec = freezing_diagnostic(k, op, rep.u, f, Point(c.x0, 0), c.eps, rs, c.beta);
                     auto r = base(c, "freezing", id);
                     r.lhs = rec.residual;
                     r.rhs = c.tol.freezing_factor * rec.tolerance;
                     r.constant = rec.ratio;
                     r.score = rec.J4_sup;
                     r.pass = rec.residual < r.rhs && (!k.x_independent || rec.J4_sup == 0.0);
                     std::ostringstream os;
                     os << "r " << rec.r << " oscillation " << rec.oscillation;
                     r.note = os.str();
                     return r;
                   }});
}

void sharpness(const ExperimentConfig& c, std::vector<Task>& tasks, Table& table) {
  const auto s = sharpness_scaling(c.alpha, c.r_list);
  table.columns = {"r", "gauge", "f_seminorm"};
  for (std::size_t i = 0; i < s.r.size(); ++i) table.rows.push_back({s.r[i], s.gauge[i], s.f_seminorm[i]});
  tasks.push_back({"sharpness", [&c, s] {
                     auto r = base(c, "sharpness", "cutoff");
                     r.beta = 0.0;
                     r.lhs = s.exponent;
                     r.rhs = c.alpha;
                     r.score = s.lambda_bias;
                     r.pass = s.pass && std::abs(s.exponent - c.alpha) <= c.tol.sharpness;
                     return r;
                   }});
}

void coefficient_probe(const ExperimentConfig& c, std::vector<Task>& tasks) {
  tasks.push_back({"coefficient-probe", [&c] {
                     const auto p = coefficient_sharpness_probe(c.delta, c.alpha, c.beta, {256, 512, 1024});
                     auto r = base(c, "coefficient-probe", "cusp");
                     r.lhs = p.rough_growth;
                     r.rhs = p.compliant_growth;
                     r.score = p.rough_growth;
                     r.pass = p.compliant_growth < 2.0 && p.rough_growth > 2.0;
                     return r;
                   }});
}

using Family = std::function<void(const ExperimentConfig&, std::vector<Task>&, Table&)>;

const std::vector<std::pair<std::string, Family>>& families() {
  static const std::vector<std::pair<std::string, Family>> f = {
      {"verify-holder", [](auto& c, auto& t, auto&) { verify_holder(c, t); }},
      {"verify-differences", [](auto& c, auto& t, auto&) { verify_differences(c, t); }},
      {"audit-fd",
       [](auto& c, auto& t, auto&) {
         for (const auto& id : fields_or(c, {"gauss-1"})) t.push_back({"fd/" + id, [&c, id] { return fd_record(c, id, c.gamma); }});
       }},
      {"audit-corollary", [](auto& c, auto& t, auto&) { audit_corollary(c, t); }},
      {"density", density},
      {"integrability", [](auto& c, auto& t, auto&) { integrability(c, t); }},
      {"symbol", [](auto& c, auto& t, auto&) { symbol_audit(c, t); }},
      {"decay", [](auto& c, auto& t, auto&) { decay(c, t); }},
      {"resolvent", resolvent},
      {"gain-audit", [](auto& c, auto& t, auto&) { gain(c, t); }},
      {"solve", [](auto& c, auto& t, auto&) { solve_family(c, t); }},
      {"apriori", [](auto& c, auto& t, auto&) { apriori(c, t); }},
      {"freezing", [](auto& c, auto& t, auto&) { freezing(c, t); }},
      {"sharpness", sharpness},
      {"coefficient-probe", [](auto& c, auto& t, auto&) { coefficient_probe(c, t); }},
  };
  return f;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : families()) n.push_back(name);
    n.push_back("all");
    return n;
  }();
  return names;
}

void ExperimentConfig::validate() const {
  if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
    throw InvalidArgument("unknown command: " + command);
  if (!(alpha > 0 && alpha < 2)) throw InvalidArgument("alpha must lie in (0, 2)");
  if (!(beta > 0 && beta < 1)) throw InvalidArgument("beta must lie in (0, 1)");
  if (near_integer(alpha + beta)) throw InvalidArgument("alpha + beta must not be an integer");
  if (dim != 1 && dim != 2) throw InvalidArgument("dim must be 1 or 2");
  for (double v : {tol.symbol, tol.density, tol.integrability, tol.decay_factor, tol.mollifier_factor, tol.fd_stability,
                   tol.gain_factor, tol.f_growth, tol.resolvent, tol.apriori_factor, tol.frozen_factor,
                   tol.freezing_factor, tol.sharpness, tol.zero_order, tol.first_order_factor, tol.mc})
    if (!(v > 0)) throw InvalidArgument("tolerances must be positive");
  if (grids.empty()) throw InvalidArgument("at least one grid size is required");
  for (int n : grids)
    if (n < 16 || (n & (n - 1))) throw InvalidArgument("grid sizes must be powers of two >= 16");
  if (!(lambda >= 0)) throw InvalidArgument("lambda must be nonnegative");
  if (!(t > 0)) throw InvalidArgument("t must be positive");
  if (n < 1) throw InvalidArgument("n must be positive");
  if (!(eps > 0)) throw InvalidArgument("eps must be positive");
}

json to_json(const ExperimentConfig& c) {
  json k = {{"name", c.kernel.name}, {"a", c.kernel.a}, {"amp", c.kernel.amp}, {"beta", c.kernel.beta},
            {"period", c.kernel.period}};
  if (c.kernel.kappa1) k["kappa1"] = *c.kernel.kappa1;
  if (c.kernel.kappa2) k["kappa2"] = *c.kernel.kappa2;
  if (c.kernel.c3) k["c3"] = *c.kernel.c3;
  const auto& t = c.tol;
  json tol = {{"symbol", t.symbol},
              {"density", t.density},
              {"integrability", t.integrability},
              {"decay_factor", t.decay_factor},
              {"mollifier_factor", t.mollifier_factor},
              {"fd_stability", t.fd_stability},
              {"gain_factor", t.gain_factor},
              {"f_growth", t.f_growth},
              {"resolvent", t.resolvent},
              {"apriori_factor", t.apriori_factor},
              {"frozen_factor", t.frozen_factor},
              {"freezing_factor", t.freezing_factor},
              {"sharpness", t.sharpness},
              {"zero_order", t.zero_order},
              {"first_order_factor", t.first_order_factor},
              {"mc", t.mc}};
  return {{"command", c.command}, {"alpha", c.alpha},   {"beta", c.beta},   {"dim", c.dim},
          {"kernel", k},          {"fields", c.fields}, {"grids", c.grids}, {"lambda", c.lambda},
          {"tolerances", tol},    {"seed", c.seed},     {"output", c.output}, {"format", c.format},
          {"t", c.t},             {"xmax", c.xmax},     {"n", c.n},         {"xi", c.xi},
          {"gamma", c.gamma},     {"zero_order", c.zero_order}, {"drift", c.drift},
          {"dump_matrix", c.dump_matrix}, {"x0", c.x0}, {"eps", c.eps}, {"r_list", c.r_list},
          {"delta", c.delta}};
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw InvalidArgument("config must be an object");
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    take("command", c.command);
    take("alpha", c.alpha);
    take("beta", c.beta);
    take("dim", c.dim);
    take("fields", c.fields);
    take("grids", c.grids);
    take("lambda", c.lambda);
    take("seed", c.seed);
    take("output", c.output);
    take("format", c.format);
    take("t", c.t);
    take("xmax", c.xmax);
    take("n", c.n);
    take("xi", c.xi);
    take("gamma", c.gamma);
    take("zero_order", c.zero_order);
    take("drift", c.drift);
    take("dump_matrix", c.dump_matrix);
    take("x0", c.x0);
    take("eps", c.eps);
    take("r_list", c.r_list);
    take("delta", c.delta);
    if (j.contains("kernel")) {
      const auto& k = j.at("kernel");
      if (k.is_string()) {
        c.kernel.name = k.get<std::string>();
      } else {
        if (k.contains("name")) c.kernel.name = k.at("name").get<std::string>();
        if (k.contains("a")) c.kernel.a = k.at("a").get<double>();
        if (k.contains("amp")) c.kernel.amp = k.at("amp").get<double>();
        if (k.contains("beta")) c.kernel.beta = k.at("beta").get<double>();
        if (k.contains("period")) c.kernel.period = k.at("period").get<double>();
        if (k.contains("kappa1")) c.kernel.kappa1 = k.at("kappa1").get<double>();
        if (k.contains("kappa2")) c.kernel.kappa2 = k.at("kappa2").get<double>();
        if (k.contains("c3")) c.kernel.c3 = k.at("c3").get<double>();
      }
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      auto tk = [&](const char* key, double& v) {
        if (t.contains(key)) v = t.at(key).get<double>();
      };
      tk("symbol", c.tol.symbol);
      tk("density", c.tol.density);
      tk("integrability", c.tol.integrability);
      tk("decay_factor", c.tol.decay_factor);
      tk("mollifier_factor", c.tol.mollifier_factor);
      tk("fd_stability", c.tol.fd_stability);
      tk("gain_factor", c.tol.gain_factor);
      tk("f_growth", c.tol.f_growth);
      tk("resolvent", c.tol.resolvent);
      tk("apriori_factor", c.tol.apriori_factor);
      tk("frozen_factor", c.tol.frozen_factor);
      tk("freezing_factor", c.tol.freezing_factor);
      tk("sharpness", c.tol.sharpness);
      tk("zero_order", c.tol.zero_order);
      tk("first_order_factor", c.tol.first_order_factor);
      tk("mc", c.tol.mc);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

std::string ExperimentConfig::hash() const {
  json j = to_json(*this);
  j.erase("output");
  return fnv1a_hex(j.dump());
}

KernelSpec build_kernel(const KernelConfig& kc, double alpha, int dim) {
  KernelSpec k;
  if (kc.name == "constant") k = constant_kernel(alpha, dim, kc.a);
  else if (kc.name == "holder") k = holder_kernel(alpha, dim, kc.beta, kc.amp, kc.period);
  else if (kc.name == "mixed") k = mixed_kernel(alpha, dim, kc.beta, kc.amp, kc.period);
  else if (kc.name == "bumped") k = bumped_kernel(alpha, dim, kc.amp);
  else throw InvalidArgument("unknown kernel preset: " + kc.name);
  if (kc.kappa1) k.kappa1 = *kc.kappa1;
  if (kc.kappa2) k.kappa2 = *kc.kappa2;
  if (kc.c3) k.c3 = *kc.c3;
  if (!(k.kappa1 > 0 && k.kappa2 >= k.kappa1 && k.c3 >= 0)) throw InvalidArgument("kernel bounds are inconsistent");
  return k;
}

std::function<double(const Point&)> zero_order_term(const std::string& id) {
  if (id == "damp") return [](const Point& x) { return -0.5 - 0.3 * std::sin(x(0)); };
  if (id.rfind("const-", 0) == 0) {
    const double v = parse_suffix(id, "const-");
    return [v](const Point&) { return v; };
  }
  throw InvalidArgument("unknown zero-order term: " + id);
}

std::function<Point(const Point&)> drift_term(const std::string& id) {
  if (id == "sin") return [](const Point& x) { return Point(0.3 * std::sin(x(0)), 0.0); };
  if (id.rfind("const-", 0) == 0) {
    const double v = parse_suffix(id, "const-");
    return [v](const Point&) { return Point(v, 0.0); };
  }
  throw InvalidArgument("unknown drift term: " + id);
}

VerificationReport run(const ExperimentConfig& c) {
  c.validate();
  VerificationReport rep;
  rep.command = c.command;
  rep.config = to_json(c);
  rep.config_hash = c.hash();
  std::vector<Task> tasks;
  for (const auto& [name, fn] : families())
    if (c.command == name || (c.command == "all" && name != "coefficient-probe")) {
      Table t;
      fn(c, tasks, t);
      if (c.command == name) rep.table = std::move(t);
    }
  rep.records = run_tasks(tasks, rep.config_hash);
  rep.finalize();
  return rep;
}

}  // namespace slk
