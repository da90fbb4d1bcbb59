#include "dpl/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "dpl/elaborate.hpp"
#include "dpl/printer.hpp"
#include "dpl/symdiff.hpp"
#include "dpl/typecheck.hpp"

namespace dpl {

double rel_error(double analytic, double numeric, const Tolerance& tol) {
  double diff = std::fabs(analytic - numeric);
  if (diff == 0.0) return 0.0;
  double scale = std::max({std::fabs(analytic), std::fabs(numeric), tol.abs_floor / tol.rel});
  double e = diff / scale;
  return std::isnan(e) ? std::numeric_limits<double>::infinity() : e;
}

double max_rel_error(std::span<const double> analytic, std::span<const double> numeric, const Tolerance& tol) {
  if (analytic.size() != numeric.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) m = std::max(m, rel_error(analytic[i], numeric[i], tol));
  return m;
}

std::optional<Matrix> fd_jacobian(const RealFn& f, std::span<const double> x, double h_scale) {
  const std::size_t n = x.size();
  if (n == 0) {
    auto y = f(x);
    if (!y) return std::nullopt;
    return Matrix(y->size());
  }
  Matrix jac;
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t j = 0; j < n; ++j) {
    double h = h_scale * std::max(1.0, std::fabs(x[j]));
    probe[j] = x[j] + h;
    auto up = f(probe);
    probe[j] = x[j] - h;
    auto down = f(probe);
    probe[j] = x[j];
    if (!up || !down || up->size() != down->size()) return std::nullopt;
    if (j == 0) jac.assign(up->size(), std::vector<double>(n, 0.0));
    if (jac.size() != up->size()) return std::nullopt;
    for (std::size_t i = 0; i < up->size(); ++i) jac[i][j] = ((*up)[i] - (*down)[i]) / (2.0 * h);
  }
  return jac;
}

RealFn term_function(const FunEnv& phi, const ValueEnv& rho, const std::string& x, const Type& t, TermPtr m,
                     std::uint64_t fuel) {
  return [phi, rho, x, t, m = std::move(m), fuel](std::span<const double> a) -> std::optional<std::vector<double>> {
    Session s(fuel);
    try {
      return flatten(eval(s, phi, rho.insert(x, unflatten(t, a)), m));
    } catch (const Stuck&) {
      return std::nullopt;
    } catch (const FuelExhausted&) {
      return std::nullopt;
    }
  };
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Fail:
      return "FAIL";
    case Verdict::Skip:
      return "SKIP";
  }
  return "?";
}

namespace {

std::string format_vector(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_real(v[i]);
  }
  return out + "]";
}

// J^T w for an m x n matrix; n is explicit because m may be 0.
std::vector<double> transpose_times(const Matrix& j, std::span<const double> w, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < j.size(); ++i) {
    for (std::size_t k = 0; k < n; ++k) out[k] += j[i][k] * w[i];
  }
  return out;
}

std::vector<double> times(const Matrix& j, std::span<const double> u) {
  std::vector<double> out(j.size(), 0.0);
  for (std::size_t i = 0; i < j.size(); ++i) {
    for (std::size_t k = 0; k < u.size(); ++k) out[i] += j[i][k] * u[k];
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double step_bound(std::span<const double> x, double h_scale) {
  double m = 1.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return h_scale * m;
}

// Evaluates the base point with a margin monitor; returns a skip note if
// the point is outside the domain or too close to its edge.
std::optional<std::string> base_point_check(const FunEnv& phi, const std::string& x, const Type& t, const TermPtr& m,
                                            std::span<const double> point, const OracleOptions& opt) {
  MarginMonitor mon;
  Session s(opt.probe_fuel);
  s.monitor = &mon;
  try {
    eval(s, phi, ValueEnv{}.insert(x, unflatten(t, point)), m);
  } catch (const Stuck& e) {
    return std::string("outside domain: ") + e.what();
  } catch (const FuelExhausted&) {
    return std::string("fuel exhausted at base point");
  }
  if (mon.min_margin() < opt.boundary_factor * step_bound(point, opt.h_scale)) {
    return "within " + format_real(mon.min_margin()) + " of a domain boundary";
  }
  return std::nullopt;
}

FDReport skip(FDReport r, std::string note) {
  r.verdict = Verdict::Skip;
  r.note = std::move(note);
  return r;
}

// Decides a comparison whose first-step numeric side disagreed: if the
// difference quotient is not stable under doubling h the oracle cannot
// judge the point.
bool fd_stable(const RealFn& f, std::span<const double> x, const OracleOptions& opt,
               const std::function<std::vector<double>(const Matrix&)>& project,
               const std::vector<double>& numeric) {
  auto j2 = fd_jacobian(f, x, 2.0 * opt.h_scale);
  if (!j2) return false;
  return max_rel_error(numeric, project(*j2), opt.tol) <= opt.tol.rel;
}

}  // namespace

std::string FDReport::line() const {
  std::string out = name;
  out += " point=" + format_vector(point);
  out += " analytic=" + format_vector(analytic);
  out += " numeric=" + format_vector(numeric);
  out += " maxRelError=" + format_real(max_rel_error);
  out += " tol=" + format_real(tolerance);
  out += " verdict=";
  out += to_string(verdict);
  if (!note.empty()) out += " note=\"" + note + "\"";
  return out;
}

FDReport check_vjp(Session& s, const std::string& name, const std::string& x, const Type& t, const TraceTerm& c,
                   const Value& v, const Value& w, const OracleOptions& opt) {
  FDReport r;
  r.name = name;
  r.point = flatten(v);
  r.tolerance = opt.tol.rel;
  std::vector<double> wf = flatten(w);

  if (auto note = base_point_check({}, x, t, c.term(), r.point, opt)) return skip(r, *note);

  try {
    std::function<void()> tick = [&s] { s.tick(); };
    TraceTerm out = rdiff(x, t, c, v, w, s.supply(), tick, s.registry());
    if (s.on_rdiff) {
      ValueEnv empty;
      s.on_rdiff(RdiffEvent{empty, x, t, c, v, w, out});
    }
    r.analytic = flatten(eval(s, {}, {}, out.term()));
  } catch (const FuelExhausted&) {
    return skip(r, "fuel exhausted in derivative");
  } catch (const Stuck& e) {
    r.verdict = Verdict::Fail;
    r.note = std::string("derivative undefined: ") + e.what();
    return r;
  }

  RealFn f = term_function({}, {}, x, t, c.term(), opt.probe_fuel);
  auto jac = fd_jacobian(f, r.point, opt.h_scale);
  if (!jac) return skip(r, "probe undefined");
  auto project = [&](const Matrix& j) { return transpose_times(j, wf, r.point.size()); };
  r.numeric = project(*jac);
  r.max_rel_error = max_rel_error(r.analytic, r.numeric, opt.tol);
  if (r.max_rel_error <= opt.tol.rel) {
    r.verdict = Verdict::Pass;
    return r;
  }
  if (!fd_stable(f, r.point, opt, project, r.numeric)) return skip(r, "finite differences unstable");
  r.verdict = Verdict::Fail;
  r.note = "derivative mismatch";
  return r;
}

FDReport check_adjoint_identity(Session& s, const std::string& name, const std::string& x, const Type& t,
                                const TermPtr& body, const Type& u_type, const Value& point, const Value& u,
                                const Value& w, const OracleOptions& opt) {
  FDReport r;
  r.name = name;
  r.point = flatten(point);
  r.tolerance = opt.tol.rel;
  std::vector<double> uf = flatten(u);
  std::vector<double> wf = flatten(w);

  if (auto note = base_point_check({}, x, t, body, r.point, opt)) return skip(r, *note);

  std::vector<double> fwd, rev;
  try {
    TermPtr fd_term = elab_fd(x, t, body, u_type, point.term(), u.term(), s.supply());
    fd_term = infer_term({}, {}, fd_term, s.registry()).term;
    fwd = flatten(eval(s, {}, {}, fd_term));
    TermPtr rd_term = mk::rd(x, t, body, point.term(), w.term());
    rd_term = infer_term({}, {}, rd_term, s.registry()).term;
    rev = flatten(eval(s, {}, {}, rd_term));
  } catch (const FuelExhausted&) {
    return skip(r, "fuel exhausted in derivative");
  } catch (const Stuck& e) {
    r.verdict = Verdict::Fail;
    r.note = std::string("derivative undefined: ") + e.what();
    return r;
  }
  double lhs = dot(wf, fwd);
  double rhs = dot(rev, uf);

  RealFn f = term_function({}, {}, x, t, body, opt.probe_fuel);
  auto jac = fd_jacobian(f, r.point, opt.h_scale);
  if (!jac) return skip(r, "probe undefined");
  auto project = [&](const Matrix& j) {
    std::vector<double> out = times(j, uf);
    std::vector<double> back = transpose_times(j, wf, r.point.size());
    out.insert(out.end(), back.begin(), back.end());
    return out;
  };
  std::vector<double> numeric_fd = project(*jac);

  r.analytic = fwd;
  r.analytic.insert(r.analytic.end(), rev.begin(), rev.end());
  r.analytic.push_back(lhs);
  r.numeric = numeric_fd;
  r.numeric.push_back(rhs);
  r.max_rel_error = max_rel_error(r.analytic, r.numeric, opt.tol);
  if (r.max_rel_error <= opt.tol.rel) {
    r.verdict = Verdict::Pass;
    return r;
  }
  // The adjoint identity itself involves no finite differences.
  if (rel_error(lhs, rhs, opt.tol) <= opt.tol.rel && !fd_stable(f, r.point, opt, project, numeric_fd)) {
    return skip(r, "finite differences unstable");
  }
  r.verdict = Verdict::Fail;
  r.note = rel_error(lhs, rhs, opt.tol) > opt.tol.rel ? "adjoint identity mismatch" : "derivative mismatch";
  return r;
}

namespace {

enum class Outcome { Value, Stuck, Fuel, Error };

struct Run {
  Outcome outcome;
  std::optional<Value> value;
  std::optional<TraceTerm> trace;
  std::string detail;
};

template <class F>
Run guarded(F&& f) {
  try {
    return f();
  } catch (const Stuck& e) {
    return {Outcome::Stuck, std::nullopt, std::nullopt, e.what()};
  } catch (const FuelExhausted&) {
    return {Outcome::Fuel, std::nullopt, std::nullopt, "fuel exhausted"};
  } catch (const std::exception& e) {
    return {Outcome::Error, std::nullopt, std::nullopt, e.what()};
  }
}

}  // namespace

InterpolationResult check_interpolation(const FunEnv& phi, const ValueEnv& rho, const TermPtr& m, std::uint64_t fuel,
                                        const std::function<void(Session&)>& setup) {
  Run direct = guarded([&] {
    Session s(fuel);
    if (setup) setup(s);
    return Run{Outcome::Value, eval(s, phi, rho, m), std::nullopt, ""};
  });
  Run traced = guarded([&] {
    Session s(fuel);
    if (setup) setup(s);
    TraceTerm c = sym_eval(s, phi, rho, m);
    Run r = guarded([&] { return Run{Outcome::Value, eval(s, phi, rho, c.term()), c, ""}; });
    r.trace = c;
    return r;
  });

  if (direct.outcome == Outcome::Error) return {Interpolation::Violated, "eval raised: " + direct.detail, {}, {}};
  if (traced.outcome == Outcome::Error) {
    return {Interpolation::Violated, "trace path raised: " + traced.detail, {}, traced.trace};
  }
  if (direct.outcome == Outcome::Fuel || traced.outcome == Outcome::Fuel) {
    return {Interpolation::Inconclusive, "fuel exhausted", {}, {}};
  }
  if (direct.outcome == Outcome::Stuck && traced.outcome == Outcome::Stuck) {
    return {Interpolation::Holds, "both undefined", {}, traced.trace};
  }
  if (direct.outcome != traced.outcome) {
    std::string d = direct.outcome == Outcome::Value ? "eval gave " + print_value(*direct.value) : direct.detail;
    std::string t = traced.outcome == Outcome::Value ? "trace gave " + print_value(*traced.value) : traced.detail;
    return {Interpolation::Violated, d + " but " + t, {}, traced.trace};
  }
  if (!same_value(*direct.value, *traced.value)) {
    return {Interpolation::Violated,
            "eval gave " + print_value(*direct.value) + " but trace gave " + print_value(*traced.value), {},
            traced.trace};
  }
  return {Interpolation::Holds, "", direct.value, traced.trace};
}

namespace {

Value perturb(const Value& v, std::mt19937_64& rng, double radius) {
  if (v.is_real()) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return Value::real(v.as_real() + (2.0 * u - 1.0) * radius);
  }
  if (v.is_pair()) {
    return Value::pair(perturb(v.first(), rng, radius), perturb(v.second(), rng, radius),
                       v.term()->as<node::Pair>()->types);
  }
  return v;
}

}  // namespace

LocalityResult check_locality(const FunEnv& phi, const ValueEnv& rho, const TermPtr& m, std::mt19937_64& rng,
                              int samples, double radius, std::uint64_t fuel) {
  MarginMonitor base;
  std::optional<TraceTerm> c;
  try {
    Session s(fuel);
    c = sym_eval(s, phi, rho, m);
    Session e(fuel);
    e.monitor = &base;
    eval(e, phi, rho, m);
  } catch (const Stuck&) {
    return {Locality::Inconclusive, 0, "undefined at the base point"};
  } catch (const FuelExhausted&) {
    return {Locality::Inconclusive, 0, "fuel exhausted"};
  }

  LocalityResult out{Locality::Holds, 0, ""};
  for (int i = 0; i < samples; ++i) {
    ValueEnv moved;
    rho.for_each([&](const std::string& k, const Value& v) { moved = moved.insert(k, perturb(v, rng, radius)); });
    MarginMonitor mon;
    std::optional<Value> direct, traced;
    try {
      Session s(fuel);
      s.monitor = &mon;
      direct = eval(s, phi, moved, m);
    } catch (const Stuck&) {
    } catch (const FuelExhausted&) {
    }
    try {
      Session s(fuel);
      traced = eval(s, phi, moved, c->term());
    } catch (const Stuck&) {
    } catch (const FuelExhausted&) {
    }
    if (!direct || !traced) continue;
    // The trace only claims to agree where the same guards hold.
    if (mon.branches() != base.branches()) continue;
    ++out.compared;
    auto a = flatten(*direct);
    auto b = flatten(*traced);
    if (max_rel_error(a, b, Tolerance{1e-9, 1e-15}) > 1e-9) {
      return {Locality::Violated, out.compared,
              "eval gave " + print_value(*direct) + " but trace gave " + print_value(*traced)};
    }
  }
  if (out.compared == 0) out.verdict = Locality::Inconclusive;
  return out;
}

}  // namespace dpl
