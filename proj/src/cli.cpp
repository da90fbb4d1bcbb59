#include "dpl/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dpl/elaborate.hpp"
#include "dpl/machine.hpp"
#include "dpl/oracle.hpp"
#include "dpl/parser.hpp"
#include "dpl/printer.hpp"
#include "dpl/suites.hpp"
#include "dpl/typecheck.hpp"

namespace dpl {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Source {
  std::string path;
  std::string text;
};

Source load(const std::string& path, std::istream& in) {
  std::ostringstream buf;
  if (path == "-") {
    buf << in.rdbuf();
    return {"<stdin>", buf.str()};
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  buf << f.rdbuf();
  return {path, buf.str()};
}

/// A closed real or tuple literal.
Value parse_value(const std::string& text, const std::string& what) {
  TermPtr t = parse_term(text);
  if (!t->is_value || !t->is_ground) throw UsageError(what + ": expected a real or tuple literal, got '" + text + "'");
  return *Value::from_term(infer_term({}, {}, t).term);
}

/// Splits at commas outside <...> and (...).
std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '<' || c == '(') ++depth;
    if (c == '>' || c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

struct Env {
  ValueEnv rho;
  TypeEnv gamma;
  std::vector<std::pair<std::string, Value>> bindings;
};

Env parse_env(const std::vector<std::string>& specs) {
  Env env;
  for (const auto& spec : specs) {
    for (const auto& item : split_top_level(spec)) {
      auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--env: expected x=value, got '" + item + "'");
      std::string name = item.substr(0, eq);
      Value v = parse_value(item.substr(eq + 1), "--env " + name);
      env.rho = env.rho.insert(name, v);
      env.gamma = env.gamma.insert(name, type_of_closed_value(v));
      env.bindings.emplace_back(name, v);
    }
  }
  return env;
}

/// let y = v in C for each --env binding, so the trace is closed apart from x.
TraceTerm close_over(const Env& env, TraceTerm c) {
  for (auto it = env.bindings.rbegin(); it != env.bindings.rend(); ++it) {
    c = TraceTerm::let(it->first, type_of_closed_value(it->second), TraceTerm::from_value(it->second), c);
  }
  return c;
}

struct Options {
  std::string file;
  std::vector<std::string> env;
  std::uint64_t fuel = Session::kDefaultFuel;
  std::string wrt;
  std::string at;
  std::string cotangent;
  // fuzz
  int seeds = -1;
  int depth = -1;
  std::string suite = "all";
  std::uint64_t first_seed = 0;
  unsigned threads = 0;
  std::string report;
};

int cmd_check(const Options& o, std::istream& in, std::ostream& out) {
  Source src = load(o.file, in);
  Env env = parse_env(o.env);
  Typed t = infer_term({}, env.gamma, parse_term(src.text));
  out << t.type.str() << '\n';
  return exit_code::kOk;
}

int cmd_run(const Options& o, std::istream& in, std::ostream& out) {
  Source src = load(o.file, in);
  Env env = parse_env(o.env);
  Typed t = infer_term({}, env.gamma, parse_term(src.text));
  Session s(o.fuel);
  Value v = eval(s, {}, env.rho, t.term);
  out << print_value(v) << '\n';
  return exit_code::kOk;
}

int cmd_trace(const Options& o, std::istream& in, std::ostream& out) {
  Source src = load(o.file, in);
  Env env = parse_env(o.env);
  Typed t = infer_term({}, env.gamma, parse_term(src.text));
  Session s(o.fuel);
  TraceTerm c = sym_eval(s, {}, env.rho, t.term);
  out << print_trace(c) << '\n';
  return exit_code::kOk;
}

int cmd_grad(const Options& o, std::istream& in, std::ostream& out) {
  Source src = load(o.file, in);
  Env env = parse_env(o.env);
  if (env.gamma.contains(o.wrt)) throw UsageError("--wrt " + o.wrt + " is also bound by --env");
  Value at = parse_value(o.at, "--at");
  std::size_t n = real_power_exponent(type_of_closed_value(at));
  if (n == 0) throw UsageError("--at: grad needs a point of type real^n");
  TermPtr body = parse_term(src.text);
  TermPtr g = elab_grad(o.wrt, n, body, at.term());
  Typed t = infer_term({}, env.gamma, g);
  Session s(o.fuel);
  out << print_value(eval(s, {}, env.rho, t.term)) << '\n';
  return exit_code::kOk;
}

int cmd_fdcheck(const Options& o, std::istream& in, std::ostream& out) {
  Source src = load(o.file, in);
  Env env = parse_env(o.env);
  if (env.gamma.contains(o.wrt)) throw UsageError("--wrt " + o.wrt + " is also bound by --env");
  Value v = parse_value(o.at, "--at");
  Type t = type_of_closed_value(v);
  Typed body = infer_term({}, env.gamma.insert(o.wrt, t), parse_term(src.text));
  Value w = [&] {
    if (o.cotangent.empty()) return unflatten(body.type, std::vector<double>(body.type.size(), 1.0));
    Value c = parse_value(o.cotangent, "--cotangent");
    if (!(type_of_closed_value(c) == body.type)) {
      throw UsageError("--cotangent must have the program's type " + body.type.str());
    }
    return c;
  }();

  Session s(o.fuel);
  TraceTerm c = close_over(env, sym_eval(s, {}, env.rho.insert(o.wrt, v), body.term));
  s.set_fuel(o.fuel);
  OracleOptions opt;
  opt.probe_fuel = o.fuel;
  FDReport rep = check_vjp(s, src.path, o.wrt, t, c, v, w, opt);
  out << rep.line() << '\n';
  return rep.verdict == Verdict::Fail ? exit_code::kProperty : exit_code::kOk;
}

int cmd_fuzz(const Options& o, std::ostream& out) {
  struct Entry {
    const char* name;
    SuiteConfig cfg;
    SuiteReport (*run)(const SuiteConfig&);
  };
  std::vector<Entry> entries = {{"vjp", vjp_defaults(), &run_vjp_suite},
                                {"interpolation", interpolation_defaults(), &run_interpolation_suite},
                                {"adjoint", adjoint_defaults(), &run_adjoint_suite}};
  std::ofstream report;
  if (!o.report.empty()) {
    report.open(o.report);
    if (!report) throw UsageError("cannot write " + o.report);
  }
  bool ok = true;
  bool any = false;
  for (auto& e : entries) {
    if (o.suite != "all" && o.suite != e.name) continue;
    any = true;
    if (o.seeds >= 0) e.cfg.count = o.seeds;
    if (o.depth >= 0) e.cfg.depth = o.depth;
    e.cfg.first_seed = o.first_seed;
    e.cfg.threads = o.threads;
    SuiteReport r = e.run(e.cfg);
    for (const auto& l : r.lines) {
      if (l.starts_with("FAIL ")) out << l << '\n';
    }
    for (const auto& err : r.rdiff_errors) out << "rdiff-typing: " << err << '\n';
    char digest[17];
    std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(r.digest()));
    out << r.summary() << " digest=" << digest << '\n';
    if (report) report << r.text();
    if (r.failed > 0 || !r.rdiff_errors.empty()) ok = false;
  }
  if (!any) throw UsageError("--suite must be one of all, vjp, interpolation, adjoint");
  return ok ? exit_code::kOk : exit_code::kProperty;
}

std::string where(const std::string& file, int line, int column) {
  if (line <= 0) return file + ": ";
  return file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": ";
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interpreter and reverse-mode differentiator for a small first-order language", "dpl"};
  app.require_subcommand(1);
  Options o;

  auto file_opt = [&](CLI::App* sub) { sub->add_option("FILE", o.file, "Program file, or - for stdin")->required(); };
  auto env_opt = [&](CLI::App* sub) {
    sub->add_option("--env", o.env, "Bindings x=v,... for free variables (real or tuple literals)");
  };
  auto fuel_opt = [&](CLI::App* sub) { sub->add_option("--fuel", o.fuel, "Step budget")->capture_default_str(); };

  CLI::App* check = app.add_subcommand("check", "Typecheck and print the program's type");
  file_opt(check);
  env_opt(check);
  CLI::App* run = app.add_subcommand("run", "Evaluate the program");
  file_opt(run);
  env_opt(run);
  fuel_opt(run);
  CLI::App* trace = app.add_subcommand("trace", "Print the trace of the program");
  file_opt(trace);
  env_opt(trace);
  fuel_opt(trace);
  CLI::App* grad = app.add_subcommand("grad", "Gradient of the program with respect to a real^n variable");
  file_opt(grad);
  env_opt(grad);
  fuel_opt(grad);
  grad->add_option("--wrt", o.wrt, "Variable to differentiate")->required();
  grad->add_option("--at", o.at, "Point, a real or tuple literal")->required();
  CLI::App* fdcheck = app.add_subcommand("fdcheck", "Compare the reverse derivative with finite differences");
  file_opt(fdcheck);
  env_opt(fdcheck);
  fuel_opt(fdcheck);
  fdcheck->add_option("--wrt", o.wrt, "Variable to differentiate")->required();
  fdcheck->add_option("--at", o.at, "Point, a real or tuple literal")->required();
  fdcheck->add_option("--cotangent", o.cotangent, "Output cotangent (default: all ones)");
  CLI::App* fuzz = app.add_subcommand("fuzz", "Run the randomized property suites");
  fuzz->add_option("--seeds", o.seeds, "Cases to check per suite")->check(CLI::NonNegativeNumber);
  fuzz->add_option("--depth", o.depth, "Program depth for every suite")->check(CLI::NonNegativeNumber);
  fuzz->add_option("--suite", o.suite, "all, vjp, interpolation or adjoint")->capture_default_str();
  fuzz->add_option("--first-seed", o.first_seed, "First seed");
  fuzz->add_option("--threads", o.threads, "Worker threads (0: one per core)");
  fuzz->add_option("--report", o.report, "Write the full report to this file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  std::string file = o.file == "-" ? "<stdin>" : o.file;
  try {
    if (app.got_subcommand(check)) return cmd_check(o, in, out);
    if (app.got_subcommand(run)) return cmd_run(o, in, out);
    if (app.got_subcommand(trace)) return cmd_trace(o, in, out);
    if (app.got_subcommand(grad)) return cmd_grad(o, in, out);
    if (app.got_subcommand(fdcheck)) return cmd_fdcheck(o, in, out);
    if (app.got_subcommand(fuzz)) return cmd_fuzz(o, out);
  } catch (const SyntaxError& e) {
    err << where(file, e.line(), e.column()) << "syntax error: " << e.what() << '\n';
    return exit_code::kSyntax;
  } catch (const TypeError& e) {
    err << file << ": type error: " << to_string(e.kind()) << ": " << e.what()
        << '\n';
    return exit_code::kTypeError;
  } catch (const Stuck& e) {
    err << e.what() << '\n';
    return exit_code::kStuck;
  } catch (const FuelExhausted&) {
    err << "fuel exhausted after " << o.fuel << " steps\n";
    return exit_code::kFuel;
  } catch (const UsageError& e) {
    err << "dpl: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_code::kInternal;
  }
  return exit_code::kUsage;
}

}  // namespace dpl
