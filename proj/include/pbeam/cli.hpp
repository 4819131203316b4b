#pragma once

#include <cstddef>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pbeam/analysis.hpp"
#include "pbeam/expression.hpp"
#include "pbeam/manufactured.hpp"
#include "pbeam/report.hpp"
#include "pbeam/solver.hpp"

namespace pbeam::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kNumericalFailure = 2 };

enum class Command { solve, convergence, validate };

struct RunConfig {
  Command command{Command::solve};
  double p{2.0};
  int example{1};      // 1, 2, or 0 for a custom source
  std::string source;  // expression in x when example == 0
  int degree{1};
  std::size_t n{10};
  std::vector<std::size_t> n_list{10, 100, 1000};
  bool full{false};  // append n = 10000 to the mesh list
  std::string output;
  std::string plot;
  std::string svg;
  int quad_points{0};
  bool deterministic{false};
  std::size_t samples{200};

  bool operator==(const RunConfig&) const = default;
};

[[nodiscard]] inline const char* command_name(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::convergence: return "convergence";
    case Command::validate: return "validate";
  }
  return "?";
}

/// Thrown by parse_run_config; carries the exit code CLI11 would use and its message.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& msg, int code) : std::runtime_error(msg), code_(code) {}
  [[nodiscard]] int code() const noexcept { return code_; }

 private:
  int code_;
};

namespace detail {

inline std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw std::invalid_argument("empty entry in --n-list");
    std::size_t used = 0;
    const auto v = std::stoull(item, &used);
    if (used != item.size()) throw std::invalid_argument("malformed entry '" + item + "' in --n-list");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

inline std::string join_n_list(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct Parser {
  CLI::App app{"Mixed finite element solver for the p-biharmonic beam equation", "pbeam"};
  RunConfig cfg;
  std::string n_list_text{"10,100,1000"};
  std::string example_text{"1"};
  CLI::App* solve = nullptr;
  CLI::App* convergence = nullptr;
  CLI::App* validate = nullptr;

  Parser() {
    app.require_subcommand(1);
    solve = app.add_subcommand("solve", "solve one instance and write a samples file");
    convergence = app.add_subcommand("convergence", "run a mesh refinement study and write a CSV table");
    validate = app.add_subcommand("validate", "check a manufactured solution against the strong equations");

    for (auto* sub : {solve, convergence, validate}) {
      sub->add_option("--p", cfg.p, "exponent p > 1")->required();
      sub->add_option("--example", example_text, "manufactured example: 1 or 2");
    }
    solve->add_option("--source", cfg.source, "custom source f(x) as an expression (replaces --example)");
    for (auto* sub : {solve, convergence}) {
      sub->add_option("--degree", cfg.degree, "Lagrange degree (r - 1)")->check(CLI::PositiveNumber);
      sub->add_option("--quad-points", cfg.quad_points, "Gauss points per element (0 = default)")
          ->check(CLI::NonNegativeNumber);
      sub->add_option("--output,-o", cfg.output, "output file");
    }
    solve->add_option("--n", cfg.n, "number of elements")->check(CLI::PositiveNumber);
    solve->add_option("--samples", cfg.samples, "sample intervals in the samples file")->check(CLI::PositiveNumber);
    convergence->add_option("--n-list", n_list_text, "comma-separated increasing element counts");
    convergence->add_flag("--full", cfg.full, "append n = 10000 to the mesh list");
    convergence->add_option("--plot", cfg.plot, "write log10(h)/log10(error) data to this file");
    convergence->add_option("--svg", cfg.svg, "write a log-log SVG chart to this file");
    convergence->add_flag("--deterministic", cfg.deterministic, "run meshes sequentially");
  }

  RunConfig finish() {
    if (solve->parsed()) cfg.command = Command::solve;
    if (convergence->parsed()) cfg.command = Command::convergence;
    if (validate->parsed()) cfg.command = Command::validate;
    if (!cfg.source.empty()) {
      cfg.example = 0;
    } else {
      if (example_text != "1" && example_text != "2") {
        throw UsageError("--example must be 1 or 2", kUsageError);
      }
      cfg.example = example_text == "1" ? 1 : 2;
    }
    try {
      cfg.n_list = parse_n_list(n_list_text);
    } catch (const std::exception& e) {
      throw UsageError(e.what(), kUsageError);
    }
    return cfg;
  }
};

}  // namespace detail

/// Parses argv-style arguments (without the program name).
[[nodiscard]] inline RunConfig parse_run_config(const std::vector<std::string>& args) {
  detail::Parser parser;
  std::vector<const char*> argv{"pbeam"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    parser.app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = parser.app.exit(e, out, err);
    throw UsageError(out.str() + err.str(), code == 0 ? kSuccess : kUsageError);
  }
  return parser.finish();
}

namespace detail {

// Shortest of 15 or 17 significant digits that reads back to the same double.
inline std::string exact_real(double v) {
  std::string s = format_real(v);
  if (std::stod(s) == v) return s;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Canonical argument list; parse_run_config(to_args(cfg)) == cfg for configs it produced.
[[nodiscard]] inline std::vector<std::string> to_args(const RunConfig& cfg) {
  std::vector<std::string> a{command_name(cfg.command), "--p", detail::exact_real(cfg.p)};
  if (cfg.example == 0) {
    a.insert(a.end(), {"--source", cfg.source});
  } else {
    a.insert(a.end(), {"--example", std::to_string(cfg.example)});
  }
  if (cfg.command != Command::validate) {
    a.insert(a.end(), {"--degree", std::to_string(cfg.degree), "--quad-points", std::to_string(cfg.quad_points)});
    if (!cfg.output.empty()) a.insert(a.end(), {"--output", cfg.output});
  }
  if (cfg.command == Command::solve) {
    a.insert(a.end(), {"--n", std::to_string(cfg.n), "--samples", std::to_string(cfg.samples)});
  }
  if (cfg.command == Command::convergence) {
    a.insert(a.end(), {"--n-list", detail::join_n_list(cfg.n_list)});
    if (cfg.full) a.emplace_back("--full");
    if (!cfg.plot.empty()) a.insert(a.end(), {"--plot", cfg.plot});
    if (!cfg.svg.empty()) a.insert(a.end(), {"--svg", cfg.svg});
    if (cfg.deterministic) a.emplace_back("--deterministic");
  }
  return a;
}

[[nodiscard]] inline ExactPair make_example(int example, double p) {
  if (example == 1) return example1(p);
  if (example == 2) return example2(p);
  throw std::invalid_argument("unknown example " + std::to_string(example));
}

namespace detail {

template <typename Write>
void write_output(const std::string& path, std::ostream& fallback, Write&& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  write(file);
  if (!file) throw std::runtime_error("failed writing " + path);
}

}  // namespace detail

inline int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  ProblemConfig pc;
  pc.p = cfg.p;
  pc.n_elements = cfg.n;
  pc.degree = cfg.degree;
  pc.quad_points = cfg.quad_points;
  std::optional<ExactPair> exact;
  if (cfg.example == 0) {
    auto expr = Expression::parse(cfg.source);
    pc.source = [expr](double x) { return expr(x); };
  } else {
    exact = make_example(cfg.example, cfg.p);
    pc.source = exact->f;
  }
  const auto sol = solve_mixed(pc);
  const std::string path = cfg.output.empty() ? std::string("solution.csv") : cfg.output;
  detail::write_output(path, out, [&](std::ostream& os) {
    write_samples_csv(os, sol, exact ? &*exact : nullptr, cfg.samples);
  });
  if (path == "-") return kSuccess;

  out << "p = " << format_real(cfg.p) << ", q = " << format_real(pc.q()) << ", degree = " << cfg.degree
      << ", n = " << cfg.n << '\n';
  out << "residual_v = " << format_real(sol.residual_v) << '\n';
  out << "residual_u = " << format_real(sol.residual_u) << '\n';
  if (exact) {
    const auto r = measure_errors(sol, *exact, pc.effective_quad_points());
    out << "err_u_l2 = " << format_real(r.err_u_l2) << '\n';
    out << "err_v_l2 = " << format_real(r.err_v_l2) << '\n';
    out << "err_u_h1 = " << format_real(r.err_u_h1) << '\n';
    out << "err_v_h1 = " << format_real(r.err_v_h1) << '\n';
  }
  const auto st = stability_check(sol, pc);
  out << "||v_h||_H1 = " << format_real(st.v_h1) << ", ||u_h||_H1 = " << format_real(st.u_h1)
      << ", ||f||_L2 = " << format_real(st.f_l2) << '\n';
  out << "samples written to " << path << '\n';
  return kSuccess;
}

inline int cmd_convergence(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  if (cfg.example == 0) throw std::invalid_argument("convergence studies need --example 1 or 2");
  auto n_list = cfg.n_list;
  if (cfg.full && (n_list.empty() || n_list.back() < 10000)) n_list.push_back(10000);
  if (n_list.size() < 2) throw std::invalid_argument("convergence studies need at least two meshes in --n-list");
  ConvergenceOptions opts;
  opts.quad_points = cfg.quad_points;
  opts.parallel = !cfg.deterministic;
  const auto table = run_convergence(make_example(cfg.example, cfg.p), cfg.degree, n_list, opts);
  detail::write_output(cfg.output, out, [&](std::ostream& os) { write_convergence_csv(os, table); });
  if (!cfg.plot.empty()) {
    detail::write_output(cfg.plot, out, [&](std::ostream& os) { write_plot_data(os, table); });
  }
  if (!cfg.svg.empty()) {
    detail::write_output(cfg.svg, out, [&](std::ostream& os) {
      write_svg(os, table, table.label + ", degree " + std::to_string(cfg.degree));
    });
  }
  return kSuccess;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.example == 0) throw std::invalid_argument("validate needs --example 1 or 2");
  const auto exact = make_example(cfg.example, cfg.p);
  const auto rep = check_consistency(exact);
  out << exact.label << ": " << rep.describe() << '\n';
  out << "max defect = " << format_real(std::max(rep.max_defect_v, rep.max_defect_u)) << " (tolerance "
      << format_real(rep.tolerance) << ")\n";
  if (cfg.example == 2) {
    out << "note: v = -((x - x^3)/6)^(p-1) is negative on (0,1); the positive form x^2(x^4 - 2x^2 + 1)/36 "
           "has the same magnitude at p = 3 but does not satisfy v'' = f\n";
  }
  if (!rep.passed) {
    if (rep.max_defect_v > rep.tolerance) err << "FAIL: v'' = f violated at x = " << rep.worst_x_v << '\n';
    if (rep.max_defect_u > rep.tolerance) {
      err << "FAIL: u'' = sign(v)|v|^(q-1) violated at x = " << rep.worst_x_u << '\n';
    }
    if (rep.max_boundary > 1e-14) err << "FAIL: boundary values do not vanish\n";
    return kNumericalFailure;
  }
  out << "PASS\n";
  return kSuccess;
}

/// Dispatches a parsed config; maps exceptions to exit codes.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::solve: return cmd_solve(cfg, out, err);
      case Command::convergence: return cmd_convergence(cfg, out, err);
      case Command::validate: return cmd_validate(cfg, out, err);
    }
  } catch (const NotPositiveDefinite& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kUsageError;
}

/// Full entry point: parse then run.
inline int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_run_config(args);
  } catch (const UsageError& e) {
    (e.code() == kSuccess ? out : err) << e.what();
    return e.code();
  }
  return run(cfg, out, err);
}

}  // namespace pbeam::cli
