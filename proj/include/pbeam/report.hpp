#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbeam/analysis.hpp"

namespace pbeam {

inline constexpr const char* kConvergenceHeader =
    "n,h,err_u_l2,err_v_l2,err_u_h1,err_v_h1,eoc_u_l2,eoc_v_l2,eoc_u_h1,eoc_v_h1";

/// 15 significant digits, shortest of fixed/exponent notation.
[[nodiscard]] inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline void write_convergence_csv(std::ostream& os, const ConvergenceTable& table) {
  os << kConvergenceHeader << '\n';
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& r = table.rows[k];
    os << r.n_elements << ',' << format_real(r.h) << ',' << format_real(r.err_u_l2) << ',' << format_real(r.err_v_l2)
       << ',' << format_real(r.err_u_h1) << ',' << format_real(r.err_v_h1);
    for (const auto& e : table.eoc[k]) {
      os << ',';
      if (e) os << format_real(*e);
    }
    os << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace detail

/// Parses a table written by write_convergence_csv; p, degree and label are not stored in the file.
[[nodiscard]] inline ConvergenceTable read_convergence_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kConvergenceHeader) {
    throw std::runtime_error("convergence CSV is missing its header row");
  }
  ConvergenceTable table;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 10) throw std::runtime_error("convergence CSV line " + std::to_string(line_no) + " has " +
                                                     std::to_string(cells.size()) + " cells, expected 10");
    ErrorReport r;
    r.n_elements = static_cast<std::size_t>(std::stoull(cells[0]));
    r.h = std::stod(cells[1]);
    r.err_u_l2 = std::stod(cells[2]);
    r.err_v_l2 = std::stod(cells[3]);
    r.err_u_h1 = std::stod(cells[4]);
    r.err_v_h1 = std::stod(cells[5]);
    EocRow e;
    for (std::size_t i = 0; i < 4; ++i) {
      if (!cells[6 + i].empty()) e[i] = std::stod(cells[6 + i]);
    }
    table.rows.push_back(r);
    table.eoc.push_back(e);
  }
  return table;
}

/// Samples of u_h and v_h (and the exact pair when given) at n_intervals + 1 equispaced points.
inline void write_samples_csv(std::ostream& os, const MixedSolution& sol, const ExactPair* exact,
                              std::size_t n_intervals = 200) {
  const auto& mesh = sol.u_h.space().mesh();
  os << "x,u_h,v_h";
  if (exact) os << ",u_exact,v_exact";
  os << '\n';
  for (std::size_t i = 0; i <= n_intervals; ++i) {
    const double x = i == n_intervals ? mesh.b()
                                      : mesh.a() + (mesh.b() - mesh.a()) * static_cast<double>(i) /
                                                       static_cast<double>(n_intervals);
    os << format_real(x) << ',' << format_real(sol.u_h.eval(x)) << ',' << format_real(sol.v_h.eval(x));
    if (exact) os << ',' << format_real(exact->u(x)) << ',' << format_real(exact->v(x));
    os << '\n';
  }
}

/// Whitespace-separated log10(h) / log10(error) columns; "nan" marks non-positive errors.
inline void write_plot_data(std::ostream& os, const ConvergenceTable& table) {
  os << "# log10_h log10_err_u_l2 log10_err_v_l2 log10_err_u_h1 log10_err_v_h1\n";
  for (const auto& r : table.rows) {
    os << format_real(std::log10(r.h));
    for (std::size_t i = 0; i < 4; ++i) {
      const double e = r.error(static_cast<Quantity>(i));
      os << ' ' << (e > 0.0 ? format_real(std::log10(e)) : std::string("nan"));
    }
    os << '\n';
  }
}

/// Self-contained SVG log-log chart of the four error series.
inline void write_svg(std::ostream& os, const ConvergenceTable& table, const std::string& title = {}) {
  constexpr double width = 640.0;
  constexpr double height = 480.0;
  constexpr double margin = 60.0;
  constexpr std::array<const char*, 4> colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& r : table.rows) {
    const double lx = std::log10(r.h);
    xmin = std::min(xmin, lx);
    xmax = std::max(xmax, lx);
    for (std::size_t i = 0; i < 4; ++i) {
      const double e = r.error(static_cast<Quantity>(i));
      if (e > 0.0) {
        ymin = std::min(ymin, std::log10(e));
        ymax = std::max(ymax, std::log10(e));
      }
    }
  }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin = std::isfinite(ymin) ? ymin - 0.5 : -1.0;
    ymax = std::isfinite(ymax) ? ymax + 0.5 : 0.0;
  }
  auto sx = [&](double lx) { return margin + (lx - xmin) / (xmax - xmin) * (width - 2 * margin); };
  auto sy = [&](double ly) { return height - margin - (ly - ymin) / (ymax - ymin) * (height - 2 * margin); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
     << height - margin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">log10(h)</text>\n";
  os << "<text x=\"15\" y=\"" << height / 2 << "\" transform=\"rotate(-90 15 " << height / 2
     << ")\" text-anchor=\"middle\">log10(error)</text>\n";
  if (!title.empty()) os << "<text x=\"" << width / 2 << "\" y=\"30\" text-anchor=\"middle\">" << title << "</text>\n";
  for (std::size_t i = 0; i < 4; ++i) {
    std::ostringstream pts;
    for (const auto& r : table.rows) {
      const double e = r.error(static_cast<Quantity>(i));
      if (e > 0.0) pts << format_real(sx(std::log10(r.h))) << ',' << format_real(sy(std::log10(e))) << ' ';
    }
    os << "<polyline fill=\"none\" stroke=\"" << colors[i] << "\" stroke-width=\"2\" points=\"" << pts.str()
       << "\"/>\n";
    os << "<text x=\"" << width - margin + 5 << "\" y=\"" << margin + 18.0 * static_cast<double>(i) << "\" fill=\""
       << colors[i] << "\">" << kQuantityNames[i] << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace pbeam
