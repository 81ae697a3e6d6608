#pragma once
// Point-file and diagram-file text formats.
//
// Point file: optional `#` comment lines; one point per line, two rationals
// ("num/den" or integer or plain decimal) separated by whitespace.
//
// Diagram file: one pair per line, `<dim> <birth> <death>`, values printed
// with 17 significant digits in α (length) units, `inf` for infinite death.

#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sdf/point.hpp"

namespace sdf {

inline std::vector<Pt> read_points(std::istream& in) {
  std::vector<Pt> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string xs, ys, extra;
    ls >> xs >> ys;
    if (ys.empty())
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": expected two coordinates");
    if (ls >> extra)
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": trailing tokens");
    try {
      pts.push_back(Pt{parse_q(xs), parse_q(ys)});
    } catch (const std::exception& ex) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " +
                               ex.what());
    }
  }
  if (pts.empty()) throw std::runtime_error("point file has no points");
  return pts;
}

inline std::vector<Pt> read_points_text(const std::string& text) {
  std::istringstream in(text);
  return read_points(in);
}

struct DiagramPair {
  int dim;
  long double birth;
  long double death;  // infinity() for unpaired classes
  bool operator==(const DiagramPair&) const = default;
};

using Diagram = std::vector<DiagramPair>;

inline std::string write_diagram(const Diagram& d) {
  std::string out;
  for (const auto& p : d) {
    out += std::to_string(p.dim) + " " + fmt_ld(p.birth) + " ";
    out += std::isinf(static_cast<double>(p.death)) ? std::string("inf")
                                                    : fmt_ld(p.death);
    out += "\n";
  }
  return out;
}

inline Diagram read_diagram(std::istream& in) {
  Diagram d;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    int dim;
    std::string bs, ds, extra;
    if (!(ls >> dim >> bs >> ds) || (ls >> extra))
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": expected '<dim> <birth> <death>'");
    DiagramPair p;
    p.dim = dim;
    try {
      p.birth = std::stold(bs);
      p.death = (ds == "inf") ? std::numeric_limits<long double>::infinity()
                              : std::stold(ds);
    } catch (const std::exception&) {
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": malformed value");
    }
    d.push_back(p);
  }
  return d;
}

inline Diagram read_diagram_text(const std::string& text) {
  std::istringstream in(text);
  return read_diagram(in);
}

}  // namespace sdf
