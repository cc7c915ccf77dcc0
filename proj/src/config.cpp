#include "bkern/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "bkern/error.hpp"

namespace bkern {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Parse, where + ": " + what);
}

double to_double(const std::string& v, const std::string& where) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    parse_error(where, "expected a number, got '" + v + "'");
  }
  if (trim(v.substr(used)).size()) parse_error(where, "trailing text in '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  parse_error(where, "expected true or false, got '" + v + "'");
}

int to_int(const std::string& v, const std::string& where) {
  double x = to_double(v, where);
  if (x != std::floor(x)) parse_error(where, "expected an integer, got '" + v + "'");
  return int(x);
}

std::vector<double> numbers(const std::string& v, const std::string& where) {
  std::istringstream is(v);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(tok, where));
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

Config parse_config(std::istream& in, const std::string& source) {
  Config c;
  c.source = source;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> keys = {
      {"surface.kind", [&](auto& v, auto& w) {
         if (v != "p1" && v != "torus") parse_error(w, "kind must be p1 or torus");
         c.kind = v;
       }},
      {"surface.c", [&](auto& v, auto& w) { c.c = to_double(v, w); }},
      {"surface.lattice", [&](auto& v, auto& w) {
         std::istringstream is(v);
         std::string shape;
         is >> shape;
         if (shape != "square" && shape != "rect" && shape != "general")
           parse_error(w, "lattice must be 'square', 'rect W H' or 'general a1 b1 a2 b2'");
         c.lattice = v;
       }},
      {"surface.degree", [&](auto& v, auto& w) { c.degree = to_double(v, w); }},
      {"surface.perturbation", [&](auto& v, auto&) { c.perturbation = v; }},
      {"surface.l0", [&](auto& v, auto& w) { c.l0 = to_double(v, w); }},
      {"surface.point", [&](auto& v, auto& w) {
         auto p = numbers(v, w);
         if (p.size() != 2) parse_error(w, "point needs two numbers");
         c.point = {p[0], p[1]};
       }},
      {"surface.resolution", [&](auto& v, auto& w) { c.resolution = to_int(v, w); }},
      {"solver.lambda", [&](auto& v, auto& w) { c.lambda = to_double(v, w); }},
      {"solver.tolerance", [&](auto& v, auto& w) { c.solver.tolerance = to_double(v, w); }},
      {"solver.max_sweeps", [&](auto& v, auto& w) { c.solver.max_sweeps = to_int(v, w); }},
      {"solver.relaxation", [&](auto& v, auto& w) { c.solver.relaxation = to_double(v, w); }},
      {"solver.max_active_set_iterations",
       [&](auto& v, auto& w) { c.solver.max_active_set_iterations = to_int(v, w); }},
      {"solver.half_length", [&](auto& v, auto& w) { c.half_length = to_double(v, w); }},
      {"solver.override_seshadri_boundary",
       [&](auto& v, auto& w) { c.override_seshadri_boundary = to_bool(v, w); }},
      {"solver.threads", [&](auto& v, auto& w) { c.threads = to_int(v, w); }},
      {"tolerances.kernel", [&](auto& v, auto& w) { c.tol_kernel = to_double(v, w); }},
      {"tolerances.flow", [&](auto& v, auto& w) { c.tol_flow = to_double(v, w); }},
      {"tolerances.monotone", [&](auto& v, auto& w) { c.tol_monotone = to_double(v, w); }},
      {"tolerances.hessian", [&](auto& v, auto& w) { c.tol_hessian = to_double(v, w); }},
  };

  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = source + ":" + std::to_string(lineno);
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_error(where, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "surface" && section != "solver" && section != "tolerances") {
        parse_error(where, "unknown section [" + section + "]");
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) parse_error(where, "expected key = value");
    if (section.empty()) parse_error(where, "key outside a section");
    std::string key = section + "." + trim(line.substr(0, eq));
    auto it = keys.find(key);
    if (it == keys.end()) parse_error(where, "unknown key '" + key + "'");
    it->second(trim(line.substr(eq + 1)), where);
  }
  // surface construction validates the rest
  (void)c.surface();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open config '" + path + "'");
  return parse_config(in, path);
}

SurfaceModel Config::surface() const {
  Expr rho;
  if (!perturbation.empty()) {
    try {
      rho = Expr::parse(perturbation);
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, std::string("perturbation: ") + e.what());
    }
  }
  SurfaceModel s;
  if (kind == "p1") {
    if (!(c > 0)) throw Error(ErrorKind::Parse, "c must be positive");
    s = SurfaceModel::projective_line(c, rho);
  } else {
    if (!(degree > 0)) throw Error(ErrorKind::Parse, "degree must be positive");
    std::istringstream is(lattice);
    std::string shape;
    is >> shape;
    auto rest = numbers(lattice.substr(shape.size()), "lattice");
    if (shape == "square" && rest.empty()) {
      s = rho.empty() ? SurfaceModel::square_torus(degree)
                      : SurfaceModel::torus({std::sqrt(2 * std::numbers::pi * degree), 0},
                                            {0, std::sqrt(2 * std::numbers::pi * degree)}, degree, rho);
    } else if (shape == "rect" && rest.size() == 2) {
      s = SurfaceModel::torus({rest[0], 0}, {0, rest[1]}, degree, rho);
    } else if (shape == "general" && rest.size() == 4) {
      s = SurfaceModel::torus({rest[0], rest[1]}, {rest[2], rest[3]}, degree, rho);
    } else {
      throw Error(ErrorKind::Parse, "lattice must be 'square', 'rect W H' or 'general a1 b1 a2 b2'");
    }
  }
  if (l0 > 0) s.set_certified_L0(l0);
  return s;
}

std::map<std::string, std::string> Config::echo() const {
  std::map<std::string, std::string> e;
  e["surface.kind"] = kind;
  if (kind == "p1") {
    e["surface.c"] = fmt(c);
  } else {
    e["surface.lattice"] = lattice;
    e["surface.degree"] = fmt(degree);
  }
  if (!perturbation.empty()) e["surface.perturbation"] = perturbation;
  if (l0 > 0) e["surface.l0"] = fmt(l0);
  e["surface.point"] = fmt(point.real()) + " " + fmt(point.imag());
  e["surface.resolution"] = std::to_string(resolution);
  e["solver.lambda"] = fmt(lambda);
  e["solver.tolerance"] = fmt(solver.tolerance);
  e["solver.max_sweeps"] = std::to_string(solver.max_sweeps);
  e["solver.relaxation"] = fmt(solver.relaxation);
  e["solver.half_length"] = fmt(half_length);
  e["solver.override_seshadri_boundary"] = override_seshadri_boundary ? "true" : "false";
  e["tolerances.kernel"] = fmt(tol_kernel);
  e["tolerances.flow"] = fmt(tol_flow);
  e["tolerances.monotone"] = fmt(tol_monotone);
  e["tolerances.hessian"] = fmt(tol_hessian);
  return e;
}

}  // namespace bkern
