#include "mpbenders/mp_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mpbenders/errors.hpp"

namespace mpb {

namespace {

using nlohmann::json;

void put_number(std::ostream& out, double v) {
  if (!std::isfinite(v)) throw FormatError("<value>", "non-finite number cannot be serialized");
  if (v == 0.0) {
    out << (std::signbit(v) ? "-0.0" : "0");
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void put_vec(std::ostream& out, const Vec& v) {
  out << '[';
  for (int i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    put_number(out, v[i]);
  }
  out << ']';
}

void put_mat(std::ostream& out, const Mat& m, const std::string& indent) {
  out << '[';
  for (int i = 0; i < m.rows(); ++i) {
    out << (i ? ",\n" : "\n") << indent << "  ";
    put_vec(out, m.row(i).transpose());
  }
  if (m.rows()) out << '\n' << indent;
  out << ']';
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw FormatError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw FormatError(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw FormatError(path, "expected an integer");
  return j.get<int>();
}

Vec read_vec(const json& j, const std::string& path, int expect = -1) {
  if (!j.is_array()) throw FormatError(path, "expected an array");
  if (expect >= 0 && static_cast<int>(j.size()) != expect)
    throw FormatError(path, "expected " + std::to_string(expect) + " entries, got " + std::to_string(j.size()));
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Mat read_mat(const json& j, const std::string& path, int rows, int cols) {
  if (!j.is_array()) throw FormatError(path, "expected an array of rows");
  if (rows >= 0 && static_cast<int>(j.size()) != rows)
    throw FormatError(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  Mat m(j.size(), cols);
  for (size_t i = 0; i < j.size(); ++i)
    m.row(i) = read_vec(j[i], path + "[" + std::to_string(i) + "]", cols).transpose();
  return m;
}

}  // namespace

void save_mp(const MpSolution& sol, std::ostream& out) {
  const MpLp& p = sol.problem;
  out << "{\n  \"format_version\": " << kMpFormatVersion << ",\n";
  out << "  \"theta_dim\": " << sol.theta_dim << ",\n";
  out << "  \"x_dim\": " << sol.x_dim << ",\n";
  out << "  \"problem\": {\n";
  out << "    \"c\": ";
  put_vec(out, p.c);
  out << ",\n    \"H\": ";
  put_mat(out, p.H, "    ");
  out << ",\n    \"A\": ";
  put_mat(out, p.A, "    ");
  out << ",\n    \"b\": ";
  put_vec(out, p.b);
  out << ",\n    \"F\": ";
  put_mat(out, p.F, "    ");
  out << ",\n    \"A_eq\": ";
  put_mat(out, p.A_eq, "    ");
  out << ",\n    \"b_eq\": ";
  put_vec(out, p.b_eq);
  out << ",\n    \"F_eq\": ";
  put_mat(out, p.F_eq, "    ");
  out << ",\n    \"A_theta\": ";
  put_mat(out, p.A_theta, "    ");
  out << ",\n    \"b_theta\": ";
  put_vec(out, p.b_theta);
  out << "\n  },\n  \"regions\": [";
  for (size_t v = 0; v < sol.regions.size(); ++v) {
    const CriticalRegion& r = sol.regions[v];
    const std::string ind = "      ";
    out << (v ? ",\n" : "\n") << "    {\n";
    out << ind << "\"E\": ";
    put_mat(out, r.E, ind);
    out << ",\n" << ind << "\"f\": ";
    put_vec(out, r.f);
    out << ",\n" << ind << "\"A_aff\": ";
    put_mat(out, r.A_aff, ind);
    out << ",\n" << ind << "\"b_aff\": ";
    put_vec(out, r.b_aff);
    out << ",\n" << ind << "\"G\": ";
    put_mat(out, r.G, ind);
    out << ",\n" << ind << "\"g\": ";
    put_vec(out, r.g);
    out << ",\n" << ind << "\"active_set\": [";
    for (size_t k = 0; k < r.active_set.size(); ++k) out << (k ? "," : "") << r.active_set[k];
    out << "],\n" << ind << "\"cheb_center\": ";
    put_vec(out, r.cheb_center);
    out << ",\n" << ind << "\"cheb_radius\": ";
    put_number(out, r.cheb_radius);
    out << "\n    }";
  }
  if (!sol.regions.empty()) out << "\n  ";
  out << "]\n}\n";
}

void save_mp_file(const MpSolution& sol, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  save_mp(sol, f);
  if (!f) throw Error("failed writing " + path);
}

MpSolution load_mp(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("$", e.what());
  }
  const int version = integer(field(doc, "format_version", "$"), "$.format_version");
  if (version != kMpFormatVersion)
    throw FormatError("$.format_version", "unsupported version " + std::to_string(version));
  MpSolution sol;
  const int td = integer(field(doc, "theta_dim", "$"), "$.theta_dim");
  const int xd = integer(field(doc, "x_dim", "$"), "$.x_dim");
  if (td < 1 || xd < 1) throw FormatError("$", "dimensions must be positive");
  sol.theta_dim = td;
  sol.x_dim = xd;
  const json& pj = field(doc, "problem", "$");
  const std::string pp = "$.problem";
  MpLp& p = sol.problem;
  p.c = read_vec(field(pj, "c", pp), pp + ".c", xd);
  p.H = read_mat(field(pj, "H", pp), pp + ".H", xd, td);
  p.A = read_mat(field(pj, "A", pp), pp + ".A", -1, xd);
  p.b = read_vec(field(pj, "b", pp), pp + ".b", static_cast<int>(p.A.rows()));
  p.F = read_mat(field(pj, "F", pp), pp + ".F", static_cast<int>(p.A.rows()), td);
  p.A_eq = read_mat(field(pj, "A_eq", pp), pp + ".A_eq", -1, xd);
  p.b_eq = read_vec(field(pj, "b_eq", pp), pp + ".b_eq", static_cast<int>(p.A_eq.rows()));
  p.F_eq = read_mat(field(pj, "F_eq", pp), pp + ".F_eq", static_cast<int>(p.A_eq.rows()), td);
  p.A_theta = read_mat(field(pj, "A_theta", pp), pp + ".A_theta", -1, td);
  p.b_theta = read_vec(field(pj, "b_theta", pp), pp + ".b_theta", static_cast<int>(p.A_theta.rows()));

  const json& rj = field(doc, "regions", "$");
  if (!rj.is_array()) throw FormatError("$.regions", "expected an array");
  const int mi = p.num_ineq(), me = p.num_eq();
  for (size_t v = 0; v < rj.size(); ++v) {
    const std::string rp = "$.regions[" + std::to_string(v) + "]";
    const json& o = rj[v];
    CriticalRegion r;
    r.E = read_mat(field(o, "E", rp), rp + ".E", -1, td);
    r.f = read_vec(field(o, "f", rp), rp + ".f", static_cast<int>(r.E.rows()));
    r.A_aff = read_mat(field(o, "A_aff", rp), rp + ".A_aff", xd, td);
    r.b_aff = read_vec(field(o, "b_aff", rp), rp + ".b_aff", xd);
    const json& aj = field(o, "active_set", rp);
    if (!aj.is_array()) throw FormatError(rp + ".active_set", "expected an array");
    for (size_t k = 0; k < aj.size(); ++k) {
      const std::string ap = rp + ".active_set[" + std::to_string(k) + "]";
      const int i = integer(aj[k], ap);
      if (i < 0 || i >= mi) throw FormatError(ap, "row index out of range");
      r.active_set.push_back(i);
    }
    const int na = static_cast<int>(r.active_set.size());
    r.G = read_mat(field(o, "G", rp), rp + ".G", na + me, td);
    r.g = read_vec(field(o, "g", rp), rp + ".g", na + me);
    r.cheb_center = read_vec(field(o, "cheb_center", rp), rp + ".cheb_center", td);
    r.cheb_radius = number(field(o, "cheb_radius", rp), rp + ".cheb_radius");
    if (!(r.cheb_radius > 1e-8)) throw FormatError(rp + ".cheb_radius", "region is not full-dimensional");
    for (int i = 0; i < r.E.rows(); ++i) {
      if (std::abs(r.E.row(i).norm() - 1.0) > 1e-9)
        throw FormatError(rp + ".E[" + std::to_string(i) + "]", "row is not unit-normalized");
    }
    if (!r.contains(r.cheb_center, 0.0))
      throw FormatError(rp + ".cheb_center", "center lies outside the region");
    sol.regions.push_back(std::move(r));
  }
  try {
    p.validate();
  } catch (const DimensionMismatch& e) {
    throw FormatError("$.problem", e.what());
  }
  compute_region_boxes(sol);
  return sol;
}

MpSolution load_mp_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError(path, "cannot open file");
  return load_mp(f);
}

}  // namespace mpb
