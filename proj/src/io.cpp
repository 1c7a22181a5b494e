#include "gdh/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "gdh/errors.hpp"

namespace gdh {
namespace {

const Json& field(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) throw ParseError(ctx + ": expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(ctx + ": missing field '" + key + "'");
  return *it;
}

int as_int(const Json& v, const std::string& what) {
  if (!v.is_number_integer()) throw ParseError(what + ": expected an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ParseError(what + ": integer out of range");
  }
  return static_cast<int>(x);
}

double as_double(const Json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError(what + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(what + ": value is not finite");
  return x;
}

std::vector<int> int_list(const Json& v, const std::string& what) {
  if (!v.is_array()) throw ParseError(what + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_int(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

Point real_list(const Json& v, const std::string& what) {
  if (!v.is_array()) throw ParseError(what + ": expected an array of numbers");
  Point out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_double(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

int dimension(const Json& j, const std::string& ctx) {
  const int d = as_int(field(j, "d", ctx), ctx + ".d");
  if (d < 1) throw ParseError(ctx + ".d: must be >= 1");
  return d;
}

// Parses [{"index": [...], "re": x, "im": y}, ...] into a box-indexed array.
std::vector<Complex> indexed_values(const Json& list, const Box& box, const std::string& ctx) {
  if (!list.is_array()) throw ParseError(ctx + ": expected an array");
  std::vector<Complex> vals(box.count());
  std::vector<std::uint8_t> seen(box.count(), 0);
  for (std::size_t e = 0; e < list.size(); ++e) {
    const std::string where = ctx + "[" + std::to_string(e) + "]";
    const auto idx = int_list(field(list[e], "index", where), where + ".index");
    if (static_cast<int>(idx.size()) != box.dim()) throw ParseError(where + ".index: wrong dimension");
    if (!box.contains(idx)) throw ParseError(where + ".index: outside the declared window");
    const double re = as_double(field(list[e], "re", where), where + ".re");
    const double im = as_double(field(list[e], "im", where), where + ".im");
    const auto off = box.offset(idx);
    if (seen[off]) throw ParseError(where + ".index: duplicate index");
    seen[off] = 1;
    vals[off] = {re, im};
  }
  return vals;
}

Json indexed_json(const Box& box, std::span<const Complex> vals, bool skip_zero) {
  Json list = Json::array();
  MultiIndex k = box.lo;
  std::size_t off = 0;
  do {
    const Complex v = vals[off++];
    if (skip_zero && v == Complex{}) continue;
    list.push_back({{"index", k}, {"re", v.real()}, {"im", v.imag()}});
  } while (next_index(box, k));
  return list;
}

template <class F>
auto wrap_errors(const std::string& ctx, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ParseError(ctx + ": " + e.what());
  }
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error("write to '" + path + "' failed");
}

MultiSequence multisequence_from_json(const Json& j) {
  return wrap_errors("multisequence", [&] {
    const std::string ctx = "multisequence";
    const int d = dimension(j, ctx);
    const auto radii = int_list(field(j, "radii", ctx), ctx + ".radii");
    if (static_cast<int>(radii.size()) != d) throw ParseError(ctx + ".radii: length must equal d");
    for (int r : radii) {
      if (r < 1) throw ParseError(ctx + ".radii: entries must be >= 1");
    }
    Window w(radii);
    return MultiSequence(w, indexed_values(field(j, "coeffs", ctx), w.box(), ctx + ".coeffs"));
  });
}

Json to_json(const MultiSequence& a) {
  return {{"d", a.dim()}, {"radii", a.window().radii}, {"coeffs", indexed_json(a.window().box(), a.coeffs(), false)}};
}

MultiSequence load_multisequence(const std::string& path) { return multisequence_from_json(read_json_file(path)); }

void save_multisequence(const MultiSequence& a, const std::string& path) { write_json_file(path, to_json(a)); }

Kernel kernel_from_json(const Json& j) {
  return wrap_errors("kernel", [&] {
    const std::string ctx = "kernel";
    const int d = dimension(j, ctx);
    const auto lo = int_list(field(j, "lo", ctx), ctx + ".lo");
    const auto hi = int_list(field(j, "hi", ctx), ctx + ".hi");
    if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d) {
      throw ParseError(ctx + ".lo/hi: length must equal d");
    }
    Box box(lo, hi);
    if (box.empty()) throw ParseError(ctx + ".lo/hi: empty support box");
    if (box.count() > kDefaultGridCap) throw ResourceError("kernel: support box too large");
    return Kernel(box, indexed_values(field(j, "values", ctx), box, ctx + ".values"));
  });
}

Json to_json(const Kernel& f) {
  return {{"d", f.dim()}, {"lo", f.box().lo}, {"hi", f.box().hi}, {"values", indexed_json(f.box(), f.values(), true)}};
}

Polytope polytope_from_json(const Json& j) {
  return wrap_errors("polytope", [&] {
    const std::string ctx = "polytope";
    const int d = dimension(j, ctx);
    const auto& vj = field(j, "vertices", ctx);
    if (!vj.is_array()) throw ParseError(ctx + ".vertices: expected an array");
    std::vector<Point> verts;
    for (std::size_t i = 0; i < vj.size(); ++i) {
      verts.push_back(real_list(vj[i], ctx + ".vertices[" + std::to_string(i) + "]"));
      if (static_cast<int>(verts.back().size()) != d) throw ParseError(ctx + ".vertices[" + std::to_string(i) + "]: wrong length");
    }
    const auto& fj = field(j, "facets", ctx);
    if (!fj.is_array()) throw ParseError(ctx + ".facets: expected an array");
    std::vector<Facet> facets;
    for (std::size_t i = 0; i < fj.size(); ++i) {
      const std::string where = ctx + ".facets[" + std::to_string(i) + "]";
      Facet f{real_list(field(fj[i], "normal", where), where + ".normal"),
              as_double(field(fj[i], "offset", where), where + ".offset")};
      if (static_cast<int>(f.normal.size()) != d) throw ParseError(where + ".normal: wrong length");
      facets.push_back(std::move(f));
    }
    return Polytope(d, std::move(verts), std::move(facets));
  });
}

Json to_json(const Polytope& p) {
  Json facets = Json::array();
  for (const auto& f : p.facets()) facets.push_back({{"normal", f.normal}, {"offset", f.offset}});
  return {{"d", p.dim()}, {"vertices", p.vertices()}, {"facets", facets}};
}

StaircaseSpec staircase_from_json(const Json& j) {
  return wrap_errors("staircase", [&] {
    const std::string ctx = "staircase";
    StaircaseSpec s;
    s.d = dimension(j, ctx);
    s.bound = as_double(field(j, "bound", ctx), ctx + ".bound");
    const auto& bj = field(j, "boxes", ctx);
    if (!bj.is_array()) throw ParseError(ctx + ".boxes: expected an array");
    for (std::size_t i = 0; i < bj.size(); ++i) {
      const std::string where = ctx + ".boxes[" + std::to_string(i) + "]";
      RealBox b{real_list(field(bj[i], "lo", where), where + ".lo"), real_list(field(bj[i], "hi", where), where + ".hi")};
      if (static_cast<int>(b.lo.size()) != s.d || static_cast<int>(b.hi.size()) != s.d) {
        throw ParseError(where + ": lo/hi length must equal d");
      }
      s.boxes.push_back(std::move(b));
    }
    s.validate();
    return s;
  });
}

GridMask mask_from_json(const Json& j) {
  return wrap_errors("mask", [&] {
    const std::string ctx = "mask";
    const int d = dimension(j, ctx);
    const auto& cj = field(j, "cells", ctx);
    if (!cj.is_array()) throw ParseError(ctx + ".cells: expected an array");
    std::vector<MultiIndex> cells;
    for (std::size_t i = 0; i < cj.size(); ++i) {
      cells.push_back(int_list(cj[i], ctx + ".cells[" + std::to_string(i) + "]"));
      if (static_cast<int>(cells.back().size()) != d) throw ParseError(ctx + ".cells[" + std::to_string(i) + "]: wrong length");
    }
    const double h = j.contains("spacing") ? as_double(j["spacing"], ctx + ".spacing") : 1.0;
    Point origin = j.contains("origin") ? real_list(j["origin"], ctx + ".origin") : Point(d, 0.0);
    return GridMask::from_indices(cells, h, std::move(origin));
  });
}

Json to_json(const GridMask& m) {
  return {{"d", m.dim()}, {"spacing", m.spacing()}, {"origin", m.origin()}, {"cells", m.indices()}};
}

Domain domain_from_json(const Json& j, double spacing) {
  if (!j.is_object()) throw ParseError("domain: expected a JSON object");
  if (j.contains("boxes")) {
    const auto s = staircase_from_json(j);
    return {rasterize(s, spacing), s.orthant_sandwiched() ? DomainKind::OrthantSandwiched : DomainKind::BoundedMask};
  }
  if (j.contains("vertices")) return {rasterize(polytope_from_json(j), spacing), DomainKind::BoundedMask};
  if (j.contains("cells")) return {mask_from_json(j), DomainKind::BoundedMask};
  throw ParseError("domain: expected one of the fields 'boxes', 'vertices' or 'cells'");
}

CubeFunction cube_function_from_json(const Json& j) {
  return wrap_errors("cube function", [&] {
    const std::string ctx = "cube function";
    CubeFunction g;
    g.d = dimension(j, ctx);
    g.G = as_int(field(j, "G", ctx), ctx + ".G");
    g.margin = as_int(field(j, "margin", ctx), ctx + ".margin");
    if (g.G < 2) throw ParseError(ctx + ".G: must be >= 2");
    const auto& vj = field(j, "values", ctx);
    if (!vj.is_array()) throw ParseError(ctx + ".values: expected an array");
    for (std::size_t i = 0; i < vj.size(); ++i) {
      const std::string where = ctx + ".values[" + std::to_string(i) + "]";
      if (!vj[i].is_array() || vj[i].size() != 2) throw ParseError(where + ": expected [re, im]");
      g.values.emplace_back(as_double(vj[i][0], where), as_double(vj[i][1], where));
    }
    g.validate();
    return g;
  });
}

Json to_json(const CubeFunction& g) {
  Json vals = Json::array();
  for (const auto& v : g.values) vals.push_back({v.real(), v.imag()});
  return {{"d", g.d}, {"G", g.G}, {"margin", g.margin}, {"values", vals}};
}

Json to_json(const NormEstimate& e) {
  return {{"value", e.value},
          {"lower_certificate", e.lower_certificate},
          {"iterations", e.iterations},
          {"converged", e.converged},
          {"tol", e.tol}};
}

Json to_json(const ExtensionResult& r) {
  return {{"t_grid", r.t_grid},
          {"t_cert", r.t_cert},
          {"t_lower", r.t_lower},
          {"window_residual", r.window_residual},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"bisection_steps", r.bisection_steps},
          {"radii", r.extension.window().radii},
          {"coeffs", to_json(r.extension)["coeffs"]}};
}

Json to_json(const CertifiedExtension& r) {
  Json j = to_json(r.ext);
  j["section_norm"] = r.section_norm;
  j["ratio"] = r.ratio;
  j["max_extension_section"] = r.max_extension_section;
  j["sections_bounded"] = r.sections_bounded;
  return j;
}

Json to_json(const FactorizationResult& r) {
  Json terms = Json::array();
  for (const auto& t : r.terms) terms.push_back({{"k", t.k}, {"re", t.a.real()}, {"im", t.a.imag()}});
  return {{"terms", terms},
          {"residual_sup", r.residual_sup},
          {"partial_l1", r.partial_l1},
          {"nuclear_norm", r.nuclear_norm}};
}

Json to_json(const CertificateSweep& s) {
  Json vals = Json::array();
  for (double v : s.values) {
    if (std::isnan(v)) {
      vals.push_back(nullptr);
    } else {
      vals.push_back(v);
    }
  }
  return {{"eps", s.eps}, {"values", vals}, {"best_eps", s.best_eps}, {"best_value", s.best_value}};
}

Json to_json(const SweepReport& r) {
  auto num = [](double v) { return std::isnan(v) ? Json(nullptr) : Json(v); };
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"trial", row.trial},
                    {"seed", row.seed},
                    {"section_norm", row.section_norm},
                    {"t_cert", row.t_cert},
                    {"ratio", row.ratio},
                    {"converged", row.converged}});
  }
  return {{"d", r.d},
          {"n", r.n},
          {"trials", r.trials},
          {"seed", r.seed},
          {"ensemble", r.ensemble},
          {"max_ratio", num(r.max_ratio)},
          {"median_ratio", num(r.median_ratio)},
          {"min_ratio", num(r.min_ratio)},
          {"nonconverged", r.nonconverged},
          {"rows", rows}};
}

void write_sweep_csv(const SweepReport& r, std::ostream& out) {
  out << "trial,seed,section_norm,t_cert,ratio\n";
  out << std::setprecision(17);
  for (const auto& row : r.rows) {
    out << row.trial << ',' << row.seed << ',' << row.section_norm << ',' << row.t_cert << ',' << row.ratio << '\n';
  }
}

}  // namespace gdh
