#pragma once

#include <json.hpp>

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "capkit/bergman.hpp"
#include "capkit/chain.hpp"
#include "capkit/error.hpp"
#include "capkit/geometry.hpp"
#include "capkit/green.hpp"
#include "capkit/numerics.hpp"

namespace capkit {

inline constexpr std::string_view tool_version = "0.1.0";

namespace io {

using json = nlohmann::ordered_json;

using DomainSpec = std::variant<PlanarDomain, MultiDomain>;

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(Errc::ParseError, "complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<cplx> complex_list_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::ParseError, "expected an array of [re, im] pairs");
  std::vector<cplx> out;
  for (const auto& e : j) out.push_back(complex_from_json(e));
  return out;
}

inline json complex_list_to_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (cplx z : v) out.push_back(complex_to_json(z));
  return out;
}

namespace detail {

inline const json& field(const json& j, const char* name) {
  if (!j.contains(name)) throw Error(Errc::ParseError, std::string("domain spec is missing \"") + name + "\"");
  return j.at(name);
}

inline double number(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number()) throw Error(Errc::ParseError, std::string("\"") + name + "\" must be a number");
  return v.get<double>();
}

}  // namespace detail

// {"kind": ..., parameters}; complex numbers as [re, im].
inline DomainSpec domain_from_json(const json& j) {
  using detail::field;
  using detail::number;
  if (!j.is_object()) throw Error(Errc::ParseError, "domain spec must be a JSON object");
  const json& kind_field = field(j, "kind");
  if (!kind_field.is_string()) throw Error(Errc::ParseError, "\"kind\" must be a string");
  const std::string kind = kind_field.get<std::string>();
  if (kind == "disc") return PlanarDomain::disc(complex_from_json(field(j, "center")), number(j, "radius"));
  if (kind == "annulus")
    return PlanarDomain::annulus(complex_from_json(field(j, "center")), number(j, "inner"), number(j, "outer"));
  if (kind == "ellipse")
    return PlanarDomain::ellipse(complex_from_json(field(j, "center")), number(j, "a"), number(j, "b"),
                                 j.contains("angle") ? number(j, "angle") : 0.0);
  if (kind == "polygon") return PlanarDomain::polygon(complex_list_from_json(field(j, "vertices")));
  if (kind == "fourier") return PlanarDomain::fourier(complex_list_from_json(field(j, "coefficients")));
  if (kind == "ball") return MultiDomain::ball(complex_list_from_json(field(j, "center")), number(j, "radius"));
  if (kind == "polydisc") {
    const json& radii = field(j, "radii");
    if (!radii.is_array()) throw Error(Errc::ParseError, "\"radii\" must be an array");
    std::vector<double> r;
    for (const auto& e : radii) {
      if (!e.is_number()) throw Error(Errc::ParseError, "\"radii\" entries must be numbers");
      r.push_back(e.get<double>());
    }
    return MultiDomain::polydisc(complex_list_from_json(field(j, "center")), std::move(r));
  }
  throw Error(Errc::ParseError, "unknown domain kind \"" + kind + "\"");
}

inline DomainSpec parse_domain_spec(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("malformed JSON: ") + e.what());
  }
  return domain_from_json(j);
}

inline json domain_to_json(const PlanarDomain& domain) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disc>) {
          return {{"kind", "disc"}, {"center", complex_to_json(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Annulus>) {
          return {{"kind", "annulus"}, {"center", complex_to_json(s.center)}, {"inner", s.inner}, {"outer", s.outer}};
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          return {{"kind", "ellipse"}, {"center", complex_to_json(s.center)}, {"a", s.a}, {"b", s.b}, {"angle", s.angle}};
        } else if constexpr (std::is_same_v<T, Polygon>) {
          return {{"kind", "polygon"}, {"vertices", complex_list_to_json(s.vertices)}};
        } else {
          return {{"kind", "fourier"}, {"coefficients", complex_list_to_json(s.coefficients)}};
        }
      },
      domain.shape());
}

inline json domain_to_json(const MultiDomain& domain) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return {{"kind", "ball"}, {"center", complex_list_to_json(s.center)}, {"radius", s.radius}};
        } else {
          return {{"kind", "polydisc"}, {"center", complex_list_to_json(s.center)}, {"radii", s.radii}};
        }
      },
      domain.shape());
}

inline json domain_to_json(const DomainSpec& spec) {
  return std::visit([](const auto& d) { return domain_to_json(d); }, spec);
}

// Audit block embedded in every report.
struct RunInfo {
  std::string command;
  std::uint64_t seed = 1;
  json config = json::object();  // every setting that influences the numbers
  double defect_tolerance = 0.0;
  double equality_tolerance = 0.0;

  std::uint64_t config_hash() const { return numerics::fnv1a(config.dump()); }

  std::string hash_hex() const {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash()));
    return buf;
  }

  json to_json() const {
    return {{"tool_version", tool_version},
            {"command", command},
            {"config_hash", hash_hex()},
            {"seed", seed},
            {"tolerances", {{"defect", defect_tolerance}, {"equality", equality_tolerance}}},
            {"config", config}};
  }

  // CSV preamble: one "# key: value" line per audit field.
  std::string csv_preamble() const {
    std::ostringstream os;
    os << "# tool_version: " << tool_version << '\n'
       << "# command: " << command << '\n'
       << "# config_hash: " << hash_hex() << '\n'
       << "# seed: " << seed << '\n'
       << "# tolerance_defect: " << numerics::format17(defect_tolerance) << '\n'
       << "# tolerance_equality: " << numerics::format17(equality_tolerance) << '\n';
    return os.str();
  }
};

inline json solver_config_to_json(const SolverConfig& c) {
  return {{"collocation_nodes", c.collocation_nodes}, {"source_offset", c.source_offset},
          {"validation_nodes", c.validation_nodes},   {"level_grid", c.level_grid},
          {"mc_samples", c.mc_samples},               {"seed", c.seed},
          {"defect_tolerance", c.defect_tolerance},   {"equality_tolerance", c.equality_tolerance}};
}

inline json chain_config_to_json(const ChainConfig& c) {
  json j = solver_config_to_json(c.solver);
  j["bergman_degree"] = c.bergman_degree;
  j["quadrature_resolution"] = c.quadrature_resolution;
  return j;
}

inline json chain_to_json(const ChainReport& r) {
  json values = json::object(), tolerances = json::object(), links = json::array();
  for (int i = 0; i < 6; ++i) {
    values[std::string(chain_value_names[i])] = r.values[i];
    tolerances[std::string(chain_value_names[i])] = r.tolerances[i];
  }
  for (int k = 0; k < 5; ++k) {
    const ChainLink& l = r.links[k];
    links.push_back({{"link", chain_link_names[k]},
                     {"gap", l.gap},
                     {"tolerance", l.tolerance},
                     {"equal", l.equal},
                     {"ambiguous", l.ambiguous},
                     {"holds", l.holds}});
  }
  return {{"point", complex_to_json(r.z)},
          {"t1", r.t1},
          {"t2", r.t2},
          {"values", values},
          {"value_tolerances", tolerances},
          {"links", links},
          {"equality_tolerance", r.equality_tolerance},
          {"verdict", to_string(r.verdict)},
          {"capacity_distance_gap", r.capacity_distance_gap},
          {"f_near_constant", r.f_near_constant},
          {"kernel_converged", r.kernel_converged},
          {"levels_reliable", r.levels_reliable},
          {"green_residual", r.green_residual},
          {"bergman_degree", r.bergman_degree}};
}

inline json chain_report_document(const ChainReport& r, const json& domain, const RunInfo& info) {
  json doc = {{"schema", "capkit.chain/1"}, {"ndim", 1}};
  doc.update(info.to_json());
  doc["domain"] = domain;
  doc["report"] = chain_to_json(r);
  return doc;
}

inline const char* csv_profile_header = "t,vol,sigma,flux,f,dvol_dt,vol_mc,vol_mc_stderr";

inline std::string profile_csv(const SublevelProfile& p, const RunInfo& info) {
  std::ostringstream os;
  os << info.csv_preamble() << "# pole: " << numerics::format17(p.pole.real()) << ' '
     << numerics::format17(p.pole.imag()) << '\n'
     << "# grid_resolution: " << p.grid_resolution << '\n'
     << "# mc_samples: " << p.mc_samples << '\n'
     << csv_profile_header << '\n';
  using numerics::format17;
  for (const auto& l : p.levels) {
    os << format17(l.t) << ',' << format17(l.volume) << ',' << format17(l.sigma) << ',' << format17(l.flux) << ','
       << format17(l.f) << ',' << format17(l.dvol_dt) << ',' << format17(l.vol_mc) << ','
       << format17(l.vol_mc_stderr) << '\n';
  }
  return os.str();
}

// Flattened chain row for sweep aggregation.
inline std::string chain_csv_header() {
  std::string h = "point_index,re,im,t1,t2";
  for (auto n : chain_value_names) h += "," + std::string(n);
  for (auto n : chain_value_names) h += ",tol_" + std::string(n);
  for (auto n : chain_link_names) h += ",gap_" + std::string(n);
  for (auto n : chain_link_names) h += ",equal_" + std::string(n);
  h += ",verdict";
  return h;
}

inline std::string chain_csv_row(std::size_t index, const ChainReport& r) {
  using numerics::format17;
  std::string row = std::to_string(index) + "," + format17(r.z.real()) + "," + format17(r.z.imag()) + "," +
                    format17(r.t1) + "," + format17(r.t2);
  for (double v : r.values) row += "," + format17(v);
  for (double v : r.tolerances) row += "," + format17(v);
  for (const auto& l : r.links) row += "," + format17(l.gap);
  for (const auto& l : r.links) row += std::string(",") + (l.equal ? "1" : "0");
  row += "," + std::string(to_string(r.verdict));
  return row;
}

// Bergman model dump: enough to re-evaluate K without rebuilding.
inline json model_to_json(const BergmanModel& m) {
  json steps = json::array();
  for (const auto& s : m.steps()) {
    steps.push_back({{"op", static_cast<int>(s.op)},
                     {"source", s.source},
                     {"degree", s.degree},
                     {"norm", s.norm},
                     {"coeffs", complex_list_to_json(s.coeffs)}});
  }
  return {{"schema", "capkit.bergman-model/1"},
          {"domain", domain_to_json(m.domain())},
          {"center", complex_to_json(m.center())},
          {"hole_center", m.hole_center() ? complex_to_json(*m.hole_center()) : json(nullptr)},
          {"degree", m.degree()},
          {"gram_defect", m.gram_defect()},
          {"quadrature",
           {{"scheme", m.quadrature_scheme()},
            {"resolution", m.quadrature_resolution()},
            {"nodes", m.quadrature_nodes()},
            {"weight_sum", m.quadrature_weight_sum()}}},
          {"steps", steps}};
}

inline BergmanModel model_from_json(const json& j) {
  try {
    auto spec = domain_from_json(j.at("domain"));
    auto* domain = std::get_if<PlanarDomain>(&spec);
    if (!domain) throw Error(Errc::ParseError, "model domain must be planar");
    const int degree = j.at("degree").get<int>();
    std::vector<BasisStep> steps;
    for (const auto& s : j.at("steps")) {
      BasisStep b;
      const int op = s.at("op").get<int>();
      if (op < 0 || op > 2) throw Error(Errc::ParseError, "unknown basis step op");
      b.op = static_cast<BasisStep::Op>(op);
      b.source = s.at("source").get<int>();
      b.degree = s.at("degree").get<int>();
      if (b.degree < 0 || b.degree > degree) throw Error(Errc::ParseError, "basis step degree out of range");
      b.norm = s.at("norm").get<double>();
      b.coeffs = complex_list_from_json(s.at("coeffs"));
      if (b.source < 0 || static_cast<std::size_t>(b.source) >= steps.size() + (op == 0 ? 1 : 0) ||
          b.coeffs.size() > steps.size())
        throw Error(Errc::ParseError, "basis step references a later basis function");
      steps.push_back(std::move(b));
    }
    std::optional<cplx> hole;
    if (!j.at("hole_center").is_null()) hole = complex_from_json(j.at("hole_center"));
    for (const auto& b : steps)
      if (b.op == BasisStep::DivideHole && !hole) throw Error(Errc::ParseError, "Laurent step without a hole centre");
    const json& q = j.at("quadrature");
    return BergmanModel(*domain, complex_from_json(j.at("center")), hole, degree, std::move(steps),
                        j.at("gram_defect").get<double>(), q.at("scheme").get<std::string>(),
                        q.at("resolution").get<int>(), q.at("nodes").get<std::size_t>(),
                        q.at("weight_sum").get<double>());
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("malformed model dump: ") + e.what());
  }
}

}  // namespace io
}  // namespace capkit
