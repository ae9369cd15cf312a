#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridgen/errors.hpp"
#include "gridgen/graph.hpp"
#include "gridgen/ingest.hpp"
#include "gridgen/metrics.hpp"
#include "gridgen/mixture.hpp"

namespace gridgen {
namespace detail {

// Shortest representation that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  if (back == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char probe[40];
      std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
      std::sscanf(probe, "%lf", &back);
      if (back == v) return probe;
    }
  }
  return buf;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// One CSV record; handles double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw input_error("");
    return v;
  } catch (...) {
    throw input_error("cannot parse " + what + " from '" + s + "'");
  }
}

inline long long parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw input_error("");
    return v;
  } catch (...) {
    throw input_error("cannot parse " + what + " from '" + s + "'");
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline games
  if (!out) throw input_error("cannot open '" + path + "' for writing");
  return out;
}

// "lon lat, lon lat, ..." -> points
inline std::vector<GeoPoint> parse_coord_list(const std::string& body, const std::string& what) {
  std::vector<GeoPoint> pts;
  std::stringstream ss(body);
  std::string pair;
  while (std::getline(ss, pair, ',')) {
    std::stringstream ps(pair);
    GeoPoint p;
    if (!(ps >> p.lon >> p.lat)) throw input_error("bad coordinate pair in " + what + ": '" + pair + "'");
    std::string extra;
    if (ps >> extra) throw input_error("trailing token in " + what + ": '" + pair + "'");
    validate(p);
    pts.push_back(p);
  }
  if (pts.empty()) throw input_error(what + " has no coordinates");
  return pts;
}

}  // namespace detail

// --- lines file: CSV `id,voltage_class,wkt`, wkt = LINESTRING(lon lat, ...) ---

inline std::vector<GeoPoint> parse_wkt_linestring(const std::string& wkt) {
  const std::string t = detail::trim(wkt);
  if (t.rfind("LINESTRING", 0) != 0) throw input_error("expected LINESTRING, got '" + t + "'");
  const std::size_t open = t.find('(');
  const std::size_t close = t.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close <= open)
    throw input_error("malformed LINESTRING: '" + t + "'");
  auto pts = detail::parse_coord_list(t.substr(open + 1, close - open - 1), "LINESTRING");
  if (pts.size() < 2) throw input_error("LINESTRING needs at least 2 points");
  return pts;
}

inline std::vector<GeoPoint> parse_wkt_polygon_ring(const std::string& wkt) {
  const std::string t = detail::trim(wkt);
  if (t.rfind("POLYGON", 0) != 0) throw input_error("expected POLYGON, got '" + t + "'");
  const std::size_t open = t.find("((");
  const std::size_t close = t.rfind("))");
  if (open == std::string::npos || close == std::string::npos || close <= open)
    throw input_error("malformed POLYGON: '" + t + "'");
  return detail::parse_coord_list(t.substr(open + 2, close - open - 2), "POLYGON");
}

inline std::vector<LineRecord> read_lines_csv(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw input_error("'" + path + "' is empty");
  const auto header = detail::split_csv(line);
  if (header.size() < 3 || detail::trim(header[0]) != "id" ||
      detail::trim(header[1]) != "voltage_class" || detail::trim(header[2]) != "wkt")
    throw input_error("'" + path + "': expected header id,voltage_class,wkt");
  std::vector<LineRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() < 3)
      throw input_error("'" + path + "' line " + std::to_string(lineno) + ": expected 3 fields");
    LineRecord rec;
    rec.id = fields[0];
    rec.voltage_class = fields[1];
    rec.geometry = parse_wkt_linestring(fields[2]);
    out.push_back(std::move(rec));
  }
  return out;
}

// Region file: one POLYGON((...)) ring per line; first outer, rest holes.
inline RegionPolygon read_region_file(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  RegionPolygon poly;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    poly.rings.push_back(parse_wkt_polygon_ring(line));
  }
  validate(poly);
  return poly;
}

// --- graph CSVs: <prefix>.nodes.csv / <prefix>.edges.csv ---

inline std::string nodes_path(const std::string& prefix) { return prefix + ".nodes.csv"; }
inline std::string edges_path(const std::string& prefix) { return prefix + ".edges.csv"; }

inline void write_graph_csv(const SpatialGraph& g, const std::string& prefix) {
  {
    std::ofstream out = detail::open_output(nodes_path(prefix));
    out << "id,x_km,y_km,lon,lat\n";
    for (int i = 0; i < g.node_count(); ++i) {
      const GraphNode& nd = g.nodes[i];
      out << i << ',' << detail::format_double(nd.pos.x) << ',' << detail::format_double(nd.pos.y)
          << ',';
      if (nd.geo) out << detail::format_double(nd.geo->lon);
      out << ',';
      if (nd.geo) out << detail::format_double(nd.geo->lat);
      out << '\n';
    }
  }
  {
    std::ofstream out = detail::open_output(edges_path(prefix));
    out << "u,v,straight_km,actual_km,multiplicity\n";
    for (const GraphEdge& e : g.edges) {
      out << e.u << ',' << e.v << ','
          << detail::format_double(distance(g.nodes[e.u].pos, g.nodes[e.v].pos)) << ',';
      if (e.actual_km) out << detail::format_double(*e.actual_km);
      out << ',' << e.multiplicity << '\n';
    }
  }
}

inline SpatialGraph read_graph_csv(const std::string& prefix) {
  SpatialGraph g;
  {
    std::ifstream in = detail::open_input(nodes_path(prefix));
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "id,x_km,y_km,lon,lat")
      throw input_error("'" + nodes_path(prefix) + "': bad header");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::trim(line).empty()) continue;
      const auto f = detail::split_csv(line);
      if (f.size() != 5)
        throw input_error(nodes_path(prefix) + " line " + std::to_string(lineno) + ": expected 5 fields");
      if (detail::parse_int(f[0], "node id") != static_cast<long long>(g.nodes.size()))
        throw input_error(nodes_path(prefix) + ": node ids must be contiguous from 0");
      GraphNode nd;
      nd.pos.x = detail::parse_double(f[1], "x_km");
      nd.pos.y = detail::parse_double(f[2], "y_km");
      if (!f[3].empty() || !f[4].empty()) {
        GeoPoint geo{detail::parse_double(f[3], "lon"), detail::parse_double(f[4], "lat")};
        validate(geo);
        nd.geo = geo;
      }
      g.nodes.push_back(nd);
    }
  }
  {
    std::ifstream in = detail::open_input(edges_path(prefix));
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "u,v,straight_km,actual_km,multiplicity")
      throw input_error("'" + edges_path(prefix) + "': bad header");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::trim(line).empty()) continue;
      const auto f = detail::split_csv(line);
      if (f.size() != 5)
        throw input_error(edges_path(prefix) + " line " + std::to_string(lineno) + ": expected 5 fields");
      GraphEdge e;
      e.u = static_cast<int>(detail::parse_int(f[0], "u"));
      e.v = static_cast<int>(detail::parse_int(f[1], "v"));
      if (!f[3].empty()) e.actual_km = detail::parse_double(f[3], "actual_km");
      e.multiplicity = static_cast<int>(detail::parse_int(f[4], "multiplicity"));
      g.edges.push_back(e);
    }
  }
  bool any_geo = false;
  for (const GraphNode& nd : g.nodes) any_geo = any_geo || nd.geo.has_value();
  if (any_geo) {
    // projection center is not stored in the CSVs; mark as geographic-capable
    // only when every node carries coordinates
    for (const GraphNode& nd : g.nodes)
      if (!nd.geo) throw input_error(nodes_path(prefix) + ": mixed geographic coordinates");
  }
  validate(g);
  return g;
}

// --- model JSON ---

inline void write_model_json(const GmmModel& model, const std::string& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["c"] = model.component_count();
  j["weights"] = model.weights;
  nlohmann::json means = nlohmann::json::array();
  nlohmann::json covs = nlohmann::json::array();
  for (const Gaussian2& g : model.components) {
    means.push_back({g.mean_x, g.mean_y});
    covs.push_back({g.cov_xx, g.cov_xy, g.cov_yy});
  }
  j["means"] = means;
  j["covariances"] = covs;
  j["loglik"] = model.loglik;
  j["bic"] = model.bic;
  j["n_fit"] = model.n_fit;
  if (model.projection_center)
    j["projection_center"] = {{"lon", model.projection_center->lon},
                              {"lat", model.projection_center->lat}};
  else
    j["projection_center"] = nullptr;
  j["seed"] = model.seed;
  std::ofstream out = detail::open_output(path);
  out << j.dump(2) << '\n';
}

inline GmmModel read_model_json(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw input_error("'" + path + "': " + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1) throw input_error("unsupported model version");
    GmmModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    const auto& means = j.at("means");
    const auto& covs = j.at("covariances");
    if (means.size() != m.weights.size() || covs.size() != m.weights.size())
      throw input_error("model arrays have inconsistent lengths");
    if (static_cast<std::size_t>(j.at("c").get<int>()) != m.weights.size())
      throw input_error("model c does not match weight count");
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
      Gaussian2 g;
      g.mean_x = means[i].at(0).get<double>();
      g.mean_y = means[i].at(1).get<double>();
      g.cov_xx = covs[i].at(0).get<double>();
      g.cov_xy = covs[i].at(1).get<double>();
      g.cov_yy = covs[i].at(2).get<double>();
      m.components.push_back(g);
    }
    double wsum = 0.0;
    for (double w : m.weights) {
      if (!(w > 0.0)) throw input_error("model weight must be positive");
      wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-6)
      throw input_error("model weights sum to " + std::to_string(wsum) + ", expected 1");
    for (double& w : m.weights) w /= wsum;  // exact unit sum in memory
    m.loglik = j.at("loglik").get<double>();
    m.bic = j.at("bic").get<double>();
    m.n_fit = j.at("n_fit").get<int>();
    if (!j.at("projection_center").is_null()) {
      GeoPoint c{j["projection_center"].at("lon").get<double>(),
                 j["projection_center"].at("lat").get<double>()};
      validate(c);
      m.projection_center = c;
    }
    m.seed = j.at("seed").get<std::uint64_t>();
    validate(m);
    return m;
  } catch (const input_error&) {
    throw;
  } catch (const std::exception& e) {
    throw input_error("'" + path + "': " + e.what());
  }
}

// --- report JSON ---

inline nlohmann::json report_to_json(const MetricsReport& r, const ReportOptions& opts,
                                     const std::optional<std::string>& reference_id) {
  nlohmann::json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["component_count"] = r.component_count;
  j["avg_path_length"] = r.avg_path_length;
  j["apl_standard_error"] = r.apl_standard_error ? nlohmann::json(*r.apl_standard_error)
                                                 : nlohmann::json(nullptr);
  j["clustering"] = r.clustering;
  j["zeta"] = r.zeta ? nlohmann::json(*r.zeta) : nlohmann::json(nullptr);
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [d, cnt] : r.degrees.counts) hist.push_back({d, cnt});
  j["degree_histogram"] = hist;
  j["length_straight"] = {{"mean", r.straight.mean}, {"std", r.straight.stddev}, {"max", r.straight.max}};
  j["length_actual"] = r.actual ? nlohmann::json{{"mean", r.actual->mean},
                                                 {"std", r.actual->stddev},
                                                 {"max", r.actual->max}}
                                : nlohmann::json(nullptr);
  j["d_ks"] = r.d_ks ? nlohmann::json(*r.d_ks) : nlohmann::json(nullptr);
  j["d_kl"] = r.d_kl ? nlohmann::json(*r.d_kl) : nlohmann::json(nullptr);
  j["options"] = {{"min_degree", opts.min_degree},
                  {"k_kl", opts.k_kl},
                  {"apl_mode", opts.apl.sample_sources
                                   ? "sampled:" + std::to_string(*opts.apl.sample_sources)
                                   : "exact"},
                  {"seed", opts.apl.seed}};
  j["reference_id"] = reference_id ? nlohmann::json(*reference_id) : nlohmann::json(nullptr);
  return j;
}

inline void write_report_json(const MetricsReport& r, const ReportOptions& opts,
                              const std::optional<std::string>& reference_id,
                              const std::string& path) {
  std::ofstream out = detail::open_output(path);
  out << report_to_json(r, opts, reference_id).dump(2) << '\n';
}

}  // namespace gridgen
