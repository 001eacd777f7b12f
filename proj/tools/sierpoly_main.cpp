#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sierpoly/boundary.hpp"
#include "sierpoly/construction.hpp"
#include "sierpoly/core.hpp"
#include "sierpoly/limit.hpp"
#include "sierpoly/metric.hpp"

namespace fs = std::filesystem;
using namespace sierpoly;

namespace {

// ---------------------------------------------------------------------------
// Result cache: keyed by FNV-1a of the normalized config, write-temp-rename.
// Purely an optimization; cached bytes are replayed verbatim.
// ---------------------------------------------------------------------------

std::string cache_dir_flag;

std::string cache_dir() {
  if (!cache_dir_flag.empty()) return cache_dir_flag;
  if (const char* env = std::getenv("SIERPOLY_CACHE")) return env;
  return {};
}

std::string fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::optional<std::string> cache_lookup(const std::string& key) {
  std::string dir = cache_dir();
  if (dir.empty()) return std::nullopt;
  fs::path p = fs::path(dir) / (key + ".json");
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void cache_store(const std::string& key, const std::string& payload) {
  std::string dir = cache_dir();
  if (dir.empty()) return;
  fs::create_directories(dir);
  fs::path p = fs::path(dir) / (key + ".json");
  fs::path tmp = fs::path(dir) / (key + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    out << payload;
  }
  fs::rename(tmp, p);
}

/// Run `fn` under the cache key derived from the normalized config.
int emit_cached(const nlohmann::json& config, const std::function<std::string()>& fn) {
  const std::string key = fnv1a(config.dump());
  if (auto hit = cache_lookup(key)) {
    std::cout << *hit;
    return 0;
  }
  std::string payload = fn();
  cache_store(key, payload);
  std::cout << payload;
  return 0;
}

struct Common {
  int r = 6;
  PolygonSpec spec() const { return make_spec(r); }
};

// ---------------------------------------------------------------------------
// Optional census emissions: profile matrix as CSV + heatmap SVG, defect
// tables as CSV. Deterministic contents.
// ---------------------------------------------------------------------------

void write_census_plots(const fs::path& dir, const CensusReport& rep) {
  const PolygonSpec& spec = rep.spec;
  fs::create_directories(dir);
  std::vector<std::pair<std::string, const HoroProfile*>> profs;
  profs.emplace_back(rep.up.profile_id, &rep.up.profile);
  profs.emplace_back(rep.down.profile_id, &rep.down.profile);
  profs.emplace_back(rep.antipodal.profile_id, &rep.antipodal.profile);
  for (const auto& cs : rep.shifted) profs.emplace_back(cs.profile_id, &cs.profile);

  {
    std::ofstream csv(dir / "profiles.csv", std::ios::binary);
    csv << "profile";
    for (const auto& p : rep.ball.ball.points) csv << "," << p.canonical.str(spec);
    csv << "\n";
    for (const auto& [id, h] : profs) {
      csv << id;
      for (Dist v : h->values) csv << "," << v;
      csv << "\n";
    }
  }

  {
    std::ofstream csv(dir / "defects.csv", std::ios::binary);
    csv << "probe,condition,threshold,s,t,y,defect\n";
    for (const auto& a : rep.antipodal.almost_failures)
      csv << "antipodal,almost," << a.n << "," << a.s << "," << a.t << ",," << a.defect
          << "\n";
    auto weakly_rows = [&](const std::string& id, const DefectReport& w) {
      for (const auto& [y, n] : w.witness_n)
        csv << id << ",weaklyN,," << "," << "," << y.canonical.str(spec) << "," << n
            << "\n";
      for (const auto& e : w.failures)
        csv << id << ",weakly,," << e.s << "," << e.t << ","
            << (e.y ? e.y->canonical.str(spec) : "") << "," << e.defect << "\n";
    };
    weakly_rows("antipodal", rep.antipodal.weakly);
    for (const auto& cs : rep.shifted) weakly_rows(cs.profile_id, cs.weakly);
  }

  {
    Dist lo = 0, hi = 0;
    for (const auto& [id, h] : profs)
      for (Dist v : h->values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    const int cell = 14, left = 110, top = 20;
    const int w = left + cell * static_cast<int>(rep.ball.ball.points.size()) + 10;
    const int h = top + cell * static_cast<int>(profs.size()) + 10;
    std::ofstream svg(dir / "profiles.svg", std::ios::binary);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
        << h << "\" font-family=\"monospace\" font-size=\"9\">\n";
    for (std::size_t i = 0; i < profs.size(); ++i) {
      svg << "<text x=\"2\" y=\"" << top + cell * (int(i) + 1) - 4 << "\">"
          << profs[i].first << "</text>\n";
      for (std::size_t j = 0; j < profs[i].second->values.size(); ++j) {
        Dist v = profs[i].second->values[j];
        int shade =
            hi == lo ? 128 : int(255.0 * double(v - lo) / double(hi - lo));
        svg << "<rect x=\"" << left + cell * int(j) << "\" y=\"" << top + cell * int(i)
            << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb("
            << shade << "," << shade << "," << 255 - shade << ")\"><title>"
            << profs[i].first << " @ " << rep.ball.ball.points[j].canonical.str(spec)
            << " = " << v << "</title></rect>\n";
      }
    }
    svg << "</svg>\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sierpinski polygon graphs: construction, distances, limits, boundary"};
  app.require_subcommand(1);
  app.add_option("--cache-dir", cache_dir_flag, "cache directory (or env SIERPOLY_CACHE)");

  Common common;

  // ----- build -----
  auto* build = app.add_subcommand("build", "materialize Gamma_k and export it");
  int build_k = 2;
  std::string build_format = "edgelist", build_out;
  build->add_option("--r", common.r, "polygon sides")->required();
  build->add_option("--k", build_k, "level")->required();
  build->add_option("--format", build_format, "edgelist|dot|graphml|json");
  build->add_option("--out", build_out, "output file (default stdout)");

  // ----- dist -----
  auto* dist = app.add_subcommand("dist", "exact distance between two vertices");
  int dist_k = 2;
  std::string dist_u, dist_v, dist_engine = "hier";
  dist->add_option("--r", common.r)->required();
  dist->add_option("--k", dist_k)->required();
  dist->add_option("u", dist_u, "first address")->required();
  dist->add_option("v", dist_v, "second address")->required();
  dist->add_option("--engine", dist_engine, "bfs|hier");

  // ----- ball -----
  auto* ballc = app.add_subcommand("ball", "pointed ball with ambient matrix");
  int ball_k = 2;
  std::string ball_center;
  std::int64_t ball_radius = 1;
  ballc->add_option("--r", common.r)->required();
  ballc->add_option("--k", ball_k)->required();
  ballc->add_option("--center", ball_center)->required();
  ballc->add_option("--radius", ball_radius)->required();

  // ----- gh -----
  auto* gh = app.add_subcommand("gh", "Gromov-Hausdorff stabilization certificate");
  std::string gh_xi, gh_mode = "heuristic";
  std::int64_t gh_radius = 3;
  gh->add_option("--r", common.r)->required();
  gh->add_option("--xi", gh_xi, "sequence, e.g. 1(54)*")->required();
  gh->add_option("--radius", gh_radius)->required();
  gh->add_option("--mode", gh_mode, "heuristic|certified");

  // ----- iso -----
  auto* iso = app.add_subcommand("iso", "isomorphism experiment for two sequences");
  std::string iso_xi, iso_eta;
  std::int64_t iso_max_radius = 4;
  iso->add_option("--r", common.r)->required();
  iso->add_option("--xi", iso_xi)->required();
  iso->add_option("--eta", iso_eta)->required();
  iso->add_option("--max-radius", iso_max_radius);

  // ----- equivariance -----
  auto* eq = app.add_subcommand("equivariance", "per-sigma dihedral action report");
  int eq_k = 2;
  eq->add_option("--r", common.r)->required();
  eq->add_option("--k", eq_k)->required();

  // ----- census -----
  auto* census = app.add_subcommand("census", "horofunction boundary census");
  std::string census_xi;
  CensusParams cp;
  census->add_option("--r", common.r)->required();
  census->add_option("--xi", census_xi, "eventually constant sequence")->required();
  census->add_option("--m-max", cp.m_max);
  census->add_option("--m-min", cp.m_min);
  census->add_option("--radius", cp.radius);
  census->add_option("--shift-min", cp.shift_min);
  census->add_option("--shift-max", cp.shift_max);
  census->add_option("--n-budget", cp.n_budget);
  std::string census_plot_dir;
  census->add_option("--plot-dir", census_plot_dir,
                     "emit profiles.csv/defects.csv/profiles.svg here (bypasses the cache)");

  // ----- cache-clear -----
  auto* cc = app.add_subcommand("cache-clear", "remove all cached results");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      PolygonSpec spec = common.spec();
      LevelGraph g = build_level_graph(spec, build_k, GraphMode::Materialized);
      std::ostringstream body;
      if (build_format == "edgelist")
        write_edge_list(body, g);
      else if (build_format == "dot")
        write_dot(body, g);
      else if (build_format == "graphml")
        write_graphml(body, g);
      else if (build_format == "json")
        body << graph_json(g);
      else
        throw Error("unknown format: " + build_format);
      if (build_out.empty()) {
        std::cout << body.str();
      } else {
        std::ofstream out(build_out, std::ios::binary);
        out << body.str();
        nlohmann::json doc{{"schemaVersion", 1},
                           {"written", build_out},
                           {"vertices", g.vertex_count()},
                           {"edges", g.edge_count()}};
        std::cout << doc.dump(2) << "\n";
      }
      return 0;
    }

    if (dist->parsed()) {
      PolygonSpec spec = common.spec();
      Address u = Address::parse(dist_u, spec);
      Address v = Address::parse(dist_v, spec);
      validate_address(spec, u);
      validate_address(spec, v);
      if (static_cast<int>(u.size()) != dist_k || static_cast<int>(v.size()) != dist_k)
        throw Error("addresses must have length k");
      Dist d;
      if (dist_engine == "hier") {
        DistanceOracle oracle(spec);
        d = oracle.dist(dist_k, u, v);
      } else if (dist_engine == "bfs") {
        LevelGraph g(spec, dist_k, GraphMode::Implicit);
        DistMap m = bfs_dist(g, canonical(spec, u));
        d = m.at(canonical(spec, v).canonical);
      } else {
        throw Error("unknown engine: " + dist_engine);
      }
      std::cout << d << "\n";
      return 0;
    }

    if (ballc->parsed()) {
      PolygonSpec spec = common.spec();
      nlohmann::json config{{"cmd", "ball"}, {"r", common.r}, {"k", ball_k},
                            {"center", ball_center}, {"radius", ball_radius}};
      return emit_cached(config, [&] {
        Address c = Address::parse(ball_center, spec);
        LevelGraph g(spec, ball_k, GraphMode::Implicit);
        DistanceOracle oracle(spec);
        return ball_json(spec, ball(g, canonical(spec, c), ball_radius, &oracle));
      });
    }

    if (gh->parsed()) {
      PolygonSpec spec = common.spec();
      nlohmann::json config{{"cmd", "gh"}, {"r", common.r}, {"xi", gh_xi},
                            {"radius", gh_radius}, {"mode", gh_mode}};
      return emit_cached(config, [&] {
        BasepointSeq xi = BasepointSeq::parse(gh_xi, spec);
        CertMode mode = gh_mode == "certified" ? CertMode::Certified : CertMode::Heuristic;
        return certificate_json(spec, stabilization_level(spec, xi, gh_radius, mode));
      });
    }

    if (iso->parsed()) {
      PolygonSpec spec = common.spec();
      nlohmann::json config{{"cmd", "iso"}, {"r", common.r}, {"xi", iso_xi},
                            {"eta", iso_eta}, {"maxRadius", iso_max_radius}};
      return emit_cached(config, [&] {
        BasepointSeq xi = BasepointSeq::parse(iso_xi, spec);
        BasepointSeq eta = BasepointSeq::parse(iso_eta, spec);
        return iso_verdict_json(spec, iso_check_theorem(spec, xi, eta, iso_max_radius));
      });
    }

    if (eq->parsed()) {
      PolygonSpec spec = common.spec();
      nlohmann::json config{{"cmd", "equivariance"}, {"r", common.r}, {"k", eq_k}};
      return emit_cached(config, [&] {
        return equivariance_json(spec, dihedral_equivariance_check(spec, eq_k));
      });
    }

    if (census->parsed()) {
      PolygonSpec spec = common.spec();
      if (!census_plot_dir.empty()) {
        BasepointSeq xi = BasepointSeq::parse(census_xi, spec);
        CensusReport rep = boundary_census(spec, xi, cp);
        write_census_plots(census_plot_dir, rep);
        std::cout << census_json(rep);
        return 0;
      }
      nlohmann::json config{{"cmd", "census"}, {"r", common.r}, {"xi", census_xi},
                            {"mMin", cp.m_min}, {"mMax", cp.m_max},
                            {"radius", cp.radius}, {"shiftMin", cp.shift_min},
                            {"shiftMax", cp.shift_max}, {"nBudget", cp.n_budget}};
      return emit_cached(config, [&] {
        BasepointSeq xi = BasepointSeq::parse(census_xi, spec);
        return census_json(boundary_census(spec, xi, cp));
      });
    }

    if (cc->parsed()) {
      std::string dir = cache_dir();
      std::size_t removed = 0;
      if (!dir.empty() && fs::exists(dir))
        for (const auto& e : fs::directory_iterator(dir))
          if (e.path().extension() == ".json") {
            fs::remove(e.path());
            ++removed;
          }
      nlohmann::json doc{{"schemaVersion", 1}, {"removed", removed}};
      std::cout << doc.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
