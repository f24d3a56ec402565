#pragma once

// Disk formats for reproducible experiments. Config files are key=value text
// with hard errors on unknown keys; snapshots are a small text header plus the
// raw float64 payload, so a write/read cycle is bit-identical on one platform;
// time series go to JSON lines (appendable mid-run) and certificates to JSON.

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hmflow/core.hpp"
#include "hmflow/corpus.hpp"
#include "hmflow/equivariant.hpp"
#include "hmflow/flow.hpp"
#include "hmflow/gaussian.hpp"
#include "hmflow/inequality.hpp"

namespace hmflow {

// ---------------------------------------------------------------------------
// Experiment configs

struct ExperimentSpec {
  FlowConfig flow;            // effective values, defaults already applied
  CorpusMember init;          // the map or profile to evolve
  std::string geometry = "2d";  // "2d" full grid, "radial" equivariant reduction
  double stop_scale = 1e-3;   // radial concentration stop, in units of the domain
  double dt_max = 0.0;        // radial step cap; 0 picks the gradient-limited step

  ExperimentSpec() : flow(Grid(8.0, 257)) {}
};

inline MemberKind parse_kind(const std::string& s) {
  if (s == "constant") return MemberKind::Constant;
  if (s == "bubble") return MemberKind::Bubble;
  if (s == "perturbed") return MemberKind::PerturbedBubble;
  if (s == "random") return MemberKind::RandomField;
  if (s == "equivariant") return MemberKind::Equivariant;
  throw std::invalid_argument("config: unknown init.kind '" + s + "'");
}

// Builds the reduced initial data for a radial run from an equivariant spec.
inline RadialProfile radial_initial(const CorpusMember& init, double L) {
  if (init.kind != MemberKind::Equivariant)
    throw std::invalid_argument("radial geometry needs init.kind = equivariant");
  return init.turn > 0.0 ? boundary_turn_profile(radial_nodes(L), init.lambda, init.turn)
                         : harmonic_profile(radial_nodes(L), init.m, init.lambda);
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: key '" + key + "' needs a number, got '" + v + "'");
  return x;
}

inline long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: key '" + key + "' needs an integer, got '" + v + "'");
  return x;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: key '" + key + "' needs an integer, got '" + v + "'");
  return x;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

}  // namespace detail

// Parses key=value text. '#' starts a comment, unknown or repeated keys are
// hard errors, and the result carries every default filled in, so echoing and
// re-parsing reproduces the identical experiment.
inline ExperimentSpec parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string val = detail::trim(line.substr(eq + 1));
    if (!kv.emplace(key, val).second)
      throw std::invalid_argument("config: key '" + key + "' given twice");
  }

  static const char* known[] = {
      "geometry",       "grid.L",        "grid.N",      "flow.dt_safety",
      "flow.dt_max",    "flow.t_end",    "flow.T1",     "flow.R",
      "flow.E0",        "flow.stride",   "flow.stop_scale", "flow.snapshots",
      "init.kind",      "init.degree",   "init.lambda", "init.center.x",
      "init.center.y",  "init.rot",      "init.amplitude", "init.mode",
      "init.seed",      "init.m",        "init.turn"};
  for (const auto& [key, val] : kv) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("config: unknown key '" + key + "'");
  }

  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  double L = 8.0;
  long N = 257;
  if (const std::string* v = get("grid.L")) L = detail::parse_double("grid.L", *v);
  if (const std::string* v = get("grid.N")) N = detail::parse_int("grid.N", *v);

  ExperimentSpec spec;
  spec.flow = FlowConfig(Grid(L, static_cast<int>(N)));
  if (const std::string* v = get("geometry")) {
    if (*v != "2d" && *v != "radial")
      throw std::invalid_argument("config: geometry must be 2d or radial, got '" + *v + "'");
    spec.geometry = *v;
  }
  if (const std::string* v = get("flow.dt_safety"))
    spec.flow.dt_safety = detail::parse_double("flow.dt_safety", *v);
  if (const std::string* v = get("flow.dt_max"))
    spec.dt_max = detail::parse_double("flow.dt_max", *v);
  if (const std::string* v = get("flow.t_end"))
    spec.flow.t_end = detail::parse_double("flow.t_end", *v);
  if (const std::string* v = get("flow.T1")) spec.flow.T1 = detail::parse_double("flow.T1", *v);
  if (const std::string* v = get("flow.R")) spec.flow.R = detail::parse_double("flow.R", *v);
  if (const std::string* v = get("flow.E0")) spec.flow.E0 = detail::parse_double("flow.E0", *v);
  if (const std::string* v = get("flow.stride"))
    spec.flow.diagnostic_stride = static_cast<int>(detail::parse_int("flow.stride", *v));
  if (const std::string* v = get("flow.stop_scale"))
    spec.stop_scale = detail::parse_double("flow.stop_scale", *v);
  if (const std::string* v = get("flow.snapshots"))
    spec.flow.snapshot_times = detail::parse_list("flow.snapshots", *v);

  const std::string* kind = get("init.kind");
  if (!kind) throw std::invalid_argument("config: init.kind is required");
  spec.init.kind = parse_kind(*kind);
  spec.init.name = *kind;
  spec.init.degree = 1;
  spec.init.lambda = 0.1;
  spec.init.m = 1;
  if (const std::string* v = get("init.degree"))
    spec.init.degree = static_cast<int>(detail::parse_int("init.degree", *v));
  if (const std::string* v = get("init.lambda"))
    spec.init.lambda = detail::parse_double("init.lambda", *v);
  if (const std::string* v = get("init.center.x"))
    spec.init.center.x = detail::parse_double("init.center.x", *v);
  if (const std::string* v = get("init.center.y"))
    spec.init.center.y = detail::parse_double("init.center.y", *v);
  if (const std::string* v = get("init.rot"))
    spec.init.rot_angle = detail::parse_double("init.rot", *v);
  if (const std::string* v = get("init.amplitude"))
    spec.init.amplitude = detail::parse_double("init.amplitude", *v);
  if (const std::string* v = get("init.mode"))
    spec.init.mode = static_cast<int>(detail::parse_int("init.mode", *v));
  if (const std::string* v = get("init.seed")) spec.init.seed = detail::parse_u64("init.seed", *v);
  if (const std::string* v = get("init.m"))
    spec.init.m = static_cast<int>(detail::parse_int("init.m", *v));
  if (const std::string* v = get("init.turn"))
    spec.init.turn = detail::parse_double("init.turn", *v);

  spec.flow = spec.flow.validated();
  if (spec.geometry == "radial" && spec.init.kind != MemberKind::Equivariant)
    throw std::invalid_argument("config: radial geometry needs init.kind = equivariant");
  return spec;
}

inline ExperimentSpec parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("parse_config: cannot open " + path);
  std::ostringstream body;
  body << f.rdbuf();
  return parse_config_text(body.str());
}

// Canonical text for a parsed experiment: every key, defaults included, in a
// fixed order with round-trip float formatting.
inline std::string echo_config(const ExperimentSpec& spec) {
  std::ostringstream out;
  auto num = [](double v) { return detail::num_str(v); };
  out << "geometry = " << spec.geometry << "\n";
  out << "grid.L = " << num(spec.flow.grid.L) << "\n";
  out << "grid.N = " << spec.flow.grid.N << "\n";
  out << "flow.dt_safety = " << num(spec.flow.dt_safety) << "\n";
  out << "flow.dt_max = " << num(spec.dt_max) << "\n";
  out << "flow.t_end = " << num(spec.flow.t_end) << "\n";
  out << "flow.T1 = " << num(spec.flow.T1) << "\n";
  out << "flow.R = " << num(spec.flow.R) << "\n";
  out << "flow.E0 = " << num(spec.flow.E0) << "\n";
  out << "flow.stride = " << spec.flow.diagnostic_stride << "\n";
  out << "flow.stop_scale = " << num(spec.stop_scale) << "\n";
  out << "flow.snapshots = ";
  for (std::size_t k = 0; k < spec.flow.snapshot_times.size(); ++k)
    out << (k ? "," : "") << num(spec.flow.snapshot_times[k]);
  out << "\n";
  out << "init.kind = " << to_string(spec.init.kind) << "\n";
  out << "init.degree = " << spec.init.degree << "\n";
  out << "init.lambda = " << num(spec.init.lambda) << "\n";
  out << "init.center.x = " << num(spec.init.center.x) << "\n";
  out << "init.center.y = " << num(spec.init.center.y) << "\n";
  out << "init.rot = " << num(spec.init.rot_angle) << "\n";
  out << "init.amplitude = " << num(spec.init.amplitude) << "\n";
  out << "init.mode = " << spec.init.mode << "\n";
  out << "init.seed = " << spec.init.seed << "\n";
  out << "init.m = " << spec.init.m << "\n";
  out << "init.turn = " << num(spec.init.turn) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Snapshot files: text header, raw little-endian float64 payload

inline void write_field(const std::string& path, const SphereField& u) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_field: cannot open " + path);
  f << "sfld 1\n";
  f << "L " << detail::num_str(u.grid.L) << "\n";
  f << "N " << u.grid.N << "\n";
  f << "boundary " << detail::num_str(u.boundary_value.x) << " "
    << detail::num_str(u.boundary_value.y) << " " << detail::num_str(u.boundary_value.z)
    << "\n";
  for (const auto& [k, v] : u.meta) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
      throw std::invalid_argument("write_field: meta entries must be single-line");
    f << "meta " << k << "=" << v << "\n";
  }
  f << "data\n";
  f.write(reinterpret_cast<const char*>(u.a.data()),
          static_cast<std::streamsize>(u.a.size() * sizeof(double)));
  if (!f) throw std::runtime_error("write_field: short write to " + path);
}

inline SphereField read_field(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_field: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != "sfld 1")
    throw std::runtime_error("read_field: " + path + " is not an sfld v1 file");

  double L = 0;
  int N = 0;
  Vec3 boundary{0, 0, 1};
  std::map<std::string, std::string> meta;
  while (std::getline(f, line)) {
    if (line == "data") break;
    std::istringstream in(line);
    std::string tag;
    in >> tag;
    if (tag == "L") {
      in >> L;
    } else if (tag == "N") {
      in >> N;
    } else if (tag == "boundary") {
      in >> boundary.x >> boundary.y >> boundary.z;
    } else if (tag == "meta") {
      std::string rest = line.substr(5);
      std::size_t eq = rest.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("read_field: malformed meta line in " + path);
      meta[rest.substr(0, eq)] = rest.substr(eq + 1);
    } else {
      throw std::runtime_error("read_field: unknown header line '" + line + "' in " + path);
    }
    if (in.fail()) throw std::runtime_error("read_field: malformed header in " + path);
  }

  SphereField u ((Grid(L, N)));
  u.boundary_value = boundary;
  u.meta = std::move(meta);
  f.read(reinterpret_cast<char*>(u.a.data()),
         static_cast<std::streamsize>(u.a.size() * sizeof(double)));
  if (f.gcount() != static_cast<std::streamsize>(u.a.size() * sizeof(double)))
    throw std::runtime_error("read_field: truncated payload in " + path);
  return u;
}

// Radial profile files: all-text, one "r h" pair per line.
inline void write_profile(const std::string& path, const RadialProfile& p,
                          double t = -1.0) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_profile: cannot open " + path);
  f << "rprof 1\n";
  f << "m " << p.m << "\n";
  f << "n " << p.n() << "\n";
  if (t >= 0.0) f << "t " << detail::num_str(t) << "\n";
  f << "data\n";
  for (int k = 0; k < p.n(); ++k)
    f << detail::num_str(p.r[k]) << " " << detail::num_str(p.h[k]) << "\n";
}

inline RadialProfile read_profile(const std::string& path, double* t_out = nullptr) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_profile: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != "rprof 1")
    throw std::runtime_error("read_profile: " + path + " is not an rprof v1 file");
  RadialProfile p;
  int n = 0;
  if (t_out) *t_out = -1.0;
  while (std::getline(f, line)) {
    if (line == "data") break;
    std::istringstream in(line);
    std::string tag;
    in >> tag;
    if (tag == "m")
      in >> p.m;
    else if (tag == "n")
      in >> n;
    else if (tag == "t") {
      double t;
      in >> t;
      if (t_out) *t_out = t;
    } else
      throw std::runtime_error("read_profile: unknown header line '" + line + "'");
    if (in.fail()) throw std::runtime_error("read_profile: malformed header in " + path);
  }
  p.r.reserve(n);
  p.h.reserve(n);
  double r, h;
  while (f >> r >> h) {
    p.r.push_back(r);
    p.h.push_back(h);
  }
  if (static_cast<int>(p.r.size()) != n)
    throw std::runtime_error("read_profile: expected " + std::to_string(n) + " rows in " + path);
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// JSON series

inline nlohmann::json to_json(const DiagnosticRecord& r) {
  nlohmann::json j{{"t", r.t},
                   {"tau", r.tau},
                   {"Phi", r.Phi},
                   {"Psi", r.Psi},
                   {"norm_That", r.norm_That},
                   {"norm_T", r.norm_T},
                   {"norm_rdu", r.norm_rdu},
                   {"norm_rThat", r.norm_rThat},
                   {"phi", r.phi},
                   {"psi", r.psi},
                   {"delta", r.delta},
                   {"eta", r.eta},
                   {"s", r.s},
                   {"flagged", r.flagged},
                   {"near_stop", r.near_stop}};
  nlohmann::json ann = nlohmann::json::array();
  for (const auto& a : r.annulus_energies) ann.push_back({a[0], a[1], a[2]});
  j["annuli"] = ann;
  return j;
}

inline DiagnosticRecord record_from_json(const nlohmann::json& j) {
  DiagnosticRecord r;
  r.t = j.at("t");
  r.tau = j.at("tau");
  r.Phi = j.at("Phi");
  r.Psi = j.at("Psi");
  r.norm_That = j.at("norm_That");
  r.norm_T = j.at("norm_T");
  r.norm_rdu = j.at("norm_rdu");
  r.norm_rThat = j.at("norm_rThat");
  r.phi = j.at("phi");
  r.psi = j.at("psi");
  r.delta = j.at("delta");
  r.eta = j.at("eta");
  r.s = j.at("s");
  r.flagged = j.at("flagged");
  r.near_stop = j.at("near_stop");
  for (const auto& a : j.at("annuli"))
    r.annulus_energies.push_back({a.at(0).get<double>(), a.at(1).get<double>(),
                                  a.at(2).get<double>()});
  return r;
}

inline void write_records(const std::string& path, const std::vector<DiagnosticRecord>& recs) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_records: cannot open " + path);
  for (const DiagnosticRecord& r : recs) f << to_json(r).dump() << "\n";
}

inline std::vector<DiagnosticRecord> read_records(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_records: cannot open " + path);
  std::vector<DiagnosticRecord> out;
  std::string line;
  while (std::getline(f, line)) {
    line = detail::trim(line);
    if (line.empty()) continue;
    out.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

inline nlohmann::json to_json(const Certificate& c) {
  return nlohmann::json{{"id", c.inequality_id},   {"lhs", c.lhs},
                        {"rhs", c.rhs},            {"ratio", c.ratio},
                        {"digest", c.inputs_digest}, {"pass", c.pass},
                        {"metadata", c.metadata}};
}

inline Certificate certificate_from_json(const nlohmann::json& j) {
  Certificate c;
  c.inequality_id = j.at("id");
  c.lhs = j.at("lhs");
  c.rhs = j.at("rhs");
  c.ratio = j.at("ratio");
  c.inputs_digest = j.at("digest");
  c.pass = j.at("pass");
  for (const auto& [k, v] : j.at("metadata").items()) c.metadata[k] = v.get<std::string>();
  return c;
}

inline void write_certificates(const std::string& path, const std::vector<Certificate>& cs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Certificate& c : cs) arr.push_back(to_json(c));
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_certificates: cannot open " + path);
  f << arr.dump(2) << "\n";
}

inline std::vector<Certificate> read_certificates(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_certificates: cannot open " + path);
  nlohmann::json arr = nlohmann::json::parse(f);
  std::vector<Certificate> out;
  for (const auto& j : arr) out.push_back(certificate_from_json(j));
  return out;
}

// ---------------------------------------------------------------------------
// Corpus directories

inline nlohmann::json member_to_json(const CorpusMember& m) {
  return nlohmann::json{{"name", m.name},
                        {"kind", to_string(m.kind)},
                        {"degree", m.degree},
                        {"lambda", m.lambda},
                        {"center", {m.center.x, m.center.y}},
                        {"rot", m.rot_angle},
                        {"amplitude", m.amplitude},
                        {"mode", m.mode},
                        {"seed", m.seed},
                        {"m", m.m},
                        {"turn", m.turn},
                        {"damped", m.damped}};
}

// Realizes every member on the given grid and writes member files plus a
// manifest tying names, spec parameters, and payload digests together.
inline void write_corpus(const std::string& dir, const Corpus& corpus, const Grid& g) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["seed"] = corpus.seed;
  manifest["grid"] = {{"L", g.L}, {"N", g.N}};
  nlohmann::json members = nlohmann::json::array();
  char name[64];
  for (std::size_t k = 0; k < corpus.members.size(); ++k) {
    SphereField u = corpus.members[k].realize(g);
    std::snprintf(name, sizeof name, "member_%02zu.sfld", k);
    write_field((fs::path(dir) / name).string(), u);
    nlohmann::json j = member_to_json(corpus.members[k]);
    j["file"] = name;
    j["digest"] = field_digest(u);
    members.push_back(std::move(j));
  }
  manifest["members"] = std::move(members);
  std::ofstream f(fs::path(dir) / "manifest.json");
  if (!f) throw std::runtime_error("write_corpus: cannot write manifest in " + dir);
  f << manifest.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Run directories: config.echo + run.jsonl + summary.json + snapshots/

namespace detail {

inline nlohmann::json run_summary(double t_final, long steps, bool reached_stop, bool aborted,
                                  const std::string& stop_reason, std::size_t n_records,
                                  std::size_t n_snapshots) {
  return nlohmann::json{{"t_final", t_final},       {"steps", steps},
                        {"reached_stop", reached_stop}, {"aborted", aborted},
                        {"stop_reason", stop_reason},   {"records", n_records},
                        {"snapshots", n_snapshots}};
}

}  // namespace detail

inline void write_run(const std::string& dir, const FlowRun& run,
                      const ExperimentSpec* spec = nullptr) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "snapshots");
  if (spec) {
    std::ofstream f(fs::path(dir) / "config.echo");
    f << echo_config(*spec);
  }
  write_records((fs::path(dir) / "run.jsonl").string(), run.records);
  char name[64];
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    SphereField u = run.snapshots[k].second;
    u.meta["t"] = detail::num_str(run.snapshots[k].first);
    std::snprintf(name, sizeof name, "snap_%03zu.sfld", k);
    write_field((fs::path(dir) / "snapshots" / name).string(), u);
  }
  nlohmann::json summary =
      detail::run_summary(run.t_final, run.steps, run.reached_stop, run.aborted,
                          run.stop_reason, run.records.size(), run.snapshots.size());
  summary["geometry"] = "2d";
  summary["T1"] = run.config.T1;
  summary["R"] = run.config.R;
  summary["E0"] = run.config.E0;
  summary["grid"] = {{"L", run.config.grid.L}, {"N", run.config.grid.N}};
  std::ofstream f(fs::path(dir) / "summary.json");
  f << summary.dump(2) << "\n";
}

inline void write_run(const std::string& dir, const RadialRun& run,
                      const ExperimentSpec* spec = nullptr) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "snapshots");
  if (spec) {
    std::ofstream f(fs::path(dir) / "config.echo");
    f << echo_config(*spec);
  }
  write_records((fs::path(dir) / "run.jsonl").string(), run.records);
  write_profile((fs::path(dir) / "initial.rprof").string(), run.initial);
  char name[64];
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    std::snprintf(name, sizeof name, "snap_%03zu.rprof", k);
    write_profile((fs::path(dir) / "snapshots" / name).string(), run.snapshots[k].second,
                  run.snapshots[k].first);
  }
  nlohmann::json summary =
      detail::run_summary(run.t_final, run.steps, run.reached_stop, run.aborted,
                          run.stop_reason, run.records.size(), run.snapshots.size());
  summary["geometry"] = "radial";
  summary["T1"] = run.config.T1;
  summary["R"] = run.config.R;
  summary["E0"] = run.config.E0;
  summary["grid"] = {{"L", run.config.grid.L}, {"N", run.config.grid.N}};
  summary["lambda_marks"] = run.lambda_marks;
  std::ofstream f(fs::path(dir) / "summary.json");
  f << summary.dump(2) << "\n";
}

// Rebuilds enough of a 2-D run for the offline checks: records, snapshots with
// their times, and the diagnostic anchors. Step counts and stop flags come
// from the summary; the integrator state itself is not persisted.
inline FlowRun read_run(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream sf(fs::path(dir) / "summary.json");
  if (!sf) throw std::runtime_error("read_run: missing summary.json in " + dir);
  nlohmann::json summary = nlohmann::json::parse(sf);
  if (summary.value("geometry", "2d") != "2d")
    throw std::runtime_error("read_run: " + dir + " is not a 2d run directory");

  Grid g(summary.at("grid").at("L").get<double>(), summary.at("grid").at("N").get<int>());
  FlowConfig cfg(g);
  cfg.T1 = summary.at("T1");
  cfg.R = summary.at("R");
  cfg.E0 = summary.at("E0");

  FlowRun run(cfg);
  run.t_final = summary.at("t_final");
  run.steps = summary.at("steps");
  run.reached_stop = summary.at("reached_stop");
  run.aborted = summary.at("aborted");
  run.stop_reason = summary.value("stop_reason", "");
  run.records = read_records((fs::path(dir) / "run.jsonl").string());

  std::vector<fs::path> snaps;
  if (fs::exists(fs::path(dir) / "snapshots"))
    for (const auto& e : fs::directory_iterator(fs::path(dir) / "snapshots"))
      if (e.path().extension() == ".sfld") snaps.push_back(e.path());
  std::sort(snaps.begin(), snaps.end());
  for (const fs::path& p : snaps) {
    SphereField u = read_field(p.string());
    auto it = u.meta.find("t");
    if (it == u.meta.end())
      throw std::runtime_error("read_run: snapshot " + p.string() + " lacks a time stamp");
    double t = std::strtod(it->second.c_str(), nullptr);
    run.snapshots.emplace_back(t, std::move(u));
  }
  return run;
}

}  // namespace hmflow
