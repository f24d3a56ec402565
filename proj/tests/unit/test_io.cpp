#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "hmflow/io.hpp"
#include "maps.hpp"

using namespace hmflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  fs::path p = fs::temp_directory_path() / "hmflow_io_scratch";
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing fills documented defaults", "[io]") {
  ExperimentSpec spec = parse_config_text("init.kind = bubble\ninit.lambda = 0.1\n");
  CHECK(spec.geometry == "2d");
  CHECK(spec.flow.grid.L == 8.0);
  CHECK(spec.flow.grid.N == 257);
  CHECK(spec.flow.dt_safety == 0.2);
  CHECK(spec.flow.t_end == 0.0);
  CHECK(spec.flow.T1 == 1.0);  // 2*t_end + 1
  CHECK(spec.flow.R == 1.0);   // sqrt(T1)
  CHECK(spec.flow.diagnostic_stride == 25);
  CHECK(spec.init.kind == MemberKind::Bubble);
  CHECK(spec.init.degree == 1);
  CHECK(spec.init.lambda == 0.1);

  // comments, blank lines, and whitespace are cosmetic
  ExperimentSpec spec2 = parse_config_text(
      "# full line comment\n\n  init.kind = bubble   # trailing\n init.lambda=0.1\n");
  CHECK(echo_config(spec2) == echo_config(spec));
}

TEST_CASE("config echo round-trips exactly", "[io]") {
  std::string text =
      "geometry = radial\n"
      "grid.L = 4\n"
      "grid.N = 65\n"
      "flow.t_end = 0.125\n"
      "flow.T1 = 0.30000000000000004\n"
      "flow.snapshots = 0.01, 0.02, 0.0925\n"
      "flow.stop_scale = 0.0005\n"
      "init.kind = equivariant\n"
      "init.m = 1\n"
      "init.lambda = 0.1\n"
      "init.turn = 3.45575191894877\n";
  ExperimentSpec a = parse_config_text(text);
  std::string echoed = echo_config(a);
  ExperimentSpec b = parse_config_text(echoed);
  CHECK(echo_config(b) == echoed);
  CHECK(b.flow.T1 == a.flow.T1);
  CHECK(b.flow.snapshot_times == a.flow.snapshot_times);
  CHECK(b.init.turn == a.init.turn);
  CHECK(b.stop_scale == a.stop_scale);
}

TEST_CASE("config rejects malformed input", "[io]") {
  // unknown keys are hard errors, not silent typos
  CHECK_THROWS_WITH(parse_config_text("init.kind = bubble\ninit.lamda = 0.1\n"),
                    Catch::Matchers::ContainsSubstring("init.lamda"));
  CHECK_THROWS_AS(parse_config_text("init.kind = wobble\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("grid.N = 8\ninit.kind = bubble\n"),
                  std::invalid_argument);
  // diagnostics need tau = T1 - t > 0 through the whole run
  CHECK_THROWS_WITH(
      parse_config_text("init.kind = bubble\nflow.t_end = 1.0\nflow.T1 = 0.5\n"),
      Catch::Matchers::ContainsSubstring("tau"));
  CHECK_THROWS_AS(parse_config_text("init.kind = bubble\ninit.kind = bubble\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("geometry = radial\ninit.kind = bubble\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("init.lambda = 0.1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("init.kind = bubble\ninit.lambda = fast\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("init.kind bubble\n"), std::invalid_argument);
}

TEST_CASE("snapshot files round-trip bit-exactly", "[io]") {
  fs::path dir = scratch();
  Grid g(4.0, 65);
  SphereField u = testmaps::smooth_test_map(g, 0.37);
  u.meta["note"] = "scratch field";
  std::string path = (dir / "u.sfld").string();
  write_field(path, u);
  SphereField v = read_field(path);
  CHECK(field_digest(v) == field_digest(u));
  CHECK(v.a == u.a);
  CHECK(v.boundary_value.x == u.boundary_value.x);
  CHECK(v.boundary_value.z == u.boundary_value.z);
  CHECK(v.meta.at("note") == "scratch field");

  // version and truncation guards
  {
    std::ofstream bad(dir / "bad.sfld", std::ios::binary);
    bad << "sfld 9\n";
  }
  CHECK_THROWS_AS(read_field((dir / "bad.sfld").string()), std::runtime_error);
  {
    std::ofstream trunc(dir / "trunc.sfld", std::ios::binary);
    trunc << "sfld 1\nL 4\nN 65\nboundary 0 0 1\ndata\nshort";
  }
  CHECK_THROWS_AS(read_field((dir / "trunc.sfld").string()), std::runtime_error);
  CHECK_THROWS_AS(read_field((dir / "missing.sfld").string()), std::runtime_error);
}

TEST_CASE("profile files round-trip", "[io]") {
  fs::path dir = scratch();
  RadialProfile p = harmonic_profile(radial_nodes(4.0), 2, 0.317);
  std::string path = (dir / "p.rprof").string();
  write_profile(path, p, 0.125);
  double t = 0.0;
  RadialProfile q = read_profile(path, &t);
  CHECK(t == 0.125);
  CHECK(q.m == 2);
  CHECK(q.r == p.r);
  CHECK(q.h == p.h);

  write_profile((dir / "nt.rprof").string(), p);
  read_profile((dir / "nt.rprof").string(), &t);
  CHECK(t == -1.0);
}

TEST_CASE("diagnostic records round-trip through JSON lines", "[io]") {
  Grid g(8.0, 33);
  FlowConfig cfg(g);
  cfg.t_end = 0.2;
  cfg.diagnostic_stride = 2;
  FlowRun run = run_2d(cfg, testmaps::smooth_test_map(g, 0.3));
  REQUIRE(run.records.size() >= 3);

  fs::path dir = scratch();
  std::string path = (dir / "run.jsonl").string();
  write_records(path, run.records);
  std::vector<DiagnosticRecord> back = read_records(path);
  REQUIRE(back.size() == run.records.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back[k].t == run.records[k].t);
    CHECK(back[k].Phi == run.records[k].Phi);
    CHECK(back[k].Psi == run.records[k].Psi);
    CHECK(back[k].norm_That == run.records[k].norm_That);
    CHECK(back[k].psi == run.records[k].psi);
    CHECK(back[k].delta == run.records[k].delta);
    CHECK(back[k].eta == run.records[k].eta);
    CHECK(back[k].s == run.records[k].s);
    CHECK(back[k].flagged == run.records[k].flagged);
    CHECK(back[k].near_stop == run.records[k].near_stop);
    REQUIRE(back[k].annulus_energies.size() == run.records[k].annulus_energies.size());
    for (std::size_t a = 0; a < back[k].annulus_energies.size(); ++a)
      CHECK(back[k].annulus_energies[a] == run.records[k].annulus_energies[a]);
  }
}

TEST_CASE("certificates round-trip through JSON", "[io]") {
  Grid g(8.0, 129);
  SphereField b = make_bubble(g, 1, 0.2);
  std::vector<Certificate> cs = {check_poincare_rdu(b, 1.0), check_poincare_T(b, 0.25)};
  fs::path dir = scratch();
  std::string path = (dir / "verify.json").string();
  write_certificates(path, cs);
  std::vector<Certificate> back = read_certificates(path);
  REQUIRE(back.size() == cs.size());
  for (std::size_t k = 0; k < cs.size(); ++k) {
    CHECK(back[k].inequality_id == cs[k].inequality_id);
    CHECK(back[k].lhs == cs[k].lhs);
    CHECK(back[k].rhs == cs[k].rhs);
    CHECK(back[k].ratio == cs[k].ratio);
    CHECK(back[k].inputs_digest == cs[k].inputs_digest);
    CHECK(back[k].pass == cs[k].pass);
    CHECK(back[k].metadata == cs[k].metadata);
  }
}

TEST_CASE("corpus directories carry reproducible digests", "[io]") {
  fs::path dir = scratch();
  Corpus corpus = generate_corpus(11);
  Grid g(8.0, 65);
  write_corpus((dir / "corpus").string(), corpus, g);

  std::ifstream mf(dir / "corpus" / "manifest.json");
  REQUIRE(mf.good());
  nlohmann::json manifest = nlohmann::json::parse(mf);
  CHECK(manifest.at("seed") == 11);
  REQUIRE(manifest.at("members").size() == corpus.members.size());
  for (const auto& m : manifest.at("members")) {
    SphereField u = read_field((dir / "corpus" / m.at("file").get<std::string>()).string());
    CHECK(field_digest(u) == m.at("digest").get<std::string>());
  }
}

TEST_CASE("run directories round-trip the offline view", "[io]") {
  Grid g(8.0, 33);
  FlowConfig cfg(g);
  cfg.t_end = 0.2;
  cfg.diagnostic_stride = 2;
  cfg.snapshot_times = {0.1, 0.2};
  cfg.E0 = 0.25;
  FlowRun run = run_2d(cfg, testmaps::smooth_test_map(g, 0.3));
  REQUIRE(run.snapshots.size() >= 2);

  fs::path dir = scratch();
  ExperimentSpec spec;
  spec.flow = run.config;
  spec.init.kind = MemberKind::RandomField;
  spec.init.amplitude = 0.3;
  write_run((dir / "run").string(), run, &spec);

  FlowRun back = read_run((dir / "run").string());
  CHECK(back.config.T1 == run.config.T1);
  CHECK(back.config.R == run.config.R);
  CHECK(back.config.E0 == run.config.E0);
  CHECK(back.t_final == run.t_final);
  CHECK(back.steps == run.steps);
  CHECK(back.records.size() == run.records.size());
  REQUIRE(back.snapshots.size() == run.snapshots.size());
  for (std::size_t k = 0; k < back.snapshots.size(); ++k) {
    CHECK(back.snapshots[k].first == run.snapshots[k].first);
    CHECK(back.snapshots[k].second.a == run.snapshots[k].second.a);
  }
  CHECK(fs::exists(dir / "run" / "config.echo"));

  // radial runs persist the initial profile and per-record scale marks
  FlowConfig rcfg(Grid(4.0, 65));
  rcfg.t_end = 0.01;
  rcfg.diagnostic_stride = 5;
  RadialRun rr = run_radial(rcfg, harmonic_profile(radial_nodes(4.0), 1, 0.3));
  write_run((dir / "rrun").string(), rr, nullptr);
  CHECK(fs::exists(dir / "rrun" / "initial.rprof"));
  std::ifstream sf(dir / "rrun" / "summary.json");
  nlohmann::json summary = nlohmann::json::parse(sf);
  CHECK(summary.at("geometry") == "radial");
  CHECK(summary.at("lambda_marks").size() == rr.lambda_marks.size());
  CHECK_THROWS_AS(read_run((dir / "rrun").string()), std::runtime_error);
}
