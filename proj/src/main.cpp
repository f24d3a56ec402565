// Command-line laboratory for harmonic map flow into the round sphere:
// simulate concentration runs, sweep parameter families, generate the seeded
// verification corpus, and certify the weighted inequalities on the results.
//
// Exit codes: 0 when every executed certificate passed or was flagged
// not-applicable/degenerate, 1 when any check failed, 2 on usage or I/O errors.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "hmflow/presets.hpp"

namespace fs = std::filesystem;
using namespace hmflow;

namespace {

void print_checks(const PresetResult& res) {
  for (const CheckOutcome& c : res.checks) {
    const char* tag = c.status == "pass"         ? "PASS "
                      : c.status == "fail"       ? "FAIL "
                      : c.status == "degenerate" ? "DEGEN"
                                                 : "N/A  ";
    std::printf("%s  %-52s %s\n", tag, c.name.c_str(), c.detail.c_str());
  }
}

PresetResult certify_fields(const std::vector<std::pair<std::string, SphereField>>& fields,
                            const std::string& mode, const std::string& out_dir) {
  PresetResult res;
  std::vector<Certificate> certs;
  char nm[192];
  if (mode == "poincare") {
    for (const auto& [name, u] : fields)
      for (double tau : {0.25, 1.0, 4.0})
        for (Certificate c : {check_poincare_rdu(u, tau), check_poincare_T(u, tau)}) {
          c.metadata["member"] = name;
          c.metadata["tau"] = hmflow::detail::num_str(tau);
          std::snprintf(nm, sizeof nm, "%s tau=%g %s", name.c_str(), tau,
                        c.inequality_id.c_str());
          res.add_status(nm, hmflow::detail::cert_status(c),
                         hmflow::detail::ratio_detail(c));
          certs.push_back(std::move(c));
        }
  } else {  // lojasiewicz: fit the family constant, then certify against it
    LojParams record_only;
    double C = 0.0;
    for (const auto& [name, u] : fields) {
      Certificate c = loj_certificate(u, record_only);
      bool in_regime = c.metadata.find("regime") == c.metadata.end();
      if (in_regime && c.ratio > C && std::isfinite(c.ratio)) C = c.ratio;
    }
    LojParams budget;
    if (C > 0.0) budget.C_budget = C * (1.0 + 1e-12);
    for (const auto& [name, u] : fields) {
      Certificate c = loj_certificate(u, budget);
      c.metadata["member"] = name;
      std::snprintf(nm, sizeof nm, "%s quantization-gap", name.c_str());
      res.add_status(nm, hmflow::detail::cert_status(c), hmflow::detail::ratio_detail(c));
      certs.push_back(std::move(c));
    }
  }
  write_certificates((fs::path(out_dir) / "verify.json").string(), certs);
  return res;
}

// Loads the maps a verify target provides: corpus members from a manifest, or
// the stored snapshots of a finished run.
std::vector<std::pair<std::string, SphereField>> load_fields(const std::string& target) {
  std::vector<std::pair<std::string, SphereField>> out;
  if (fs::exists(fs::path(target) / "manifest.json")) {
    std::ifstream mf(fs::path(target) / "manifest.json");
    nlohmann::json manifest = nlohmann::json::parse(mf);
    for (const auto& m : manifest.at("members"))
      out.emplace_back(m.at("name").get<std::string>(),
                       read_field((fs::path(target) / m.at("file").get<std::string>())
                                      .string()));
    return out;
  }
  FlowRun run = read_run(target);
  if (run.snapshots.empty())
    throw std::runtime_error("verify: run directory has no snapshots to certify");
  char nm[64];
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    std::snprintf(nm, sizeof nm, "snapshot %zu t=%g", k, run.snapshots[k].first);
    out.emplace_back(nm, run.snapshots[k].second);
  }
  return out;
}

std::string override_config_text(std::string text, const std::string& key,
                                 const std::string& value) {
  std::istringstream in(text);
  std::ostringstream kept;
  std::string line;
  while (std::getline(in, line)) {
    std::string probe = line.substr(0, line.find('#'));
    std::size_t eq = probe.find('=');
    if (eq != std::string::npos && hmflow::detail::trim(probe.substr(0, eq)) == key)
      continue;
    kept << line << "\n";
  }
  kept << key << " = " << value << "\n";
  return kept.str();
}

int simulate_spec(const ExperimentSpec& spec, const std::string& out) {
  if (spec.geometry == "radial") {
    RadialProfile init = radial_initial(spec.init, spec.flow.grid.L);
    RadialRun run = run_radial(spec.flow, init, spec.dt_max, spec.stop_scale);
    write_run(out, run, &spec);
    std::printf("%s: t_final=%.9g steps=%ld records=%zu %s\n", out.c_str(), run.t_final,
                run.steps, run.records.size(),
                run.reached_stop ? "(concentration stop)" : "");
    if (run.aborted) {
      std::fprintf(stderr, "error: run aborted: %s\n", run.stop_reason.c_str());
      return 1;
    }
    return 0;
  }
  SphereField init = spec.init.realize(spec.flow.grid);
  FlowRun run = run_2d(spec.flow, init);
  write_run(out, run, &spec);
  std::printf("%s: t_final=%.9g steps=%ld records=%zu %s\n", out.c_str(), run.t_final,
              run.steps, run.records.size(),
              run.reached_stop ? "(concentration stop)" : "");
  if (run.aborted) {
    std::fprintf(stderr, "error: run aborted: %s\n", run.stop_reason.c_str());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Numerical laboratory for two-dimensional harmonic map flow into the sphere"};
  app.require_subcommand(1);

  std::string config_path, out_dir, target, param, preset_name, verify_mode;
  int grid_n = 0;
  int jobs = 1;
  std::uint64_t seed = 7;

  CLI::App* sim = app.add_subcommand("simulate", "run a flow described by a config file");
  sim->add_option("config", config_path, "key=value config file")->required();
  sim->add_option("--out", out_dir, "output run directory")->capture_default_str();
  sim->add_option("--grid-n", grid_n, "override grid.N");
  sim->add_option("--jobs", jobs, "worker cap (runs are serial; kept for symmetry)");

  CLI::App* ver = app.add_subcommand("verify", "certify inequalities on a corpus or run");
  ver->add_option("mode", verify_mode, "poincare | lojasiewicz | monotonicity")
      ->required()
      ->check(CLI::IsMember({"poincare", "lojasiewicz", "monotonicity"}));
  ver->add_option("target", target, "corpus or run directory")->required();
  ver->add_option("--jobs", jobs, "worker cap (sweeps are serial; kept for symmetry)");

  CLI::App* bub = app.add_subcommand("bubbles", "extract bubbles and the energy identity");
  bub->add_option("run", target, "2d run directory")->required();
  bub->add_option("--out", out_dir, "where to write bubbles.json and the identity table");

  CLI::App* swp = app.add_subcommand("sweep", "rerun a config across parameter values");
  swp->add_option("config", config_path, "key=value config file")->required();
  swp->add_option("--param", param, "key=v1,v2,... single swept key")->required();
  swp->add_option("--out", out_dir, "parent output directory")->capture_default_str();
  swp->add_option("--grid-n", grid_n, "override grid.N");
  swp->add_option("--jobs", jobs, "worker cap (sweeps are serial; kept for symmetry)");

  CLI::App* cor = app.add_subcommand("corpus", "write the seeded verification corpus");
  cor->add_option("--seed", seed, "corpus seed")->capture_default_str();
  cor->add_option("--out", out_dir, "corpus directory")->required();
  cor->add_option("--grid-n", grid_n, "realization resolution (default 257)");

  CLI::App* pre = app.add_subcommand("preset", "run a canned experiment end to end");
  pre->add_option("name", preset_name, "preset name; omit to list the registry");
  pre->add_option("--out", out_dir, "output directory (default out/<name>)");
  pre->add_option("--grid-n", grid_n, "resolution override where the preset samples maps");
  pre->add_option("--seed", seed, "seed override where the preset samples maps");

  CLI11_PARSE(app, argc, argv);
  (void)jobs;  // single writer per stream; all dispatch is serial here

  try {
    if (sim->parsed()) {
      ExperimentSpec spec = parse_config(config_path);
      if (grid_n > 0) {
        Grid g(spec.flow.grid.L, grid_n);
        FlowConfig cfg(g);
        cfg.dt_safety = spec.flow.dt_safety;
        cfg.t_end = spec.flow.t_end;
        cfg.snapshot_times = spec.flow.snapshot_times;
        cfg.diagnostic_stride = spec.flow.diagnostic_stride;
        cfg.T1 = spec.flow.T1;
        cfg.R = spec.flow.R;
        cfg.E0 = spec.flow.E0;
        spec.flow = cfg.validated();
      }
      if (out_dir.empty()) out_dir = "out/run";
      return simulate_spec(spec, out_dir);
    }

    if (ver->parsed()) {
      if (verify_mode == "monotonicity") {
        std::vector<DiagnosticRecord> recs =
            read_records((fs::path(target) / "run.jsonl").string());
        MonotonicityReport rep = check_monotonicity_residuals(recs);
        bool ok = rep.phi_nonincreasing(1e-9);
        std::printf("%s  weighted energy nonincreasing  worst increase=%.3e pairs=%zu\n",
                    ok ? "PASS " : "FAIL ", rep.worst_increase, rep.n_pairs);
        std::printf("      residuals: phi max=%.3e mean=%.3e, psi max=%.3e mean=%.3e\n",
                    rep.max_phi_residual, rep.mean_phi_residual, rep.max_psi_residual,
                    rep.mean_psi_residual);
        return ok ? 0 : 1;
      }
      auto fields = load_fields(target);
      // certificates land next to the inputs they certify
      fs::current_path(fs::absolute(target));
      PresetResult res = certify_fields(fields, verify_mode);
      print_checks(res);
      std::printf("%zu certificates -> verify.json\n", res.checks.size());
      return res.exit_code;
    }

    if (bub->parsed()) {
      FlowRun run = read_run(target);
      const double L = run.config.grid.L;
      std::vector<double> radii = {L / 16.0, L / 8.0, L / 4.0, L / 2.0};
      EnergyIdentityReport eid = energy_identity_check(run, {0, 0, 0}, radii, 1.0);
      if (out_dir.empty()) out_dir = target;
      fs::create_directories(out_dir);

      nlohmann::json bubbles = nlohmann::json::array();
      char buf[64];
      for (std::size_t k = 0; k < eid.bubbles.size(); ++k) {
        const BubbleReport& b = eid.bubbles[k];
        std::snprintf(buf, sizeof buf, "bubble_%02zu.sfld", k);
        write_field((fs::path(out_dir) / buf).string(), b.extraction_snapshot);
        bubbles.push_back(
            {{"center", {b.center.x, b.center.y, b.center.z}},
             {"scale", b.scale},
             {"degree", b.degree_estimate},
             {"energy", b.energy},
             {"limit_value", {b.limit_value.x, b.limit_value.y, b.limit_value.z}},
             {"harmonic_like", b.harmonic_like},
             {"polish_drift", b.polish_drift},
             {"snapshot", buf}});
      }
      std::ofstream bf(fs::path(out_dir) / "bubbles.json");
      bf << bubbles.dump(2) << "\n";
      std::ofstream csv(fs::path(out_dir) / "energy_identity.csv");
      csv << "r,disk_energy,plateau,sum_bubble_energy,sum_quantized,gap_rel\n";
      for (const auto& row : eid.table)
        csv << hmflow::detail::num_str(row[0]) << "," << hmflow::detail::num_str(row[1])
            << "," << hmflow::detail::num_str(eid.plateau) << ","
            << hmflow::detail::num_str(eid.sum_bubble_energy) << ","
            << hmflow::detail::num_str(eid.sum_quantized) << ","
            << hmflow::detail::num_str(eid.gap_rel) << "\n";

      if (eid.inconclusive) {
        std::printf("N/A    energy identity  %s\n", eid.reason.c_str());
        std::printf("%zu bubbles -> bubbles.json\n", eid.bubbles.size());
        return 0;
      }
      bool ok = eid.gap_rel < 0.05;
      std::printf("%s  energy identity  plateau=%.6g quantized=%.6g gap=%.2f%%\n",
                  ok ? "PASS " : "FAIL ", eid.plateau, eid.sum_quantized,
                  100.0 * eid.gap_rel);
      std::printf("%zu bubbles -> bubbles.json\n", eid.bubbles.size());
      return ok ? 0 : 1;
    }

    if (swp->parsed()) {
      std::size_t eq = param.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::runtime_error("sweep: --param needs key=v1,v2,...");
      std::string key = param.substr(0, eq);
      std::vector<std::string> values;
      std::istringstream vs(param.substr(eq + 1));
      std::string v;
      while (std::getline(vs, v, ','))
        if (!hmflow::detail::trim(v).empty()) values.push_back(hmflow::detail::trim(v));
      if (values.empty()) throw std::runtime_error("sweep: --param has no values");

      std::ifstream f(config_path);
      if (!f) throw std::runtime_error("sweep: cannot open " + config_path);
      std::ostringstream body;
      body << f.rdbuf();
      if (out_dir.empty()) out_dir = "out/sweep";

      nlohmann::json index = nlohmann::json::array();
      int rc = 0;
      for (const std::string& value : values) {
        ExperimentSpec spec =
            parse_config_text(override_config_text(body.str(), key, value));
        if (grid_n > 0) spec.flow = [&] {
          FlowConfig cfg{Grid(spec.flow.grid.L, grid_n)};
          cfg.dt_safety = spec.flow.dt_safety;
          cfg.t_end = spec.flow.t_end;
          cfg.snapshot_times = spec.flow.snapshot_times;
          cfg.diagnostic_stride = spec.flow.diagnostic_stride;
          cfg.T1 = spec.flow.T1;
          cfg.R = spec.flow.R;
          cfg.E0 = spec.flow.E0;
          return cfg.validated();
        }();
        std::string dir = out_dir + "/" + key + "_" + value;
        int one = simulate_spec(spec, dir);
        rc = rc ? rc : one;
        index.push_back({{"key", key}, {"value", value}, {"dir", dir}, {"ok", one == 0}});
      }
      fs::create_directories(out_dir);
      std::ofstream idx(fs::path(out_dir) / "sweep_index.json");
      idx << index.dump(2) << "\n";
      return rc;
    }

    if (cor->parsed()) {
      Corpus corpus = generate_corpus(seed);
      Grid g(8.0, grid_n > 0 ? grid_n : 257);
      write_corpus(out_dir, corpus, g);
      std::printf("%zu members -> %s (seed %llu, N=%d)\n", corpus.members.size(),
                  out_dir.c_str(), static_cast<unsigned long long>(corpus.seed), g.N);
      return 0;
    }

    if (pre->parsed()) {
      if (preset_name.empty()) {
        for (const ExperimentPreset& p : preset_registry()) {
          std::printf("%s\n    %s\n    artifacts:", p.name.c_str(), p.doc.c_str());
          for (const std::string& a : p.artifacts) std::printf(" %s", a.c_str());
          std::printf("\n");
        }
        return 0;
      }
      if (!find_preset(preset_name))
        throw std::runtime_error("unknown preset '" + preset_name +
                                 "' (run `preset` with no name to list)");
      if (out_dir.empty()) out_dir = "out/" + preset_name;
      PresetResult res = run_preset(preset_name, out_dir, grid_n, seed);
      print_checks(res);
      std::printf("%s: %s (%zu checks) -> %s\n", preset_name.c_str(),
                  res.exit_code == 0 ? "ok" : "FAILED", res.checks.size(), out_dir.c_str());
      return res.exit_code;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
