#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "asv/agents/trainer.hpp"
#include "asv/ais/trajectory.hpp"
#include "asv/baselines/pid_tuning.hpp"
#include "asv/harness/config.hpp"
#include "asv/harness/forcing.hpp"
#include "asv/harness/policies.hpp"
#include "asv/harness/report.hpp"

namespace fs = std::filesystem;
using namespace asv;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = "out";
};

RunConfig load_config(const Globals& g) { return g.config.empty() ? RunConfig{} : load_run_config(g.config); }

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw FormatError("cannot write " + p.string());
  os << text;
}

void write_run(const fs::path& dir, const TrajectoryLog& log, const MetricReport& r) {
  fs::create_directories(dir);
  write_log((dir / "log.jsonl").string(), log);
  write_text(dir / "log.csv", to_csv(log));
  write_text(dir / "report.json", to_json(r).dump(2) + "\n");
}

int worst_exit(const std::vector<MetricReport>& rs) {
  int code = 0;
  for (const auto& r : rs) code = std::max(code, exit_code_for(r));
  return code;
}

int finish_runs(const Globals& g, const std::vector<MetricReport>& rs) {
  std::cout << format_table(rs);
  if (rs.size() > 1) {
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (const auto& r : rs) all.push_back(to_json(r));
    fs::create_directories(g.out);
    write_text(fs::path(g.out) / "reports.json", all.dump(2) + "\n");
  }
  return worst_exit(rs);
}

fs::path run_dir(const Globals& g, bool many, const std::string& name) { return many ? fs::path(g.out) / name : fs::path(g.out); }

nn::TrainConfig train_config(const Globals& g, const RunConfig& c, long long steps) {
  nn::TrainConfig t;
  t.total_steps = steps > 0 ? steps : c.training.total_steps;
  t.eval_every = c.training.eval_every;
  t.eval_episodes = c.training.eval_episodes;
  t.checkpoint_every = c.training.checkpoint_every;
  t.seed = g.seed;
  t.out_dir = g.out;
  t.on_eval = [](long long step, double ret) { std::printf("step %lld  eval return %.3f\n", step, ret), std::fflush(stdout); };
  return t;
}

void print_train(const nn::TrainResult& r, const std::string& out) {
  std::printf("done: %lld updates, %lld episodes, %.1f s; weights in %s/agent.asvw\n", r.updates, r.episodes, r.seconds,
              out.c_str());
}

MetricReport lpp_report(const ScenarioSpec& spec, Planner p, std::uint64_t seed, const LppRunResult& r) {
  MetricReport m;
  m.kind = "lpp-scenario";
  m.scenario = std::to_string(spec.id) + ":" + to_string(spec.curvature) + "/" + to_string(spec.setup);
  m.controller = to_string(p);
  m.seed = seed;
  m.steps = r.steps;
  m.status = r.collision_steps > 0 ? "collision" : "ok";
  m.metrics = {{"MCTE", r.mcte}, {"CE", r.ce}, {"MinDist", r.min_dist}, {"collision_steps", r.collision_steps}};
  return m;
}

MetricReport pf_report(const PfScenario& sc, const std::string& ctrl, std::uint64_t seed, const PfRunResult& r) {
  MetricReport m;
  m.kind = "pf-scenario";
  m.scenario = std::to_string(sc.id) + ":" + to_string(sc.force) + "/" + to_string(sc.severity);
  m.controller = ctrl;
  m.seed = seed;
  m.steps = r.steps;
  m.status = r.infeasible ? "infeasible" : r.off_river ? "off-path" : "ok";
  m.metrics = {{"MCTE", r.mcte}, {"CE", r.ce}, {"sum_chi2", r.sum_chi2}};
  return m;
}

/// Summary of a trajectory log read back from disk.
MetricReport log_report(const std::string& path, const RunConfig& c) {
  const TrajectoryLog log = read_log(path);
  const OwnSeries s = own_series(log);
  MetricReport m;
  m.kind = "log";
  m.scenario = fs::path(path).parent_path().filename().string();
  m.controller = "-";
  m.steps = log.own().empty() ? 0 : log.own().back()->step;
  m.metrics["MCTE_global"] = mcte_lpp(s.ye_global, c.lpp.length_pp);
  m.metrics["MCTE_local"] = mcte_pf(s.ye_local, c.lpp.beam);
  m.metrics["CE_PF"] = ce_pf(s.delta, deg2rad(c.pf.rudder_max_deg));
  m.metrics["CE_LPP"] = ce_lpp(s.psi, deg2rad(c.lpp.heading_step_deg));
  bool any = false;
  for (const auto& d : s.distances) any = any || !d.empty();
  if (any) m.metrics["MinDist"] = min_dist(s.distances, c.lpp.length_pp);
  return m;
}

std::vector<MetricReport> reports_from_file(const std::string& path, const RunConfig& c) {
  if (fs::path(path).extension() == ".jsonl") return {log_report(path, c)};
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + " is not valid JSON: " + e.what());
  }
  std::vector<MetricReport> out;
  if (j.is_array())
    for (const auto& e : j) out.push_back(report_from_json(e));
  else
    out.push_back(report_from_json(j));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level collision avoidance and path following for inland vessels"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--config", g.config, "Run configuration JSON")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory");

  auto* cfg_cmd = app.add_subcommand("config", "Print the effective configuration as JSON");

  long long train_steps = 0;
  auto* train_lpp = app.add_subcommand("train-lpp", "Train the local path planning agent");
  train_lpp->add_option("--steps", train_steps, "Environment steps (default from config)");
  bool straight = false;
  auto* train_pf = app.add_subcommand("train-pf", "Train the path following agent");
  train_pf->add_option("--steps", train_steps, "Environment steps (default from config)");
  train_pf->add_flag("--straight", straight, "Disturbance-free straight path");

  std::vector<int> lpp_ids;
  std::string planner = "apf", lpp_weights;
  auto* run_lpp_cmd = app.add_subcommand("run-lpp-scenario", "Run scripted planning scenarios");
  run_lpp_cmd->add_option("--scenario", lpp_ids, "Scenario ids 1-18")->required()->check(CLI::Range(1, 18));
  run_lpp_cmd->add_option("--planner", planner, "apf or drl")->check(CLI::IsMember({"apf", "drl"}));
  run_lpp_cmd->add_option("--weights", lpp_weights, "Trained planner weights")->check(CLI::ExistingFile);

  std::vector<int> pf_ids;
  std::string force, severity = "moderate", controller = "pid", gains_file, pf_weights;
  auto* run_pf_cmd = app.add_subcommand("run-pf-scenario", "Run path following validation scenarios");
  run_pf_cmd->add_option("--scenario", pf_ids, "Suite ids 1-6")->check(CLI::Range(1, 6));
  run_pf_cmd->add_option("--force", force, "current, wind or wave")->check(CLI::IsMember({"current", "wind", "wave"}));
  run_pf_cmd->add_option("--severity", severity, "zero, moderate or extreme")
      ->check(CLI::IsMember({"zero", "moderate", "extreme"}));
  run_pf_cmd->add_option("--controller", controller, "pid or drl")->check(CLI::IsMember({"pid", "drl"}));
  run_pf_cmd->add_option("--gains", gains_file, "PID gains JSON")->check(CLI::ExistingFile);
  run_pf_cmd->add_option("--weights", pf_weights, "Trained follower weights")->check(CLI::ExistingFile);

  std::optional<int> particles, iterations;
  auto* tune = app.add_subcommand("tune-pid", "Tune PID gains with particle swarm optimisation");
  tune->add_option("--particles", particles)->check(CLI::PositiveNumber);
  tune->add_option("--iterations", iterations)->check(CLI::NonNegativeNumber);

  std::vector<std::string> ais_inputs;
  char ais_sep = ',';
  auto* ais_cmd = app.add_subcommand("ais-prepare", "Clean, deduplicate and interpolate AIS records");
  ais_cmd->add_option("--input", ais_inputs, "AIS CSV files")->required()->check(CLI::ExistingFile);
  ais_cmd->add_option("--sep", ais_sep, "Column separator");

  std::optional<std::string> p_traffic, p_planner, p_follower, p_ais_dir;
  std::optional<int> p_scenario, p_steps;
  std::string p_gains, p_forcing;
  auto* pipe = app.add_subcommand("pipeline", "Run the planner and follower together");
  pipe->add_option("--traffic", p_traffic, "scripted or ais")->check(CLI::IsMember({"scripted", "ais"}));
  pipe->add_option("--scenario", p_scenario, "Scripted scenario id 1-18")->check(CLI::Range(1, 18));
  pipe->add_option("--ais-dir", p_ais_dir, "Directory written by ais-prepare");
  pipe->add_option("--planner", p_planner, "apf or drl")->check(CLI::IsMember({"apf", "drl"}));
  pipe->add_option("--follower", p_follower, "pid or drl")->check(CLI::IsMember({"pid", "drl"}));
  pipe->add_option("--lpp-weights", lpp_weights)->check(CLI::ExistingFile);
  pipe->add_option("--pf-weights", pf_weights)->check(CLI::ExistingFile);
  pipe->add_option("--gains", p_gains, "PID gains JSON")->check(CLI::ExistingFile);
  pipe->add_option("--steps", p_steps)->check(CLI::PositiveNumber);
  pipe->add_option("--forcing", p_forcing, "Disturbance grid CSV")->check(CLI::ExistingFile);

  std::vector<std::string> report_inputs;
  auto* report = app.add_subcommand("report", "Tabulate report.json or log.jsonl files");
  report->add_option("inputs", report_inputs, "Report or log files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    RunConfig c = load_config(g);

    if (*cfg_cmd) {
      std::cout << to_json(c).dump(2) << '\n';
      return 0;
    }

    if (*train_lpp) {
      LppEnv env(c.lpp, c.waterway, c.traffic), eval_env(c.lpp, c.waterway, c.traffic);
      nn::Td3Agent<nn::LppSpec> agent(c.td3, g.seed);
      const auto r = nn::train(agent, env, eval_env, train_config(g, c, train_steps));
      print_train(r, g.out);
      return 0;
    }

    if (*train_pf) {
      nn::Td3Agent<nn::PfSpec> agent(c.td3, g.seed);
      nn::TrainResult r;
      if (straight || c.training.pf_straight) {
        nn::PfStraightEnv env(c.pf), eval_env(c.pf);
        r = nn::train(agent, env, eval_env, train_config(g, c, train_steps));
      } else {
        const VesselParams vp = vessel_params_of(c);
        PfEnv env(c.pf, vp, c.waterway), eval_env(c.pf, vp, c.waterway);
        r = nn::train(agent, env, eval_env, train_config(g, c, train_steps));
      }
      print_train(r, g.out);
      return 0;
    }

    if (*run_lpp_cmd) {
      const Planner p = planner == "drl" ? Planner::Drl : Planner::Apf;
      std::optional<LppPolicy> policy;
      if (p == Planner::Drl) {
        if (lpp_weights.empty()) throw ConfigError("--planner drl needs --weights");
        policy.emplace(lpp_weights);
      }
      std::vector<MetricReport> rs;
      for (int id : lpp_ids) {
        const ScenarioSpec spec = scenario_spec(id);
        const auto r = run_lpp(
            spec, p, g.seed, [&](LppEnv&, const LppHistory& h) { return policy->act(h); }, c.apf, c.geometry, c.lpp,
            c.traffic);
        rs.push_back(lpp_report(spec, p, g.seed, r));
        write_run(run_dir(g, lpp_ids.size() > 1, "scenario_" + std::to_string(id)), r.log, rs.back());
      }
      return finish_runs(g, rs);
    }

    if (*run_pf_cmd) {
      std::vector<PfScenario> suite;
      const auto all = pf_validation_suite();
      for (int id : pf_ids) suite.push_back(all.at(id - 1));
      if (!force.empty()) {
        PfScenario sc;
        sc.id = 0;
        sc.force = parse_force(force);
        sc.severity = parse_severity(severity);
        suite.push_back(sc);
      }
      if (suite.empty()) throw ConfigError("give --scenario or --force");
      std::optional<PfPolicy> policy;
      if (controller == "drl") {
        if (pf_weights.empty()) throw ConfigError("--controller drl needs --weights");
        policy.emplace(pf_weights);
      }
      const PidGains gains = gains_file.empty() ? c.pid : load_pid_gains(gains_file);
      PfEnv env(pf_scenario_config(c.pf), vessel_params_of(c));
      std::vector<MetricReport> rs;
      for (PfScenario sc : suite) {
        sc.levels = c.pf_levels;
        PidController pid(gains, c.pid_limits);
        const auto r = policy ? run_pf(env, sc, g.seed, [&](PfEnv& e, const PfHistory& h) { return e.step(policy->act(h)); })
                              : run_pf(env, sc, g.seed, [&](PfEnv& e, const PfHistory&) { return pid_step(e, pid); });
        rs.push_back(pf_report(sc, controller, g.seed, r));
        write_run(run_dir(g, suite.size() > 1, "scenario_" + std::to_string(sc.id)), r.log, rs.back());
      }
      return finish_runs(g, rs);
    }

    if (*tune) {
      if (particles) c.pso.particles = *particles;
      if (iterations) c.pso.iterations = *iterations;
      PidObjectiveConfig oc;
      oc.off_river_penalty = c.pid_penalty;
      for (auto& sc : oc.suite) sc.levels = c.pf_levels;
      const PidTuningResult r = tune_pid(g.seed, c.pso, oc, pf_scenario_config(c.pf));
      std::vector<double> init = r.pso.initial_values;
      std::sort(init.begin(), init.end());
      const double median = init.empty() ? 0.0 : init[init.size() / 2];
      fs::create_directories(g.out);
      save_pid_gains((fs::path(g.out) / "pid_gains.json").string(), r.gains,
                     {{"objective", r.pso.best_value}, {"initial_median", median}, {"evaluations", r.pso.evaluations},
                      {"discarded", r.pso.discarded}, {"seed", g.seed}});
      std::string hist = "iteration,best\n";
      for (std::size_t k = 0; k < r.pso.history.size(); ++k) hist += std::to_string(k) + "," + std::to_string(r.pso.history[k]) + "\n";
      write_text(fs::path(g.out) / "pso_history.csv", hist);
      std::printf("Kp %.6g  Ki %.6g  Kd %.6g\nobjective %.6g (initial median %.6g), %lld evaluations\n", r.gains.kp, r.gains.ki,
                  r.gains.kd, r.pso.best_value, median, r.pso.evaluations);
      return 0;
    }

    if (*ais_cmd) {
      std::vector<AisRecord> raw;
      for (const auto& f : ais_inputs) {
        auto part = read_ais_csv(f, ais_sep);
        raw.insert(raw.end(), part.begin(), part.end());
      }
      const LocalTangentPlane plane(c.ais.origin_lat, c.ais.origin_lon);
      const AisPrepareStats s = ais_prepare(raw, plane, g.out, c.ais.dedup_window);
      std::printf("raw %zu  complete %zu  kept %zu  vessels %zu  skipped %zu\n", s.raw, s.complete, s.kept, s.vessels,
                  s.skipped_vessels);
      return 0;
    }

    if (*pipe) {
      PipelineRunConfig& pr = c.pipeline_run;
      if (p_traffic) pr.traffic = *p_traffic;
      if (p_scenario) pr.scenario = *p_scenario;
      if (p_ais_dir) pr.ais_dir = *p_ais_dir;
      if (p_planner) pr.planner = *p_planner;
      if (p_follower) pr.follower = *p_follower;
      if (!lpp_weights.empty()) pr.lpp_weights = lpp_weights;
      if (!pf_weights.empty()) pr.pf_weights = pf_weights;
      if (!p_forcing.empty()) pr.forcing = p_forcing;
      PipelineConfig pc = c.pipeline;
      if (p_steps) pc.steps = *p_steps;
      const Planner p = pr.planner == "drl" ? Planner::Drl : Planner::Apf;
      pc.lpp = planner_env_config(p, c.apf, c.lpp);
      pc.pf = c.pf;
      pc.traffic = c.traffic;
      pc.vessel = vessel_params_of(c);

      std::shared_ptr<const Waterway> w;
      VesselState start;
      TrafficSource traffic;
      std::string scenario;
      double clock0 = 0.0;
      if (pr.traffic == "scripted") {
        const ScenarioWorld sw = build_scenario(scenario_spec(pr.scenario), g.seed, c.geometry);
        w = sw.waterway;
        start = sw.own.state;
        traffic = ScriptedTraffic(w, sw.traffic, pc.pf.dt, c.traffic);
        scenario = "scripted:" + std::to_string(pr.scenario);
      } else {
        if (pr.ais_dir.empty()) throw ConfigError("AIS traffic needs --ais-dir");
        if (pr.path.size() < 2) throw ConfigError("AIS traffic needs pipeline.path with at least two points");
        std::vector<Vec2> wp;
        for (const auto& q : pr.path) wp.push_back({q.at(0), q.at(1)});
        const Path gp(std::move(wp));
        w = std::make_shared<const Waterway>(make_waterway(gp, pr.depth, derive_seed(g.seed, 1)));
        start.x_n = gp.point_at(0.0).n;
        start.y_n = gp.point_at(0.0).e;
        start.psi = gp.course_at(0.0);
        start.u = c.pf.nominal_speed;
        auto tracks = load_ais_artifacts(pr.ais_dir);
        if (tracks.empty()) throw InsufficientData("no vessel tracks in " + pr.ais_dir);
        double t0 = pr.ais_t0;
        if (t0 <= 0.0)
          for (const auto& [m, s] : tracks) t0 = std::max(t0, s.t_start());
        traffic = AisTraffic(std::move(tracks), t0, pc.pf.dt);
        clock0 = t0;
        scenario = "ais:" + fs::path(pr.ais_dir).filename().string();
      }

      if (!pr.forcing.empty())
        pc.schedule = grid_schedule(std::make_shared<const DisturbanceGrid>(read_disturbance_grid(pr.forcing)), clock0, pc.pf.dt);

      std::optional<LppPolicy> lpol;
      std::optional<PfPolicy> fpol;
      if (p == Planner::Drl) {
        if (pr.lpp_weights.empty()) throw ConfigError("drl planner needs planner weights");
        lpol.emplace(pr.lpp_weights);
      }
      if (pr.follower == "drl") {
        if (pr.pf_weights.empty()) throw ConfigError("drl follower needs follower weights");
        fpol.emplace(pr.pf_weights);
      }
      const Vec2 origin = position_of(start);
      const ApfConfig apf = c.apf;
      const LppActionFn plan = [&](LppEnv& e, const LppHistory& h) { return lpol ? lpol->act(h) : apf_action(e, origin, apf); };
      PidController pid(p_gains.empty() ? c.pid : load_pid_gains(p_gains), c.pid_limits);
      const PfControlFn follow = [&](PfEnv& e, const PfHistory& h) { return fpol ? e.step(fpol->act(h)) : pid_step(e, pid); };

      const PipelineResult r = run_two_level(w, start, traffic, plan, follow, g.seed, pc);
      MetricReport m;
      m.kind = "pipeline";
      m.scenario = scenario;
      m.controller = pr.planner + "+" + pr.follower;
      m.seed = g.seed;
      m.steps = r.steps;
      m.status = r.infeasible ? "infeasible" : r.collision_steps > 0 ? "collision" : r.end_reason == "completed" || r.end_reason == "arrived" ? "ok" : r.end_reason;
      m.metrics = {{"MCTE_global", r.mcte_global}, {"MCTE_local", r.mcte_local}, {"CE", r.ce}, {"MinDist", r.min_dist},
                   {"replans", r.replans}, {"collision_steps", r.collision_steps}};
      write_run(g.out, r.log, m);
      std::cout << format_table({m});
      return exit_code_for(m);
    }

    if (*report) {
      std::vector<MetricReport> rs;
      for (const auto& f : report_inputs) {
        auto part = reports_from_file(f, c);
        rs.insert(rs.end(), part.begin(), part.end());
      }
      std::cout << format_table(rs);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
