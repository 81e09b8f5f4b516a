// Command-line front end for graph cluster randomization experiments:
// generate or load graphs, cluster them, compute exposure probabilities,
// draw assignments, estimate effects, and run variance sweeps.
//
// Every command prints a single-line JSON summary (with the fully resolved
// configuration, including seeds) to stdout for scripting. Validation
// failures exit with code 2 and a message on stderr.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcr/gcr.hpp"

using nlohmann::json;

namespace {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

gcr::ExposureSpec parse_spec_or_die(const std::string& text) {
  try {
    return gcr::ExposureSpec::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError(e.what());
  }
}

void emit(const json& summary) { std::cout << summary.dump() << "\n"; }

// responses file: "vertex y1 y0" (simulation) or "vertex y" (observed)
struct ResponsesFile {
  std::vector<double> col1, col2;
  bool two_columns = false;
};

ResponsesFile load_responses(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open responses file: " + path);
  ResponsesFile rf;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    long long v;
    double a, b;
    if (!(ls >> v)) continue;
    if (!(ls >> a))
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected a response value");
    bool has_b = static_cast<bool>(ls >> b);
    if (line_no == 1 || rf.col1.empty()) rf.two_columns = has_b;
    if (has_b != rf.two_columns)
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": inconsistent column count");
    if (v != static_cast<long long>(rf.col1.size()))
      throw ValidationError(path + ": vertex ids must be dense from 0");
    rf.col1.push_back(a);
    if (has_b) rf.col2.push_back(b);
  }
  if (rf.col1.empty()) throw ValidationError(path + ": no responses");
  return rf;
}

int run(int argc, char** argv) {
  CLI::App app{"graph cluster randomization toolkit"};
  app.require_subcommand(1);

  // ---- gen-graph ----
  auto* gen = app.add_subcommand("gen-graph", "generate a synthetic graph");
  std::string family = "cycle", gen_out;
  int gen_n = 0, gen_k = 1, gen_dim = 2;
  double gen_radius = 0.1;
  std::uint64_t gen_seed = 0;
  gen->add_option("--family", family, "cycle | cycle-power | rgg")->required();
  gen->add_option("--n", gen_n, "number of vertices")->required();
  gen->add_option("--k", gen_k, "cycle-power order");
  gen->add_option("--radius", gen_radius, "rgg connection radius");
  gen->add_option("--dim", gen_dim, "rgg dimension");
  gen->add_option("--seed", gen_seed, "rgg point seed");
  gen->add_option("--out", gen_out, "output edge-list path")->required();

  // ---- growth ----
  auto* growth = app.add_subcommand("growth", "restricted-growth diagnostics");
  std::string growth_graph;
  int growth_rmax = 6;
  growth->add_option("--graph", growth_graph)->required();
  growth->add_option("--rmax", growth_rmax);

  // ---- cluster ----
  auto* cluster = app.add_subcommand("cluster", "partition a graph");
  std::string cl_graph, cl_method, cl_scan = "index", cl_out;
  int cl_block = 1;
  std::uint64_t cl_seed = 0;
  cluster->add_option("--graph", cl_graph)->required();
  cluster->add_option("--method", cl_method, "singleton | blocks | net3")->required();
  cluster->add_option("--block-size", cl_block);
  cluster->add_option("--scan", cl_scan, "index | random");
  cluster->add_option("--seed", cl_seed);
  cluster->add_option("--out", cl_out)->required();

  // ---- probs ----
  auto* probs = app.add_subcommand("probs", "exposure probability table");
  std::string pr_graph, pr_clusters, pr_spec, pr_out;
  double pr_p = 0.5;
  long long pr_mc = 0;
  std::uint64_t pr_seed = 0;
  bool pr_no_joints = false;
  probs->add_option("--graph", pr_graph)->required();
  probs->add_option("--clusters", pr_clusters)->required();
  probs->add_option("--spec", pr_spec,
                    "full | abs:<k> | frac:<q> | component | kcore:<k> | fqcore:<q>")
      ->required();
  probs->add_option("--p", pr_p)->required();
  probs->add_option("--mc", pr_mc, "Monte Carlo replicates (core specs)");
  probs->add_option("--seed", pr_seed);
  probs->add_flag("--no-joints", pr_no_joints, "skip joint probabilities");
  probs->add_option("--out", pr_out)->required();

  // ---- assign ----
  auto* assign = app.add_subcommand("assign", "draw a cluster randomization");
  std::string as_clusters, as_out;
  double as_p = 0.5;
  std::uint64_t as_seed = 0;
  bool as_seed_set = false;
  assign->add_option("--clusters", as_clusters)->required();
  assign->add_option("--p", as_p)->required();
  assign->add_option("--seed", as_seed)->required()
      ->each([&](const std::string&) { as_seed_set = true; });
  assign->add_option("--out", as_out)->required();

  // ---- estimate ----
  auto* estimate = app.add_subcommand("estimate", "Horvitz-Thompson estimate");
  std::string es_graph, es_probs, es_assignment, es_responses, es_spec, es_out;
  estimate->add_option("--graph", es_graph)->required();
  estimate->add_option("--probs", es_probs)->required();
  estimate->add_option("--assignment", es_assignment)->required();
  estimate->add_option("--responses", es_responses,
                       "lines: \"vertex y\" or \"vertex y1 y0\"")->required();
  estimate->add_option("--spec", es_spec)->required();
  estimate->add_option("--out", es_out, "estimate JSON output");

  // ---- simulate ----
  auto* simulate = app.add_subcommand(
      "simulate", "replicate randomizations against known potential outcomes");
  std::string si_graph, si_clusters, si_spec, si_responses, si_out;
  double si_p = 0.5, si_y1 = 1.0, si_y0 = 0.0;
  long long si_reps = 10000;
  std::uint64_t si_seed = 0;
  simulate->add_option("--graph", si_graph)->required();
  simulate->add_option("--clusters", si_clusters)->required();
  simulate->add_option("--spec", si_spec)->required();
  simulate->add_option("--p", si_p)->required();
  simulate->add_option("--y1", si_y1, "uniform treatment response");
  simulate->add_option("--y0", si_y0, "uniform control response");
  simulate->add_option("--responses", si_responses,
                       "per-vertex potential outcomes (overrides --y1/--y0)");
  simulate->add_option("--reps", si_reps)->required();
  simulate->add_option("--seed", si_seed)->required();
  simulate->add_option("--out", si_out, "JSON output path");

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "cycle-power variance sweep");
  gcr::SweepConfig cfg;
  std::string sw_spec = "full", sw_out;
  sweep->add_option("--n", cfg.n)->required();
  sweep->add_option("--k-list", cfg.k_list, "cycle-power orders")->required();
  sweep->add_option("--c-list", cfg.c_list, "block sizes")->required();
  sweep->add_option("--p", cfg.p);
  sweep->add_option("--spec", sw_spec);
  sweep->add_option("--y1", cfg.y1);
  sweep->add_option("--y0", cfg.y0);
  sweep->add_option("--reps", cfg.replicates)->required();
  sweep->add_option("--seed", cfg.seed)->required();
  sweep->add_option("--out", sw_out, "CSV output path")->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    gcr::Graph g;
    if (family == "cycle") g = gcr::gen_cycle(gen_n);
    else if (family == "cycle-power") g = gcr::gen_cycle_power(gen_n, gen_k);
    else if (family == "rgg")
      g = gcr::gen_random_geometric(gen_n, gen_radius, gen_dim, gen_seed);
    else throw ValidationError("unknown graph family: " + family);
    gcr::save_graph_file(g, gen_out);
    json j{{"command", "gen-graph"}, {"family", family}, {"n", g.num_vertices()},
           {"edges", g.num_edges()}, {"out", gen_out}};
    if (family == "cycle-power") j["k"] = gen_k;
    if (family == "rgg") {
      j["radius"] = gen_radius;
      j["dim"] = gen_dim;
      j["seed"] = gen_seed;
    }
    emit(j);
    return 0;
  }

  if (growth->parsed()) {
    gcr::Graph g = gcr::load_graph_file(growth_graph);
    gcr::GrowthReport rep = gcr::growth_report(g, growth_rmax);
    emit(json{{"command", "growth"}, {"graph", growth_graph},
              {"rmax", growth_rmax}, {"max_ratio", rep.max_ratio},
              {"kappa_hat", rep.kappa_hat}});
    return 0;
  }

  if (cluster->parsed()) {
    gcr::Graph g = gcr::load_graph_file(cl_graph);
    gcr::Clustering cl;
    json extra = json::object();
    if (cl_method == "singleton") {
      cl = gcr::singleton_clustering(g);
    } else if (cl_method == "blocks") {
      cl = gcr::cycle_block_clustering(g.num_vertices(), cl_block);
      extra["block_size"] = cl_block;
    } else if (cl_method == "net3") {
      gcr::ScanOrder order = cl_scan == "random" ? gcr::ScanOrder::Random
                                                 : gcr::ScanOrder::ByIndex;
      if (cl_scan != "random" && cl_scan != "index")
        throw ValidationError("unknown scan order: " + cl_scan);
      auto trace = gcr::net3_clustering(g, order, cl_seed);
      cl = std::move(trace.clustering);
      extra["centers"] = trace.centers;
      extra["scan"] = cl_scan;
      if (cl_scan == "random") extra["seed"] = cl_seed;
    } else {
      throw ValidationError("unknown clustering method: " + cl_method);
    }
    gcr::save_clustering_file(cl, cl_out);
    json j{{"command", "cluster"}, {"graph", cl_graph}, {"method", cl_method},
           {"num_clusters", cl.num_clusters()}, {"out", cl_out}};
    j.update(extra);
    emit(j);
    return 0;
  }

  if (probs->parsed()) {
    gcr::Graph g = gcr::load_graph_file(pr_graph);
    gcr::Clustering cl = gcr::load_clustering_file(pr_clusters);
    if (cl.num_vertices() != g.num_vertices())
      throw ValidationError("clustering size does not match graph");
    gcr::ExposureSpec spec = parse_spec_or_die(pr_spec);
    if (!(pr_p > 0.0 && pr_p < 1.0))
      throw ValidationError("p must be in (0,1): degenerate randomization");
    gcr::ProbabilityTable pt;
    if (spec.is_neighborhood() && pr_mc == 0) {
      auto ew = gcr::exposure_weights(g, cl);
      pt = gcr::build_probability_table(ew, pr_p, spec, !pr_no_joints);
    } else {
      if (pr_mc <= 0)
        throw ValidationError("spec '" + pr_spec +
                              "' has no exact computation; pass --mc N");
      pt = gcr::build_probability_table_mc(g, cl, pr_p, spec, pr_mc, pr_seed);
    }
    gcr::save_probability_table(pt, pr_out);
    json j{{"command", "probs"}, {"graph", pr_graph}, {"clusters", pr_clusters},
           {"spec", pr_spec}, {"p", pr_p},
           {"method", pt.method == gcr::ProbMethod::Exact ? "exact" : "monte-carlo"},
           {"out", pr_out}};
    if (pt.method == gcr::ProbMethod::MonteCarlo) {
      j["mc"] = pr_mc;
      j["seed"] = pr_seed;
    }
    emit(j);
    return 0;
  }

  if (assign->parsed()) {
    gcr::Clustering cl = gcr::load_clustering_file(as_clusters);
    if (!(as_p > 0.0 && as_p < 1.0))
      throw ValidationError("p must be in (0,1): degenerate randomization");
    gcr::Assignment a = gcr::sample_assignment(cl, as_p, as_seed);
    gcr::save_assignment(a, as_out);
    int treated = 0;
    for (char c : a.cluster_coins) treated += c;
    emit(json{{"command", "assign"}, {"clusters", as_clusters}, {"p", as_p},
              {"seed", as_seed}, {"treated_clusters", treated},
              {"num_clusters", cl.num_clusters()}, {"out", as_out}});
    (void)as_seed_set;
    return 0;
  }

  if (estimate->parsed()) {
    gcr::Graph g = gcr::load_graph_file(es_graph);
    gcr::ProbabilityTable pt = gcr::load_probability_table(es_probs);
    if (static_cast<int>(pt.pi1.size()) != g.num_vertices())
      throw ValidationError("probability table size does not match graph");
    std::vector<char> z = gcr::load_assignment_bits(es_assignment);
    if (static_cast<int>(z.size()) != g.num_vertices())
      throw ValidationError("assignment size does not match graph");
    gcr::ExposureSpec spec = parse_spec_or_die(es_spec);
    ResponsesFile rf = load_responses(es_responses);
    if (static_cast<int>(rf.col1.size()) != g.num_vertices())
      throw ValidationError("responses size does not match graph");

    gcr::ExposureEvaluator ev(g, spec);
    gcr::ObservedExperiment obs;
    obs.exposed1 = ev.indicators(z, gcr::Arm::Treatment);
    obs.exposed0 = ev.indicators(z, gcr::Arm::Control);
    obs.response.resize(g.num_vertices(), 0.0);
    for (int i = 0; i < g.num_vertices(); ++i) {
      if (rf.two_columns)
        obs.response[i] = obs.exposed1[i] ? rf.col1[i]
                         : obs.exposed0[i] ? rf.col2[i] : 0.0;
      else
        obs.response[i] = rf.col1[i];
    }
    gcr::EffectEstimate est;
    try {
      est = gcr::ht_estimate(obs, pt, g.num_vertices());
    } catch (const std::exception& e) {
      throw ValidationError(e.what());
    }
    json j{{"command", "estimate"}, {"spec", es_spec},
           {"tau_hat", est.tau_hat},
           {"arm_totals", {{"y1", est.y1_total}, {"y0", est.y0_total}}},
           {"exposed_counts", {{"treatment", est.exposed1_count},
                               {"control", est.exposed0_count}}},
           {"probs_method",
            pt.method == gcr::ProbMethod::Exact ? "exact" : "monte-carlo"}};
    if (!es_out.empty()) {
      std::ofstream out(es_out);
      out << j.dump(2) << "\n";
      j["out"] = es_out;
    }
    emit(j);
    return 0;
  }

  if (simulate->parsed()) {
    gcr::Graph g = gcr::load_graph_file(si_graph);
    gcr::Clustering cl = gcr::load_clustering_file(si_clusters);
    if (cl.num_vertices() != g.num_vertices())
      throw ValidationError("clustering size does not match graph");
    gcr::ExposureSpec spec = parse_spec_or_die(si_spec);
    if (!(si_p > 0.0 && si_p < 1.0))
      throw ValidationError("p must be in (0,1): degenerate randomization");
    gcr::PotentialOutcomes po;
    if (!si_responses.empty()) {
      ResponsesFile rf = load_responses(si_responses);
      if (!rf.two_columns)
        throw ValidationError("simulation responses need \"vertex y1 y0\" lines");
      if (static_cast<int>(rf.col1.size()) != g.num_vertices())
        throw ValidationError("responses size does not match graph");
      po.y1 = std::move(rf.col1);
      po.y0 = std::move(rf.col2);
    } else {
      po = gcr::PotentialOutcomes::uniform(g.num_vertices(), si_y1, si_y0);
    }
    gcr::McVariance mv =
        gcr::variance_mc(g, cl, po, si_p, spec, si_reps, si_seed);
    json j{{"command", "simulate"}, {"graph", si_graph},
           {"clusters", si_clusters}, {"spec", si_spec}, {"p", si_p},
           {"reps", si_reps}, {"seed", si_seed},
           {"tau", gcr::true_effect(po)},
           {"mean", mv.mean}, {"mean_stderr", mv.mean_stderr},
           {"var", mv.variance}, {"var_stderr", mv.var_stderr},
           {"method", "monte-carlo"}};
    if (!si_out.empty()) {
      std::ofstream out(si_out);
      out << j.dump(2) << "\n";
      j["out"] = si_out;
    }
    emit(j);
    return 0;
  }

  if (sweep->parsed()) {
    cfg.spec = parse_spec_or_die(sw_spec);
    if (!(cfg.p > 0.0 && cfg.p < 1.0))
      throw ValidationError("p must be in (0,1): degenerate randomization");
    for (int c : cfg.c_list)
      if (c < 1 || c > cfg.n) throw ValidationError("block size out of range");
    auto rows = gcr::cycle_power_sweep(cfg);
    std::ofstream out(sw_out);
    if (!out) throw ValidationError("cannot open output file: " + sw_out);
    gcr::write_sweep_csv(rows, out);
    emit(json{{"command", "sweep"}, {"n", cfg.n}, {"k_list", cfg.k_list},
              {"c_list", cfg.c_list}, {"p", cfg.p}, {"spec", sw_spec},
              {"y1", cfg.y1}, {"y0", cfg.y0}, {"reps", cfg.replicates},
              {"seed", cfg.seed}, {"rows", rows.size()}, {"out", sw_out}});
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
