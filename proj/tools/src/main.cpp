#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "commands.hpp"

using namespace csd::cli;

int main(int argc, char** argv) {
  CLI::App app{"csd: exact, peak-based and empirical cluster-size distributions of lattice "
               "random fields"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; [subcommand] sections, flags override");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Master seed for simulation and QMC")
      ->capture_default_str();
  app.add_option("--threads", global.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  app.add_option("--out", global.out, "Output file (theory/estimate) or directory");
  app.add_option("--format", global.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  ShapesArgs shapes;
  auto* cmd_shapes_app = app.add_subcommand("shapes", "Enumerate rooted cluster shapes");
  cmd_shapes_app->add_option("--d", shapes.dim, "Lattice dimension")->capture_default_str();
  cmd_shapes_app->add_option("--conn", shapes.conn, "Connectivity")
      ->check(CLI::IsMember({"nearest", "moore"}))
      ->capture_default_str();
  cmd_shapes_app->add_option("--kmax", shapes.kmax, "Largest size to enumerate")
      ->capture_default_str();
  cmd_shapes_app->add_flag("--full", shapes.full, "Emit the full catalogs as JSON");
  cmd_shapes_app->add_option("--kmax-cap", shapes.cap, "Override the enumeration cap");

  TheoryArgs theory;
  auto* cmd_theory_app =
      app.add_subcommand("theory", "Exact / peak-based cluster-size distributions");
  cmd_theory_app->add_option("--preset", theory.preset, "Model preset")->required();
  cmd_theory_app->add_option("--conn", theory.conn, "Connectivity (default per preset)")
      ->check(CLI::IsMember({"nearest", "moore"}));
  cmd_theory_app->add_option("--u", theory.us, "Threshold(s)")->required()->expected(-1);
  cmd_theory_app->add_option("--kmax", theory.kmax, "Rows to compute")->capture_default_str();
  cmd_theory_app->add_option("--mode", theory.mode,
                             "exact-denominator | truncated | truncated-plus-mc-tail");
  cmd_theory_app->add_flag("--peak", theory.peak, "Peak-based distribution");
  cmd_theory_app->add_option("--anchor", theory.anchor, "Peak anchor site (1D)")
      ->capture_default_str();
  cmd_theory_app->add_option("--qmc-rel-err", theory.qmc_rel_error, "QMC target relative error")
      ->capture_default_str();
  cmd_theory_app->add_option("--mc-draws", theory.mc_draws,
                             "Joint Monte-Carlo draws for chi-squared probabilities")
      ->capture_default_str();
  cmd_theory_app->add_option("--tail-m", theory.tail_m, "Realizations for the MC tail")
      ->capture_default_str();
  cmd_theory_app->add_option("--histogram", theory.histogram, "Write (k, mass) pairs here");

  EstimateArgs est;
  auto* cmd_est_app = app.add_subcommand("estimate", "Empirical estimators on simulations");
  cmd_est_app->add_option("--preset", est.preset, "Model preset")->required();
  cmd_est_app->add_option("--conn", est.conn, "Connectivity (default per preset)")
      ->check(CLI::IsMember({"nearest", "moore"}));
  cmd_est_app->add_option("--u", est.us, "Threshold(s)")->required()->expected(-1);
  cmd_est_app->add_option("-M,--realizations", est.m, "Realizations (0 = preset default)");
  cmd_est_app->add_option("-N,--window", est.window, "Window extents, e.g. 1500 or 300x300");
  cmd_est_app->add_option("--sub", est.sub, "Interior subwindow extents, e.g. 50x50");
  cmd_est_app
      ->add_option("--estimator", est.estimator,
                   "direct | direct-peak | mc-origin | mc-refined | mc-peak | nonstat-peak")
      ->check(CLI::IsMember(
          {"direct", "direct-peak", "mc-origin", "mc-refined", "mc-peak", "nonstat-peak"}))
      ->capture_default_str();
  cmd_est_app->add_option("-k", est.k, "Cluster size for the single-size MC estimators");
  cmd_est_app->add_option("--kmax", est.kmax, "Row cap")->capture_default_str();
  cmd_est_app->add_option("--boundary", est.boundary, "Boundary policy for direct counting")
      ->check(CLI::IsMember({"include-all", "exclude-touching"}))
      ->capture_default_str();
  cmd_est_app->add_option("--stream-every", est.stream_every,
                          "Write partial aggregates every N realizations");
  cmd_est_app->add_option("--dump-fields", est.dump_fields,
                          "Directory for raw realization dumps (f64 + JSON sidecar)");
  cmd_est_app->add_option("--dump-count", est.dump_count, "How many realizations to dump")
      ->capture_default_str();
  cmd_est_app->add_option("--dump-clusters", est.dump_clusters,
                          "Write the first realization's cluster labeling as JSON");

  CompareArgs cmp;
  auto* cmd_cmp_app = app.add_subcommand("compare", "Theory vs simulation comparison report");
  cmd_cmp_app->add_option("--preset", cmp.preset, "Model preset")->required();
  cmd_cmp_app->add_option("--conn", cmp.conn, "Connectivity (default per preset)")
      ->check(CLI::IsMember({"nearest", "moore"}));
  cmd_cmp_app->add_option("--u", cmp.us, "Threshold(s)")->required()->expected(-1);
  cmd_cmp_app->add_option("--kmax", cmp.kmax, "Rows to compare")->capture_default_str();
  cmd_cmp_app->add_option("-M,--realizations", cmp.m, "Realizations (0 = preset default)");
  cmd_cmp_app->add_option("-N,--window", cmp.window, "Window extents");
  cmd_cmp_app->add_option("--tol", cmp.tolerance, "Pass tolerance per row")
      ->capture_default_str();
  cmd_cmp_app->add_option("--qmc-rel-err", cmp.qmc_rel_error, "QMC target relative error")
      ->capture_default_str();
  cmd_cmp_app->add_option("--mc-draws", cmp.mc_draws, "Chi-squared joint MC draws")
      ->capture_default_str();

  ReproduceArgs rep;
  auto* cmd_rep_app =
      app.add_subcommand("reproduce-table", "Re-run a bundled reference experiment");
  cmd_rep_app->add_option("--table", rep.table, "Table id 1-6 (7 = white-noise Moore companion) or key")
      ->required();
  cmd_rep_app->add_option("--scale", rep.scale, "Realization-count scale factor in (0, 1]")
      ->capture_default_str();
  cmd_rep_app->add_option("--exact-kmax", rep.exact_kmax,
                          "Largest size evaluated exactly (MC beyond)")
      ->capture_default_str();
  cmd_rep_app->add_option("--exact-kmax-peak", rep.exact_kmax_peak,
                          "Largest peak size evaluated exactly in 2D (MC beyond)")
      ->capture_default_str();
  cmd_rep_app->add_option("--tol", rep.tolerance, "Gate tolerance (0 = 0.002 1D / 0.005 2D)");
  cmd_rep_app->add_option("--mc-theory-m", rep.mc_theory_m,
                          "Realizations behind the MC theory rows")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::ostringstream cmdline;
  for (int i = 0; i < argc; ++i) cmdline << (i ? " " : "") << argv[i];
  global.command_line = cmdline.str();

  try {
    if (cmd_shapes_app->parsed()) return cmd_shapes(shapes, global);
    if (cmd_theory_app->parsed()) return cmd_theory(theory, global);
    if (cmd_est_app->parsed()) return cmd_estimate(est, global);
    if (cmd_cmp_app->parsed()) return cmd_compare(cmp, global);
    if (cmd_rep_app->parsed()) return cmd_reproduce_table(rep, global);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
