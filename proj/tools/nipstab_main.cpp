// nipstab: batch CLI for n-inner product axiom certification, induced
// inner products, stability runs, and closed-form bound tables.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <nipstab/harness.hpp>

namespace {

int cmd_axioms(int n, int dim, int samples, std::uint64_t seed, double tol) {
  auto form = nipstab::n_inner_form::gram(n, dim);
  auto rep = nipstab::check_axioms(form, samples, seed, tol);
  std::cout << rep.to_json().dump(2) << '\n';
  return rep.all_pass() ? 0 : 1;
}

int cmd_induce(int n, int dim, int samples, std::uint64_t seed, double tol,
               double k) {
  nipstab::experiment_config cfg;
  cfg.id = "induce";
  cfg.kind = nipstab::experiment_kind::induce;
  cfg.n = n;
  cfg.dim_x = cfg.dim_y = dim;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.tol = tol;
  cfg.k = k;
  auto res = nipstab::detail::run_experiment(cfg);
  std::cout << res.details.dump(2) << '\n';
  return res.pass ? 0 : 1;
}

int cmd_stability(const std::string& scheme_name, double theta, double p,
                  int dim, int n, bool nip, int samples, std::uint64_t seed,
                  int l_max, double tol) {
  nipstab::experiment_config cfg;
  cfg.id = "stability";
  cfg.kind = nip ? nipstab::experiment_kind::stability_nip
                 : nipstab::experiment_kind::stability_hilbert;
  cfg.sch = &nipstab::scheme::by_name(scheme_name);
  cfg.theta = theta;
  cfg.p = p;
  cfg.n = n;
  cfg.dim_x = cfg.dim_y = dim;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.l_max = l_max;
  cfg.tol = tol;
  cfg.validate();
  auto res = nipstab::detail::run_experiment(cfg);
  nlohmann::json out = res.details;
  out["verdict"] = res.pass ? "pass" : "fail";
  out["max_violation"] = res.max_violation;
  std::cout << out.dump(2) << '\n';
  return res.pass ? 0 : 1;
}

int cmd_bounds(const std::vector<std::string>& schemes,
               const std::vector<double>& thetas, const std::vector<double>& ps,
               double norm_x, int n) {
  std::printf("%-18s %-10s %-10s %-24s\n", "scheme", "theta", "p", "bound");
  for (const auto& sname : schemes) {
    const auto& s = nipstab::scheme::by_name(sname);
    for (double theta : thetas)
      for (double p : ps) {
        double b = nipstab::closed_form_bound(s, theta, p, norm_x, n);
        std::printf("%-18s %-10g %-10g %s\n", std::string(s.name).c_str(),
                    theta, p, nipstab::fmt17(b).c_str());
      }
  }
  return 0;
}

int cmd_suite(const std::string& config_path, const std::string& out_dir) {
  auto cfg = nipstab::suite_config::from_file(config_path);
  auto report = nipstab::run_suite(cfg, out_dir);
  for (const auto& r : report.results)
    std::cout << r.id << ": " << (r.pass ? "pass" : "fail")
              << " (max_violation=" << nipstab::fmt17(r.max_violation) << ")\n";
  std::cout << (report.all_pass() ? "suite: pass" : "suite: FAIL") << '\n';
  return report.all_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"n-inner product spaces and Cauchy-Rassias stability certification"};
  app.require_subcommand(1);

  // axioms
  int n = 3, dim = 4, samples = 200, l_max = 40;
  std::uint64_t seed = 1;
  double tol = 1e-9, stab_tol = 1e-5, theta = 1.0, p = 0.5, k = 1.0,
         norm_x = 1.0;
  std::string scheme_name = "doubling";
  bool nip = false;

  auto* ax = app.add_subcommand("axioms", "certify the n-inner product axioms on a Gram form");
  ax->add_option("--n", n, "form arity n (2..4)");
  ax->add_option("--dim", dim, "space dimension (n..6)");
  ax->add_option("--samples", samples, "random tuples per axiom");
  ax->add_option("--seed", seed, "experiment seed");
  ax->add_option("--tol", tol, "relative tolerance");

  auto* in = app.add_subcommand("induce", "verify the anchor-induced inner product");
  in->add_option("--n", n, "form arity n (2..4)");
  in->add_option("--dim", dim, "space dimension (n..6)");
  in->add_option("--samples", samples, "random samples per check");
  in->add_option("--seed", seed, "experiment seed");
  in->add_option("--tol", tol, "relative tolerance");
  in->add_option("--k", k, "positive scale of the induced form");

  auto* st = app.add_subcommand("stability", "run a direct-method stability experiment");
  st->add_option("--scheme", scheme_name, "doubling | jensen_tripling | jensen_shrinking");
  st->add_option("--theta", theta, "control amplitude");
  st->add_option("--p", p, "control exponent");
  st->add_option("--dim", dim, "space dimension");
  st->add_option("--n", n, "form arity for --nip");
  st->add_flag("--nip", nip, "certify n-ary (Gram form) preservation");
  st->add_option("--samples", samples, "sample points");
  st->add_option("--seed", seed, "experiment seed");
  st->add_option("--l-max", l_max, "iteration depth");
  st->add_option("--tol", stab_tol, "certification tolerance");

  std::vector<std::string> bound_schemes{"doubling"};
  std::vector<double> bound_thetas{1.0};
  std::vector<double> bound_ps{0.5};
  auto* bd = app.add_subcommand("bounds", "print closed-form stability bound tables");
  bd->add_option("--scheme", bound_schemes, "schemes (repeatable)");
  bd->add_option("--theta", bound_thetas, "theta values (repeatable)");
  bd->add_option("--p", bound_ps, "p values (repeatable)");
  bd->add_option("--norm", norm_x, "||x|| the bound is evaluated at");
  bd->add_option("--n", n, "arity for the shrinking validity interval");

  std::string config_path, out_dir = "report";
  auto* su = app.add_subcommand("suite", "run an experiment suite from a JSON config");
  su->add_option("--config", config_path, "suite config JSON")->required();
  su->add_option("--out", out_dir, "output directory for report.json and CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ax->parsed()) return cmd_axioms(n, dim, samples, seed, tol);
    if (in->parsed()) return cmd_induce(n, dim, samples, seed, tol, k);
    if (st->parsed())
      return cmd_stability(scheme_name, theta, p, dim, n, nip, samples, seed,
                           l_max, stab_tol);
    if (bd->parsed())
      return cmd_bounds(bound_schemes, bound_thetas, bound_ps, norm_x, n);
    if (su->parsed()) return cmd_suite(config_path, out_dir);
  } catch (const nipstab::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
