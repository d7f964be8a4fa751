// Acceptance gate: one line per criterion, exit 0 iff all pass.

#include <nipstab/harness.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

using namespace nipstab;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int index, const char* title, bool ok, const std::string& note) {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", index, title,
              note.empty() ? "" : " -- ", note.c_str());
  if (!ok) ++failures;
}

perturbed_map seeded_map(const scheme& s, double theta, double p,
                         std::uint64_t seed, nlohmann::json* inst_out = nullptr) {
  experiment_config cfg;
  cfg.id = "acc";
  cfg.kind = experiment_kind::stability_hilbert;
  cfg.sch = &s;
  cfg.theta = theta;
  cfg.p = p;
  cfg.dim_x = cfg.dim_y = 4;
  cfg.seed = seed;
  nlohmann::json inst = generate_instance(cfg);
  if (inst_out) *inst_out = inst;
  return map_from_instance(inst, cfg);
}

cvector sample_x(std::uint64_t seed, int i, std::size_t dim = 4) {
  rng r = rng::for_sample(seed, 41, static_cast<std::uint64_t>(i));
  return random_vector_with_norm(r, dim, 0.1, 3.0);
}

// Shared state across the stability criteria so 7 and 8 can report on
// every run they piggyback on.
bool gap_law_all_ok = true;       // criterion 7, DOUBLING runs
double gap_law_worst_excess = 0.0;
bool uniqueness_all_ok = true;    // criterion 8, all stability runs
double uniqueness_worst_excess = -1e300;

void record_uniqueness(const perturbed_map& f, const scheme& s,
                       const cvector& x, int l_max) {
  cvector u1 = approximant(f, s, x, l_max);
  cvector u2 = approximant(f, s, x, l_max + 2);
  double gap = (u1 - u2).norm();
  double tail = analytic_tail_bound(s, f.theta(), f.p(), x.norm(), l_max);
  if (gap > tail + 1e-12) uniqueness_all_ok = false;
  uniqueness_worst_excess = std::max(uniqueness_worst_excess, gap - tail);
}

void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst = 0.0;
  for (int n = 2; n <= 4; ++n)
    for (int dim = n; dim <= 6; ++dim) {
      auto rep = check_axioms(n_inner_form::gram(n, dim), 200,
                              static_cast<std::uint64_t>(100 * n + dim), 1e-9);
      ok = ok && rep.all_pass();
      worst = std::max(worst, rep.max_violation());
    }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  ok = ok && secs < 10.0;
  std::ostringstream note;
  note << "max violation " << fmt17(worst) << ", runtime " << secs << " s";
  report(1, "axiom certification nI1-nI7, (n,dim) in {2,3,4}x{n..6}", ok,
         note.str());
}

// Shared driver for criteria 2 and 3: 20 seeded maps, 500 points each,
// explicit closed-form bound check with 1e-6 slack.
struct ascending_result {
  bool bound_ok = true;
  double worst_margin = -1e300; // defect - bound (should stay <= 1e-6)
  bool ortho_ok = true;
  double worst_ortho = 0.0;
};

ascending_result run_ascending(const scheme& s, std::uint64_t seed_base,
                               bool check_ortho) {
  ascending_result out;
  const int l_max = 40;
  for (int m = 0; m < 20; ++m) {
    perturbed_map f = seeded_map(s, 1.0, 0.5, seed_base + m);
    for (int i = 0; i < 500; ++i) {
      cvector x = sample_x(seed_base + m, i);
      approximation_run run = direct_method(f, s, x, l_max);
      double bound = closed_form_bound(s, 1.0, 0.5, x.norm());
      if (run.defect_observed > bound + 1e-6) out.bound_ok = false;
      out.worst_margin = std::max(out.worst_margin,
                                  run.defect_observed - bound);
      if (s.id == scheme_id::doubling) {
        if (!run.gap_law_ok) gap_law_all_ok = false;
        for (std::size_t l = 0; l < run.gaps.size(); ++l)
          gap_law_worst_excess = std::max(gap_law_worst_excess,
                                          run.gaps[l] - run.gap_bounds[l]);
      }
      if (i < 25) record_uniqueness(f, s, x, l_max);
    }
    if (check_ortho) {
      auto u = [&](const cvector& v) { return approximant(f, s, v, l_max); };
      for (int i = 0; i < 500; ++i) {
        rng r = rng::for_sample(seed_base + m, 24, static_cast<std::uint64_t>(i));
        cvector x = random_vector_with_norm(r, 4, 0.25, 2.0);
        cvector y = random_vector_with_norm(r, 4, 0.25, 2.0);
        double d = defect_orthogonality(u, x, y);
        out.worst_ortho = std::max(out.worst_ortho, d);
        if (d > 1e-5) out.ortho_ok = false;
      }
    }
  }
  return out;
}

void criterion_2() {
  auto res = run_ascending(scheme::doubling(), 2000, true);
  std::ostringstream note;
  note << "worst margin over 2/(2-sqrt2)*sqrt|x| bound " << fmt17(res.worst_margin)
       << ", worst orthogonality defect " << fmt17(res.worst_ortho);
  report(2, "DOUBLING bound + orthogonality, 20 maps x 500 points",
         res.bound_ok && res.ortho_ok, note.str());
}

void criterion_3() {
  auto res = run_ascending(scheme::jensen_tripling(), 3000, false);
  std::ostringstream note;
  note << "worst margin over (3+sqrt3)/(3-sqrt3)*sqrt|x| bound "
       << fmt17(res.worst_margin);
  report(3, "JENSEN_TRIPLING bound, 20 maps x 500 points", res.bound_ok,
         note.str());
}

void criterion_4() {
  const scheme& s = scheme::jensen_shrinking();
  const int l_max = 30;
  bool bound_ok = true;
  double worst_margin = -1e300;
  for (int m = 0; m < 5; ++m) {
    perturbed_map f = seeded_map(s, 1.0, 5.0, 4000 + m);
    for (int i = 0; i < 200; ++i) {
      cvector x = sample_x(4000 + m, i);
      approximation_run run = direct_method(f, s, x, l_max);
      double bound = 1.025 * std::pow(x.norm(), 5.0);
      if (run.defect_observed > bound + 1e-6) bound_ok = false;
      worst_margin = std::max(worst_margin, run.defect_observed - bound);
      if (i < 25) record_uniqueness(f, s, x, l_max);
    }
  }
  perturbed_map f = seeded_map(s, 1.0, 5.0, 4100);
  auto form = n_inner_form::gram(2, 4);
  double worst_nary = 0.0;
  auto u = [&](const cvector& v) { return approximant(f, s, v, l_max); };
  for (int i = 0; i < 200; ++i) {
    rng r = rng::for_sample(4100, 25, static_cast<std::uint64_t>(i));
    std::vector<cvector> xs;
    for (int j = 0; j < 3; ++j)
      xs.push_back(random_vector_with_norm(r, 4, 0.25, 2.0));
    worst_nary = std::max(worst_nary, defect_n_orthogonality(u, xs, form, form));
  }
  std::ostringstream note;
  note << "worst margin over 1.025*|x|^5 bound " << fmt17(worst_margin)
       << ", worst n-ary defect " << fmt17(worst_nary);
  report(4, "JENSEN_SHRINKING bound (p=5, n=2) + n-ary preservation",
         bound_ok && worst_nary <= 1e-4, note.str());
}

void criterion_5() {
  bool ok = true;
  double worst_rel = 0.0;
  for (int i = 0; i < 100; ++i) {
    rng r = rng::for_sample(5000, 0, static_cast<std::uint64_t>(i));
    double theta = r.uniform(0.0, 3.0);
    const scheme* schemes[] = {&scheme::doubling(), &scheme::jensen_tripling(),
                               &scheme::jensen_shrinking()};
    const scheme& s = *schemes[r.bits() % 3];
    double p = s.ascending ? r.uniform(0.0, 0.999) : r.uniform(2.001, 8.0);
    cvector x = random_vector_with_norm(r, 3, 0.2, 3.0);
    auto cf = control_function::power(theta, p);
    double derived;
    if (s.id == scheme_id::doubling) {
      derived = 0.5 * phi_tilde(cf, s, std::vector<cvector>{x, x}).value;
    } else if (s.id == scheme_id::jensen_tripling) {
      derived = jun_lee_bound(cf, x);
    } else {
      cvector x3 = cscalar(1.0 / 3.0) * x;
      derived = phi_tilde(cf, s, std::vector<cvector>{x3, -x3}).value +
                phi_tilde(cf, s, std::vector<cvector>{-x3, x}).value;
    }
    double closed = closed_form_bound(s, theta, p, x.norm());
    double rel = std::abs(closed - derived) / std::max(std::abs(closed), 1e-30);
    worst_rel = std::max(worst_rel, rel);
    if (rel > 1e-12) ok = false;
  }
  // p = 0 on a unit vector: both ascending formulas reduce to exactly 2 theta.
  for (double theta : {0.25, 1.0, 3.5}) {
    if (closed_form_bound(scheme::doubling(), theta, 0.0, 1.0) != 2.0 * theta)
      ok = false;
    if (closed_form_bound(scheme::jensen_tripling(), theta, 0.0, 1.0) !=
        2.0 * theta)
      ok = false;
  }
  std::ostringstream note;
  note << "worst relative mismatch " << fmt17(worst_rel);
  report(5, "closed-form bounds match series-derived bounds", ok, note.str());
}

void criterion_6() {
  bool ok = true;
  double worst_recovery = 0.0;
  induced_inner_product ortho(n_inner_form::gram(2, 2),
                              {cvector::unit(2, 0), cvector::unit(2, 1)}, 1.0);
  for (int i = 0; i < 1000; ++i) {
    rng r = rng::for_sample(6000, 0, static_cast<std::uint64_t>(i));
    cvector x = random_vector(r, 2, 2.0);
    cvector y = random_vector(r, 2, 2.0);
    double d = std::abs(ortho(x, y) - inner(x, y));
    worst_recovery = std::max(worst_recovery, d);
    if (d > 1e-10) ok = false;
  }

  double worst_cond = 0.0;
  struct Case { int n; int dim; } cases[] = {{2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}};
  for (const auto& c : cases) {
    experiment_config cfg;
    cfg.id = "acc_ind";
    cfg.kind = experiment_kind::induce;
    cfg.n = c.n;
    cfg.dim_x = cfg.dim_y = c.dim;
    cfg.seed = static_cast<std::uint64_t>(6100 + 10 * c.n + c.dim);
    nlohmann::json inst = generate_instance(cfg);
    std::vector<cvector> anchors;
    for (const auto& a : inst.at("anchors"))
      anchors.push_back(cvector_from_json(a));
    induced_inner_product ii(n_inner_form::gram(c.n, c.dim), anchors, 1.0);
    if (ii.condition_estimate() >= 1e6) ok = false;
    worst_cond = std::max(worst_cond, ii.condition_estimate());
    auto rep = verify_inner_product(ii, 200, cfg.seed, 1e-9);
    if (!rep.all_pass()) ok = false;
  }
  std::ostringstream note;
  note << "worst recovery error " << fmt17(worst_recovery)
       << ", worst anchor condition " << fmt17(worst_cond);
  report(6, "Gunawan induced inner product: recovery + axioms", ok, note.str());
}

void criterion_7() {
  std::ostringstream note;
  note << "worst gap excess over telescoping law " << fmt17(gap_law_worst_excess)
       << " (tolerance 1e-12), all DOUBLING runs from criterion 2";
  report(7, "convergence law |U_{l+1}-U_l| <= 2^-(l+1) phi(2^l x, 2^l x)",
         gap_law_all_ok, note.str());
}

void criterion_8() {
  std::ostringstream note;
  note << "worst gap minus tail " << fmt17(uniqueness_worst_excess)
       << " (allowance 1e-12), across criteria 2-4 runs";
  report(8, "uniqueness surrogate: U_{l_max} vs U_{l_max+2} within analytic tail",
         uniqueness_all_ok, note.str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_9() {
  nlohmann::json suite = {
      {"threads", 1},
      {"experiments",
       {{{"id", "ax"}, {"kind", "AXIOMS"}, {"n", 3}, {"dim", 4},
         {"samples", 50}, {"seed", 90}, {"tol", 1e-9}},
        {{"id", "ind"}, {"kind", "INDUCE"}, {"n", 2}, {"dim", 3},
         {"samples", 50}, {"seed", 91}, {"tol", 1e-9}},
        {{"id", "sh"}, {"kind", "STABILITY_HILBERT"}, {"scheme", "DOUBLING"},
         {"theta", 1.0}, {"p", 0.5}, {"dim", 4}, {"l_max", 40},
         {"samples", 20}, {"seed", 92}, {"tol", 1e-5}},
        {{"id", "sn"}, {"kind", "STABILITY_NIP"}, {"scheme", "JENSEN_SHRINKING"},
         {"theta", 1.0}, {"p", 5.0}, {"n", 2}, {"dim", 4}, {"l_max", 25},
         {"samples", 20}, {"seed", 93}, {"tol", 1e-4}}}}};
  suite_config cfg = suite_config::from_json(suite);
  fs::path d1 = fs::temp_directory_path() / "nipstab_accept_run1";
  fs::path d2 = fs::temp_directory_path() / "nipstab_accept_run2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  suite_report r1 = run_suite(cfg, d1);
  suite_report r2 = run_suite(cfg, d2);
  bool ok = r1.all_pass() && r2.all_pass();
  for (const char* name : {"ax.csv", "ind.csv", "sh.csv", "sn.csv"})
    if (slurp(d1 / name) != slurp(d2 / name)) ok = false;
  auto strip = [](const fs::path& p) {
    nlohmann::json j = nlohmann::json::parse(slurp(p));
    for (auto& e : j.at("experiments")) e.erase("runtime_ms");
    return j;
  };
  if (strip(d1 / "report.json") != strip(d2 / "report.json")) ok = false;
  fs::remove_all(d1);
  fs::remove_all(d2);
  report(9, "single-threaded suite reruns are byte-identical (CSV artifacts)",
         ok, r1.all_pass() ? "suite verdict pass on both runs"
                           : "suite verdict FAILED");
}

} // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (failures == 0) {
    std::printf("acceptance: all 9 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", failures);
  return 1;
}
