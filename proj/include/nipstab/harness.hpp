#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "complex_linalg.hpp"
#include "control.hpp"
#include "errors.hpp"
#include "induce.hpp"
#include "nip.hpp"
#include "perturbed_map.hpp"
#include "stability.hpp"

namespace nipstab {

inline constexpr const char* library_version = "0.1.0";
inline constexpr int report_schema_version = 1;

/// 17 significant digits: enough to round-trip a double, so CSV output is
/// diffable across runs.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

enum class experiment_kind { axioms, induce, stability_hilbert, stability_nip };

inline std::string_view to_string(experiment_kind k) {
  switch (k) {
    case experiment_kind::axioms: return "AXIOMS";
    case experiment_kind::induce: return "INDUCE";
    case experiment_kind::stability_hilbert: return "STABILITY_HILBERT";
    case experiment_kind::stability_nip: return "STABILITY_NIP";
  }
  return "?";
}

inline experiment_kind kind_from_string(std::string_view s) {
  if (s == "AXIOMS") return experiment_kind::axioms;
  if (s == "INDUCE") return experiment_kind::induce;
  if (s == "STABILITY_HILBERT") return experiment_kind::stability_hilbert;
  if (s == "STABILITY_NIP") return experiment_kind::stability_nip;
  throw config_error("unknown experiment kind: " + std::string(s));
}

// ---- JSON <-> linear algebra ------------------------------------------

inline nlohmann::json to_json(const cvector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : v.coords()) arr.push_back({c.real(), c.imag()});
  return arr;
}

inline cvector cvector_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw config_error("vector json: bad shape");
  cvector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[i] = cscalar(j[i].at(0).get<double>(), j[i].at(1).get<double>());
  if (!v.is_finite()) throw config_error("vector json: nonfinite entry");
  return v;
}

inline nlohmann::json to_json(const cmatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline cmatrix cmatrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw config_error("matrix json: bad shape");
  cmatrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i)
    for (std::size_t k = 0; k < j[0].size(); ++k)
      m(i, k) = cscalar(j[i][k].at(0).get<double>(), j[i][k].at(1).get<double>());
  return m;
}

// ---- Configuration -----------------------------------------------------

inline constexpr int max_n = 4;
inline constexpr int max_dim = 6;

struct experiment_config {
  std::string id;
  experiment_kind kind = experiment_kind::axioms;
  const scheme* sch = nullptr; // stability kinds only
  double theta = 1.0;
  double p = 0.5;
  double k = 1.0;
  double tol = 1e-9;
  int n = 2;
  int dim_x = 3;
  int dim_y = 3;
  int l_max = 40;
  int samples = 100;
  std::uint64_t seed = 1;

  void validate() const {
    auto fail = [&](const std::string& msg) {
      throw config_error("experiment '" + id + "': " + msg);
    };
    if (samples < 1) fail("samples must be >= 1");
    if (tol <= 0.0) fail("tol must be positive");
    if (theta < 0.0) fail("theta must be >= 0");
    bool nary = kind == experiment_kind::axioms ||
                kind == experiment_kind::induce ||
                kind == experiment_kind::stability_nip;
    if (nary) {
      if (n < 2 || n > max_n) fail("n must be in [2, 4]");
      if (dim_x < n) fail("dim must be >= n");
    }
    if (dim_x < 1 || dim_x > max_dim || dim_y < 1 || dim_y > max_dim)
      fail("dims must be in [1, 6]");
    if (kind == experiment_kind::stability_hilbert ||
        kind == experiment_kind::stability_nip) {
      if (sch == nullptr) fail("scheme is required");
      if (l_max < 1) fail("l_max must be >= 1");
      if (dim_y < dim_x) fail("dim_y must be >= dim_x (isometric linear part)");
      int validity_n = kind == experiment_kind::stability_nip ? n : 1;
      if (!sch->p_valid(p, validity_n))
        fail("p = " + fmt17(p) + " outside validity interval " +
             sch->validity_interval(validity_n) + " of scheme " +
             std::string(sch->name));
    }
  }

  static experiment_config from_json(const nlohmann::json& j) {
    experiment_config c;
    c.id = j.at("id").get<std::string>();
    c.kind = kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("scheme")) c.sch = &scheme::by_name(j["scheme"].get<std::string>());
    if (j.contains("theta")) c.theta = j["theta"].get<double>();
    if (j.contains("p")) c.p = j["p"].get<double>();
    if (j.contains("k")) c.k = j["k"].get<double>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("n")) c.n = j["n"].get<int>();
    if (j.contains("dim")) c.dim_x = c.dim_y = j["dim"].get<int>();
    if (j.contains("dim_x")) c.dim_x = j["dim_x"].get<int>();
    if (j.contains("dim_y")) c.dim_y = j["dim_y"].get<int>();
    if (j.contains("l_max")) c.l_max = j["l_max"].get<int>();
    if (j.contains("samples")) c.samples = j["samples"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    c.validate();
    return c;
  }
};

struct suite_config {
  std::vector<experiment_config> experiments;
  int threads = 1;

  static suite_config from_json(const nlohmann::json& j) {
    suite_config c;
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (c.threads < 1) throw config_error("threads must be >= 1");
    for (const auto& e : j.at("experiments"))
      c.experiments.push_back(experiment_config::from_json(e));
    return c;
  }

  static suite_config from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw config_error("config parse error in " + path.string() + ": " +
                         e.what());
    }
    return from_json(j);
  }
};

// ---- Instance generation ----------------------------------------------

/// Deterministic experiment instance for a (kind, seed, params) triple.
/// Stability instances carry an isometric linear part (random entries on
/// the radius-2 complex disc, orthonormalized) whose seeded perturbation
/// verifiably respects its mode's defect bound; induce instances resample
/// anchors until they are numerically independent and well conditioned.
inline nlohmann::json generate_instance(const experiment_config& cfg) {
  cfg.validate();
  nlohmann::json inst;
  inst["kind"] = std::string(to_string(cfg.kind));
  inst["seed"] = cfg.seed;

  switch (cfg.kind) {
    case experiment_kind::axioms: {
      inst["n"] = cfg.n;
      inst["dim"] = cfg.dim_x;
      break;
    }
    case experiment_kind::induce: {
      inst["n"] = cfg.n;
      inst["dim"] = cfg.dim_x;
      inst["k"] = cfg.k;
      for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt >= 256)
          throw config_error("generate_instance: no well-conditioned anchors");
        rng r = rng::for_sample(cfg.seed, 32, attempt);
        std::vector<cvector> anchors;
        for (int i = 0; i < cfg.n; ++i)
          anchors.push_back(random_vector_with_norm(r, cfg.dim_x, 0.5, 2.0));
        if (numeric_rank(anchors, 1e-10) != cfg.n) continue;
        if (gram_condition_estimate(anchors) >= 1e6) continue;
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& a : anchors) arr.push_back(to_json(a));
        inst["anchors"] = std::move(arr);
        break;
      }
      break;
    }
    case experiment_kind::stability_hilbert:
    case experiment_kind::stability_nip: {
      inst["scheme"] = std::string(cfg.sch->name);
      inst["theta"] = cfg.theta;
      inst["p"] = cfg.p;
      inst["dim_x"] = cfg.dim_x;
      inst["dim_y"] = cfg.dim_y;
      if (cfg.kind == experiment_kind::stability_nip) inst["n"] = cfg.n;
      perturbation_mode mode = mode_for(*cfg.sch);
      inst["mode"] = std::string(to_string(mode));
      for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt >= 16)
          throw config_error("generate_instance: mode check kept failing");
        std::uint64_t map_seed = hash_combine(cfg.seed, attempt);
        rng r = rng::for_sample(map_seed, 31, 0);
        cmatrix lin = random_isometry(r, cfg.dim_y, cfg.dim_x);
        perturbed_map f(lin, cfg.theta, cfg.p, map_seed, mode);
        if (!verify_mode(f, 64, map_seed).pass) continue;
        inst["map_seed"] = map_seed;
        inst["linear"] = to_json(lin);
        break;
      }
      break;
    }
  }
  return inst;
}

inline perturbed_map map_from_instance(const nlohmann::json& inst,
                                       const experiment_config& cfg) {
  return perturbed_map(cmatrix_from_json(inst.at("linear")), cfg.theta, cfg.p,
                       inst.at("map_seed").get<std::uint64_t>(),
                       mode_for(*cfg.sch));
}

// ---- Suite execution ---------------------------------------------------

struct experiment_result {
  std::string id;
  experiment_kind kind = experiment_kind::axioms;
  bool pass = false;
  double max_violation = 0.0;
  double runtime_ms = 0.0;
  std::vector<std::string> csv_rows; // without header
  std::string csv_header;
  nlohmann::json details;
};

namespace detail {

inline experiment_result run_axioms(const experiment_config& cfg) {
  experiment_result res;
  auto form = n_inner_form::gram(cfg.n, cfg.dim_x);
  axiom_report rep = check_axioms(form, cfg.samples, cfg.seed, cfg.tol);
  res.pass = rep.all_pass();
  res.max_violation = rep.max_violation();
  res.details = rep.to_json();
  res.csv_header = "experiment_id,check,samples,max_violation,tol,verdict";
  for (const auto& c : rep.checks) {
    std::ostringstream os;
    os << cfg.id << ',' << c.axiom_id << ',' << c.samples << ','
       << fmt17(c.max_violation) << ',' << fmt17(c.tol) << ','
       << (c.pass() ? "pass" : "fail");
    res.csv_rows.push_back(os.str());
  }
  return res;
}

inline experiment_result run_induce(const experiment_config& cfg) {
  experiment_result res;
  nlohmann::json inst = generate_instance(cfg);
  std::vector<cvector> anchors;
  for (const auto& a : inst.at("anchors")) anchors.push_back(cvector_from_json(a));
  induced_inner_product ii(n_inner_form::gram(cfg.n, cfg.dim_x), anchors, cfg.k);
  axiom_report rep = verify_inner_product(ii, cfg.samples, cfg.seed, cfg.tol);
  res.pass = rep.all_pass();
  res.max_violation = rep.max_violation();
  res.details = rep.to_json();
  res.csv_header =
      "experiment_id,check,samples,max_violation,tol,condition_estimate,verdict";
  for (const auto& c : rep.checks) {
    std::ostringstream os;
    os << cfg.id << ',' << c.axiom_id << ',' << c.samples << ','
       << fmt17(c.max_violation) << ',' << fmt17(c.tol) << ','
       << fmt17(rep.condition_estimate) << ',' << (c.pass() ? "pass" : "fail");
    res.csv_rows.push_back(os.str());
  }
  return res;
}

inline experiment_result run_stability(const experiment_config& cfg) {
  experiment_result res;
  nlohmann::json inst = generate_instance(cfg);
  perturbed_map f = map_from_instance(inst, cfg);
  const scheme& s = *cfg.sch;

  res.csv_header =
      "experiment_id,sample,norm_x,defect_observed,bound,tail,gap_law,verdict";
  bool all_runs_pass = true;
  double worst = 0.0;
  for (int i = 0; i < cfg.samples; ++i) {
    rng r = rng::for_sample(cfg.seed, 41, static_cast<std::uint64_t>(i));
    cvector x = random_vector_with_norm(r, cfg.dim_x, 0.1, 3.0);
    approximation_run run = direct_method(f, s, x, cfg.l_max);
    all_runs_pass = all_runs_pass && run.pass;
    worst = std::max(worst, run.defect_observed - run.defect_bound_theoretical -
                                run.tail_bound);
    std::ostringstream os;
    os << cfg.id << ',' << i << ',' << fmt17(x.norm()) << ','
       << fmt17(run.defect_observed) << ','
       << fmt17(run.defect_bound_theoretical) << ',' << fmt17(run.tail_bound)
       << ',' << (run.gap_law_ok ? "pass" : "fail") << ','
       << (run.pass ? "pass" : "fail");
    res.csv_rows.push_back(os.str());
  }

  mode_check_report mode_rep = verify_mode(f, 256, cfg.seed);
  linearity_report lin =
      certify_linearity(f, s, cfg.l_max, 5, cfg.seed, cfg.tol);
  preservation_report pres;
  if (cfg.kind == experiment_kind::stability_nip) {
    auto fx = n_inner_form::gram(cfg.n, cfg.dim_x);
    auto fy = n_inner_form::gram(cfg.n, cfg.dim_y);
    pres = certify_preservation(f, s, fx, fy, cfg.l_max, cfg.samples, cfg.seed,
                                cfg.tol);
  } else {
    pres = certify_preservation(f, s, cfg.l_max, cfg.samples, cfg.seed, cfg.tol);
  }

  res.pass = all_runs_pass && mode_rep.pass && lin.pass && pres.pass;
  res.max_violation = std::max({worst, 0.0, lin.max_additivity_violation,
                                lin.max_homogeneity_violation});
  res.details = {
      {"mode_check", {{"samples", mode_rep.samples},
                      {"max_excess", mode_rep.max_excess},
                      {"pass", mode_rep.pass}}},
      {"linearity", {{"samples", lin.samples},
                     {"max_additivity_violation", lin.max_additivity_violation},
                     {"max_homogeneity_violation", lin.max_homogeneity_violation},
                     {"max_uniqueness_gap", lin.max_uniqueness_gap},
                     {"uniqueness_tail_bound", lin.uniqueness_tail_bound},
                     {"uniqueness_ok", lin.uniqueness_ok},
                     {"pass", lin.pass}}},
      {"preservation", {{"samples", pres.samples},
                        {"max_defect", pres.max_defect},
                        {"max_allowed", pres.max_allowed},
                        {"slack", pres.slack},
                        {"pass", pres.pass}}},
      {"runs_pass", all_runs_pass}};
  return res;
}

inline experiment_result run_experiment(const experiment_config& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  experiment_result res;
  switch (cfg.kind) {
    case experiment_kind::axioms: res = run_axioms(cfg); break;
    case experiment_kind::induce: res = run_induce(cfg); break;
    case experiment_kind::stability_hilbert:
    case experiment_kind::stability_nip: res = run_stability(cfg); break;
  }
  res.id = cfg.id;
  res.kind = cfg.kind;
  res.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return res;
}

} // namespace detail

struct suite_report {
  std::vector<experiment_result> results;
  int threads = 1;

  bool all_pass() const {
    return std::all_of(results.begin(), results.end(),
                       [](const experiment_result& r) { return r.pass; });
  }

  nlohmann::json to_json(bool include_runtimes = true) const {
    nlohmann::json exps = nlohmann::json::array();
    for (const auto& r : results) {
      nlohmann::json e = {{"id", r.id},
                          {"kind", std::string(to_string(r.kind))},
                          {"verdict", r.pass ? "pass" : "fail"},
                          {"max_violation", r.max_violation},
                          {"details", r.details}};
      if (include_runtimes) e["runtime_ms"] = r.runtime_ms;
      exps.push_back(std::move(e));
    }
    return {{"schema_version", report_schema_version},
            {"library_version", library_version},
            {"threads", threads},
            {"all_pass", all_pass()},
            {"experiments", std::move(exps)}};
  }
};

/// Execute every experiment and write report.json plus one CSV detail file
/// per experiment into out_dir. Per-experiment results are deterministic
/// regardless of thread count; only runtime_ms fields vary between runs.
inline suite_report run_suite(const suite_config& cfg,
                              const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  suite_report report;
  report.threads = cfg.threads;
  report.results.resize(0);

  if (cfg.threads <= 1) {
    for (const auto& e : cfg.experiments)
      report.results.push_back(detail::run_experiment(e));
  } else {
    std::vector<std::future<experiment_result>> futures;
    for (const auto& e : cfg.experiments)
      futures.push_back(std::async(std::launch::async,
                                   [&e] { return detail::run_experiment(e); }));
    for (auto& f : futures) report.results.push_back(f.get());
  }

  for (const auto& r : report.results) {
    std::ofstream csv(out_dir / (r.id + ".csv"));
    csv << r.csv_header << '\n';
    for (const auto& row : r.csv_rows) csv << row << '\n';
  }
  std::ofstream out(out_dir / "report.json");
  out << report.to_json().dump(2) << '\n';
  return report;
}

} // namespace nipstab
