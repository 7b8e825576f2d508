#include "mhdbl/commands.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <thread>

#include <json.hpp>

#include "mhdbl/mms.hpp"

namespace mhdbl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Stack {
  GridPtr grid;
  ShearProfile profile;
  WeightFunction weight;
  LinearContext ctx;
};

Stack build_stack(const RunConfig& cfg, double eps) {
  auto grid = HalfLineGrid::build(eps, cfg.y_max, cfg.n_nodes, cfg.layer_fraction);
  ShearProfile profile =
      cfg.profile_family == "user-tabulated"
          ? build_profile_tabulated(cfg.profile_table, grid)
          : build_profile(cfg.profile_family, cfg.profile_params, grid);
  WeightFunction weight = WeightFunction::build(profile, grid);
  Stack st{grid, std::move(profile), std::move(weight), LinearContext{}};
  st.ctx.grid = grid;
  st.ctx.profile = &st.profile;
  st.ctx.eps = eps;
  st.ctx.mu = cfg.mu;
  st.ctx.kappa = cfg.kappa;
  st.ctx.rho = cfg.rho;
  st.ctx.residual_tol = cfg.residual_tol;
  return st;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* lemma_name(LemmaTag t) {
  switch (t) {
    case LemmaTag::FullDerivativeL2: return "full_derivative_l2";
    case LemmaTag::VelocityL2: return "velocity_l2";
    case LemmaTag::WeightedL2: return "weighted_l2";
    case LemmaTag::CombinedL2: return "combined_l2";
    case LemmaTag::WeightedGradient: return "weighted_gradient";
  }
  return "?";
}

constexpr LemmaTag kAllLemmas[] = {LemmaTag::FullDerivativeL2, LemmaTag::VelocityL2,
                                   LemmaTag::WeightedL2, LemmaTag::CombinedL2,
                                   LemmaTag::WeightedGradient};

json xnorm_json(const XNormReport& xr) {
  return json{{"mode_sup_sum", xr.mode_sup_sum}, {"zero_grad", xr.zero_grad},
              {"zero_zgrad", xr.zero_zgrad},     {"q0_l2", xr.q0_l2},
              {"q0_zl2", xr.q0_zl2},             {"q0_grad", xr.q0_grad},
              {"q0_zgrad", xr.q0_zgrad},         {"total", xr.total},
              {"tail_truncation", xr.tail_truncation}};
}

}  // namespace

int run_profile_check(const RunConfig& cfg) {
  // assumption failures are what this command reports, so no weight here
  auto grid =
      HalfLineGrid::build(cfg.eps_list.front(), cfg.y_max, cfg.n_nodes, cfg.layer_fraction);
  const ShearProfile profile =
      cfg.profile_family == "user-tabulated"
          ? build_profile_tabulated(cfg.profile_table, grid)
          : build_profile(cfg.profile_family, cfg.profile_params, grid);
  const auto rep = validate_assumptions(profile);
  json j{{"schema_version", cfg.schema_version},
         {"family", cfg.profile_family},
         {"a1_pass", rep.a1_pass},
         {"a2_pass", rep.a2_pass},
         {"a3_pass", rep.a3_pass},
         {"a4_pass", rep.a4_pass},
         {"all_pass", rep.all_pass},
         {"us_at_wall", rep.us_at_wall},
         {"dhs_at_wall", rep.dhs_at_wall},
         {"gamma_lo", rep.gamma_lo},
         {"gamma_hi", rep.gamma_hi},
         {"mbar", rep.mbar},
         {"gamma0", rep.gamma0},
         {"gamma0_location", rep.gamma0_location}};
  write_text(fs::path(cfg.out_dir) / "profile_check.json", j.dump(2) + "\n");
  return rep.all_pass ? 0 : 1;
}

int run_weight_check(const RunConfig& cfg) {
  json out{{"schema_version", cfg.schema_version}, {"runs", json::array()}};
  bool all = true;
  for (double eps : cfg.eps_list) {
    const auto st = build_stack(cfg, eps);
    const auto rep = check_lemma_z(st.weight);
    json items = json::array();
    for (const auto& it : rep.items) {
      items.push_back({{"bound", it.name},
                       {"measured", std::isfinite(it.measured) ? it.measured : -1.0},
                       {"pass", it.pass}});
      all = all && it.pass;
    }
    out["runs"].push_back({{"eps", eps},
                           {"c0", rep.c0},
                           {"zbar", st.weight.zbar()},
                           {"all_pass", rep.all_pass},
                           {"items", items}});
  }
  if (cfg.eps_list.size() > 1) {
    double lo = 1e300, hi = 0.0;
    for (const auto& r : out["runs"]) {
      lo = std::min(lo, r["c0"].get<double>());
      hi = std::max(hi, r["c0"].get<double>());
    }
    out["c0_spread"] = hi / lo - 1.0;
  }
  write_text(fs::path(cfg.out_dir) / "weight_check.json", out.dump(2) + "\n");
  return all ? 0 : 1;
}

int run_linear_solve(const RunConfig& cfg) {
  bool ok = true;
  json out{{"schema_version", cfg.schema_version}, {"runs", json::array()}};
  for (double eps : cfg.eps_list) {
    const auto st = build_stack(cfg, eps);
    const auto fext = make_forcing(cfg.forcing, st.grid, cfg.rho);
    const auto lf = solve_linear_field(fext.modes, std::nullopt, st.ctx, cfg.threads);
    const auto state = to_state(lf, st.grid, cfg.n_modes, cfg.rho);
    const auto xr = x_norm(state, st.weight, eps);

    // solution dump
    std::ostringstream csv;
    csv << std::setprecision(17);
    csv << "y";
    for (const auto& [n, ms] : lf.modes) {
      (void)ms;
      for (const char* c : {"u", "v", "h", "g", "p"})
        csv << ",re_" << c << n << ",im_" << c << n;
    }
    csv << "\n";
    for (std::size_t i = 0; i < st.grid->size(); ++i) {
      csv << num(st.grid->node(i));
      for (const auto& [n, ms] : lf.modes) {
        (void)n;
        for (const ComplexField* f : {&ms.u, &ms.v, &ms.h, &ms.g, &ms.p})
          csv << "," << num((*f)[i].real()) << "," << num((*f)[i].imag());
      }
      csv << "\n";
    }
    write_text(fs::path(cfg.out_dir) / ("solution_eps" + num(eps) + ".csv"), csv.str());

    json run{{"eps", eps}, {"x_norm", xnorm_json(xr)}, {"modes", json::array()}};
    std::ostringstream ratios;
    ratios << "eps,n,lemma,lhs,rhs,ratio\n";
    ok = ok && std::isfinite(xr.total);
    for (const auto& [n, ms] : lf.modes) {
      // residual over tolerance is flagged in the report, not fatal
      ok = ok && std::isfinite(ms.residuals.max_residual);
      run["modes"].push_back({{"n", n},
                              {"momentum_x", ms.residuals.momentum_x},
                              {"momentum_y", ms.residuals.momentum_y},
                              {"induction_x", ms.residuals.induction_x},
                              {"induction_y", ms.residuals.induction_y},
                              {"verified", ms.residuals.verified}});
      const auto gu = to_good_unknowns(ms, st.profile, eps);
      const auto src = transformed_source(fext.modes.at(n), st.profile, eps, cfg.mu,
                                          cfg.kappa);
      for (LemmaTag t : kAllLemmas) {
        const auto er = estimate_ratio(t, gu, src, st.weight, st.profile.mbar(), cfg.eta);
        ratios << num(eps) << "," << n << "," << lemma_name(t) << "," << num(er.lhs) << ","
               << num(er.rhs) << "," << num(er.ratio) << "\n";
      }
    }
    run["linear_estimate_ratio"] =
        linear_estimate_ratio(xr, fext.modes, std::nullopt, st.weight, eps, cfg.eta, cfg.rho);
    out["runs"].push_back(std::move(run));
    write_text(fs::path(cfg.out_dir) / ("estimate_ratios_eps" + num(eps) + ".csv"),
               ratios.str());
  }
  write_text(fs::path(cfg.out_dir) / "linear_solve.json", out.dump(2) + "\n");
  return ok ? 0 : 1;
}

int run_mms_convergence(const RunConfig& cfg) {
  bool ok = true;
  std::ostringstream csv;
  csv << "eps,n,level,h,err_u,err_v,err_h,err_g,residual_max\n";
  json fits = json::array();
  for (double eps : cfg.eps_list) {
    for (int n : cfg.forcing.modes) {
      std::vector<std::pair<double, double>> samples;
      double final_resid = 0.0;
      for (int lvl = 0; lvl < 4; ++lvl) {
        RunConfig c2 = cfg;
        c2.n_nodes = (cfg.n_nodes - 1) * (1 << lvl) + 1;
        const auto st = build_stack(c2, eps);
        const auto mm = manufactured_mode(n, st.ctx);
        const auto ms = solve_mode(n, mm.forcing, st.ctx);
        const auto err = mms_error(ms, mm);
        const double h = cfg.y_max / (c2.n_nodes - 1);
        csv << num(eps) << "," << n << "," << lvl << "," << num(h) << "," << num(err.u)
            << "," << num(err.v) << "," << num(err.h) << "," << num(err.g) << ","
            << num(ms.residuals.max_residual) << "\n";
        samples.emplace_back(h, err.max_error);
        final_resid = ms.residuals.max_residual;
      }
      const auto fit = scaling_fit(samples);
      const bool order_ok = fit.slope > 1.8 && fit.slope < 2.2;
      const bool resid_ok = final_resid < cfg.residual_tol;
      ok = ok && order_ok && resid_ok;
      fits.push_back({{"eps", eps},
                      {"n", n},
                      {"order", fit.slope},
                      {"r2", fit.r2},
                      {"final_residual", final_resid},
                      {"order_ok", order_ok},
                      {"residual_ok", resid_ok}});
    }
  }
  write_text(fs::path(cfg.out_dir) / "mms_convergence.csv", csv.str());
  json out{{"schema_version", cfg.schema_version}, {"fits", fits}};
  write_text(fs::path(cfg.out_dir) / "mms_convergence.json", out.dump(2) + "\n");
  return ok ? 0 : 1;
}

int run_nonlinear_solve(const RunConfig& cfg) {
  bool ok = true;
  json out{{"schema_version", cfg.schema_version}, {"runs", json::array()}};
  for (double eps : cfg.eps_list) {
    const auto st = build_stack(cfg, eps);
    auto fext = make_forcing(cfg.forcing, st.grid, cfg.rho);
    FixedPointOptions opt;
    opt.tol = cfg.fp_tol;
    opt.max_iter = cfg.max_iter;
    opt.delta2 = cfg.delta2;
    opt.eta = cfg.eta;
    opt.nmax = cfg.n_modes;
    opt.threads = cfg.threads;
    if (cfg.forcing_scale > 0.0) {
      const double bound = cfg.delta2 * std::pow(eps, 0.75) /
                           std::pow(std::abs(std::log(eps)), 3.0 + cfg.eta);
      scale_forcing_to(fext, st.weight, cfg.rho, cfg.forcing_scale * bound);
    }

    std::string status = "converged";
    IterationState its{SpectralState(st.grid, opt.nmax, cfg.rho), 0, {}, {}, {}, 0.0, 0.0, 0.0, 0.0, true};
    try {
      its = fixed_point_solve(fext, st.ctx, st.weight, opt);
      if (its.final_update >= cfg.fp_tol && its.x_norm_history.back() > 0.0) {
        status = "max-iterations";
        ok = false;
      }
    } catch (const NonContractionError& e) {
      its = e.history;
      status = "non-contraction";
      ok = false;
    }

    std::ostringstream csv;
    csv << "iter,x_norm,contraction_ratio,residual\n";
    for (std::size_t k = 1; k < its.x_norm_history.size(); ++k) {
      const double ratio = k >= 2 && k - 2 < its.contraction_ratios.size()
                               ? its.contraction_ratios[k - 2]
                               : 0.0;
      const double upd =
          k - 1 < its.update_history.size() ? its.update_history[k - 1] : 0.0;
      csv << k << "," << num(its.x_norm_history[k]) << "," << num(ratio) << ","
          << num(upd) << "\n";
    }
    write_text(fs::path(cfg.out_dir) / ("iterations_eps" + num(eps) + ".csv"), csv.str());

    const double t1r = nonlinear_estimate_ratio(its.field, fext, st.weight, eps, cfg.eta);
    out["runs"].push_back({{"eps", eps},
                           {"status", status},
                           {"iterations", its.iterations},
                           {"fixed_point_residual", its.fixed_point_residual},
                           {"forcing_norm", its.forcing_norm},
                           {"forcing_bound", its.forcing_bound},
                           {"forcing_within_bound", its.forcing_within_bound},
                           {"nonlinear_estimate_ratio", t1r}});
  }
  write_text(fs::path(cfg.out_dir) / "nonlinear_solve.json", out.dump(2) + "\n");
  return ok ? 0 : 1;
}

int run_sweep(const RunConfig& cfg) {
  struct Point {
    double eps = 0.0;
    std::string family;
    std::vector<EstimateRatio> ratios;
    double linear_estimate = 0.0;
    bool verified = true;
  };
  std::vector<ForcingSpec> families;
  if (cfg.sweep_families.empty()) {
    families.push_back(cfg.forcing);
  } else {
    for (const auto& fam : cfg.sweep_families) {
      ForcingSpec spec = cfg.forcing;
      spec.family = fam;
      families.push_back(std::move(spec));
    }
  }
  std::vector<Point> points(cfg.eps_list.size() * families.size());

  auto work = [&](std::size_t idx) {
    const double eps = cfg.eps_list[idx % cfg.eps_list.size()];
    const ForcingSpec& spec = families[idx / cfg.eps_list.size()];
    const auto st = build_stack(cfg, eps);
    const auto fext = make_forcing(spec, st.grid, cfg.rho);
    const auto lf = solve_linear_field(fext.modes, std::nullopt, st.ctx, 1);
    Point pt;
    pt.eps = eps;
    pt.family = spec.family;
    for (const auto& [n, ms] : lf.modes) {
      pt.verified = pt.verified && std::isfinite(ms.residuals.max_residual);
      const auto gu = to_good_unknowns(ms, st.profile, eps);
      const auto src =
          transformed_source(fext.modes.at(n), st.profile, eps, cfg.mu, cfg.kappa);
      for (LemmaTag t : kAllLemmas)
        pt.ratios.push_back(estimate_ratio(t, gu, src, st.weight, st.profile.mbar(),
                                           cfg.eta));
    }
    const auto state = to_state(lf, st.grid, cfg.n_modes, cfg.rho);
    pt.linear_estimate = linear_estimate_ratio(x_norm(state, st.weight, eps), fext.modes, std::nullopt,
                             st.weight, eps, cfg.eta, cfg.rho);
    points[idx] = std::move(pt);
  };

  if (cfg.threads <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < cfg.threads; ++t)
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1))
          work(i);
      });
    for (auto& th : pool) th.join();
  }

  bool ok = true;
  std::ostringstream csv;
  csv << "eps,family,n,lemma,lhs,rhs,ratio\n";
  for (const auto& pt : points) {
    ok = ok && pt.verified;
    for (const auto& er : pt.ratios)
      csv << num(pt.eps) << "," << pt.family << "," << er.n << "," << lemma_name(er.tag)
          << "," << num(er.lhs) << "," << num(er.rhs) << "," << num(er.ratio) << "\n";
  }
  write_text(fs::path(cfg.out_dir) / "sweep_ratios.csv", csv.str());

  json out{{"schema_version", cfg.schema_version},
           {"linear_estimate", json::array()},
           {"fits", json::array()}};
  for (std::size_t f = 0; f < families.size(); ++f) {
    std::vector<std::pair<double, double>> prop_samples;
    for (std::size_t e = 0; e < cfg.eps_list.size(); ++e) {
      const auto& pt = points[f * cfg.eps_list.size() + e];
      prop_samples.emplace_back(pt.eps, std::max(pt.linear_estimate, 1e-300));
      out["linear_estimate"].push_back(
          {{"eps", pt.eps}, {"family", pt.family}, {"ratio", pt.linear_estimate}});
    }
    const auto fit = scaling_fit(prop_samples);
    out["fits"].push_back({{"family", families[f].family},
                           {"slope_vs_log_eps", fit.slope},
                           {"growth_exponent", -fit.slope},
                           {"intercept", fit.intercept},
                           {"r2", fit.r2}});
  }
  write_text(fs::path(cfg.out_dir) / "sweep_fit.json", out.dump(2) + "\n");
  return ok ? 0 : 1;
}

}  // namespace mhdbl
