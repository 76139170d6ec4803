#include "commands.hpp"

#include <cmath>
#include <memory>
#include <random>

#include <fmt/format.h>

#include "srg/blowup.hpp"
#include "srg/carnot.hpp"
#include "srg/ccdist.hpp"
#include "srg/errors.hpp"
#include "srg/metric.hpp"
#include "srg/nilpotent.hpp"
#include "srg/perimeter.hpp"
#include "srg/text_format.hpp"

namespace srg::cli {

namespace {

Json growth_json(const std::vector<int>& v) { return Json(v); }

Point origin(std::size_t n) { return Point::Zero(static_cast<Eigen::Index>(n)); }

void require_origin(const Point& p, const char* what) {
  if (p.norm() != 0.0)
    throw PreconditionError(fmt::format("{} works at the origin of privileged coordinates; move the point to 0", what));
}

std::vector<std::string> strings_of(const std::vector<PolyVectorField>& X) {
  std::vector<std::string> out;
  for (const auto& f : X) out.push_back(to_string(f));
  return out;
}

std::vector<std::string> strings_of(const std::vector<Polynomial>& P) {
  std::vector<std::string> out;
  for (const auto& p : P) out.push_back(to_string(p));
  return out;
}

Json report_json(const PerimeterReport& r) {
  Json j;
  j["estimator"] = to_string(r.estimator);
  j["per_field"] = r.per_field;
  j["per_field_variation"] = r.per_field_variation;
  j["total_variation"] = r.total_variation;
  j["resolution"] = r.resolution;
  j["schedule"] = r.schedule;
  j["raw_total"] = r.raw_total;
  j["facets"] = r.facets;
  j["masked_unknown"] = r.masked_unknown;
  return j;
}

struct CheckRow {
  std::string name, status, detail;
};

}  // namespace

std::vector<Command> register_commands(CLI::App& app) {
  std::vector<Command> cmds;
  // option storage lives as long as the app
  auto c = std::make_shared<Common>();

  // flag
  {
    auto* sub = app.add_subcommand("flag", "growth vector, weights, Q and regularity at a point");
    add_common(sub, *c);
    auto radius = std::make_shared<double>(0.1);
    auto samples = std::make_shared<int>(16);
    sub->add_option("--radius", *radius, "neighbourhood radius for the regularity test");
    sub->add_option("--samples", *samples, "Halton samples in the neighbourhood");
    cmds.push_back({sub, [=] {
                      const auto S = load_structure(*c);
                      const Point x = point_of(c->point, S.dim, "--point");
                      const auto f = growth_vector(S, x);
                      const auto reg = classify_regularity(S, x, *radius, *samples);
                      Json r;
                      r["point"] = to_json(x);
                      r["growth"] = growth_json(f.growth);
                      r["weights"] = growth_json(f.weights);
                      r["step"] = f.step;
                      r["Q"] = f.Q;
                      r["regularity"] = to_string(reg.verdict);
                      r["regular"] = reg.verdict == Regularity::Unknown ? Json(nullptr)
                                                                         : Json(reg.verdict == Regularity::Regular);
                      r["gray_zone"] = f.gray_zone;
                      if (reg.witness) {
                        r["witness"] = to_json(*reg.witness);
                        r["witness_growth"] = growth_json(reg.witness_growth);
                      }
                      write_json(envelope(*sub, *c, S, r), c->json);
                      return 0;
                    }});
  }

  // nilpotent
  {
    auto* sub = app.add_subcommand("nilpotent", "nilpotent approximation at the origin");
    add_common(sub, *c);
    cmds.push_back({sub, [=] {
                      const auto S = load_structure(*c);
                      require_origin(point_of(c->point, S.dim, "--point"), "nilpotent");
                      const Grading g = grading_at_origin(S);
                      const auto na = truncate(S, g);
                      const auto check = nilpotency_check(na, g.max_weight(), &S);
                      Json r;
                      r["weights"] = g.weights;
                      r["Q"] = na.Q;
                      r["truncated"] = strings_of(na.truncated);
                      r["remainders"] = strings_of(na.remainders);
                      r["nilpotent"] = check.pass;
                      r["witness"] = check.witness;
                      r["growth_truncated"] = check.growth_truncated;
                      r["growth_original"] = check.growth_original;
                      r["message"] = check.message;
                      write_json(envelope(*sub, *c, S, r), c->json);
                      return 0;
                    }});
  }

  // metric
  {
    auto* sub = app.add_subcommand("metric", "quadratic form G_x(v), minimal controls, scalar product");
    add_common(sub, *c);
    auto v = std::make_shared<std::vector<double>>();
    auto w = std::make_shared<std::vector<double>>();
    auto tol = std::make_shared<double>(kDefaultSpanTol);
    sub->add_option("--vector,-v", *v, "tangent vector v")->delimiter(',')->required();
    sub->add_option("--vector2,-w", *w, "second vector for g_x(v, w)")->delimiter(',');
    sub->add_option("--span-tol", *tol, "relative residual above which v is outside the span");
    cmds.push_back({sub, [=] {
                      const auto S = load_structure(*c);
                      const Point x = point_of(c->point, S.dim, "--point");
                      const Point vv = point_of(*v, S.dim, "--vector");
                      const auto G = quadratic_form(S, x, vv, *tol);
                      Json r;
                      r["point"] = to_json(x);
                      r["finite"] = G.finite;
                      r["value"] = G.finite ? Json(G.value) : Json("inf");
                      r["residual"] = G.residual;
                      if (G.finite) r["controls"] = to_json(G.controls);
                      if (!w->empty()) r["scalar_product"] = scalar_product(S, x, vv, point_of(*w, S.dim, "--vector2"), *tol);
                      write_json(envelope(*sub, *c, S, r), c->json);
                      return 0;
                    }});
  }

  // distance
  {
    auto* sub = app.add_subcommand("distance", "CC distance by direct control discretisation");
    add_common(sub, *c);
    auto from = std::make_shared<std::vector<double>>();
    auto to = std::make_shared<std::vector<double>>();
    auto o = std::make_shared<DistanceOptions>();
    sub->add_option("--from", *from, "start point (default: --point or the origin)")->delimiter(',');
    sub->add_option("--to", *to, "end point")->delimiter(',')->required();
    sub->add_option("--segments", o->initial_segments, "initial control segments");
    sub->add_option("--max-segments", o->max_segments, "segment cap for refinement");
    sub->add_option("--substeps", o->substeps, "RK4 steps per segment");
    sub->add_option("--restarts", o->restarts, "multistart count");
    sub->add_option("--refine-tol", o->refine_tol, "relative change that stops refinement");
    sub->add_option("--endpoint-tol", o->endpoint_tol, "endpoint gap for convergence");
    sub->add_option("--penalties", o->penalties, "endpoint penalty schedule")->delimiter(',');
    cmds.push_back({sub, [=] {
                      const auto S = load_structure(*c);
                      const Point x = point_of(from->empty() ? c->point : *from, S.dim, "--from");
                      const Point y = point_of(*to, S.dim, "--to");
                      DistanceOptions opts = *o;
                      opts.seed = c->seed;
                      opts.exec = c->exec();
                      const auto d = distance(S, x, y, opts);
                      Json r;
                      r["from"] = to_json(x);
                      r["to"] = to_json(y);
                      r["value"] = d.value;
                      r["converged"] = d.converged;
                      r["endpoint_gap"] = d.path.endpoint_gap;
                      r["segments"] = d.path.segments();
                      r["restarts_used"] = d.restarts_used;
                      r["refinement_values"] = d.refinement_values;
                      r["controls"] = to_json(d.path.controls);
                      write_json(envelope(*sub, *c, S, r), c->json);
                      Csv csv;
                      csv.header = {"k", "t"};
                      for (std::size_t j = 0; j < S.dim; ++j) csv.header.push_back(fmt::format("x{}", j + 1));
                      const auto& tr = d.path.trajectory;
                      for (std::size_t k = 0; k < tr.size(); ++k) {
                        std::vector<std::string> row{std::to_string(k), num(static_cast<double>(k) / (tr.size() - 1))};
                        for (double v : tr[k]) row.push_back(num(v));
                        csv.add(row);
                      }
                      csv.write(c->csv);
                      return d.converged ? 0 : 3;
                    }});
  }

  // ball
  {
    auto* sub = app.add_subcommand("ball", "voxel mask of the CC ball B_r(p)");
    add_common(sub, *c);
    auto radius = std::make_shared<double>(1.0);
    auto o = std::make_shared<BallMaskOptions>();
    auto lo = std::make_shared<std::vector<double>>();
    auto hi = std::make_shared<std::vector<double>>();
    sub->add_option("--radius,-r", *radius, "ball radius");
    sub->add_option("--resolution", o->resolution, "voxels per axis");
    sub->add_option("--lo", *lo, "grid box lower corner (default: fitted)")->delimiter(',');
    sub->add_option("--hi", *hi, "grid box upper corner")->delimiter(',');
    cmds.push_back({sub, [=] {
                      const auto S = load_structure(*c);
                      const Point p = point_of(c->point, S.dim, "--point");
                      BallMaskOptions opts = *o;
                      opts.exec = c->exec();
                      opts.solver.seed = c->seed;
                      if (!lo->empty() || !hi->empty()) opts.box = box_of(*lo, *hi, S.dim, 1.0);
                      const auto b = ball_mask(S, p, *radius, opts);
                      Json r;
                      r["center"] = to_json(p);
                      r["radius"] = *radius;
                      r["resolution"] = b.grid.resolution();
                      r["box_lo"] = to_json(b.grid.box().lo);
                      r["box_hi"] = to_json(b.grid.box().hi);
                      r["inside_count"] = b.inside_count();
                      r["volume"] = b.volume();
                      r["unknown_count"] = b.unknown_count;
                      r["refined_count"] = b.refined_count;
                      write_json(envelope(*sub, *c, S, r), c->json);
                      if (!c->csv.empty()) {
                        Csv csv;
                        csv.header = {"voxel"};
                        for (std::size_t j = 0; j < S.dim; ++j) csv.header.push_back(fmt::format("x{}", j + 1));
                        csv.header.insert(csv.header.end(), {"state", "dist", "refined"});
                        for (std::size_t v = 0; v < b.grid.size(); ++v) {
                          std::vector<std::string> row{std::to_string(v)};
                          for (double x : b.grid.center(v)) row.push_back(num(x));
                          row.push_back(std::to_string(static_cast<int>(b.state[v])));
                          row.push_back(num(b.dist[v]));
                          row.push_back(std::to_string(static_cast<int>(b.refined[v])));
                          csv.add(row);
                        }
                        csv.write(c->csv);
                      }
                      return 0;
                    }});
  }

  // group
  {
    auto* sub = app.add_subcommand("group", "Carnot group law of the tangent at the origin");
    add_common(sub, *c);
    auto x = std::make_shared<std::vector<double>>();
    auto y = std::make_shared<std::vector<double>>();
    sub->add_option("--x", *x, "left factor to compose")->delimiter(',');
    sub->add_option("--y", *y, "right factor to compose")->delimiter(',');
    cmds.push_back({sub, [=] {
                      const auto S = load_structure(*c);
                      require_origin(point_of(c->point, S.dim, "--point"), "group");
                      const auto na = truncate(S, grading_at_origin(S));
                      const auto law = group_law_from_flows(na);
                      const auto sc = structure_constants(law);
                      const auto inv = left_invariance_check(law, na, 20, c->seed);
                      Json r;
                      r["weights"] = law.grading.weights;
                      r["compose"] = strings_of(*law.compose_poly);
                      r["inverse"] = strings_of(*law.inverse_poly);
                      r["first_layer"] = sc.first_layer;
                      r["second_layer"] = sc.second_layer;
                      Json bil = Json::array();
                      for (const auto& M : sc.bilinear) bil.push_back(to_json(M));
                      r["bilinear"] = bil;
                      r["left_invariance"] = {{"pass", inv.pass}, {"max_error", inv.max_error}, {"message", inv.message}};
                      if (!x->empty() || !y->empty()) {
                        const Point a = point_of(*x, S.dim, "--x"), b = point_of(*y, S.dim, "--y");
                        r["product"] = to_json(law(a, b));
                      }
                      write_json(envelope(*sub, *c, S, r), c->json);
                      return inv.pass ? 0 : 1;
                    }});
  }

  // perimeter
  {
    auto* sub = app.add_subcommand("perimeter", "perimeter of {level < 0} by surface, flow and mollified estimators");
    add_common(sub, *c);
    auto level = std::make_shared<std::string>();
    auto lo = std::make_shared<std::vector<double>>();
    auto hi = std::make_shared<std::vector<double>>();
    auto res = std::make_shared<int>(128);
    auto est = std::make_shared<std::vector<std::string>>(std::vector<std::string>{"surface", "flow", "mollified"});
    sub->add_option("--level,-l", *level, "level polynomial phi, E = {phi < 0}")->required();
    sub->add_option("--lo", *lo, "box lower corner (default -1)")->delimiter(',');
    sub->add_option("--hi", *hi, "box upper corner (default 1)")->delimiter(',');
    sub->add_option("--resolution", *res, "grid nodes per axis");
    sub->add_option("--estimators", *est, "subset of surface,flow,mollified")
        ->delimiter(',')
        ->check(CLI::IsMember({"surface", "flow", "mollified"}));
    cmds.push_back({sub, [=] {
                      const auto S = load_structure(*c);
                      const SetRep E(parse_polynomial(*level, S.dim), box_of(*lo, *hi, S.dim, 1.0), *res);
                      const Region R = Region::of(E.box);
                      Json r = Json::array();
                      Csv csv;
                      csv.header = {"estimator", "schedule", "raw_total"};
                      for (const auto& name : *est) {
                        PerimeterReport rep;
                        if (name == "surface") rep = surface_estimator(S, E, R, c->exec());
                        if (name == "flow") rep = flow_report(S, E, R, {}, c->exec());
                        if (name == "mollified") rep = mollified_estimator(S, E, R, {}, c->exec());
                        r.push_back(report_json(rep));
                        if (rep.estimator == Estimator::Flow) {
                          // no total variation: one extrapolated row per field
                          for (std::size_t i = 0; i < rep.per_field_variation.size(); ++i)
                            csv.add({fmt::format("flow:X{}", i + 1), "0", num(rep.per_field_variation[i])});
                          continue;
                        }
                        if (rep.schedule.empty()) csv.add({name, "0", num(rep.total_variation)});
                        for (std::size_t k = 0; k < rep.schedule.size() && k < rep.raw_total.size(); ++k)
                          csv.add({name, num(rep.schedule[k]), num(rep.raw_total[k])});
                      }
                      write_json(envelope(*sub, *c, S, {{"level", *level}, {"estimates", r}}), c->json);
                      csv.write(c->csv);
                      return 0;
                    }});
  }

  // blowup
  {
    auto* sub = app.add_subcommand("blowup", "blowup of {level < 0} at the origin against the vertical halfspace");
    add_common(sub, *c);
    auto level = std::make_shared<std::string>();
    auto lo = std::make_shared<std::vector<double>>();
    auto hi = std::make_shared<std::vector<double>>();
    auto radii = std::make_shared<std::vector<std::string>>(std::vector<std::string>{"1/2", "1/4", "1/8", "1/16"});
    auto o = std::make_shared<BlowupOptions>();
    auto no_density = std::make_shared<bool>(false);
    sub->add_option("--level,-l", *level, "level polynomial phi, E = {phi < 0}")->required();
    sub->add_option("--lo", *lo, "box of E, lower corner (default -1)")->delimiter(',');
    sub->add_option("--hi", *hi, "box of E, upper corner (default 1)")->delimiter(',');
    sub->add_option("--radii", *radii, "decreasing radii (rationals)")->delimiter(',');
    sub->add_option("--resolution", o->resolution, "window grid per axis");
    sub->add_option("--ball-resolution", o->ball.resolution, "ball mask voxels per axis");
    sub->add_flag("--no-density", *no_density, "skip the ball-based density ratios");
    cmds.push_back({sub, [=] {
                      const auto S = load_structure(*c);
                      const Point p = point_of(c->point, S.dim, "--point");
                      const SetRep E(parse_polynomial(*level, S.dim), box_of(*lo, *hi, S.dim, 1.0), o->resolution);
                      BlowupOptions opts = *o;
                      opts.radii.clear();
                      for (const auto& s : *radii) opts.radii.push_back(parse_rational(s));
                      opts.density = !*no_density;
                      opts.exec = c->exec();
                      opts.ball.exec = c->exec();
                      opts.ball.solver.seed = c->seed;
                      const auto rep = blowup_run(S, E, p, opts);
                      Json r;
                      r["level"] = *level;
                      r["dual_normal"] = to_json(rep.nu);
                      r["halfspace_level"] = to_string(rep.F.level);
                      r["window_lo"] = to_json(rep.window.lo);
                      r["window_hi"] = to_json(rep.window.hi);
                      r["window_volume"] = rep.window_volume;
                      r["radii"] = rep.radii;
                      r["l1_gap"] = rep.l1_gap;
                      r["monotone_pairings"] = rep.monotone_pairings;
                      r["invariance_pairings"] = rep.invariance_pairings;
                      r["limit_monotone"] = rep.limit_monotone;
                      r["limit_invariance"] = rep.limit_invariance;
                      if (opts.density) {
                        r["density_lhs"] = rep.density_lhs;
                        r["density_rhs"] = rep.density_rhs;
                        r["dropped_radii"] = rep.dropped_radii;
                        r["homogeneous_balls"] = rep.homogeneous;
                      }
                      r["notes"] = rep.notes;
                      write_json(envelope(*sub, *c, S, r), c->json);
                      Csv csv;
                      csv.header = {"radius", "l1_gap", "density_lhs"};
                      for (std::size_t k = 0; k < rep.radii.size(); ++k)
                        csv.add({num(rep.radii[k]), num(rep.l1_gap[k]),
                                 k < rep.density_lhs.size() ? num(rep.density_lhs[k]) : "nan"});
                      csv.write(c->csv);
                      return 0;
                    }});
  }

  // verify
  {
    auto* sub = app.add_subcommand("verify", "property suite for one structure, pass/fail table");
    add_common(sub, *c);
    auto pairs = std::make_shared<int>(10);
    sub->add_option("--pairs", *pairs, "random samples per sampled check");
    cmds.push_back({sub, [=] {
                      const auto S = load_structure(*c);
                      const std::size_t n = S.dim;
                      const Point x0 = point_of(c->point, n, "--point");
                      std::mt19937_64 rng(c->seed);
                      std::uniform_real_distribution<double> U(-0.5, 0.5);
                      auto random_point = [&] {
                        Point p(static_cast<Eigen::Index>(n));
                        for (auto& v : p) v = U(rng);
                        return p;
                      };
                      std::vector<CheckRow> rows;
                      auto attempt = [&](const std::string& name, auto&& body) {
                        try {
                          rows.push_back({name, "", ""});
                          auto [ok, detail] = body();
                          rows.back().status = ok ? "pass" : "fail";
                          rows.back().detail = detail;
                        } catch (const IsotropyNotVerified& e) {
                          rows.back().status = "skipped";
                          rows.back().detail = e.what();
                        } catch (const Error& e) {
                          rows.back().status = "fail";
                          rows.back().detail = e.what();
                        }
                      };

                      attempt("hormander", [&] {
                        const auto f = growth_vector(S, x0);
                        return std::pair{f.growth.back() == static_cast<int>(n),
                                         fmt::format("growth ({})", fmt::join(f.growth, ","))};
                      });
                      attempt("weights_Q", [&] {
                        const auto f = growth_vector(S, x0);
                        int q = 0, prev = 0, byw = 0;
                        for (int w : f.weights) q += w;
                        for (std::size_t s = 0; s < f.growth.size(); ++s) {
                          byw += static_cast<int>(s + 1) * (f.growth[s] - prev);
                          prev = f.growth[s];
                        }
                        return std::pair{q == f.Q && byw == f.Q, fmt::format("Q = {}", f.Q)};
                      });
                      if (S.is_polynomial()) {
                        attempt("jacobi", [&] {
                          const auto X = S.polynomial_frame();
                          std::size_t bad = 0, tried = 0;
                          for (const auto& a : X)
                            for (const auto& b : X)
                              for (const auto& d : X) {
                                ++tried;
                                const auto J = lie_bracket(a, lie_bracket(b, d)) + lie_bracket(b, lie_bracket(d, a)) +
                                               lie_bracket(d, lie_bracket(a, b));
                                if (!J.is_zero()) ++bad;
                              }
                          return std::pair{bad == 0, fmt::format("{} triples, exact", tried)};
                        });
                      }
                      attempt("riesz", [&] {
                        double worst = 0.0;
                        for (int k = 0; k < *pairs; ++k) {
                          const Point p = random_point();
                          const Eigen::MatrixXd M = S.frame_matrix(p);
                          Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
                          const bool independent = svd.rank() == M.cols();
                          for (Eigen::Index i = 0; i < M.cols(); ++i) {
                            const auto G = quadratic_form(S, p, M.col(i));
                            if (M.col(i).norm() == 0.0) continue;
                            const double err = independent ? std::abs(G.value - 1.0) : std::max(0.0, G.value - 1.0);
                            worst = std::max(worst, G.finite ? err : 1.0);
                          }
                        }
                        return std::pair{worst <= 1e-8, fmt::format("max |G(X_i) - 1| = {:.3g}", worst)};
                      });
                      if (S.is_polynomial() && x0.norm() == 0.0) {
                        attempt("nilpotent_approximation", [&] {
                          const Grading g = grading_at_origin(S);
                          const auto na = truncate(S, g);
                          const auto chk = nilpotency_check(na, g.max_weight(), &S);
                          return std::pair{chk.pass, chk.message};
                        });
                        attempt("group_axioms", [&] {
                          const auto na = truncate(S, grading_at_origin(S));
                          const auto law = group_law_from_flows(na);
                          double worst = 0.0;
                          for (int k = 0; k < *pairs; ++k) {
                            const Point a = random_point(), b = random_point(), d = random_point();
                            worst = std::max(worst, (law(law(a, b), d) - law(a, law(b, d))).norm());
                            worst = std::max(worst, law(a, law.inverse(a)).norm());
                            worst = std::max(worst, (law(a, origin(n)) - a).norm());
                          }
                          return std::pair{worst <= 1e-8, fmt::format("max defect {:.3g}", worst)};
                        });
                        attempt("left_invariance", [&] {
                          const auto na = truncate(S, grading_at_origin(S));
                          const auto rep = left_invariance_check(group_law_from_flows(na), na, *pairs, c->seed);
                          return std::pair{rep.pass, fmt::format("max error {:.3g}", rep.max_error)};
                        });
                      }
                      attempt("distance_symmetry_triangle", [&] {
                        DistanceOptions o;
                        o.seed = c->seed;
                        o.exec = c->exec();
                        double sym = 0.0, tri = 0.0;
                        const int triples = std::max(1, *pairs / 3);
                        for (int k = 0; k < triples; ++k) {
                          const Point a = random_point(), b = random_point(), d = random_point();
                          const double ab = distance(S, a, b, o).value, ba = distance(S, b, a, o).value;
                          const double bd = distance(S, b, d, o).value, ad = distance(S, a, d, o).value;
                          sym = std::max(sym, std::abs(ab - ba) / std::max(ab, 1e-12));
                          tri = std::max(tri, (ad - ab - bd) / std::max(ad, 1e-12));
                        }
                        return std::pair{sym <= 0.03 && tri <= 0.03,
                                         fmt::format("symmetry {:.3g}, triangle excess {:.3g}", sym, tri)};
                      });

                      Json table = Json::array();
                      Csv csv;
                      csv.header = {"check", "status", "detail"};
                      bool ok = true;
                      for (const auto& row : rows) {
                        table.push_back({{"check", row.name}, {"status", row.status}, {"detail", row.detail}});
                        std::string d = row.detail;
                        for (auto& ch : d)
                          if (ch == ',' || ch == '\n') ch = ';';
                        csv.add({row.name, row.status, d});
                        ok = ok && row.status != "fail";
                      }
                      write_json(envelope(*sub, *c, S, {{"point", to_json(x0)}, {"checks", table}, {"pass", ok}}), c->json);
                      csv.write(c->csv);
                      return ok ? 0 : 1;
                    }});
  }
  return cmds;
}

}  // namespace srg::cli
