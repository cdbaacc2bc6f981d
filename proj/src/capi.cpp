#include "rgeom.h"

#include <cstring>
#include <new>
#include <string>

#include "rgeom/builtins.hpp"
#include "rgeom/errors.hpp"
#include "rgeom/geodesic.hpp"
#include "rgeom/group_dp.hpp"
#include "rgeom/group_rt.hpp"
#include "rgeom/manifold.hpp"
#include "rgeom/suite.hpp"

using namespace rgeom;

struct rgeom_manifold {
  Manifold m;
};

namespace {

thread_local std::string g_last_error;

rgeom_status classify(const Error& e) {
  if (dynamic_cast<const ParseError*>(&e)) return RGEOM_ERR_PARSE;
  if (dynamic_cast<const DomainError*>(&e)) return RGEOM_ERR_DOMAIN;
  if (dynamic_cast<const SolverError*>(&e)) return RGEOM_ERR_SOLVER;
  if (dynamic_cast<const ConfigError*>(&e)) return RGEOM_ERR_CONFIG;
  return RGEOM_ERR_CONFIG;
}

template <typename Fn>
rgeom_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const Error& e) {
    g_last_error = e.what();
    return classify(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RGEOM_ERR_CONFIG;
  }
}

SolverConfig to_solver(const rgeom_solver_config* cfg) {
  SolverConfig out;
  if (cfg) {
    out.steps_per_unit = cfg->steps_per_unit;
    out.bvp_max_iter = cfg->bvp_max_iter;
    out.bvp_tol = cfg->bvp_tol;
    out.fd_eps = cfg->fd_eps;
    out.richardson = cfg->richardson != 0;
  }
  out.validate();
  return out;
}

Vec to_vec(const double* p, int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = p[i];
  return v;
}

void from_vec(const Vec& v, double* out) {
  for (int i = 0; i < v.size(); ++i) out[i] = v[i];
}

void from_mat(const Mat& m, double* out) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
}

void from_tensor3(const Tensor3& t, double* out) {
  const int n = t.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out[(i * n + j) * n + k] = t(i, j, k);
}

void from_tensor4(const Tensor4& t, double* out) {
  const int n = t.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out[((i * n + j) * n + k) * n + l] = t(i, j, k, l);
}

char* dup_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rgeom_status require(bool cond, const char* msg) {
  if (!cond) {
    g_last_error = msg;
    return RGEOM_ERR_CONFIG;
  }
  return RGEOM_OK;
}

}  // namespace

extern "C" {

void rgeom_solver_config_default(rgeom_solver_config* cfg) {
  if (!cfg) return;
  const SolverConfig d;
  cfg->steps_per_unit = d.steps_per_unit;
  cfg->bvp_max_iter = d.bvp_max_iter;
  cfg->bvp_tol = d.bvp_tol;
  cfg->fd_eps = d.fd_eps;
  cfg->richardson = d.richardson ? 1 : 0;
}

const char* rgeom_version(void) { return kToolVersion; }

const char* rgeom_last_error(void) { return g_last_error.c_str(); }

rgeom_status rgeom_manifold_create(const char* name_or_path,
                                   rgeom_manifold** out) {
  if (rgeom_status s = require(name_or_path && out, "null argument")) return s;
  return guarded([&]() {
    *out = new rgeom_manifold{load_manifold(name_or_path)};
    return RGEOM_OK;
  });
}

rgeom_status rgeom_manifold_create_from_text(const char* text,
                                             const char* display_name,
                                             rgeom_manifold** out) {
  if (rgeom_status s = require(text && out, "null argument")) return s;
  return guarded([&]() {
    *out = new rgeom_manifold{manifold_from_metric_text(
        text, display_name ? display_name : "metric")};
    return RGEOM_OK;
  });
}

void rgeom_manifold_destroy(rgeom_manifold* m) { delete m; }

int rgeom_manifold_dim(const rgeom_manifold* m) { return m ? m->m.dim() : 0; }

const char* rgeom_manifold_name(const rgeom_manifold* m) {
  return m ? m->m.name().c_str() : "";
}

rgeom_status rgeom_builtin_manifolds(char** out) {
  if (rgeom_status s = require(out != nullptr, "null argument")) return s;
  std::string joined;
  for (const auto& name : builtin_manifold_names()) {
    if (!joined.empty()) joined += '\n';
    joined += name;
  }
  *out = dup_string(joined);
  return *out ? RGEOM_OK : RGEOM_ERR_CONFIG;
}

rgeom_status rgeom_metric_at(const rgeom_manifold* m, const double* x, double* g,
                             double* dg, double* d2g) {
  if (rgeom_status s = require(m && x, "null argument")) return s;
  return guarded([&]() {
    const MetricJet jet = m->m.metric_at(ChartPoint(to_vec(x, m->m.dim())));
    if (g) from_mat(jet.g, g);
    if (dg) from_tensor3(jet.dg, dg);
    if (d2g) from_tensor4(jet.d2g, d2g);
    return RGEOM_OK;
  });
}

rgeom_status rgeom_frame_at(const rgeom_manifold* m, const double* x, double* h,
                            double* k) {
  if (rgeom_status s = require(m && x, "null argument")) return s;
  return guarded([&]() {
    const FramePair f = m->m.frame_at(ChartPoint(to_vec(x, m->m.dim())));
    if (h) from_mat(f.h, h);
    if (k) from_mat(f.k, k);
    return RGEOM_OK;
  });
}

rgeom_status rgeom_christoffel_at(const rgeom_manifold* m, const double* x,
                                  double* gamma) {
  if (rgeom_status s = require(m && x && gamma, "null argument")) return s;
  return guarded([&]() {
    from_tensor3(m->m.christoffel_at(ChartPoint(to_vec(x, m->m.dim()))).gamma,
                 gamma);
    return RGEOM_OK;
  });
}

rgeom_status rgeom_gamma_at(const rgeom_manifold* m, const double* x,
                            double* gamma) {
  if (rgeom_status s = require(m && x && gamma, "null argument")) return s;
  return guarded([&]() {
    from_tensor3(m->m.gamma_at(ChartPoint(to_vec(x, m->m.dim()))), gamma);
    return RGEOM_OK;
  });
}

rgeom_status rgeom_anholonomy_at(const rgeom_manifold* m, const double* x,
                                 double* c) {
  if (rgeom_status s = require(m && x && c, "null argument")) return s;
  return guarded([&]() {
    from_tensor3(m->m.anholonomy_at(ChartPoint(to_vec(x, m->m.dim()))), c);
    return RGEOM_OK;
  });
}

rgeom_status rgeom_riemann_at(const rgeom_manifold* m, const double* x,
                              double* r) {
  if (rgeom_status s = require(m && x && r, "null argument")) return s;
  return guarded([&]() {
    from_tensor4(m->m.riemann_classical_at(ChartPoint(to_vec(x, m->m.dim()))),
                 r);
    return RGEOM_OK;
  });
}

rgeom_status rgeom_geodesic(const rgeom_manifold* m, const double* x,
                            const double* v, double s,
                            const rgeom_solver_config* cfg, double* end_x,
                            double* end_v) {
  if (rgeom_status st = require(m && x && v, "null argument")) return st;
  return guarded([&]() {
    const int n = m->m.dim();
    const GeodesicPath path = geodesic_ivp(
        m->m, ChartPoint(to_vec(x, n)), ChartVector(to_vec(v, n)), s,
        to_solver(cfg));
    if (end_x) from_vec(path.points.back(), end_x);
    if (end_v) from_vec(path.velocities.back(), end_v);
    return RGEOM_OK;
  });
}

rgeom_status rgeom_exp(const rgeom_manifold* m, const double* x, const double* t,
                       const rgeom_solver_config* cfg, double* end_x) {
  if (rgeom_status st = require(m && x && t && end_x, "null argument"))
    return st;
  return guarded([&]() {
    const int n = m->m.dim();
    from_vec(exp_map(m->m, ChartPoint(to_vec(x, n)), FrameVector(to_vec(t, n)),
                     to_solver(cfg))
                 .coords,
             end_x);
    return RGEOM_OK;
  });
}

rgeom_status rgeom_log(const rgeom_manifold* m, const double* x,
                       const double* target, const rgeom_solver_config* cfg,
                       double* t) {
  if (rgeom_status st = require(m && x && target && t, "null argument"))
    return st;
  return guarded([&]() {
    const int n = m->m.dim();
    from_vec(log_map(m->m, ChartPoint(to_vec(x, n)),
                     ChartPoint(to_vec(target, n)), to_solver(cfg))
                 .components,
             t);
    return RGEOM_OK;
  });
}

rgeom_status rgeom_distance(const rgeom_manifold* m, const double* x,
                            const double* target,
                            const rgeom_solver_config* cfg, double* dist) {
  if (rgeom_status st = require(m && x && target && dist, "null argument"))
    return st;
  return guarded([&]() {
    const int n = m->m.dim();
    *dist = geodesic_distance(m->m, ChartPoint(to_vec(x, n)),
                              ChartPoint(to_vec(target, n)), to_solver(cfg));
    return RGEOM_OK;
  });
}

rgeom_status rgeom_lambda_transport(const rgeom_manifold* m, const double* x,
                                    const double* t, const double* theta,
                                    const rgeom_solver_config* cfg,
                                    double* out) {
  if (rgeom_status st = require(m && x && t && theta && out, "null argument"))
    return st;
  return guarded([&]() {
    const int n = m->m.dim();
    from_vec(lambda_transport(m->m, ChartPoint(to_vec(x, n)),
                              FrameVector(to_vec(t, n)),
                              FrameVector(to_vec(theta, n)), to_solver(cfg))
                 .components,
             out);
    return RGEOM_OK;
  });
}

rgeom_status rgeom_pi_transport(const rgeom_manifold* m, const double* x,
                                const double* t, const double* theta,
                                const rgeom_solver_config* cfg, double* out) {
  if (rgeom_status st = require(m && x && t && theta && out, "null argument"))
    return st;
  return guarded([&]() {
    const int n = m->m.dim();
    from_vec(pi_transport(m->m, ChartPoint(to_vec(x, n)),
                          FrameVector(to_vec(t, n)),
                          FrameVector(to_vec(theta, n)), to_solver(cfg))
                 .components,
             out);
    return RGEOM_OK;
  });
}

rgeom_status rgeom_holonomy(const rgeom_manifold* m, const double* x,
                            const double* a, const double* b, double scale,
                            const rgeom_solver_config* cfg, double* rotation,
                            double* angle, double* closure_defect) {
  if (rgeom_status st = require(m && x && a && b, "null argument")) return st;
  return guarded([&]() {
    const int n = m->m.dim();
    const HolonomyResult hol = holonomy_loop(
        m->m, ChartPoint(to_vec(x, n)), FrameVector(to_vec(a, n)),
        FrameVector(to_vec(b, n)), scale, to_solver(cfg));
    if (rotation) from_mat(hol.rotation, rotation);
    if (angle) *angle = hol.angle;
    if (closure_defect) *closure_defect = hol.closure_defect;
    return RGEOM_OK;
  });
}

void rgeom_verify_options_default(rgeom_verify_options* opts) {
  if (!opts) return;
  const SuiteConfig d;
  opts->seed = d.seed;
  opts->samples = d.samples;
  opts->threads = d.threads;
  rgeom_solver_config_default(&opts->solver);
  opts->tol_overrides = nullptr;
}

rgeom_status rgeom_verify(const rgeom_manifold* m,
                          const rgeom_verify_options* opts, char** json,
                          int* all_pass) {
  if (rgeom_status st = require(m != nullptr, "null manifold")) return st;
  return guarded([&]() -> rgeom_status {
    SuiteConfig cfg;
    if (opts) {
      cfg.seed = opts->seed;
      cfg.samples = opts->samples;
      cfg.threads = opts->threads;
      cfg.solver = to_solver(&opts->solver);
      if (opts->tol_overrides && *opts->tol_overrides) {
        std::string spec = opts->tol_overrides;
        size_t pos = 0;
        while (pos < spec.size()) {
          size_t comma = spec.find(',', pos);
          if (comma == std::string::npos) comma = spec.size();
          const std::string item = spec.substr(pos, comma - pos);
          const size_t eq = item.find('=');
          if (eq == std::string::npos)
            throw ConfigError("tolerance override must look like id=value");
          cfg.tol_overrides.emplace_back(item.substr(0, eq),
                                         std::stod(item.substr(eq + 1)));
          pos = comma + 1;
        }
      }
    }
    const SuiteReport report = run_suite(m->m, cfg);
    if (json) {
      *json = dup_string(report.to_json());
      if (!*json) return RGEOM_ERR_CONFIG;
    }
    if (all_pass) *all_pass = report.all_pass ? 1 : 0;
    return report.all_pass ? RGEOM_OK : RGEOM_ERR_IDENTITY;
  });
}

void rgeom_string_free(char* s) { delete[] s; }

}  // extern "C"
