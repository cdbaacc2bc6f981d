// rgeom: command-line front end for the rgeom shared library.
//
// Subcommands: manifolds, verify, geodesic, transport, holonomy.
// Output records are JSON with deterministic key order and 17 significant
// digits, so identical invocations produce byte-identical output.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rgeom.h"

namespace {

constexpr int kExitIdentity = 1;
constexpr int kExitConfig = 2;
constexpr int kExitManifold = 3;
constexpr int kExitSolver = 4;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string vec_json(const std::vector<double>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out + "]";
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

[[noreturn]] void fail(int code, const std::string& message) {
  std::string reason;
  switch (code) {
    case kExitConfig: reason = "config"; break;
    case kExitManifold: reason = "manifold"; break;
    case kExitSolver: reason = "solver"; break;
    default: reason = "error"; break;
  }
  std::cerr << "{\"error\":\"" << reason << "\",\"message\":\""
            << escape(message) << "\"}" << std::endl;
  std::exit(code);
}

int map_status(rgeom_status s) {
  switch (s) {
    case RGEOM_OK: return 0;
    case RGEOM_ERR_IDENTITY: return kExitIdentity;
    case RGEOM_ERR_CONFIG: return kExitConfig;
    case RGEOM_ERR_PARSE: return kExitManifold;
    case RGEOM_ERR_SOLVER: return kExitSolver;
    case RGEOM_ERR_DOMAIN: return kExitSolver;
  }
  return kExitConfig;
}

void check(rgeom_status s) {
  if (s == RGEOM_OK) return;
  fail(map_status(s), rgeom_last_error());
}

struct ManifoldHandle {
  rgeom_manifold* m = nullptr;
  ~ManifoldHandle() { rgeom_manifold_destroy(m); }
};

void open_manifold(const std::string& ref, ManifoldHandle* h) {
  const rgeom_status s = rgeom_manifold_create(ref.c_str(), &h->m);
  if (s != RGEOM_OK) fail(kExitManifold, rgeom_last_error());
}

std::vector<double> parse_components(const std::string& text, int n,
                                     const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(kExitConfig, "cannot parse " + what + " component '" + item + "'");
    }
  }
  if (n > 0 && static_cast<int>(out.size()) != n)
    fail(kExitConfig, what + " must have " + std::to_string(n) + " components");
  return out;
}

// Direction syntax: "e1".."e9" for basis vectors, else comma components.
std::vector<double> parse_direction(const std::string& text, int n,
                                    const std::string& what) {
  if (text.size() == 2 && text[0] == 'e' && text[1] >= '1' && text[1] <= '9') {
    const int index = text[1] - '1';
    if (index >= n)
      fail(kExitConfig, what + ": basis index out of range for dimension " +
                            std::to_string(n));
    std::vector<double> out(static_cast<size_t>(n), 0.0);
    out[static_cast<size_t>(index)] = 1.0;
    return out;
  }
  return parse_components(text, n, what);
}

struct CommonFlags {
  std::string manifold;
  std::string config_path;
  rgeom_solver_config solver{};
};

void add_solver_flags(CLI::App* cmd, CommonFlags* flags) {
  rgeom_solver_config_default(&flags->solver);
  cmd->add_option("--manifold", flags->manifold,
                  "built-in name or path to a .metric file")
      ->required();
  cmd->add_option("--config", flags->config_path,
                  "JSON config file; flags override file values");
  cmd->add_option("--steps-per-unit", flags->solver.steps_per_unit,
                  "RK4 steps per unit affine parameter")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--bvp-max-iter", flags->solver.bvp_max_iter,
                  "shooting iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--bvp-tol", flags->solver.bvp_tol,
                  "shooting endpoint tolerance");
  cmd->add_option("--fd-eps", flags->solver.fd_eps,
                  "finite-difference step for group expansions");
  cmd->add_flag("--no-richardson",
                [flags](int64_t) { flags->solver.richardson = 0; },
                "disable Richardson extrapolation");
}

// Apply config-file values for keys whose flags were not given on the
// command line. Flag values win because CLI11 already wrote them.
void apply_config_file(const CLI::App& cmd, CommonFlags* flags,
                       rgeom_verify_options* verify_opts) {
  if (flags->config_path.empty()) return;
  std::ifstream in(flags->config_path);
  if (!in) fail(kExitConfig, "cannot open config file " + flags->config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(kExitConfig, std::string("config file: ") + e.what());
  }
  auto given = [&](const std::string& flag) {
    return cmd.count(flag) > 0;
  };
  try {
    if (j.contains("steps_per_unit") && !given("--steps-per-unit"))
      flags->solver.steps_per_unit = j["steps_per_unit"].get<int>();
    if (j.contains("bvp_max_iter") && !given("--bvp-max-iter"))
      flags->solver.bvp_max_iter = j["bvp_max_iter"].get<int>();
    if (j.contains("bvp_tol") && !given("--bvp-tol"))
      flags->solver.bvp_tol = j["bvp_tol"].get<double>();
    if (j.contains("fd_eps") && !given("--fd-eps"))
      flags->solver.fd_eps = j["fd_eps"].get<double>();
    if (j.contains("richardson") && !given("--no-richardson"))
      flags->solver.richardson = j["richardson"].get<bool>() ? 1 : 0;
    if (verify_opts) {
      if (j.contains("seed") && !given("--seed"))
        verify_opts->seed = j["seed"].get<unsigned long long>();
      if (j.contains("samples") && !given("--samples"))
        verify_opts->samples = j["samples"].get<int>();
      if (j.contains("threads") && !given("--threads"))
        verify_opts->threads = j["threads"].get<int>();
    }
  } catch (const std::exception& e) {
    fail(kExitConfig, std::string("config file: ") + e.what());
  }
}

int cmd_manifolds() {
  char* names = nullptr;
  check(rgeom_builtin_manifolds(&names));
  std::string joined = names;
  rgeom_string_free(names);
  std::string out = "{\"manifolds\":[";
  std::stringstream ss(joined);
  std::string name;
  bool first = true;
  while (std::getline(ss, name)) {
    if (!first) out += ",";
    out += "\"" + name + "\"";
    first = false;
  }
  out += "]}";
  std::cout << out << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deformed-group verifier for Riemannian charts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rgeom_version()));

  auto* manifolds_cmd =
      app.add_subcommand("manifolds", "list built-in manifolds");

  // verify ----------------------------------------------------------------
  auto* verify_cmd =
      app.add_subcommand("verify", "run the full identity suite");
  CommonFlags verify_flags;
  rgeom_verify_options verify_opts;
  rgeom_verify_options_default(&verify_opts);
  unsigned long long seed_flag = verify_opts.seed;
  add_solver_flags(verify_cmd, &verify_flags);
  verify_cmd->add_option("--samples", verify_opts.samples, "sample points")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", seed_flag, "random draw seed");
  verify_cmd->add_option("--threads", verify_opts.threads,
                         "worker threads (0 = hardware)");
  std::vector<std::string> tol_items;
  verify_cmd->add_option("--tol", tol_items,
                         "per-identity tolerance override, id=value");
  std::string out_path;
  verify_cmd->add_option("--out", out_path, "write the JSON report here");

  // geodesic ----------------------------------------------------------------
  auto* geo_cmd = app.add_subcommand(
      "geodesic", "geodesic queries: --to for distance, --dir/--length for IVP");
  CommonFlags geo_flags;
  add_solver_flags(geo_cmd, &geo_flags);
  std::string geo_from, geo_to, geo_dir;
  double geo_length = 1.0;
  geo_cmd->add_option("--from", geo_from, "start point, comma separated")
      ->required();
  geo_cmd->add_option("--to", geo_to, "target point (boundary-value mode)");
  geo_cmd->add_option("--dir", geo_dir,
                      "initial chart velocity (initial-value mode)");
  geo_cmd->add_option("--length", geo_length, "affine parameter length");

  // transport ---------------------------------------------------------------
  auto* tr_cmd = app.add_subcommand("transport",
                                    "transport a frame vector along a geodesic");
  CommonFlags tr_flags;
  add_solver_flags(tr_cmd, &tr_flags);
  std::string tr_at, tr_dir, tr_vec, tr_kind = "pi";
  tr_cmd->add_option("--at", tr_at, "base point")->required();
  tr_cmd->add_option("--dir", tr_dir, "geodesic parameter (frame vector)")
      ->required();
  tr_cmd->add_option("--vec", tr_vec, "vector at the far end to carry back")
      ->required();
  tr_cmd->add_option("--kind", tr_kind, "pi | lambda")
      ->check(CLI::IsMember({"pi", "lambda"}));

  // holonomy ----------------------------------------------------------------
  auto* hol_cmd =
      app.add_subcommand("holonomy", "transport around a geodesic quadrilateral");
  CommonFlags hol_flags;
  add_solver_flags(hol_cmd, &hol_flags);
  std::string hol_at, hol_dirs = "e1,e2";
  double hol_scale = 0.1;
  hol_cmd->add_option("--at", hol_at, "loop corner point")->required();
  hol_cmd->add_option("--dirs", hol_dirs,
                      "two side directions, e.g. e1,e2 or components a;b");
  hol_cmd->add_option("--scale", hol_scale, "leg length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help/--version
    std::cerr << e.what() << std::endl;
    return kExitConfig;
  }

  if (manifolds_cmd->parsed()) return cmd_manifolds();

  if (verify_cmd->parsed()) {
    apply_config_file(*verify_cmd, &verify_flags, &verify_opts);
    if (verify_cmd->count("--seed")) verify_opts.seed = seed_flag;
    verify_opts.solver = verify_flags.solver;
    std::string tol_joined;
    for (const auto& item : tol_items) {
      if (!tol_joined.empty()) tol_joined += ",";
      tol_joined += item;
    }
    if (!tol_joined.empty()) verify_opts.tol_overrides = tol_joined.c_str();

    ManifoldHandle h;
    open_manifold(verify_flags.manifold, &h);

    const auto t0 = std::chrono::steady_clock::now();
    char* json = nullptr;
    int all_pass = 0;
    const rgeom_status s = rgeom_verify(h.m, &verify_opts, &json, &all_pass);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (s != RGEOM_OK && s != RGEOM_ERR_IDENTITY)
      fail(map_status(s), rgeom_last_error());

    std::string report = json ? json : "";
    rgeom_string_free(json);
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) fail(kExitConfig, "cannot write " + out_path);
      out << report;
    } else {
      std::cout << report << std::endl;
    }
    std::cerr << (all_pass ? "PASS" : "FAIL") << " manifold="
              << rgeom_manifold_name(h.m) << " samples=" << verify_opts.samples
              << " seed=" << verify_opts.seed << " wall_time=" << fmt(elapsed)
              << "s" << std::endl;
    return all_pass ? 0 : kExitIdentity;
  }

  if (geo_cmd->parsed()) {
    apply_config_file(*geo_cmd, &geo_flags, nullptr);
    ManifoldHandle h;
    open_manifold(geo_flags.manifold, &h);
    const int n = rgeom_manifold_dim(h.m);
    const std::vector<double> from = parse_components(geo_from, n, "--from");

    if (!geo_to.empty()) {
      const std::vector<double> to = parse_components(geo_to, n, "--to");
      double dist = 0.0;
      std::vector<double> t(static_cast<size_t>(n), 0.0);
      check(rgeom_log(h.m, from.data(), to.data(), &geo_flags.solver, t.data()));
      check(rgeom_distance(h.m, from.data(), to.data(), &geo_flags.solver,
                           &dist));
      std::cout << "{\"manifold\":\"" << rgeom_manifold_name(h.m)
                << "\",\"from\":" << vec_json(from) << ",\"to\":" << vec_json(to)
                << ",\"log\":" << vec_json(t) << ",\"distance\":" << fmt(dist)
                << "}" << std::endl;
      return 0;
    }
    if (geo_dir.empty())
      fail(kExitConfig, "geodesic needs either --to or --dir");
    const std::vector<double> dir = parse_direction(geo_dir, n, "--dir");
    std::vector<double> end_x(static_cast<size_t>(n), 0.0);
    std::vector<double> end_v(static_cast<size_t>(n), 0.0);
    check(rgeom_geodesic(h.m, from.data(), dir.data(), geo_length,
                         &geo_flags.solver, end_x.data(), end_v.data()));
    std::cout << "{\"manifold\":\"" << rgeom_manifold_name(h.m)
              << "\",\"from\":" << vec_json(from) << ",\"dir\":" << vec_json(dir)
              << ",\"length\":" << fmt(geo_length)
              << ",\"end\":" << vec_json(end_x)
              << ",\"end_velocity\":" << vec_json(end_v) << "}" << std::endl;
    return 0;
  }

  if (tr_cmd->parsed()) {
    apply_config_file(*tr_cmd, &tr_flags, nullptr);
    ManifoldHandle h;
    open_manifold(tr_flags.manifold, &h);
    const int n = rgeom_manifold_dim(h.m);
    const std::vector<double> at = parse_components(tr_at, n, "--at");
    const std::vector<double> dir = parse_direction(tr_dir, n, "--dir");
    const std::vector<double> vec = parse_direction(tr_vec, n, "--vec");
    std::vector<double> out(static_cast<size_t>(n), 0.0);
    if (tr_kind == "pi")
      check(rgeom_pi_transport(h.m, at.data(), dir.data(), vec.data(),
                               &tr_flags.solver, out.data()));
    else
      check(rgeom_lambda_transport(h.m, at.data(), dir.data(), vec.data(),
                                   &tr_flags.solver, out.data()));
    std::cout << "{\"manifold\":\"" << rgeom_manifold_name(h.m)
              << "\",\"kind\":\"" << tr_kind << "\",\"at\":" << vec_json(at)
              << ",\"dir\":" << vec_json(dir) << ",\"vec\":" << vec_json(vec)
              << ",\"result\":" << vec_json(out) << "}" << std::endl;
    return 0;
  }

  if (hol_cmd->parsed()) {
    apply_config_file(*hol_cmd, &hol_flags, nullptr);
    ManifoldHandle h;
    open_manifold(hol_flags.manifold, &h);
    const int n = rgeom_manifold_dim(h.m);
    const std::vector<double> at = parse_components(hol_at, n, "--at");

    std::vector<double> a, b;
    const size_t semi = hol_dirs.find(';');
    if (semi != std::string::npos) {
      a = parse_direction(hol_dirs.substr(0, semi), n, "--dirs (first)");
      b = parse_direction(hol_dirs.substr(semi + 1), n, "--dirs (second)");
    } else {
      const size_t comma = hol_dirs.find(',');
      if (comma == std::string::npos)
        fail(kExitConfig, "--dirs needs two directions");
      a = parse_direction(hol_dirs.substr(0, comma), n, "--dirs (first)");
      b = parse_direction(hol_dirs.substr(comma + 1), n, "--dirs (second)");
    }
    std::vector<double> rotation(static_cast<size_t>(n * n), 0.0);
    double angle = 0.0, closure = 0.0;
    check(rgeom_holonomy(h.m, at.data(), a.data(), b.data(), hol_scale,
                         &hol_flags.solver, rotation.data(), &angle, &closure));
    std::cout << "{\"manifold\":\"" << rgeom_manifold_name(h.m)
              << "\",\"at\":" << vec_json(at) << ",\"a\":" << vec_json(a)
              << ",\"b\":" << vec_json(b) << ",\"scale\":" << fmt(hol_scale)
              << ",\"angle\":" << fmt(angle)
              << ",\"closure_defect\":" << fmt(closure)
              << ",\"rotation\":" << vec_json(rotation) << "}" << std::endl;
    return 0;
  }

  return kExitConfig;
}
