#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgeom/geodesic.hpp"
#include "rgeom/manifold.hpp"

namespace rgeom {

/// How an identity's residual is judged.
///  - Residual: pass iff residual < tolerance, on every manifold.
///  - RatioOnCurved: on curved manifolds the residual is a relative ratio
///    defect judged against tolerance; on flat manifolds both sides must
///    vanish below flat_tolerance.
///  - ContrastOnCurved: the defect must stay below flat_tolerance on flat
///    manifolds and EXCEED contrast_floor on curved ones (the law is
///    expected to break in curved space).
enum class CheckMode { Residual, RatioOnCurved, ContrastOnCurved };

struct SuiteConfig {
  uint64_t seed = 7;
  int samples = 20;
  int threads = 0;  // 0 = hardware; always capped by env RGROUPS_THREADS
  SolverConfig solver;
  std::vector<std::pair<std::string, double>> tol_overrides;
};

struct IdentityRecord {
  std::string id;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool failed_to_evaluate = false;
  std::string note;     // error text or variant marker
  std::vector<double> params;
};

struct SampleResult {
  int index = 0;
  Vec point;
  std::vector<IdentityRecord> records;
};

struct IdentitySummary {
  std::string id;
  std::string law;
  CheckMode mode = CheckMode::Residual;
  int count = 0;
  int errors = 0;
  double max_residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string tool_version;
  std::string manifold;
  int dim = 0;
  bool flat = false;
  SuiteConfig config;
  std::vector<IdentitySummary> identities;
  std::vector<SampleResult> samples;
  bool all_pass = false;

  /// Deterministic JSON (sorted construction order, 17 significant digits).
  std::string to_json() const;
};

/// Catalogue entry description, exposed so callers can list identities.
struct IdentityInfo {
  std::string id;
  std::string law;
  CheckMode mode;
  double tolerance;       // Residual / RatioOnCurved threshold
  double flat_tolerance;  // flat-manifold threshold for the curved modes
  double contrast_floor;  // ContrastOnCurved: curved defect must exceed this
};

std::vector<IdentityInfo> identity_catalogue();

/// Run the full identity suite at seeded sample points.
SuiteReport run_suite(const Manifold& m, const SuiteConfig& cfg);

/// Sampling window used for seeded draws: the domain shrunk so that the
/// geodesic legs and difference stencils the suite shoots stay inside.
DomainBox sampling_window(const Manifold& m);

/// Seeded sample point for the given index (shared with tests).
Vec sample_point(const Manifold& m, uint64_t seed, int index);

/// True when the manifold is numerically flat across the given points.
bool is_flat(const Manifold& m, const std::vector<Vec>& points);

extern const char* const kToolVersion;

}  // namespace rgeom
