#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rgeom/manifold.hpp"

namespace rgeom {

/// Closed-form built-in metric sources. These are hand-written evaluators,
/// independent of the expression DSL, so the two routes can be checked
/// against each other.
std::shared_ptr<const MetricSource> make_euclidean_source(int n);
std::shared_ptr<const MetricSource> make_sphere_source();     // unit, chart (theta, phi)
std::shared_ptr<const MetricSource> make_halfplane_source();  // Poincare, chart (x, y), y > 0

/// Names accepted by resolve_builtin: "euclidean<n>", "sphere", "halfplane".
std::vector<std::string> builtin_manifold_names();

/// Returns nullptr when the name is not a built-in.
std::shared_ptr<const MetricSource> resolve_builtin(const std::string& name);

/// Resolve a manifold reference: a built-in name, or a path to a .metric
/// file when the string ends in ".metric". Throws ParseError / ConfigError.
Manifold load_manifold(const std::string& ref);

/// Build a manifold from .metric text (used by tests and the C API).
Manifold manifold_from_metric_text(const std::string& text,
                                   const std::string& name);

}  // namespace rgeom
