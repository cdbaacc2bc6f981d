#include "rgeom/builtins.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rgeom/errors.hpp"
#include "rgeom/metric_dsl.hpp"

namespace rgeom {

namespace {

class EuclideanSource final : public MetricSource {
 public:
  explicit EuclideanSource(int n)
      : n_(n), domain_(DomainBox::unbounded(n)),
        name_("euclidean" + std::to_string(n)) {}

  int dim() const override { return n_; }
  const DomainBox& domain() const override { return domain_; }
  const std::string& name() const override { return name_; }

  MetricJet eval(const Vec&) const override {
    MetricJet out;
    out.g = Mat::identity(n_);
    out.dg = Tensor3(n_);
    out.d2g = Tensor4(n_);
    return out;
  }

 private:
  int n_;
  DomainBox domain_;
  std::string name_;
};

// Unit sphere, chart (theta, phi): g = diag(1, sin^2 theta). The theta box
// stays clear of the coordinate singularities at the poles.
class SphereSource final : public MetricSource {
 public:
  SphereSource() : domain_(DomainBox::unbounded(2)), name_("sphere") {
    domain_.lo[0] = 0.05;
    domain_.hi[0] = 3.09;
  }

  int dim() const override { return 2; }
  const DomainBox& domain() const override { return domain_; }
  const std::string& name() const override { return name_; }

  MetricJet eval(const Vec& x) const override {
    const double t = x[0];
    const double s = std::sin(t);
    const double c = std::cos(t);
    MetricJet out;
    out.g = Mat(2, 2);
    out.dg = Tensor3(2);
    out.d2g = Tensor4(2);
    out.g(0, 0) = 1.0;
    out.g(1, 1) = s * s;
    out.dg(1, 1, 0) = 2.0 * s * c;            // d/dtheta sin^2
    out.d2g(1, 1, 0, 0) = 2.0 * (c * c - s * s);
    return out;
  }

 private:
  DomainBox domain_;
  std::string name_;
};

// Poincare half-plane, chart (x, y), y > 0: g = diag(1/y^2, 1/y^2).
class HalfplaneSource final : public MetricSource {
 public:
  HalfplaneSource() : domain_(DomainBox::unbounded(2)), name_("halfplane") {
    domain_.lo[1] = 0.0;
  }

  int dim() const override { return 2; }
  const DomainBox& domain() const override { return domain_; }
  const std::string& name() const override { return name_; }

  MetricJet eval(const Vec& x) const override {
    const double y = x[1];
    const double w = 1.0 / (y * y);
    MetricJet out;
    out.g = Mat(2, 2);
    out.dg = Tensor3(2);
    out.d2g = Tensor4(2);
    out.g(0, 0) = w;
    out.g(1, 1) = w;
    const double dw = -2.0 * w / y;        // -2/y^3
    const double ddw = 6.0 * w / (y * y);  // 6/y^4
    out.dg(0, 0, 1) = dw;
    out.dg(1, 1, 1) = dw;
    out.d2g(0, 0, 1, 1) = ddw;
    out.d2g(1, 1, 1, 1) = ddw;
    return out;
  }

 private:
  DomainBox domain_;
  std::string name_;
};

}  // namespace

std::shared_ptr<const MetricSource> make_euclidean_source(int n) {
  if (n < 1) throw ConfigError("euclidean dimension must be at least 1");
  return std::make_shared<EuclideanSource>(n);
}

std::shared_ptr<const MetricSource> make_sphere_source() {
  return std::make_shared<SphereSource>();
}

std::shared_ptr<const MetricSource> make_halfplane_source() {
  return std::make_shared<HalfplaneSource>();
}

std::vector<std::string> builtin_manifold_names() {
  return {"euclidean1", "euclidean2", "euclidean3", "sphere", "halfplane"};
}

std::shared_ptr<const MetricSource> resolve_builtin(const std::string& name) {
  if (name == "sphere") return make_sphere_source();
  if (name == "halfplane") return make_halfplane_source();
  if (name.rfind("euclidean", 0) == 0 && name.size() > 9) {
    const std::string suffix = name.substr(9);
    for (char c : suffix)
      if (!std::isdigit(static_cast<unsigned char>(c))) return nullptr;
    const int n = std::stoi(suffix);
    if (n >= 1 && n <= 16) return make_euclidean_source(n);
  }
  return nullptr;
}

Manifold load_manifold(const std::string& ref) {
  if (auto src = resolve_builtin(ref)) return Manifold(src);
  if (ref.size() > 7 && ref.substr(ref.size() - 7) == ".metric") {
    std::ifstream in(ref);
    if (!in)
      throw ConfigError("cannot open metric file '" + ref + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return manifold_from_metric_text(buf.str(), ref);
  }
  throw ConfigError("unknown manifold '" + ref +
                    "' (expected a built-in name or a .metric file path)");
}

Manifold manifold_from_metric_text(const std::string& text,
                                   const std::string& name) {
  MetricSpec spec = parse_metric(text);
  return Manifold(make_dsl_source(std::move(spec), name));
}

}  // namespace rgeom
