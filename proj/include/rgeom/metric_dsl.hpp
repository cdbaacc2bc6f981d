#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rgeom/jet.hpp"
#include "rgeom/manifold.hpp"

namespace rgeom {

/// Expression tree for one metric entry.
struct ExprNode {
  enum class Kind { Number, Coord, Add, Sub, Mul, Div, Neg, Pow, Call };
  enum class Func { Sin, Cos, Sinh, Cosh, Exp, Ln, Sqrt };

  Kind kind = Kind::Number;
  double number = 0.0;   // Kind::Number
  int coord = -1;        // Kind::Coord
  int exponent = 0;      // Kind::Pow
  Func func = Func::Sin; // Kind::Call
  std::vector<std::unique_ptr<ExprNode>> children;

  Jet2 eval(const std::vector<Jet2>& coords) const;
  bool equals(const ExprNode& other) const;
};

/// Parsed .metric definition: dimension, coordinate names, open domain
/// box, and the lower triangle of metric entry expressions.
class MetricSpec {
 public:
  int dim() const { return dim_; }
  const std::vector<std::string>& coords() const { return coord_names_; }
  const DomainBox& domain() const { return domain_; }
  const ExprNode& entry(int i, int j) const;  // j <= i

  /// Evaluate g with exact first and second derivatives at x.
  MetricJet eval(const Vec& x) const;

  /// Canonical text form; parsing it back yields an identical spec.
  std::string pretty_print() const;

  friend MetricSpec parse_metric(const std::string& text);

 private:
  int dim_ = 0;
  std::vector<std::string> coord_names_;
  DomainBox domain_;
  std::vector<std::unique_ptr<ExprNode>> entries_;  // row-major lower triangle
  int entry_index(int i, int j) const { return i * (i + 1) / 2 + j; }
};

/// Parse a .metric definition. Throws ParseError with line/column on
/// syntax errors, unknown identifiers, bad indices, or missing entries.
MetricSpec parse_metric(const std::string& text);

/// Wrap a parsed spec as a metric source usable by Manifold.
std::shared_ptr<const MetricSource> make_dsl_source(MetricSpec spec,
                                                    std::string name);

}  // namespace rgeom
