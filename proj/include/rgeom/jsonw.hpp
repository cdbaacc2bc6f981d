#pragma once

#include <string>
#include <vector>

#include "rgeom/linalg.hpp"

namespace rgeom {

/// Minimal deterministic JSON emitter. Keys appear in insertion order,
/// floating-point values are printed with 17 significant digits, so a
/// report built from the same inputs is byte-identical run to run.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();

  JsonWriter& key(const std::string& k);

  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(long long v);
  JsonWriter& value(unsigned long long v);
  JsonWriter& value(bool v);
  JsonWriter& value(const char* v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const Vec& v);
  JsonWriter& null_value();

  JsonWriter& kv(const std::string& k, double v) { return key(k).value(v); }
  JsonWriter& kv(const std::string& k, int v) { return key(k).value(v); }
  JsonWriter& kv(const std::string& k, bool v) { return key(k).value(v); }
  JsonWriter& kv(const std::string& k, const std::string& v) { return key(k).value(v); }
  JsonWriter& kv(const std::string& k, const Vec& v) { return key(k).value(v); }

  const std::string& str() const { return out_; }

  static std::string format_double(double v);
  static std::string escape(const std::string& s);

 private:
  void separator();
  std::string out_;
  std::vector<bool> first_in_scope_;
  bool pending_key_ = false;
};

}  // namespace rgeom
