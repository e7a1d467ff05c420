#pragma once

#include <string>
#include <vector>

#include "shmbs/common.hpp"

namespace shmbs {

// Minimal insertion-ordered JSON emitter. Report files must be byte
// identical across runs and carry floats at 17 significant digits, so
// serialization stays fully under our control.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(long v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v);
  JsonWriter& value(const VectorXd& v);
  JsonWriter& value(const std::vector<std::string>& v);

  template <typename T>
  JsonWriter& kv(const std::string& k, const T& v) {
    key(k);
    return value(v);
  }

  std::string str() const { return out_; }
  void write_file(const std::string& path) const;

 private:
  void comma();
  static std::string escape(const std::string& s);

  std::string out_;
  std::vector<bool> need_comma_;
  bool pending_key_ = false;
};

}  // namespace shmbs
