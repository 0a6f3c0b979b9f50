#pragma once

#include <limits>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace surfi::detail {

// Schema reader that collects every problem before failing. Absent keys keep
// the caller's default.
class JsonReader {
 public:
  JsonReader(const nlohmann::json& j, std::string where, std::vector<std::string>& errors)
      : j_(j), where_(std::move(where)), errors_(errors) {
    if (!j_.is_object()) errors_.push_back(where_ + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    const auto& v = j_.at(key);
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_unsigned()) {
        errors_.push_back(where_ + "." + key + ": expected a non-negative integer");
        return;
      }
    }
    try {
      out = v.get<T>();
    } catch (const nlohmann::json::exception&) {
      errors_.push_back(where_ + "." + key + ": wrong type");
    }
  }

  void read_number(const char* key, double& out) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    const auto& v = j_.at(key);
    if (v.is_number()) {
      out = v.get<double>();
    } else if (v.is_string() && (v == "inf" || v == "Infinity")) {
      out = std::numeric_limits<double>::infinity();
    } else {
      errors_.push_back(where_ + "." + key + ": expected a number");
    }
  }

  const nlohmann::json* child(const char* key) {
    seen_.insert(key);
    return j_.is_object() && j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void fail(const std::string& key, const std::string& msg) { errors_.push_back(where_ + "." + key + ": " + msg); }

  void reject_unknown() {
    if (!j_.is_object()) return;
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) errors_.push_back(where_ + "." + k + ": unknown key");
    }
  }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

}  // namespace surfi::detail
