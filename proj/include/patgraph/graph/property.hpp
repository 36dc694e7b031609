#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "patgraph/error.hpp"

namespace patgraph {

using TextList = std::vector<std::string>;

// A stored property value. There is no null alternative: a key without a
// value is simply not stored.
class PropertyValue {
 public:
  using Storage =
      std::variant<std::string, std::int64_t, double, bool, TextList>;

  PropertyValue() : value_(std::string{}) {}
  PropertyValue(std::string s) : value_(std::move(s)) {}
  PropertyValue(const char* s) : value_(std::string(s)) {}
  PropertyValue(std::string_view s) : value_(std::string(s)) {}
  PropertyValue(std::int64_t i) : value_(i) {}
  PropertyValue(int i) : value_(static_cast<std::int64_t>(i)) {}
  PropertyValue(double d) : value_(d) {}
  PropertyValue(bool b) : value_(b) {}
  PropertyValue(TextList l) : value_(std::move(l)) {}
  PropertyValue(std::initializer_list<std::string> l) : value_(TextList(l)) {}

  bool is_text() const noexcept { return std::holds_alternative<std::string>(value_); }
  bool is_int() const noexcept { return std::holds_alternative<std::int64_t>(value_); }
  bool is_double() const noexcept { return std::holds_alternative<double>(value_); }
  bool is_number() const noexcept { return is_int() || is_double(); }
  bool is_bool() const noexcept { return std::holds_alternative<bool>(value_); }
  bool is_list() const noexcept { return std::holds_alternative<TextList>(value_); }

  const std::string& text() const { return std::get<std::string>(value_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(value_); }
  double as_double() const {
    return is_int() ? static_cast<double>(as_int()) : std::get<double>(value_);
  }
  bool as_bool() const { return std::get<bool>(value_); }
  const TextList& list() const { return std::get<TextList>(value_); }

  const Storage& storage() const noexcept { return value_; }

  // Numbers compare by value across the int/float split; otherwise the
  // alternatives must agree.
  friend bool operator==(const PropertyValue& a, const PropertyValue& b) {
    if (a.is_number() && b.is_number()) {
      if (a.is_int() && b.is_int()) return a.as_int() == b.as_int();
      return a.as_double() == b.as_double();
    }
    return a.value_ == b.value_;
  }

  // Canonical text used for index keys and display. Distinct values of
  // different kinds never collide because of the type prefix.
  std::string index_key() const {
    if (is_number()) {
      double d = as_double();
      if (is_int() || (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9e15)) {
        return "n:" + std::to_string(is_int() ? as_int() : static_cast<std::int64_t>(d));
      }
      return "n:" + format_double(d);
    }
    if (is_text()) return "s:" + text();
    if (is_bool()) return as_bool() ? "b:1" : "b:0";
    std::string out = "l:";
    for (const auto& item : list()) {
      out += std::to_string(item.size());
      out += ':';
      out += item;
    }
    return out;
  }

  // Human rendering: lists joined with ';'.
  std::string display() const {
    if (is_text()) return text();
    if (is_int()) return std::to_string(as_int());
    if (is_double()) return format_double(std::get<double>(value_));
    if (is_bool()) return as_bool() ? "true" : "false";
    std::string out;
    for (std::size_t i = 0; i < list().size(); ++i) {
      if (i) out += ';';
      out += list()[i];
    }
    return out;
  }

  static std::string format_double(double d) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
    if (ec != std::errc{}) return std::to_string(d);
    return std::string(buf, ptr);
  }

 private:
  Storage value_;
};

// Sorted so that serialisation and comparisons are deterministic.
using PropertyMap = std::map<std::string, PropertyValue, std::less<>>;

inline nlohmann::json to_json_value(const PropertyValue& v) {
  return std::visit(
      [](const auto& x) -> nlohmann::json { return nlohmann::json(x); },
      v.storage());
}

inline PropertyValue from_json_value(const nlohmann::json& j) {
  if (j.is_string()) return PropertyValue(j.get<std::string>());
  if (j.is_boolean()) return PropertyValue(j.get<bool>());
  if (j.is_number_integer()) return PropertyValue(j.get<std::int64_t>());
  if (j.is_number_float()) return PropertyValue(j.get<double>());
  if (j.is_array()) {
    TextList items;
    for (const auto& e : j) {
      if (!e.is_string()) {
        throw Error(ErrorKind::FormatError, "list properties may only hold text items");
      }
      items.push_back(e.get<std::string>());
    }
    return PropertyValue(std::move(items));
  }
  throw Error(ErrorKind::FormatError, "unsupported property value: " + j.dump());
}

inline nlohmann::json to_json(const PropertyMap& props) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : props) out[k] = to_json_value(v);
  return out;
}

inline PropertyMap props_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::FormatError, "properties must be an object");
  PropertyMap out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.value().is_null()) continue;
    out.emplace(it.key(), from_json_value(it.value()));
  }
  return out;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

}  // namespace patgraph
