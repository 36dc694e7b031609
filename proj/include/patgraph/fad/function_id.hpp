#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "patgraph/error.hpp"

namespace patgraph::fad {

// Function / behaviour identifier: "fN" or "fN_bM" with N, M >= 1.
// Behaviours are distinct sub-functions, so f2_b1 and f2_b2 never compare
// equal.
struct FunctionId {
  std::uint32_t function_index = 1;
  std::optional<std::uint32_t> behaviour_index;

  std::string format() const {
    std::string out = "f" + std::to_string(function_index);
    if (behaviour_index) out += "_b" + std::to_string(*behaviour_index);
    return out;
  }

  auto operator<=>(const FunctionId&) const = default;
};

namespace detail {

// Positive decimal without sign or leading zeros.
inline std::optional<std::uint32_t> parse_index(std::string_view s) {
  if (s.empty() || s.front() == '0') return std::nullopt;
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

inline std::optional<FunctionId> try_parse_function_id(std::string_view raw) {
  if (raw.size() < 2 || raw.front() != 'f') return std::nullopt;
  std::string_view rest = raw.substr(1);
  auto sep = rest.find("_b");
  FunctionId id;
  auto fn = detail::parse_index(rest.substr(0, sep));
  if (!fn) return std::nullopt;
  id.function_index = *fn;
  if (sep != std::string_view::npos) {
    auto bh = detail::parse_index(rest.substr(sep + 2));
    if (!bh) return std::nullopt;
    id.behaviour_index = *bh;
  }
  return id;
}

inline FunctionId parse_function_id(std::string_view raw) {
  if (auto id = try_parse_function_id(raw)) return *id;
  throw Error(ErrorKind::BadFunctionId,
              "bad function id '" + std::string(raw) + "' (expected fN or fN_bM)");
}

}  // namespace patgraph::fad
