#ifndef PHISHTGL_BASE64_HPP_
#define PHISHTGL_BASE64_HPP_

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "phishtgl/errors.hpp"

namespace phishtgl {

inline std::string base64_encode(const std::vector<double>& values) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  const auto* bytes = reinterpret_cast<const unsigned char*>(values.data());
  std::size_t len = values.size() * sizeof(double);
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    std::uint32_t chunk = bytes[i] << 16;
    if (i + 1 < len) chunk |= bytes[i + 1] << 8;
    if (i + 2 < len) chunk |= bytes[i + 2];
    out.push_back(alphabet[(chunk >> 18) & 63]);
    out.push_back(alphabet[(chunk >> 12) & 63]);
    out.push_back(i + 1 < len ? alphabet[(chunk >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? alphabet[chunk & 63] : '=');
  }
  return out;
}

inline std::vector<double> base64_decode(const std::string& text, std::size_t count) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<unsigned char> bytes;
  bytes.reserve(text.size() / 4 * 3);
  std::uint32_t chunk = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    int v = value_of(c);
    if (v < 0) throw SchemaError("invalid base64 character");
    chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      bytes.push_back(static_cast<unsigned char>((chunk >> bits) & 0xFF));
    }
  }
  if (bytes.size() != count * sizeof(double))
    throw SchemaError("base64 payload has wrong length");
  std::vector<double> out(count);
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

}  // namespace phishtgl

#endif  // PHISHTGL_BASE64_HPP_
