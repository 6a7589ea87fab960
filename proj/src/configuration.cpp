#include "moran/configuration.hpp"

#include <cctype>
#include <cmath>

#include "moran/error.hpp"

namespace moran {

std::string to_string(Type t) { return t == Type::t1 ? "t1" : "t2"; }

Type parse_type(const std::string& name) {
  if (name == "t1") return Type::t1;
  if (name == "t2") return Type::t2;
  throw Error(ErrorCode::InvalidArgument, "unknown type '" + name + "' (expected t1 or t2)");
}

void FitnessParams::validate() const {
  if (!std::isfinite(r) || r <= 0.0) {
    throw Error(ErrorCode::InvalidFitness, "r must be finite and positive, got " + std::to_string(r));
  }
}

Configuration Configuration::single(NodeId n, NodeId v, Type t) {
  Configuration c(n, other(t));
  c.set(v, t);
  return c;
}

Configuration Configuration::from_mask(NodeId n, std::uint64_t mask) {
  if (n > 64) throw Error(ErrorCode::TooLarge, "mask configurations support at most 64 nodes");
  if (n < 64 && (mask >> n) != 0) throw Error(ErrorCode::InvalidArgument, "mask has bits beyond node count");
  Configuration c(n, Type::t2);
  for (NodeId v = 0; v < n; ++v) {
    if ((mask >> v) & 1U) c.set(v, Type::t1);
  }
  return c;
}

std::uint64_t Configuration::mask() const {
  if (size() > 64) throw Error(ErrorCode::TooLarge, "mask configurations support at most 64 nodes");
  std::uint64_t m = 0;
  for (NodeId v = 0; v < size(); ++v) {
    if (types_[v] == Type::t1) m |= std::uint64_t{1} << v;
  }
  return m;
}

Configuration Configuration::from_hex(NodeId n, const std::string& text) {
  std::string hex = text;
  if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex = hex.substr(2);
  if (hex.empty()) throw Error(ErrorCode::InvalidArgument, "empty mask");
  Configuration c(n, Type::t2);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const char ch = static_cast<char>(std::tolower(static_cast<unsigned char>(hex[hex.size() - 1 - i])));
    int digit = 0;
    if (ch >= '0' && ch <= '9') {
      digit = ch - '0';
    } else if (ch >= 'a' && ch <= 'f') {
      digit = ch - 'a' + 10;
    } else {
      throw Error(ErrorCode::InvalidArgument, "mask '" + text + "' is not hexadecimal");
    }
    for (int bit = 0; bit < 4; ++bit) {
      if (!((digit >> bit) & 1)) continue;
      const std::size_t v = 4 * i + static_cast<std::size_t>(bit);
      if (v >= n) throw Error(ErrorCode::InvalidArgument, "mask '" + text + "' sets a bit beyond node count");
      c.set(static_cast<NodeId>(v), Type::t1);
    }
  }
  return c;
}

std::string Configuration::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t digits = (size() + 3) / 4;
  std::string out(digits == 0 ? 1 : digits, '0');
  for (NodeId v = 0; v < size(); ++v) {
    if (types_[v] != Type::t1) continue;
    char& ch = out[out.size() - 1 - v / 4];
    const int value = (ch <= '9' ? ch - '0' : ch - 'a' + 10) | (1 << (v % 4));
    ch = kDigits[value];
  }
  const auto first = out.find_first_not_of('0');
  return first == std::string::npos ? "0" : out.substr(first);
}

void validate_distribution(const InitialDistribution& dist, NodeId n) {
  if (const auto* e = std::get_if<Explicit>(&dist); e && e->config.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "explicit configuration has " + std::to_string(e->config.size()) +
                                                " nodes, graph has " + std::to_string(n));
  }
}

Configuration draw_initial(const InitialDistribution& dist, NodeId n, Rng& rng) {
  if (const auto* single = std::get_if<UniformSingle>(&dist)) {
    return Configuration::single(n, static_cast<NodeId>(rng.below(n)), single->type);
  }
  return std::get<Explicit>(dist).config;
}

}  // namespace moran
