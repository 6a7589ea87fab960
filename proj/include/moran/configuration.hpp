#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "moran/graph.hpp"
#include "moran/rng.hpp"

namespace moran {

/// t1 is the type with fitness r, t2 the type with fitness 1.
enum class Type : std::uint8_t { t1 = 0, t2 = 1 };

constexpr Type other(Type t) noexcept { return t == Type::t1 ? Type::t2 : Type::t1; }
std::string to_string(Type t);
Type parse_type(const std::string& name);

/// Relative fitness of t1 against t2 (which has fitness 1).
struct FitnessParams {
  double r = 1.0;

  /// Throws InvalidFitness unless r is finite and positive.
  void validate() const;
  double weight(Type t) const noexcept { return t == Type::t1 ? r : 1.0; }
};

/// Type assignment over the nodes with cached per-type counts.
class Configuration {
 public:
  Configuration() = default;
  Configuration(NodeId n, Type fill) : types_(n, fill), count_t1_(fill == Type::t1 ? n : 0) {}

  /// Node v has type t, every other node the other type.
  static Configuration single(NodeId n, NodeId v, Type t);

  /// Bit v set means node v is t1. Only for n <= 64.
  static Configuration from_mask(NodeId n, std::uint64_t mask);
  std::uint64_t mask() const;

  /// Hexadecimal bitstring, least significant digit holds nodes 0..3.
  static Configuration from_hex(NodeId n, const std::string& hex);
  std::string to_hex() const;

  NodeId size() const noexcept { return static_cast<NodeId>(types_.size()); }
  Type operator[](NodeId v) const noexcept { return types_[v]; }
  NodeId count_t1() const noexcept { return count_t1_; }
  NodeId count_t2() const noexcept { return size() - count_t1_; }
  NodeId count(Type t) const noexcept { return t == Type::t1 ? count_t1() : count_t2(); }

  void set(NodeId v, Type t) noexcept {
    if (types_[v] == t) return;
    count_t1_ += (t == Type::t1) ? 1 : -1;
    types_[v] = t;
  }

  /// Total fitness r * count_t1 + count_t2.
  double total_weight(const FitnessParams& fitness) const noexcept {
    return fitness.r * count_t1() + count_t2();
  }

  bool operator==(const Configuration&) const = default;

 private:
  std::vector<Type> types_;
  NodeId count_t1_ = 0;
};

struct UniformSingle {
  Type type;  // the type held by the single node
};

struct Explicit {
  Configuration config;
};

using InitialDistribution = std::variant<UniformSingle, Explicit>;

/// Throws InvalidArgument when an explicit configuration has the wrong size.
void validate_distribution(const InitialDistribution& dist, NodeId n);

Configuration draw_initial(const InitialDistribution& dist, NodeId n, Rng& rng);

}  // namespace moran
