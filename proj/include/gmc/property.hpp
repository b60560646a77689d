#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gmc {

/// Structural facts a matrix can carry. The set is closed: the registry
/// constraint language and the inference engine agree on exactly these.
enum class Property : std::uint8_t {
  Diagonal = 0,
  LowerTriangular,
  UpperTriangular,
  Symmetric,
  SPD,
  FullRank,
};

inline constexpr int kPropertyCount = 6;

inline constexpr std::array<Property, kPropertyCount> all_properties() {
  return {Property::Diagonal,  Property::LowerTriangular,
          Property::UpperTriangular, Property::Symmetric,
          Property::SPD,       Property::FullRank};
}

inline const char* to_string(Property p) {
  switch (p) {
  case Property::Diagonal: return "Diagonal";
  case Property::LowerTriangular: return "LowerTriangular";
  case Property::UpperTriangular: return "UpperTriangular";
  case Property::Symmetric: return "Symmetric";
  case Property::SPD: return "SPD";
  case Property::FullRank: return "FullRank";
  }
  return "?";
}

inline std::optional<Property> property_from_string(std::string_view s) {
  for (Property p : all_properties())
    if (s == to_string(p)) return p;
  return std::nullopt;
}

/// Small value-semantic set of Property flags.
class PropertySet {
public:
  PropertySet() = default;
  PropertySet(std::initializer_list<Property> ps) {
    for (Property p : ps) insert(p);
  }

  bool contains(Property p) const { return bits_ & bit(p); }
  void insert(Property p) { bits_ |= bit(p); }
  void erase(Property p) { bits_ &= ~bit(p); }
  bool empty() const { return bits_ == 0; }

  PropertySet united(const PropertySet& o) const {
    PropertySet r;
    r.bits_ = bits_ | o.bits_;
    return r;
  }
  bool subset_of(const PropertySet& o) const {
    return (bits_ & ~o.bits_) == 0;
  }

  friend bool operator==(const PropertySet&, const PropertySet&) = default;

  std::string str() const {
    std::string out;
    for (Property p : all_properties()) {
      if (!contains(p)) continue;
      if (!out.empty()) out += ", ";
      out += to_string(p);
    }
    return out;
  }

private:
  static std::uint8_t bit(Property p) {
    return static_cast<std::uint8_t>(1u << static_cast<std::uint8_t>(p));
  }
  std::uint8_t bits_ = 0;
};

/// Smallest superset closed under the property implication lattice:
/// Diagonal => both triangles, and Symmetric on square shapes (a rectangular
/// diagonal matrix is trapezoidal, not symmetric); SPD => Symmetric and
/// FullRank. Idempotent by construction (the lattice is acyclic and two
/// levels deep).
inline PropertySet closure(PropertySet props, bool square = true) {
  if (props.contains(Property::Diagonal)) {
    props.insert(Property::LowerTriangular);
    props.insert(Property::UpperTriangular);
    if (square) props.insert(Property::Symmetric);
  }
  if (props.contains(Property::SPD)) {
    props.insert(Property::Symmetric);
    props.insert(Property::FullRank);
  }
  return props;
}

} // namespace gmc
