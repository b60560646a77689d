#pragma once

#include <string>

#include "gmc/property.hpp"
#include "gmc/shape.hpp"

namespace gmc {

/// A named input matrix (or vector) with its declared properties. The stored
/// property set is kept closed under implication so lookups never have to
/// re-derive Diagonal => LowerTriangular and friends.
struct Operand {
  std::string name;
  Shape shape;
  PropertySet properties;

  Operand() = default;
  Operand(std::string n, Shape s, PropertySet props = {})
      : name(std::move(n)), shape(s) {
    if ((props.contains(Property::Symmetric) || props.contains(Property::SPD)) &&
        !shape.square())
      throw Error(ErrorKind::ShapeMismatch,
                  "operand " + name + " declared symmetric/SPD but has shape " +
                      shape.str());
    properties = closure(props, shape.square());
  }

  friend bool operator==(const Operand&, const Operand&) = default;
};

} // namespace gmc
