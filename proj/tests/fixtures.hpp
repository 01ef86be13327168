#pragma once

#include "satscape/ksat.hpp"

namespace fixture {

using satscape::Clause;
using satscape::Formula;
using satscape::Literal;

inline Literal pos(std::uint32_t v) { return {v, false}; }
inline Literal neg(std::uint32_t v) { return {v, true}; }

/// (not x2 or not x1) and (x3 or not x1) and (x2 or x3), with x1..x3 stored
/// as variables 0..2.
inline Formula fig1() {
  return Formula(3, 2,
                 {Clause({neg(1), neg(0)}), Clause({pos(2), neg(0)}), Clause({pos(1), pos(2)})});
}

}  // namespace fixture
