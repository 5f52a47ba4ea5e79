#pragma once

// Exact-rational instantiation of the rate kernel.  The compatibility
// identity across restriction levels is exact mathematics; with rational
// inputs these routines witness it with zero rounding.

#include <boost/multiprecision/cpp_int.hpp>

#include "efc/rate_kernel.hpp"

namespace efc::exact {

using Rational = boost::multiprecision::cpp_rational;
using RationalCharacteristics = detail::BasicCharacteristics<Rational>;

inline Rational coag_rate(const RationalCharacteristics& chars, const Partition& grouping) {
  return detail::coag_rate_of(chars, grouping);
}

inline Rational frag_rate(const RationalCharacteristics& chars, const Partition& sub) {
  return detail::frag_rate_of(chars, sub);
}

inline std::vector<std::pair<Partition, Rational>> transition_rates(
    const RationalCharacteristics& chars, const Partition& pi) {
  return detail::transition_rates_of(chars, pi);
}

}  // namespace efc::exact
