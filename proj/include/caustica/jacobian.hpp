#pragma once

#include <complex>

#include "caustica/catalog.hpp"

namespace caustica {

/// det of the 2x2 partials of (f1, f2). Target shifts are constants, so this is s-independent.
template <typename T>
std::complex<T> jacobian_det(const PlaneMap& m, std::complex<T> x, std::complex<T> y) {
  return m.f1x().eval(x, y) * m.f2y().eval(x, y) - m.f1y().eval(x, y) * m.f2x().eval(x, y);
}

inline cplx jacobian_det(const PlaneMap& m, cplx x, cplx y) { return jacobian_det<double>(m, x, y); }

}  // namespace caustica
