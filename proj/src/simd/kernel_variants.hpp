#pragma once

#include "zipfit/simd/kernels.hpp"

namespace zipfit::simd::detail {

// exp() arguments below ln(2^-1020) produce zero in every variant, so the
// scalar and vector kernels agree in the denormal range.
inline constexpr double kExpFlushArg = -707.02857865089213;

extern const KernelTable kScalarTable;

#if defined(ZIPFIT_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

}  // namespace zipfit::simd::detail
