#pragma once

#include "mcpert/kernels.hpp"

namespace mcpert::kernels::detail {

#if defined(MCPERT_WITH_AVX2)
const Table& avx2_table();
#endif
#if defined(MCPERT_WITH_NEON)
const Table& neon_table();
#endif

}  // namespace mcpert::kernels::detail
