#pragma once

#include "subdiff/kernels.hpp"

namespace subdiff::kernels::detail {

#ifdef SUBDIFF_HAVE_AVX2
const KernelSet& avx2_set() noexcept;
#endif

}  // namespace subdiff::kernels::detail
