#pragma once

#include "shapcf/kernels.hpp"

namespace shapcf::kernels::detail {

extern const KernelTable kReferenceTable;

#if defined(SHAPCF_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

}  // namespace shapcf::kernels::detail
