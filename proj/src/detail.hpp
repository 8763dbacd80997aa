#pragma once

#include "gcsf/geometry.hpp"

namespace gcsf::detail {

/// Throws DegenerateProfileError when k_max / k_min of the profile exceeds 1e8.
void require_nondegenerate(const SupportProfile& sp);

}  // namespace gcsf::detail
