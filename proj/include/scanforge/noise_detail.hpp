// Copyright (c) 2026 The scanforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "scanforge/types.hpp"

namespace scanforge::detail {

Point sample_outlier(std::uint64_t seed, std::size_t index, double radius);

Point jitter_point(const Point& p, double sigma, std::uint64_t seed,
                   std::size_t index);

}  // namespace scanforge::detail
