/*
 * Copyright 2026 The hajj-densd Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace densd {

// Crowd density classes, ordered by severity.
enum class Density : int { kModerate = 0, kOvercrowded = 1, kVeryDense = 2 };

inline constexpr int kNumClasses = 3;

inline constexpr std::array<std::string_view, kNumClasses> kDensityNames = {
    "moderate", "overcrowded", "very_dense"};

inline constexpr int ToIndex(Density d) { return static_cast<int>(d); }

inline std::string_view DensityName(Density d) { return kDensityNames[ToIndex(d)]; }

// Accepts the canonical names (case-sensitive) or the digits 0, 1, 2.
std::optional<Density> ParseDensity(std::string_view text);

std::optional<Density> DensityFromIndex(int index);

}  // namespace densd
