/*
 * Copyright (c) 2026, The bwma-sim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

namespace bwma {

enum class Activation : std::uint8_t { None, Gelu, Relu };

std::string_view to_string(Activation a);

inline float relu(float x) { return x > 0.0f ? x : 0.0f; }

// tanh approximation used by BERT.
inline float gelu(float x) {
    constexpr float kSqrt2OverPi = 0.7978845608028654f;
    return 0.5f * x * (1.0f + std::tanh(kSqrt2OverPi * (x + 0.044715f * x * x * x)));
}

/// Element-wise activation over a finished output tile, applied in the
/// tile's store path so it costs no extra memory traffic.
inline void activation_fused(std::span<float> tile, Activation kind) {
    switch (kind) {
        case Activation::None:
            return;
        case Activation::Relu:
            for (float& v : tile) v = relu(v);
            return;
        case Activation::Gelu:
            for (float& v : tile) v = gelu(v);
            return;
    }
}

}  // namespace bwma
