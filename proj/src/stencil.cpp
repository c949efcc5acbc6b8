// SPDX-License-Identifier: Apache-2.0
#include "rearrange/stencil.hpp"

namespace rearrange {

std::string_view to_string(StencilVariant variant) noexcept {
  return variant == StencilVariant::staged ? "staged" : "direct";
}

StencilVariant parse_variant(std::string_view text) {
  if (text == "staged") return StencilVariant::staged;
  if (text == "direct") return StencilVariant::direct;
  throw Error(ErrorCode::invalid_argument, "unknown stencil variant '" + std::string(text) + "'");
}

}  // namespace rearrange
