#pragma once

#include <string_view>

namespace lpdp {

inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace lpdp
