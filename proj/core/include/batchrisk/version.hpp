#pragma once

namespace batchrisk {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace batchrisk
