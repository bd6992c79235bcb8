#pragma once

namespace finhom {

/// Recorded in every experiment report.
inline constexpr const char* kVersion = "0.1.0";

} // namespace finhom
