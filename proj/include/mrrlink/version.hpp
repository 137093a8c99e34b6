// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace mrrlink {

inline constexpr const char* kVersion = "mrrlink 0.1.0";

} // namespace mrrlink
