#pragma once

namespace mineig {

inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace mineig
