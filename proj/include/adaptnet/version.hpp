#pragma once

namespace adaptnet {

#ifdef ADAPTNET_VERSION
inline constexpr const char* kVersion = ADAPTNET_VERSION;
#else
inline constexpr const char* kVersion = "0.1.0";
#endif

inline constexpr const char* kSchema = "adaptnet/1";

}  // namespace adaptnet
