#ifndef VWAVE_VERSION_HPP
#define VWAVE_VERSION_HPP

namespace vwave {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace vwave

#endif
