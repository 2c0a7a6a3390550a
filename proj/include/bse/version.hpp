#ifndef BSE_VERSION_HPP
#define BSE_VERSION_HPP

namespace bse {

inline constexpr const char* kVersion = "0.1.0";

} // namespace bse

#endif
