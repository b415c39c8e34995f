#ifndef DSIM_VERSION_HPP
#define DSIM_VERSION_HPP

namespace dsim {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
