#include "agesis/io.hpp"

#include <cstdio>

namespace agesis::io {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

} // namespace agesis::io
