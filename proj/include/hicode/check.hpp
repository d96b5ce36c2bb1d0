#pragma once

#include <stdexcept>
#include <string>

namespace hicode::detail {

[[noreturn]] inline void check_failed(const char* expr, const char* file, int line) {
    throw std::logic_error(std::string("internal invariant violated: ") + expr + " at " +
                           file + ":" + std::to_string(line));
}

}  // namespace hicode::detail

// Always-on internal invariant audit (independent of NDEBUG).
#define HICODE_CHECK(expr) \
    ((expr) ? static_cast<void>(0) : ::hicode::detail::check_failed(#expr, __FILE__, __LINE__))
