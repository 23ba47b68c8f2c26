#pragma once

#include <stdexcept>
#include <string>

namespace moreau {

enum class errc {
    invalid_grid,
    grid_mismatch,
    invalid_kernel,
    invalid_argument,
    not_max_plus_linear,
    parse_error,
};

inline const char* to_string(errc c) {
    switch (c) {
        case errc::invalid_grid: return "invalid_grid";
        case errc::grid_mismatch: return "grid_mismatch";
        case errc::invalid_kernel: return "invalid_kernel";
        case errc::invalid_argument: return "invalid_argument";
        case errc::not_max_plus_linear: return "not_max_plus_linear";
        case errc::parse_error: return "parse_error";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] errc code() const noexcept { return code_; }

private:
    errc code_;
};

}  // namespace moreau
