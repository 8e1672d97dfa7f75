#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace chainreb {

/// Limits for the exact computation paths. All exact routines take these by
/// value; the defaults are generous enough for every bundled experiment.
struct ResourceCaps {
    std::uint64_t max_entry_bits = 1u << 16;   ///< bit length cap for any intermediate integer
    std::uint64_t max_minor_count = 1000000;   ///< r-by-r minor enumeration cap
    std::uint64_t max_norm_iterations = 10000; ///< power/refinement iteration cap
    std::int64_t max_refine_dim = 96;          ///< largest Gram dimension eligible for exact norm refinement
};

struct resource_limit_error : std::runtime_error {
    explicit resource_limit_error(const std::string& what) : std::runtime_error(what) {}
};

struct combinatorial_limit_error : std::runtime_error {
    explicit combinatorial_limit_error(const std::string& what) : std::runtime_error(what) {}
};

struct shape_error : std::runtime_error {
    explicit shape_error(const std::string& what) : std::runtime_error(what) {}
};

struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace chainreb
