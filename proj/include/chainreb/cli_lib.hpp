#pragma once

#include "chainreb/caps.hpp"
#include "chainreb/chain_complex.hpp"
#include "chainreb/rng.hpp"

#include <map>
#include <string>
#include <vector>

namespace chainreb::cli {

/// Line-oriented "key = value" configuration; parse errors carry line numbers.
struct Config {
    std::map<std::string, std::string> values;

    static Config parse_text(const std::string& text);
    static Config parse_file(const std::string& path);

    bool has(const std::string& key) const { return values.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
};

struct RunResult {
    std::string report;
    int exit_code = 0; // nonzero iff a property check failed or usage was bad
};

/// Full command dispatch; args are everything after the program name.
RunResult run_command(const std::vector<std::string>& args);

/// Seeded random two-step complex with unit-bounded graph boundary and short
/// closed-walk relations; entries stay within the requested bound.
ChainComplex random_two_step_complex(Rng& rng, index_t n0, index_t n1, index_t n2,
                                     index_t entry_bound);

/// Seeded random sparse matrix with entries in [-bound, bound].
IntMatrix random_sparse_matrix(Rng& rng, index_t rows, index_t cols, index_t bound, double density);

} // namespace chainreb::cli
