#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace schw {

/// Result of one registered property check.  `pass` means
/// max_rel_err <= tol, except for the inverted (must-fail / witness)
/// checks, which are labeled in `notes` and pass when the measured
/// discrepancy exceeds the tolerance.
struct CheckReport {
    std::string name;
    std::uint64_t seed = 0;
    int trials = 0;
    double tol = 0.0;
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    bool inverted = false;
    bool pass = false;
    std::vector<std::string> notes;
};

struct CheckDef {
    std::string name;
    int default_trials;
    double default_tol;
    std::string summary;
};

/// The full registered suite, in canonical order.
const std::vector<CheckDef>& check_registry();

/// Run one check by name; absent trials/tol use the registered defaults.
/// Reports are deterministic: identical (seed, trials) give bit-identical
/// results.
CheckReport run_check(const std::string& name, std::uint64_t seed, std::optional<int> trials = {},
                      std::optional<double> tol = {});

/// Runs every registered check and refuses to report success unless all of
/// them ran and passed.
std::vector<CheckReport> run_all_checks(std::uint64_t seed, std::optional<int> trials = {},
                                        std::optional<double> tol = {});

/// Relative error convention used throughout the suite:
/// max |delta| / (1e-6 + max |reference component|).
double relative_error(double max_abs_delta, double ref_max_abs);

}  // namespace schw
