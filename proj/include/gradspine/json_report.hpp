#pragma once

#include "gradspine/strata.hpp"
#include "gradspine/tangle.hpp"

#include <cstdint>
#include <string>

namespace gradspine {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

uint64_t fnv1a(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

// Deterministic JSON report for the `strata` and `tangle` commands: schema
// and version fields, input digest, seed, all integer counts and identity
// flags, tangle segments, perturbation log. Identical inputs and seed give
// byte-identical text.
std::string strata_report_json(const Strata& strata, const Tangle* tangle,
                               const std::string& input_digest, uint64_t seed);

} // namespace gradspine
