#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsbc/field.hpp"
#include "nsbc/pattern.hpp"
#include "nsbc/rational.hpp"

namespace nsbc {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kRecordSchema = "nsbc-record-1";

// Reproducible experiment description. (config, seed) fully determines the
// persisted record.
struct ExperimentConfig {
    std::string scheme; // ns-successive | ns-multipartite | tdma | fading-dirt | toy1-ns | toy2-ns
    std::optional<Pattern> pattern;
    std::string field = "GF(5)";
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    std::string out_path;        // empty: do not persist
    std::string trace_path;      // optional per-trial CSV (trial, errors, x, y, G)
    int n = 1;                   // blocklength for tdma
    std::vector<double> dof;     // DoF tuple for tdma

    // canonical serialization used for hashing; key order is fixed
    std::string canonical() const;
};

struct ExperimentRecord {
    std::string schema_version = kRecordSchema;
    std::string library_version = kLibraryVersion;
    std::string config_hash; // fnv1a-64 of the canonical config, hex
    std::string scheme;
    std::string field;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> error_counts; // per user
    std::vector<double> rate_bits;           // per user, averaged over trials
    double wall_ms = 0.0; // reported to the caller; not persisted (records
                          // must be byte-identical under a fixed seed)
    std::string record_hash; // fnv1a-64 over the deterministic fields
};

std::uint64_t fnv1a64(const std::string& data);
std::string to_hex(std::uint64_t v);

// Executes `trials` independent runs with per-trial substream seeds
// derive_seed(seed, trial) and aggregates errors and rates. Trials are
// partitioned across workers (capped by the NSBC_THREADS environment
// variable); the aggregate is identical for any partitioning because every
// trial owns its derived seed. Writes the record to cfg.out_path when set.
// Throws std::invalid_argument for an invalid scheme/pattern combination.
ExperimentRecord run_experiment(const ExperimentConfig& cfg);

// Same-marginals comparison: the identical fixed scheme transcript runs
// against both members of a column-scaled channel coupling.
struct PairedRecord {
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> errors_original;
    std::vector<std::uint64_t> errors_coupled;
    std::vector<double> diff;   // per-user error-rate difference
    std::vector<double> sigma3; // 3-sigma half-width for the difference
    bool exact = false;
    std::vector<Rat> p_original; // exact per-user error probabilities
    std::vector<Rat> p_coupled;
};

PairedRecord compare_same_marginals_mc(const Pattern& M, const Field& F,
                                       std::uint64_t trials, std::uint64_t seed);
// Exhaustive n=1 variant: sampling replaced by exact pmf summation over
// messages, channel draws, and scaling coefficients.
PairedRecord compare_same_marginals_exact(const Pattern& M, const Field& F);

} // namespace nsbc
