#pragma once

// Randomised property checks shared by the unit tests and the acceptance
// binary. Each returns std::nullopt when every case holds, otherwise a
// description of the first counterexample.

#include <optional>
#include <string>

#include "oracles.hpp"

namespace coex::testing {

using PropertyResult = std::optional<std::string>;

/// Metric axioms, bounds and agreement with brute_levenshtein.
PropertyResult check_levenshtein(Rng& rng, int cases);

/// chrF against chrf_oracle plus bounds and identity, METEOR bounds,
/// readability duplication invariance and syllable monotonicity.
PropertyResult check_text_metrics(Rng& rng, int cases);

/// Structure and line kinds of generated Java sources.
PropertyResult check_segmenter(Rng& rng, int cases);

/// Random examples survive export -> JSON text -> import in both id modes.
PropertyResult check_portable_round_trip(Rng& rng, int cases);

/// Random operation sequences on WorkedExample against a plain model;
/// rejected operations must leave the example untouched.
PropertyResult check_example_state_machine(Rng& rng, int sequences, int steps);

/// Random mark/close/reopen/regenerate/apply sequences on ReviewSession
/// against a plain model.
PropertyResult check_session_state_machine(Rng& rng, int sequences, int steps);

}  // namespace coex::testing
