#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dali/bytes.hpp"
#include "dali/detector.hpp"

namespace dali::sanitizer {

// Disarms polyglots by re-serializing only what is reachable under one
// claimed format. TIFFs are repacked into a canonical dense layout; PDFs
// are carved from the header to the %%EOF that terminates the resolved
// structure, with offsets rewritten to resolve from byte 0.

struct SanitizeOutcome {
    Bytes output;
    std::vector<ByteRange> dropped_spans;  // input ranges not carried over
    detector::ClaimedType claimed_type = detector::ClaimedType::Unknown;
    std::int64_t size_delta = 0;
};

[[nodiscard]] SanitizeOutcome sanitize(ByteSpan bytes, detector::ClaimedType claimed);

/// Outcome summary with a dropped-span table.
[[nodiscard]] std::string format_outcome(const SanitizeOutcome& outcome);

}  // namespace dali::sanitizer
