#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dali/bytes.hpp"
#include "dali/pdf_lite.hpp"
#include "dali/tiff_codec.hpp"

namespace dali::chimera {

// Builds dual PDF/TIFF files: the complete PDF is spliced in after the
// 8-byte TIFF header, every TIFF offset is rebased by the PDF's length, and
// a copy of the PDF trailer block is appended so readers that scan from the
// end still find a trailer.

enum class ChimeraErrc {
    OffsetOverflow,        // a rebased offset no longer fits its field
    HeaderWindowExceeded,  // the PDF header would land beyond byte 1,024
    AlreadyChimeric,       // the TIFF input already hides a PDF; no nesting
};

[[nodiscard]] std::string_view errc_name(ChimeraErrc code);

class ChimeraError : public std::runtime_error {
public:
    ChimeraError(ChimeraErrc code, const std::string& message);

    [[nodiscard]] ChimeraErrc code() const noexcept { return code_; }

private:
    ChimeraErrc code_;
};

enum class SpliceMode {
    // Leave the embedded PDF untouched, as the original attack does; its
    // offsets then resolve relative to the displaced header.
    PaperFaithful,
    // Also shift the embedded xref/startxref by +8 so offsets resolve from
    // byte 0 of the output.
    Strict,
};

[[nodiscard]] std::string_view to_string(SpliceMode mode);

/// One rewritten offset field: where it lives in the *input* TIFF, how wide
/// it is, and the old/new values. The builder patches the field at
/// field_pos + shift (or in place when field_pos < 8, i.e. the header).
struct Rewrite {
    std::string description;
    std::uint64_t old_offset = 0;
    std::uint64_t new_offset = 0;
    std::uint64_t field_pos = 0;
    unsigned field_width = 4;
};

struct ChimeraReport {
    std::uint64_t shift = 0;  // == length of the embedded PDF
    std::vector<Rewrite> rewrites;
    SpliceMode mode = SpliceMode::PaperFaithful;
    ByteRange tiff_header_span;
    ByteRange pdf_span;
    ByteRange tiff_remainder_span;
    ByteRange trailer_copy_span;
};

/// Shift every structural offset and strip/tile location value that is at
/// or beyond insertion_point by +shift. Non-offset values are untouched.
[[nodiscard]] std::pair<tiff::TiffDocument, std::vector<Rewrite>> rebase_tiff(
    const tiff::TiffDocument& doc, std::uint64_t shift, std::uint64_t insertion_point = 8);

struct BuildResult {
    Bytes bytes;
    ChimeraReport report;
};

/// Splice: [TIFF header, rebased][entire PDF][TIFF remainder, displaced]
/// [copy of the PDF trailer block]. The output parses as both formats.
[[nodiscard]] BuildResult build_chimera(ByteSpan tiff_bytes, ByteSpan pdf_bytes, SpliceMode mode);

struct DualValidity {
    bool tiff_ok = false;
    std::string tiff_error;
    bool pdf_ok = false;
    std::string pdf_error;
    pdf::StartxrefResolution pdf_resolution;
    bool both = false;
};

/// Try both parsers; failures are captured, never thrown.
[[nodiscard]] DualValidity validate_chimera(ByteSpan bytes);

/// Line-oriented rewrite table: description, old offset, new offset (hex).
[[nodiscard]] std::string format_report(const ChimeraReport& report);

}  // namespace dali::chimera
