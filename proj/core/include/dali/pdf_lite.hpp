#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dali/bytes.hpp"

namespace dali::pdf {

// Structural PDF scanner: header, literal cross-reference table, trailer,
// startxref and %%EOF. Scanning proceeds from the end, the way a conforming
// reader locates the xref. No object or content-stream interpretation.

enum class PdfErrc {
    NoHeader,            // no %PDF-1.X within the first 1,024 bytes
    NoEof,               // no %%EOF marker
    NoStartxref,         // startxref keyword, its value, or the trailer keyword missing
    MalformedXref,       // xref entries that are not exactly 20 bytes, or unresolvable table
    Unsupported,         // cross-reference stream (PDF 1.5+)
    OffsetUnderflow,     // a shift would push an offset below zero
    FieldWidthOverflow,  // a rewritten offset needs more digits than the field holds
};

[[nodiscard]] std::string_view errc_name(PdfErrc code);

class PdfError : public std::runtime_error {
public:
    PdfError(PdfErrc code, const std::string& message, std::uint64_t offset = 0);

    [[nodiscard]] PdfErrc code() const noexcept { return code_; }
    [[nodiscard]] std::uint64_t offset() const noexcept { return offset_; }

private:
    PdfErrc code_;
    std::uint64_t offset_;
};

enum class EolStyle { Cr, Lf, CrLf };

/// The header may sit anywhere within the first 1,024 bytes of the file;
/// offset records where the '%' actually is.
struct PdfHeader {
    std::uint64_t offset = 0;
    int major = 1;
    int minor = 0;
    EolStyle eol = EolStyle::Lf;
};

enum class XrefKind { Free, InUse };

/// One 20-byte cross-reference record (10-digit offset, 5-digit generation,
/// kind letter, 2-byte EOL). `pos` is where the record starts in the file.
struct XrefEntry {
    std::uint64_t offset = 0;
    std::uint32_t generation = 0;
    XrefKind kind = XrefKind::Free;
    std::uint64_t pos = 0;
};

struct XrefSubsection {
    std::uint64_t first_object_id = 0;
    std::vector<XrefEntry> entries;
    std::uint64_t pos = 0;  // position of the "first count" line
};

/// Whether the startxref value lands on an xref table when interpreted
/// relative to byte 0 and relative to the header offset. Real readers
/// disagree on the origin for displaced headers, so both are recorded.
struct StartxrefResolution {
    bool from_file_start = false;
    bool from_header_offset = false;

    [[nodiscard]] bool resolved() const noexcept { return from_file_start || from_header_offset; }
};

struct PdfSkeleton {
    PdfHeader header;
    std::vector<XrefSubsection> xref_sections;
    std::uint64_t xref_pos = 0;  // position of the resolved "xref" keyword
    std::uint64_t xref_end = 0;  // one past the last entry of the table
    ByteRange trailer_span;      // "trailer" keyword through the final %%EOF (incl. EOL)
    std::uint64_t startxref_value = 0;
    std::uint64_t startxref_digits_pos = 0;
    std::uint32_t startxref_digits_len = 0;
    std::uint64_t eof_offset = 0;  // position of the final %%EOF
    ByteRange body_span;
    StartxrefResolution resolution;
    std::vector<std::uint64_t> earlier_eofs;  // incremental updates, informational
};

/// Scan from the end: find %%EOF, then startxref, then the xref table.
[[nodiscard]] PdfSkeleton scan_pdf(ByteSpan bytes);

/// Deterministic minimal single-page PDF with a literal xref table, header
/// at byte 0 and every in-use entry pointing at its "N 0 obj". `pad_to`
/// inserts a comment after the header so the output has an exact length.
[[nodiscard]] Bytes make_fixture_pdf(std::string_view page_text, std::string_view producer,
                                     std::optional<std::size_t> pad_to = std::nullopt);

/// Rewrite every in-use xref offset and the startxref value by +delta,
/// preserving field widths exactly (file length never changes).
[[nodiscard]] Bytes shift_pdf_offsets(const PdfSkeleton& skeleton, ByteSpan bytes,
                                      std::int64_t delta);

/// The contiguous run from the "trailer" keyword through the final %%EOF,
/// including its trailing EOL.
[[nodiscard]] Bytes extract_trailer_block(ByteSpan bytes, const PdfSkeleton& skeleton);

}  // namespace dali::pdf
