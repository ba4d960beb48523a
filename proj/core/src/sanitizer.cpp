#include "dali/sanitizer.hpp"

#include <algorithm>
#include <stdexcept>

#include "dali/pdf_lite.hpp"
#include "dali/tiff_codec.hpp"

namespace dali::sanitizer {

namespace {

std::size_t eof_marker_end(ByteSpan b, std::uint64_t eof_pos) {
    std::uint64_t end = eof_pos + 5;
    if (end < b.size() && b[end] == '\r') {
        ++end;
        if (end < b.size() && b[end] == '\n') {
            ++end;
        }
    } else if (end < b.size() && b[end] == '\n') {
        ++end;
    }
    return end;
}

SanitizeOutcome sanitize_tiff(ByteSpan bytes) {
    const tiff::TiffDocument doc = tiff::parse_tiff(bytes);
    SanitizeOutcome outcome;
    outcome.claimed_type = detector::ClaimedType::Tiff;
    outcome.output = tiff::write_tiff(doc, {.layout = tiff::Layout::Canonical});
    for (const auto& span : doc.foreign_spans) {
        outcome.dropped_spans.push_back(span.range());
    }
    outcome.size_delta = static_cast<std::int64_t>(outcome.output.size()) -
                         static_cast<std::int64_t>(bytes.size());
    return outcome;
}

SanitizeOutcome sanitize_pdf(ByteSpan bytes) {
    const pdf::PdfSkeleton sk = pdf::scan_pdf(bytes);
    if (!sk.resolution.resolved()) {
        throw pdf::PdfError(pdf::PdfErrc::MalformedXref,
                            "startxref does not resolve under either origin; cannot rebuild");
    }
    const std::uint64_t h = sk.header.offset;

    // When offsets are absolute, moving the header to 0 means shifting
    // everything by -h; header-relative offsets are already correct.
    Bytes work;
    if (sk.resolution.from_file_start && h > 0) {
        work = pdf::shift_pdf_offsets(sk, bytes, -static_cast<std::int64_t>(h));
    } else {
        work.assign(bytes.begin(), bytes.end());
    }

    // Carve from the header through the %%EOF that terminates the structure
    // the final startxref resolves to.
    std::vector<std::uint64_t> eofs = sk.earlier_eofs;
    eofs.push_back(sk.eof_offset);
    std::uint64_t carve_end = eof_marker_end(bytes, sk.eof_offset);
    for (const auto e : eofs) {
        if (e > sk.xref_end) {
            carve_end = eof_marker_end(bytes, e);
            break;
        }
    }
    Bytes carved(work.begin() + static_cast<std::ptrdiff_t>(h),
                 work.begin() + static_cast<std::ptrdiff_t>(carve_end));

    // The carved run ends with its own startxref; point it at the table's
    // position within the carve.
    const pdf::PdfSkeleton carved_sk = [&] {
        try {
            return pdf::scan_pdf(carved);
        } catch (const pdf::PdfError& e) {
            throw pdf::PdfError(e.code(),
                                std::string("carved PDF does not stand alone: ") + e.what());
        }
    }();
    const std::uint64_t table_in_carve = sk.xref_pos - h;
    const std::string digits = std::to_string(table_in_carve);
    if (digits.size() > carved_sk.startxref_digits_len) {
        throw pdf::PdfError(pdf::PdfErrc::FieldWidthOverflow,
                            "rebased startxref needs more digits than the field holds",
                            carved_sk.startxref_digits_pos);
    }
    std::string padded(carved_sk.startxref_digits_len - digits.size(), '0');
    padded += digits;
    std::copy(padded.begin(), padded.end(),
              carved.begin() + static_cast<std::ptrdiff_t>(carved_sk.startxref_digits_pos));

    SanitizeOutcome outcome;
    outcome.claimed_type = detector::ClaimedType::Pdf;
    outcome.output = std::move(carved);
    if (h > 0) {
        outcome.dropped_spans.push_back({0, h});
    }
    if (carve_end < bytes.size()) {
        outcome.dropped_spans.push_back({carve_end, bytes.size() - carve_end});
    }
    outcome.size_delta = static_cast<std::int64_t>(outcome.output.size()) -
                         static_cast<std::int64_t>(bytes.size());
    return outcome;
}

}  // namespace

SanitizeOutcome sanitize(ByteSpan bytes, detector::ClaimedType claimed) {
    switch (claimed) {
        case detector::ClaimedType::Tiff: return sanitize_tiff(bytes);
        case detector::ClaimedType::Pdf: return sanitize_pdf(bytes);
        case detector::ClaimedType::Unknown: break;
    }
    throw std::invalid_argument("sanitize requires a pdf or tiff claim");
}

std::string format_outcome(const SanitizeOutcome& outcome) {
    std::string out;
    out += "claimed:    " + std::string(detector::to_string(outcome.claimed_type)) + "\n";
    out += "output:     " + std::to_string(outcome.output.size()) + " bytes (delta " +
           std::to_string(outcome.size_delta) + ")\n";
    if (outcome.dropped_spans.empty()) {
        out += "dropped:    nothing\n";
        return out;
    }
    out += "dropped:\n";
    for (const auto& span : outcome.dropped_spans) {
        out += "  [" + hex(span.offset) + "," + hex(span.end()) + ")  " +
               std::to_string(span.length) + " bytes\n";
    }
    return out;
}

}  // namespace dali::sanitizer
