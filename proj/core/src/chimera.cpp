#include "dali/chimera.hpp"

#include <algorithm>

namespace dali::chimera {

namespace {

constexpr std::uint64_t kTiffHeaderSize = 8;
constexpr std::uint64_t kMaxOffset = 0xFFFFFFFFull;
constexpr std::uint64_t kPdfHeaderWindow = 1024;

std::string entry_label(std::size_t ifd_index, const tiff::IfdEntry& entry) {
    const auto name = tiff::tag_name(entry.tag);
    std::string label = "IFD[" + std::to_string(ifd_index) + "] ";
    label += name.empty() ? "tag " + hex(entry.tag) : std::string(name);
    return label;
}

}  // namespace

std::string_view errc_name(ChimeraErrc code) {
    switch (code) {
        case ChimeraErrc::OffsetOverflow: return "OffsetOverflow";
        case ChimeraErrc::HeaderWindowExceeded: return "HeaderWindowExceeded";
        case ChimeraErrc::AlreadyChimeric: return "AlreadyChimeric";
    }
    return "UnknownError";
}

ChimeraError::ChimeraError(ChimeraErrc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

std::string_view to_string(SpliceMode mode) {
    return mode == SpliceMode::PaperFaithful ? "paper-faithful" : "strict";
}

std::pair<tiff::TiffDocument, std::vector<Rewrite>> rebase_tiff(const tiff::TiffDocument& doc,
                                                                std::uint64_t shift,
                                                                std::uint64_t insertion_point) {
    tiff::TiffDocument out = doc;
    std::vector<Rewrite> rewrites;
    if (shift == 0) {
        return {std::move(out), std::move(rewrites)};
    }

    auto rebase_field = [&](std::uint64_t old_value, std::uint64_t field_pos, unsigned width,
                            std::string description) -> std::uint64_t {
        if (old_value < insertion_point) {
            return old_value;
        }
        const std::uint64_t fresh = old_value + shift;
        const std::uint64_t limit = width == 2 ? 0xFFFFull : kMaxOffset;
        if (fresh > limit) {
            throw ChimeraError(ChimeraErrc::OffsetOverflow,
                               description + " " + hex(old_value) + " + " + hex(shift) +
                                   " exceeds the " + std::to_string(width) + "-byte field");
        }
        rewrites.push_back({std::move(description), old_value, fresh, field_pos, width});
        return fresh;
    };

    out.header.first_ifd_offset = static_cast<std::uint32_t>(
        rebase_field(doc.header.first_ifd_offset, 4, 4, "first IFD offset"));

    for (std::size_t i = 0; i < doc.ifds.size(); ++i) {
        const tiff::Ifd& old_ifd = doc.ifds[i];
        tiff::Ifd& ifd = out.ifds[i];
        ifd.offset = old_ifd.offset + shift;
        if (old_ifd.next_ifd_offset != 0) {
            const std::uint64_t field_pos = old_ifd.offset + 2 + 12ull * old_ifd.entries.size();
            ifd.next_ifd_offset = static_cast<std::uint32_t>(
                rebase_field(old_ifd.next_ifd_offset, field_pos, 4,
                             "IFD[" + std::to_string(i) + "] next-IFD offset"));
        }
        for (std::size_t k = 0; k < old_ifd.entries.size(); ++k) {
            const tiff::IfdEntry& old_entry = old_ifd.entries[k];
            tiff::IfdEntry& entry = ifd.entries[k];
            entry.entry_pos = old_entry.entry_pos + shift;

            if (old_entry.tag == tiff::tags::StripOffsets ||
                old_entry.tag == tiff::tags::TileOffsets) {
                if (auto values = tiff::entry_uints(old_entry, doc.header.byte_order)) {
                    const std::size_t elem = tiff::field_type_size(old_entry.type);
                    const std::uint64_t values_pos = old_entry.out_of_line()
                                                         ? std::uint64_t(old_entry.value_offset)
                                                         : old_entry.entry_pos + 8;
                    for (std::size_t j = 0; j < values->size(); ++j) {
                        (*values)[j] = rebase_field(
                            (*values)[j], values_pos + j * elem, static_cast<unsigned>(elem),
                            entry_label(i, old_entry) + "[" + std::to_string(j) + "]");
                    }
                    tiff::set_entry_uints(entry, *values, doc.header.byte_order);
                }
            }
            if (old_entry.out_of_line()) {
                entry.value_offset = static_cast<std::uint32_t>(
                    rebase_field(old_entry.value_offset, old_entry.entry_pos + 8, 4,
                                 entry_label(i, old_entry) + " value offset"));
            }
        }
    }
    for (auto& strip : out.strips) {
        if (strip.length > 0 && strip.offset >= insertion_point) {
            const std::uint64_t fresh = std::uint64_t(strip.offset) + shift;
            if (fresh > kMaxOffset) {
                throw ChimeraError(ChimeraErrc::OffsetOverflow,
                                   "strip data would move past the 32-bit range");
            }
            strip.offset = static_cast<std::uint32_t>(fresh);
        }
    }
    for (auto& span : out.foreign_spans) {
        if (span.offset >= insertion_point) {
            span.offset += shift;
        }
    }
    out.raw_length = doc.raw_length + shift;
    return {std::move(out), std::move(rewrites)};
}

BuildResult build_chimera(ByteSpan tiff_bytes, ByteSpan pdf_bytes, SpliceMode mode) {
    tiff::TiffDocument doc = tiff::parse_tiff(tiff_bytes);
    for (const auto& span : doc.foreign_spans) {
        if (find_bytes(span.bytes, "%PDF-1.")) {
            throw ChimeraError(ChimeraErrc::AlreadyChimeric,
                               "TIFF input already hides a PDF header at " +
                                   hex(span.offset));
        }
    }

    pdf::PdfSkeleton sk = pdf::scan_pdf(pdf_bytes);
    if (kTiffHeaderSize + sk.header.offset + 8 > kPdfHeaderWindow) {
        throw ChimeraError(ChimeraErrc::HeaderWindowExceeded,
                           "PDF header would land at " + hex(kTiffHeaderSize + sk.header.offset) +
                               ", beyond the first 1,024 bytes");
    }

    const std::uint64_t shift = pdf_bytes.size();
    Bytes embedded = mode == SpliceMode::Strict
                         ? pdf::shift_pdf_offsets(sk, pdf_bytes, kTiffHeaderSize)
                         : Bytes(pdf_bytes.begin(), pdf_bytes.end());
    Bytes trailer_copy = pdf::extract_trailer_block(embedded, sk);

    const std::uint64_t total = tiff_bytes.size() + shift + trailer_copy.size();
    if (total > kMaxOffset) {
        throw ChimeraError(ChimeraErrc::OffsetOverflow,
                           "spliced file would exceed the 32-bit offset range");
    }

    auto [rebased, rewrites] = rebase_tiff(doc, shift, kTiffHeaderSize);
    (void)rebased;

    Bytes out;
    out.reserve(static_cast<std::size_t>(total));
    out.insert(out.end(), tiff_bytes.begin(), tiff_bytes.begin() + kTiffHeaderSize);
    out.insert(out.end(), embedded.begin(), embedded.end());
    out.insert(out.end(), tiff_bytes.begin() + kTiffHeaderSize, tiff_bytes.end());
    const std::uint64_t trailer_pos = out.size();
    out.insert(out.end(), trailer_copy.begin(), trailer_copy.end());

    const bool big = tiff::is_big_endian(doc.header.byte_order);
    for (const auto& rw : rewrites) {
        const std::size_t pos = static_cast<std::size_t>(
            rw.field_pos < kTiffHeaderSize ? rw.field_pos : rw.field_pos + shift);
        if (rw.field_width == 2) {
            store_u16(out, pos, static_cast<std::uint16_t>(rw.new_offset), big);
        } else {
            store_u32(out, pos, static_cast<std::uint32_t>(rw.new_offset), big);
        }
    }

    ChimeraReport report;
    report.shift = shift;
    report.rewrites = std::move(rewrites);
    report.mode = mode;
    report.tiff_header_span = {0, kTiffHeaderSize};
    report.pdf_span = {kTiffHeaderSize, shift};
    report.tiff_remainder_span = {kTiffHeaderSize + shift, tiff_bytes.size() - kTiffHeaderSize};
    report.trailer_copy_span = {trailer_pos, trailer_copy.size()};
    return {std::move(out), std::move(report)};
}

DualValidity validate_chimera(ByteSpan bytes) {
    DualValidity v;
    try {
        (void)tiff::parse_tiff(bytes);
        v.tiff_ok = true;
    } catch (const std::exception& e) {
        v.tiff_error = e.what();
    }
    try {
        const pdf::PdfSkeleton sk = pdf::scan_pdf(bytes);
        v.pdf_resolution = sk.resolution;
        if (sk.resolution.resolved()) {
            v.pdf_ok = true;
        } else {
            v.pdf_error = "startxref does not resolve under either origin convention";
        }
    } catch (const std::exception& e) {
        v.pdf_error = e.what();
    }
    v.both = v.tiff_ok && v.pdf_ok;
    return v;
}

std::string format_report(const ChimeraReport& report) {
    std::string out;
    out += "mode:  " + std::string(to_string(report.mode)) + "\n";
    out += "shift: " + std::to_string(report.shift) + " (" + hex(report.shift) + ")\n";
    out += "layout: tiff-header[" + hex(report.tiff_header_span.offset) + "," +
           hex(report.tiff_header_span.end()) + ") pdf[" + hex(report.pdf_span.offset) + "," +
           hex(report.pdf_span.end()) + ") tiff-remainder[" +
           hex(report.tiff_remainder_span.offset) + "," + hex(report.tiff_remainder_span.end()) +
           ") trailer-copy[" + hex(report.trailer_copy_span.offset) + "," +
           hex(report.trailer_copy_span.end()) + ")\n";
    out += "rewrites:\n";
    std::size_t width = 0;
    for (const auto& rw : report.rewrites) {
        width = std::max(width, rw.description.size());
    }
    for (const auto& rw : report.rewrites) {
        out += "  " + rw.description + std::string(width - rw.description.size() + 2, ' ') +
               hex(rw.old_offset) + " -> " + hex(rw.new_offset) + "\n";
    }
    return out;
}

}  // namespace dali::chimera
