#include "dali/pdf_lite.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace dali::pdf {

namespace {

constexpr std::size_t kHeaderWindow = 1024;
constexpr std::size_t kHeaderTextLen = 8;  // "%PDF-1.X"

bool is_digit(std::uint8_t c) {
    return c >= '0' && c <= '9';
}

bool is_eol_byte(std::uint8_t c) {
    return c == '\r' || c == '\n';
}

// Length of the EOL sequence starting at pos (0 if none).
std::size_t eol_len(ByteSpan b, std::uint64_t pos) {
    if (pos >= b.size() || !is_eol_byte(b[pos])) {
        return 0;
    }
    if (b[pos] == '\r' && pos + 1 < b.size() && b[pos + 1] == '\n') {
        return 2;
    }
    return 1;
}

std::uint64_t skip_eol_and_spaces(ByteSpan b, std::uint64_t pos) {
    while (pos < b.size() && (is_eol_byte(b[pos]) || b[pos] == ' ')) {
        ++pos;
    }
    return pos;
}

std::optional<std::uint64_t> parse_number(ByteSpan b, std::uint64_t& pos) {
    std::uint64_t value = 0;
    std::uint64_t start = pos;
    while (pos < b.size() && is_digit(b[pos])) {
        value = value * 10 + (b[pos] - '0');
        ++pos;
    }
    if (pos == start) {
        return std::nullopt;
    }
    return value;
}

// "N G obj" at pos: the signature of a cross-reference stream object.
bool looks_like_object_header(ByteSpan b, std::uint64_t pos) {
    if (pos >= b.size() || !is_digit(b[pos])) {
        return false;
    }
    std::uint64_t p = pos;
    if (!parse_number(b, p)) return false;
    if (p >= b.size() || b[p] != ' ') return false;
    ++p;
    if (!parse_number(b, p)) return false;
    if (p >= b.size() || b[p] != ' ') return false;
    ++p;
    return starts_with(b, p, "obj");
}

// "xref" keyword followed by an EOL.
bool xref_keyword_at(ByteSpan b, std::uint64_t pos) {
    return pos + 4 <= b.size() && starts_with(b, pos, "xref") && eol_len(b, pos + 4) > 0;
}

struct ParsedTable {
    std::vector<XrefSubsection> sections;
    std::uint64_t end = 0;  // one past the last 20-byte entry
};

ParsedTable parse_xref_table(ByteSpan b, std::uint64_t pos) {
    ParsedTable table;
    std::uint64_t p = pos + 4;
    const std::size_t e = eol_len(b, p);
    if (e == 0) {
        throw PdfError(PdfErrc::MalformedXref, "xref keyword not followed by EOL", p);
    }
    p += e;
    while (p < b.size() && is_digit(b[p])) {
        XrefSubsection sub;
        sub.pos = p;
        auto first = parse_number(b, p);
        if (!first || p >= b.size() || b[p] != ' ') {
            throw PdfError(PdfErrc::MalformedXref, "bad xref subsection header", sub.pos);
        }
        ++p;
        auto count = parse_number(b, p);
        const std::size_t le = eol_len(b, p);
        if (!count || le == 0) {
            throw PdfError(PdfErrc::MalformedXref, "bad xref subsection header", sub.pos);
        }
        p += le;
        sub.first_object_id = *first;
        for (std::uint64_t i = 0; i < *count; ++i) {
            if (p + 20 > b.size()) {
                throw PdfError(PdfErrc::MalformedXref, "xref entry extends past end of file", p);
            }
            XrefEntry entry;
            entry.pos = p;
            for (std::size_t k = 0; k < 10; ++k) {
                if (!is_digit(b[p + k])) {
                    throw PdfError(PdfErrc::MalformedXref, "xref entry offset is not 10 digits",
                                   p);
                }
                entry.offset = entry.offset * 10 + (b[p + k] - '0');
            }
            if (b[p + 10] != ' ') {
                throw PdfError(PdfErrc::MalformedXref, "xref entry is not 20 bytes", p);
            }
            for (std::size_t k = 11; k < 16; ++k) {
                if (!is_digit(b[p + k])) {
                    throw PdfError(PdfErrc::MalformedXref,
                                   "xref entry generation is not 5 digits", p);
                }
                entry.generation = entry.generation * 10 + (b[p + k] - '0');
            }
            if (b[p + 16] != ' ' || (b[p + 17] != 'n' && b[p + 17] != 'f')) {
                throw PdfError(PdfErrc::MalformedXref, "xref entry kind is not n/f", p);
            }
            entry.kind = b[p + 17] == 'n' ? XrefKind::InUse : XrefKind::Free;
            const std::uint8_t t0 = b[p + 18];
            const std::uint8_t t1 = b[p + 19];
            const bool ok_eol = (t0 == ' ' && is_eol_byte(t1)) || (t0 == '\r' && t1 == '\n');
            if (!ok_eol) {
                throw PdfError(PdfErrc::MalformedXref, "xref entry is not 20 bytes", p);
            }
            p += 20;
            sub.entries.push_back(entry);
        }
        table.sections.push_back(std::move(sub));
    }
    if (table.sections.empty()) {
        throw PdfError(PdfErrc::MalformedXref, "xref table has no subsections", pos);
    }
    table.end = p;
    return table;
}

std::string escape_pdf_string(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '(' || c == ')' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    return out;
}

void require_printable(std::string_view text, const char* what) {
    for (unsigned char c : text) {
        if (c < 0x20 || c > 0x7E) {
            throw std::invalid_argument(std::string(what) + " must be printable ASCII");
        }
    }
}

Bytes assemble_fixture(std::string_view page_text, std::string_view producer,
                       std::optional<std::size_t> comment_chars, bool extra_blank_line) {
    const std::string content =
        "BT /F1 24 Tf 72 700 Td (" + escape_pdf_string(page_text) + ") Tj ET";
    const std::vector<std::string> bodies = {
        "<< /Type /Catalog /Pages 2 0 R >>",
        "<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
        "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792] "
        "/Resources << /Font << /F1 5 0 R >> >> /Contents 4 0 R >>",
        "<< /Length " + std::to_string(content.size()) + " >>\nstream\n" + content +
            "\nendstream",
        "<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>",
        "<< /Producer (" + escape_pdf_string(producer) + ") >>",
    };

    std::string out = "%PDF-1.4\n";
    if (comment_chars) {
        out += "%" + std::string(*comment_chars, 'p') + "\n";
    }
    if (extra_blank_line) {
        out += "\n";
    }
    std::vector<std::uint64_t> object_offsets;
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        object_offsets.push_back(out.size());
        out += std::to_string(i + 1) + " 0 obj\n" + bodies[i] + "\nendobj\n";
    }
    const std::uint64_t xref_pos = out.size();
    out += "xref\n0 " + std::to_string(bodies.size() + 1) + "\n";
    out += "0000000000 65535 f \n";
    char line[32];
    for (const auto off : object_offsets) {
        std::snprintf(line, sizeof(line), "%010llu 00000 n \n",
                      static_cast<unsigned long long>(off));
        out += line;
    }
    out += "trailer\n<< /Size " + std::to_string(bodies.size() + 1) +
           " /Root 1 0 R /Info 6 0 R >>\nstartxref\n" + std::to_string(xref_pos) + "\n%%EOF\n";
    return to_bytes(out);
}

}  // namespace

std::string_view errc_name(PdfErrc code) {
    switch (code) {
        case PdfErrc::NoHeader: return "NoHeader";
        case PdfErrc::NoEof: return "NoEof";
        case PdfErrc::NoStartxref: return "NoStartxref";
        case PdfErrc::MalformedXref: return "MalformedXref";
        case PdfErrc::Unsupported: return "Unsupported";
        case PdfErrc::OffsetUnderflow: return "OffsetUnderflow";
        case PdfErrc::FieldWidthOverflow: return "FieldWidthOverflow";
    }
    return "UnknownError";
}

PdfError::PdfError(PdfErrc code, const std::string& message, std::uint64_t offset)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message),
      code_(code),
      offset_(offset) {}

PdfSkeleton scan_pdf(ByteSpan bytes) {
    PdfSkeleton sk;

    // Header: %PDF-1.<digit> anywhere within the first 1,024 bytes.
    std::optional<std::uint64_t> header_pos;
    const std::size_t window = std::min(bytes.size(), kHeaderWindow);
    std::size_t search_from = 0;
    while (search_from + kHeaderTextLen <= window) {
        auto hit = find_bytes(bytes.first(window), "%PDF-", search_from);
        if (!hit) {
            break;
        }
        if (*hit + kHeaderTextLen <= window && bytes[*hit + 5] == '1' && bytes[*hit + 6] == '.' &&
            is_digit(bytes[*hit + 7])) {
            header_pos = *hit;
            break;
        }
        search_from = *hit + 1;
    }
    if (!header_pos) {
        throw PdfError(PdfErrc::NoHeader, "no %PDF-1.X header within the first 1,024 bytes");
    }
    sk.header.offset = *header_pos;
    sk.header.major = 1;
    sk.header.minor = bytes[*header_pos + 7] - '0';
    const std::uint64_t after_version = *header_pos + kHeaderTextLen;
    if (after_version < bytes.size() && bytes[after_version] == '\r') {
        sk.header.eol = (after_version + 1 < bytes.size() && bytes[after_version + 1] == '\n')
                            ? EolStyle::CrLf
                            : EolStyle::Cr;
    } else {
        sk.header.eol = EolStyle::Lf;
    }

    // All %%EOF markers; the final one anchors the scan.
    std::size_t from = 0;
    while (auto hit = find_bytes(bytes, "%%EOF", from)) {
        sk.earlier_eofs.push_back(*hit);
        from = *hit + 1;
    }
    if (sk.earlier_eofs.empty()) {
        throw PdfError(PdfErrc::NoEof, "no %%EOF marker");
    }
    sk.eof_offset = sk.earlier_eofs.back();
    sk.earlier_eofs.pop_back();

    // startxref: nearest occurrence before the final %%EOF.
    auto sx = rfind_bytes(bytes, "startxref", sk.eof_offset);
    if (!sx) {
        throw PdfError(PdfErrc::NoStartxref, "no startxref keyword before the final %%EOF");
    }
    std::uint64_t p = skip_eol_and_spaces(bytes, *sx + 9);
    sk.startxref_digits_pos = p;
    auto value = parse_number(bytes, p);
    if (!value) {
        throw PdfError(PdfErrc::NoStartxref, "startxref keyword has no numeric value", *sx);
    }
    sk.startxref_value = *value;
    sk.startxref_digits_len = static_cast<std::uint32_t>(p - sk.startxref_digits_pos);

    // Try both origin conventions; readers disagree for displaced headers.
    const std::uint64_t target_abs = sk.startxref_value;
    const std::uint64_t target_rel = sk.header.offset + sk.startxref_value;
    sk.resolution.from_file_start = xref_keyword_at(bytes, target_abs);
    sk.resolution.from_header_offset = xref_keyword_at(bytes, target_rel);
    std::optional<std::uint64_t> table_pos;
    if (sk.resolution.resolved()) {
        table_pos = sk.resolution.from_file_start ? target_abs : target_rel;
    } else if (looks_like_object_header(bytes, target_abs) ||
               looks_like_object_header(bytes, target_rel)) {
        throw PdfError(PdfErrc::Unsupported,
                       "startxref points at an object: cross-reference streams are not "
                       "supported",
                       target_abs);
    }

    // Trailer block: "trailer" keyword scanned backwards from the final %%EOF.
    auto tr = rfind_bytes(bytes, "trailer", sk.eof_offset);
    if (!tr) {
        throw PdfError(PdfErrc::NoStartxref, "no trailer keyword before the final %%EOF");
    }
    const std::uint64_t eof_end = sk.eof_offset + 5 + eol_len(bytes, sk.eof_offset + 5);
    sk.trailer_span = {*tr, eof_end - *tr};

    if (!table_pos) {
        // Dangling startxref (offsets rewritten but content not yet moved):
        // hunt for the table keyword so the skeleton still carries entry
        // positions. Resolution stays unresolved.
        std::uint64_t before = *tr;
        while (auto hit = rfind_bytes(bytes, "xref", before)) {
            const bool inside_startxref = *hit >= 5 && starts_with(bytes, *hit - 5, "start");
            if (!inside_startxref && xref_keyword_at(bytes, *hit)) {
                table_pos = *hit;
                break;
            }
            before = *hit;
        }
    }
    if (table_pos) {
        sk.xref_pos = *table_pos;
        ParsedTable table = parse_xref_table(bytes, sk.xref_pos);
        sk.xref_sections = std::move(table.sections);
        sk.xref_end = table.end;
    }

    const std::uint64_t header_line_end = after_version + eol_len(bytes, after_version);
    const std::uint64_t body_end = table_pos ? sk.xref_pos : *tr;
    sk.body_span = {header_line_end,
                    body_end > header_line_end ? body_end - header_line_end : 0};
    return sk;
}

Bytes make_fixture_pdf(std::string_view page_text, std::string_view producer,
                       std::optional<std::size_t> pad_to) {
    if (page_text.empty()) {
        throw std::invalid_argument("page_text must be non-empty");
    }
    require_printable(page_text, "page_text");
    require_printable(producer, "producer");

    if (!pad_to) {
        return assemble_fixture(page_text, producer, std::nullopt, false);
    }
    const std::size_t base = assemble_fixture(page_text, producer, std::nullopt, false).size();
    if (*pad_to < base) {
        throw std::invalid_argument("pad_to is smaller than the minimal fixture (" +
                                    std::to_string(base) + " bytes)");
    }
    const std::size_t need = *pad_to - base;
    // A comment contributes n+2 bytes, the blank line 1 more; search around
    // the estimate to absorb startxref digit-count jumps.
    std::vector<std::pair<std::optional<std::size_t>, bool>> combos = {{std::nullopt, false},
                                                                       {std::nullopt, true}};
    for (std::size_t n = need > 12 ? need - 12 : 0; n <= need + 2; ++n) {
        combos.emplace_back(n, false);
        combos.emplace_back(n, true);
    }
    for (const auto& [comment, extra] : combos) {
        Bytes candidate = assemble_fixture(page_text, producer, comment, extra);
        if (candidate.size() == *pad_to) {
            return candidate;
        }
    }
    throw std::invalid_argument("cannot pad fixture to exactly " + std::to_string(*pad_to) +
                                " bytes");
}

Bytes shift_pdf_offsets(const PdfSkeleton& skeleton, ByteSpan bytes, std::int64_t delta) {
    Bytes out(bytes.begin(), bytes.end());
    char field[16];
    for (const auto& section : skeleton.xref_sections) {
        for (const auto& entry : section.entries) {
            if (entry.kind != XrefKind::InUse) {
                continue;
            }
            const std::int64_t fresh = static_cast<std::int64_t>(entry.offset) + delta;
            if (fresh < 0) {
                throw PdfError(PdfErrc::OffsetUnderflow,
                               "xref offset would become negative", entry.pos);
            }
            if (fresh > 9999999999ll) {
                throw PdfError(PdfErrc::FieldWidthOverflow,
                               "xref offset needs more than 10 digits", entry.pos);
            }
            std::snprintf(field, sizeof(field), "%010lld", static_cast<long long>(fresh));
            std::copy(field, field + 10, out.begin() + static_cast<std::ptrdiff_t>(entry.pos));
        }
    }
    const std::int64_t fresh = static_cast<std::int64_t>(skeleton.startxref_value) + delta;
    if (fresh < 0) {
        throw PdfError(PdfErrc::OffsetUnderflow, "startxref would become negative",
                       skeleton.startxref_digits_pos);
    }
    const std::string digits = std::to_string(fresh);
    if (digits.size() > skeleton.startxref_digits_len) {
        throw PdfError(PdfErrc::FieldWidthOverflow,
                       "startxref needs more digits than the existing field",
                       skeleton.startxref_digits_pos);
    }
    std::string padded(skeleton.startxref_digits_len - digits.size(), '0');
    padded += digits;
    std::copy(padded.begin(), padded.end(),
              out.begin() + static_cast<std::ptrdiff_t>(skeleton.startxref_digits_pos));
    return out;
}

Bytes extract_trailer_block(ByteSpan bytes, const PdfSkeleton& skeleton) {
    const ByteRange span = skeleton.trailer_span;
    if (span.end() > bytes.size()) {
        throw std::invalid_argument("skeleton does not match the supplied bytes");
    }
    return Bytes(bytes.begin() + static_cast<std::ptrdiff_t>(span.offset),
                 bytes.begin() + static_cast<std::ptrdiff_t>(span.end()));
}

}  // namespace dali::pdf
