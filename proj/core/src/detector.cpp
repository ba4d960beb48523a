#include "dali/detector.hpp"

#include <algorithm>
#include <optional>

#include <nlohmann/json.hpp>

#include "dali/pdf_lite.hpp"
#include "dali/tiff_codec.hpp"

namespace dali::detector {

namespace {

constexpr std::size_t kEvidenceMax = 32;
constexpr std::size_t kHeaderWindow = 1024;

bool tiff_magic_at_start(ByteSpan b) {
    if (b.size() < 4) {
        return false;
    }
    const bool little = b[0] == 'I' && b[1] == 'I' && b[2] == 0x2A && b[3] == 0x00;
    const bool big = b[0] == 'M' && b[1] == 'M' && b[2] == 0x00 && b[3] == 0x2A;
    return little || big;
}

// Same window rule as the scanner, independent of whether a full scan works.
std::optional<std::uint64_t> pdf_header_in_window(ByteSpan b) {
    const std::size_t window = std::min(b.size(), kHeaderWindow);
    std::size_t from = 0;
    while (from + 8 <= window) {
        auto hit = find_bytes(b.first(window), "%PDF-", from);
        if (!hit) {
            return std::nullopt;
        }
        if (*hit + 8 <= window && b[*hit + 5] == '1' && b[*hit + 6] == '.' &&
            b[*hit + 7] >= '0' && b[*hit + 7] <= '9') {
            return *hit;
        }
        from = *hit + 1;
    }
    return std::nullopt;
}

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

Bytes evidence_from(ByteSpan b, ByteRange span) {
    const std::uint64_t n = std::min<std::uint64_t>(span.length, kEvidenceMax);
    const std::uint64_t lo = std::min<std::uint64_t>(span.offset, b.size());
    const std::uint64_t hi = std::min<std::uint64_t>(lo + n, b.size());
    return Bytes(b.begin() + static_cast<std::ptrdiff_t>(lo),
                 b.begin() + static_cast<std::ptrdiff_t>(hi));
}

// The byte runs a PDF reader never visits: everything outside the carve
// from the header to the %%EOF terminating the resolved structure, plus the
// final trailer block.
std::vector<ByteRange> pdf_unreachable(ByteSpan bytes, const pdf::PdfSkeleton& sk) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> covered;
    std::uint64_t carve_end = eof_marker_end(bytes, sk.eof_offset);
    if (sk.resolution.resolved()) {
        std::vector<std::uint64_t> eofs = sk.earlier_eofs;
        eofs.push_back(sk.eof_offset);
        for (const auto e : eofs) {
            if (e > sk.xref_end) {
                carve_end = eof_marker_end(bytes, e);
                break;
            }
        }
    }
    covered.emplace_back(sk.header.offset, carve_end);
    covered.emplace_back(sk.trailer_span.offset, sk.trailer_span.end());
    std::sort(covered.begin(), covered.end());
    std::vector<ByteRange> gaps;
    std::uint64_t cursor = 0;
    for (const auto& [lo, hi] : covered) {
        if (lo > cursor) {
            gaps.push_back({cursor, lo - cursor});
        }
        cursor = std::max(cursor, hi);
    }
    if (cursor < bytes.size()) {
        gaps.push_back({cursor, bytes.size() - cursor});
    }
    return gaps;
}

std::string severity_key(Severity s) {
    return std::string(to_string(s));
}

}  // namespace

std::string_view to_string(FindingKind kind) {
    switch (kind) {
        case FindingKind::TiffMagicAtStart: return "TiffMagicAtStart";
        case FindingKind::PdfHeaderDisplaced: return "PdfHeaderDisplaced";
        case FindingKind::PdfHeaderInsideTiff: return "PdfHeaderInsideTiff";
        case FindingKind::TrailingPdfTrailer: return "TrailingPdfTrailer";
        case FindingKind::ForeignSpan: return "ForeignSpan";
        case FindingKind::XrefResolvesOnlyWithHeaderOrigin:
            return "XrefResolvesOnlyWithHeaderOrigin";
        case FindingKind::PdfA1bHeaderViolation: return "PdfA1bHeaderViolation";
        case FindingKind::TiffParamsInsidePdf: return "TiffParamsInsidePdf";
        case FindingKind::PdfParamsInsideTiff: return "PdfParamsInsideTiff";
    }
    return "Unknown";
}

std::string_view to_string(Severity severity) {
    switch (severity) {
        case Severity::Info: return "info";
        case Severity::Suspicious: return "suspicious";
        case Severity::Malicious: return "malicious";
    }
    return "unknown";
}

std::string_view to_string(ClaimedType type) {
    switch (type) {
        case ClaimedType::Pdf: return "pdf";
        case ClaimedType::Tiff: return "tiff";
        case ClaimedType::Unknown: return "unknown";
    }
    return "unknown";
}

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Clean: return "clean";
        case Verdict::Suspicious: return "suspicious";
        case Verdict::Polyglot: return "polyglot";
    }
    return "unknown";
}

bool DetectionReport::has(FindingKind kind) const {
    return std::any_of(findings.begin(), findings.end(),
                       [kind](const Finding& f) { return f.kind == kind; });
}

std::size_t DetectionReport::count_at_least(Severity severity) const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(),
                      [severity](const Finding& f) { return f.severity >= severity; }));
}

DetectionReport detect(ByteSpan bytes, ClaimedType claimed, const DetectorConfig& config) {
    DetectionReport report;
    report.claimed_type = claimed;
    report.dual = chimera::validate_chimera(bytes);

    std::optional<tiff::TiffDocument> tiff_doc;
    try {
        tiff_doc = tiff::parse_tiff(bytes);
    } catch (const std::exception&) {
    }
    std::optional<pdf::PdfSkeleton> pdf_sk;
    try {
        pdf_sk = pdf::scan_pdf(bytes);
    } catch (const std::exception&) {
    }

    const bool treat_as_tiff = claimed == ClaimedType::Tiff ||
                               (claimed == ClaimedType::Unknown && tiff_doc.has_value());
    const bool treat_as_pdf = claimed == ClaimedType::Pdf ||
                              (claimed == ClaimedType::Unknown && !tiff_doc.has_value());

    auto add = [&](FindingKind kind, ByteRange span, Severity severity, std::string note) {
        report.findings.push_back(
            {kind, span, severity, evidence_from(bytes, span), std::move(note)});
    };

    if (tiff_magic_at_start(bytes)) {
        add(FindingKind::TiffMagicAtStart, {0, 4},
            claimed == ClaimedType::Pdf ? Severity::Suspicious : Severity::Info,
            "TIFF byte-order mark and magic number at byte 0");
    }
    if (auto h = pdf_header_in_window(bytes); h && *h > 0) {
        add(FindingKind::PdfHeaderDisplaced, {*h, 8}, Severity::Suspicious,
            "%PDF-1.X header displaced to " + hex(*h));
    }
    if (claimed == ClaimedType::Pdf && tiff_doc) {
        const auto& ifd0 = tiff_doc->ifds.front();
        add(FindingKind::TiffParamsInsidePdf, {ifd0.offset, ifd0.table_size()},
            Severity::Suspicious,
            "structurally valid IFD chain with " + std::to_string(tiff_doc->ifds.size()) +
                " IFD(s) reachable from a TIFF header");
    }
    if (treat_as_tiff) {
        if (auto h = find_bytes(bytes, "%PDF-1.")) {
            add(FindingKind::PdfHeaderInsideTiff, {*h, 8}, Severity::Suspicious,
                "PDF header inside a file claimed to be TIFF");
        }
        auto sx = find_bytes(bytes, "startxref");
        auto eof = rfind_bytes(bytes, "%%EOF", bytes.size());
        if (sx && eof) {
            add(FindingKind::PdfParamsInsideTiff, {*sx, eof_marker_end(bytes, *eof) - *sx},
                Severity::Suspicious, "startxref and %%EOF inside a file claimed to be TIFF");
        }
        if (eof) {
            const std::uint64_t eof_end = eof_marker_end(bytes, *eof);
            auto tr = rfind_bytes(bytes, "trailer", *eof);
            if (tr && bytes.size() - eof_end <= 2) {
                add(FindingKind::TrailingPdfTrailer, {*tr, eof_end - *tr}, Severity::Suspicious,
                    "PDF trailer block at the end of the file");
            }
        }
    }
    if (pdf_sk && pdf_sk->resolution.resolved() && !pdf_sk->resolution.from_file_start) {
        add(FindingKind::XrefResolvesOnlyWithHeaderOrigin,
            {pdf_sk->startxref_digits_pos, pdf_sk->startxref_digits_len}, Severity::Info,
            "startxref resolves only relative to the displaced header");
    }
    if (claimed == ClaimedType::Pdf) {
        const PdfaCheck pdfa = check_pdfa_header(bytes);
        if (!pdfa.pass) {
            add(FindingKind::PdfA1bHeaderViolation, {pdfa.offending_offset, 1}, Severity::Info,
                "PDF/A-1b header rule: " + pdfa.reason);
        }
    }

    // Unreachable byte runs under the claimed reading.
    std::vector<ByteRange> unreachable;
    if (treat_as_tiff && tiff_doc) {
        for (const auto& span : tiff_doc->foreign_spans) {
            unreachable.push_back(span.range());
        }
    } else if (treat_as_pdf && pdf_sk) {
        unreachable = pdf_unreachable(bytes, *pdf_sk);
    }
    for (const auto& gap : unreachable) {
        if (gap.length >= config.min_foreign_len) {
            add(FindingKind::ForeignSpan, gap, Severity::Suspicious,
                std::to_string(gap.length) + " bytes unreachable from the " +
                    std::string(to_string(claimed)) + " structure");
        }
    }

    if (report.dual.both) {
        for (auto& f : report.findings) {
            switch (f.kind) {
                case FindingKind::TiffMagicAtStart:
                case FindingKind::PdfHeaderDisplaced:
                case FindingKind::PdfHeaderInsideTiff:
                case FindingKind::TrailingPdfTrailer:
                case FindingKind::TiffParamsInsidePdf:
                case FindingKind::PdfParamsInsideTiff: f.severity = Severity::Malicious; break;
                default: break;
            }
        }
        report.verdict = Verdict::Polyglot;
    } else if (report.count_at_least(Severity::Suspicious) > 0) {
        report.verdict = Verdict::Suspicious;
    } else {
        report.verdict = Verdict::Clean;
    }
    return report;
}

PdfaCheck check_pdfa_header(ByteSpan bytes) {
    if (bytes.size() < 8) {
        return {false, "TooShort: fewer than 8 bytes", 0};
    }
    static constexpr std::string_view prefix = "%PDF-";
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (bytes[i] != static_cast<std::uint8_t>(prefix[i])) {
            return {false, "file does not begin with %PDF-", i};
        }
    }
    if (bytes[5] != '1') {
        return {false, "major version is not 1", 5};
    }
    if (bytes[6] != '.') {
        return {false, "missing version dot", 6};
    }
    if (bytes[7] < '0' || bytes[7] > '9') {
        return {false, "minor version is not a digit", 7};
    }
    return {true, "", 0};
}

ClaimedType claimed_type_from_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pdf") {
        return ClaimedType::Pdf;
    }
    if (ext == ".tif" || ext == ".tiff") {
        return ClaimedType::Tiff;
    }
    return ClaimedType::Unknown;
}

std::vector<FileReport> scan_tree(const std::filesystem::path& root,
                                  const DetectorConfig& config) {
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        std::error_code ec;
        if (entry.is_regular_file(ec) || (entry.is_symlink() && !entry.exists(ec))) {
            paths.push_back(entry.path());
        }
    }
    std::sort(paths.begin(), paths.end(),
              [](const auto& a, const auto& b) { return a.string() < b.string(); });

    std::vector<FileReport> reports;
    reports.reserve(paths.size());
    for (const auto& path : paths) {
        FileReport fr;
        fr.path = path;
        try {
            const Bytes data = read_file(path);
            fr.report = detect(data, claimed_type_from_extension(path), config);
        } catch (const std::exception& e) {
            fr.io_error = e.what();
        }
        reports.push_back(std::move(fr));
    }
    return reports;
}

int exit_code_for(const std::vector<FileReport>& reports) {
    bool any_suspicious = false;
    bool any_error = false;
    for (const auto& fr : reports) {
        if (!fr.ok()) {
            any_error = true;
        } else if (fr.report.verdict == Verdict::Polyglot) {
            return 2;
        } else if (fr.report.verdict == Verdict::Suspicious) {
            any_suspicious = true;
        }
    }
    if (any_suspicious) {
        return 1;
    }
    return any_error ? 3 : 0;
}

std::string format_report_text(const FileReport& fr) {
    std::string out = fr.path.string();
    if (!fr.ok()) {
        out += ": ERROR " + fr.io_error + "\n";
        return out;
    }
    std::string verdict(to_string(fr.report.verdict));
    std::transform(verdict.begin(), verdict.end(), verdict.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    out += ": " + verdict + " (claimed " + std::string(to_string(fr.report.claimed_type)) + ")\n";
    for (const auto& f : fr.report.findings) {
        out += "  [" + severity_key(f.severity) + "] " + std::string(to_string(f.kind)) + " [" +
               hex(f.span.offset) + "," + hex(f.span.end()) + ")";
        if (!f.evidence.empty()) {
            out += " " + hex_dump(f.evidence, 8);
        }
        if (!f.note.empty()) {
            out += " -- " + f.note;
        }
        out += "\n";
    }
    return out;
}

std::string format_reports_json(const std::vector<FileReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& fr : reports) {
        nlohmann::ordered_json obj;
        obj["path"] = fr.path.string();
        if (!fr.ok()) {
            obj["error"] = fr.io_error;
            arr.push_back(std::move(obj));
            continue;
        }
        obj["claimed_type"] = std::string(to_string(fr.report.claimed_type));
        obj["verdict"] = std::string(to_string(fr.report.verdict));
        obj["tiff_valid"] = fr.report.dual.tiff_ok;
        obj["pdf_valid"] = fr.report.dual.pdf_ok;
        nlohmann::ordered_json findings = nlohmann::ordered_json::array();
        for (const auto& f : fr.report.findings) {
            nlohmann::ordered_json jf;
            jf["kind"] = std::string(to_string(f.kind));
            jf["severity"] = severity_key(f.severity);
            jf["span"] = {{"offset", f.span.offset}, {"length", f.span.length}};
            jf["evidence"] = hex_dump(f.evidence);
            jf["note"] = f.note;
            findings.push_back(std::move(jf));
        }
        obj["findings"] = std::move(findings);
        arr.push_back(std::move(obj));
    }
    return arr.dump(2);
}

}  // namespace dali::detector
