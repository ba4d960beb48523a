#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dali/bytes.hpp"
#include "dali/chimera.hpp"

namespace dali::detector {

// Heuristic polyglot scanner: looks for TIFF structure inside PDFs, PDF
// structure inside TIFFs, displaced headers and unreachable byte runs.
// Detection runs the real parsers, so findings carry exact byte spans.
// Unreadable structure lowers confidence; it never aborts a scan.

enum class FindingKind {
    TiffMagicAtStart,
    PdfHeaderDisplaced,
    PdfHeaderInsideTiff,
    TrailingPdfTrailer,
    ForeignSpan,
    XrefResolvesOnlyWithHeaderOrigin,
    PdfA1bHeaderViolation,
    TiffParamsInsidePdf,
    PdfParamsInsideTiff,
};

enum class Severity { Info, Suspicious, Malicious };

enum class ClaimedType { Pdf, Tiff, Unknown };

enum class Verdict { Clean, Suspicious, Polyglot };

[[nodiscard]] std::string_view to_string(FindingKind kind);
[[nodiscard]] std::string_view to_string(Severity severity);
[[nodiscard]] std::string_view to_string(ClaimedType type);
[[nodiscard]] std::string_view to_string(Verdict verdict);

struct Finding {
    FindingKind kind;
    ByteRange span;
    Severity severity = Severity::Info;
    Bytes evidence;  // at most 32 raw bytes from the span
    std::string note;
};

struct DetectionReport {
    ClaimedType claimed_type = ClaimedType::Unknown;
    std::vector<Finding> findings;
    Verdict verdict = Verdict::Clean;
    chimera::DualValidity dual;

    [[nodiscard]] bool has(FindingKind kind) const;
    [[nodiscard]] std::size_t count_at_least(Severity severity) const;
};

struct DetectorConfig {
    // Unreachable runs shorter than this are EOL/padding noise, not findings.
    std::size_t min_foreign_len = 16;
};

[[nodiscard]] DetectionReport detect(ByteSpan bytes, ClaimedType claimed,
                                     const DetectorConfig& config = {});

/// PDF/A-1b rule: the file must begin with %PDF-1.X at byte 0.
struct PdfaCheck {
    bool pass = false;
    std::string reason;
    std::uint64_t offending_offset = 0;
};

[[nodiscard]] PdfaCheck check_pdfa_header(ByteSpan bytes);

struct FileReport {
    std::filesystem::path path;
    DetectionReport report;
    std::string io_error;  // empty when the file was read and scanned

    [[nodiscard]] bool ok() const noexcept { return io_error.empty(); }
};

/// Scan every regular file under root, claimed types inferred from the
/// extension; results ordered lexicographically by path. Per-file read
/// failures are recorded, they do not abort the walk.
[[nodiscard]] std::vector<FileReport> scan_tree(const std::filesystem::path& root,
                                                const DetectorConfig& config = {});

[[nodiscard]] ClaimedType claimed_type_from_extension(const std::filesystem::path& path);

/// Exit-code contract: 2 any polyglot, else 1 any suspicious, else 3 any
/// per-file operational error, else 0.
[[nodiscard]] int exit_code_for(const std::vector<FileReport>& reports);

[[nodiscard]] std::string format_report_text(const FileReport& report);
/// Machine-readable form: one JSON object per file with path, claimed_type,
/// verdict and findings[] (kind, span, severity, evidence hex).
[[nodiscard]] std::string format_reports_json(const std::vector<FileReport>& reports);

}  // namespace dali::detector
