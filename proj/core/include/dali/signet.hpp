#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dali/bytes.hpp"
#include "dali/chimera.hpp"
#include "dali/detector.hpp"

namespace dali::signet {

// Detached-signature envelope. Legacy mode reproduces the property that
// makes extension renaming possible: only the content bytes are signed, so
// the verifier never sees the filename. Hardened mode binds the filename
// and MIME type into the signed message. Not PKCS#7: a purpose-built
// envelope with a pluggable signer backend.

enum class BindingMode : std::uint8_t { Legacy = 0, Hardened = 1 };
enum class DigestAlg : std::uint8_t { Sha256 = 1 };

[[nodiscard]] std::array<std::uint8_t, 32> sha256(ByteSpan data);

class SignerBackend {
public:
    virtual ~SignerBackend() = default;
    [[nodiscard]] virtual Bytes sign(ByteSpan message) = 0;
    [[nodiscard]] virtual bool verify(ByteSpan message, ByteSpan signature) = 0;
    [[nodiscard]] virtual std::string id() const = 0;
};

/// Deterministic software signer: signature = sha256(id || message).
/// Stands in for the smartcard/PKI backend; same interface, no key
/// material, so tests and the demo are reproducible byte for byte.
class KeyedDigestBackend final : public SignerBackend {
public:
    explicit KeyedDigestBackend(std::string id = "softsign-v1") : id_(std::move(id)) {}

    [[nodiscard]] Bytes sign(ByteSpan message) override;
    [[nodiscard]] bool verify(ByteSpan message, ByteSpan signature) override;
    [[nodiscard]] std::string id() const override { return id_; }

private:
    std::string id_;
};

struct SignatureEnvelope {
    std::uint8_t version = 1;
    BindingMode binding = BindingMode::Legacy;
    DigestAlg digest_alg = DigestAlg::Sha256;
    std::string bound_name;  // Hardened only
    std::string bound_mime;  // Hardened only
    std::array<std::uint8_t, 32> digest{};
    Bytes signature;
    std::string signer_id;

    friend bool operator==(const SignatureEnvelope&, const SignatureEnvelope&) = default;
};

/// Legacy: message = sha256(content). Hardened: message =
/// sha256(sha256(content) || 0x00 || filename || 0x00 || mime) — the
/// content is pre-hashed, so NUL bytes inside it cannot forge a binding.
[[nodiscard]] SignatureEnvelope sign_detached(ByteSpan content, std::string_view filename,
                                              std::string_view mime, BindingMode mode,
                                              SignerBackend& backend);

enum class RejectReason { None, BadSignature, NameMismatch, MimeMismatch };

[[nodiscard]] std::string_view to_string(RejectReason reason);

struct VerifyResult {
    bool accepted = false;
    RejectReason reason = RejectReason::None;
    std::string detail;
};

/// Legacy envelopes ignore the presented filename and MIME entirely —
/// the vulnerability, enforced by construction. Hardened envelopes reject
/// with NameMismatch/MimeMismatch before any signature check.
[[nodiscard]] VerifyResult verify_envelope(const SignatureEnvelope& envelope, ByteSpan content,
                                           std::string_view presented_filename,
                                           std::string_view presented_mime,
                                           SignerBackend& backend);

class EnvelopeError : public std::runtime_error {
public:
    explicit EnvelopeError(const std::string& message) : std::runtime_error(message) {}
};

// Wire format (.dse): "DSE1" | version u8 | binding u8 | digest_alg u8 |
// name_len u16be | name | mime_len u16be | mime | digest[32] |
// sig_len u16be | signature | signer_id_len u16be | signer_id.
[[nodiscard]] Bytes encode_envelope(const SignatureEnvelope& envelope);
[[nodiscard]] SignatureEnvelope decode_envelope(ByteSpan bytes);

/// Machine-checkable enactment of the end-to-end scenario: build the
/// polyglot, sign it Legacy as a .pdf, rename to .tif, watch verification
/// still accept; then show detection and the Hardened rejection.
struct AttackTranscript {
    bool chimera_built = false;
    std::string build_error;
    std::uint64_t shift = 0;
    bool dual_valid = false;
    bool rename_gate_passed = false;  // rename step runs only on dual-valid artifacts
    bool legacy_accept_original = false;
    bool legacy_accept_after_rename = false;
    detector::Verdict detect_verdict = detector::Verdict::Clean;
    bool hardened_accept_original = false;
    bool hardened_accept_after_rename = false;
    RejectReason hardened_rename_reason = RejectReason::None;
    std::vector<std::string> log;

    // Artifacts, so callers can persist what the transcript talks about.
    Bytes chimera_bytes;
    SignatureEnvelope legacy_envelope;
    SignatureEnvelope hardened_envelope;
};

[[nodiscard]] AttackTranscript attack_demo(ByteSpan tiff_bytes, ByteSpan pdf_bytes,
                                           SignerBackend& backend);

[[nodiscard]] std::string format_transcript(const AttackTranscript& transcript);

}  // namespace dali::signet
