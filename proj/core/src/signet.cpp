#include "dali/signet.hpp"

#include <algorithm>

#include <openssl/evp.h>

namespace dali::signet {

namespace {

constexpr std::string_view kMagic = "DSE1";
constexpr std::size_t kDigestLen = 32;

bool valid_hardened_mime(std::string_view mime) {
    return mime == "application/pdf" || mime == "image/tiff";
}

std::array<std::uint8_t, 32> message_digest(ByteSpan content, std::string_view filename,
                                            std::string_view mime, BindingMode mode) {
    const auto content_digest = sha256(content);
    if (mode == BindingMode::Legacy) {
        return content_digest;
    }
    Bytes framed;
    framed.reserve(content_digest.size() + filename.size() + mime.size() + 2);
    framed.insert(framed.end(), content_digest.begin(), content_digest.end());
    framed.push_back(0x00);
    framed.insert(framed.end(), filename.begin(), filename.end());
    framed.push_back(0x00);
    framed.insert(framed.end(), mime.begin(), mime.end());
    return sha256(framed);
}

void put_u16be(Bytes& out, std::uint16_t value) {
    out.push_back(static_cast<std::uint8_t>(value >> 8));
    out.push_back(static_cast<std::uint8_t>(value));
}

std::uint16_t take_u16be(ByteSpan b, std::size_t& pos) {
    if (pos + 2 > b.size()) {
        throw EnvelopeError("envelope truncated");
    }
    const std::uint16_t v = static_cast<std::uint16_t>((b[pos] << 8) | b[pos + 1]);
    pos += 2;
    return v;
}

std::string take_string(ByteSpan b, std::size_t& pos, std::size_t len) {
    if (pos + len > b.size()) {
        throw EnvelopeError("envelope truncated");
    }
    std::string s(b.begin() + static_cast<std::ptrdiff_t>(pos),
                  b.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
    return s;
}

void put_counted(Bytes& out, std::string_view s) {
    if (s.size() > 0xFFFF) {
        throw std::invalid_argument("envelope string field longer than 65535 bytes");
    }
    put_u16be(out, static_cast<std::uint16_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

}  // namespace

std::array<std::uint8_t, 32> sha256(ByteSpan data) {
    std::array<std::uint8_t, 32> out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    return out;
}

Bytes KeyedDigestBackend::sign(ByteSpan message) {
    Bytes keyed;
    keyed.reserve(id_.size() + message.size());
    keyed.insert(keyed.end(), id_.begin(), id_.end());
    keyed.insert(keyed.end(), message.begin(), message.end());
    const auto digest = sha256(keyed);
    return Bytes(digest.begin(), digest.end());
}

bool KeyedDigestBackend::verify(ByteSpan message, ByteSpan signature) {
    const Bytes expected = sign(message);
    if (expected.size() != signature.size()) {
        return false;
    }
    // Constant-time compare; the backend may be handed attacker-chosen data.
    std::uint8_t diff = 0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        diff |= static_cast<std::uint8_t>(expected[i] ^ signature[i]);
    }
    return diff == 0;
}

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::None: return "none";
        case RejectReason::BadSignature: return "BadSignature";
        case RejectReason::NameMismatch: return "NameMismatch";
        case RejectReason::MimeMismatch: return "MimeMismatch";
    }
    return "unknown";
}

SignatureEnvelope sign_detached(ByteSpan content, std::string_view filename,
                                std::string_view mime, BindingMode mode,
                                SignerBackend& backend) {
    if (filename.empty()) {
        throw std::invalid_argument("filename must be non-empty");
    }
    if (mode == BindingMode::Hardened && !valid_hardened_mime(mime)) {
        throw std::invalid_argument(
            "hardened binding requires mime application/pdf or image/tiff");
    }
    SignatureEnvelope env;
    env.binding = mode;
    env.digest = message_digest(content, filename, mime, mode);
    if (mode == BindingMode::Hardened) {
        env.bound_name = std::string(filename);
        env.bound_mime = std::string(mime);
    }
    env.signature = backend.sign(env.digest);
    env.signer_id = backend.id();
    return env;
}

VerifyResult verify_envelope(const SignatureEnvelope& envelope, ByteSpan content,
                             std::string_view presented_filename,
                             std::string_view presented_mime, SignerBackend& backend) {
    if (envelope.binding == BindingMode::Hardened) {
        if (presented_filename != envelope.bound_name) {
            return {false, RejectReason::NameMismatch,
                    "presented \"" + std::string(presented_filename) + "\", bound \"" +
                        envelope.bound_name + "\""};
        }
        if (presented_mime != envelope.bound_mime) {
            return {false, RejectReason::MimeMismatch,
                    "presented \"" + std::string(presented_mime) + "\", bound \"" +
                        envelope.bound_mime + "\""};
        }
    }
    const auto message = message_digest(content, envelope.bound_name, envelope.bound_mime,
                                        envelope.binding);
    if (message != envelope.digest ||
        !backend.verify(ByteSpan(message.data(), message.size()), envelope.signature)) {
        return {false, RejectReason::BadSignature, "digest or signature mismatch over content"};
    }
    return {true, RejectReason::None, ""};
}

Bytes encode_envelope(const SignatureEnvelope& envelope) {
    if (envelope.binding == BindingMode::Hardened &&
        (envelope.bound_name.empty() || envelope.bound_mime.empty())) {
        throw std::invalid_argument("hardened envelope requires bound name and mime");
    }
    if (envelope.binding == BindingMode::Legacy &&
        (!envelope.bound_name.empty() || !envelope.bound_mime.empty())) {
        throw std::invalid_argument("legacy envelope must not carry a bound name or mime");
    }
    Bytes out;
    out.insert(out.end(), kMagic.begin(), kMagic.end());
    out.push_back(envelope.version);
    out.push_back(static_cast<std::uint8_t>(envelope.binding));
    out.push_back(static_cast<std::uint8_t>(envelope.digest_alg));
    put_counted(out, envelope.bound_name);
    put_counted(out, envelope.bound_mime);
    out.insert(out.end(), envelope.digest.begin(), envelope.digest.end());
    if (envelope.signature.size() > 0xFFFF) {
        throw std::invalid_argument("signature longer than 65535 bytes");
    }
    put_u16be(out, static_cast<std::uint16_t>(envelope.signature.size()));
    out.insert(out.end(), envelope.signature.begin(), envelope.signature.end());
    put_counted(out, envelope.signer_id);
    return out;
}

SignatureEnvelope decode_envelope(ByteSpan bytes) {
    std::size_t pos = 0;
    if (!starts_with(bytes, 0, kMagic)) {
        throw EnvelopeError("not a DSE1 envelope");
    }
    pos += kMagic.size();
    SignatureEnvelope env;
    if (pos + 3 > bytes.size()) {
        throw EnvelopeError("envelope truncated");
    }
    env.version = bytes[pos++];
    if (env.version != 1) {
        throw EnvelopeError("unsupported envelope version " + std::to_string(env.version));
    }
    const std::uint8_t binding = bytes[pos++];
    if (binding > 1) {
        throw EnvelopeError("unknown binding mode " + std::to_string(binding));
    }
    env.binding = static_cast<BindingMode>(binding);
    const std::uint8_t alg = bytes[pos++];
    if (alg != static_cast<std::uint8_t>(DigestAlg::Sha256)) {
        throw EnvelopeError("unknown digest algorithm " + std::to_string(alg));
    }
    env.digest_alg = DigestAlg::Sha256;
    env.bound_name = take_string(bytes, pos, take_u16be(bytes, pos));
    env.bound_mime = take_string(bytes, pos, take_u16be(bytes, pos));
    if (pos + kDigestLen > bytes.size()) {
        throw EnvelopeError("envelope truncated");
    }
    std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
              bytes.begin() + static_cast<std::ptrdiff_t>(pos + kDigestLen), env.digest.begin());
    pos += kDigestLen;
    const std::size_t sig_len = take_u16be(bytes, pos);
    if (pos + sig_len > bytes.size()) {
        throw EnvelopeError("envelope truncated");
    }
    env.signature.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                         bytes.begin() + static_cast<std::ptrdiff_t>(pos + sig_len));
    pos += sig_len;
    env.signer_id = take_string(bytes, pos, take_u16be(bytes, pos));
    if (pos != bytes.size()) {
        throw EnvelopeError("trailing bytes after envelope");
    }
    if (env.binding == BindingMode::Hardened &&
        (env.bound_name.empty() || env.bound_mime.empty())) {
        throw EnvelopeError("hardened envelope without bound name/mime");
    }
    if (env.binding == BindingMode::Legacy &&
        (!env.bound_name.empty() || !env.bound_mime.empty())) {
        throw EnvelopeError("legacy envelope carries bound name/mime");
    }
    return env;
}

AttackTranscript attack_demo(ByteSpan tiff_bytes, ByteSpan pdf_bytes, SignerBackend& backend) {
    AttackTranscript t;
    auto note = [&](std::string line) { t.log.push_back(std::move(line)); };

    try {
        auto built = chimera::build_chimera(tiff_bytes, pdf_bytes,
                                            chimera::SpliceMode::PaperFaithful);
        t.chimera_built = true;
        t.shift = built.report.shift;
        t.chimera_bytes = std::move(built.bytes);
        note("built polyglot: " + std::to_string(t.chimera_bytes.size()) + " bytes, shift " +
             std::to_string(t.shift) + " (" + hex(t.shift) + ")");
    } catch (const std::exception& e) {
        t.build_error = e.what();
        note(std::string("splice failed: ") + e.what());
        note("transcript degenerates: nothing to sign or rename");
        return t;
    }

    const ByteSpan artifact(t.chimera_bytes);
    const auto dual = chimera::validate_chimera(artifact);
    t.dual_valid = dual.both;
    note(std::string("dual validity: tiff=") + (dual.tiff_ok ? "ok" : "invalid") +
         " pdf=" + (dual.pdf_ok ? "ok" : "invalid"));

    t.legacy_envelope =
        sign_detached(artifact, "Contract.pdf", "application/pdf", BindingMode::Legacy, backend);
    t.legacy_accept_original =
        verify_envelope(t.legacy_envelope, artifact, "Contract.pdf", "application/pdf", backend)
            .accepted;
    note(std::string("signed legacy as Contract.pdf; verification ") +
         (t.legacy_accept_original ? "accepts" : "rejects"));

    t.rename_gate_passed = t.dual_valid;
    if (t.rename_gate_passed) {
        const auto renamed = verify_envelope(t.legacy_envelope, artifact, "Contract.tif",
                                             "image/tiff", backend);
        t.legacy_accept_after_rename = renamed.accepted;
        note(std::string("renamed to Contract.tif; legacy verification still ") +
             (renamed.accepted ? "ACCEPTS -- the attack" : "rejects"));
    } else {
        note("rename step rejected: artifact is not dual-valid");
    }

    t.detect_verdict = detector::detect(artifact, detector::ClaimedType::Pdf).verdict;
    note("detector verdict: " + std::string(detector::to_string(t.detect_verdict)));

    t.hardened_envelope = sign_detached(artifact, "Contract.pdf", "application/pdf",
                                        BindingMode::Hardened, backend);
    t.hardened_accept_original =
        verify_envelope(t.hardened_envelope, artifact, "Contract.pdf", "application/pdf", backend)
            .accepted;
    const auto hardened_renamed =
        verify_envelope(t.hardened_envelope, artifact, "Contract.tif", "image/tiff", backend);
    t.hardened_accept_after_rename = hardened_renamed.accepted;
    t.hardened_rename_reason = hardened_renamed.reason;
    note(std::string("hardened binding: original name ") +
         (t.hardened_accept_original ? "accepts" : "rejects") + ", rename rejects with " +
         std::string(to_string(t.hardened_rename_reason)));
    return t;
}

std::string format_transcript(const AttackTranscript& transcript) {
    std::string out;
    for (const auto& line : transcript.log) {
        out += line + "\n";
    }
    out += "summary: legacy-accept-after-rename=";
    out += transcript.legacy_accept_after_rename ? "true" : "false";
    out += " hardened-accept-after-rename=";
    out += transcript.hardened_accept_after_rename ? "true" : "false";
    out += "\n";
    return out;
}

}  // namespace dali::signet
