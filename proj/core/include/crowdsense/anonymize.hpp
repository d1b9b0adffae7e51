#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace crowdsense {

/// 48-bit hardware address. Hashing always uses the raw 6 octets, never the
/// ASCII form, so case and delimiter variants digest identically.
struct MacAddress {
  std::array<std::uint8_t, 6> octets{};

  /// Parses "aa:bb:cc:dd:ee:ff" (case-insensitive, ':' or '-' separators).
  /// Throws MalformedMacError.
  static MacAddress parse(std::string_view text);

  std::string to_string() const;

  friend bool operator==(const MacAddress&, const MacAddress&) = default;
};

/// Unlinkable device digest: lowercase hex of the full 32-octet HMAC-SHA256.
struct AnonId {
  std::string hex;

  friend bool operator==(const AnonId&, const AnonId&) = default;
};

constexpr std::size_t kSessionKeyBytes = 12;

/// Source of key material. The default draws from the process CSPRNG;
/// deterministic sources exist for reproducible pipeline runs.
using KeyMaterialFn = std::function<void(std::span<std::uint8_t>)>;

/// Fills `out` from the system cryptographic randomness source.
/// Throws RandomnessUnavailableError.
void secure_random(std::span<std::uint8_t> out);

/// Deterministic key material derived from a seed; for reproducible runs
/// where unlinkability across reruns is explicitly not wanted.
KeyMaterialFn seeded_key_material(std::uint64_t seed);

/// Session key for device-digest derivation. Exactly 12 octets; the material
/// is wiped when the key is destroyed or replaced, so digests from expired
/// sessions cannot be re-derived.
class SessionKey {
 public:
  SessionKey() = default;
  SessionKey(const SessionKey&) = delete;
  SessionKey& operator=(const SessionKey&) = delete;
  SessionKey(SessionKey&& other) noexcept;
  SessionKey& operator=(SessionKey&& other) noexcept;
  ~SessionKey();

  /// Validates length (throws KeyLengthError) and copies the material.
  static SessionKey from_bytes(std::span<const std::uint8_t> bytes,
                               std::uint64_t session_index, std::int64_t valid_from,
                               std::int64_t valid_until);

  std::span<const std::uint8_t> bytes() const { return {bytes_.data(), bytes_.size()}; }
  std::uint64_t session_index() const { return session_index_; }
  std::int64_t valid_from() const { return valid_from_; }
  std::int64_t valid_until() const { return valid_until_; }
  bool valid_at(std::int64_t t) const { return t >= valid_from_ && t < valid_until_; }

 private:
  std::array<std::uint8_t, kSessionKeyBytes> bytes_{};
  std::uint64_t session_index_ = 0;
  std::int64_t valid_from_ = 0;
  std::int64_t valid_until_ = 0;

  void wipe();
};

/// HMAC-SHA256 over the 6 raw MAC octets with an arbitrary-length key view.
/// Throws KeyLengthError unless the key is exactly 12 octets.
AnonId derive_anon_id(const MacAddress& mac, std::span<const std::uint8_t> key);

AnonId derive_anon_id(const MacAddress& mac, const SessionKey& key);

/// Owns the current session key and rotates it on schedule. Sessions are
/// aligned to multiples of the period so independently restarted processes
/// agree on boundaries; key material itself is always fresh.
class KeyRotator {
 public:
  explicit KeyRotator(std::int64_t period_s, KeyMaterialFn material = secure_random);

  /// Key valid at `now`, rotating first if the current session expired.
  /// The previous key's bytes are zeroized on rotation.
  const SessionKey& key_at(std::int64_t now);

  /// Unconditionally starts a new session covering `now`.
  const SessionKey& rotate(std::int64_t now);

  std::int64_t period_s() const { return period_s_; }

 private:
  std::int64_t period_s_;
  KeyMaterialFn material_;
  SessionKey current_;
  bool have_key_ = false;
};

bool is_hex_digest(std::string_view s);

}  // namespace crowdsense
