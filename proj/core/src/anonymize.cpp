#include "crowdsense/anonymize.hpp"

#include <openssl/crypto.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cctype>
#include <memory>

#include "crowdsense/errors.hpp"

namespace crowdsense {

namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr char kHexDigits[] = "0123456789abcdef";

// SplitMix64; used only for the opt-in deterministic key source.
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

MacAddress MacAddress::parse(std::string_view text) {
  MacAddress mac;
  if (text.size() != 17) {
    throw MalformedMacError("MAC must look like aa:bb:cc:dd:ee:ff");
  }
  for (int i = 0; i < 6; ++i) {
    int hi = hex_nibble(text[i * 3]);
    int lo = hex_nibble(text[i * 3 + 1]);
    if (hi < 0 || lo < 0) {
      throw MalformedMacError("MAC has a non-hex octet");
    }
    if (i < 5) {
      char sep = text[i * 3 + 2];
      if (sep != ':' && sep != '-') {
        throw MalformedMacError("MAC separator must be ':' or '-'");
      }
    }
    mac.octets[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return mac;
}

std::string MacAddress::to_string() const {
  std::string out(17, ':');
  for (int i = 0; i < 6; ++i) {
    out[i * 3] = kHexDigits[octets[i] >> 4];
    out[i * 3 + 1] = kHexDigits[octets[i] & 0xf];
  }
  return out;
}

void secure_random(std::span<std::uint8_t> out) {
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw RandomnessUnavailableError("system CSPRNG unavailable");
  }
}

KeyMaterialFn seeded_key_material(std::uint64_t seed) {
  auto state = std::make_shared<std::uint64_t>(seed);
  return [state](std::span<std::uint8_t> out) {
    for (auto& b : out) b = static_cast<std::uint8_t>(splitmix64(*state));
  };
}

SessionKey::SessionKey(SessionKey&& other) noexcept
    : bytes_(other.bytes_),
      session_index_(other.session_index_),
      valid_from_(other.valid_from_),
      valid_until_(other.valid_until_) {
  other.wipe();
}

SessionKey& SessionKey::operator=(SessionKey&& other) noexcept {
  if (this != &other) {
    wipe();
    bytes_ = other.bytes_;
    session_index_ = other.session_index_;
    valid_from_ = other.valid_from_;
    valid_until_ = other.valid_until_;
    other.wipe();
  }
  return *this;
}

SessionKey::~SessionKey() { wipe(); }

void SessionKey::wipe() { OPENSSL_cleanse(bytes_.data(), bytes_.size()); }

SessionKey SessionKey::from_bytes(std::span<const std::uint8_t> bytes,
                                  std::uint64_t session_index, std::int64_t valid_from,
                                  std::int64_t valid_until) {
  if (bytes.size() != kSessionKeyBytes) {
    throw KeyLengthError("session key must be exactly 12 octets");
  }
  SessionKey key;
  std::copy(bytes.begin(), bytes.end(), key.bytes_.begin());
  key.session_index_ = session_index;
  key.valid_from_ = valid_from;
  key.valid_until_ = valid_until;
  return key;
}

AnonId derive_anon_id(const MacAddress& mac, std::span<const std::uint8_t> key) {
  if (key.size() != kSessionKeyBytes) {
    throw KeyLengthError("session key must be exactly 12 octets");
  }
  unsigned char digest[32];
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), mac.octets.data(),
           mac.octets.size(), digest, &len) == nullptr ||
      len != sizeof(digest)) {
    throw Error("HMAC-SHA256 failed");
  }
  AnonId id;
  id.hex.resize(64);
  for (unsigned i = 0; i < len; ++i) {
    id.hex[i * 2] = kHexDigits[digest[i] >> 4];
    id.hex[i * 2 + 1] = kHexDigits[digest[i] & 0xf];
  }
  return id;
}

AnonId derive_anon_id(const MacAddress& mac, const SessionKey& key) {
  return derive_anon_id(mac, key.bytes());
}

KeyRotator::KeyRotator(std::int64_t period_s, KeyMaterialFn material)
    : period_s_(period_s), material_(std::move(material)) {
  if (period_s_ <= 0) {
    throw ConfigError("session period must be positive");
  }
}

const SessionKey& KeyRotator::key_at(std::int64_t now) {
  if (!have_key_ || !current_.valid_at(now)) {
    return rotate(now);
  }
  return current_;
}

const SessionKey& KeyRotator::rotate(std::int64_t now) {
  std::array<std::uint8_t, kSessionKeyBytes> material{};
  material_(material);
  std::int64_t from = (now / period_s_) * period_s_;
  if (now < 0 && now % period_s_ != 0) from -= period_s_;
  std::uint64_t index = have_key_ ? current_.session_index() + 1 : 0;
  // Move-assignment wipes the previous key's bytes.
  current_ = SessionKey::from_bytes(material, index, from, from + period_s_);
  OPENSSL_cleanse(material.data(), material.size());
  have_key_ = true;
  return current_;
}

bool is_hex_digest(std::string_view s) {
  if (s.size() != 64) return false;
  for (char c : s) {
    if (hex_nibble(c) < 0 || (c >= 'A' && c <= 'F')) return false;
  }
  return true;
}

}  // namespace crowdsense
