#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace merit {

/// 64-bit FNV-1a. Used for content hashes in manifests.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

/// SplitMix64 finalizer; a bijective mixer on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Platform-independent keyed hash of a string: splitmix64(fnv1a64(s) ^ seed').
std::uint64_t keyed_hash(std::string_view s, std::uint64_t seed) noexcept;

/// 16 lowercase hex digits.
std::string to_hex(std::uint64_t v);

}  // namespace merit
