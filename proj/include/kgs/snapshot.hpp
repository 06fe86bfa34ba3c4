#pragma once

#include "kgs/stepper.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kgs {

class SnapshotError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t snapshot_version = 1;
inline constexpr const char* default_scheme_tag = "mti-fp";

/// Binary layout (all little endian):
///   "KGS1", u32 version, f64 a, f64 b, u64 N, f64 eps, f64 tau, f64 t,
///   u64 tag length + tag bytes, u64 FNV-1a checksum of the payload,
///   payload = u64 N + N f64 Phi, u64 N + N f64 PhiDot, u64 2N + 2N f64 Psi (re, im interleaved).
struct Snapshot {
  FieldState state;
  double tau = 0.0;
  std::string scheme = default_scheme_tag;
};

void save_snapshot(const std::string& path, const FieldState& state, double tau,
                   const std::string& scheme = default_scheme_tag);

/// Throws SnapshotError on a bad magic, unknown version, truncation or checksum
/// mismatch; nothing is returned in that case.
Snapshot load_snapshot(const std::string& path);

/// As load_snapshot, and additionally requires the stored grid to equal `expected`.
Snapshot load_snapshot(const std::string& path, const Grid& expected);

std::string encode_snapshot(const FieldState& state, double tau, const std::string& scheme = default_scheme_tag);
Snapshot decode_snapshot(const std::string& bytes);

std::uint64_t fnv1a64(const std::string& bytes);

} // namespace kgs
