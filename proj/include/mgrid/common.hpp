#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mgrid {

/// Hours per simulation step. Powers in MW and energies in MWh interconvert 1:1.
inline constexpr double kStepHours = 1.0;
inline constexpr int kHoursPerEpisode = 168;

using Rng = std::mt19937_64;

/// Raised for invalid configuration values. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for unreadable or invalid input data. Maps to CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  enum class Kind { Schema, Malformed, Gap, NonMonotone, Io };

  DataError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  Kind kind() const noexcept { return kind_; }
  /// 1-based line number in the source file, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives an independent seed for a named component from a master seed, so
/// that adding a consumer elsewhere never shifts another component's stream.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) noexcept;

/// Keeps freed scratch matrices in the heap instead of returning them to the
/// OS after every training step. No effect outside glibc.
void configure_allocator() noexcept;

}  // namespace mgrid
