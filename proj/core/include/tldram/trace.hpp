#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "tldram/controller.hpp"

namespace tldram {

struct TraceRecord {
  std::uint64_t gap = 0;  // non-memory instructions before this request
  RequestKind kind = RequestKind::read;
  std::uint64_t address = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Lines of `gap,kind,hex_address`; kind is R or W, `#` starts a comment.
// Throws TraceParseError carrying the 1-based line number.
std::vector<TraceRecord> parse_trace(std::istream& in);
std::vector<TraceRecord> parse_trace_text(std::string_view text);
// Plain or gzip-compressed file. Throws Error when it cannot be read.
std::vector<TraceRecord> read_trace_file(const std::filesystem::path& path);
void write_trace(std::ostream& out, std::span<const TraceRecord> records);

struct SyntheticSpec {
  std::uint64_t request_count = 100'000;
  double zipf_exponent = 1.2;
  std::uint64_t working_set_rows = 4096;
  double read_fraction = 0.7;
  double mean_gap = 20.0;  // geometric inter-request gap
  std::uint64_t seed = 1;
  // Row id of popularity rank 1; rank k lands on row first_row + k - 1.
  std::uint64_t first_row = 0;
  std::uint32_t columns_per_row = 128;

  void validate() const;

  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

// Zipf(s) over ranks 1..n by inverse CDF, driven by a 64-bit Mersenne
// Twister so sequences are identical across standard libraries.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double exponent);

  // Rank in [1, n] for a uniform u in [0, 1).
  std::uint64_t rank(double u) const noexcept;
  // P(rank <= k).
  double cdf(std::uint64_t k) const noexcept;

 private:
  std::vector<double> cdf_;
};

std::vector<TraceRecord> generate_synthetic(const SyntheticSpec& spec);

}  // namespace tldram
