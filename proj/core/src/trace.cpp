#include "tldram/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <zlib.h>

#include "tldram/error.hpp"

namespace tldram {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

// Returns false for blank/comment lines.
bool parse_line(std::string_view line, std::size_t number, TraceRecord& out) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  line = trim(line);
  if (line.empty()) return false;

  std::string_view fields[3];
  std::size_t n = 0;
  while (true) {
    const auto comma = line.find(',');
    if (n == 3) throw TraceParseError("expected 3 fields", number);
    fields[n++] = trim(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  if (n != 3) throw TraceParseError("expected 3 fields", number);

  const auto gap = fields[0];
  auto [gp, gec] = std::from_chars(gap.data(), gap.data() + gap.size(), out.gap);
  if (gec != std::errc{} || gp != gap.data() + gap.size()) {
    throw TraceParseError("malformed gap '" + std::string(gap) + "'", number);
  }

  if (fields[1] == "R" || fields[1] == "r") {
    out.kind = RequestKind::read;
  } else if (fields[1] == "W" || fields[1] == "w") {
    out.kind = RequestKind::write;
  } else {
    throw TraceParseError("unknown request kind '" + std::string(fields[1]) + "'", number);
  }

  auto addr = fields[2];
  if (addr.size() > 2 && addr[0] == '0' && (addr[1] == 'x' || addr[1] == 'X')) addr.remove_prefix(2);
  auto [ap, aec] = std::from_chars(addr.data(), addr.data() + addr.size(), out.address, 16);
  if (addr.empty() || aec != std::errc{} || ap != addr.data() + addr.size()) {
    throw TraceParseError("malformed address '" + std::string(fields[2]) + "'", number);
  }
  return true;
}

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    TraceRecord r;
    if (parse_line(line, number, r)) out.push_back(r);
  }
  if (in.bad()) throw Error("trace read failed at line " + std::to_string(number));
  return out;
}

std::vector<TraceRecord> parse_trace_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

std::vector<TraceRecord> read_trace_file(const std::filesystem::path& path) {
  // gzread passes uncompressed files through unchanged.
  std::unique_ptr<gzFile_s, GzCloser> f(gzopen(path.string().c_str(), "rb"));
  if (!f) throw Error("cannot open trace '" + path.string() + "'");
  std::string text;
  char buf[1 << 16];
  while (true) {
    const int n = gzread(f.get(), buf, sizeof buf);
    if (n < 0) throw Error("cannot read trace '" + path.string() + "'");
    if (n == 0) break;
    text.append(buf, static_cast<std::size_t>(n));
  }
  return parse_trace_text(text);
}

void write_trace(std::ostream& out, std::span<const TraceRecord> records) {
  char hex[32];
  for (const auto& r : records) {
    auto [end, ec] = std::to_chars(hex, hex + sizeof hex, r.address, 16);
    (void)ec;
    out << r.gap << ',' << (r.kind == RequestKind::read ? 'R' : 'W') << ",0x" << std::string_view(hex, end - hex)
        << '\n';
  }
}

void SyntheticSpec::validate() const {
  if (!(zipf_exponent >= 0.0) || !std::isfinite(zipf_exponent)) throw ParameterError("zipf_exponent must be >= 0");
  if (!(read_fraction >= 0.0 && read_fraction <= 1.0)) throw ParameterError("read_fraction must lie in [0, 1]");
  if (!(mean_gap >= 0.0) || !std::isfinite(mean_gap)) throw ParameterError("mean_gap must be >= 0");
  if (working_set_rows < 1) throw ParameterError("working_set_rows must be >= 1");
  if (columns_per_row < 1) throw ParameterError("columns_per_row must be >= 1");
}

ZipfSampler::ZipfSampler(std::uint64_t n, double exponent) {
  if (n < 1) throw ParameterError("Zipf support must be non-empty");
  if (!(exponent >= 0.0)) throw ParameterError("Zipf exponent must be >= 0");
  cdf_.resize(n);
  double sum = 0;
  for (std::uint64_t k = 1; k <= n; ++k) {
    sum += std::pow(static_cast<double>(k), -exponent);
    cdf_[k - 1] = sum;
  }
  for (auto& c : cdf_) c /= sum;
  cdf_.back() = 1.0;
}

std::uint64_t ZipfSampler::rank(double u) const noexcept {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
  return idx + 1;
}

double ZipfSampler::cdf(std::uint64_t k) const noexcept {
  if (k == 0) return 0.0;
  return cdf_[std::min<std::uint64_t>(k, cdf_.size()) - 1];
}

std::vector<TraceRecord> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const ZipfSampler zipf(spec.working_set_rows, spec.zipf_exponent);
  // Geometric gaps with the requested mean: P(gap = g) = p (1-p)^g.
  const double p = 1.0 / (spec.mean_gap + 1.0);
  const double log_q = std::log1p(-p);

  std::vector<TraceRecord> out;
  out.reserve(spec.request_count);
  for (std::uint64_t i = 0; i < spec.request_count; ++i) {
    TraceRecord r;
    if (p < 1.0) {
      const double u = 1.0 - uniform();  // (0, 1]
      r.gap = static_cast<std::uint64_t>(std::floor(std::log(u) / log_q));
    }
    r.kind = uniform() < spec.read_fraction ? RequestKind::read : RequestKind::write;
    const std::uint64_t row = spec.first_row + zipf.rank(uniform()) - 1;
    const std::uint64_t column = rng() % spec.columns_per_row;
    r.address = (row * spec.columns_per_row + column) * kLineBytes;
    out.push_back(r);
  }
  return out;
}

}  // namespace tldram
