#include "mellinridge/model.hpp"

#include "mellinridge/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

namespace mellinridge {

DensitySpec::DensitySpec(DensityId id, Role role)
  : id_(id)
  , role_(role)
{
  const Role expected = is_noise(id) ? Role::error : Role::target;
  if (role != expected)
    fail(ErrorCode::invalid_argument,
         std::string(to_string(id)) + " cannot act as " +
           (role == Role::error ? "an error" : "a target") + " density");
}

DensitySpec
DensitySpec::of(DensityId id)
{
  return { id, is_noise(id) ? Role::error : Role::target };
}

namespace {

std::uint64_t
splitmix64(std::uint64_t z)
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

std::uint64_t
hash_combine(std::uint64_t a, std::uint64_t b)
{
  const std::uint64_t hb = splitmix64(b);
  return splitmix64(a ^ ((hb << 17) | (hb >> 47)));
}

RngStream
RngStream::substream(std::uint64_t tag) const
{
  return { seed, hash_combine(stream_id, tag) };
}

std::mt19937_64
RngStream::engine() const
{
  std::seed_seq seq{ static_cast<std::uint32_t>(seed),
                     static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(stream_id),
                     static_cast<std::uint32_t>(stream_id >> 32) };
  return std::mt19937_64(seq);
}

double
density_eval(DensitySpec spec, double x)
{
  if (!(x > 0.0) || !std::isfinite(x))
    fail(ErrorCode::invalid_argument, "density_eval: x must be positive");
  switch (spec.id()) {
    case DensityId::beta25:
      return x < 1.0 ? 30.0 * x * std::pow(1.0 - x, 4) : 0.0;
    case DensityId::loggamma: {
      if (x <= 1.0)
        return 0.0;
      const double l = std::log(x);
      return 3125.0 / 24.0 * std::pow(x, -6.0) * l * l * l * l;
    }
    case DensityId::gamma5:
      return std::pow(x, 4) * std::exp(-x) / 24.0;
    case DensityId::lognormal: {
      const double l = std::log(x);
      return std::exp(-l * l / 0.08) / std::sqrt(0.08 * std::numbers::pi * x * x);
    }
    case DensityId::noise_uniform:
      return (x > 0.5 && x < 1.5) ? 1.0 : 0.0;
    case DensityId::noise_beta:
      return x < 1.0 ? 2.0 * x : 0.0;
  }
  return 0.0;
}

std::vector<double>
sample(DensitySpec spec, std::size_t n, const RngStream& rng)
{
  if (n == 0)
    fail(ErrorCode::invalid_argument, "sample: n must be at least 1");
  auto eng = rng.engine();
  std::vector<double> out(n);
  switch (spec.id()) {
    case DensityId::beta25: {
      std::gamma_distribution<double> a(2.0, 1.0), b(5.0, 1.0);
      for (auto& v : out) {
        const double ga = a(eng);
        v = ga / (ga + b(eng));
      }
      break;
    }
    case DensityId::loggamma: {
      // exp of a Gamma(shape 5, rate 5) variable has exactly this density
      std::gamma_distribution<double> g(5.0, 0.2);
      for (auto& v : out)
        v = std::exp(g(eng));
      break;
    }
    case DensityId::gamma5: {
      std::gamma_distribution<double> g(5.0, 1.0);
      for (auto& v : out)
        v = g(eng);
      break;
    }
    case DensityId::lognormal: {
      std::normal_distribution<double> z(0.0, 0.2);
      for (auto& v : out)
        v = std::exp(z(eng));
      break;
    }
    case DensityId::noise_uniform: {
      std::uniform_real_distribution<double> u(0.5, 1.5);
      for (auto& v : out)
        v = u(eng);
      break;
    }
    case DensityId::noise_beta: {
      // inverse CDF of 2x on (0,1); 1 - u keeps the draw away from 0
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (auto& v : out)
        v = std::sqrt(1.0 - u(eng));
      break;
    }
  }
  return out;
}

std::vector<double>
contaminate(std::span<const double> x_sample, std::span<const double> u)
{
  if (x_sample.size() != u.size())
    fail(ErrorCode::invalid_argument, "contaminate: length mismatch");
  std::vector<double> y(x_sample.size());
  for (std::size_t j = 0; j < y.size(); ++j)
    y[j] = x_sample[j] * u[j];
  return y;
}

std::vector<double>
contaminate(std::span<const double> x_sample, DensitySpec error_spec,
            const RngStream& rng)
{
  if (error_spec.role() != Role::error)
    fail(ErrorCode::invalid_argument, "contaminate: spec is not an error density");
  if (x_sample.empty())
    return {};
  const auto u = sample(error_spec, x_sample.size(), rng);
  return contaminate(x_sample, u);
}

namespace {

std::string_view
trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

} // namespace

std::vector<double>
read_sample_csv(std::istream& in)
{
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<double> y;
  while (std::getline(in, line)) {
    ++line_no;
    const auto field = trim(line);
    if (field.empty())
      continue;
    if (!header_seen) {
      if (field != "y")
        fail(ErrorCode::parse, "sample CSV line " + std::to_string(line_no) +
                                 ": expected header \"y\"");
      header_seen = true;
      continue;
    }
    double v = 0.0;
    const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
      fail(ErrorCode::parse, "sample CSV line " + std::to_string(line_no) +
                               ": cannot parse '" + std::string(field) + "'");
    if (!(v > 0.0) || !std::isfinite(v))
      fail(ErrorCode::parse, "sample CSV line " + std::to_string(line_no) +
                               ": value " + std::string(field) +
                               " is not a positive number");
    y.push_back(v);
  }
  if (!header_seen)
    fail(ErrorCode::parse, "sample CSV is empty");
  if (y.empty())
    fail(ErrorCode::parse, "sample CSV has no data rows");
  return y;
}

std::vector<double>
read_sample_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    fail(ErrorCode::io, "cannot open " + path.string());
  return read_sample_csv(in);
}

void
write_sample_csv(std::ostream& out, std::span<const double> y)
{
  out << "y\n";
  char buf[64];
  for (double v : y) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, res.ptr - buf);
    out.put('\n');
  }
}

void
write_sample_csv(const std::filesystem::path& path, std::span<const double> y)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    fail(ErrorCode::io, "cannot write " + path.string());
  write_sample_csv(out, y);
  if (!out)
    fail(ErrorCode::io, "write failed for " + path.string());
}

} // namespace mellinridge
