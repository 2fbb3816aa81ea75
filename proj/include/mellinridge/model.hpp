#pragma once

#include "mellinridge/mellin.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace mellinridge {

enum class Role
{
  target,
  error,
};

//! A catalog density together with its role in the model Y = X U.
class DensitySpec
{
public:
  //! Throws ErrorCode::invalid_argument when the role does not match the id
  //! (noise_* densities are errors, the rest are targets).
  DensitySpec(DensityId id, Role role);

  //! Spec with the role implied by the id.
  static DensitySpec of(DensityId id);

  DensityId id() const { return id_; }
  Role role() const { return role_; }

private:
  DensityId id_;
  Role role_;
};

//! Reproducible random stream addressed by (seed, stream_id).
struct RngStream
{
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  //! Independent child stream; identical tags give identical children.
  RngStream substream(std::uint64_t tag) const;

  //! Fresh engine positioned at the start of this stream.
  std::mt19937_64 engine() const;
};

//! Mixes two 64-bit words (splitmix64 finaliser over a rotate-xor).
std::uint64_t
hash_combine(std::uint64_t a, std::uint64_t b);

//! Exact density value; zero outside the support. Throws for x <= 0.
double
density_eval(DensitySpec spec, double x);

//! n independent draws. Throws for n = 0.
std::vector<double>
sample(DensitySpec spec, std::size_t n, const RngStream& rng);

//! Elementwise Y_j = X_j U_j for given error draws.
std::vector<double>
contaminate(std::span<const double> x_sample, std::span<const double> u);

//! Y_j = X_j U_j with U drawn fresh from `error_spec`.
std::vector<double>
contaminate(std::span<const double> x_sample, DensitySpec error_spec,
            const RngStream& rng);

//! Single-column CSV with header "y" and one positive decimal per row.
//! Parse errors name the offending line.
std::vector<double>
read_sample_csv(std::istream& in);

std::vector<double>
read_sample_csv(const std::filesystem::path& path);

void
write_sample_csv(std::ostream& out, std::span<const double> y);

void
write_sample_csv(const std::filesystem::path& path, std::span<const double> y);

} // namespace mellinridge
