#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <utility>

namespace landsense {

/// SplitMix64 finalizer. Used to turn (seed, index) pairs into independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
	return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Deterministic random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the standard. The
/// distributions are written out here because the std:: distribution algorithms are
/// implementation-defined, and artifacts must be byte-identical across toolchains.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
	Rng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

	std::uint64_t next_u64() { return engine_(); }

	/// Uniform on [0, 1) with 53 random bits.
	double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

	/// Uniform integer in [0, n). Rejection sampling, no modulo bias.
	std::uint64_t index(std::uint64_t n)
	{
		if (n <= 1)
			return 0;
		const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
		                            std::numeric_limits<std::uint64_t>::max() % n;
		std::uint64_t x;
		do {
			x = engine_();
		} while (x >= limit);
		return x % n;
	}

	/// Standard normal via Box-Muller; the second variate of each pair is cached.
	double normal()
	{
		if (has_spare_) {
			has_spare_ = false;
			return spare_;
		}
		double u1;
		do {
			u1 = uniform();
		} while (u1 <= 0.0);
		const double u2 = uniform();
		const double r = std::sqrt(-2.0 * std::log(u1));
		const double theta = 2.0 * std::numbers::pi * u2;
		spare_ = r * std::sin(theta);
		has_spare_ = true;
		return r * std::cos(theta);
	}

	double normal(double mean, double sigma) { return mean + sigma * normal(); }

	template <typename T>
	void shuffle(std::span<T> items)
	{
		for (std::size_t i = items.size(); i > 1; --i)
			std::swap(items[i - 1], items[index(i)]);
	}

private:
	std::mt19937_64 engine_;
	double spare_ = 0.0;
	bool has_spare_ = false;
};

} // namespace landsense
