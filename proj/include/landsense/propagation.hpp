#pragma once

#include "category.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "rng.hpp"
#include "scene.hpp"
#include "traverse.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace landsense {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Dense lookup keyed by category code.
class PerCategory {
public:
	constexpr PerCategory() = default;
	constexpr explicit PerCategory(double fill) { values_.fill(fill); }

	constexpr double operator[](Category c) const { return values_[static_cast<std::size_t>(c)]; }
	constexpr double& operator[](Category c) { return values_[static_cast<std::size_t>(c)]; }

	friend bool operator==(const PerCategory&, const PerCategory&) = default;

private:
	std::array<double, 16> values_{};
};

/// Surrogate map-based propagation model: log-distance with an exponent picked by the UE's
/// own landscape, plus per-meter excess loss for every obstructing cell on the 2-D ray.
struct PropagationParams {
	PerCategory exponent_by_category;
	PerCategory excess_db_per_m;
	double shadow_sigma_db = 4.0;
	double reference_distance_m = 1.0;
	double min_gain_db = -200.0;

	static PropagationParams defaults()
	{
		PropagationParams p;
		p.exponent_by_category = PerCategory(2.0);
		p.exponent_by_category[Category::Street] = 2.6;
		p.exponent_by_category[Category::Forest] = 3.0;
		p.exponent_by_category[Category::Building] = 3.2;
		p.excess_db_per_m[Category::Building] = 0.4;
		p.excess_db_per_m[Category::Forest] = 0.15;
		return p;
	}

	friend bool operator==(const PropagationParams&, const PropagationParams&) = default;
};

/// Free-space loss at the reference distance, 20 log10(4 pi d0 f / c), in dB.
inline double free_space_reference(double frequency_hz, double d0_m)
{
	if (!(frequency_hz > 0.0) || !(d0_m > 0.0))
		throw Error(ErrorKind::invalid_input, "frequency and reference distance must be positive");
	return 20.0 * std::log10(4.0 * std::numbers::pi * d0_m * frequency_hz / kSpeedOfLight);
}

inline void validate(const PropagationParams& p, double frequency_hz)
{
	for (const auto& info : category_registry) {
		const double n = p.exponent_by_category[info.category];
		if (!(n >= 1.6 && n <= 6.0))
			throw Error(ErrorKind::invalid_spec, "path-loss exponent out of [1.6, 6.0] for " + std::string(info.name));
		if (!(p.excess_db_per_m[info.category] >= 0.0))
			throw Error(ErrorKind::invalid_spec, "excess loss must be nonnegative");
	}
	if (!(p.shadow_sigma_db >= 0.0))
		throw Error(ErrorKind::invalid_spec, "shadow sigma must be nonnegative");
	if (!(p.reference_distance_m > 0.0))
		throw Error(ErrorKind::invalid_spec, "reference distance must be positive");
	if (!(p.min_gain_db < -free_space_reference(frequency_hz, p.reference_distance_m)))
		throw Error(ErrorKind::invalid_spec, "min_gain_db must lie below the reference-distance gain");
}

inline constexpr double kSectorHalfPowerBeamwidthDeg = 65.0;
inline constexpr double kSectorMaxAttenuationDb = 30.0;

/// Parabolic horizontal pattern; zero for omnidirectional stations.
inline double sector_loss_db(const BaseStation& station, Vec2 ue)
{
	if (!station.sector_azimuth_deg)
		return 0.0;
	const double dx = ue.x - station.position.x;
	const double dy = ue.y - station.position.y;
	if (dx == 0.0 && dy == 0.0)
		return 0.0;
	const double bearing = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
	const double off = angle_between_deg(bearing, *station.sector_azimuth_deg) / kSectorHalfPowerBeamwidthDeg;
	return std::min(12.0 * off * off, kSectorMaxAttenuationDb);
}

/// Sum over the UE -> station ray of excess loss per meter times chord length.
inline double obstruction_loss_db(const SceneMap& scene, Vec2 from, Vec2 to, const PerCategory& excess_db_per_m)
{
	double loss = 0.0;
	traverse_cells(scene, from, to, [&](std::size_t ix, std::size_t iy, double len) {
		loss += excess_db_per_m[scene.at(ix, iy)] * len;
	});
	return loss;
}

/// Gain (negative dB) from station to UE with an externally drawn shadowing sample, floored
/// at params.min_gain_db.
inline double path_gain(const SceneMap& scene, const BaseStation& station, const UEDrop& ue,
                        const PropagationParams& params, double shadow_sample_db)
{
	const Vec3 ue3{ue.position.x, ue.position.y, kUeHeightM};
	const double d0 = params.reference_distance_m;
	const double d = std::max(distance(station.position, ue3), d0);
	const double loss = free_space_reference(station.frequency_hz, d0) +
	                    10.0 * params.exponent_by_category[ue.true_category] * std::log10(d / d0) +
	                    obstruction_loss_db(scene, ue.position, station.position.xy(), params.excess_db_per_m) +
	                    sector_loss_db(station, ue.position);
	return std::max(-loss + shadow_sample_db, params.min_gain_db);
}

struct PathGainVector {
	/// gains_db[i] belongs to the station with id i + 1.
	std::vector<double> gains_db;
	UEDrop ue;
};

/// One shadowing draw per link, in station order, from the caller's per-drop stream.
inline PathGainVector path_gain_vector(const SceneMap& scene, const Deployment& deployment, const UEDrop& ue,
                                       const PropagationParams& params, Rng& rng)
{
	PathGainVector out;
	out.ue = ue;
	out.gains_db.reserve(deployment.K());
	for (const auto& station : deployment.stations) {
		const double shadow = params.shadow_sigma_db > 0.0 ? rng.normal(0.0, params.shadow_sigma_db) : 0.0;
		out.gains_db.push_back(path_gain(scene, station, ue, params, shadow));
	}
	return out;
}

} // namespace landsense
