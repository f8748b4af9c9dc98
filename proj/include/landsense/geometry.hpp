#pragma once

#include <cmath>

namespace landsense {

struct Vec2 {
	double x = 0.0;
	double y = 0.0;

	friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
	double x = 0.0;
	double y = 0.0;
	double z = 0.0;

	Vec2 xy() const noexcept { return {x, y}; }
	friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance(Vec2 a, Vec2 b) noexcept { return std::hypot(b.x - a.x, b.y - a.y); }

inline double distance(Vec3 a, Vec3 b) noexcept
{
	const double dx = b.x - a.x;
	const double dy = b.y - a.y;
	const double dz = b.z - a.z;
	return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Smallest absolute difference between two bearings, in [0, 180].
inline double angle_between_deg(double a, double b) noexcept
{
	double d = std::fmod(std::fabs(a - b), 360.0);
	return d > 180.0 ? 360.0 - d : d;
}

} // namespace landsense
