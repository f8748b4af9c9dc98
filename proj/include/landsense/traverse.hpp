#pragma once

#include "category.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace landsense {

struct CellChord {
	Category category;
	double length_m;

	friend bool operator==(const CellChord&, const CellChord&) = default;
};

/// Exact 2-D grid traversal (Amanatides-Woo) of the segment a -> b. Calls
/// visit(ix, iy, chord_length_m) for each cell the segment passes through with positive length,
/// in order from a to b. Endpoints may lie on the far boundary (x == side_m).
template <typename Visitor>
void traverse_cells(const SceneMap& scene, Vec2 a, Vec2 b, Visitor&& visit)
{
	const double side = scene.side_m();
	const auto inside = [side](Vec2 p) { return p.x >= 0.0 && p.y >= 0.0 && p.x <= side && p.y <= side; };
	if (!inside(a) || !inside(b))
		throw Error(ErrorKind::out_of_bounds, "segment endpoint outside scene footprint");

	const double length = distance(a, b);
	if (length == 0.0)
		return;

	const double cell = scene.cell_m();
	const auto last = static_cast<long>(scene.cells_per_side()) - 1;
	const auto to_index = [&](double v) { return std::clamp(static_cast<long>(std::floor(v / cell)), 0L, last); };

	const double dx = b.x - a.x;
	const double dy = b.y - a.y;
	long ix = to_index(a.x);
	long iy = to_index(a.y);
	const long step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
	const long step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);

	constexpr double inf = std::numeric_limits<double>::infinity();
	// Parametric position (t in [0, 1]) of the next vertical / horizontal cell boundary.
	const auto first_crossing = [&](double origin, double delta, long index, long step) {
		if (step == 0)
			return inf;
		const double boundary = static_cast<double>(step > 0 ? index + 1 : index) * cell;
		return (boundary - origin) / delta;
	};
	double t_max_x = first_crossing(a.x, dx, ix, step_x);
	double t_max_y = first_crossing(a.y, dy, iy, step_y);
	const double t_delta_x = step_x != 0 ? cell / std::fabs(dx) : inf;
	const double t_delta_y = step_y != 0 ? cell / std::fabs(dy) : inf;

	double t = 0.0;
	while (t < 1.0) {
		const double t_next = std::min({t_max_x, t_max_y, 1.0});
		if (t_next > t)
			visit(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy), (t_next - t) * length);
		t = t_next;
		if (t >= 1.0)
			break;
		const bool cross_x = t_max_x <= t_next;
		const bool cross_y = t_max_y <= t_next;
		if (cross_x) {
			ix += step_x;
			t_max_x += t_delta_x;
		}
		if (cross_y) {
			iy += step_y;
			t_max_y += t_delta_y;
		}
		// Rounding can step past the raster edge just before t reaches 1; stay on the edge cell.
		if (ix < 0 || ix > last) {
			ix = std::clamp(ix, 0L, last);
			t_max_x = inf;
		}
		if (iy < 0 || iy > last) {
			iy = std::clamp(iy, 0L, last);
			t_max_y = inf;
		}
	}
}

/// Ordered (category, chord length) list for the cells crossed by a -> b.
inline std::vector<CellChord> raster_traverse(const SceneMap& scene, Vec2 a, Vec2 b)
{
	std::vector<CellChord> chords;
	traverse_cells(scene, a, b, [&](std::size_t ix, std::size_t iy, double len) {
		chords.push_back({scene.at(ix, iy), len});
	});
	return chords;
}

} // namespace landsense
