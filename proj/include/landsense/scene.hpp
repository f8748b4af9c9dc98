#pragma once

#include "category.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace landsense {

/// Fixed UE antenna height above ground.
inline constexpr double kUeHeightM = 1.5;

/// Default raster resolution.
inline constexpr double kDefaultCellM = 5.0;

struct SceneSpec {
	double side_m = 1000.0;
	double cell_m = kDefaultCellM;
	/// Target area fraction per category. Whatever is left over becomes Other.
	std::map<Category, double> category_mix;
	std::uint64_t seed = 0;
};

/// Rasterized landscape over a square region. Immutable once constructed.
///
/// Cell (ix, iy) covers [ix * cell_m, (ix + 1) * cell_m) x [iy * cell_m, (iy + 1) * cell_m)
/// and is stored row-major at iy * cells_per_side + ix.
class SceneMap {
public:
	SceneMap(double side_m, double cell_m, std::uint64_t seed, std::vector<Category> grid,
	         std::vector<double> building_height_m)
	    : side_m_(side_m), cell_m_(cell_m), n_(checked_cells_per_side(side_m, cell_m)), seed_(seed),
	      grid_(std::move(grid)), height_(std::move(building_height_m))
	{
		const std::size_t total = n_ * n_;
		if (grid_.size() != total || height_.size() != total)
			throw Error(ErrorKind::invalid_spec, "grid size does not match side_m / cell_m");
		for (std::size_t i = 0; i < total; ++i) {
			if (!is_registered(code_of(grid_[i])))
				throw Error(ErrorKind::invalid_spec, "unregistered category in grid");
			const bool building = grid_[i] == Category::Building;
			if (building != (height_[i] > 0.0))
				throw Error(ErrorKind::invalid_spec, "building height must be positive exactly on building cells");
		}
	}

	double side_m() const noexcept { return side_m_; }
	double cell_m() const noexcept { return cell_m_; }
	std::size_t cells_per_side() const noexcept { return n_; }
	std::size_t cell_count() const noexcept { return n_ * n_; }
	std::uint64_t seed() const noexcept { return seed_; }

	Category at(std::size_t ix, std::size_t iy) const { return grid_[iy * n_ + ix]; }
	double height_at(std::size_t ix, std::size_t iy) const { return height_[iy * n_ + ix]; }

	const std::vector<Category>& grid() const noexcept { return grid_; }
	const std::vector<double>& building_heights() const noexcept { return height_; }

	bool contains(Vec2 p) const noexcept { return p.x >= 0.0 && p.y >= 0.0 && p.x < side_m_ && p.y < side_m_; }

	/// Cell index containing p. Throws out-of-bounds outside the half-open footprint.
	std::pair<std::size_t, std::size_t> cell_of(Vec2 p) const
	{
		if (!contains(p))
			throw Error(ErrorKind::out_of_bounds, "position outside scene footprint");
		const auto clamp = [this](double v) {
			return std::min(static_cast<std::size_t>(std::floor(v / cell_m_)), n_ - 1);
		};
		return {clamp(p.x), clamp(p.y)};
	}

	friend bool operator==(const SceneMap&, const SceneMap&) = default;

private:
	static std::size_t checked_cells_per_side(double side_m, double cell_m)
	{
		if (!(side_m > 0.0) || !(cell_m > 0.0))
			throw Error(ErrorKind::invalid_spec, "side_m and cell_m must be positive");
		const double ratio = side_m / cell_m;
		const double n = std::round(ratio);
		if (n < 1.0 || std::fabs(ratio - n) > 1e-9 * ratio)
			throw Error(ErrorKind::invalid_spec, "side_m must be an integer multiple of cell_m");
		return static_cast<std::size_t>(n);
	}

	double side_m_;
	double cell_m_;
	std::size_t n_;
	std::uint64_t seed_;
	std::vector<Category> grid_;
	std::vector<double> height_;
};

inline Category category_at(const SceneMap& scene, Vec2 position)
{
	const auto [ix, iy] = scene.cell_of(position);
	return scene.at(ix, iy);
}

inline std::map<Category, std::size_t> category_counts(const SceneMap& scene)
{
	std::map<Category, std::size_t> counts;
	for (Category c : scene.grid())
		++counts[c];
	return counts;
}

/// Realized area fraction per category (exact cell counts over total cells).
inline std::map<Category, double> category_fractions(const SceneMap& scene)
{
	std::map<Category, double> fractions;
	const double total = static_cast<double>(scene.cell_count());
	for (const auto& [c, n] : category_counts(scene))
		fractions[c] = static_cast<double>(n) / total;
	return fractions;
}

namespace detail {

class SceneBuilder {
public:
	SceneBuilder(std::size_t n, double cell_m, Rng& rng)
	    : n_(n), cell_m_(cell_m), rng_(rng), assigned_(n * n, false), grid_(n * n, Category::Other),
	      height_(n * n, 0.0)
	{
	}

	std::size_t total() const { return n_ * n_; }
	std::size_t assigned() const { return assigned_count_; }

	// Axis-aligned street lanes spanning the whole region. Orientations alternate, so every
	// horizontal lane meets every vertical one and the network stays connected.
	void add_streets(std::size_t target)
	{
		if (target == 0)
			return;
		const std::size_t lane = std::clamp<std::size_t>(
		    static_cast<std::size_t>(std::lround(15.0 / cell_m_)), 1, n_);
		std::vector<bool> row_used(n_, false), col_used(n_, false);
		bool horizontal = rng_.uniform() < 0.5;
		std::size_t count = 0;
		int stalled = 0;
		while (count < target && stalled < 2) {
			auto& used = horizontal ? row_used : col_used;
			const auto offset = pick_lane_offset(used, lane);
			if (!offset) {
				++stalled;
				horizontal = !horizontal;
				continue;
			}
			stalled = 0;
			// Narrow the last lane if the full width would land further from the target.
			std::size_t width = std::min(lane, n_ - *offset);
			std::size_t best_width = 0;
			std::size_t best_error = target - count;
			for (std::size_t w = width; w >= 1; --w) {
				const std::size_t after = count + lane_gain(horizontal, *offset, w);
				const std::size_t err = after > target ? after - target : target - after;
				if (err < best_error) {
					best_error = err;
					best_width = w;
				}
			}
			if (best_width == 0)
				break;
			for (std::size_t k = 0; k < best_width; ++k) {
				const std::size_t line = *offset + k;
				used[line] = true;
				for (std::size_t j = 0; j < n_; ++j) {
					const std::size_t idx = horizontal ? line * n_ + j : j * n_ + line;
					if (!assigned_[idx]) {
						assign(idx, Category::Street, 0.0);
						++count;
					}
				}
			}
			horizontal = !horizontal;
		}
	}

	// Rectangular blocks (20-60 m sides) clipped against already-assigned cells.
	void add_buildings(std::size_t target)
	{
		std::size_t count = 0;
		const auto side_cells = [this](double meters) {
			return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(meters / cell_m_)));
		};
		const std::size_t lo = side_cells(20.0), hi = std::max(lo, side_cells(60.0));
		int idle = 0;
		while (count < target && idle < 2000) {
			const std::size_t w = std::min(n_, lo + rng_.index(hi - lo + 1));
			const std::size_t h = std::min(n_, lo + rng_.index(hi - lo + 1));
			const std::size_t x0 = rng_.index(n_ - w + 1);
			const std::size_t y0 = rng_.index(n_ - h + 1);
			const double height = std::round(rng_.uniform(8.0, 40.0) * 10.0) / 10.0;
			std::size_t added = 0;
			for (std::size_t y = y0; y < y0 + h && count < target; ++y)
				for (std::size_t x = x0; x < x0 + w && count < target; ++x) {
					const std::size_t idx = y * n_ + x;
					if (!assigned_[idx]) {
						assign(idx, Category::Building, height);
						++count;
						++added;
					}
				}
			idle = added == 0 ? idle + 1 : 0;
		}
		// Nearly full region: take whatever is left in scan order.
		for (std::size_t idx = 0; idx < total() && count < target; ++idx)
			if (!assigned_[idx]) {
				assign(idx, Category::Building, std::round(rng_.uniform(8.0, 40.0) * 10.0) / 10.0);
				++count;
			}
	}

	// Irregular patches grown from random seeds over unassigned cells.
	void add_blobs(Category category, std::size_t target)
	{
		std::size_t count = 0;
		const double cell_area = cell_m_ * cell_m_;
		std::vector<std::size_t> frontier;
		while (count < target) {
			const auto free_cell = random_unassigned();
			if (!free_cell)
				break;
			const std::size_t blob = std::max<std::size_t>(
			    1, static_cast<std::size_t>(rng_.uniform(1000.0, 12000.0) / cell_area));
			std::size_t grown = 0;
			frontier.assign(1, *free_cell);
			while (!frontier.empty() && grown < blob && count < target) {
				const std::size_t pick = rng_.index(frontier.size());
				const std::size_t idx = frontier[pick];
				frontier[pick] = frontier.back();
				frontier.pop_back();
				if (assigned_[idx])
					continue;
				assign(idx, category, 0.0);
				++grown;
				++count;
				const std::size_t x = idx % n_, y = idx / n_;
				if (x > 0) frontier.push_back(idx - 1);
				if (x + 1 < n_) frontier.push_back(idx + 1);
				if (y > 0) frontier.push_back(idx - n_);
				if (y + 1 < n_) frontier.push_back(idx + n_);
			}
		}
	}

	std::vector<Category> take_grid() { return std::move(grid_); }
	std::vector<double> take_heights() { return std::move(height_); }

private:
	void assign(std::size_t idx, Category c, double height)
	{
		assigned_[idx] = true;
		grid_[idx] = c;
		height_[idx] = height;
		++assigned_count_;
	}

	std::size_t lane_gain(bool horizontal, std::size_t offset, std::size_t width) const
	{
		std::size_t gain = 0;
		for (std::size_t k = 0; k < width; ++k)
			for (std::size_t j = 0; j < n_; ++j) {
				const std::size_t line = offset + k;
				gain += !assigned_[horizontal ? line * n_ + j : j * n_ + line];
			}
		return gain;
	}

	// Prefers offsets keeping a lane-width gap to parallel lanes; otherwise any offset that
	// still covers an unused line.
	std::optional<std::size_t> pick_lane_offset(const std::vector<bool>& used, std::size_t lane)
	{
		std::vector<std::size_t> spaced, fallback;
		for (std::size_t p = 0; p + lane <= n_; ++p) {
			bool any_unused = false;
			for (std::size_t k = 0; k < lane; ++k)
				any_unused = any_unused || !used[p + k];
			if (!any_unused)
				continue;
			fallback.push_back(p);
			const std::size_t lo = p >= lane ? p - lane : 0;
			const std::size_t hi = std::min(n_, p + 2 * lane);
			bool clear = true;
			for (std::size_t q = lo; q < hi && clear; ++q)
				clear = !used[q];
			if (clear)
				spaced.push_back(p);
		}
		const auto& pool = spaced.empty() ? fallback : spaced;
		if (pool.empty())
			return std::nullopt;
		return pool[rng_.index(pool.size())];
	}

	std::optional<std::size_t> random_unassigned()
	{
		if (assigned_count_ == total())
			return std::nullopt;
		for (int attempt = 0; attempt < 64; ++attempt) {
			const std::size_t idx = rng_.index(total());
			if (!assigned_[idx])
				return idx;
		}
		const std::size_t start = rng_.index(total());
		for (std::size_t k = 0; k < total(); ++k) {
			const std::size_t idx = (start + k) % total();
			if (!assigned_[idx])
				return idx;
		}
		return std::nullopt;
	}

	std::size_t n_;
	double cell_m_;
	Rng& rng_;
	std::vector<bool> assigned_;
	std::vector<Category> grid_;
	std::vector<double> height_;
	std::size_t assigned_count_ = 0;
};

} // namespace detail

/// Procedural landscape: street lanes first, then building blocks, forest patches and barren
/// patches; leftover cells are Other. Deterministic in (spec, seed).
inline SceneMap generate_scene(const SceneSpec& spec)
{
	double sum = 0.0;
	for (const auto& [c, fraction] : spec.category_mix) {
		if (!(fraction >= 0.0))
			throw Error(ErrorKind::invalid_spec, "category fractions must be nonnegative");
		sum += fraction;
	}
	if (sum > 1.0 + 1e-9)
		throw Error(ErrorKind::invalid_spec, "category fractions sum to more than 1");

	const double ratio = spec.side_m / spec.cell_m;
	const double rounded = std::round(ratio);
	if (!(spec.cell_m > 0.0) || rounded < 1.0 || std::fabs(ratio - rounded) > 1e-9 * ratio)
		throw Error(ErrorKind::invalid_spec, "side_m must be an integer multiple of cell_m");
	const auto n = static_cast<std::size_t>(rounded);

	const auto target_of = [&](Category c) -> std::size_t {
		const auto it = spec.category_mix.find(c);
		if (it == spec.category_mix.end())
			return 0;
		return static_cast<std::size_t>(std::llround(it->second * static_cast<double>(n * n)));
	};

	Rng rng(spec.seed);
	detail::SceneBuilder builder(n, spec.cell_m, rng);
	builder.add_streets(target_of(Category::Street));
	builder.add_buildings(target_of(Category::Building));
	builder.add_blobs(Category::Forest, target_of(Category::Forest));
	builder.add_blobs(Category::Barren, target_of(Category::Barren));
	return SceneMap(spec.side_m, spec.cell_m, spec.seed, builder.take_grid(), builder.take_heights());
}

// ---------------------------------------------------------------------------------------
// Base stations

struct BaseStation {
	int id = 1;
	Vec3 position;
	double frequency_hz = 0.0;
	/// Boresight, degrees counter-clockwise from +x. Empty for omnidirectional stations.
	std::optional<double> sector_azimuth_deg;

	friend bool operator==(const BaseStation&, const BaseStation&) = default;
};

struct Deployment {
	std::string layer_name;
	std::vector<BaseStation> stations;

	std::size_t K() const noexcept { return stations.size(); }
	double frequency_hz() const { return stations.empty() ? 0.0 : stations.front().frequency_hz; }

	friend bool operator==(const Deployment&, const Deployment&) = default;
};

struct DeploymentPreset {
	std::string layer_name;
	/// Station count for omni layers, site count for sectored layers.
	std::size_t k_or_sites = 1;
	double frequency_hz = 8.0e8;
	bool sectored = false;
	std::uint64_t seed = 0;
};

inline DeploymentPreset london_low_preset(std::uint64_t seed = 0)
{
	return {"london-low", 20, 8.0e8, false, seed};
}

inline DeploymentPreset london_high_preset(std::uint64_t seed = 0)
{
	return {"london-high", 18, 5.0e9, true, seed};
}

inline DeploymentPreset preset_by_name(const std::string& name, std::uint64_t seed)
{
	if (name == "london-low")
		return london_low_preset(seed);
	if (name == "london-high")
		return london_high_preset(seed);
	throw Error(ErrorKind::invalid_spec, "unknown deployment preset '" + name + "'");
}

inline constexpr double kRooftopClearanceM = 3.0;
inline constexpr double kMastHeightM = 25.0;
inline constexpr std::size_t kSectorsPerSite = 3;

/// Sites on a jittered rows x cols grid, one per distinct raster cell. Rooftop sites sit
/// kRooftopClearanceM above the building; ground sites use a kMastHeightM mast.
inline Deployment deploy_basestations(const SceneMap& scene, const DeploymentPreset& preset)
{
	const std::size_t sites = preset.k_or_sites;
	if (sites < 1)
		throw Error(ErrorKind::invalid_spec, "deployment needs at least one site");
	if (!(preset.frequency_hz > 0.0))
		throw Error(ErrorKind::invalid_spec, "frequency must be positive");
	if (sites > scene.cell_count())
		throw Error(ErrorKind::placement_failure, "more sites than placeable cells");

	// Most square factorization rows x cols >= sites.
	std::size_t rows = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(sites))));
	while (rows > 1 && sites % rows != 0 && 2 * rows * rows > sites)
		--rows;
	if (sites % rows != 0)
		rows = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(sites))));
	rows = std::max<std::size_t>(rows, 1);
	const std::size_t cols = (sites + rows - 1) / rows;

	Rng rng(preset.seed, 0xd3b1);
	const double side = scene.side_m();
	const double dx = side / static_cast<double>(cols);
	const double dy = side / static_cast<double>(rows);
	const std::size_t n = scene.cells_per_side();
	std::vector<bool> taken(scene.cell_count(), false);

	const auto clamp_inside = [side](double v) { return std::clamp(v, 0.0, std::nextafter(side, 0.0)); };

	Deployment out;
	out.layer_name = preset.layer_name;
	int next_id = 1;
	for (std::size_t s = 0; s < sites; ++s) {
		const double cx = (static_cast<double>(s % cols) + 0.5) * dx;
		const double cy = (static_cast<double>(s / cols) + 0.5) * dy;
		std::optional<Vec2> spot;
		for (int attempt = 0; attempt < 100 && !spot; ++attempt) {
			const Vec2 p{clamp_inside(cx + rng.uniform(-0.3, 0.3) * dx), clamp_inside(cy + rng.uniform(-0.3, 0.3) * dy)};
			const auto [ix, iy] = scene.cell_of(p);
			if (!taken[iy * n + ix])
				spot = p;
		}
		if (!spot) {
			// Nearest free cell centre to the nominal slot.
			double best = std::numeric_limits<double>::infinity();
			for (std::size_t idx = 0; idx < taken.size(); ++idx) {
				if (taken[idx])
					continue;
				const Vec2 c{(static_cast<double>(idx % n) + 0.5) * scene.cell_m(),
				             (static_cast<double>(idx / n) + 0.5) * scene.cell_m()};
				const double d = distance(c, Vec2{cx, cy});
				if (d < best) {
					best = d;
					spot = c;
				}
			}
			if (!spot)
				throw Error(ErrorKind::placement_failure, "no free cell left for site");
		}
		const auto [ix, iy] = scene.cell_of(*spot);
		taken[iy * n + ix] = true;
		const double z = scene.at(ix, iy) == Category::Building ? scene.height_at(ix, iy) + kRooftopClearanceM
		                                                         : kMastHeightM;
		const Vec3 position{spot->x, spot->y, z};
		if (preset.sectored) {
			for (std::size_t k = 0; k < kSectorsPerSite; ++k)
				out.stations.push_back({next_id++, position, preset.frequency_hz, 120.0 * static_cast<double>(k)});
		} else {
			out.stations.push_back({next_id++, position, preset.frequency_hz, std::nullopt});
		}
	}
	return out;
}

// ---------------------------------------------------------------------------------------
// UE drops

struct UEDrop {
	Vec2 position;
	Category true_category = Category::Other;

	friend bool operator==(const UEDrop&, const UEDrop&) = default;
};

/// Uniform drops over the footprint, or (when `stratify` is set) an equal share per listed
/// category, uniform within that category's cells. An empty stratify list means every
/// category present in the scene. Drop i only depends on (seed, i).
inline std::vector<UEDrop> sample_ue_drops(const SceneMap& scene, std::size_t count, std::uint64_t seed,
                                           const std::optional<std::vector<Category>>& stratify = std::nullopt)
{
	if (count < 1)
		throw Error(ErrorKind::invalid_input, "drop count must be at least 1");
	std::vector<UEDrop> drops;
	drops.reserve(count);
	const double side = scene.side_m();

	if (!stratify) {
		for (std::size_t i = 0; i < count; ++i) {
			Rng rng(seed, i);
			const Vec2 p{rng.uniform() * side, rng.uniform() * side};
			drops.push_back({p, category_at(scene, p)});
		}
		return drops;
	}

	std::map<Category, std::vector<std::size_t>> cells;
	for (std::size_t idx = 0; idx < scene.cell_count(); ++idx)
		cells[scene.grid()[idx]].push_back(idx);

	std::vector<Category> wanted = *stratify;
	if (wanted.empty())
		for (const auto& [c, list] : cells)
			wanted.push_back(c);
	std::ranges::sort(wanted);
	wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
	for (Category c : wanted)
		if (!cells.contains(c))
			throw Error(ErrorKind::missing_category,
			            "category '" + std::string(name_of(c)) + "' does not occur in the scene");

	const std::size_t n = scene.cells_per_side();
	const double cell = scene.cell_m();
	const std::size_t share = count / wanted.size();
	const std::size_t extra = count % wanted.size();
	std::size_t i = 0;
	for (std::size_t k = 0; k < wanted.size(); ++k) {
		const auto& pool = cells.at(wanted[k]);
		const std::size_t quota = share + (k < extra ? 1 : 0);
		for (std::size_t j = 0; j < quota; ++j, ++i) {
			Rng rng(seed, i);
			const std::size_t idx = pool[rng.index(pool.size())];
			const double ix = static_cast<double>(idx % n), iy = static_cast<double>(idx / n);
			Vec2 p{(ix + rng.uniform()) * cell, (iy + rng.uniform()) * cell};
			if (scene.cell_of(p) != std::pair{idx % n, idx / n})
				p = {(ix + 0.5) * cell, (iy + 0.5) * cell};
			drops.push_back({p, wanted[k]});
		}
	}
	return drops;
}

} // namespace landsense
