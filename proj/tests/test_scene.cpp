#include <landsense/scene.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <queue>
#include <set>

using namespace landsense;

namespace {

SceneSpec mixed_spec(std::uint64_t seed = 1)
{
	return {1000.0, 5.0, {{Category::Street, 0.25}, {Category::Building, 0.35}, {Category::Forest, 0.2}}, seed};
}

std::map<Category, std::size_t> count_cells(const SceneMap& s)
{
	std::map<Category, std::size_t> counts;
	for (std::size_t iy = 0; iy < s.cells_per_side(); ++iy)
		for (std::size_t ix = 0; ix < s.cells_per_side(); ++ix)
			++counts[s.at(ix, iy)];
	return counts;
}

} // namespace

TEST(GenerateScene, MixedSceneHitsTargetFractions)
{
	const SceneMap s = generate_scene(mixed_spec());
	ASSERT_EQ(s.cells_per_side(), 200u);
	const auto counts = count_cells(s);
	const double total = 200.0 * 200.0;
	const double street = static_cast<double>(counts.at(Category::Street)) / total;
	EXPECT_GE(street, 0.20);
	EXPECT_LE(street, 0.30);
	for (const auto& [c, target] : mixed_spec().category_mix)
		EXPECT_NEAR(static_cast<double>(counts.at(c)) / total, target, 0.05) << name_of(c);
	EXPECT_NEAR(static_cast<double>(counts.at(Category::Other)) / total, 0.20, 0.05);
}

TEST(GenerateScene, FractionsStayWithinToleranceAcrossSeedsAndMixes)
{
	const std::vector<std::map<Category, double>> mixes{
	    {{Category::Street, 0.25}, {Category::Building, 0.35}, {Category::Forest, 0.15}, {Category::Barren, 0.10}},
	    {{Category::Building, 0.48}, {Category::Street, 0.24}, {Category::Barren, 0.12}},
	    {{Category::Street, 0.6}, {Category::Forest, 0.4}},
	    {{Category::Barren, 0.5}},
	    {{Category::Street, 1.0}},
	};
	for (std::uint64_t seed = 0; seed < 4; ++seed)
		for (const auto& mix : mixes) {
			const SceneMap s = generate_scene({500.0, 5.0, mix, seed});
			const auto fractions = category_fractions(s);
			double listed = 0.0;
			for (const auto& [c, target] : mix) {
				listed += target;
				const double got = fractions.contains(c) ? fractions.at(c) : 0.0;
				EXPECT_NEAR(got, target, 0.05) << name_of(c) << " seed " << seed;
			}
			const double other = fractions.contains(Category::Other) ? fractions.at(Category::Other) : 0.0;
			EXPECT_NEAR(other, 1.0 - listed, 0.05);
		}
}

TEST(GenerateScene, SingleCategoryFillsEverything)
{
	const SceneMap s = generate_scene({100.0, 5.0, {{Category::Forest, 1.0}}, 0});
	for (Category c : s.grid())
		EXPECT_EQ(c, Category::Forest);
}

TEST(GenerateScene, DeterministicForSameSeed)
{
	EXPECT_EQ(generate_scene(mixed_spec(9)), generate_scene(mixed_spec(9)));
	EXPECT_NE(generate_scene(mixed_spec(9)).grid(), generate_scene(mixed_spec(10)).grid());
}

TEST(GenerateScene, RejectsInvalidSpecs)
{
	try {
		generate_scene({1000.0, 5.0, {{Category::Street, 0.7}, {Category::Building, 0.5}}, 0});
		FAIL() << "expected invalid-spec";
	} catch (const Error& e) {
		EXPECT_EQ(e.kind(), ErrorKind::invalid_spec);
	}
	try {
		generate_scene({1000.0, 3.0, {}, 0});
		FAIL() << "expected invalid-spec";
	} catch (const Error& e) {
		EXPECT_EQ(e.kind(), ErrorKind::invalid_spec);
	}
	EXPECT_THROW(generate_scene({1000.0, 5.0, {{Category::Street, -0.1}}, 0}), Error);
}

TEST(GenerateScene, BuildingHeightsOnlyOnBuildingsAndInRange)
{
	const SceneMap s = generate_scene(mixed_spec(3));
	for (std::size_t i = 0; i < s.cell_count(); ++i) {
		const double h = s.building_heights()[i];
		if (s.grid()[i] == Category::Building) {
			EXPECT_GE(h, 8.0);
			EXPECT_LE(h, 40.0);
		} else {
			EXPECT_EQ(h, 0.0);
		}
	}
}

TEST(GenerateScene, StreetNetworkIsConnected)
{
	const SceneMap s = generate_scene(mixed_spec(4));
	const std::size_t n = s.cells_per_side();
	std::vector<bool> seen(s.cell_count(), false);
	std::size_t streets = 0, start = s.cell_count();
	for (std::size_t i = 0; i < s.cell_count(); ++i)
		if (s.grid()[i] == Category::Street) {
			++streets;
			start = std::min(start, i);
		}
	ASSERT_GT(streets, 0u);
	std::queue<std::size_t> q;
	q.push(start);
	seen[start] = true;
	std::size_t reached = 0;
	while (!q.empty()) {
		const std::size_t i = q.front();
		q.pop();
		++reached;
		const std::size_t x = i % n, y = i / n;
		const auto visit = [&](std::size_t j) {
			if (!seen[j] && s.grid()[j] == Category::Street) {
				seen[j] = true;
				q.push(j);
			}
		};
		if (x > 0) visit(i - 1);
		if (x + 1 < n) visit(i + 1);
		if (y > 0) visit(i - n);
		if (y + 1 < n) visit(i + n);
	}
	EXPECT_EQ(reached, streets);
}

TEST(CategoryAt, BoundaryConventions)
{
	const SceneMap forest = generate_scene({100.0, 5.0, {{Category::Forest, 1.0}}, 0});
	EXPECT_EQ(code_of(category_at(forest, {0.0, 0.0})), 7);

	const SceneMap s = generate_scene(mixed_spec());
	EXPECT_EQ(category_at(s, {999.9, 999.9}), s.at(199, 199));
	EXPECT_EQ(category_at(s, {5.0, 0.0}), s.at(1, 0));
	EXPECT_EQ(category_at(s, {4.999999, 0.0}), s.at(0, 0));
}

TEST(CategoryAt, MatchesDirectIndexing)
{
	const SceneMap s = generate_scene(mixed_spec(2));
	Rng rng(77);
	for (int k = 0; k < 2000; ++k) {
		const Vec2 p{rng.uniform() * 1000.0, rng.uniform() * 1000.0};
		const auto ix = static_cast<std::size_t>(std::floor(p.x / 5.0));
		const auto iy = static_cast<std::size_t>(std::floor(p.y / 5.0));
		EXPECT_EQ(category_at(s, p), s.grid()[iy * 200 + ix]);
	}
}

TEST(CategoryAt, OutsideFootprintThrows)
{
	const SceneMap s = generate_scene(mixed_spec());
	for (Vec2 p : {Vec2{-0.1, 5.0}, Vec2{1000.0, 5.0}, Vec2{5.0, 1000.0}, Vec2{5.0, -1.0}}) {
		try {
			(void)category_at(s, p);
			FAIL();
		} catch (const Error& e) {
			EXPECT_EQ(e.kind(), ErrorKind::out_of_bounds);
		}
	}
}

TEST(DeployBasestations, LondonLowPreset)
{
	const SceneMap s = generate_scene(mixed_spec());
	const Deployment d = deploy_basestations(s, london_low_preset(1));
	ASSERT_EQ(d.K(), 20u);
	for (std::size_t i = 0; i < d.K(); ++i) {
		const auto& b = d.stations[i];
		EXPECT_EQ(b.id, static_cast<int>(i + 1));
		EXPECT_EQ(b.frequency_hz, 8.0e8);
		EXPECT_FALSE(b.sector_azimuth_deg.has_value());
		EXPECT_TRUE(s.contains(b.position.xy()));
		EXPECT_GT(b.position.z, 0.0);
	}
}

TEST(DeployBasestations, LondonHighPresetHas18ThreeSectorSites)
{
	const SceneMap s = generate_scene(mixed_spec());
	const Deployment d = deploy_basestations(s, london_high_preset(1));
	ASSERT_EQ(d.K(), 54u);
	std::map<std::pair<double, double>, std::multiset<double>> sites;
	for (const auto& b : d.stations) {
		EXPECT_EQ(b.frequency_hz, 5.0e9);
		ASSERT_TRUE(b.sector_azimuth_deg.has_value());
		sites[{b.position.x, b.position.y}].insert(*b.sector_azimuth_deg);
	}
	EXPECT_EQ(sites.size(), 18u);
	for (const auto& [pos, az] : sites)
		EXPECT_EQ(az, (std::multiset<double>{0.0, 120.0, 240.0}));
}

TEST(DeployBasestations, HeightsFollowRooftopRule)
{
	const SceneMap s = generate_scene(mixed_spec(5));
	for (const auto& preset : {london_low_preset(2), london_high_preset(2)}) {
		const Deployment d = deploy_basestations(s, preset);
		for (const auto& b : d.stations) {
			const auto [ix, iy] = s.cell_of(b.position.xy());
			if (s.at(ix, iy) == Category::Building)
				EXPECT_DOUBLE_EQ(b.position.z, s.height_at(ix, iy) + 3.0);
			else
				EXPECT_DOUBLE_EQ(b.position.z, 25.0);
		}
	}
}

TEST(DeployBasestations, MinimalAndFailureCases)
{
	const SceneMap s = generate_scene({100.0, 5.0, {{Category::Forest, 1.0}}, 0});
	const Deployment one = deploy_basestations(s, {"single", 1, 8e8, false, 0});
	ASSERT_EQ(one.K(), 1u);
	EXPECT_EQ(one.stations[0].id, 1);

	try {
		deploy_basestations(s, {"too-many", 401, 8e8, false, 0});
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.kind(), ErrorKind::placement_failure);
	}
	// Every cell used exactly once still works.
	EXPECT_EQ(deploy_basestations(s, {"full", 400, 8e8, false, 0}).K(), 400u);
}

TEST(DeployBasestations, Deterministic)
{
	const SceneMap s = generate_scene(mixed_spec());
	EXPECT_EQ(deploy_basestations(s, london_high_preset(4)), deploy_basestations(s, london_high_preset(4)));
}

TEST(SampleUeDrops, UniformDropsCoverAllCategoriesAndCarryTheirLabels)
{
	const SceneMap s = generate_scene(mixed_spec());
	const auto drops = sample_ue_drops(s, 20000, 3);
	ASSERT_EQ(drops.size(), 20000u);
	std::set<Category> seen;
	for (const auto& d : drops) {
		EXPECT_EQ(d.true_category, category_at(s, d.position));
		seen.insert(d.true_category);
	}
	EXPECT_EQ(seen, (std::set<Category>{Category::Other, Category::Forest, Category::Street, Category::Building}));
	EXPECT_EQ(drops, sample_ue_drops(s, 20000, 3));
}

TEST(SampleUeDrops, SingleDropOnForest)
{
	const SceneMap s = generate_scene({100.0, 5.0, {{Category::Forest, 1.0}}, 0});
	const auto drops = sample_ue_drops(s, 1, 0);
	ASSERT_EQ(drops.size(), 1u);
	EXPECT_EQ(drops[0].true_category, Category::Forest);
}

TEST(SampleUeDrops, StratifiedSplitsEvenly)
{
	const SceneMap s = generate_scene(
	    {1000.0, 5.0, {{Category::Street, 0.25}, {Category::Building, 0.35}, {Category::Forest, 0.2}, {Category::Barren, 0.1}}, 1});
	const std::vector<Category> four{Category::Street, Category::Building, Category::Forest, Category::Barren};
	const auto drops = sample_ue_drops(s, 4000, 8, four);
	std::map<Category, std::size_t> counts;
	for (const auto& d : drops) {
		EXPECT_EQ(d.true_category, category_at(s, d.position));
		++counts[d.true_category];
	}
	ASSERT_EQ(counts.size(), 4u);
	for (const auto& [c, n] : counts)
		EXPECT_EQ(n, 1000u) << name_of(c);
}

TEST(SampleUeDrops, StratifiedMissingCategoryFails)
{
	const SceneMap s = generate_scene({100.0, 5.0, {{Category::Forest, 1.0}}, 0});
	try {
		sample_ue_drops(s, 10, 0, std::vector<Category>{Category::Street});
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.kind(), ErrorKind::missing_category);
	}
	EXPECT_THROW(sample_ue_drops(s, 0, 0), Error);
}
