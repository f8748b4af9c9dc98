#pragma once

#include "category.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "propagation.hpp"
#include "rng.hpp"
#include "scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace landsense {

/// Value standing in for a masked ("no usable path") gain.
inline constexpr double kSentinelDb = -200.0;

struct TrainingRow {
	std::vector<double> features_db;
	int label = 0;
	/// Fewer than N links were above the sentinel, so fewer than N entries survive masking.
	bool degenerate = false;

	friend bool operator==(const TrainingRow&, const TrainingRow&) = default;
};

enum class RebalanceMode { none, undersample, oversample };

inline std::string to_string(RebalanceMode mode)
{
	switch (mode) {
	case RebalanceMode::none: return "none";
	case RebalanceMode::undersample: return "undersample";
	case RebalanceMode::oversample: return "oversample";
	}
	return "none";
}

inline RebalanceMode parse_rebalance(const std::string& text)
{
	if (text == "none" || text.empty())
		return RebalanceMode::none;
	if (text == "undersample")
		return RebalanceMode::undersample;
	if (text == "oversample")
		return RebalanceMode::oversample;
	throw Error(ErrorKind::invalid_spec, "unknown rebalance mode '" + text + "'");
}

struct Dataset {
	std::vector<TrainingRow> rows;
	std::size_t K = 0;
	std::size_t N = 0;
	std::string layer_name;
	std::uint64_t seed = 0;
	double sentinel_db = kSentinelDb;
	/// Total perturbation applied so far (root-sum-square of the individual sigmas).
	double sigma_db = 0.0;
	RebalanceMode rebalanced = RebalanceMode::none;
	/// Set once labels have been mapped to {0, 1} for this category.
	std::optional<Category> binary_target;

	std::size_t L() const noexcept { return rows.size(); }

	std::map<int, std::size_t> label_histogram() const
	{
		std::map<int, std::size_t> h;
		for (const auto& r : rows)
			++h[r.label];
		return h;
	}

	friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Keeps the N strongest gains in place and sets every other entry to the sentinel. Ties at
/// the cut are resolved toward the lower station index.
inline std::vector<double> select_top_n(std::span<const double> gains_db, std::size_t N, double sentinel = kSentinelDb)
{
	if (N < 1 || N > gains_db.size())
		throw Error(ErrorKind::invalid_n,
		            "N=" + std::to_string(N) + " outside [1, " + std::to_string(gains_db.size()) + "]");
	std::vector<std::size_t> order(gains_db.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::ranges::nth_element(order, order.begin() + static_cast<std::ptrdiff_t>(N - 1),
	                         [&](std::size_t a, std::size_t b) {
		                         return gains_db[a] > gains_db[b] || (gains_db[a] == gains_db[b] && a < b);
	                         });
	std::vector<double> out(gains_db.size(), sentinel);
	for (std::size_t k = 0; k < N; ++k)
		out[order[k]] = gains_db[order[k]];
	return out;
}

inline TrainingRow make_row(std::span<const double> gains_db, int label, std::size_t N, double sentinel = kSentinelDb)
{
	TrainingRow row{select_top_n(gains_db, N, sentinel), label, false};
	const auto live = std::ranges::count_if(row.features_db, [sentinel](double g) { return g > sentinel; });
	row.degenerate = static_cast<std::size_t>(live) < N;
	return row;
}

/// Unmasked gain vectors for every drop. Drop i draws its shadowing from stream (master_seed, i).
inline std::vector<PathGainVector> compute_gains(const SceneMap& scene, const Deployment& deployment,
                                                 std::span<const UEDrop> drops, const PropagationParams& params,
                                                 std::uint64_t master_seed)
{
	if (deployment.K() == 0)
		throw Error(ErrorKind::invalid_input, "deployment has no stations");
	validate(params, deployment.frequency_hz());
	std::vector<PathGainVector> gains(drops.size());
	parallel_for(drops.size(), [&](std::size_t i) {
		Rng rng(master_seed, i);
		gains[i] = path_gain_vector(scene, deployment, drops[i], params, rng);
	});
	return gains;
}

/// Masks precomputed gain vectors with S_N and attaches each drop's true category as label.
inline Dataset dataset_from_gains(std::span<const PathGainVector> gains, std::size_t N, const std::string& layer_name,
                                  std::uint64_t seed, double sentinel = kSentinelDb)
{
	if (gains.empty())
		throw Error(ErrorKind::invalid_input, "no drops");
	Dataset ds;
	ds.K = gains.front().gains_db.size();
	ds.N = N;
	ds.layer_name = layer_name;
	ds.seed = seed;
	ds.sentinel_db = sentinel;
	ds.rows.resize(gains.size());
	for (std::size_t i = 0; i < gains.size(); ++i)
		ds.rows[i] = make_row(gains[i].gains_db, code_of(gains[i].ue.true_category), N, sentinel);
	return ds;
}

inline Dataset build_dataset(const SceneMap& scene, const Deployment& deployment, std::span<const UEDrop> drops,
                             std::size_t N, const PropagationParams& params, std::uint64_t master_seed)
{
	if (drops.empty())
		throw Error(ErrorKind::invalid_input, "no drops");
	if (N < 1 || N > deployment.K())
		throw Error(ErrorKind::invalid_n,
		            "N=" + std::to_string(N) + " outside [1, " + std::to_string(deployment.K()) + "]");
	const auto gains = compute_gains(scene, deployment, drops, params, master_seed);
	return dataset_from_gains(gains, N, deployment.layer_name, master_seed, params.min_gain_db);
}

/// One-vs-rest labels: 1 where label == target, else 0. Applying it again with the same
/// target is a no-op.
inline Dataset binarize_labels(const Dataset& ds, Category target)
{
	if (!is_registered(code_of(target)))
		throw Error(ErrorKind::invalid_category, "unregistered target category");
	if (ds.binary_target) {
		if (*ds.binary_target == target)
			return ds;
		throw Error(ErrorKind::invalid_category, "dataset already binarized for another category");
	}
	Dataset out = ds;
	for (auto& row : out.rows)
		row.label = row.label == code_of(target) ? 1 : 0;
	out.binary_target = target;
	return out;
}

/// Maps every label outside `keep` to Other (0), the "none of the listed landscapes" class.
inline Dataset collapse_labels(const Dataset& ds, std::span<const Category> keep)
{
	Dataset out = ds;
	for (auto& row : out.rows) {
		const bool kept = std::ranges::any_of(keep, [&](Category c) { return code_of(c) == row.label; });
		if (!kept)
			row.label = code_of(Category::Other);
	}
	return out;
}

/// Equalizes class counts. Undersampling draws each class down to the minority count without
/// replacement; oversampling keeps every row and tops each class up to the majority count by
/// drawing with replacement. The result is shuffled.
inline Dataset rebalance(const Dataset& ds, RebalanceMode mode, std::uint64_t seed)
{
	if (mode == RebalanceMode::none)
		return ds;
	std::map<int, std::vector<std::size_t>> by_class;
	for (std::size_t i = 0; i < ds.rows.size(); ++i)
		by_class[ds.rows[i].label].push_back(i);
	if (by_class.size() < 2)
		throw Error(ErrorKind::nothing_to_balance, "rebalancing needs at least two classes");

	std::size_t lo = ds.rows.size(), hi = 0;
	for (const auto& [label, idx] : by_class) {
		lo = std::min(lo, idx.size());
		hi = std::max(hi, idx.size());
	}

	Rng rng(seed, 0x7eba);
	std::vector<std::size_t> picked;
	for (auto& [label, idx] : by_class) {
		if (mode == RebalanceMode::undersample) {
			// Partial Fisher-Yates: the first `lo` entries become a uniform sample.
			for (std::size_t k = 0; k < lo; ++k)
				std::swap(idx[k], idx[k + rng.index(idx.size() - k)]);
			picked.insert(picked.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(lo));
		} else {
			picked.insert(picked.end(), idx.begin(), idx.end());
			for (std::size_t k = idx.size(); k < hi; ++k)
				picked.push_back(idx[rng.index(idx.size())]);
		}
	}
	rng.shuffle(std::span(picked));

	Dataset out = ds;
	out.rows.clear();
	out.rows.reserve(picked.size());
	for (std::size_t i : picked)
		out.rows.push_back(ds.rows[i]);
	out.rebalanced = mode;
	return out;
}

/// Adds N(0, sigma^2) dB to every non-sentinel feature. Row i uses stream (seed, i).
inline Dataset perturb(const Dataset& ds, double sigma_db, std::uint64_t seed)
{
	if (!(sigma_db >= 0.0))
		throw Error(ErrorKind::invalid_input, "sigma_db must be nonnegative");
	Dataset out = ds;
	if (sigma_db == 0.0)
		return out;
	parallel_for(out.rows.size(), [&](std::size_t i) {
		Rng rng(seed, i);
		for (double& g : out.rows[i].features_db)
			if (g != ds.sentinel_db)
				g += rng.normal(0.0, sigma_db);
	});
	out.sigma_db = std::sqrt(ds.sigma_db * ds.sigma_db + sigma_db * sigma_db);
	return out;
}

/// Disjoint shuffled partition; the first part holds round(train_fraction * L) rows.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed)
{
	if (!(train_fraction > 0.0 && train_fraction < 1.0))
		throw Error(ErrorKind::invalid_split, "train fraction must lie in (0, 1)");
	const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ds.L())));
	if (n_train == 0 || n_train >= ds.L())
		throw Error(ErrorKind::invalid_split, "split leaves an empty part");

	std::vector<std::size_t> order(ds.L());
	std::iota(order.begin(), order.end(), std::size_t{0});
	Rng rng(seed, 0x5b17);
	rng.shuffle(std::span(order));

	std::pair<Dataset, Dataset> parts{ds, ds};
	parts.first.rows.clear();
	parts.second.rows.clear();
	parts.first.rows.reserve(n_train);
	parts.second.rows.reserve(ds.L() - n_train);
	for (std::size_t k = 0; k < order.size(); ++k)
		(k < n_train ? parts.first : parts.second).rows.push_back(ds.rows[order[k]]);
	return parts;
}

} // namespace landsense
