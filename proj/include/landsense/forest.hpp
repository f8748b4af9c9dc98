#pragma once

#include "dataset.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace landsense {

struct ForestParams {
	std::size_t n_trees = 100;
	/// Empty means unlimited depth.
	std::optional<std::size_t> max_depth;
	std::size_t min_samples_split = 2;
	/// Empty means floor(sqrt(K)), at least 1.
	std::optional<std::size_t> features_per_split;
	bool bootstrap = true;
	std::uint64_t seed = 0;

	std::size_t resolved_features(std::size_t K) const
	{
		if (features_per_split)
			return *features_per_split;
		return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(K)))));
	}

	friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

inline void validate(const ForestParams& p, std::size_t K)
{
	if (p.n_trees < 1)
		throw Error(ErrorKind::invalid_spec, "n_trees must be at least 1");
	if (p.min_samples_split < 2)
		throw Error(ErrorKind::invalid_spec, "min_samples_split must be at least 2");
	const std::size_t f = p.resolved_features(K);
	if (f < 1 || f > K)
		throw Error(ErrorKind::invalid_spec, "features_per_split must lie in [1, K]");
}

/// Dense row-major copy of a dataset with labels remapped to class indices 0..C-1, where
/// class index order follows ascending label code.
struct TrainingMatrix {
	std::size_t K = 0;
	std::vector<double> features;
	std::vector<std::uint16_t> labels;
	std::vector<int> classes;

	std::size_t rows() const noexcept { return labels.size(); }
	std::span<const double> row(std::size_t i) const { return {features.data() + i * K, K}; }
	double value(std::size_t i, std::size_t f) const { return features[i * K + f]; }

	static TrainingMatrix from(const Dataset& ds)
	{
		TrainingMatrix m;
		m.K = ds.K;
		for (const auto& [label, n] : ds.label_histogram())
			m.classes.push_back(label);
		m.features.reserve(ds.L() * ds.K);
		m.labels.reserve(ds.L());
		for (const auto& r : ds.rows) {
			if (r.features_db.size() != ds.K)
				throw Error(ErrorKind::invalid_features, "row width differs from K");
			m.features.insert(m.features.end(), r.features_db.begin(), r.features_db.end());
			const auto it = std::ranges::lower_bound(m.classes, r.label);
			m.labels.push_back(static_cast<std::uint16_t>(it - m.classes.begin()));
		}
		return m;
	}
};

/// 1 - sum_c p_c^2.
inline double gini_impurity(std::span<const std::uint32_t> class_counts)
{
	std::uint64_t total = 0;
	for (auto c : class_counts)
		total += c;
	if (total == 0)
		throw Error(ErrorKind::invalid_node, "gini of an empty node");
	double sum_sq = 0.0;
	for (auto c : class_counts) {
		const double p = static_cast<double>(c) / static_cast<double>(total);
		sum_sq += p * p;
	}
	return 1.0 - sum_sq;
}

inline double gini_impurity(const std::map<int, std::uint32_t>& class_counts)
{
	std::vector<std::uint32_t> counts;
	for (const auto& [code, n] : class_counts)
		counts.push_back(n);
	return gini_impurity(counts);
}

/// Threshold between two consecutive distinct sorted values; always lo <= t < hi so that
/// "x <= t goes left" separates them.
inline double split_threshold(double lo, double hi) noexcept
{
	const double mid = lo + (hi - lo) / 2.0;
	return mid < hi ? mid : lo;
}

struct SplitCandidate {
	std::size_t feature_index = 0;
	double threshold_db = 0.0;
	double weighted_child_impurity = 0.0;

	friend bool operator==(const SplitCandidate&, const SplitCandidate&) = default;
};

namespace detail {

using wide = __int128;

// Weighted child Gini is 1 - score / (n_left * n_right * n) with
// score = n_right * sum(left_c^2) + n_left * sum(right_c^2). Comparisons stay in integers.
struct SplitScore {
	wide score = 0;
	wide denom = 1;  // n_left * n_right

	bool better_than(const SplitScore& o) const { return score * o.denom > o.score * denom; }
};

} // namespace detail

/// Best Gini split of `rows` over the listed features. Candidate thresholds are midpoints of
/// consecutive distinct values. Ties go to the lower feature index, then the lower threshold.
/// Returns nothing when no candidate lowers the impurity below the parent's.
inline std::optional<SplitCandidate> best_split(const TrainingMatrix& m, std::span<const std::uint32_t> rows,
                                                std::span<const std::size_t> features)
{
	const std::size_t C = m.classes.size();
	const std::size_t n = rows.size();
	if (n < 2 || features.empty())
		return std::nullopt;

	std::vector<std::uint32_t> total(C, 0);
	for (auto r : rows)
		++total[m.labels[r]];
	detail::wide parent_sq = 0;
	for (auto c : total)
		parent_sq += static_cast<detail::wide>(c) * c;

	std::vector<std::size_t> order(features.begin(), features.end());
	std::ranges::sort(order);

	std::optional<SplitCandidate> best;
	detail::SplitScore best_score;
	std::vector<std::pair<double, std::uint16_t>> column(n);
	std::vector<std::uint32_t> left(C);
	std::vector<std::uint32_t> right(C);

	for (std::size_t f : order) {
		for (std::size_t k = 0; k < n; ++k)
			column[k] = {m.value(rows[k], f), m.labels[rows[k]]};
		std::ranges::sort(column, {}, &std::pair<double, std::uint16_t>::first);
		if (column.front().first == column.back().first)
			continue;

		std::ranges::fill(left, 0);
		right = total;
		detail::wide left_sq = 0, right_sq = parent_sq;
		for (std::size_t k = 0; k + 1 < n; ++k) {
			const auto c = column[k].second;
			left_sq += 2 * static_cast<detail::wide>(left[c]) + 1;
			right_sq -= 2 * static_cast<detail::wide>(right[c]) - 1;
			++left[c];
			--right[c];
			if (column[k].first == column[k + 1].first)
				continue;
			const auto n_left = static_cast<detail::wide>(k + 1);
			const auto n_right = static_cast<detail::wide>(n - k - 1);
			const detail::SplitScore s{n_right * left_sq + n_left * right_sq, n_left * n_right};
			// Must beat the parent: score / denom > parent_sq / n.
			if (!(s.score * static_cast<detail::wide>(n) > parent_sq * s.denom))
				continue;
			if (!best || s.better_than(best_score)) {
				best_score = s;
				const double weighted = 1.0 - static_cast<double>(s.score) /
				                                  (static_cast<double>(s.denom) * static_cast<double>(n));
				best = SplitCandidate{f, split_threshold(column[k].first, column[k + 1].first), weighted};
			}
		}
	}
	return best;
}

struct TreeNode {
	/// -1 marks a leaf.
	std::int32_t feature_index = -1;
	double threshold_db = 0.0;
	std::uint32_t left = 0;
	std::uint32_t right = 0;
	/// Training rows per class index; filled for leaves only.
	std::vector<std::uint32_t> class_counts;

	bool is_leaf() const noexcept { return feature_index < 0; }

	friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// CART tree. Root at index 0; a row goes left when feature <= threshold.
class DecisionTree {
public:
	DecisionTree() = default;
	DecisionTree(std::vector<TreeNode> nodes, std::size_t num_classes) : nodes_(std::move(nodes)), num_classes_(num_classes) {}

	const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
	std::size_t num_classes() const noexcept { return num_classes_; }

	std::size_t leaf_of(std::span<const double> x) const
	{
		std::size_t i = 0;
		while (!nodes_[i].is_leaf()) {
			const auto& node = nodes_[i];
			i = x[static_cast<std::size_t>(node.feature_index)] <= node.threshold_db ? node.left : node.right;
		}
		return i;
	}

	/// Majority class index of the reached leaf; ties go to the lower index.
	std::size_t predict_index(std::span<const double> x) const
	{
		const auto& counts = nodes_[leaf_of(x)].class_counts;
		return static_cast<std::size_t>(std::ranges::max_element(counts) - counts.begin());
	}

	std::size_t depth() const
	{
		std::vector<std::size_t> d(nodes_.size(), 0);
		std::size_t deepest = 0;
		for (std::size_t i = 0; i < nodes_.size(); ++i) {
			deepest = std::max(deepest, d[i]);
			if (!nodes_[i].is_leaf())
				d[nodes_[i].left] = d[nodes_[i].right] = d[i] + 1;
		}
		return deepest;
	}

	friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
	std::vector<TreeNode> nodes_;
	std::size_t num_classes_ = 0;
};

namespace detail {

class TreeGrower {
public:
	TreeGrower(const TrainingMatrix& m, const ForestParams& params, Rng& rng)
	    : m_(m), params_(params), rng_(rng), features_(m.K), mtry_(params.resolved_features(m.K))
	{
		std::iota(features_.begin(), features_.end(), std::size_t{0});
	}

	DecisionTree grow(std::vector<std::uint32_t> rows)
	{
		rows_ = std::move(rows);
		nodes_.clear();
		nodes_.emplace_back();
		build(0, 0, rows_.size(), 0);
		return DecisionTree(std::move(nodes_), m_.classes.size());
	}

private:
	void build(std::size_t node, std::size_t begin, std::size_t end, std::size_t depth)
	{
		std::vector<std::uint32_t> counts(m_.classes.size(), 0);
		for (std::size_t k = begin; k < end; ++k)
			++counts[m_.labels[rows_[k]]];
		const std::size_t size = end - begin;
		const bool pure = std::ranges::count_if(counts, [](auto c) { return c > 0; }) <= 1;
		const bool depth_cap = params_.max_depth && depth >= *params_.max_depth;

		std::optional<SplitCandidate> split;
		if (!pure && !depth_cap && size >= params_.min_samples_split) {
			// Fresh feature subset per node, drawn without replacement.
			for (std::size_t k = 0; k < mtry_; ++k)
				std::swap(features_[k], features_[k + rng_.index(features_.size() - k)]);
			split = best_split(m_, std::span(rows_).subspan(begin, size), std::span(features_).first(mtry_));
		}
		if (!split) {
			nodes_[node].class_counts = std::move(counts);
			return;
		}

		const auto mid_it = std::partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
		                                   rows_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::uint32_t r) {
			                                   return m_.value(r, split->feature_index) <= split->threshold_db;
		                                   });
		const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());

		const auto left = static_cast<std::uint32_t>(nodes_.size());
		nodes_.emplace_back();
		nodes_[node].feature_index = static_cast<std::int32_t>(split->feature_index);
		nodes_[node].threshold_db = split->threshold_db;
		nodes_[node].left = left;
		build(left, begin, mid, depth + 1);
		const auto right = static_cast<std::uint32_t>(nodes_.size());
		nodes_.emplace_back();
		nodes_[node].right = right;
		build(right, mid, end, depth + 1);
	}

	const TrainingMatrix& m_;
	const ForestParams& params_;
	Rng& rng_;
	std::vector<std::size_t> features_;
	std::size_t mtry_;
	std::vector<std::uint32_t> rows_;
	std::vector<TreeNode> nodes_;
};

} // namespace detail

/// Grows one tree on the given row indices (duplicates allowed, as in a bootstrap sample).
inline DecisionTree train_tree(const TrainingMatrix& m, std::vector<std::uint32_t> rows, const ForestParams& params,
                               Rng& rng)
{
	if (rows.empty())
		throw Error(ErrorKind::invalid_input, "cannot grow a tree on zero rows");
	validate(params, m.K);
	detail::TreeGrower grower(m, params, rng);
	return grower.grow(std::move(rows));
}

struct ForestModel {
	std::vector<DecisionTree> trees;
	ForestParams params;
	std::size_t K = 0;
	/// Sorted label codes seen in training; tree class index i means classes[i].
	std::vector<int> classes;

	friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

/// Row indices a given tree trains on: a size-L bootstrap draw from stream (seed, tree), or
/// every row when bootstrap is off. The same stream then drives the tree's feature draws.
inline std::vector<std::uint32_t> tree_sample(std::size_t L, const ForestParams& params, Rng& rng)
{
	std::vector<std::uint32_t> rows(L);
	if (params.bootstrap)
		for (auto& r : rows)
			r = static_cast<std::uint32_t>(rng.index(L));
	else
		std::iota(rows.begin(), rows.end(), std::uint32_t{0});
	return rows;
}

inline ForestModel train_forest(const TrainingMatrix& m, const ForestParams& params)
{
	if (m.rows() == 0)
		throw Error(ErrorKind::invalid_input, "empty training set");
	validate(params, m.K);
	ForestModel model;
	model.params = params;
	model.K = m.K;
	model.classes = m.classes;
	model.trees.resize(params.n_trees);
	parallel_for(params.n_trees, [&](std::size_t t) {
		Rng rng(params.seed, t);
		auto rows = tree_sample(m.rows(), params, rng);
		model.trees[t] = train_tree(m, std::move(rows), params, rng);
	});
	return model;
}

inline ForestModel train_forest(const Dataset& ds, const ForestParams& params)
{
	if (ds.L() == 0)
		throw Error(ErrorKind::invalid_input, "empty training set");
	return train_forest(TrainingMatrix::from(ds), params);
}

struct Prediction {
	int label = 0;
	/// Fraction of trees voting for each class code.
	std::map<int, double> votes;
	/// Integer tree votes per class index; sums to n_trees.
	std::vector<std::uint32_t> vote_counts;
};

inline std::vector<std::size_t> tree_predictions(const ForestModel& model, std::span<const double> features_db)
{
	if (features_db.size() != model.K)
		throw Error(ErrorKind::invalid_features, "feature width " + std::to_string(features_db.size()) +
		                                             " does not match model K=" + std::to_string(model.K));
	std::vector<std::size_t> out;
	out.reserve(model.trees.size());
	for (const auto& tree : model.trees)
		out.push_back(tree.predict_index(features_db));
	return out;
}

/// Plurality of per-tree majority votes; ties go to the lower class code.
inline Prediction predict(const ForestModel& model, std::span<const double> features_db)
{
	Prediction p;
	p.vote_counts.assign(model.classes.size(), 0);
	for (auto c : tree_predictions(model, features_db))
		++p.vote_counts[c];
	const auto winner = static_cast<std::size_t>(std::ranges::max_element(p.vote_counts) - p.vote_counts.begin());
	p.label = model.classes[winner];
	const double n = static_cast<double>(model.trees.size());
	for (std::size_t c = 0; c < model.classes.size(); ++c)
		if (p.vote_counts[c] > 0)
			p.votes[model.classes[c]] = static_cast<double>(p.vote_counts[c]) / n;
	return p;
}

inline std::vector<int> predict_labels(const ForestModel& model, const Dataset& ds)
{
	std::vector<int> out(ds.L());
	parallel_for(ds.L(), [&](std::size_t i) { out[i] = predict(model, ds.rows[i].features_db).label; });
	return out;
}

} // namespace landsense
