#pragma once

#include "error.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace landsense {

/// counts[i][j] = rows whose true class is classes[i] and predicted class is classes[j].
class ConfusionMatrix {
public:
	explicit ConfusionMatrix(std::vector<int> classes) : classes_(std::move(classes))
	{
		std::ranges::sort(classes_);
		classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
		counts_.assign(classes_.size() * classes_.size(), 0);
	}

	const std::vector<int>& classes() const noexcept { return classes_; }
	std::size_t size() const noexcept { return classes_.size(); }

	std::uint64_t count(std::size_t truth, std::size_t pred) const { return counts_[truth * size() + pred]; }
	void add(std::size_t truth, std::size_t pred, std::uint64_t n = 1) { counts_[truth * size() + pred] += n; }

	std::size_t index_of(int code) const
	{
		const auto it = std::ranges::lower_bound(classes_, code);
		if (it == classes_.end() || *it != code)
			throw Error(ErrorKind::invalid_class, "class " + std::to_string(code) + " is not in the matrix");
		return static_cast<std::size_t>(it - classes_.begin());
	}

	std::uint64_t total() const
	{
		std::uint64_t t = 0;
		for (auto c : counts_)
			t += c;
		return t;
	}

	std::uint64_t row_sum(std::size_t i) const
	{
		std::uint64_t s = 0;
		for (std::size_t j = 0; j < size(); ++j)
			s += count(i, j);
		return s;
	}

	std::uint64_t column_sum(std::size_t j) const
	{
		std::uint64_t s = 0;
		for (std::size_t i = 0; i < size(); ++i)
			s += count(i, j);
		return s;
	}

	std::uint64_t tp(int code) const
	{
		const auto i = index_of(code);
		return count(i, i);
	}
	std::uint64_t fp(int code) const { return column_sum(index_of(code)) - tp(code); }
	std::uint64_t fn(int code) const { return row_sum(index_of(code)) - tp(code); }

	friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
	std::vector<int> classes_;
	std::vector<std::uint64_t> counts_;
};

inline ConfusionMatrix confusion_matrix(std::span<const int> truths, std::span<const int> preds, std::vector<int> classes)
{
	if (truths.size() != preds.size())
		throw Error(ErrorKind::invalid_input, "truth and prediction lists differ in length");
	ConfusionMatrix cm(std::move(classes));
	for (std::size_t k = 0; k < truths.size(); ++k)
		cm.add(cm.index_of(truths[k]), cm.index_of(preds[k]));
	return cm;
}

/// A ratio that may be 0/0. Undefined ratios are reported as 0 with `degenerate` set.
struct Score {
	double value = 0.0;
	bool degenerate = false;
};

inline Score safe_ratio(std::uint64_t num, std::uint64_t den)
{
	if (den == 0)
		return {0.0, true};
	return {static_cast<double>(num) / static_cast<double>(den), false};
}

/// tp / (tp + fp)
inline Score precision(const ConfusionMatrix& cm, int code)
{
	return safe_ratio(cm.tp(code), cm.tp(code) + cm.fp(code));
}

/// tp / (tp + fn)
inline Score recall(const ConfusionMatrix& cm, int code)
{
	return safe_ratio(cm.tp(code), cm.tp(code) + cm.fn(code));
}

struct ClassScores {
	Score precision;
	Score recall;
	std::uint64_t support = 0;
};

struct ScoreReport {
	std::map<int, ClassScores> per_class;
	std::vector<int> macro_classes;
	double macro_precision = 0.0;
	double macro_recall = 0.0;
};

/// Per-class scores for every class in the matrix, plus unweighted means over `include`.
inline ScoreReport macro_scores(const ConfusionMatrix& cm, std::span<const int> include)
{
	if (include.empty())
		throw Error(ErrorKind::invalid_input, "macro average over an empty class set");
	ScoreReport report;
	for (int code : cm.classes())
		report.per_class[code] = {precision(cm, code), recall(cm, code), cm.row_sum(cm.index_of(code))};
	std::vector<int> chosen(include.begin(), include.end());
	std::ranges::sort(chosen);
	chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
	double p = 0.0, r = 0.0;
	for (int code : chosen) {
		const auto& s = report.per_class.at(cm.classes()[cm.index_of(code)]);
		p += s.precision.value;
		r += s.recall.value;
	}
	report.macro_classes = chosen;
	report.macro_precision = p / static_cast<double>(chosen.size());
	report.macro_recall = r / static_cast<double>(chosen.size());
	return report;
}

inline ScoreReport macro_scores(const ConfusionMatrix& cm) { return macro_scores(cm, cm.classes()); }

} // namespace landsense
