#pragma once

#include "error.hpp"
#include "forest.hpp"

#include <json.hpp>

#include <charconv>
#include <string>
#include <string_view>

namespace landsense {

inline constexpr int kModelFormat = 1;

namespace detail {

inline void append_number(std::string& out, double v)
{
	char buf[32];
	const auto res = std::to_chars(buf, buf + sizeof buf, v);
	out.append(buf, res.ptr);
}

inline void append_number(std::string& out, std::uint64_t v)
{
	char buf[24];
	const auto res = std::to_chars(buf, buf + sizeof buf, v);
	out.append(buf, res.ptr);
}

inline nlohmann::json params_to_json(const ForestParams& p)
{
	nlohmann::json j;
	j["n_trees"] = p.n_trees;
	j["max_depth"] = p.max_depth ? nlohmann::json(*p.max_depth) : nlohmann::json(nullptr);
	j["min_samples_split"] = p.min_samples_split;
	j["features_per_split"] = p.features_per_split ? nlohmann::json(*p.features_per_split) : nlohmann::json("sqrt");
	j["bootstrap"] = p.bootstrap;
	j["seed"] = p.seed;
	return j;
}

} // namespace detail

inline nlohmann::json forest_params_to_json(const ForestParams& p) { return detail::params_to_json(p); }

/// Overlays the keys present in `j` onto `base`.
inline ForestParams forest_params_from_json(const nlohmann::json& j, ForestParams base = {})
{
	if (j.contains("n_trees"))
		base.n_trees = j.at("n_trees").get<std::size_t>();
	if (j.contains("max_depth"))
		base.max_depth = j.at("max_depth").is_null() ? std::nullopt
		                                              : std::optional<std::size_t>(j.at("max_depth").get<std::size_t>());
	if (j.contains("min_samples_split"))
		base.min_samples_split = j.at("min_samples_split").get<std::size_t>();
	if (j.contains("features_per_split")) {
		const auto& f = j.at("features_per_split");
		if (f.is_string() && f.get<std::string>() == "sqrt")
			base.features_per_split = std::nullopt;
		else
			base.features_per_split = f.get<std::size_t>();
	}
	if (j.contains("bootstrap"))
		base.bootstrap = j.at("bootstrap").get<bool>();
	if (j.contains("seed"))
		base.seed = j.at("seed").get<std::uint64_t>();
	return base;
}

/// Versioned JSON. Each tree is one flat number array in node order: an internal node is
/// `feature, threshold, left, right`; a leaf is `-1` followed by its class counts.
/// Output bytes depend only on the model and the optional provenance block.
inline std::string serialize(const ForestModel& model, const nlohmann::json& provenance = nullptr)
{
	nlohmann::json header;
	if (!provenance.is_null())
		header["provenance"] = provenance;
	header["format"] = kModelFormat;
	header["kind"] = "landsense-forest";
	header["K"] = model.K;
	header["classes"] = model.classes;
	header["params"] = detail::params_to_json(model.params);
	std::string head = header.dump();
	head.pop_back();  // reopen the object to append the trees

	std::string out = std::move(head);
	out += ",\"trees\":[";
	for (std::size_t t = 0; t < model.trees.size(); ++t) {
		if (t)
			out += ',';
		out += '[';
		bool first = true;
		const auto sep = [&] {
			if (!first)
				out += ',';
			first = false;
		};
		for (const auto& node : model.trees[t].nodes()) {
			if (node.is_leaf()) {
				sep();
				out += "-1";
				for (auto c : node.class_counts) {
					out += ',';
					detail::append_number(out, static_cast<std::uint64_t>(c));
				}
			} else {
				sep();
				detail::append_number(out, static_cast<std::uint64_t>(node.feature_index));
				out += ',';
				detail::append_number(out, node.threshold_db);
				out += ',';
				detail::append_number(out, static_cast<std::uint64_t>(node.left));
				out += ',';
				detail::append_number(out, static_cast<std::uint64_t>(node.right));
			}
		}
		out += ']';
	}
	out += "]}\n";
	return out;
}

/// Inverse of serialize. Any malformed, truncated or mismatched payload is a decode-failure.
inline ForestModel deserialize(std::string_view payload)
{
	const auto fail = [](const std::string& why) { return Error(ErrorKind::decode_failure, why); };
	if (payload.empty())
		throw fail("empty model payload");
	nlohmann::json j;
	try {
		j = nlohmann::json::parse(payload);
	} catch (const nlohmann::json::exception& e) {
		throw fail(std::string("model is not valid JSON: ") + e.what());
	}
	try {
		if (j.at("format").get<int>() != kModelFormat)
			throw fail("unsupported model format version");
		ForestModel model;
		model.K = j.at("K").get<std::size_t>();
		model.classes = j.at("classes").get<std::vector<int>>();
		model.params = forest_params_from_json(j.at("params"));
		const std::size_t C = model.classes.size();
		if (C == 0 || !std::ranges::is_sorted(model.classes) ||
		    std::ranges::adjacent_find(model.classes) != model.classes.end())
			throw fail("class list must be non-empty, sorted and unique");

		for (const auto& flat : j.at("trees")) {
			std::vector<TreeNode> nodes;
			std::size_t k = 0;
			const std::size_t size = flat.size();
			const auto take_index = [&](std::size_t bound) {
				if (k >= size)
					throw fail("truncated tree");
				const auto v = flat[k++].get<std::int64_t>();
				if (v < 0 || static_cast<std::uint64_t>(v) >= bound)
					throw fail("index out of range in tree");
				return static_cast<std::uint32_t>(v);
			};
			while (k < size) {
				TreeNode node;
				const auto head = flat[k].get<std::int64_t>();
				if (head == -1) {
					++k;
					if (k + C > size)
						throw fail("truncated leaf");
					std::uint64_t total = 0;
					for (std::size_t c = 0; c < C; ++c) {
						node.class_counts.push_back(flat[k++].get<std::uint32_t>());
						total += node.class_counts.back();
					}
					if (total == 0)
						throw fail("leaf with no class counts");
				} else {
					node.feature_index = static_cast<std::int32_t>(take_index(model.K));
					if (k >= size)
						throw fail("truncated node");
					node.threshold_db = flat[k++].get<double>();
					node.left = take_index(std::numeric_limits<std::uint32_t>::max());
					node.right = take_index(std::numeric_limits<std::uint32_t>::max());
				}
				nodes.push_back(std::move(node));
			}
			// Every non-root node must be the child of exactly one earlier node.
			std::vector<int> parents(nodes.size(), 0);
			for (std::size_t i = 0; i < nodes.size(); ++i) {
				if (nodes[i].is_leaf())
					continue;
				for (auto child : {nodes[i].left, nodes[i].right}) {
					if (child <= i || child >= nodes.size())
						throw fail("child index must point forward inside the tree");
					++parents[child];
				}
			}
			if (nodes.empty())
				throw fail("tree without nodes");
			for (std::size_t i = 1; i < nodes.size(); ++i)
				if (parents[i] != 1)
					throw fail("tree is not a proper binary tree");
			model.trees.emplace_back(std::move(nodes), C);
		}
		if (model.trees.size() != model.params.n_trees)
			throw fail("tree count does not match params");
		return model;
	} catch (const nlohmann::json::exception& e) {
		throw fail(std::string("malformed model: ") + e.what());
	}
}

} // namespace landsense
