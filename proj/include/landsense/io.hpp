#pragma once

#include "category.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "scene.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#ifndef LANDSENSE_VERSION
#define LANDSENSE_VERSION "0.1.0"
#endif

namespace landsense {

inline constexpr int kFileFormat = 1;
inline constexpr std::string_view kToolVersion = LANDSENSE_VERSION;

// ---------------------------------------------------------------------------------------
// Files and hashes

inline std::string sha256_hex(std::string_view data)
{
	unsigned char digest[EVP_MAX_MD_SIZE];
	unsigned int len = 0;
	if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
		throw std::runtime_error("sha256 failed");
	static constexpr char hex[] = "0123456789abcdef";
	std::string out;
	out.reserve(2 * len);
	for (unsigned int i = 0; i < len; ++i) {
		out += hex[digest[i] >> 4];
		out += hex[digest[i] & 0xf];
	}
	return out;
}

inline std::string read_file(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw Error(ErrorKind::missing_file, "cannot open '" + path.string() + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content)
{
	if (path.has_parent_path())
		std::filesystem::create_directories(path.parent_path());
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw std::runtime_error("cannot write '" + path.string() + "'");
	out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline nlohmann::json parse_json(std::string_view text, const std::string& what)
{
	try {
		return nlohmann::json::parse(text);
	} catch (const nlohmann::json::exception& e) {
		throw Error(ErrorKind::invalid_spec, what + " is not valid JSON: " + e.what());
	}
}

// ---------------------------------------------------------------------------------------
// Scene file: header plus run-length encoded category and height grids, row-major.

inline nlohmann::json scene_to_json(const SceneMap& scene)
{
	nlohmann::json j;
	j["format"] = kFileFormat;
	j["side_m"] = scene.side_m();
	j["cell_m"] = scene.cell_m();
	j["seed"] = scene.seed();
	auto& registry = j["category_registry"] = nlohmann::json::array();
	for (const auto& info : category_registry)
		registry.push_back({{"code", code_of(info.category)}, {"name", info.name}});

	auto grid = nlohmann::json::array();
	auto heights = nlohmann::json::array();
	const auto& g = scene.grid();
	const auto& h = scene.building_heights();
	for (std::size_t i = 0; i < g.size();) {
		std::size_t k = i;
		while (k < g.size() && g[k] == g[i])
			++k;
		grid.push_back({code_of(g[i]), k - i});
		i = k;
	}
	for (std::size_t i = 0; i < h.size();) {
		std::size_t k = i;
		while (k < h.size() && h[k] == h[i])
			++k;
		heights.push_back({h[i], k - i});
		i = k;
	}
	j["grid_rle"] = std::move(grid);
	j["height_rle"] = std::move(heights);
	nlohmann::json fractions;
	for (const auto& [c, f] : category_fractions(scene))
		fractions[std::string(name_of(c))] = f;
	j["category_fractions"] = std::move(fractions);
	return j;
}

inline SceneMap scene_from_json(const nlohmann::json& j)
{
	try {
		if (j.at("format").get<int>() != kFileFormat)
			throw Error(ErrorKind::invalid_spec, "unsupported scene file format");
		std::vector<Category> grid;
		std::vector<double> heights;
		for (const auto& run : j.at("grid_rle")) {
			const Category c = category_from_code(run.at(0).get<int>());
			grid.insert(grid.end(), run.at(1).get<std::size_t>(), c);
		}
		for (const auto& run : j.at("height_rle"))
			heights.insert(heights.end(), run.at(1).get<std::size_t>(), run.at(0).get<double>());
		return SceneMap(j.at("side_m").get<double>(), j.at("cell_m").get<double>(), j.at("seed").get<std::uint64_t>(),
		                std::move(grid), std::move(heights));
	} catch (const nlohmann::json::exception& e) {
		throw Error(ErrorKind::invalid_spec, std::string("malformed scene file: ") + e.what());
	}
}

// ---------------------------------------------------------------------------------------
// Deployment file

inline nlohmann::json deployment_to_json(const Deployment& d)
{
	nlohmann::json j;
	j["format"] = kFileFormat;
	j["layer_name"] = d.layer_name;
	j["K"] = d.K();
	auto& stations = j["stations"] = nlohmann::json::array();
	for (const auto& s : d.stations) {
		stations.push_back({
		    {"id", s.id},
		    {"x", s.position.x},
		    {"y", s.position.y},
		    {"z", s.position.z},
		    {"frequency_hz", s.frequency_hz},
		    {"azimuth_deg", s.sector_azimuth_deg ? nlohmann::json(*s.sector_azimuth_deg) : nlohmann::json(nullptr)},
		});
	}
	// Heights, spacing and sectorization are stand-ins; the layer is not a surveyed network.
	j["metadata"] = {{"surrogate_placement", true}};
	return j;
}

inline Deployment deployment_from_json(const nlohmann::json& j)
{
	try {
		if (j.at("format").get<int>() != kFileFormat)
			throw Error(ErrorKind::invalid_spec, "unsupported deployment file format");
		Deployment d;
		d.layer_name = j.at("layer_name").get<std::string>();
		for (const auto& s : j.at("stations")) {
			BaseStation b;
			b.id = s.at("id").get<int>();
			b.position = {s.at("x").get<double>(), s.at("y").get<double>(), s.at("z").get<double>()};
			b.frequency_hz = s.at("frequency_hz").get<double>();
			if (!s.at("azimuth_deg").is_null())
				b.sector_azimuth_deg = s.at("azimuth_deg").get<double>();
			d.stations.push_back(b);
		}
		for (std::size_t i = 0; i < d.stations.size(); ++i) {
			if (d.stations[i].id != static_cast<int>(i + 1))
				throw Error(ErrorKind::invalid_spec, "station ids must run 1..K in order");
			if (d.stations[i].frequency_hz != d.stations.front().frequency_hz)
				throw Error(ErrorKind::invalid_spec, "all stations of a layer share one frequency");
		}
		return d;
	} catch (const nlohmann::json::exception& e) {
		throw Error(ErrorKind::invalid_spec, std::string("malformed deployment file: ") + e.what());
	}
}

// ---------------------------------------------------------------------------------------
// Dataset CSV: header g_1..g_K,label; features with four decimals.

inline std::string format_db(double v)
{
	char buf[48];
	const int n = std::snprintf(buf, sizeof buf, "%.4f", v);
	std::string s(buf, static_cast<std::size_t>(n));
	if (s == "-0.0000")
		s = "0.0000";
	return s;
}

inline std::string dataset_to_csv(const Dataset& ds)
{
	std::string out;
	out.reserve(ds.L() * (ds.K * 10 + 4) + 16 * ds.K);
	for (std::size_t k = 0; k < ds.K; ++k) {
		out += "g_" + std::to_string(k + 1);
		out += ',';
	}
	out += "label\n";
	for (const auto& row : ds.rows) {
		for (double g : row.features_db) {
			out += format_db(g);
			out += ',';
		}
		out += std::to_string(row.label);
		out += '\n';
	}
	return out;
}

inline nlohmann::json dataset_meta(const Dataset& ds)
{
	nlohmann::json j;
	j["format"] = kFileFormat;
	j["K"] = ds.K;
	j["N"] = ds.N;
	j["L"] = ds.L();
	j["layer_name"] = ds.layer_name;
	j["seed"] = ds.seed;
	j["sigma_db"] = ds.sigma_db;
	j["sentinel_db"] = ds.sentinel_db;
	j["rebalanced"] = to_string(ds.rebalanced);
	j["binary_target"] = ds.binary_target ? nlohmann::json(code_of(*ds.binary_target)) : nlohmann::json(nullptr);
	return j;
}

/// Parses a dataset CSV. `meta` (the sidecar) supplies N and provenance; without it N is taken
/// as the largest number of non-sentinel entries in any row.
inline Dataset dataset_from_csv(std::string_view csv, const nlohmann::json& meta = nullptr)
{
	const auto bad = [](const std::string& why) { return Error(ErrorKind::invalid_spec, "dataset CSV: " + why); };
	Dataset ds;
	if (!meta.is_null()) {
		ds.layer_name = meta.value("layer_name", std::string{});
		ds.seed = meta.value("seed", std::uint64_t{0});
		ds.sigma_db = meta.value("sigma_db", 0.0);
		ds.sentinel_db = meta.value("sentinel_db", kSentinelDb);
		ds.rebalanced = parse_rebalance(meta.value("rebalanced", std::string("none")));
		if (meta.contains("binary_target") && !meta.at("binary_target").is_null())
			ds.binary_target = category_from_code(meta.at("binary_target").get<int>());
	}

	std::size_t pos = 0;
	const auto next_line = [&]() -> std::optional<std::string_view> {
		if (pos >= csv.size())
			return std::nullopt;
		const auto end = csv.find('\n', pos);
		auto line = csv.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
		pos = end == std::string_view::npos ? csv.size() : end + 1;
		if (!line.empty() && line.back() == '\r')
			line.remove_suffix(1);
		return line;
	};

	const auto header = next_line();
	if (!header)
		throw bad("missing header");
	std::size_t columns = 1;
	for (char ch : *header)
		columns += ch == ',';
	if (columns < 2 || !header->ends_with("label"))
		throw bad("header must be g_1,...,g_K,label");
	ds.K = columns - 1;

	std::size_t max_live = 0;
	while (const auto line = next_line()) {
		if (line->empty())
			continue;
		TrainingRow row;
		row.features_db.reserve(ds.K);
		const char* p = line->data();
		const char* const end = line->data() + line->size();
		for (std::size_t k = 0; k < ds.K; ++k) {
			double v = 0.0;
			const auto res = std::from_chars(p, end, v);
			if (res.ec != std::errc{} || res.ptr == end || *res.ptr != ',')
				throw bad("malformed feature in row " + std::to_string(ds.L() + 1));
			row.features_db.push_back(v);
			p = res.ptr + 1;
		}
		const auto res = std::from_chars(p, end, row.label);
		if (res.ec != std::errc{} || res.ptr != end)
			throw bad("malformed label in row " + std::to_string(ds.L() + 1));
		const auto live = static_cast<std::size_t>(
		    std::ranges::count_if(row.features_db, [&](double g) { return g > ds.sentinel_db; }));
		max_live = std::max(max_live, live);
		ds.rows.push_back(std::move(row));
	}
	ds.N = !meta.is_null() && meta.contains("N") ? meta.at("N").get<std::size_t>() : max_live;
	for (auto& row : ds.rows) {
		const auto live = static_cast<std::size_t>(
		    std::ranges::count_if(row.features_db, [&](double g) { return g > ds.sentinel_db; }));
		row.degenerate = live < ds.N;
	}
	return ds;
}

/// Sidecar path for a dataset CSV: foo.csv -> foo.meta.json.
inline std::filesystem::path sidecar_path(const std::filesystem::path& csv_path)
{
	auto p = csv_path;
	p.replace_extension(".meta.json");
	return p;
}

inline Dataset load_dataset(const std::filesystem::path& csv_path)
{
	const std::string csv = read_file(csv_path);
	nlohmann::json meta = nullptr;
	const auto side = sidecar_path(csv_path);
	if (std::filesystem::exists(side))
		meta = parse_json(read_file(side), side.string());
	return dataset_from_csv(csv, meta);
}

} // namespace landsense
