#pragma once

#include "category.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "forest.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "model_io.hpp"
#include "propagation.hpp"
#include "rng.hpp"
#include "scene.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace landsense {

// ---------------------------------------------------------------------------------------
// Configuration

/// Named scene mixes. Fractions not listed become Other.
inline SceneSpec scene_preset(const std::string& name)
{
	SceneSpec spec;
	if (name == "london-like") {
		spec.category_mix = {{Category::Street, 0.25}, {Category::Building, 0.35},
		                     {Category::Forest, 0.15}, {Category::Barren, 0.10}};
	} else if (name == "skewed-urban") {
		// 4:1 between the largest (Building) and smallest (Barren) class.
		spec.category_mix = {{Category::Building, 0.48}, {Category::Street, 0.24}, {Category::Barren, 0.12}};
	} else {
		throw Error(ErrorKind::invalid_spec, "unknown scene preset '" + name + "'");
	}
	return spec;
}

/// Parses "street=0.25,building=0.35".
inline std::map<Category, double> parse_mix(const std::string& text)
{
	std::map<Category, double> mix;
	std::size_t pos = 0;
	while (pos < text.size()) {
		const auto comma = text.find(',', pos);
		const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
		pos = comma == std::string::npos ? text.size() : comma + 1;
		if (item.empty())
			continue;
		const auto eq = item.find('=');
		if (eq == std::string::npos)
			throw Error(ErrorKind::invalid_spec, "mix entry '" + item + "' is not cat=frac");
		double value = 0.0;
		try {
			std::size_t used = 0;
			value = std::stod(item.substr(eq + 1), &used);
			if (used != item.size() - eq - 1)
				throw std::invalid_argument("trailing");
		} catch (const std::exception&) {
			throw Error(ErrorKind::invalid_spec, "mix entry '" + item + "' has a bad fraction");
		}
		mix[parse_category(item.substr(0, eq))] = value;
	}
	return mix;
}

struct DatasetConfig {
	std::size_t L_train = 20000;
	std::size_t L_val = 20000;
	/// Empty means N = K.
	std::optional<std::size_t> N;
	/// One-vs-rest target. When empty the run is multi-class.
	std::optional<Category> target;
	/// Multi-class label set; labels outside it become Other (0). Empty keeps labels as-is.
	std::vector<Category> classes;
	RebalanceMode rebalance = RebalanceMode::none;
	double sigma_db = 0.0;
	/// Add validation noise to the raw gains before S_N instead of after.
	bool perturb_before_selection = false;
	bool stratify = false;
};

struct ExperimentConfig {
	std::uint64_t master_seed = 1;

	std::optional<std::string> scene_file;
	SceneSpec scene = scene_preset("london-like");
	bool scene_seed_explicit = false;

	std::optional<std::string> deployment_file;
	DeploymentPreset deployment = london_high_preset();
	bool deployment_seed_explicit = false;

	PropagationParams propagation = PropagationParams::defaults();
	DatasetConfig dataset;
	ForestParams forest;
	bool forest_seed_explicit = false;
	bool include_other_in_macro = true;
};

/// Stream seeds for each randomized stage, derived from the master seed unless pinned.
struct RunSeeds {
	std::uint64_t scene, deployment, drops, shadowing, split, rebalance, perturb, forest;
};

inline RunSeeds run_seeds(const ExperimentConfig& c)
{
	const auto d = [&](std::uint64_t tag) { return derive_seed(c.master_seed, tag); };
	return {
	    c.scene_seed_explicit ? c.scene.seed : d(1),
	    c.deployment_seed_explicit ? c.deployment.seed : d(2),
	    d(3),
	    d(4),
	    d(5),
	    d(6),
	    d(7),
	    c.forest_seed_explicit ? c.forest.seed : d(8),
	};
}

namespace detail {

inline nlohmann::json per_category_to_json(const PerCategory& values)
{
	nlohmann::json j;
	for (const auto& info : category_registry)
		j[std::string(info.name)] = values[info.category];
	return j;
}

inline void per_category_from_json(const nlohmann::json& j, PerCategory& values)
{
	for (const auto& [key, value] : j.items())
		values[parse_category(key)] = value.get<double>();
}

} // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j)
{
	ExperimentConfig c;
	try {
		c.master_seed = j.value("master_seed", std::uint64_t{1});

		if (j.contains("scene")) {
			const auto& s = j.at("scene");
			if (s.contains("file")) {
				c.scene_file = s.at("file").get<std::string>();
			} else {
				if (s.contains("preset"))
					c.scene = scene_preset(s.at("preset").get<std::string>());
				c.scene.side_m = s.value("side_m", c.scene.side_m);
				c.scene.cell_m = s.value("cell_m", c.scene.cell_m);
				if (s.contains("mix")) {
					c.scene.category_mix.clear();
					for (const auto& [key, value] : s.at("mix").items())
						c.scene.category_mix[parse_category(key)] = value.get<double>();
				}
				if (s.contains("seed")) {
					c.scene.seed = s.at("seed").get<std::uint64_t>();
					c.scene_seed_explicit = true;
				}
			}
		}

		if (j.contains("deployment")) {
			const auto& d = j.at("deployment");
			if (d.contains("file")) {
				c.deployment_file = d.at("file").get<std::string>();
			} else {
				if (d.contains("preset"))
					c.deployment = preset_by_name(d.at("preset").get<std::string>(), 0);
				c.deployment.layer_name = d.value("layer_name", c.deployment.layer_name);
				c.deployment.k_or_sites = d.value("k_or_sites", c.deployment.k_or_sites);
				c.deployment.frequency_hz = d.value("frequency_hz", c.deployment.frequency_hz);
				c.deployment.sectored = d.value("sectored", c.deployment.sectored);
				if (d.contains("seed")) {
					c.deployment.seed = d.at("seed").get<std::uint64_t>();
					c.deployment_seed_explicit = true;
				}
			}
		}

		if (j.contains("propagation")) {
			const auto& p = j.at("propagation");
			if (p.contains("exponent"))
				detail::per_category_from_json(p.at("exponent"), c.propagation.exponent_by_category);
			if (p.contains("excess_db_per_m"))
				detail::per_category_from_json(p.at("excess_db_per_m"), c.propagation.excess_db_per_m);
			c.propagation.shadow_sigma_db = p.value("shadow_sigma_db", c.propagation.shadow_sigma_db);
			c.propagation.reference_distance_m = p.value("reference_distance_m", c.propagation.reference_distance_m);
			c.propagation.min_gain_db = p.value("min_gain_db", c.propagation.min_gain_db);
		}

		if (j.contains("dataset")) {
			const auto& d = j.at("dataset");
			c.dataset.L_train = d.value("L_train", c.dataset.L_train);
			c.dataset.L_val = d.value("L_val", c.dataset.L_val);
			if (d.contains("N"))
				c.dataset.N = d.at("N").is_null() ? std::nullopt : std::optional<std::size_t>(d.at("N").get<std::size_t>());
			if (d.contains("target") && !d.at("target").is_null()) {
				const auto& t = d.at("target");
				c.dataset.target = t.is_number() ? category_from_code(t.get<int>()) : parse_category(t.get<std::string>());
			}
			if (d.contains("classes"))
				for (const auto& v : d.at("classes"))
					c.dataset.classes.push_back(v.is_number() ? category_from_code(v.get<int>())
					                                          : parse_category(v.get<std::string>()));
			if (d.contains("rebalance"))
				c.dataset.rebalance = parse_rebalance(d.at("rebalance").get<std::string>());
			c.dataset.sigma_db = d.value("sigma_db", c.dataset.sigma_db);
			c.dataset.perturb_before_selection = d.value("perturb_before_selection", c.dataset.perturb_before_selection);
			c.dataset.stratify = d.value("stratify", c.dataset.stratify);
		}

		if (j.contains("forest")) {
			c.forest = forest_params_from_json(j.at("forest"), c.forest);
			c.forest_seed_explicit = j.at("forest").contains("seed");
		}

		if (j.contains("metrics"))
			c.include_other_in_macro = j.at("metrics").value("include_other_in_macro", c.include_other_in_macro);
	} catch (const nlohmann::json::exception& e) {
		throw Error(ErrorKind::invalid_spec, std::string("bad config: ") + e.what());
	}
	if (c.dataset.L_train < 1 || c.dataset.L_val < 1)
		throw Error(ErrorKind::invalid_spec, "L_train and L_val must be positive");
	if (!(c.dataset.sigma_db >= 0.0))
		throw Error(ErrorKind::invalid_spec, "sigma_db must be nonnegative");
	return c;
}

/// Canonical echo of the resolved configuration; its hash identifies a run.
inline nlohmann::json config_to_json(const ExperimentConfig& c)
{
	nlohmann::json j;
	j["master_seed"] = c.master_seed;
	if (c.scene_file) {
		j["scene"] = {{"file", *c.scene_file}};
	} else {
		nlohmann::json mix;
		for (const auto& [cat, f] : c.scene.category_mix)
			mix[std::string(name_of(cat))] = f;
		j["scene"] = {{"side_m", c.scene.side_m}, {"cell_m", c.scene.cell_m}, {"mix", mix}};
		if (c.scene_seed_explicit)
			j["scene"]["seed"] = c.scene.seed;
	}
	if (c.deployment_file) {
		j["deployment"] = {{"file", *c.deployment_file}};
	} else {
		j["deployment"] = {{"layer_name", c.deployment.layer_name},
		                   {"k_or_sites", c.deployment.k_or_sites},
		                   {"frequency_hz", c.deployment.frequency_hz},
		                   {"sectored", c.deployment.sectored}};
		if (c.deployment_seed_explicit)
			j["deployment"]["seed"] = c.deployment.seed;
	}
	j["propagation"] = {{"exponent", detail::per_category_to_json(c.propagation.exponent_by_category)},
	                    {"excess_db_per_m", detail::per_category_to_json(c.propagation.excess_db_per_m)},
	                    {"shadow_sigma_db", c.propagation.shadow_sigma_db},
	                    {"reference_distance_m", c.propagation.reference_distance_m},
	                    {"min_gain_db", c.propagation.min_gain_db}};
	nlohmann::json classes = nlohmann::json::array();
	for (Category cat : c.dataset.classes)
		classes.push_back(code_of(cat));
	j["dataset"] = {{"L_train", c.dataset.L_train},
	                {"L_val", c.dataset.L_val},
	                {"N", c.dataset.N ? nlohmann::json(*c.dataset.N) : nlohmann::json(nullptr)},
	                {"target", c.dataset.target ? nlohmann::json(code_of(*c.dataset.target)) : nlohmann::json(nullptr)},
	                {"classes", classes},
	                {"rebalance", to_string(c.dataset.rebalance)},
	                {"sigma_db", c.dataset.sigma_db},
	                {"perturb_before_selection", c.dataset.perturb_before_selection},
	                {"stratify", c.dataset.stratify}};
	j["forest"] = forest_params_to_json(c.forest);
	if (!c.forest_seed_explicit)
		j["forest"].erase("seed");
	j["metrics"] = {{"include_other_in_macro", c.include_other_in_macro}};
	return j;
}

inline std::string config_hash(const ExperimentConfig& c) { return sha256_hex(config_to_json(c).dump()); }

/// {tool version, config hash, master seed}, embedded in every artifact.
inline nlohmann::json provenance(const ExperimentConfig& c)
{
	return {{"tool_version", kToolVersion}, {"config_hash", config_hash(c)}, {"master_seed", c.master_seed}};
}

// ---------------------------------------------------------------------------------------
// Pipeline stages

/// Scene, stations, drops and unmasked gains for one configuration.
struct PreparedRun {
	SceneMap scene;
	Deployment deployment;
	std::vector<UEDrop> drops;
	std::vector<PathGainVector> gains;
	/// Positions of train rows / validation rows within drops.
	std::vector<std::size_t> train_index;
	std::vector<std::size_t> val_index;
	RunSeeds seeds;
};

inline SceneMap load_or_generate_scene(const ExperimentConfig& c, const RunSeeds& seeds)
{
	if (c.scene_file)
		return scene_from_json(parse_json(read_file(*c.scene_file), *c.scene_file));
	SceneSpec spec = c.scene;
	spec.seed = seeds.scene;
	return generate_scene(spec);
}

inline Deployment load_or_deploy(const ExperimentConfig& c, const SceneMap& scene, const RunSeeds& seeds)
{
	if (c.deployment_file)
		return deployment_from_json(parse_json(read_file(*c.deployment_file), *c.deployment_file));
	DeploymentPreset preset = c.deployment;
	preset.seed = seeds.deployment;
	return deploy_basestations(scene, preset);
}

inline PreparedRun prepare_run(const ExperimentConfig& c)
{
	const RunSeeds seeds = run_seeds(c);
	SceneMap scene = load_or_generate_scene(c, seeds);
	Deployment deployment = load_or_deploy(c, scene, seeds);
	const std::size_t total = c.dataset.L_train + c.dataset.L_val;
	auto drops = sample_ue_drops(scene, total, seeds.drops,
	                             c.dataset.stratify ? std::optional<std::vector<Category>>(std::vector<Category>{})
	                                                : std::nullopt);
	auto gains = compute_gains(scene, deployment, drops, c.propagation, seeds.shadowing);

	std::vector<std::size_t> order(total);
	std::iota(order.begin(), order.end(), std::size_t{0});
	Rng rng(seeds.split, 0x5b17);
	rng.shuffle(std::span(order));
	std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(c.dataset.L_train));
	std::vector<std::size_t> val(order.begin() + static_cast<std::ptrdiff_t>(c.dataset.L_train), order.end());
	return {std::move(scene), std::move(deployment), std::move(drops), std::move(gains),
	        std::move(train), std::move(val), seeds};
}

inline std::size_t resolved_n(const ExperimentConfig& c, std::size_t K)
{
	const std::size_t N = c.dataset.N.value_or(K);
	if (N < 1 || N > K)
		throw Error(ErrorKind::invalid_n, "N=" + std::to_string(N) + " outside [1, " + std::to_string(K) + "]");
	return N;
}

/// Applies the configured label space: one-vs-rest, a multi-class subset, or raw codes.
inline Dataset apply_label_space(const Dataset& ds, const DatasetConfig& d)
{
	if (d.target)
		return binarize_labels(ds, *d.target);
	if (!d.classes.empty())
		return collapse_labels(ds, d.classes);
	return ds;
}

struct SplitDatasets {
	Dataset train;
	Dataset val;
};

/// Masked train / validation sets for one N. Validation noise of `sigma_db` is drawn from
/// stream `perturb_seed`, either on the raw gains or after masking.
inline SplitDatasets make_datasets(const ExperimentConfig& c, const PreparedRun& run, std::size_t N, double sigma_db)
{
	const auto pick = [&](const std::vector<std::size_t>& index) {
		std::vector<PathGainVector> out;
		out.reserve(index.size());
		for (auto i : index)
			out.push_back(run.gains[i]);
		return out;
	};
	const double floor_db = c.propagation.min_gain_db;
	auto train_gains = pick(run.train_index);
	auto val_gains = pick(run.val_index);
	if (sigma_db > 0.0 && c.dataset.perturb_before_selection) {
		for (std::size_t i = 0; i < val_gains.size(); ++i) {
			Rng rng(run.seeds.perturb, i);
			for (double& g : val_gains[i].gains_db)
				if (g > floor_db)
					g = std::max(g + rng.normal(0.0, sigma_db), floor_db);
		}
	}
	Dataset train = dataset_from_gains(train_gains, N, run.deployment.layer_name, c.master_seed, floor_db);
	Dataset val = dataset_from_gains(val_gains, N, run.deployment.layer_name, c.master_seed, floor_db);
	if (sigma_db > 0.0) {
		if (c.dataset.perturb_before_selection)
			val.sigma_db = sigma_db;
		else
			val = perturb(val, sigma_db, run.seeds.perturb);
	}
	train = apply_label_space(train, c.dataset);
	val = apply_label_space(val, c.dataset);
	if (c.dataset.rebalance != RebalanceMode::none)
		train = rebalance(train, c.dataset.rebalance, run.seeds.rebalance);
	return {std::move(train), std::move(val)};
}

struct Evaluation {
	ConfusionMatrix confusion{{}};
	ScoreReport report;
	std::vector<int> truths;
	std::vector<int> predictions;
};

/// Classes of the macro average: every matrix class, minus Other for multi-class runs when
/// include_other is off.
inline std::vector<int> macro_class_set(const ConfusionMatrix& cm, bool binary, bool include_other)
{
	std::vector<int> out;
	for (int code : cm.classes())
		if (binary || include_other || code != code_of(Category::Other))
			out.push_back(code);
	if (out.empty())
		out = cm.classes();
	return out;
}

inline Evaluation evaluate(const ForestModel& model, const Dataset& val, bool include_other_in_macro = true)
{
	if (val.K != model.K)
		throw Error(ErrorKind::invalid_features, "dataset K=" + std::to_string(val.K) +
		                                             " does not match model K=" + std::to_string(model.K));
	Evaluation e;
	e.predictions = predict_labels(model, val);
	e.truths.reserve(val.L());
	for (const auto& r : val.rows)
		e.truths.push_back(r.label);
	std::vector<int> classes = model.classes;
	classes.insert(classes.end(), e.truths.begin(), e.truths.end());
	std::ranges::sort(classes);
	classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
	e.confusion = confusion_matrix(e.truths, e.predictions, classes);
	e.report = macro_scores(e.confusion, macro_class_set(e.confusion, val.binary_target.has_value(), include_other_in_macro));
	return e;
}

/// Headline precision / recall: the positive class for one-vs-rest runs, the macro average
/// otherwise.
inline std::pair<double, double> headline_scores(const Evaluation& e, bool binary)
{
	if (binary) {
		const auto it = e.report.per_class.find(1);
		if (it == e.report.per_class.end())
			return {0.0, 0.0};
		return {it->second.precision.value, it->second.recall.value};
	}
	return {e.report.macro_precision, e.report.macro_recall};
}

inline nlohmann::json seeds_to_json(const RunSeeds& s)
{
	return {{"scene", s.scene},         {"deployment", s.deployment}, {"drops", s.drops},
	        {"shadowing", s.shadowing}, {"split", s.split},           {"rebalance", s.rebalance},
	        {"perturb", s.perturb},     {"forest", s.forest}};
}

/// Report JSON: provenance, config echo, per-class and macro scores, confusion counts.
inline nlohmann::json report_to_json(const Evaluation& e, const nlohmann::json& provenance_block,
                                     const nlohmann::json& config_echo, const nlohmann::json& seeds, const Dataset& val)
{
	nlohmann::json j;
	j["format"] = kFileFormat;
	j["provenance"] = provenance_block;
	j["seeds"] = seeds;
	j["config"] = config_echo;
	j["binary_target"] = val.binary_target ? nlohmann::json(code_of(*val.binary_target)) : nlohmann::json(nullptr);
	j["validation"] = {{"L", val.L()}, {"N", val.N}, {"K", val.K}, {"sigma_db", val.sigma_db}};

	nlohmann::json per_class;
	for (const auto& [code, s] : e.report.per_class) {
		per_class[std::to_string(code)] = {{"precision", s.precision.value},
		                                   {"precision_undefined", s.precision.degenerate},
		                                   {"recall", s.recall.value},
		                                   {"recall_undefined", s.recall.degenerate},
		                                   {"support", s.support}};
	}
	j["per_class"] = per_class;
	j["macro"] = {{"classes", e.report.macro_classes},
	              {"precision", e.report.macro_precision},
	              {"recall", e.report.macro_recall}};
	nlohmann::json counts = nlohmann::json::array();
	for (std::size_t i = 0; i < e.confusion.size(); ++i) {
		nlohmann::json row = nlohmann::json::array();
		for (std::size_t k = 0; k < e.confusion.size(); ++k)
			row.push_back(e.confusion.count(i, k));
		counts.push_back(row);
	}
	j["confusion"] = {{"classes", e.confusion.classes()}, {"counts", counts}};
	return j;
}

struct ExperimentResult {
	PreparedRun run;
	SplitDatasets data;
	ForestModel model;
	Evaluation evaluation;
	nlohmann::json report;
};

/// Full one-shot experiment: build (or load) scene and stations, drop UEs, compute gains,
/// mask, label, rebalance the training part, train, evaluate on the (optionally perturbed)
/// validation part.
inline ExperimentResult run_experiment(const ExperimentConfig& c)
{
	ExperimentResult r{prepare_run(c), {}, {}, {}, {}};
	const std::size_t N = resolved_n(c, r.run.deployment.K());
	r.data = make_datasets(c, r.run, N, c.dataset.sigma_db);
	ForestParams fp = c.forest;
	fp.seed = r.run.seeds.forest;
	r.model = train_forest(r.data.train, fp);
	r.evaluation = evaluate(r.model, r.data.val, c.include_other_in_macro);
	r.report = report_to_json(r.evaluation, provenance(c), config_to_json(c), seeds_to_json(r.run.seeds), r.data.val);
	return r;
}

// ---------------------------------------------------------------------------------------
// Sweeps

struct SweepCell {
	std::size_t N = 0;
	double sigma_db = 0.0;
	std::size_t replicate = 0;
	std::string metric;
	double value = 0.0;
};

struct SweepResult {
	std::vector<std::size_t> n_axis;
	std::vector<double> sigma_axis;
	std::vector<std::uint64_t> replicate_seeds;
	std::vector<SweepCell> cells;

	/// Per-replicate values of one metric at (N, sigma), in replicate order.
	std::vector<double> values(const std::string& metric, std::size_t N, double sigma) const
	{
		std::vector<double> out;
		for (const auto& c : cells)
			if (c.metric == metric && c.N == N && c.sigma_db == sigma)
				out.push_back(c.value);
		return out;
	}

	/// Mean across replicates for every N, keyed by (metric, sigma).
	std::map<std::pair<std::string, double>, std::vector<double>> series() const
	{
		std::map<std::pair<std::string, double>, std::vector<double>> out;
		for (const auto& metric : {std::string("precision"), std::string("recall")})
			for (double s : sigma_axis) {
				auto& line = out[{metric, s}];
				for (std::size_t n : n_axis) {
					const auto v = values(metric, n, s);
					line.push_back(v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
				}
			}
		return out;
	}
};

inline double median(std::vector<double> v)
{
	if (v.empty())
		return 0.0;
	std::ranges::sort(v);
	const std::size_t m = v.size() / 2;
	return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Trains and evaluates every (N, sigma, replicate) cell. Replicate r runs the whole pipeline
/// under master seed derive_seed(master, r); within a replicate the drops, shadowing and
/// noise draws are shared across N and sigma so the comparisons are paired. One forest is
/// trained per (replicate, N) since noise only touches the validation part.
inline SweepResult sweep_n(const ExperimentConfig& config, const std::vector<std::size_t>& n_values,
                           const std::vector<double>& sigma_values, std::size_t replicates)
{
	if (n_values.empty() || sigma_values.empty() || replicates < 1)
		throw Error(ErrorKind::invalid_spec, "sweep needs N values, sigma values and at least one replicate");
	SweepResult out;
	out.n_axis = n_values;
	out.sigma_axis = sigma_values;
	for (std::size_t r = 0; r < replicates; ++r) {
		ExperimentConfig c = config;
		c.master_seed = derive_seed(config.master_seed, 1000 + r);
		out.replicate_seeds.push_back(c.master_seed);
		const PreparedRun run = prepare_run(c);
		for (std::size_t N : n_values) {
			if (N < 1 || N > run.deployment.K())
				throw Error(ErrorKind::invalid_n, "sweep N=" + std::to_string(N) + " outside [1, K]");
			const auto clean = make_datasets(c, run, N, 0.0);
			ForestParams fp = c.forest;
			fp.seed = run.seeds.forest;
			const auto model = train_forest(clean.train, fp);
			for (double sigma : sigma_values) {
				const auto val = sigma > 0.0 ? make_datasets(c, run, N, sigma).val : clean.val;
				const auto e = evaluate(model, val, c.include_other_in_macro);
				const auto [p, rc] = headline_scores(e, val.binary_target.has_value());
				out.cells.push_back({N, sigma, r, "precision", p});
				out.cells.push_back({N, sigma, r, "recall", rc});
			}
		}
	}
	return out;
}

inline std::string sweep_to_csv(const SweepResult& s)
{
	std::string out = "N,sigma_db,replicate,metric,value\n";
	char buf[96];
	for (const auto& c : s.cells) {
		std::snprintf(buf, sizeof buf, "%zu,%.4f,%zu,%s,%.6f\n", c.N, c.sigma_db, c.replicate, c.metric.c_str(), c.value);
		out += buf;
	}
	return out;
}

} // namespace landsense
