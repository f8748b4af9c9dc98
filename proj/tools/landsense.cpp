// landsense: scene generation, deployment, dataset build, training, evaluation and sweeps.
//
// Exit codes: 0 success, 2 invalid arguments or config, 3 missing inputs, 4 internal error.

#include <landsense/landsense.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace landsense;
using nlohmann::json;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitMissing = 3;
constexpr int kExitInternal = 4;

/// Records an artifact (sha256 and size) in OUT/manifest.json, keeping earlier entries.
void record_artifact(const fs::path& out_dir, const fs::path& file, const std::string& content)
{
	const fs::path manifest_path = out_dir / "manifest.json";
	json manifest = {{"format", kFileFormat}, {"tool_version", kToolVersion}, {"artifacts", json::object()}};
	if (fs::exists(manifest_path)) {
		try {
			manifest = json::parse(read_file(manifest_path));
		} catch (const json::exception&) {
		}
	}
	manifest["artifacts"][file.filename().string()] = {{"sha256", sha256_hex(content)}, {"bytes", content.size()}};
	write_file(manifest_path, manifest.dump(2) + "\n");
}

void emit(const fs::path& out_dir, const std::string& name, const std::string& content)
{
	const fs::path path = out_dir / name;
	write_file(path, content);
	record_artifact(out_dir, path, content);
	std::cout << "wrote " << path.string() << "\n";
}

void require_file(const std::string& path)
{
	if (!fs::exists(path))
		throw Error(ErrorKind::missing_file, "input file '" + path + "' does not exist");
}

json load_json_file(const std::string& path)
{
	require_file(path);
	return parse_json(read_file(path), path);
}

std::vector<std::size_t> parse_size_list(const std::string& text)
{
	std::vector<std::size_t> out;
	std::size_t pos = 0;
	while (pos <= text.size()) {
		const auto comma = text.find(',', pos);
		const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
		if (!item.empty()) {
			try {
				out.push_back(static_cast<std::size_t>(std::stoull(item)));
			} catch (const std::exception&) {
				throw Error(ErrorKind::invalid_spec, "'" + item + "' is not a count");
			}
		}
		if (comma == std::string::npos)
			break;
		pos = comma + 1;
	}
	return out;
}

std::vector<double> parse_double_list(const std::string& text)
{
	std::vector<double> out;
	std::size_t pos = 0;
	while (pos <= text.size()) {
		const auto comma = text.find(',', pos);
		const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
		if (!item.empty()) {
			try {
				out.push_back(std::stod(item));
			} catch (const std::exception&) {
				throw Error(ErrorKind::invalid_spec, "'" + item + "' is not a number");
			}
		}
		if (comma == std::string::npos)
			break;
		pos = comma + 1;
	}
	return out;
}

std::vector<Category> parse_category_list(const std::string& text)
{
	std::vector<Category> out;
	std::size_t pos = 0;
	while (pos <= text.size()) {
		const auto comma = text.find(',', pos);
		const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
		if (!item.empty())
			out.push_back(parse_category(item));
		if (comma == std::string::npos)
			break;
		pos = comma + 1;
	}
	return out;
}

/// Flags shared by the config-driven commands; set values override the config file.
struct Overrides {
	std::string config_path;
	std::optional<std::uint64_t> seed;
	std::optional<std::size_t> top_n;
	std::optional<double> sigma_db;
	std::string binarize;
	std::string rebalance;
	std::optional<std::size_t> n_trees;
	std::optional<std::size_t> rows;

	void attach(CLI::App* cmd, bool config_required)
	{
		auto* opt = cmd->add_option("--config", config_path, "Experiment config (JSON)");
		if (config_required)
			opt->required();
		cmd->add_option("--seed", seed, "Master seed");
		cmd->add_option("--top-n", top_n, "S_N parameter N");
		cmd->add_option("--sigma-db", sigma_db, "Validation perturbation sigma (dB)");
		cmd->add_option("--binarize", binarize, "One-vs-rest target category");
		cmd->add_option("--rebalance", rebalance, "none | undersample | oversample");
		cmd->add_option("--n-trees", n_trees, "Trees in the forest");
		cmd->add_option("--rows", rows, "Training rows (validation uses the same count)");
	}

	ExperimentConfig resolve() const
	{
		ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : config_from_json(load_json_file(config_path));
		if (seed)
			c.master_seed = *seed;
		if (top_n)
			c.dataset.N = *top_n;
		if (sigma_db)
			c.dataset.sigma_db = *sigma_db;
		if (!binarize.empty())
			c.dataset.target = parse_category(binarize);
		if (!rebalance.empty())
			c.dataset.rebalance = parse_rebalance(rebalance);
		if (n_trees)
			c.forest.n_trees = *n_trees;
		if (rows)
			c.dataset.L_train = c.dataset.L_val = *rows;
		if (!(c.dataset.sigma_db >= 0.0))
			throw Error(ErrorKind::invalid_spec, "sigma must be nonnegative");
		return c;
	}
};

json plain_provenance(std::uint64_t seed, const json& echo)
{
	return {{"tool_version", kToolVersion}, {"config_hash", sha256_hex(echo.dump())}, {"master_seed", seed}};
}

void print_fractions(const SceneMap& scene)
{
	for (const auto& [c, f] : category_fractions(scene))
		std::printf("%-9s %2d  %.4f\n", std::string(name_of(c)).c_str(), code_of(c), f);
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"landsense: landscape sensing from base-station path-gains"};
	app.require_subcommand(1);
	std::string out_dir = ".";
	std::optional<std::size_t> threads;
	app.add_option("--out", out_dir, "Output directory")->capture_default_str();
	app.add_option("--threads", threads, "Worker cap (same as LANDSENSE_THREADS)");

	// scene
	auto* scene_cmd = app.add_subcommand("scene", "Generate a procedural landscape map");
	std::string scene_preset_name;
	std::string mix_text;
	double side_m = 1000.0, cell_m = kDefaultCellM;
	std::uint64_t scene_seed = 1;
	scene_cmd->add_option("--preset", scene_preset_name, "london-like | skewed-urban");
	scene_cmd->add_option("--mix", mix_text, "cat=frac,... (remainder is Other)");
	scene_cmd->add_option("--side-m", side_m, "Region side (m)")->capture_default_str();
	scene_cmd->add_option("--cell-m", cell_m, "Raster cell (m)")->capture_default_str();
	scene_cmd->add_option("--seed", scene_seed, "Seed")->capture_default_str();
	scene_cmd->add_option("--out", out_dir, "Output directory");

	// deploy
	auto* deploy_cmd = app.add_subcommand("deploy", "Place a base-station layer on a scene");
	std::string scene_path, deploy_preset = "london-high", layer_name;
	std::optional<std::size_t> k_or_sites;
	std::optional<double> frequency_hz;
	bool sectored = false;
	std::uint64_t deploy_seed = 1;
	deploy_cmd->add_option("--scene", scene_path, "Scene JSON")->required();
	deploy_cmd->add_option("--preset", deploy_preset, "london-low | london-high")->capture_default_str();
	deploy_cmd->add_option("--k-or-sites", k_or_sites, "Stations (omni) or sites (sectored)");
	deploy_cmd->add_option("--frequency-hz", frequency_hz, "Carrier frequency");
	deploy_cmd->add_flag("--sectored", sectored, "Three sectors per site");
	deploy_cmd->add_option("--layer-name", layer_name, "Layer name");
	deploy_cmd->add_option("--seed", deploy_seed, "Seed")->capture_default_str();
	deploy_cmd->add_option("--out", out_dir, "Output directory");

	// dataset
	auto* dataset_cmd = app.add_subcommand("dataset", "Drop UEs and write an S_N-masked path-gain dataset");
	std::string deployment_path, dataset_name = "dataset", prop_config;
	std::size_t rows = 20000;
	std::optional<std::size_t> top_n;
	std::uint64_t dataset_seed = 1;
	bool stratify = false;
	dataset_cmd->add_option("--scene", scene_path, "Scene JSON")->required();
	dataset_cmd->add_option("--deployment", deployment_path, "Deployment JSON")->required();
	dataset_cmd->add_option("--rows", rows, "Number of UE drops / rows")->capture_default_str();
	dataset_cmd->add_option("--top-n", top_n, "S_N parameter N (default K)");
	dataset_cmd->add_option("--seed", dataset_seed, "Seed")->capture_default_str();
	dataset_cmd->add_option("--config", prop_config, "Config file supplying propagation params");
	dataset_cmd->add_option("--name", dataset_name, "Output base name")->capture_default_str();
	dataset_cmd->add_flag("--stratify", stratify, "Equal drops per category present");
	dataset_cmd->add_option("--out", out_dir, "Output directory");

	// train
	auto* train_cmd = app.add_subcommand("train", "Train a random forest on a dataset CSV");
	std::string dataset_path, binarize, rebalance_text, classes_text, forest_config;
	std::uint64_t train_seed = 1;
	std::optional<std::size_t> n_trees, max_depth, features_per_split;
	train_cmd->add_option("--dataset", dataset_path, "Dataset CSV")->required();
	train_cmd->add_option("--config", forest_config, "Config file supplying forest params");
	train_cmd->add_option("--binarize", binarize, "One-vs-rest target category");
	train_cmd->add_option("--classes", classes_text, "Multi-class label set; others become 0");
	train_cmd->add_option("--rebalance", rebalance_text, "none | undersample | oversample");
	train_cmd->add_option("--n-trees", n_trees, "Trees");
	train_cmd->add_option("--max-depth", max_depth, "Depth cap");
	train_cmd->add_option("--features-per-split", features_per_split, "Features drawn per node");
	train_cmd->add_option("--seed", train_seed, "Seed")->capture_default_str();
	train_cmd->add_option("--out", out_dir, "Output directory");

	// eval
	auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a dataset CSV");
	std::string model_path;
	double sigma_db = 0.0;
	std::uint64_t eval_seed = 1;
	bool exclude_other = false;
	eval_cmd->add_option("--model", model_path, "Model JSON")->required();
	eval_cmd->add_option("--dataset", dataset_path, "Validation dataset CSV")->required();
	eval_cmd->add_option("--sigma-db", sigma_db, "Perturbation sigma (dB)")->capture_default_str();
	eval_cmd->add_option("--binarize", binarize, "One-vs-rest target category");
	eval_cmd->add_option("--classes", classes_text, "Multi-class label set; others become 0");
	eval_cmd->add_option("--rebalance", rebalance_text, "Rebalance the evaluation rows");
	eval_cmd->add_flag("--exclude-other", exclude_other, "Leave class 0 out of macro averages");
	eval_cmd->add_option("--seed", eval_seed, "Seed for perturbation / rebalancing")->capture_default_str();
	eval_cmd->add_option("--out", out_dir, "Output directory");

	// sweep
	auto* sweep_cmd = app.add_subcommand("sweep", "Sweep N and sigma over replicates");
	Overrides sweep_over;
	sweep_over.attach(sweep_cmd, true);
	std::string n_values_text = "2,5,10,20", sigma_values_text = "0";
	std::size_t replicates = 5;
	sweep_cmd->add_option("--n-values", n_values_text, "Comma-separated N values")->capture_default_str();
	sweep_cmd->add_option("--sigma-values", sigma_values_text, "Comma-separated sigma values")->capture_default_str();
	sweep_cmd->add_option("--replicates", replicates, "Replicates")->capture_default_str();
	sweep_cmd->add_option("--out", out_dir, "Output directory");

	// pipeline
	auto* pipeline_cmd = app.add_subcommand("pipeline", "Scene to report in one run");
	Overrides pipe_over;
	pipe_over.attach(pipeline_cmd, true);
	pipeline_cmd->add_option("--out", out_dir, "Output directory");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e);
		return code == 0 ? 0 : kExitInvalid;
	}

	if (threads)
		setenv("LANDSENSE_THREADS", std::to_string(*threads).c_str(), 1);
	const fs::path out = out_dir;

	try {
		if (*scene_cmd) {
			SceneSpec spec = scene_preset_name.empty() ? SceneSpec{} : scene_preset(scene_preset_name);
			if (!mix_text.empty())
				spec.category_mix = parse_mix(mix_text);
			if (scene_cmd->count("--side-m") || scene_preset_name.empty())
				spec.side_m = side_m;
			if (scene_cmd->count("--cell-m") || scene_preset_name.empty())
				spec.cell_m = cell_m;
			spec.seed = scene_seed;
			const SceneMap scene = generate_scene(spec);
			json j = scene_to_json(scene);
			json echo = {{"command", "scene"}, {"preset", scene_preset_name}, {"mix", mix_text},
			             {"side_m", spec.side_m}, {"cell_m", spec.cell_m}, {"seed", scene_seed}};
			j["provenance"] = plain_provenance(scene_seed, echo);
			emit(out, "scene.json", j.dump() + "\n");
			print_fractions(scene);
		} else if (*deploy_cmd) {
			const SceneMap scene = scene_from_json(load_json_file(scene_path));
			DeploymentPreset preset = preset_by_name(deploy_preset, deploy_seed);
			if (k_or_sites)
				preset.k_or_sites = *k_or_sites;
			if (frequency_hz)
				preset.frequency_hz = *frequency_hz;
			if (deploy_cmd->count("--sectored"))
				preset.sectored = sectored;
			if (!layer_name.empty())
				preset.layer_name = layer_name;
			const Deployment d = deploy_basestations(scene, preset);
			json j = deployment_to_json(d);
			json echo = {{"command", "deploy"}, {"scene_sha256", sha256_hex(read_file(scene_path))},
			             {"preset", deploy_preset}, {"k_or_sites", preset.k_or_sites},
			             {"frequency_hz", preset.frequency_hz}, {"sectored", preset.sectored}, {"seed", deploy_seed}};
			j["provenance"] = plain_provenance(deploy_seed, echo);
			emit(out, "deployment.json", j.dump(2) + "\n");
			std::cout << d.layer_name << ": K=" << d.K() << " at " << d.frequency_hz() << " Hz\n";
		} else if (*dataset_cmd) {
			const SceneMap scene = scene_from_json(load_json_file(scene_path));
			const Deployment d = deployment_from_json(load_json_file(deployment_path));
			PropagationParams params = PropagationParams::defaults();
			if (!prop_config.empty())
				params = config_from_json(load_json_file(prop_config)).propagation;
			const std::size_t N = top_n.value_or(d.K());
			if (N < 1 || N > d.K())
				throw Error(ErrorKind::invalid_n, "--top-n " + std::to_string(N) + " outside [1, " +
				                                      std::to_string(d.K()) + "]");
			const auto drops = sample_ue_drops(
			    scene, rows, derive_seed(dataset_seed, 3),
			    stratify ? std::optional<std::vector<Category>>(std::vector<Category>{}) : std::nullopt);
			Dataset ds = build_dataset(scene, d, drops, N, params, derive_seed(dataset_seed, 4));
			ds.seed = dataset_seed;
			json meta = dataset_meta(ds);
			json echo = {{"command", "dataset"}, {"scene_sha256", sha256_hex(read_file(scene_path))},
			             {"deployment_sha256", sha256_hex(read_file(deployment_path))}, {"rows", rows},
			             {"top_n", N}, {"stratify", stratify}, {"seed", dataset_seed}};
			meta["provenance"] = plain_provenance(dataset_seed, echo);
			emit(out, dataset_name + ".csv", dataset_to_csv(ds));
			emit(out, dataset_name + ".meta.json", meta.dump(2) + "\n");
		} else if (*train_cmd) {
			require_file(dataset_path);
			Dataset ds = load_dataset(dataset_path);
			if (!binarize.empty())
				ds = binarize_labels(ds, parse_category(binarize));
			else if (!classes_text.empty())
				ds = collapse_labels(ds, parse_category_list(classes_text));
			if (!rebalance_text.empty())
				ds = rebalance(ds, parse_rebalance(rebalance_text), derive_seed(train_seed, 6));
			ForestParams fp;
			if (!forest_config.empty())
				fp = config_from_json(load_json_file(forest_config)).forest;
			if (n_trees)
				fp.n_trees = *n_trees;
			if (max_depth)
				fp.max_depth = *max_depth;
			if (features_per_split)
				fp.features_per_split = *features_per_split;
			fp.seed = train_seed;
			const ForestModel model = train_forest(ds, fp);
			json echo = {{"command", "train"}, {"dataset_sha256", sha256_hex(read_file(dataset_path))},
			             {"binarize", binarize}, {"classes", classes_text}, {"rebalance", rebalance_text},
			             {"forest", forest_params_to_json(fp)}};
			emit(out, "model.json", serialize(model, plain_provenance(train_seed, echo)));
		} else if (*eval_cmd) {
			require_file(model_path);
			require_file(dataset_path);
			const ForestModel model = deserialize(read_file(model_path));
			Dataset ds = load_dataset(dataset_path);
			if (ds.K != model.K)
				throw Error(ErrorKind::invalid_features, "dataset K=" + std::to_string(ds.K) +
				                                             " but model K=" + std::to_string(model.K));
			ds = perturb(ds, sigma_db, derive_seed(eval_seed, 7));
			if (!binarize.empty())
				ds = binarize_labels(ds, parse_category(binarize));
			else if (!classes_text.empty())
				ds = collapse_labels(ds, parse_category_list(classes_text));
			if (!rebalance_text.empty())
				ds = rebalance(ds, parse_rebalance(rebalance_text), derive_seed(eval_seed, 6));
			const Evaluation e = evaluate(model, ds, !exclude_other);
			json echo = {{"command", "eval"},
			             {"model_sha256", sha256_hex(read_file(model_path))},
			             {"dataset_sha256", sha256_hex(read_file(dataset_path))},
			             {"sigma_db", sigma_db},
			             {"binarize", binarize},
			             {"classes", classes_text},
			             {"rebalance", rebalance_text},
			             {"exclude_other", exclude_other}};
			const json report = report_to_json(e, plain_provenance(eval_seed, echo), echo,
			                                   {{"perturb", derive_seed(eval_seed, 7)}}, ds);
			emit(out, "report.json", report.dump(2) + "\n");
			std::printf("macro precision %.4f  macro recall %.4f\n", e.report.macro_precision, e.report.macro_recall);
		} else if (*sweep_cmd) {
			const ExperimentConfig c = sweep_over.resolve();
			const auto n_values = parse_size_list(n_values_text);
			const auto sigma_values = parse_double_list(sigma_values_text);
			const SweepResult s = sweep_n(c, n_values, sigma_values, replicates);
			emit(out, "sweep.csv", sweep_to_csv(s));
			json summary = {{"format", kFileFormat},
			                {"provenance", provenance(c)},
			                {"n_values", s.n_axis},
			                {"sigma_values", s.sigma_axis},
			                {"replicate_seeds", s.replicate_seeds}};
			for (const auto& [key, line] : s.series())
				summary["mean"][key.first][format_db(key.second)] = line;
			emit(out, "sweep.json", summary.dump(2) + "\n");
		} else if (*pipeline_cmd) {
			const ExperimentConfig c = pipe_over.resolve();
			const ExperimentResult r = run_experiment(c);
			const json prov = provenance(c);
			json scene_j = scene_to_json(r.run.scene);
			scene_j["provenance"] = prov;
			json deploy_j = deployment_to_json(r.run.deployment);
			deploy_j["provenance"] = prov;
			json train_meta = dataset_meta(r.data.train);
			train_meta["provenance"] = prov;
			json val_meta = dataset_meta(r.data.val);
			val_meta["provenance"] = prov;
			emit(out, "config.json", config_to_json(c).dump(2) + "\n");
			emit(out, "scene.json", scene_j.dump() + "\n");
			emit(out, "deployment.json", deploy_j.dump(2) + "\n");
			emit(out, "train.csv", dataset_to_csv(r.data.train));
			emit(out, "train.meta.json", train_meta.dump(2) + "\n");
			emit(out, "val.csv", dataset_to_csv(r.data.val));
			emit(out, "val.meta.json", val_meta.dump(2) + "\n");
			emit(out, "model.json", serialize(r.model, prov));
			emit(out, "report.json", r.report.dump(2) + "\n");
			for (const auto& [code, s] : r.evaluation.report.per_class)
				std::printf("class %2d  precision %.4f  recall %.4f  support %llu\n", code, s.precision.value,
				            s.recall.value, static_cast<unsigned long long>(s.support));
			std::printf("macro precision %.4f  macro recall %.4f\n", r.evaluation.report.macro_precision,
			            r.evaluation.report.macro_recall);
		}
	} catch (const Error& e) {
		std::cerr << "error: " << e.what() << "\n";
		return e.kind() == ErrorKind::missing_file ? kExitMissing : kExitInvalid;
	} catch (const std::exception& e) {
		std::cerr << "internal error: " << e.what() << "\n";
		return kExitInternal;
	}
	return 0;
}
