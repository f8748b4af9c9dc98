// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero if any fails.
// Pass criterion numbers as arguments to run a subset, e.g. `acceptance 5 6 7`.

#include "oracles.hpp"

#include <landsense/landsense.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>

#ifndef LANDSENSE_CLI_PATH
#error "LANDSENSE_CLI_PATH must point at the landsense executable"
#endif

using namespace landsense;
namespace fs = std::filesystem;

namespace {

struct Outcome {
	bool pass = false;
	std::string detail;
};

std::string fmt(const char* f, auto... args)
{
	char buf[512];
	std::snprintf(buf, sizeof buf, f, args...);
	return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
	return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// 1 km^2 london-like scene, 5 GHz K=54 layer, L = 20000 / 20000, N = K, no noise.
ExperimentConfig desk_scale_config()
{
	ExperimentConfig c;
	c.master_seed = 1;
	c.scene = scene_preset("london-like");
	c.deployment = london_high_preset();
	c.dataset.L_train = 20000;
	c.dataset.L_val = 20000;
	c.forest.n_trees = 100;
	return c;
}

/// Models trained by criterion 1, reused by criterion 9.
std::vector<std::pair<ForestModel, Dataset>> trained_models;

Outcome binary_detection()
{
	const auto t0 = std::chrono::steady_clock::now();
	ExperimentConfig c = desk_scale_config();
	const PreparedRun run = prepare_run(c);
	const std::size_t K = run.deployment.K();
	std::string detail = fmt("K=%zu", K);
	bool pass = K == 54;
	for (Category target : {Category::Forest, Category::Street}) {
		c.dataset.target = target;
		const auto data = make_datasets(c, run, K, 0.0);
		ForestParams fp = c.forest;
		fp.seed = run.seeds.forest;
		const auto model = train_forest(data.train, fp);
		const auto e = evaluate(model, data.val);
		const auto [p, r] = headline_scores(e, true);
		pass = pass && p >= 0.90;
		detail += fmt(", %s precision %.4f (recall %.4f)", std::string(name_of(target)).c_str(), p, r);
		trained_models.emplace_back(model, data.val);
	}
	const double secs = seconds_since(t0);
	pass = pass && secs <= 600.0;
	detail += fmt(", %.1f s (need >= 0.90 each, <= 600 s)", secs);
	return {pass, detail};
}

/// Shared sweep for criteria 2 and 3: binary Forest detection on the 5 GHz preset.
std::optional<SweepResult> sweep_cache;
const std::vector<std::size_t> kSweepN{2, 5, 10, 20, 54};
const std::vector<double> kSweepSigma{0.0, 1.0, 2.0};

const SweepResult& detection_sweep()
{
	if (!sweep_cache) {
		ExperimentConfig c = desk_scale_config();
		c.dataset.L_train = 10000;
		c.dataset.L_val = 10000;
		c.dataset.target = Category::Forest;
		sweep_cache = sweep_n(c, kSweepN, kSweepSigma, 5);
	}
	return *sweep_cache;
}

Outcome n_sweep_trend()
{
	const auto& s = detection_sweep();
	std::vector<double> med;
	std::string detail = "median precision";
	for (std::size_t N : kSweepN) {
		med.push_back(median(s.values("precision", N, 0.0)));
		detail += fmt(" N=%zu:%.4f", N, med.back());
	}
	bool pass = true;
	// Non-decreasing within 0.02 over N = 2, 5, 10, 20.
	for (std::size_t i = 1; i < 4; ++i)
		pass = pass && med[i] >= med[i - 1] - 0.02;
	const double gap = std::fabs(med[2] - med[4]);
	pass = pass && gap < 0.03;
	detail += fmt("; |p(10)-p(K)|=%.4f (need < 0.03)", gap);
	return {pass, detail};
}

Outcome perturbation_robustness()
{
	const auto& s = detection_sweep();
	std::vector<double> med;
	std::string detail = "N=K median precision";
	for (double sigma : kSweepSigma) {
		med.push_back(median(s.values("precision", 54, sigma)));
		detail += fmt(" sigma=%.0f:%.4f", sigma, med.back());
	}
	bool pass = med[1] <= med[0] + 0.02 && med[2] <= med[1] + 0.02;
	pass = pass && med[1] >= med[0] - 0.05;
	detail += fmt("; drop at sigma=1: %.4f (need <= 0.05)", med[0] - med[1]);
	return {pass, detail};
}

Outcome rebalancing_effect()
{
	ExperimentConfig c = desk_scale_config();
	c.scene = scene_preset("skewed-urban");
	c.dataset.L_train = 10000;
	c.dataset.L_val = 10000;
	c.dataset.classes = {Category::Street, Category::Building, Category::Barren};
	c.forest.n_trees = 50;
	c.include_other_in_macro = false;
	// The gate uses oversampling, which equalizes class ratios without discarding rows.
	// Undersampling is reported alongside for reference.
	const std::vector<RebalanceMode> modes{RebalanceMode::none, RebalanceMode::oversample, RebalanceMode::undersample};
	std::map<RebalanceMode, std::vector<double>> macro;
	double worst_skew = 1e9;
	for (std::size_t r = 0; r < 5; ++r) {
		ExperimentConfig rc = c;
		rc.master_seed = derive_seed(c.master_seed, 2000 + r);
		const PreparedRun run = prepare_run(rc);
		const std::size_t K = run.deployment.K();
		for (RebalanceMode mode : modes) {
			rc.dataset.rebalance = mode;
			const auto data = make_datasets(rc, run, K, 0.0);
			if (mode == RebalanceMode::none) {
				std::size_t lo = data.train.L(), hi = 0;
				for (const auto& [label, n] : data.train.label_histogram()) {
					if (label == 0)
						continue;
					lo = std::min(lo, n);
					hi = std::max(hi, n);
				}
				worst_skew = std::min(worst_skew, static_cast<double>(hi) / static_cast<double>(lo));
			}
			ForestParams fp = rc.forest;
			fp.seed = run.seeds.forest;
			const auto e = evaluate(train_forest(data.train, fp), data.val, rc.include_other_in_macro);
			macro[mode].push_back(e.report.macro_precision);
		}
	}
	const double m0 = median(macro[RebalanceMode::none]);
	const double m_over = median(macro[RebalanceMode::oversample]);
	const double m_under = median(macro[RebalanceMode::undersample]);
	const bool pass = worst_skew >= 3.0 && m_over >= m0;
	return {pass, fmt("class skew %.2f:1 (need >= 3), median macro precision unbalanced %.4f, oversampled %.4f "
	                  "(need >= unbalanced); undersampled %.4f for reference",
	                  worst_skew, m0, m_over, m_under)};
}

Outcome metric_exactness()
{
	Rng rng(5);
	const std::vector<int> classes{0, 4, 7, 11, 15};
	std::size_t mismatches = 0;
	for (int trial = 0; trial < 1000; ++trial) {
		const std::size_t n = 1 + rng.index(500);
		std::vector<int> t(n), p(n);
		for (std::size_t i = 0; i < n; ++i) {
			t[i] = classes[rng.index(classes.size())];
			p[i] = rng.uniform() < 0.5 ? t[i] : classes[rng.index(classes.size())];
		}
		const auto cm = confusion_matrix(t, p, classes);
		for (int c : classes) {
			mismatches += precision(cm, c).value != oracle::direct_precision(t, p, c);
			mismatches += recall(cm, c).value != oracle::direct_recall(t, p, c);
		}
	}
	// Street scores before and after rebalancing, as tp, fp, fn counts with those exact ratios.
	const auto street = [](std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
		ConfusionMatrix cm({0, 11});
		cm.add(1, 1, tp);
		cm.add(0, 1, fp);
		cm.add(1, 0, fn);
		return std::pair{precision(cm, 11).value, recall(cm, 11).value};
	};
	const auto before = street(561, 264, 289);
	const auto after = street(779, 171, 246);
	const bool table = before == std::pair{0.68, 0.66} && after == std::pair{0.82, 0.76};
	return {mismatches == 0 && table,
	        fmt("%zu mismatches over 1000 random sets; Street %.2f/%.2f -> %.2f/%.2f", mismatches, before.first,
	            before.second, after.first, after.second)};
}

Outcome split_oracle()
{
	Rng rng(6);
	std::size_t mismatches = 0, no_split = 0;
	for (int trial = 0; trial < 1000; ++trial) {
		const std::size_t n = 1 + rng.index(50);
		const std::size_t K = 1 + rng.index(3);
		const std::size_t C = 2 + rng.index(3);
		Dataset ds;
		ds.K = K;
		std::vector<std::vector<double>> x(n, std::vector<double>(K));
		for (std::size_t i = 0; i < n; ++i) {
			for (auto& v : x[i])
				v = trial % 2 ? -60.0 - static_cast<double>(rng.index(5)) : rng.uniform(-140.0, -60.0);
			ds.rows.push_back({x[i], static_cast<int>(rng.index(C)), false});
		}
		const auto m = TrainingMatrix::from(ds);
		std::vector<int> y(n);
		for (std::size_t i = 0; i < n; ++i)
			y[i] = m.labels[i];
		std::vector<std::uint32_t> rows(n);
		std::iota(rows.begin(), rows.end(), 0u);
		std::vector<std::size_t> features(K);
		std::iota(features.begin(), features.end(), std::size_t{0});
		const auto got = best_split(m, rows, features);
		const auto want = oracle::exhaustive_split(x, y, static_cast<int>(m.classes.size()), features);
		no_split += !want;
		bool same = got.has_value() == want.has_value();
		if (same && got) {
			const double exact = static_cast<double>(want->impurity.p) / static_cast<double>(want->impurity.q);
			same = got->feature_index == want->feature && got->threshold_db == want->threshold &&
			       std::fabs(got->weighted_child_impurity - exact) < 1e-12;
		}
		mismatches += !same;
	}
	return {mismatches == 0, fmt("%zu mismatches over 1000 instances (%zu without a split)", mismatches, no_split)};
}

Outcome sn_properties()
{
	Rng rng(7);
	const std::size_t K = 54;
	std::size_t bad_card = 0, bad_set = 0, bad_value = 0, tie_vectors = 0;
	for (int trial = 0; trial < 1000; ++trial) {
		std::vector<double> g(K);
		for (auto& v : g)
			v = trial % 2 ? -70.0 - static_cast<double>(rng.index(10)) : rng.uniform(-160.0, -50.0);
		tie_vectors += std::set<double>(g.begin(), g.end()).size() < K;
		for (std::size_t N = 1; N <= K; ++N) {
			const auto out = select_top_n(g, N);
			std::set<std::size_t> kept;
			for (std::size_t i = 0; i < K; ++i)
				if (out[i] != kSentinelDb) {
					kept.insert(i);
					bad_value += out[i] != g[i];
				}
			bad_card += kept.size() != N;
			bad_set += kept != oracle::top_n_indices(g, N);
		}
	}
	return {bad_card + bad_set + bad_value == 0,
	        fmt("1000 vectors x N=1..%zu: %zu cardinality, %zu index-set, %zu value errors (%zu vectors with ties)", K,
	            bad_card, bad_set, bad_value, tie_vectors)};
}

int run_cli(const std::string& args, const fs::path& log)
{
	const std::string cmd = std::string(LANDSENSE_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
	const int status = std::system(cmd.c_str());
	return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome pipeline_determinism()
{
	const fs::path dir = fs::temp_directory_path() / "landsense_acceptance_pipeline";
	fs::remove_all(dir);
	fs::create_directories(dir);
	{
		std::ofstream cfg(dir / "config.json");
		cfg << R"({"master_seed": 11, "scene": {"preset": "london-like"},
		          "deployment": {"preset": "london-high"},
		          "dataset": {"L_train": 4000, "L_val": 4000, "target": "street", "sigma_db": 1.0},
		          "forest": {"n_trees": 30}})";
	}
	const std::string cfg = (dir / "config.json").string();
	const std::vector<std::pair<std::string, std::string>> runs{
	    {"a", "--threads 1"}, {"b", "--threads 1"}, {"c", "--threads 4"}};
	for (const auto& [name, flags] : runs) {
		const int code = run_cli(flags + " pipeline --config " + cfg + " --out " + (dir / name).string(), dir / (name + ".log"));
		if (code != 0)
			return {false, fmt("pipeline run %s exited %d", name.c_str(), code)};
	}
	std::size_t differing = 0;
	std::string list;
	for (const char* f : {"train.csv", "val.csv", "model.json", "report.json"}) {
		const std::string a = read_file(dir / "a" / f);
		for (const char* other : {"b", "c"})
			if (read_file(dir / other / f) != a) {
				++differing;
				list += fmt(" %s/%s", other, f);
			}
	}
	return {differing == 0, differing == 0 ? "dataset CSVs, model and report byte-identical across 3 runs (1, 1, 4 workers)"
	                                       : "differs:" + list};
}

Outcome forest_correctness()
{
	if (trained_models.empty()) {
		// Criterion 1 was skipped; train a smaller forest on the same kind of data.
		ExperimentConfig c = desk_scale_config();
		c.dataset.L_train = 3000;
		c.dataset.L_val = 3000;
		c.dataset.classes = {Category::Street, Category::Building, Category::Barren, Category::Forest};
		c.forest.n_trees = 40;
		const auto r = run_experiment(c);
		trained_models.emplace_back(r.model, r.data.val);
	}
	std::size_t bad_mode = 0, bad_votes = 0, checked = 0;
	Rng rng(9);
	for (const auto& [model, val] : trained_models) {
		for (int k = 0; k < 100; ++k) {
			// Half are validation rows, half are random vectors in the feature range.
			std::vector<double> x;
			if (k % 2 == 0) {
				x = val.rows[rng.index(val.L())].features_db;
			} else {
				x.resize(model.K);
				for (auto& v : x)
					v = rng.uniform() < 0.2 ? kSentinelDb : rng.uniform(-180.0, -40.0);
			}
			std::vector<int> codes;
			for (auto c : tree_predictions(model, x))
				codes.push_back(model.classes[c]);
			const auto p = predict(model, x);
			bad_mode += p.label != oracle::mode(codes);
			double total = 0.0;
			for (const auto& [code, v] : p.votes)
				total += v;
			bad_votes += std::fabs(total - 1.0) > 1e-12;
			++checked;
		}
	}

	// Ensemble of one without bootstrap against a directly grown tree.
	ExperimentConfig c = desk_scale_config();
	c.dataset.L_train = 3000;
	c.dataset.L_val = 3000;
	c.dataset.target = Category::Forest;
	const auto run = prepare_run(c);
	const auto data = make_datasets(c, run, run.deployment.K(), 0.0);
	ForestParams single;
	single.n_trees = 1;
	single.bootstrap = false;
	single.seed = 77;
	const auto one = train_forest(data.train, single);
	const auto m = TrainingMatrix::from(data.train);
	Rng stream(single.seed, 0);
	const auto tree = train_tree(m, tree_sample(m.rows(), single, stream), single, stream);
	std::size_t bad_single = one.trees.front() == tree ? 0 : 1;
	for (const auto& row : data.val.rows)
		bad_single += predict(one, row.features_db).label != one.classes[tree.predict_index(row.features_db)];

	return {bad_mode + bad_votes + bad_single == 0,
	        fmt("%zu inputs over %zu models: %zu mode, %zu vote-sum errors; single-tree forest mismatches %zu",
	            checked, trained_models.size(), bad_mode, bad_votes, bad_single)};
}

} // namespace

int main(int argc, char** argv)
{
	const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
	    {"binary detection at desk scale", binary_detection},
	    {"N-sweep trend", n_sweep_trend},
	    {"perturbation robustness", perturbation_robustness},
	    {"rebalancing effect", rebalancing_effect},
	    {"metric exactness", metric_exactness},
	    {"split-oracle equivalence", split_oracle},
	    {"S_N properties", sn_properties},
	    {"determinism", pipeline_determinism},
	    {"forest correctness", forest_correctness},
	};
	std::set<std::size_t> selected;
	for (int i = 1; i < argc; ++i)
		selected.insert(static_cast<std::size_t>(std::atoi(argv[i])));

	int failures = 0;
	for (std::size_t k = 0; k < criteria.size(); ++k) {
		if (!selected.empty() && !selected.contains(k + 1))
			continue;
		const auto t0 = std::chrono::steady_clock::now();
		Outcome o;
		try {
			o = criteria[k].second();
		} catch (const std::exception& e) {
			o = {false, std::string("exception: ") + e.what()};
		}
		failures += !o.pass;
		std::printf("criterion %zu %s: %s (%s) [%.1f s]\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
		            o.detail.c_str(), seconds_since(t0));
		std::fflush(stdout);
	}
	return failures == 0 ? 0 : 1;
}
