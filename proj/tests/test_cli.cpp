#include <landsense/io.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using landsense::read_file;

#ifndef LANDSENSE_CLI_PATH
#error "LANDSENSE_CLI_PATH must point at the landsense executable"
#endif

namespace {

const fs::path& work_dir()
{
	static const fs::path dir = [] {
		auto d = fs::temp_directory_path() / "landsense_cli_test";
		fs::remove_all(d);
		fs::create_directories(d);
		return d;
	}();
	return dir;
}

/// Runs the CLI with `args`, returns its exit status. Output goes to a log file.
int run(const std::string& args)
{
	const std::string cmd = std::string(LANDSENSE_CLI_PATH) + " " + args + " >>" +
	                        (work_dir() / "cli.log").string() + " 2>&1";
	const int status = std::system(cmd.c_str());
	return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string path(const std::string& rel) { return (work_dir() / rel).string(); }

/// Builds the scene, 5 GHz deployment and two datasets shared by several tests.
void ensure_inputs()
{
	static bool done = false;
	if (done)
		return;
	ASSERT_EQ(run("scene --preset london-like --side-m 500 --seed 1 --out " + path("in")), 0);
	ASSERT_EQ(run("deploy --scene " + path("in/scene.json") + " --preset london-high --seed 2 --out " + path("in")), 0);
	const std::string common =
	    "dataset --scene " + path("in/scene.json") + " --deployment " + path("in/deployment.json") + " --rows 1500 ";
	ASSERT_EQ(run(common + "--seed 3 --name train --out " + path("in")), 0);
	ASSERT_EQ(run(common + "--seed 4 --name val --out " + path("in")), 0);
	done = true;
}

} // namespace

TEST(CliScene, WritesFileAndIsReproducible)
{
	ASSERT_EQ(run("scene --preset london-like --seed 1 --out " + path("s1")), 0);
	ASSERT_EQ(run("scene --preset london-like --seed 1 --out " + path("s2")), 0);
	const std::string a = read_file(path("s1/scene.json"));
	EXPECT_EQ(landsense::sha256_hex(a), landsense::sha256_hex(read_file(path("s2/scene.json"))));
	// The stored fractions come from cell counts.
	const auto scene = landsense::scene_from_json(nlohmann::json::parse(a));
	const auto stored = nlohmann::json::parse(a).at("category_fractions");
	for (const auto& [c, f] : landsense::category_fractions(scene))
		EXPECT_EQ(stored.at(std::string(landsense::name_of(c))).get<double>(), f);
	EXPECT_TRUE(fs::exists(path("s1/manifest.json")));
}

TEST(CliScene, InvalidMixExitsTwo)
{
	EXPECT_EQ(run("scene --mix street=0.6,building=0.6 --out " + path("bad")), 2);
	EXPECT_EQ(run("scene --bogus-flag"), 2);
}

TEST(CliDataset, SingleRowHasHeaderAndOneLine)
{
	ensure_inputs();
	ASSERT_EQ(run("dataset --scene " + path("in/scene.json") + " --deployment " + path("in/deployment.json") +
	              " --rows 1 --name one --out " + path("one")),
	          0);
	const std::string csv = read_file(path("one/one.csv"));
	EXPECT_EQ(std::ranges::count(csv, '\n'), 2);
	EXPECT_TRUE(csv.starts_with("g_1,"));
	EXPECT_TRUE(fs::exists(path("one/one.meta.json")));
}

TEST(CliDataset, TopNMasksEachRow)
{
	ensure_inputs();
	ASSERT_EQ(run("dataset --scene " + path("in/scene.json") + " --deployment " + path("in/deployment.json") +
	              " --rows 300 --top-n 10 --name top10 --out " + path("top")),
	          0);
	const auto ds = landsense::load_dataset(path("top/top10.csv"));
	ASSERT_EQ(ds.L(), 300u);
	EXPECT_EQ(ds.N, 10u);
	for (const auto& r : ds.rows) {
		const auto live = std::ranges::count_if(r.features_db, [&](double g) { return g > ds.sentinel_db; });
		EXPECT_EQ(live == 10, !r.degenerate);
		EXPECT_LE(live, 10);
	}
}

TEST(CliDataset, TopNAboveKExitsTwo)
{
	ensure_inputs();
	EXPECT_EQ(run("dataset --scene " + path("in/scene.json") + " --deployment " + path("in/deployment.json") +
	              " --rows 5 --top-n 55 --out " + path("bad")),
	          2);
}

TEST(CliDataset, MissingInputExitsThree)
{
	EXPECT_EQ(run("dataset --scene " + path("nope/scene.json") + " --deployment " + path("nope/d.json") +
	              " --out " + path("bad")),
	          3);
	EXPECT_EQ(run("train --dataset " + path("nope/train.csv") + " --out " + path("bad")), 3);
}

TEST(CliTrainEval, EndToEndReport)
{
	ensure_inputs();
	ASSERT_EQ(run("train --dataset " + path("in/train.csv") + " --binarize forest --n-trees 15 --seed 5 --out " + path("m")), 0);
	ASSERT_EQ(run("eval --model " + path("m/model.json") + " --dataset " + path("in/val.csv") +
	              " --binarize forest --out " + path("e0")),
	          0);
	const auto report = nlohmann::json::parse(read_file(path("e0/report.json")));
	EXPECT_TRUE(report.at("per_class").contains("0"));
	EXPECT_TRUE(report.at("per_class").contains("1"));
	EXPECT_TRUE(report.at("macro").contains("precision"));
	EXPECT_EQ(report.at("validation").at("L"), 1500);

	// An explicit zero sigma is the same as no perturbation.
	ASSERT_EQ(run("eval --model " + path("m/model.json") + " --dataset " + path("in/val.csv") +
	              " --binarize forest --sigma-db 0 --out " + path("e1")),
	          0);
	EXPECT_EQ(read_file(path("e0/report.json")), read_file(path("e1/report.json")));
}

TEST(CliTrainEval, WidthMismatchExitsTwo)
{
	ensure_inputs();
	ASSERT_EQ(run("train --dataset " + path("in/train.csv") + " --n-trees 3 --out " + path("w")), 0);
	{
		std::ofstream narrow(path("narrow.csv"));
		narrow << "g_1,g_2,label\n-80.0,-90.0,7\n";
	}
	EXPECT_EQ(run("eval --model " + path("w/model.json") + " --dataset " + path("narrow.csv") + " --out " + path("w")), 2);
}

TEST(CliEval, CorruptModelExitsTwo)
{
	ensure_inputs();
	{
		std::ofstream bad(path("corrupt.json"));
		bad << "{\"format\":1,\"trees\":[";
	}
	EXPECT_EQ(run("eval --model " + path("corrupt.json") + " --dataset " + path("in/val.csv") + " --out " + path("x")), 2);
}

TEST(CliSweep, RowCount)
{
	{
		std::ofstream cfg(path("sweep.json"));
		cfg << R"({"scene": {"preset": "london-like", "side_m": 500},
		          "dataset": {"L_train": 400, "L_val": 400, "target": "street"},
		          "forest": {"n_trees": 5}})";
	}
	ASSERT_EQ(run("sweep --config " + path("sweep.json") +
	              " --n-values 2,5,10,20 --sigma-values 0,1 --replicates 5 --out " + path("sw")),
	          0);
	const std::string csv = read_file(path("sw/sweep.csv"));
	EXPECT_EQ(std::ranges::count(csv, '\n'), 1 + 2 * 4 * 5 * 2);
}

TEST(CliPipeline, ThreadCountDoesNotChangeArtifacts)
{
	{
		std::ofstream cfg(path("pipe.json"));
		cfg << R"({"master_seed": 3, "scene": {"preset": "london-like", "side_m": 500},
		          "dataset": {"L_train": 800, "L_val": 800, "target": "forest", "sigma_db": 1.0},
		          "forest": {"n_trees": 8}})";
	}
	ASSERT_EQ(run("--threads 1 pipeline --config " + path("pipe.json") + " --out " + path("p1")), 0);
	ASSERT_EQ(run("--threads 4 pipeline --config " + path("pipe.json") + " --out " + path("p4")), 0);
	for (const char* f : {"train.csv", "val.csv", "model.json", "report.json", "manifest.json"})
		EXPECT_EQ(read_file(path(std::string("p1/") + f)), read_file(path(std::string("p4/") + f))) << f;
}
