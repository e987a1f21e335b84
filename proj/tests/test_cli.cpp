#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "gna/serialize.hpp"
#include "helpers.hpp"

using testutil::run_cli;
using testutil::slurp;
using testutil::TempDir;

namespace {

nlohmann::json manifest_of(const std::string& dir) {
    return nlohmann::json::parse(slurp(dir + "/manifest.json"));
}

}  // namespace

TEST_CASE("the cli requires a subcommand and offers help") {
    CHECK(run_cli("").exit_code == 64);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("simulate --list").exit_code == 0);
    auto listing = run_cli("simulate --list");
    CHECK(listing.output.find("ba:") != std::string::npos);
    CHECK(listing.output.find("forest-fire") != std::string::npos);
    CHECK(run_cli("frobnicate").exit_code == 64);
}

TEST_CASE("simulate writes a reproducible bundle") {
    TempDir dir1("sim1");
    TempDir dir2("sim2");
    const std::string args =
        "simulate --model ba --param n_final=25 --steps 100 --seed 5 --format csv";
    auto first = run_cli(args + " --out " + dir1.str());
    REQUIRE(first.exit_code == 0);
    auto second = run_cli(args + " --out " + dir2.str());
    REQUIRE(second.exit_code == 0);

    for (const char* name :
         {"trajectory.txt", "final.snapshot", "series.csv", "manifest.json"}) {
        CAPTURE(name);
        REQUIRE(testutil::file_exists(dir1.file(name)));
        CHECK(slurp(dir1.file(name)) == slurp(dir2.file(name)));
    }

    auto manifest = manifest_of(dir1.str());
    CHECK(manifest["tool"] == "gna");
    CHECK(manifest["subcommand"] == "simulate");
    CHECK(manifest["seed"] == 5);
    CHECK(manifest["config"]["model"] == "ba");
    CHECK(manifest["config"]["params"]["n_final"] == 25.0);
    CHECK(manifest["config"]["params"]["links_per_node"] == 1.0);  // default resolved
    CHECK(manifest["config"]["quiescent"] == true);
    auto outputs = manifest["outputs"].get<std::vector<std::string>>();
    CHECK(outputs == std::vector<std::string>{"trajectory.txt", "final.snapshot",
                                              "series.csv", "manifest.json"});

    // The snapshot matches the trajectory's last configuration: 25 nodes.
    const std::string snapshot = slurp(dir1.file("final.snapshot"));
    CHECK(snapshot.find("nodes 25") != std::string::npos);
    // The csv series ends at the quiescent step count.
    const std::string series = slurp(dir1.file("series.csv"));
    CHECK(series.rfind("23,25,48\n") == series.size() - 9);  // 23 growth steps
}

TEST_CASE("simulate validates its inputs") {
    TempDir dir("simbad");
    CHECK(run_cli("simulate --model ba --steps 10 --out " + dir.str()).exit_code ==
          64);  // no seed
    CHECK(run_cli("simulate --steps 10 --seed 1 --out " + dir.str()).exit_code ==
          64);  // no model
    CHECK(run_cli("simulate --model nosuch --seed 1 --out " + dir.str()).exit_code ==
          2);  // unknown model
    CHECK(run_cli("simulate --model ba --param n_final=2 --seed 1 --out " + dir.str())
              .exit_code == 2);  // out of range
    CHECK(run_cli("simulate --model ba --param junk --seed 1 --out " + dir.str())
              .exit_code == 64);  // malformed key=value
    CHECK(run_cli("simulate --model ba --seed 1 --format yaml --out " + dir.str())
              .exit_code == 64);
}

TEST_CASE("config files merge under explicit flags") {
    TempDir dir("simcfg");
    gna::write_file_atomic(dir.file("run.json"),
                           "{\"model\":\"ba\",\"params\":{\"n_final\":20},"
                           "\"steps\":5,\"seed\":9}\n");
    auto res = run_cli("simulate --config " + dir.file("run.json") + " --steps 7 --out " +
                       dir.file("out"));
    REQUIRE(res.exit_code == 0);
    auto manifest = manifest_of(dir.file("out"));
    CHECK(manifest["seed"] == 9);                  // from the config
    CHECK(manifest["config"]["steps"] == 7);       // flag beats config
    CHECK(manifest["config"]["params"]["n_final"] == 20.0);

    gna::write_file_atomic(dir.file("broken.json"), "{not json\n");
    CHECK(run_cli("simulate --config " + dir.file("broken.json") + " --out " +
                  dir.file("o2"))
              .exit_code == 4);

    gna::write_file_atomic(dir.file("typo.json"),
                           "{\"model\":\"ba\",\"seed\":1,\"stepz\":3}\n");
    CHECK(run_cli("simulate --config " + dir.file("typo.json") + " --out " +
                  dir.file("o3"))
              .exit_code == 2);
}

TEST_CASE("discover reports the fitted mechanism for a recorded run") {
    TempDir dir("disc");
    REQUIRE(run_cli("simulate --model ba --param n_final=40 --steps 200 --seed 11 "
                    "--out " +
                    dir.file("sim"))
                .exit_code == 0);

    auto res = run_cli("discover --input " + dir.file("sim/trajectory.txt") +
                       " --out " + dir.file("fit"));
    REQUIRE(res.exit_code == 0);
    auto report = nlohmann::json::parse(slurp(dir.file("fit/report.json")));
    CHECK(report["winner"]["family"] == "degree");
    CHECK(report["counts"]["pairs"] == 38);  // 40 nodes grown from 2
    CHECK(report["table"]["recorded_events"] > 0);
    CHECK(report["candidates"].size() == 5);
    CHECK(!testutil::file_exists(dir.file("fit/reconstruction.txt")));
    auto manifest = manifest_of(dir.file("fit"));
    CHECK(manifest["seed"].is_null());  // no reconstruction, no seed recorded

    // Reconstruction needs a seed.
    CHECK(run_cli("discover --input " + dir.file("sim/trajectory.txt") +
                  " --reconstruct-steps 10 --out " + dir.file("fit2"))
              .exit_code == 64);
    auto rec = run_cli("discover --input " + dir.file("sim/trajectory.txt") +
                       " --reconstruct-steps 10 --seed 3 --out " + dir.file("fit3"));
    REQUIRE(rec.exit_code == 0);
    CHECK(testutil::file_exists(dir.file("fit3/reconstruction.txt")));
    auto report3 = nlohmann::json::parse(slurp(dir.file("fit3/report.json")));
    CHECK(report3["reconstruction"]["steps_requested"] == 10);

    CHECK(run_cli("discover --out " + dir.file("fit4")).exit_code == 64);
    CHECK(run_cli("discover --input " + dir.file("nope.txt") + " --out " +
                  dir.file("fit5"))
              .exit_code == 10);  // unreadable input
}

TEST_CASE("opnet runs the bundled scenario to quiescence") {
    TempDir dir("opnet");
    const std::string scenario = std::string(GNA_DATA_DIR) + "/opnet_demo.scenario";
    auto res = run_cli("opnet --scenario " + scenario + " --seed 4 --out " + dir.str());
    REQUIRE(res.exit_code == 0);
    const std::string metrics = slurp(dir.file("metrics.csv"));
    CHECK(metrics.find("tick,nodes,links") == 0);
    CHECK(slurp(dir.file("final_state.txt")).find("opnet-state v1") == 0);
    auto manifest = manifest_of(dir.str());
    CHECK(manifest["config"]["quiescent"] == true);
    CHECK(manifest["config"]["ticks_run"].get<long long>() > 0);

    CHECK(run_cli("opnet --seed 1 --out " + dir.file("o2")).exit_code == 64);
    CHECK(run_cli("opnet --scenario " + scenario + " --out " + dir.file("o3"))
              .exit_code == 64);  // seed required
}

TEST_CASE("merger sweeps write one csv row per recorded iteration") {
    TempDir dir("merger");
    auto res = run_cli(
        "merger --n 6 --dims 2 --within 10 --between 3 --runs 2 --iterations 4 "
        "--seed 8 --snapshots --out " +
        dir.str());
    REQUIRE(res.exit_code == 0);
    const std::string csv = slurp(dir.file("sweep.csv"));
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    // 1 condition x 2 runs x (4 iterations + initial) + header.
    CHECK(lines == 1 + 2 * 5);
    CHECK(testutil::file_exists(dir.file("final_c0_r0.merger")));
    CHECK(testutil::file_exists(dir.file("final_c0_r1.merger")));

    // Same command, same bytes.
    auto rerun = run_cli(
        "merger --n 6 --dims 2 --within 10 --between 3 --runs 2 --iterations 4 "
        "--seed 8 --snapshots --out " +
        dir.file("again"));
    REQUIRE(rerun.exit_code == 0);
    CHECK(slurp(dir.file("again/sweep.csv")) == csv);
    CHECK(slurp(dir.file("again/final_c0_r1.merger")) ==
          slurp(dir.file("final_c0_r1.merger")));

    CHECK(run_cli("merger --runs 0 --seed 1 --out " + dir.file("bad")).exit_code == 64);
}

TEST_CASE("analyze summarizes snapshots and merger states") {
    TempDir dir("analyze");
    REQUIRE(run_cli("simulate --model forest-fire --param n_final=30 --steps 100 "
                    "--seed 2 --out " +
                    dir.file("sim"))
                .exit_code == 0);
    auto res = run_cli("analyze --input " + dir.file("sim/final.snapshot") +
                       " --out " + dir.file("a1"));
    REQUIRE(res.exit_code == 0);
    const std::string csv = slurp(dir.file("a1/analysis.csv"));
    CHECK(csv.find("nodes,links,components") == 0);
    CHECK(csv.find("\n30,") != std::string::npos);

    REQUIRE(run_cli("merger --n 5 --dims 2 --within 6 --between 2 --runs 1 "
                    "--iterations 2 --seed 3 --snapshots --out " +
                    dir.file("mg"))
                .exit_code == 0);
    auto res2 = run_cli("analyze --input " + dir.file("mg/final_c0_r0.merger") +
                        " --out " + dir.file("a2"));
    REQUIRE(res2.exit_code == 0);
    CHECK(slurp(dir.file("a2/analysis.csv")).find("cross_distance,turnover") == 0);

    gna::write_file_atomic(dir.file("junk.txt"), "who knows\n");
    CHECK(run_cli("analyze --input " + dir.file("junk.txt") + " --out " +
                  dir.file("a3"))
              .exit_code == 4);
    CHECK(run_cli("analyze --out " + dir.file("a4")).exit_code == 64);
}
