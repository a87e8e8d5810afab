#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string out_file =
        (fs::temp_directory_path() / "garchmom_cli_out.txt").string();
    const std::string cmd =
        std::string(GARCHMOM_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    os << content;
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

bool regen_goldens() { return std::getenv("GARCHMOM_REGEN_GOLDEN") != nullptr; }

/// Byte-compares a produced file against the pinned golden copy;
/// with GARCHMOM_REGEN_GOLDEN set, rewrites the golden instead.
void check_against_golden(const fs::path& produced, const std::string& golden_name) {
    const fs::path golden = fs::path(GARCHMOM_GOLDEN_DIR) / golden_name;
    if (regen_goldens()) {
        fs::create_directories(golden.parent_path());
        write_file(golden, read_file(produced));
        WARN("regenerated golden file " << golden.string());
        return;
    }
    REQUIRE(fs::exists(golden));
    CHECK(read_file(produced) == read_file(golden));
}

}  // namespace

TEST_CASE("ingest: log returns from prices and passthrough returns") {
    const fs::path dir = temp_dir("garchmom_ingest");
    write_file(dir / "prices.csv", "date,price\n2020-01-01,100\n2020-01-02,101\n");
    auto r = run_cli("ingest --input " + (dir / "prices.csv").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0.00995033") != std::string::npos);

    write_file(dir / "rets.csv", "return\n0.01\n-0.02\n");
    r = run_cli("ingest --input " + (dir / "rets.csv").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("-0.02") != std::string::npos);
}

TEST_CASE("ingest: malformed rows fail with the line number, exit code 2") {
    const fs::path dir = temp_dir("garchmom_ingest_bad");
    std::string content = "return\n";
    for (int i = 0; i < 15; ++i) content += "0.001\n";
    content += "oops\n";  // line 17: header plus fifteen good rows before it
    for (int i = 0; i < 5; ++i) content += "0.001\n";
    write_file(dir / "bad.csv", content);
    const auto r = run_cli("ingest --input " + (dir / "bad.csv").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("line 17") != std::string::npos);
}

TEST_CASE("missing input file: exit code 2 and no partial outputs") {
    const fs::path dir = temp_dir("garchmom_missing");
    const auto r = run_cli("gof --input " + (dir / "absent.csv").string() +
                           " --output-dir " + dir.string());
    CHECK(r.exit_code == 2);
    CHECK_FALSE(fs::exists(dir / "gof_summary.csv"));
    CHECK_FALSE(fs::exists(dir / "gof_dates.csv"));
}

TEST_CASE("usage errors exit with code 1, help with 0") {
    const auto r = run_cli("moments --no-such-flag 1");
    CHECK(r.exit_code == 1);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("").exit_code == 1);  // a subcommand is required
}

TEST_CASE("moments command: golden outputs and byte-identical reruns") {
    const fs::path dir = temp_dir("garchmom_moments");
    const std::string args =
        "moments --mu 0 --omega 1e-6 --alpha 0.04 --lambda 0.06 --beta 0.90 --model gjr "
        "--h1 5e-5 --horizon 12 --max-n 10 --output-dir " +
        dir.string();
    auto r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    check_against_golden(dir / "forward.csv", "moments_gjr_forward.csv");
    check_against_golden(dir / "aggregated.csv", "moments_gjr_aggregated.csv");
    check_against_golden(dir / "limits.csv", "moments_gjr_limits.csv");

    const std::string first = read_file(dir / "forward.csv") +
                              read_file(dir / "aggregated.csv") +
                              read_file(dir / "limits.csv");
    r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    const std::string second = read_file(dir / "forward.csv") +
                               read_file(dir / "aggregated.csv") +
                               read_file(dir / "limits.csv");
    CHECK(first == second);
}

TEST_CASE("moments command: symmetric GARCH golden") {
    const fs::path dir = temp_dir("garchmom_moments_sym");
    const std::string args =
        "moments --mu 0 --omega 1e-6 --alpha 0.05 --beta 0.90 --model garch11 "
        "--h1 5e-5 --horizon 8 --max-n 8 --output-dir " +
        dir.string();
    REQUIRE(run_cli(args).exit_code == 0);
    check_against_golden(dir / "forward.csv", "moments_garch11_forward.csv");
    check_against_golden(dir / "aggregated.csv", "moments_garch11_aggregated.csv");
}

TEST_CASE("moments command: student t golden") {
    const fs::path dir = temp_dir("garchmom_moments_t");
    const std::string args =
        "moments --mu 0.0001 --omega 1e-6 --alpha 0.04 --lambda 0.06 --beta 0.88 "
        "--model gjr --innovation student_t --nu 9 --h1 4e-5 --horizon 6 --max-n 6 "
        "--output-dir " +
        dir.string();
    REQUIRE(run_cli(args).exit_code == 0);
    check_against_golden(dir / "forward.csv", "moments_t_forward.csv");
    check_against_golden(dir / "aggregated.csv", "moments_t_aggregated.csv");
}

TEST_CASE("golden round trip: printed values parse back to full precision") {
    const fs::path dir = temp_dir("garchmom_roundtrip");
    REQUIRE(run_cli("moments --mu 0 --omega 1e-6 --alpha 0.04 --lambda 0.06 --beta 0.90 "
                    "--model gjr --h1 5e-5 --horizon 5 --max-n 5 --output-dir " +
                    dir.string())
                .exit_code == 0);
    std::ifstream in(dir / "forward.csv");
    std::string header, line;
    std::getline(in, header);
    REQUIRE(std::getline(in, line));
    // s = 1 row: variance column is h1 exactly at 12 significant digits
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // s
    std::getline(ss, cell, ',');  // ret_mean
    std::getline(ss, cell, ',');  // ret_variance
    CHECK(std::stod(cell) == 5e-5);
}

TEST_CASE("simulate command dumps deterministic CSV") {
    const fs::path dir = temp_dir("garchmom_sim");
    const std::string args =
        "simulate --mu 0 --omega 1e-6 --alpha 0.04 --lambda 0.06 --beta 0.90 --model gjr "
        "--h1 5e-5 --horizon 3 --paths 5 --seed 9 --output " +
        (dir / "sample.csv").string();
    REQUIRE(run_cli(args).exit_code == 0);
    const std::string first = read_file(dir / "sample.csv");
    REQUIRE(run_cli(args).exit_code == 0);
    CHECK(first == read_file(dir / "sample.csv"));
    CHECK(first.rfind("r1,r2,r3", 0) == 0);
}

TEST_CASE("gof command is deterministic and writes the summary shape") {
    const fs::path dir = temp_dir("garchmom_gof");
    // tiny synthetic series so the rolling fits stay fast
    std::ostringstream series;
    series << "return\n";
    std::uint64_t state = 88172645463325252ull;
    double h = 4e-5;
    for (int i = 0; i < 420; ++i) {
        // xorshift uniform -> crude normal via sum of 12
        double z = -6.0;
        for (int j = 0; j < 12; ++j) {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            z += static_cast<double>(state >> 11) * 0x1.0p-53;
        }
        const double eps = z * std::sqrt(h);
        h = 1e-6 + 0.05 * eps * eps + 0.90 * h;
        series << eps << "\n";
    }
    write_file(dir / "series.csv", series.str());
    const std::string args = "gof --input " + (dir / "series.csv").string() +
                             " --window 300 --dates 3 --horizon 3 --paths 400 --seed 5 "
                             "--method johnson_su --output-dir " +
                             dir.string();
    REQUIRE(run_cli(args).exit_code == 0);
    const std::string summary = read_file(dir / "gof_summary.csv");
    CHECK(summary.find("KS-average,") != std::string::npos);
    CHECK(summary.find("KS-stdev,") != std::string::npos);
    CHECK(summary.find("KS-rejections@5%,") != std::string::npos);
    CHECK(summary.find("CVM-average,") != std::string::npos);
    CHECK(summary.find("CVM-rejections@5%,") != std::string::npos);
    const std::string dates_first = read_file(dir / "gof_dates.csv");
    REQUIRE(run_cli(args).exit_code == 0);
    CHECK(summary == read_file(dir / "gof_summary.csv"));
    CHECK(dates_first == read_file(dir / "gof_dates.csv"));
}

TEST_CASE("config file keys are honored and flags override them") {
    const fs::path dir = temp_dir("garchmom_config");
    write_file(dir / "run.cfg",
               "omega=1e-6\nalpha=0.04\nlambda=0.06\nbeta=0.90\nmodel=gjr\nh1=5e-5\n"
               "horizon=4\nmax-n=4\noutput-dir=" +
                   dir.string() + "\n");
    REQUIRE(run_cli("moments --config " + (dir / "run.cfg").string()).exit_code == 0);
    const std::string base = read_file(dir / "forward.csv");
    CHECK(base.find("\n4,") != std::string::npos);
    CHECK(base.find("\n5,") == std::string::npos);
    // flag overrides the config horizon
    REQUIRE(run_cli("moments --config " + (dir / "run.cfg").string() + " --horizon 6")
                .exit_code == 0);
    CHECK(read_file(dir / "forward.csv").find("\n6,") != std::string::npos);
}
