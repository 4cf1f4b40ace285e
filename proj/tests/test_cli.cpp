#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "fixtures.hpp"
#include "ringflow/io.hpp"

using namespace ringflow;
namespace fs = std::filesystem;

namespace {

const std::string kCli = RINGFLOW_CLI;

// Exit status of the CLI with the given arguments; output goes to log.
int run(const std::string& args, const fs::path& log)
{
    const std::string cmd = "\"" + kCli + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "ringflow_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string out(const fs::path& dir) { return " --out \"" + dir.string() + "\""; }

}  // namespace

TEST_CASE("verify on the disk fixture exits 0")
{
    const fs::path dir = fresh_dir("disk");
    save_domain((dir / "disk.json").string(), fixtures::disk());
    REQUIRE(run("solve --domain \"" + (dir / "disk.json").string() + "\" --h 0.03125" + out(dir), dir / "solve.log") == 0);
    REQUIRE(fs::exists(dir / "field.txt"));
    CHECK(run("verify --field \"" + (dir / "field.txt").string() + "\"" + out(dir), dir / "verify.log") == 0);
    const auto report = parse_report(read_text((dir / "report.json").string()));
    CHECK_FALSE(report.empty());
    CHECK(all_passed(report));

    CHECK(run("trace --field \"" + (dir / "field.txt").string() + "\" --seeds 2" + out(dir), dir / "trace.log") == 0);
    CHECK(parse_streamlines(read_text((dir / "streamlines.csv").string())).size() == 8);
    CHECK(fs::exists(dir / "merge_tree.json"));
    CHECK(run("render --field \"" + (dir / "field.txt").string() + "\" --seeds 2" + out(dir), dir / "render.log") == 0);
    CHECK(fs::exists(dir / "figure.svg"));
}

TEST_CASE("verify on a field with an injected NaN exits 3")
{
    const fs::path dir = fresh_dir("nan");
    ScalarField field = fixtures::solved("disk", 1.0 / 32.0).V;
    for (size_t k = 0; k < field.values.size(); ++k)
        if (field.grid->is_interior(static_cast<int>(k))) {
            field.values[k] = std::nan("");
            break;
        }
    save_field((dir / "field.txt").string(), field);
    CHECK(run("verify --field \"" + (dir / "field.txt").string() + "\"" + out(dir), dir / "verify.log") == 3);
    CHECK_FALSE(read_text((dir / "verify.log").string()).empty());
}

TEST_CASE("usage errors exit 2")
{
    const fs::path dir = fresh_dir("usage");
    CHECK(run("", dir / "a.log") == 2);
    CHECK(run("solve", dir / "b.log") == 2);
    CHECK(run("solve --domain \"" + (dir / "none.json").string() + "\"", dir / "c.log") == 2);
    CHECK(run("frobnicate", dir / "d.log") == 2);
    write_text((dir / "bad.json").string(), R"({"format_version": 1})");
    CHECK(run("solve --domain \"" + (dir / "bad.json").string() + "\"" + out(dir), dir / "e.log") == 2);
    CHECK(read_text((dir / "e.log").string()).find("outer") != std::string::npos);
}

TEST_CASE("--help documents every flag and default")
{
    const fs::path dir = fresh_dir("help");
    REQUIRE(run("--help", dir / "top.log") == 0);
    const std::string top = read_text((dir / "top.log").string());
    for (const char* sub : {"solve", "trace", "verify", "render", "reproduce-square", "reproduce-stadium",
                            "reproduce-ellipse"})
        CHECK(top.find(sub) != std::string::npos);
    REQUIRE(run("solve --help", dir / "solve.log") == 0);
    const std::string solve = read_text((dir / "solve.log").string());
    for (const char* flag : {"--domain", "--h", "--r-gamma", "--p", "--tol", "--out", "--stencil-m", "--stencil-k",
                             "--parallel", "[0.0078125]", "[1e-08]"})
        CHECK_MESSAGE(solve.find(flag) != std::string::npos, flag);
    REQUIRE(run("trace --help", dir / "trace.log") == 0);
    const std::string trace = read_text((dir / "trace.log").string());
    for (const char* flag : {"--field", "--seeds", "--seed-int", "--out"}) CHECK(trace.find(flag) != std::string::npos);
}

TEST_CASE("reproduce-square writes its artifacts; exit code follows the report")
{
    const fs::path dir = fresh_dir("square");
    const int code = run("reproduce-square --h 0.03125" + out(dir), dir / "run.log");
    for (const char* file : {"domain.json", "field.txt", "streamlines.csv", "merge_tree.json", "figure.svg", "report.json"})
        CHECK_MESSAGE(fs::exists(dir / file), file);
    const auto report = parse_report(read_text((dir / "report.json").string()));
    CHECK(code == (all_passed(report) ? 0 : 1));
    // Diagonals and medians are traced besides 16 seeds per side.
    CHECK(parse_streamlines(read_text((dir / "streamlines.csv").string())).size() == 72);
}

TEST_CASE("identical configurations give identical artifacts")
{
    const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    run("reproduce-ellipse --h 0.0625 --seed-int 5" + out(a), a / "run.log");
    run("reproduce-ellipse --h 0.0625 --seed-int 5" + out(b), b / "run.log");
    for (const char* file : {"field.txt", "streamlines.csv", "merge_tree.json", "figure.svg", "report.json"})
        CHECK_MESSAGE(read_text((a / file).string()) == read_text((b / file).string()), file);
}
