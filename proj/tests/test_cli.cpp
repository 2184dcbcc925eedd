// End-to-end tests that drive the installed binary through a shell pipe and
// assert on exit codes and exact output, including the machine format.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using ordered_json = nlohmann::ordered_json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run_with_env(const std::string& env, const std::string& args) {
  std::string command = std::string(PARTLAB_CLI_PATH) + " " + args + " 2>&1";
  if (!env.empty()) command = env + " " + command;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE_MESSAGE(pipe != nullptr, "popen failed for: ", command);
  RunResult result;
  char buffer[4096];
  size_t got = 0;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) {
    result.output.append(buffer, got);
  }
  const int status = pclose(pipe);
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  result.exit_code = WEXITSTATUS(status);
  return result;
}

RunResult run_cli(const std::string& args) { return run_with_env("", args); }

std::vector<ordered_json> json_lines(const std::string& output) {
  std::vector<ordered_json> records;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty()) records.push_back(ordered_json::parse(line));
  }
  return records;
}

std::string read_golden(const std::string& name) {
  const std::string path = std::string(PARTLAB_GOLDEN_DIR) + "/" + name;
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "missing golden file ", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

long count_lines(const std::string& text) {
  long count = 0;
  for (char c : text) {
    if (c == '\n') ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("eval agreement in both formats") {
  const RunResult text = run_cli("eval 11");
  CHECK(text.exit_code == 0);
  CHECK(text.output ==
        "n: 11\nfractal: 56\ndirect: 56\nseries: 56\nagree: yes\n");

  const RunResult machine = run_cli("--format machine eval 11");
  CHECK(machine.exit_code == 0);
  const auto records = json_lines(machine.output);
  REQUIRE(records.size() == 1);
  CHECK(records[0]["command"] == "eval");
  CHECK(records[0]["n"] == 11);
  CHECK(records[0]["fractal"] == "56");
  CHECK(records[0]["direct"] == "56");
  CHECK(records[0]["series"] == "56");
  CHECK(records[0]["agree"] == true);

  const RunResult large = run_cli("eval 250");
  CHECK(large.exit_code == 0);
  CHECK(contains(large.output, "230793554364681"));
}

TEST_CASE("trace output matches the goldens through the pipe") {
  const struct {
    const char* args;
    const char* file;
  } cases[] = {
      {"trace 10 --tail none", "trace_p10_full.txt"},
      {"trace 10 --tail one", "trace_p10_one.txt"},
      {"trace 10 --tail two", "trace_p10_two.txt"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.file);
    const RunResult result = run_cli(c.args);
    CHECK(result.exit_code == 0);
    CHECK(result.output == read_golden(c.file));
  }
}

TEST_CASE("degenerate traces") {
  const RunResult zero = run_cli("trace 0");
  CHECK(zero.exit_code == 0);
  CHECK(zero.output == "p(0) = 1\n");

  const RunResult one = run_cli("trace 1");
  CHECK(one.exit_code == 0);
  CHECK(one.output == "p(1) = p(0)\n    = 1\n");
}

TEST_CASE("trace machine format") {
  const RunResult result = run_cli("--format machine trace 4");
  CHECK(result.exit_code == 0);
  const auto records = json_lines(result.output);
  REQUIRE(records.size() == 1);
  CHECK(records[0]["n"] == 4);
  CHECK(records[0]["variant"] == "none");
  CHECK(records[0]["steps"] == 3);
  CHECK(records[0]["nodes"] == 6);
  CHECK(records[0]["total"] == "5");
}

TEST_CASE("derive reports the verification verdict") {
  const RunResult result = run_cli("derive --cap 12 --pn one --pn1 one");
  CHECK(result.exit_code == 0);
  CHECK(result.output ==
        "p(n) = p(n-1) + p(n-2) - p(n-5) - p(n-7) + p(n-12)"
        "  [2 <= n <= 12]\n"
        "claimed: [2, 12] ok\n"
        "pass range: [1, 14] within scan [0, 40]\n"
        "first failure: n = 15 (p(n) = 176, rhs 175)\n"
        "classification: exact-truncation\n"
        "key: 1:1,2:1,5:-1,7:-1,12:1|e:0,0|o:0,0\n");
}

TEST_CASE("derive machine output is a catalog record") {
  const RunResult result =
      run_cli("--format machine derive --cap 24 --pn two --pn1 one");
  CHECK(result.exit_code == 0);
  const auto records = json_lines(result.output);
  REQUIRE(records.size() == 1);
  const ordered_json& record = records[0];
  CHECK(record["provenance"]["kind"] == "derived");
  CHECK(record["provenance"]["cap"] == 24);
  CHECK(record["provenance"]["pn"] == "two");
  CHECK(record["provenance"]["pn1"] == "one");
  CHECK(record["claimed"] == ordered_json({2, 24}));
  CHECK(record["empirical"] == ordered_json({1, 24}));
  CHECK(record["classification"] == "unrelated");
}

TEST_CASE("derive usage errors") {
  CHECK(run_cli("derive --cap 2").exit_code == 2);
  CHECK(run_cli("derive").exit_code == 2);
  CHECK(run_cli("derive --cap 12 --to 5").exit_code == 2);
}

TEST_CASE("inline verification of a set that is false in its stated range") {
  const RunResult result = run_cli(
      "verify --rhs '1:2,3:-1,5:-1,6:1,7:-1,8:1,12:1,13:-1,15:1,16:-1,24:-1' "
      "--hi 24");
  CHECK(result.exit_code == 1);
  CHECK(contains(result.output,
                 "claimed: [2, 24] FAILS at n = 22 (p(n) = 1002, rhs 1003)"));
  CHECK(contains(result.output, "pass range: [2, 21] within scan [0, 40]"));
}

TEST_CASE("inline verification of the deep truncation") {
  const RunResult result = run_cli(
      "verify --rhs '1:1,2:1,5:-1,7:-1,12:1,15:1,22:-1' --hi 24");
  CHECK(result.exit_code == 0);
  CHECK(contains(result.output, "claimed: [2, 24] ok"));
  CHECK(contains(result.output,
                 "first failure: n = 26 (p(n) = 2436, rhs 2437)"));
}

TEST_CASE("verify usage errors") {
  CHECK(run_cli("verify").exit_code == 2);
  CHECK(run_cli("verify --rhs '1:1'").exit_code == 2);  // missing --hi
  CHECK(run_cli("verify --rhs '1:1' --hi 4 --file /dev/null").exit_code == 2);
  CHECK(run_cli("verify --file /nonexistent.jsonl").exit_code == 2);
}

TEST_CASE("mined catalogs verify clean on re-read") {
  const std::string path =
      "/tmp/partlab_catalog_" + std::to_string(getpid()) + ".jsonl";
  const RunResult mined =
      run_cli("mine --caps 12,24 --to 60 --catalog " + path);
  CHECK(mined.exit_code == 0);

  const RunResult machine =
      run_cli("--format machine verify --file " + path + " --to 60");
  CHECK(machine.exit_code == 0);
  const auto records = json_lines(machine.output);
  CHECK(records.size() == 18);
  for (const auto& record : records) {
    CHECK(record["claimed_ok"] == true);
  }

  const RunResult text = run_cli("verify --file " + path + " --to 60");
  CHECK(text.exit_code == 0);
  CHECK(contains(text.output, "18 of 18 pass their claimed ranges"));
  std::remove(path.c_str());
}

TEST_CASE("mine summaries") {
  const RunResult machine =
      run_cli("--format machine mine --caps 12,24 --to 60");
  CHECK(machine.exit_code == 0);
  const auto records = json_lines(machine.output);
  REQUIRE(records.size() == 19);
  const ordered_json& summary = records.back();
  CHECK(summary["summary"] == true);
  CHECK(summary["jobs"] == 18);
  CHECK(summary["distinct"] == 18);
  CHECK(summary["anomalies"] == 0);
  CHECK(summary["errors"] == 0);

  const RunResult text = run_cli("mine --caps 12 --to 60");
  CHECK(text.exit_code == 0);
  CHECK(contains(text.output, "jobs: 9\n"));
  CHECK(contains(text.output, "distinct: 9\n"));
  CHECK(contains(text.output, "anomalies: 0\n"));
  CHECK(contains(text.output, "errors: 0\n"));
  CHECK(contains(text.output, "exact-truncation"));

  CHECK(run_cli("mine --caps 5..4").exit_code == 2);
}

TEST_CASE("selftest reports each criterion and fails the known-bad pair") {
  const RunResult text = run_cli("selftest");
  CHECK(text.exit_code == 1);
  CHECK(contains(text.output, "ok 1 - "));
  CHECK(contains(text.output, "ok 2 - "));
  CHECK(contains(text.output, "ok 3 - "));
  CHECK(contains(text.output, "FAIL 4 - "));
  CHECK(contains(text.output, "FAIL 5 - "));
  CHECK(contains(text.output, "ok 6 - "));
  CHECK(contains(text.output, "ok 7 - "));
  CHECK(contains(text.output, "ok 8 - "));
  CHECK(contains(text.output, "6 of 8 criteria pass; failing: 4 5"));

  const RunResult machine = run_cli("--format machine selftest");
  CHECK(machine.exit_code == 1);
  const auto records = json_lines(machine.output);
  REQUIRE(records.size() == 9);
  const ordered_json& summary = records.back();
  CHECK(summary["total"] == 8);
  CHECK(summary["passed"] == 6);
  CHECK(summary["failed"] == 2);
  CHECK(summary["failing"] == ordered_json({"4", "5"}));
  for (const auto& record : records) {
    if (record.contains("id") && record["id"] == "4") {
      CHECK(contains(record["detail"].get<std::string>(), "n = 22"));
    }
  }

  // Byte-identical across runs: no timing or ordering leaks into the output.
  const RunResult again = run_cli("--format machine selftest");
  CHECK(again.output == machine.output);
}

TEST_CASE("a corrupted generator rule flips the structural criteria red") {
  const RunResult result =
      run_cli("--format machine selftest --mutate-generator");
  CHECK(result.exit_code == 1);
  const auto records = json_lines(result.output);
  REQUIRE(!records.empty());
  CHECK(records.back()["failing"] ==
        ordered_json({"1", "2", "3", "4", "5"}));
}

TEST_CASE("environment variables tighten the resource limits") {
  CHECK(run_with_env("PARTLAB_MAX_FRACTAL=50", "eval 100").exit_code == 3);
  CHECK(run_with_env("PARTLAB_MAX_TRACE_NODES=10", "trace 10").exit_code == 3);
  CHECK(run_with_env("PARTLAB_MAX_SCAN=30", "mine --caps 12 --to 60")
            .exit_code == 3);
}

TEST_CASE("bench reports one row per method") {
  const RunResult result = run_cli("bench --sizes 100");
  CHECK(result.exit_code == 0);
  CHECK(contains(result.output, "n\tmethod\tms\tpeak_bytes\tvalue\n"));
  CHECK(contains(result.output, "direct"));
  CHECK(contains(result.output, "series"));
  CHECK(contains(result.output, "fractal"));
  CHECK(contains(result.output, "190569292"));
  CHECK(count_lines(result.output) == 4);  // header + three methods

  const RunResult empty = run_cli("bench --sizes ''");
  CHECK(empty.exit_code == 0);
  CHECK(empty.output == "n\tmethod\tms\tpeak_bytes\tvalue\n");

  const RunResult machine =
      run_cli("--format machine bench --sizes 100 --skip-fractal");
  CHECK(machine.exit_code == 0);
  const auto records = json_lines(machine.output);
  REQUIRE(records.size() == 2);
  for (const auto& record : records) {
    CHECK(record["value"] == "190569292");
    CHECK(record["agree"] == true);
  }
}

TEST_CASE("usage and help exit codes") {
  CHECK(run_cli("").exit_code == 2);            // a subcommand is required
  CHECK(run_cli("--nonsense").exit_code == 2);  // unknown flag
  CHECK(run_cli("eval").exit_code == 2);        // missing argument
  CHECK(run_cli("eval -5").exit_code == 2);     // negative index
  CHECK(run_cli("frobnicate").exit_code == 2);  // unknown subcommand

  const RunResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(contains(help.output, "eval"));
  CHECK(contains(help.output, "selftest"));
}

TEST_CASE("the format flag works before or after the subcommand") {
  const RunResult before = run_cli("--format machine eval 7");
  const RunResult after = run_cli("eval 7 --format machine");
  CHECK(before.exit_code == 0);
  CHECK(after.exit_code == 0);
  CHECK(before.output == after.output);
}