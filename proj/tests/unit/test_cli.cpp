#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "common.hpp"
#include "doctest.h"
#include "rg/behavior.hpp"
#include "rg/cache.hpp"
#include "rg/cli.hpp"

namespace fs = std::filesystem;
using namespace rg;
using rgtest::Q;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("rg-test-" + std::to_string(std::random_device{}()) + "-" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "rgtool");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string game(const std::string& name) { return rgtest::games_dir() + "/" + name + ".game"; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("cache: store, lookup, key separation and tampering") {
  TempDir dir;
  ResultCache cache(dir.path.string());
  std::string k = ResultCache::key("digest", "aux-value", "theta=1;tol=1/1000");
  CHECK_FALSE(cache.lookup(k).has_value());
  cache.store(k, "7/8 [7/8, 7/8]\n");
  auto hit = cache.lookup(k);
  REQUIRE(hit.has_value());
  CHECK(*hit == "7/8 [7/8, 7/8]\n");
  CHECK(k != ResultCache::key("digest", "aux-value", "theta=1;tol=1/10000"));
  CHECK_FALSE(cache.lookup(ResultCache::key("digest", "aux-value", "theta=1;tol=1/10000")));

  std::string text = slurp(cache.path(k));
  text.back() = 'X';
  std::ofstream(cache.path(k), std::ios::binary) << text;
  CHECK_FALSE(cache.lookup(k).has_value());
  CHECK_FALSE(cache.warnings().empty());
}

TEST_CASE("parse_exact_number") {
  CHECK(parse_exact_number("1e-3") == Q("1/1000"));
  CHECK(parse_exact_number("0.001") == Q("1/1000"));
  CHECK(parse_exact_number("2.5E1") == 25);
  CHECK(parse_exact_number("3/4") == Q("3/4"));
  CHECK_THROWS(parse_exact_number("abc"));
}

TEST_CASE("cache directory resolution") {
  ::unsetenv("RG_CACHE_DIR");
  CHECK(resolve_cache_dir("/tmp/flag") == "/tmp/flag");
  ::setenv("RG_CACHE_DIR", "/tmp/env", 1);
  CHECK(resolve_cache_dir("/tmp/flag") == "/tmp/env");
  ::unsetenv("RG_CACHE_DIR");
}

TEST_CASE("cli: value prints exact rationals") {
  Run pi = run({"--no-cache", "value", game("secondorder"), "--theta", "1", "--initial", "pi"});
  CHECK(pi.code == 0);
  CHECK(pi.out == "7/8\n");
  Run both = run({"--no-cache", "value", game("secondorder"), "--theta", "1"});
  CHECK(both.out == "pi: 7/8\nprime: 11/12\n");
}

TEST_CASE("cli: second run is served from the cache") {
  TempDir dir;
  ::unsetenv("RG_CACHE_DIR");
  Run a = run({"--cache-dir", dir.path.string(), "value", game("observed-actions"), "--theta",
               "1/2,1/2"});
  CHECK(a.code == 0);
  std::size_t entries = std::distance(fs::directory_iterator(dir.path), fs::directory_iterator{});
  CHECK(entries == 1);
  fs::path entry = fs::directory_iterator(dir.path)->path();
  auto stamp = fs::last_write_time(entry);
  Run b = run({"--cache-dir", dir.path.string(), "value", game("observed-actions"), "--theta",
               "1/2,1/2"});
  CHECK(b.out == a.out);
  CHECK(fs::last_write_time(entry) == stamp);
  // A tampered entry is recomputed with a warning.
  std::ofstream(entry, std::ios::binary | std::ios::app) << "junk";
  Run c = run({"--cache-dir", dir.path.string(), "value", game("observed-actions"), "--theta",
               "1/2,1/2"});
  CHECK(c.out == a.out);
  CHECK(c.err.find("warning") != std::string::npos);
}

TEST_CASE("cli: exit codes") {
  Run audit = run({"audit", game("2etpas1")});
  CHECK(audit.code == 1);
  CHECK(audit.out.find("A1a") != std::string::npos);
  CHECK(audit.out.find("dalpha") != std::string::npos);
  CHECK(run({"audit", game("pomdp-small")}).code == 0);
  CHECK(run({"--no-cache", "value", game("secondorder"), "--theta", "1/2,1/3"}).code == 2);
  CHECK(run({"--no-cache", "--budget", "5", "value", game("observed-actions"), "--theta",
             "1/3,1/3,1/3"}).code == 2);
  CHECK(run({"value", "/nonexistent.game", "--theta", "1"}).code == 2);
  CHECK(run({"--no-cache", "aux-value", game("2etpas1"), "--theta", "1"}).code == 1);
  CHECK(run({"--no-cache", "aux-value", game("varaux"), "--theta", "1", "--tol", "0"}).code == 2);
}

TEST_CASE("cli: aux-value prints a value and its interval") {
  Run r = run({"--no-cache", "aux-value", game("secondorder"), "--theta", "1", "--initial", "pi"});
  CHECK(r.code == 0);
  CHECK(r.out == "7/8 [7/8, 7/8]\n");
}

TEST_CASE("cli: wasserstein") {
  TempDir dir;
  std::ofstream(dir.path / "a.z") << "1 : 1/2 1/2\n";
  std::ofstream(dir.path / "b.z") << "1/2 : 3/8 5/8\n1/2 : 5/8 3/8\n";
  Run r = run({"wasserstein", (dir.path / "a.z").string(), (dir.path / "b.z").string()});
  CHECK(r.code == 0);
  CHECK(r.out == "1/4\n");
}

TEST_CASE("cli: simulate is reproducible") {
  TempDir dir;
  GameDocument doc = rgtest::load("secondorder");
  std::ofstream(dir.path / "s.txt") <<
      BehaviorStrategy::uniform(1, 2, 1).serialize(doc.spec, doc.initial("pi"));
  std::ofstream(dir.path / "t.txt") <<
      BehaviorStrategy::uniform(2, 2, 1).serialize(doc.spec, doc.initial("pi"));
  std::vector<std::string> args = {"simulate", game("secondorder"), "--initial", "pi",
                                   "--sigma", (dir.path / "s.txt").string(),
                                   "--tau", (dir.path / "t.txt").string(),
                                   "--seed", "3", "--samples", "500", "--horizon", "1"};
  Run a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK_FALSE(a.out.empty());
}

TEST_CASE("cli: verify and report") {
  CHECK(run({"--no-cache", "verify", game("informed-controller")}).code == 0);
  TempDir dir;
  fs::path out1 = dir.path / "r1", out2 = dir.path / "r2";
  Run a = run({"--no-cache", "report", game("varaux"), "--out", out1.string()});
  Run b = run({"--no-cache", "report", game("varaux"), "--out", out2.string()});
  CHECK(a.code == 0);
  CHECK(b.code == 0);
  for (const char* f : {"audit.txt", "beliefs.txt", "values.txt", "aux.txt", "vstar.csv",
                        "verify.txt"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(out1 / f));
    CHECK(slurp(out1 / f) == slurp(out2 / f));
  }
  std::string beliefs = slurp(out1 / "beliefs.txt");
  CHECK(beliefs.find("normalized") != std::string::npos);
  CHECK(beliefs.find("1/2") != std::string::npos);
}
