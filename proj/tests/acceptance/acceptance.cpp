#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "common.hpp"
#include "rg/audit.hpp"
#include "rg/aux_solver.hpp"
#include "rg/belief.hpp"
#include "rg/cli.hpp"
#include "rg/optimization.hpp"
#include "rg/oracle.hpp"
#include "rg/strategy.hpp"

namespace fs = std::filesystem;
using namespace rg;
using rgtest::Q;
using rgtest::X;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string run_cli_capture(std::vector<std::string> args, int* code) {
  args.insert(args.begin(), "rgtool");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  *code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

std::string game_path(const std::string& name) { return rgtest::games_dir() + "/" + name + ".game"; }

// The bundled (game, initial law) pairs that pass the audit.
std::vector<std::pair<std::string, std::string>> passing_pairs() {
  return {{"secondorder", "pi"},  {"secondorder", "prime"},        {"varaux", ""},
          {"pomdp-small", ""},    {"informed-controller", ""},     {"observed-actions", ""},
          {"iid-noinfo", ""}};
}

const InitialLaw& law_of(const GameDocument& doc, const std::string& name) {
  return name.empty() ? doc.initials.front() : doc.initial(name);
}

std::vector<Evaluation> short_evaluations() {
  std::vector<Evaluation> out;
  for (const char* t : {"1", "1/2,1/2", "1/3,2/3", "1/3,1/3,1/3", "1/2,1/4,1/4", "0,0,1"}) {
    out.push_back(Evaluation::parse(t));
  }
  return out;
}

Outcome criterion1() {
  Outcome o;
  auto t0 = Clock::now();
  int code = 0;
  std::string pi = run_cli_capture(
      {"--no-cache", "value", game_path("secondorder"), "--theta", "1", "--initial", "pi"}, &code);
  if (code != 0 || pi != "7/8\n") o.fail("pi gave '" + pi + "'");
  std::string prime = run_cli_capture(
      {"--no-cache", "value", game_path("secondorder"), "--theta", "1", "--initial", "prime"},
      &code);
  if (code != 0 || prime != "11/12\n") o.fail("prime gave '" + prime + "'");
  double secs = seconds_since(t0);
  if (secs >= 1.0) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = "7/8 and 11/12 in " + std::to_string(secs) + " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  auto t0 = Clock::now();
  GameDocument doc = rgtest::load("varaux");
  const InitialLaw& pi = doc.initials.front();
  HierarchyTriple t = initial_hierarchy(pi, 2);
  std::set<BeliefPoint> x1;
  for (std::size_t c = 0; c < t.x1.size(); ++c) x1.insert(t.x1[c]);
  if (x1 != std::set<BeliefPoint>{X(1), X(Q("1/2")), X(0)}) o.fail("x1 values differ");
  // Displayed masses 8/24, 2/24, 2/24 and 6/24, 6/24, doubled.
  BeliefAtomLaw yu1 = rgtest::Z({{X(1), "16/24"}, {X(Q("1/2")), "4/24"}, {X(0), "4/24"}});
  BeliefAtomLaw yu2 = rgtest::Z({{X(Q("1/2")), "12/24"}, {X(0), "12/24"}});
  std::map<std::string, BeliefAtomLaw> y1;
  for (std::size_t d = 0; d < t.y1.size(); ++d) y1[pi.signals2[d]] = t.y1[d];
  if (!(y1["u1"] == yu1)) o.fail("y1(u1) = " + to_string(y1["u1"]));
  if (!(y1["u2"] == yu2)) o.fail("y1(u2) = " + to_string(y1["u2"]));
  HierarchyLaw eta = HierarchyLaw::make({{yu1, Q("1/2")}, {yu2, Q("1/2")}});
  if (!(t.eta == eta)) o.fail("eta1 = " + to_string(t.eta));
  double secs = seconds_since(t0);

  fs::path dir = fs::temp_directory_path() / ("rg-acceptance-" + std::to_string(::getpid()));
  int code = 0;
  run_cli_capture({"--no-cache", "report", game_path("varaux"), "--out", dir.string()}, &code);
  std::ifstream in(dir / "beliefs.txt");
  std::stringstream text;
  text << in.rdbuf();
  fs::remove_all(dir);
  if (code != 0) o.fail("report exited with " + std::to_string(code));
  if (text.str().find("unnormalized law") == std::string::npos ||
      text.str().find("total mass 1/2") == std::string::npos) {
    o.fail("report lacks the normalization note");
  }
  if (secs >= 1.0) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = "x1, y1, eta1 exact; normalization flagged; " + std::to_string(secs) + " s";
  return o;
}

// Relabels and splits initial signals. Splitting c' uses a ratio that may depend on d',
// splitting d' a fixed ratio; neither changes the second-order law.
InitialLaw transform(const InitialLaw& pi, std::mt19937_64& rng) {
  InitialLaw out = pi;
  auto draw_ratio = [&] { return make_rational(static_cast<long>(rng() % 3) + 1, 4); };
  int steps = 1 + static_cast<int>(rng() % 3);
  for (int s = 0; s < steps; ++s) {
    int kind = static_cast<int>(rng() % 3);
    if (kind == 0) {
      // Permute both alphabets and rename every label.
      std::vector<int> p1(out.signals1.size()), p2(out.signals2.size());
      for (std::size_t i = 0; i < p1.size(); ++i) p1[i] = static_cast<int>(i);
      for (std::size_t i = 0; i < p2.size(); ++i) p2[i] = static_cast<int>(i);
      std::shuffle(p1.begin(), p1.end(), rng);
      std::shuffle(p2.begin(), p2.end(), rng);
      std::vector<std::string> s1(p1.size()), s2(p2.size());
      for (std::size_t i = 0; i < p1.size(); ++i) s1[p1[i]] = "r" + out.signals1[i];
      for (std::size_t i = 0; i < p2.size(); ++i) s2[p2[i]] = "r" + out.signals2[i];
      for (auto& a : out.atoms) {
        a.c = p1[a.c];
        a.d = p2[a.d];
      }
      out.signals1 = s1;
      out.signals2 = s2;
    } else if (kind == 1) {
      int c = static_cast<int>(rng() % out.signals1.size());
      int fresh = static_cast<int>(out.signals1.size());
      out.signals1.push_back(out.signals1[c] + "b");
      std::map<int, Rational> ratio;
      for (std::size_t d = 0; d < out.signals2.size(); ++d) ratio[static_cast<int>(d)] = draw_ratio();
      std::vector<InitialAtom> extra;
      for (auto& a : out.atoms) {
        if (a.c != c) continue;
        InitialAtom b = a;
        b.c = fresh;
        b.mass = a.mass * ratio[a.d];
        a.mass -= b.mass;
        extra.push_back(b);
      }
      out.atoms.insert(out.atoms.end(), extra.begin(), extra.end());
    } else {
      int d = static_cast<int>(rng() % out.signals2.size());
      int fresh = static_cast<int>(out.signals2.size());
      out.signals2.push_back(out.signals2[d] + "b");
      Rational ratio = draw_ratio();
      std::vector<InitialAtom> extra;
      for (auto& a : out.atoms) {
        if (a.d != d) continue;
        InitialAtom b = a;
        b.d = fresh;
        b.mass = a.mass * ratio;
        a.mass -= b.mass;
        extra.push_back(b);
      }
      out.atoms.insert(out.atoms.end(), extra.begin(), extra.end());
    }
  }
  out.name = pi.name + "-transformed";
  out.canonicalize();
  return out;
}

HierarchyLaw random_eta(std::mt19937_64& rng) {
  Atoms<BeliefAtomLaw> atoms;
  int nz = 1 + static_cast<int>(rng() % 2);
  for (int s = 0; s < nz; ++s) {
    Atoms<BeliefPoint> z;
    int np = 1 + static_cast<int>(rng() % 2);
    for (int a = 0; a < np; ++a) {
      z.emplace_back(X(make_rational(static_cast<long>(rng() % 5), 4)),
                     make_rational(static_cast<long>(rng() % 3) + 1));
    }
    atoms.emplace_back(BeliefAtomLaw::normalized(z), make_rational(static_cast<long>(rng() % 2) + 1));
  }
  return HierarchyLaw::normalized(atoms);
}

Outcome criterion3() {
  Outcome o;
  std::mt19937_64 rng(20241014);
  const std::vector<std::string> games = {"secondorder", "informed-controller", "varaux",
                                          "pomdp-small", "iid-noinfo"};
  std::vector<GameDocument> docs;
  for (const auto& g : games) docs.push_back(rgtest::load(g));
  int pairs = 0, solves = 0;
  for (int n = 0; n < 50; ++n) {
    const GameDocument& doc = docs[n % docs.size()];
    InitialLaw base = (n % 3 == 0) ? doc.initials.front() : canonical_game(random_eta(rng));
    InitialLaw other = transform(base, rng);
    if (n % 7 == 3) other = canonical_game(phi(other, 2));
    if (!(phi(base, 2) == phi(other, 2))) {
      o.fail("generated pair " + std::to_string(n) + " has different second-order laws");
      continue;
    }
    ++pairs;
    for (const Evaluation& theta : short_evaluations()) {
      Rational a = oracle_value(doc.spec, base, theta).value;
      Rational b = oracle_value(doc.spec, other, theta).value;
      solves += 2;
      if (a != b) {
        o.fail("pair " + std::to_string(n) + " on " + games[n % games.size()] + " theta " +
               to_string(theta) + ": " + to_string(a) + " vs " + to_string(b));
      }
    }
  }
  if (o.pass) {
    o.detail = std::to_string(pairs) + " pairs, " + std::to_string(solves) + " exact solves agree";
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  auto t0 = Clock::now();
  int checks = 0;
  for (const auto& [name, law] : passing_pairs()) {
    GameDocument doc = rgtest::load(name);
    const InitialLaw& pi = law_of(doc, law);
    AuxSolver solver(doc.spec);
    HierarchyLaw eta = phi(pi, doc.spec.num_states());
    for (const Evaluation& theta : short_evaluations()) {
      AuxValueResult aux = aux_value(solver, eta, theta);
      Rational oracle = oracle_value(doc.spec, pi, theta).value;
      ++checks;
      std::string where = name + (law.empty() ? "" : "/" + law) + " theta " + to_string(theta);
      if (!(aux.lower <= oracle && oracle <= aux.upper)) {
        o.fail(where + ": [" + to_string(aux.lower) + ", " + to_string(aux.upper) +
               "] misses " + to_string(oracle));
      }
      if (aux.upper - aux.lower > Q("1/1000")) o.fail(where + ": width above 1e-3");
    }
  }
  double secs = seconds_since(t0);
  if (secs > 600) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) {
    o.detail = std::to_string(checks) + " brackets contain the oracle; " + std::to_string(secs) +
               " s";
  }
  return o;
}

BeliefAtomLaw random_z(std::mt19937_64& rng, int max_atoms = 3) {
  Atoms<BeliefPoint> atoms;
  int n = 1 + static_cast<int>(rng() % max_atoms);
  for (int a = 0; a < n; ++a) {
    atoms.emplace_back(X(make_rational(static_cast<long>(rng() % 13), 12)),
                       make_rational(static_cast<long>(rng() % 5) + 1));
  }
  return BeliefAtomLaw::normalized(atoms);
}

std::vector<Rational> random_dist(std::mt19937_64& rng, int n) {
  std::vector<Rational> w;
  for (int i = 0; i < n; ++i) w.push_back(make_rational(static_cast<long>(rng() % 4)));
  if (is_zero(sum(w))) w[rng() % n] = 1;
  Rational s = sum(w);
  for (auto& x : w) x /= s;
  return w;
}

const std::vector<std::string>& probe_games() {
  static const std::vector<std::string> g = {"secondorder", "informed-controller",
                                             "observed-actions", "varaux", "pomdp-small",
                                             "iid-noinfo"};
  return g;
}

Outcome criterion5() {
  Outcome o;
  std::mt19937_64 rng(5);
  int n = 0;
  for (const auto& name : probe_games()) {
    GameDocument doc = rgtest::load(name);
    AuxSolver solver(doc.spec);
    std::vector<std::pair<BeliefAtomLaw, BeliefAtomLaw>> pairs;
    int count = name == probe_games().front() ? 200 - 33 * 5 : 33;
    for (int s = 0; s < count; ++s) pairs.emplace_back(random_z(rng), random_z(rng));
    ProbeReport r = lipschitz_probe(solver, Evaluation::parse("1"), pairs);
    for (std::size_t s = 0; s < pairs.size(); ++s, ++n) {
      // Independent recomputation: one-stage values are profile games.
      Rational gap = profile_stage_game(doc.spec, pairs[s].first).value -
                     profile_stage_game(doc.spec, pairs[s].second).value;
      if (sgn(gap) < 0) gap = -gap;
      Rational d = wasserstein_distance(pairs[s].first, pairs[s].second).distance;
      if (gap > d) o.fail(name + ": |dv| = " + to_string(gap) + " > d = " + to_string(d));
      if (r.entries[s].lhs != gap || r.entries[s].rhs != d || !r.entries[s].holds) {
        o.fail(name + ": probe disagrees with the recomputation");
      }
    }
  }
  if (o.pass) o.detail = std::to_string(n) + " pairs, zero violations";
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(6);
  int n = 0;
  for (const auto& name : probe_games()) {
    GameDocument doc = rgtest::load(name);
    AuxSolver solver(doc.spec);
    std::vector<ConcavityTriple> triples;
    int count = name == probe_games().front() ? 200 - 33 * 5 : 33;
    for (int s = 0; s < count; ++s) {
      triples.push_back({random_z(rng), random_z(rng), make_rational(static_cast<long>(rng() % 9), 8)});
    }
    ProbeReport r = concavity_probe(solver, Evaluation::parse("1"), triples);
    for (std::size_t s = 0; s < triples.size(); ++s, ++n) {
      const auto& t = triples[s];
      BeliefAtomLaw mixed = mix({{t.z, t.lambda}, {t.zp, 1 - t.lambda}});
      Rational lhs = profile_stage_game(doc.spec, mixed).value;
      Rational rhs = t.lambda * profile_stage_game(doc.spec, t.z).value +
                     (1 - t.lambda) * profile_stage_game(doc.spec, t.zp).value;
      if (lhs < rhs) o.fail(name + ": " + to_string(lhs) + " < " + to_string(rhs));
      if (!r.entries[s].holds) o.fail(name + ": probe reports a violation");
    }
  }
  if (o.pass) o.detail = std::to_string(n) + " triples, zero violations";
  return o;
}

// Checks a coupling kernel[nu atom][mu atom] directly against both laws.
bool kernel_certifies(const HierarchyLaw& mu, const HierarchyLaw& nu, const Matrix& k) {
  if (k.size() != nu.atoms.size()) return false;
  for (std::size_t b = 0; b < mu.atoms.size(); ++b) {
    Rational col = 0;
    for (std::size_t a = 0; a < nu.atoms.size(); ++a) col += k[a][b];
    if (col != mu.atoms[b].second) return false;
  }
  for (std::size_t a = 0; a < nu.atoms.size(); ++a) {
    if (k[a].size() != mu.atoms.size()) return false;
    Rational row = 0;
    std::map<BeliefPoint, Rational> mean;
    for (std::size_t b = 0; b < mu.atoms.size(); ++b) {
      if (sgn(k[a][b]) < 0) return false;
      row += k[a][b];
      for (const auto& [p, m] : mu.atoms[b].first.atoms) mean[p] += k[a][b] * m;
    }
    if (row != nu.atoms[a].second) return false;
    std::map<BeliefPoint, Rational> target;
    for (const auto& [p, m] : nu.atoms[a].first.atoms) target[p] = nu.atoms[a].second * m;
    std::erase_if(mean, [](const auto& e) { return is_zero(e.second); });
    if (mean != target) return false;
  }
  return true;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(7);
  int n = 0;
  const std::vector<std::string> games = {"informed-controller", "observed-actions", "pomdp-small",
                                          "varaux", "iid-noinfo"};
  for (const auto& name : games) {
    GameDocument doc = rgtest::load(name);
    FirstOrderKernel f = derive_first_order_kernel(doc.spec).kernel;
    int ni = doc.spec.num_actions1();
    for (int s = 0; s < 20; ++s, ++n) {
      Split split;
      int parts = 2 + static_cast<int>(rng() % 2);
      std::vector<Rational> w;
      for (int p = 0; p < parts; ++p) w.push_back(make_rational(static_cast<long>(rng() % 3) + 1));
      Rational total = sum(w);
      for (int p = 0; p < parts; ++p) {
        split.lambda.push_back(w[p] / total);
        BeliefAtomLaw z = random_z(rng, 2);
        AuxAction a;
        for (const auto& [x, m] : z.atoms) a.rules.emplace_back(x, random_dist(rng, ni));
        split.z.push_back(z);
        split.a.push_back(a);
      }
      SplitCheck c = check_split(doc.spec, f, split);
      // Recompute both sides of the Choquet comparison independently.
      std::vector<std::pair<HierarchyLaw, Rational>> parts_l;
      for (int p = 0; p < parts; ++p) {
        parts_l.emplace_back(aux_transition(doc.spec, f, split.z[p], split.a[p]), split.lambda[p]);
      }
      HierarchyLaw mu = mix(parts_l);
      BeliefAtomLaw zmix = mix(std::vector<std::pair<BeliefAtomLaw, Rational>>{
          [&] {
            std::vector<std::pair<BeliefAtomLaw, Rational>> v;
            for (int p = 0; p < parts; ++p) v.emplace_back(split.z[p], split.lambda[p]);
            return v;
          }()});
      HierarchyLaw nu = aux_transition(doc.spec, f, zmix, splitting_action(split, ni));
      Rational g_parts = 0;
      for (int p = 0; p < parts; ++p) {
        g_parts += split.lambda[p] * aux_payoff_min(doc.spec, split.z[p], split.a[p]);
      }
      std::string where = name + " split " + std::to_string(s);
      if (!c.choquet || !c.certificate.holds) o.fail(where + ": Choquet comparison fails");
      else if (!kernel_certifies(mu, nu, c.certificate.kernel)) o.fail(where + ": bad kernel");
      if (!c.payoff || c.g_mixed < g_parts || c.g_parts != g_parts) o.fail(where + ": payoff");
    }
  }
  if (o.pass) o.detail = std::to_string(n) + " splits with verified coupling kernels";
  return o;
}

Outcome criterion8() {
  Outcome o;
  for (const char* name : {"pomdp-small", "informed-controller", "observed-actions", "varaux"}) {
    GameDocument doc = rgtest::load(name);
    if (!audit_all(doc.spec, doc.initials.front()).overall_pass()) {
      o.fail(std::string(name) + " does not pass");
    }
  }
  GameDocument two = rgtest::load("2etpas1");
  const InitialLaw& pi = two.initials.front();
  AuditReport r = audit_all(two.spec, pi);
  if (r.overall_pass() || r.a1a.pass) o.fail("2etpas1 passes A1a");
  else if (two.spec.states[r.a1a.k] != "alpha" || pi.signals1[r.a1a.c] != "c0" ||
           pi.signals2[r.a1a.d] != "dalpha") {
    o.fail("2etpas1 A1a witness differs");
  }
  if (r.a1b.verdict != Verdict::Fail) o.fail("2etpas1 passes A1b");
  else if (two.spec.signals2[r.a1b.witness.d1] == two.spec.signals2[r.a1b.witness.d2]) {
    o.fail("2etpas1 A1b witness does not contrast dalpha and dbeta");
  }
  GameSpec bad = parse_game_document(rgtest::a3_violating_text()).spec;
  PushforwardResult p = check_pushforward_independence(bad, derive_first_order_kernel(bad).kernel);
  if (p.verdict != Verdict::Fail) o.fail("constructed violator passes A'3");
  if (o.pass) {
    o.detail = "4 passes; 2etpas1 fails A1a at (alpha, c0, dalpha) and A1b; A'3 violator fails";
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  auto t0 = Clock::now();
  GameDocument doc = rgtest::load("informed-controller");
  const InitialLaw& pi = doc.initials.front();
  AuxSolver solver(doc.spec);
  Evaluation theta = Evaluation::uniform(2);
  HierarchyLaw eta = phi(pi, 2);
  auto rules = aux_optimal_stage_rules(solver, eta, theta);
  BehaviorStrategy sigma = lift_markov_strategy(doc.spec, solver.kernel(), pi, rules);
  AuxValueResult aux = aux_value(solver, eta, theta);
  Rational guaranteed = best_reply_value(doc.spec, pi, sigma, theta).value;
  if (guaranteed < aux.lower - Q("3/1000")) {
    o.fail("lifted guarantee " + to_string(guaranteed) + " below " + to_string(aux.lower));
  }
  BehaviorStrategy tau = block_strategy(doc.spec, pi, 1, 3);
  Rational bound;
  for (int l = 0; l < 3; ++l) {
    Rational v = shifted_window_value(doc.spec, pi, l, 1);
    if (l == 0 || v > bound) bound = v;
  }
  Rational reply = best_reply_value(doc.spec, pi, tau, Evaluation::uniform(3)).value;
  if (reply > bound) o.fail("block reply " + to_string(reply) + " above " + to_string(bound));
  double secs = seconds_since(t0);
  if (secs > 300) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) {
    o.detail = "lifted " + to_string(guaranteed) + " >= aux " + to_string(aux.lower) +
               " - 3e-3; block " + to_string(reply) + " <= " + to_string(bound);
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exact second-order values", criterion1},
      {"varaux belief reproduction", criterion2},
      {"projection invariance", criterion3},
      {"oracle and recursion agree", criterion4},
      {"Lipschitz suite", criterion5},
      {"concavity suite", criterion6},
      {"splitting and Choquet suite", criterion7},
      {"audit outcomes", criterion8},
      {"guarantee checks", criterion9},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("EXCLUDED 10 uniform value: v* is reported as truncated bounds only\n");
  return failures == 0 ? 0 : 1;
}
