#include "common.hpp"
#include "doctest.h"
#include "rg/audit.hpp"
#include "rg/belief.hpp"
#include "rg/errors.hpp"

using namespace rg;
using rgtest::Q;

TEST_CASE("A1a") {
  CHECK(check_a1a(rgtest::load("varaux").initials.front()).pass);
  const InitialLaw pi = rgtest::load("2etpas1").initials.front();
  A1aResult r = check_a1a(pi);
  CHECK_FALSE(r.pass);
  CHECK(r.k == 0);
  CHECK(pi.signals1[r.c] == "c0");
  CHECK(pi.signals2[r.d] == "dalpha");
  InitialLaw product = parse_game_document(
      "[game]\nstates = k1 k2\nactions1 = a\nactions2 = b\nsignals1 = c\nsignals2 = d\n"
      "[payoff]\nk1 a b = 1\nk2 a b = 0\n"
      "[transition]\nk1 a b -> k1 c d : 1\nk2 a b -> k2 c d : 1\n"
      "[initial]\nk1 c d : 1/3\nk2 c d : 2/3\n").initials.front();
  CHECK(check_a1a(product).pass);
}

TEST_CASE("A1b: informed controller gets Dirac images") {
  GameSpec g = rgtest::load("informed-controller").spec;
  KernelResult r = derive_first_order_kernel(g);
  CHECK(r.verdict == Verdict::Pass);
  for (const BeliefPoint& x : audit_sample_points(2)) {
    for (int i = 0; i < 2; ++i) {
      for (int c = 0; c < g.num_signals1(); ++c) {
        // Labels k1n1 k1n2 reveal k1, k2n1 k2n2 reveal k2.
        int k = c < 2 ? 0 : 1;
        Rational mass = 0;
        for (int s = 0; s < 2; ++s) {
          for (const auto& a : g.transition(s, i, 0)) {
            if (a.c == c) mass += x.probs[s] * a.mass;
          }
        }
        if (!is_positive(mass)) continue;
        CHECK(first_order_update(r.kernel, x, i, c) == BeliefPoint::dirac(2, k));
      }
    }
  }
}

TEST_CASE("A1b: the two-stage counterexample fails with opposite ratios") {
  GameSpec g = rgtest::load("2etpas1").spec;
  KernelResult r = derive_first_order_kernel(g);
  CHECK(r.verdict == Verdict::Fail);
  REQUIRE(r.witness.p.has_value());
  CHECK(r.witness.d1 != r.witness.d2);
  // Column for d = dalpha forces F[alpha] = 1, for d = dbeta it forces F[alpha] = 0.
  FirstOrderKernel f = build_first_order_kernel(g);
  for (const auto& cand : f.at(0, 0)) {
    Rational alpha = cand.m[0][0] + cand.m[1][0], beta = cand.m[0][1] + cand.m[1][1];
    if (g.signals2[cand.d] == "dalpha") {
      CHECK(alpha > 0);
      CHECK(beta == 0);
    } else {
      CHECK(alpha == 0);
      CHECK(beta > 0);
    }
  }
}

TEST_CASE("A1b: transition independent of (j, d)") {
  CHECK(derive_first_order_kernel(rgtest::load("pomdp-small").spec).verdict == Verdict::Pass);
  CHECK(derive_first_order_kernel(rgtest::load("iid-noinfo").spec).verdict == Verdict::Pass);
}

TEST_CASE("A2a") {
  A2aResult varaux = check_a2a(rgtest::load("varaux").initials.front(), 2);
  CHECK(varaux.pass);
  A2aResult red = check_a2a(rgtest::load("reducednecessity").initials.front(), 2);
  CHECK(red.pass);
  BeliefAtomLaw k1 = BeliefAtomLaw::dirac(BeliefPoint::dirac(2, 0));
  for (const auto& y : red.table) CHECK(y == k1);
  InitialLaw pub = parse_game_document(
      "[game]\nstates = k1 k2\nactions1 = a\nactions2 = b\nsignals1 = c\nsignals2 = d\n"
      "[payoff]\nk1 a b = 1\nk2 a b = 0\n"
      "[transition]\nk1 a b -> k1 c d : 1\nk2 a b -> k2 c d : 1\n"
      "[initial]\nk1 x x : 1/4\nk2 x x : 1/4\nk1 y y : 1/2\n").initials.front();
  CHECK(check_a2a(pub, 2).pass);
  CHECK_THROWS_AS(check_a2a(rgtest::load("2etpas1").initials.front(), 2), PreconditionError);
}

TEST_CASE("A'2b") {
  GameSpec obs = rgtest::load("observed-actions").spec;
  SignalInclusionResult r = check_signal_inclusion(obs);
  REQUIRE(r.pass);
  // h drops player 1's private component: "TLs1u" -> "TLu".
  for (int c = 0; c < obs.num_signals1(); ++c) {
    std::string label = obs.signals1[c];
    std::string expected = label.substr(0, 2) + label.substr(4);
    CHECK(obs.signals2[r.h[c]] == expected);
  }
  SignalInclusionResult bad = check_signal_inclusion(rgtest::load("reducednecessity").spec);
  CHECK_FALSE(bad.pass);
  CHECK(bad.d1 != bad.d2);
  GameSpec one = rgtest::load("pomdp-small").spec;
  SignalInclusionResult single = check_signal_inclusion(one);
  CHECK(single.pass);
  for (int d : single.h) CHECK(d == 0);
}

TEST_CASE("A'3") {
  auto check = [](const GameSpec& g) {
    return check_pushforward_independence(g, derive_first_order_kernel(g).kernel);
  };
  CHECK(check(rgtest::load("informed-controller").spec).verdict == Verdict::Pass);
  CHECK(check(rgtest::load("observed-actions").spec).verdict == Verdict::Pass);
  GameSpec bad = parse_game_document(rgtest::a3_violating_text()).spec;
  PushforwardResult r = check(bad);
  CHECK(r.verdict == Verdict::Fail);
  CHECK(r.j != r.jp);
  CHECK(r.x.has_value());
}

TEST_CASE("audit_all") {
  for (const char* name : {"pomdp-small", "informed-controller", "observed-actions", "varaux",
                           "secondorder", "iid-noinfo"}) {
    CAPTURE(name);
    GameDocument doc = rgtest::load(name);
    for (const auto& pi : doc.initials) CHECK(audit_all(doc.spec, pi).overall_pass());
  }
  GameDocument two = rgtest::load("2etpas1");
  AuditReport r = audit_all(two.spec, two.initials.front());
  CHECK_FALSE(r.overall_pass());
  CHECK(r.a1a_verdict() == Verdict::Fail);
  CHECK(r.a1b.verdict == Verdict::Fail);
  CHECK_FALSE(r.a2a.has_value());
  std::string text = r.to_text(two.spec, two.initials.front());
  CHECK(text.find("A1a") != std::string::npos);
  CHECK(text.find("dalpha") != std::string::npos);
  GameDocument red = rgtest::load("reducednecessity");
  AuditReport rr = audit_all(red.spec, red.initials.front());
  CHECK(rr.a2b_verdict() == Verdict::Fail);
  CHECK_FALSE(rr.overall_pass());
}

TEST_CASE("audit verdicts are a function of the canonical spec") {
  GameDocument doc = rgtest::load("observed-actions");
  GameDocument back = parse_game_document(serialize_game(doc.spec, doc.initials));
  CHECK(audit_all(doc.spec, doc.initials.front()).to_text(doc.spec, doc.initials.front()) ==
        audit_all(back.spec, back.initials.front()).to_text(back.spec, back.initials.front()));
}

TEST_CASE("kernel images equal normalized columns at sampled beliefs") {
  for (const char* name : {"informed-controller", "observed-actions", "pomdp-small"}) {
    CAPTURE(name);
    GameSpec g = rgtest::load(name).spec;
    KernelResult r = derive_first_order_kernel(g);
    REQUIRE(r.verdict == Verdict::Pass);
    for (const BeliefPoint& x : audit_sample_points(g.num_states())) {
      for (int i = 0; i < g.num_actions1(); ++i) {
        for (int j = 0; j < g.num_actions2(); ++j) {
          for (int c = 0; c < g.num_signals1(); ++c) {
            for (int d = 0; d < g.num_signals2(); ++d) {
              std::vector<Rational> col(g.num_states(), Rational(0));
              for (int k = 0; k < g.num_states(); ++k) {
                for (const auto& a : g.transition(k, i, j)) {
                  if (a.c == c && a.d == d) col[a.next] += x.probs[k] * a.mass;
                }
              }
              if (!is_positive(sum(col))) continue;
              CHECK(normalized_point(col) == r.kernel.apply(x, i, c));
            }
          }
        }
      }
    }
  }
}
