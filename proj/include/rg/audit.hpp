#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rg/game.hpp"
#include "rg/optimization.hpp"

namespace rg {

enum class Verdict { Pass, HoldsOnSamples, Fail };

std::string to_string(Verdict v);

struct A1aResult {
  bool pass = true;
  // First violating (k, c', d') when failing.
  int k = -1, c = -1, d = -1;
};

A1aResult check_a1a(const InitialLaw& pi);

struct KernelCandidate {
  int j = 0;
  int d = 0;
  Matrix m;  // m[k][k'] = q(k, i, j)[k', c, d]
};

// Candidate matrices per (i, c) in (j, d) scan order.
struct FirstOrderKernel {
  int num_states = 0;
  int num_actions1 = 0;
  int num_signals1 = 0;
  std::vector<std::vector<KernelCandidate>> candidates;

  const std::vector<KernelCandidate>& at(int i, int c) const {
    return candidates[static_cast<std::size_t>(i * num_signals1 + c)];
  }
  // normalize(M^T x) with the first candidate of positive mass at x, else uniform.
  BeliefPoint apply(const BeliefPoint& x, int i, int c) const;
};

// Builds the candidate lists without checking consistency.
FirstOrderKernel build_first_order_kernel(const GameSpec& spec);

struct KernelWitness {
  int i = -1, c = -1, k = -1;
  int j1 = -1, d1 = -1, j2 = -1, d2 = -1;
  std::optional<BeliefPoint> p;
};

struct KernelResult {
  Verdict verdict = Verdict::Pass;
  FirstOrderKernel kernel;
  KernelWitness witness;
};

KernelResult derive_first_order_kernel(const GameSpec& spec);

// Vertices of the simplex, its barycenter and the midpoints of all vertex pairs.
std::vector<BeliefPoint> audit_sample_points(int num_states);

struct A2aResult {
  bool pass = true;
  std::vector<BeliefAtomLaw> table;  // c' -> y1 when passing
  int c = -1;
  BeliefAtomLaw first, second;  // two distinct y1 values seen with c'
};

// Requires A1a; throws PreconditionError otherwise.
A2aResult check_a2a(const InitialLaw& pi, int num_states);

struct SignalInclusionResult {
  bool pass = true;
  std::vector<int> h;  // c -> d
  int c = -1, d1 = -1, d2 = -1;
};

SignalInclusionResult check_signal_inclusion(const GameSpec& spec);

struct PushforwardResult {
  Verdict verdict = Verdict::Pass;
  int i = -1, j = -1, jp = -1;
  std::optional<BeliefPoint> x;
};

// Player 2 knows his own action, so the two pushforwards are compared up to one relabeling
// of D that does not depend on (x, i).
PushforwardResult check_pushforward_independence(const GameSpec& spec, const FirstOrderKernel& f);

struct AuditReport {
  A1aResult a1a;
  KernelResult a1b;
  std::optional<A2aResult> a2a;  // empty when A1a fails
  SignalInclusionResult a2b;
  PushforwardResult a3;

  Verdict a1a_verdict() const { return a1a.pass ? Verdict::Pass : Verdict::Fail; }
  Verdict a2a_verdict() const { return a2a && a2a->pass ? Verdict::Pass : Verdict::Fail; }
  Verdict a2b_verdict() const { return a2b.pass ? Verdict::Pass : Verdict::Fail; }
  bool overall_pass() const;
  // No assumption failed outright; sampled-only verdicts allowed.
  bool usable() const;
  std::string to_text(const GameSpec& spec, const InitialLaw& pi) const;
};

AuditReport audit_all(const GameSpec& spec, const InitialLaw& pi);

}  // namespace rg
