#include "rg/audit.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "rg/belief.hpp"
#include "rg/errors.hpp"

namespace rg {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::HoldsOnSamples:
      return "holds-on-samples";
    case Verdict::Fail:
      return "fail";
  }
  return "?";
}

A1aResult check_a1a(const InitialLaw& pi) {
  std::size_t nc = pi.signals1.size(), nd = pi.signals2.size();
  std::map<int, int> states;
  for (const auto& a : pi.atoms) states.emplace(a.k, 0);
  std::vector<Rational> mc(nc, Rational(0));
  std::vector<std::vector<Rational>> mcd(nc, std::vector<Rational>(nd, Rational(0)));
  std::map<std::pair<int, int>, Rational> mkc;
  std::map<std::tuple<int, int, int>, Rational> mkcd;
  for (const auto& a : pi.atoms) {
    mc[a.c] += a.mass;
    mcd[a.c][a.d] += a.mass;
    mkc[{a.k, a.c}] += a.mass;
    mkcd[{a.k, a.c, a.d}] += a.mass;
  }
  A1aResult out;
  for (const auto& [k, unused] : states) {
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t d = 0; d < nd; ++d) {
        int ci = static_cast<int>(c), di = static_cast<int>(d);
        Rational lhs = mc[c] * mkcd[{k, ci, di}];
        Rational rhs = mkc[{k, ci}] * mcd[c][d];
        if (lhs != rhs) {
          out.pass = false;
          out.k = k;
          out.c = ci;
          out.d = di;
          return out;
        }
      }
    }
  }
  return out;
}

namespace {

std::vector<Rational> row_sums(const Matrix& m) {
  std::vector<Rational> r;
  for (const auto& row : m) r.push_back(sum(row));
  return r;
}

bool is_zero_matrix(const Matrix& m) {
  for (const auto& row : m) {
    for (const auto& v : row) {
      if (!is_zero(v)) return false;
    }
  }
  return true;
}

Rational mass_at(const Matrix& m, const BeliefPoint& x) {
  Rational s = 0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (is_zero(x.probs[a])) continue;
    for (const auto& v : m[a]) s += x.probs[a] * v;
  }
  return s;
}

BeliefPoint image_at(const Matrix& m, const BeliefPoint& x) {
  std::vector<Rational> u(m.size(), Rational(0));
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (is_zero(x.probs[a])) continue;
    for (std::size_t k = 0; k < m.size(); ++k) u[k] += x.probs[a] * m[a][k];
  }
  return normalized_point(u);
}

// (A^T x)[k] (1^T B^T x) == (B^T x)[k] (1^T A^T x) as quadratic forms in x; returns the first
// failing k or -1.
int cross_identity_failure(const Matrix& A, const Matrix& B) {
  std::size_t n = A.size();
  auto ra = row_sums(A), rb = row_sums(B);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        Rational lhs = A[a][k] * rb[b] + A[b][k] * rb[a];
        Rational rhs = B[a][k] * ra[b] + B[b][k] * ra[a];
        if (lhs != rhs) return static_cast<int>(k);
      }
    }
  }
  return -1;
}

Matrix signal_matrix(const GameSpec& spec, int i, int j, int c, int d) {
  int n = spec.num_states();
  Matrix m(n, std::vector<Rational>(n, Rational(0)));
  for (int k = 0; k < n; ++k) {
    for (const auto& atom : spec.transition(k, i, j)) {
      if (atom.c == c && atom.d == d) m[k][atom.next] += atom.mass;
    }
  }
  return m;
}

}  // namespace

BeliefPoint FirstOrderKernel::apply(const BeliefPoint& x, int i, int c) const {
  for (const auto& cand : at(i, c)) {
    if (is_positive(mass_at(cand.m, x))) return image_at(cand.m, x);
  }
  return BeliefPoint::uniform(num_states);
}

FirstOrderKernel build_first_order_kernel(const GameSpec& spec) {
  FirstOrderKernel f;
  f.num_states = spec.num_states();
  f.num_actions1 = spec.num_actions1();
  f.num_signals1 = spec.num_signals1();
  f.candidates.resize(static_cast<std::size_t>(f.num_actions1 * f.num_signals1));
  for (int i = 0; i < spec.num_actions1(); ++i) {
    for (int c = 0; c < spec.num_signals1(); ++c) {
      auto& list = f.candidates[static_cast<std::size_t>(i * f.num_signals1 + c)];
      for (int j = 0; j < spec.num_actions2(); ++j) {
        for (int d = 0; d < spec.num_signals2(); ++d) {
          Matrix m = signal_matrix(spec, i, j, c, d);
          if (!is_zero_matrix(m)) list.push_back(KernelCandidate{j, d, std::move(m)});
        }
      }
    }
  }
  return f;
}

std::vector<BeliefPoint> audit_sample_points(int n) {
  std::vector<BeliefPoint> pts;
  for (int k = 0; k < n; ++k) pts.push_back(BeliefPoint::dirac(n, k));
  pts.push_back(BeliefPoint::uniform(n));
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      BeliefPoint p{std::vector<Rational>(n, Rational(0))};
      p.probs[a] = Rational(1, 2);
      p.probs[b] = Rational(1, 2);
      pts.push_back(p);
    }
  }
  return pts;
}

KernelResult derive_first_order_kernel(const GameSpec& spec) {
  KernelResult out;
  out.kernel = build_first_order_kernel(spec);
  const auto samples = audit_sample_points(spec.num_states());
  bool global_ok = true;
  for (int i = 0; i < spec.num_actions1(); ++i) {
    for (int c = 0; c < spec.num_signals1(); ++c) {
      const auto& cands = out.kernel.at(i, c);
      for (std::size_t s = 0; s < cands.size(); ++s) {
        for (std::size_t t = s + 1; t < cands.size(); ++t) {
          int k = cross_identity_failure(cands[s].m, cands[t].m);
          if (k < 0) continue;
          if (global_ok) {
            out.witness = KernelWitness{i, c, k, cands[s].j, cands[s].d, cands[t].j, cands[t].d, {}};
          }
          global_ok = false;
          for (const auto& x : samples) {
            if (!is_positive(mass_at(cands[s].m, x)) || !is_positive(mass_at(cands[t].m, x))) {
              continue;
            }
            BeliefPoint u = image_at(cands[s].m, x), v = image_at(cands[t].m, x);
            if (u == v) continue;
            int kk = 0;
            while (u.probs[kk] == v.probs[kk]) ++kk;
            out.verdict = Verdict::Fail;
            out.witness = KernelWitness{i, c, kk, cands[s].j, cands[s].d, cands[t].j, cands[t].d, x};
            return out;
          }
        }
      }
    }
  }
  out.verdict = global_ok ? Verdict::Pass : Verdict::HoldsOnSamples;
  return out;
}

A2aResult check_a2a(const InitialLaw& pi, int num_states) {
  A1aResult a1a = check_a1a(pi);
  if (!a1a.pass) throw PreconditionError("check_a2a requires A1a, which fails");
  auto y1 = second_order_table(pi, num_states);
  A2aResult out;
  std::vector<std::optional<BeliefAtomLaw>> table(pi.signals1.size());
  for (const auto& a : pi.atoms) {
    auto& slot = table[a.c];
    if (!slot) {
      slot = y1[a.d];
    } else if (!(*slot == y1[a.d])) {
      out.pass = false;
      out.c = a.c;
      out.first = *slot;
      out.second = y1[a.d];
      return out;
    }
  }
  for (auto& slot : table) out.table.push_back(slot ? *slot : BeliefAtomLaw{});
  return out;
}

SignalInclusionResult check_signal_inclusion(const GameSpec& spec) {
  SignalInclusionResult out;
  out.h.assign(static_cast<std::size_t>(spec.num_signals1()), -1);
  for (const auto& row : spec.transitions) {
    for (const auto& atom : row) {
      int& slot = out.h[atom.c];
      if (slot < 0) {
        slot = atom.d;
      } else if (slot != atom.d) {
        out.pass = false;
        out.c = atom.c;
        out.d1 = std::min(slot, atom.d);
        out.d2 = std::max(slot, atom.d);
        return out;
      }
    }
  }
  for (auto& d : out.h) d = std::max(d, 0);
  return out;
}

namespace {

// Image class of (i, c) under a fixed i: the first c' whose image function agrees with c's.
std::vector<std::vector<int>> image_classes(const GameSpec& spec, const FirstOrderKernel& f) {
  std::vector<std::vector<int>> cls(spec.num_actions1(), std::vector<int>(spec.num_signals1(), -1));
  for (int i = 0; i < spec.num_actions1(); ++i) {
    for (int c = 0; c < spec.num_signals1(); ++c) {
      const auto& mine = f.at(i, c);
      if (mine.empty()) continue;
      for (int cp = 0; cp < c && cls[i][c] < 0; ++cp) {
        const auto& other = f.at(i, cp);
        if (!other.empty() && cross_identity_failure(mine.front().m, other.front().m) < 0) {
          cls[i][c] = cls[i][cp];
        }
      }
      if (cls[i][c] < 0) cls[i][c] = c;
    }
  }
  return cls;
}

template <class Profile>
bool multisets_equal(std::vector<Profile> a, std::vector<Profile> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

using SymbolicEntry = std::tuple<int, int, std::vector<Rational>>;  // (i, class, mass coefs)
using SampleEntry = std::tuple<int, int, std::vector<Rational>, Rational>;  // (x, i, image, mass)

bool vec_less(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct SymbolicLess {
  bool operator()(const SymbolicEntry& a, const SymbolicEntry& b) const {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return vec_less(std::get<2>(a), std::get<2>(b));
  }
};

}  // namespace

PushforwardResult check_pushforward_independence(const GameSpec& spec, const FirstOrderKernel& f) {
  int ni = spec.num_actions1(), nj = spec.num_actions2(), nc = spec.num_signals1(),
      nd = spec.num_signals2(), nk = spec.num_states();
  PushforwardResult out;
  if (nj == 1) return out;

  // Symbolic profiles: per (j, d), the merged (class, linear mass) entries over all i.
  auto cls = image_classes(spec, f);
  bool classes_exact = derive_first_order_kernel(spec).verdict == Verdict::Pass;
  std::vector<std::vector<std::vector<SymbolicEntry>>> sym(nj, std::vector<std::vector<SymbolicEntry>>(nd));
  for (int j = 0; j < nj; ++j) {
    for (int d = 0; d < nd; ++d) {
      for (int i = 0; i < ni; ++i) {
        std::map<int, std::vector<Rational>> merged;
        for (int c = 0; c < nc; ++c) {
          Matrix m = signal_matrix(spec, i, j, c, d);
          if (is_zero_matrix(m)) continue;
          auto& coef = merged.try_emplace(cls[i][c], std::vector<Rational>(nk, Rational(0))).first->second;
          auto r = row_sums(m);
          for (int a = 0; a < nk; ++a) coef[a] += r[a];
        }
        for (auto& [cl, coef] : merged) sym[j][d].emplace_back(i, cl, coef);
      }
      std::sort(sym[j][d].begin(), sym[j][d].end(), SymbolicLess{});
    }
  }
  auto profiles_sym = [&](int j) {
    std::vector<std::vector<SymbolicEntry>> ps;
    for (int d = 0; d < nd; ++d) {
      if (!sym[j][d].empty()) ps.push_back(sym[j][d]);
    }
    return ps;
  };
  bool symbolic_ok = classes_exact;
  for (int j = 1; j < nj && symbolic_ok; ++j) {
    auto a = profiles_sym(0), b = profiles_sym(j);
    auto cmp = [](const std::vector<SymbolicEntry>& x, const std::vector<SymbolicEntry>& y) {
      return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(), SymbolicLess{});
    };
    std::sort(a.begin(), a.end(), cmp);
    std::sort(b.begin(), b.end(), cmp);
    symbolic_ok = a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
  }
  if (symbolic_ok) return out;

  // Sampled profiles, with atoms of equal F-image merged at each point.
  const auto samples = audit_sample_points(nk);
  using Entry = std::pair<std::vector<Rational>, Rational>;
  // prof[j][d][x][i] = sorted merged (image, mass) list
  auto sampled = [&](int j, int d, std::size_t xs, int i) {
    const BeliefPoint& x = samples[xs];
    std::map<BeliefPoint, Rational> merged;
    for (int c = 0; c < nc; ++c) {
      Matrix m = signal_matrix(spec, i, j, c, d);
      Rational s = mass_at(m, x);
      if (!is_positive(s)) continue;
      merged[f.apply(x, i, c)] += s;
    }
    std::vector<Entry> list;
    for (auto& [p, w] : merged) list.emplace_back(p.probs, w);
    return list;
  };
  using Full = std::vector<std::vector<Entry>>;  // indexed by (x, i)
  auto full_profiles = [&](int j) {
    std::vector<Full> ps;
    for (int d = 0; d < nd; ++d) {
      Full f_d;
      bool nonzero = false;
      for (std::size_t xs = 0; xs < samples.size(); ++xs) {
        for (int i = 0; i < ni; ++i) {
          f_d.push_back(sampled(j, d, xs, i));
          nonzero = nonzero || !f_d.back().empty();
        }
      }
      if (nonzero) ps.push_back(std::move(f_d));
    }
    return ps;
  };
  auto base = full_profiles(0);
  for (int j = 1; j < nj; ++j) {
    auto other = full_profiles(j);
    if (multisets_equal(base, other)) continue;
    out.verdict = Verdict::Fail;
    out.j = 0;
    out.jp = j;
    // Locate the first (x, i) whose per-point multiset already differs.
    for (std::size_t xs = 0; xs < samples.size() && !out.x; ++xs) {
      for (int i = 0; i < ni && !out.x; ++i) {
        std::vector<std::vector<Entry>> ma, mb;
        for (int d = 0; d < nd; ++d) {
          auto ea = sampled(0, d, xs, i), eb = sampled(j, d, xs, i);
          if (!ea.empty()) ma.push_back(ea);
          if (!eb.empty()) mb.push_back(eb);
        }
        if (!multisets_equal(ma, mb)) {
          out.i = i;
          out.x = samples[xs];
        }
      }
    }
    if (!out.x) {
      out.i = 0;
      out.x = samples.front();
    }
    return out;
  }
  out.verdict = Verdict::HoldsOnSamples;
  return out;
}

bool AuditReport::overall_pass() const {
  return a1a.pass && a1b.verdict == Verdict::Pass && a2a && a2a->pass && a2b.pass &&
         a3.verdict == Verdict::Pass;
}

bool AuditReport::usable() const {
  return a1a.pass && a1b.verdict != Verdict::Fail && a2a && a2a->pass && a2b.pass &&
         a3.verdict != Verdict::Fail;
}

AuditReport audit_all(const GameSpec& spec, const InitialLaw& pi) {
  AuditReport r;
  r.a1a = check_a1a(pi);
  r.a1b = derive_first_order_kernel(spec);
  if (r.a1a.pass) r.a2a = check_a2a(pi, spec.num_states());
  r.a2b = check_signal_inclusion(spec);
  r.a3 = check_pushforward_independence(spec, r.a1b.kernel);
  return r;
}

std::string AuditReport::to_text(const GameSpec& spec, const InitialLaw& pi) const {
  std::ostringstream out;
  out << "[A1a] " << to_string(a1a_verdict()) << "\n";
  if (!a1a.pass) {
    out << "  witness: k=" << spec.states[a1a.k] << " c'=" << pi.signals1[a1a.c]
        << " d'=" << pi.signals2[a1a.d] << "\n";
  }
  out << "[A1b] " << to_string(a1b.verdict) << "\n";
  if (a1b.verdict != Verdict::Pass) {
    const auto& w = a1b.witness;
    out << "  witness: i=" << spec.actions1[w.i] << " c=" << spec.signals1[w.c]
        << " k=" << spec.states[w.k] << " (j,d)=(" << spec.actions2[w.j1] << ","
        << spec.signals2[w.d1] << ") (j',d')=(" << spec.actions2[w.j2] << ","
        << spec.signals2[w.d2] << ")";
    if (w.p) out << " p=" << rg::to_string(*w.p);
    out << "\n";
  } else {
    out << "  kernel: " << a1b.kernel.candidates.size() << " (i,c) entries\n";
  }
  out << "[A2a] " << to_string(a2a_verdict()) << "\n";
  if (!a2a) {
    out << "  not run: requires A1a\n";
  } else if (a2a->pass) {
    for (std::size_t c = 0; c < a2a->table.size(); ++c) {
      out << "  f1(" << pi.signals1[c] << ") = " << rg::to_string(a2a->table[c]) << "\n";
    }
  } else {
    out << "  witness: c'=" << pi.signals1[a2a->c] << " y1=" << rg::to_string(a2a->first)
        << " vs " << rg::to_string(a2a->second) << "\n";
  }
  out << "[A'2b] " << to_string(a2b_verdict()) << "\n";
  if (a2b.pass) {
    for (std::size_t c = 0; c < a2b.h.size(); ++c) {
      out << "  h(" << spec.signals1[c] << ") = " << spec.signals2[a2b.h[c]] << "\n";
    }
  } else {
    out << "  witness: c=" << spec.signals1[a2b.c] << " occurs with d=" << spec.signals2[a2b.d1]
        << " and d=" << spec.signals2[a2b.d2] << "\n";
  }
  out << "[A'3] " << to_string(a3.verdict) << "\n";
  if (a3.verdict == Verdict::Fail) {
    out << "  witness: i=" << spec.actions1[a3.i] << " j=" << spec.actions2[a3.j]
        << " j'=" << spec.actions2[a3.jp] << " x=" << rg::to_string(*a3.x) << "\n";
  }
  out << "overall: " << (overall_pass() ? "pass" : "fail") << "\n";
  out << "note: A2b and A3 are checked through the sufficient conditions A'2b and A'3\n";
  return out.str();
}

}  // namespace rg
