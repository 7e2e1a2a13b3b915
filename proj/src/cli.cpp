#include "rg/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "rg/audit.hpp"
#include "rg/aux_solver.hpp"
#include "rg/belief.hpp"
#include "rg/cache.hpp"
#include "rg/errors.hpp"
#include "rg/optimization.hpp"
#include "rg/oracle.hpp"
#include "rg/strategy.hpp"

namespace rg {

namespace fs = std::filesystem;

std::string resolve_cache_dir(const std::string& flag_value) {
  if (const char* env = std::getenv("RG_CACHE_DIR"); env && *env) return env;
  if (!flag_value.empty()) return flag_value;
  if (const char* home = std::getenv("HOME"); home && *home) {
    return (fs::path(home) / ".cache" / "rgtool").string();
  }
  return ".rgtool-cache";
}

Rational parse_exact_number(const std::string& text) {
  if (text.find_first_of(".eE") == std::string::npos) return parse_rational(text);
  std::string s = text;
  long exponent = 0;
  auto e = s.find_first_of("eE");
  if (e != std::string::npos) {
    try {
      std::size_t used = 0;
      exponent = std::stol(s.substr(e + 1), &used);
      if (used != s.size() - e - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed number '" + text + "'");
    }
    s = s.substr(0, e);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    exponent -= static_cast<long>(s.size() - dot - 1);
    s.erase(dot, 1);
  }
  if (s.empty() || s == "-" || s == "+") throw std::invalid_argument("malformed number '" + text + "'");
  Rational value = parse_rational(s);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent < 0) {
    value /= Rational(scale);
  } else {
    value *= Rational(scale);
  }
  return value;
}

namespace {

struct Loaded {
  GameDocument doc;
  std::vector<const InitialLaw*> laws;
};

Loaded load(const std::string& path, const std::string& initial) {
  Loaded l;
  l.doc = load_game_document(path);
  if (initial.empty()) {
    for (const auto& pi : l.doc.initials) l.laws.push_back(&pi);
  } else {
    l.laws.push_back(&l.doc.initial(initial));
  }
  return l;
}

// One line per law, prefixed by its name when the file carries several.
std::string per_law(const Loaded& l, const std::function<std::string(const InitialLaw&)>& fn) {
  std::string out;
  for (const InitialLaw* pi : l.laws) {
    std::string v = fn(*pi);
    out += l.laws.size() > 1 ? pi->name + ": " + v + "\n" : v + "\n";
  }
  return out;
}

struct CacheContext {
  bool enabled = true;
  std::string dir;
  std::ostream* err = nullptr;
};

std::string cached(CacheContext& ctx, const std::string& digest, const std::string& op,
                   const std::string& params, const std::function<std::string()>& compute) {
  if (!ctx.enabled) return compute();
  ResultCache cache(ctx.dir);
  std::string key = ResultCache::key(digest, op, params);
  auto hit = cache.lookup(key);
  for (const auto& w : cache.warnings()) *ctx.err << "warning: " << w << "\n";
  if (hit) return *hit;
  std::string value = compute();
  try {
    cache.store(key, value);
  } catch (const fs::filesystem_error& e) {
    *ctx.err << "warning: cache write failed: " << e.what() << "\n";
  }
  for (const auto& w : cache.warnings()) *ctx.err << "warning: " << w << "\n";
  return value;
}

std::string hierarchy_text(const GameSpec& spec, const InitialLaw& pi) {
  std::ostringstream out;
  HierarchyTriple t = initial_hierarchy(pi, spec.num_states());
  out << "initial law " << pi.name << "\n";
  for (std::size_t c = 0; c < t.x1.size(); ++c) {
    if (!is_positive(pi.mass_c(static_cast<int>(c)))) continue;
    out << "x1(" << pi.signals1[c] << ") = " << to_string(t.x1[c]) << "\n";
  }
  for (std::size_t d = 0; d < t.y1.size(); ++d) {
    if (!is_positive(t.d_mass[d])) continue;
    out << "y1(" << pi.signals2[d] << ") = " << to_string(t.y1[d]) << "\n";
    if (t.d_mass[d] != 1) {
      out << "  note: normalized; the unnormalized law L(x1, d'=" << pi.signals2[d]
          << ") has total mass " << to_string(t.d_mass[d]) << "\n";
    }
  }
  out << "eta1 = " << to_string(t.eta) << "\n";
  return out.str();
}

std::vector<BeliefAtomLaw> probe_laws(const GameSpec& spec, const InitialLaw& pi) {
  std::vector<BeliefAtomLaw> zs;
  for (const auto& [z, m] : phi(pi, spec.num_states()).atoms) zs.push_back(z);
  return zs;
}

}  // namespace

SuiteResult verify_suite(const GameSpec& spec, const InitialLaw& pi) {
  SuiteResult r;
  std::ostringstream o;
  auto line = [&](const std::string& name, bool pass, const std::string& detail) {
    o << (pass ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : ": " + detail) << "\n";
    r.pass = r.pass && pass;
  };
  AuditReport audit = audit_all(spec, pi);
  line("audit", audit.overall_pass(), audit.usable() ? "usable" : "not usable");
  if (!audit.usable()) {
    o << "SKIP remaining properties: the audit failed\n";
    r.text = o.str();
    return r;
  }
  AuxSolver solver(spec, audit.a1b.kernel);
  HierarchyLaw eta = phi(pi, spec.num_states());
  for (const char* text : {"1", "1/2,1/2", "1/3,1/3,1/3"}) {
    Evaluation theta = Evaluation::parse(text);
    try {
      Rational truth = oracle_value(spec, pi, theta).value;
      AuxValueResult a = aux_value(solver, eta, theta);
      line("recursion equals oracle at theta=" + to_string(theta),
           a.lower <= truth && truth <= a.upper,
           "oracle " + to_string(truth) + ", recursion [" + to_string(a.lower) + ", " +
               to_string(a.upper) + "]");
    } catch (const BudgetError& e) {
      o << "SKIP recursion at theta=" << to_string(theta) << ": " << e.what() << "\n";
    }
  }

  Evaluation one = Evaluation::parse("1");
  std::vector<BeliefAtomLaw> zs = probe_laws(spec, pi);
  std::vector<std::pair<BeliefAtomLaw, BeliefAtomLaw>> pairs;
  std::vector<ConcavityTriple> triples;
  std::vector<Split> splits;
  for (std::size_t s = 0; s < zs.size(); ++s) {
    for (std::size_t t = 0; t < zs.size(); ++t) {
      pairs.emplace_back(zs[s], zs[t]);
      triples.push_back(ConcavityTriple{zs[s], zs[t], Rational(1, 3)});
      Split split;
      split.lambda = {Rational(1, 2), Rational(1, 2)};
      split.z = {zs[s], zs[t]};
      split.a = {AuxAction::uniform(zs[s], spec.num_actions1()),
                 AuxAction::pure(zs[t], spec.num_actions1(), 0)};
      splits.push_back(std::move(split));
    }
  }
  ProbeReport lip = lipschitz_probe(solver, one, pairs);
  line("lipschitz", lip.all_hold(), std::to_string(lip.entries.size()) + " pairs");
  ProbeReport conc = concavity_probe(solver, one, triples);
  line("concavity", conc.all_hold(), std::to_string(conc.entries.size()) + " triples");
  ProbeReport split = splitting_probe(spec, audit.a1b.kernel, splits);
  line("splitting", split.all_hold(), std::to_string(split.entries.size()) + " splits");

  Evaluation two = Evaluation::uniform(2);
  try {
    AuxValueResult a2 = aux_value(solver, eta, two);
    ReplayCheck replay = replay_second_order(spec, audit.a1b.kernel, pi, a2.rules);
    line("second-order replay", replay.pass,
         replay.pass ? std::to_string(replay.histories) + " histories" : replay.witness);
    BehaviorStrategy sigma = lift_markov_strategy(spec, audit.a1b.kernel, pi, a2.rules);
    Rational guaranteed = best_reply_value(spec, pi, sigma, two).value;
    line("lifted strategy guarantee", guaranteed >= a2.lower,
         "best reply " + to_string(guaranteed) + ", recursion " + to_string(a2.lower));
    BehaviorStrategy tau = block_strategy(spec, pi, 1, 2);
    Rational against = best_reply_value(spec, pi, tau, two).value;
    Rational bound = std::max(shifted_window_value(spec, pi, 0, 1), shifted_window_value(spec, pi, 1, 1));
    line("block strategy guarantee", against <= bound,
         "best reply " + to_string(against) + ", bound " + to_string(bound));
  } catch (const BudgetError& e) {
    o << "SKIP guarantee checks: " << e.what() << "\n";
  }
  r.text = o.str();
  return r;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact solver and verifier for repeated games with a more informed controller"};
  app.require_subcommand(1);
  std::string cache_flag;
  bool no_cache = false;
  std::size_t budget = OracleOptions{}.node_budget;
  app.add_option("--cache-dir", cache_flag, "Cache root (RG_CACHE_DIR overrides)");
  app.add_flag("--no-cache", no_cache, "Disable the result cache");
  app.add_option("--budget", budget, "Oracle node budget")->check(CLI::PositiveNumber);

  std::string spec_path, initial, theta_text, tol_text = "1e-3", rules_path;
  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("spec", spec_path, "Game file")->required()->check(CLI::ExistingFile);
    sub->add_option("--initial", initial, "Initial law name (default: all)");
  };

  auto* audit_cmd = app.add_subcommand("audit", "Check the informational assumptions");
  add_spec(audit_cmd);

  auto* value_cmd = app.add_subcommand("value", "Exact value by the sequence-form oracle");
  add_spec(value_cmd);
  value_cmd->add_option("--theta", theta_text, "Weights w1,w2,...")->required();

  auto* aux_cmd = app.add_subcommand("aux-value", "Value by the second-order-belief recursion");
  add_spec(aux_cmd);
  aux_cmd->add_option("--theta", theta_text, "Weights w1,w2,...")->required();
  aux_cmd->add_option("--tol", tol_text, "Interval width target (> 0)");
  aux_cmd->add_option("--rules", rules_path, "Write the rule tree to this file");

  int n_max = 2, m_max = 2;
  auto* vstar_cmd = app.add_subcommand("vstar", "Windowed values v_{m,n} and truncated v* bounds");
  add_spec(vstar_cmd);
  vstar_cmd->add_option("--nmax", n_max)->check(CLI::PositiveNumber);
  vstar_cmd->add_option("--mmax", m_max)->check(CLI::NonNegativeNumber);

  std::string z1_path, z2_path;
  auto* w_cmd = app.add_subcommand("wasserstein", "Distance between two belief-atom laws");
  w_cmd->add_option("z1", z1_path)->required()->check(CLI::ExistingFile);
  w_cmd->add_option("z2", z2_path)->required()->check(CLI::ExistingFile);

  std::string sigma_path, tau_path;
  std::uint64_t seed = 1;
  int samples = 10000, horizon = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo play of two behavior strategies");
  add_spec(sim_cmd);
  sim_cmd->add_option("--sigma", sigma_path)->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--tau", tau_path)->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--samples", samples)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--horizon", horizon)->check(CLI::PositiveNumber);

  auto* verify_cmd = app.add_subcommand("verify", "Run the property suite");
  add_spec(verify_cmd);

  std::string out_dir = "report";
  auto* report_cmd = app.add_subcommand("report", "Write every result to a directory");
  add_spec(report_cmd);
  report_cmd->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  CacheContext ctx;
  ctx.enabled = !no_cache;
  ctx.dir = resolve_cache_dir(cache_flag);
  ctx.err = &err;
  OracleOptions options;
  options.node_budget = budget;
  const std::string budget_key = "budget=" + std::to_string(budget);

  try {
    if (*w_cmd) {
      auto read = [](const std::string& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_belief_atom_law(ss.str());
      };
      out << to_string(wasserstein_distance(read(z1_path), read(z2_path)).distance) << "\n";
      return kExitOk;
    }
    Loaded l = load(spec_path, initial);
    const GameSpec& spec = l.doc.spec;

    if (*audit_cmd) {
      bool all = true;
      for (const InitialLaw* pi : l.laws) {
        AuditReport rep = audit_all(spec, *pi);
        out << rep.to_text(spec, *pi);
        all = all && rep.overall_pass();
      }
      return all ? kExitOk : kExitAuditFail;
    }

    if (*value_cmd) {
      Evaluation theta = Evaluation::parse(theta_text);
      out << per_law(l, [&](const InitialLaw& pi) {
        return cached(ctx, spec_digest(spec, pi), "value", to_string(theta) + ";" + budget_key,
                      [&] { return to_string(oracle_value(spec, pi, theta, options).value); });
      });
      return kExitOk;
    }

    if (*aux_cmd) {
      Evaluation theta = Evaluation::parse(theta_text);
      AuxOptions aux_options;
      aux_options.tol = parse_exact_number(tol_text);
      if (sgn(aux_options.tol) <= 0) throw ValidationError("--tol must be positive");
      std::string tree;
      for (const InitialLaw* pi : l.laws) {
        AuditReport rep = audit_all(spec, *pi);
        if (!rep.usable()) {
          err << "audit failed for initial law " << pi->name << "; run `audit` for the witness\n";
          return kExitAuditFail;
        }
      }
      out << per_law(l, [&](const InitialLaw& pi) {
        std::string params = to_string(theta) + ";tol=" + to_string(aux_options.tol);
        return cached(ctx, spec_digest(spec, pi), "aux-value", params, [&] {
          AuxSolver solver(spec);
          AuxValueResult a = aux_value(solver, phi(pi, spec.num_states()), theta, aux_options);
          tree += "# initial law " + pi.name + "\n" + a.rule_tree();
          return to_string(*a.exact) + " [" + to_string(a.lower) + ", " + to_string(a.upper) + "]";
        });
      });
      if (!rules_path.empty()) {
        if (tree.empty()) {
          for (const InitialLaw* pi : l.laws) {
            AuxSolver solver(spec);
            tree += "# initial law " + pi->name + "\n" +
                    aux_value(solver, phi(*pi, spec.num_states()), theta, aux_options).rule_tree();
          }
        }
        std::ofstream(rules_path) << tree;
      }
      return kExitOk;
    }

    if (*vstar_cmd) {
      for (const InitialLaw* pi : l.laws) {
        std::string params = "n=" + std::to_string(n_max) + ";m=" + std::to_string(m_max) + ";" + budget_key;
        out << cached(ctx, spec_digest(spec, *pi), "vstar", params, [&] {
          VStarBounds b = vstar_bounds(spec, *pi, n_max, m_max, options);
          std::string text = b.to_csv();
          text += "# initial law " + pi->name + "\n";
          text += "# lower " + to_string(b.lower) + " (" + b.lower_source + ")\n";
          text += "# upper " + to_string(b.upper) + " (sup over m truncated at m <= " +
                  std::to_string(m_max) + ")\n";
          return text;
        });
      }
      return kExitOk;
    }

    if (*sim_cmd) {
      if (l.laws.size() != 1) throw ValidationError("simulate needs --initial when the file has several laws");
      const InitialLaw& pi = *l.laws.front();
      auto read = [](const std::string& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
      };
      BehaviorStrategy sigma = BehaviorStrategy::parse(read(sigma_path), spec, pi);
      BehaviorStrategy tau = BehaviorStrategy::parse(read(tau_path), spec, pi);
      SimulationResult s = simulate_play(spec, pi, sigma, tau, horizon, samples, seed);
      std::ostringstream line;
      line.precision(6);
      line << std::fixed << "mean " << to_string(s.mean) << " ~ " << to_double(s.mean) << " radius "
           << s.radius << " samples " << s.samples << " horizon " << s.horizon;
      out << line.str() << "\n";
      return kExitOk;
    }

    if (*verify_cmd) {
      bool all = true;
      for (const InitialLaw* pi : l.laws) {
        SuiteResult r = verify_suite(spec, *pi);
        out << "# initial law " << pi->name << "\n" << r.text;
        all = all && r.pass;
      }
      return all ? kExitOk : kExitAuditFail;
    }

    if (*report_cmd) {
      fs::create_directories(out_dir);
      auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream(fs::path(out_dir) / name) << text;
      };
      bool all = true;
      std::string audit_text, belief_text, value_text, aux_text, vstar_text, verify_text;
      for (const InitialLaw* pi : l.laws) {
        AuditReport rep = audit_all(spec, *pi);
        audit_text += rep.to_text(spec, *pi);
        all = all && rep.overall_pass();
        if (rep.a1a.pass) belief_text += hierarchy_text(spec, *pi);
        for (const char* t : {"1", "1/2,1/2", "1/3,1/3,1/3"}) {
          Evaluation theta = Evaluation::parse(t);
          try {
            value_text += pi->name + " theta=" + to_string(theta) + " " +
                          to_string(oracle_value(spec, *pi, theta, options).value) + "\n";
          } catch (const BudgetError& e) {
            value_text += pi->name + " theta=" + to_string(theta) + " skipped: " + e.what() + "\n";
          }
          if (rep.usable()) {
            AuxSolver solver(spec, rep.a1b.kernel);
            AuxValueResult a = aux_value(solver, phi(*pi, spec.num_states()), theta);
            aux_text += "# " + pi->name + " theta=" + to_string(theta) + " [" + to_string(a.lower) +
                        ", " + to_string(a.upper) + "]\n" + a.rule_tree();
          }
        }
        try {
          VStarBounds b = vstar_bounds(spec, *pi, 2, 2, options);
          vstar_text += "# initial law " + pi->name + "\n" + b.to_csv() + "# lower " +
                        to_string(b.lower) + " (" + b.lower_source + ")\n# upper " +
                        to_string(b.upper) + " (sup over m truncated at m <= 2)\n";
        } catch (const BudgetError& e) {
          vstar_text += "# initial law " + pi->name + " skipped: " + e.what() + "\n";
        }
        SuiteResult r = verify_suite(spec, *pi);
        verify_text += "# initial law " + pi->name + "\n" + r.text;
        all = all && r.pass;
      }
      write("audit.txt", audit_text);
      write("beliefs.txt", belief_text);
      write("values.txt", value_text);
      write("aux.txt", aux_text);
      write("vstar.csv", vstar_text);
      write("verify.txt", verify_text);
      out << "wrote " << out_dir << "\n";
      return all ? kExitOk : kExitAuditFail;
    }
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitAuditFail;
  } catch (const BDependenceError& e) {
    err << "error: " << e.what() << "\n  first:  " << e.first() << "\n  second: " << e.second() << "\n";
    return kExitAuditFail;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace rg
