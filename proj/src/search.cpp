#include "hoterm/search.hpp"

#include <algorithm>
#include <fstream>

#include "hoterm/type_order.hpp"

namespace hoterm {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Proved:
      return "proved";
    case Verdict::NotProvable:
      return "not_provable";
    case Verdict::Unknown:
      return "unknown";
  }
  return "unknown";
}

std::vector<std::vector<int>> ordered_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> r(static_cast<std::size_t>(n), 0);
  // odometer over {0..n-1}^n, keeping vectors whose ranks form a prefix 0..k-1
  for (;;) {
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    int top = -1;
    for (int v : r) {
      used[static_cast<std::size_t>(v)] = true;
      top = std::max(top, v);
    }
    if (std::all_of(used.begin(), used.begin() + (top + 1), [](bool b) { return b; })) out.push_back(r);
    int i = n - 1;
    while (i >= 0 && r[static_cast<std::size_t>(i)] == n - 1) r[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
    ++r[static_cast<std::size_t>(i)];
  }
  return out;
}

namespace {

SearchResult orient_all(const Problem& p, const OrderParams& params, EngineOptions engine) {
  SearchResult r;
  auto issues = validate_params(p, params);
  if (!issues.empty()) {
    r.verdict = Verdict::NotProvable;
    for (auto& s : issues) r.diagnostics.push_back("invalid parameters: " + s);
    return r;
  }
  OrderEngine eng(params, engine);
  bool all = true;
  for (const auto& rule : p.rules) {
    Proof pr = eng.orient(rule);
    if (!pr) {
      all = false;
      r.diagnostics.push_back("rule " + rule.name + " is not oriented");
    }
    r.traces.push_back(pr);
  }
  r.stats.judgments = eng.stats().judgments;
  r.stats.memo_hits = eng.stats().memo_hits;
  if (all) {
    r.verdict = Verdict::Proved;
    r.params = params;
  } else {
    r.verdict = Verdict::NotProvable;
    r.traces.clear();
  }
  return r;
}

// Parameters found by a backend must survive the engine and the trace checker on their own.
void recheck(const Problem& p, SearchResult& r, EngineOptions engine) {
  SearchResult c = orient_all(p, *r.params, engine);
  if (c.verdict != Verdict::Proved) {
    std::string why;
    for (const auto& d : c.diagnostics) why += "; " + d;
    throw SoundnessError("search returned parameters that do not orient the problem" + why);
  }
  for (const auto& t : c.traces) {
    try {
      check_trace(t, *r.params, engine);
    } catch (const TraceError& e) {
      throw SoundnessError(std::string("proof trace does not replay: ") + e.what());
    }
  }
  r.traces = std::move(c.traces);
  r.stats.judgments = c.stats.judgments;
  r.stats.memo_hits = c.stats.memo_hits;
}

bool has_args(const Symbol& f) { return f->arity > 0; }

}  // namespace

SearchResult check_params(const Problem& p, const OrderParams& params, EngineOptions engine) {
  return orient_all(p, params, engine);
}

SearchResult enumerate_search(const Problem& p, const EnumBounds& bounds, EngineOptions engine) {
  int ns = static_cast<int>(p.symbols.size()), nb = static_cast<int>(p.base_types.size());
  if (ns > bounds.max_symbols)
    throw BoundsExceeded(std::to_string(ns) + " symbols exceed the enumeration bound of " +
                         std::to_string(bounds.max_symbols));
  if (nb > bounds.max_bases)
    throw BoundsExceeded(std::to_string(nb) + " base types exceed the enumeration bound of " +
                         std::to_string(bounds.max_bases));

  SearchResult result;
  result.verdict = Verdict::NotProvable;
  std::vector<std::size_t> order(p.rules.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  // per symbol and argument position: the parts of acc validity that depend only on the types
  struct AccPos {
    std::string f;
    int index;
    std::string result, arg_base;  // arg_base empty unless the argument type is a base
    Type arg;
    bool full_arity, pos_ok;
  };
  std::vector<AccPos> acc_positions;
  for (const auto& f : p.symbols) {
    auto args = f->type.arg_types();
    for (int i = 1; i <= static_cast<int>(args.size()); ++i) {
      const Type& Ti = args[static_cast<std::size_t>(i - 1)];
      const std::string& a = f->type.result_base().name();
      auto of = pos_of(a, Ti);
      auto plus = pos_plus(Ti);
      acc_positions.push_back({f->name, i, a, Ti.is_base() ? Ti.name() : "", Ti,
                               f->arity == static_cast<int>(args.size()),
                               std::includes(plus.begin(), plus.end(), of.begin(), of.end())});
    }
  }

  auto level_orders = ordered_partitions(nb);
  auto prec_orders = ordered_partitions(ns);
  for (const auto& lv : level_orders) {
    OrderParams base = OrderParams::defaults(p);
    for (int i = 0; i < nb; ++i) base.levels.set(p.base_types[static_cast<std::size_t>(i)], lv[static_cast<std::size_t>(i)]);
    for (const auto& pr : prec_orders) {
      int classes = ns ? *std::max_element(pr.begin(), pr.end()) + 1 : 0;
      std::vector<bool> status_free(static_cast<std::size_t>(classes), !bounds.skip_constant_status);
      for (int i = 0; i < ns; ++i)
        if (has_args(p.symbols[static_cast<std::size_t>(i)])) status_free[static_cast<std::size_t>(pr[static_cast<std::size_t>(i)])] = true;
      std::vector<int> free_classes;
      for (int c = 0; c < classes; ++c)
        if (status_free[static_cast<std::size_t>(c)]) free_classes.push_back(c);
      for (unsigned long smask = 0; smask < (1ul << free_classes.size()); ++smask) {
        std::vector<Status> cls(static_cast<std::size_t>(classes), Status::Mul);
        for (std::size_t k = 0; k < free_classes.size(); ++k)
          if (smask >> k & 1) cls[static_cast<std::size_t>(free_classes[k])] = Status::Lex;
        for (int theta = 0; theta <= classes; ++theta) {
          OrderParams o = base;
          for (int i = 0; i < ns; ++i) {
            const auto& f = p.symbols[static_cast<std::size_t>(i)]->name;
            int c = pr[static_cast<std::size_t>(i)];
            o.prec[f] = c;
            o.status[f] = cls[static_cast<std::size_t>(c)];
            o.big[f] = c >= theta;
          }
          for (unsigned long bmask = 0; bmask < (1ul << nb); ++bmask) {
            for (int i = 0; i < nb; ++i) o.basic[p.base_types[static_cast<std::size_t>(i)]] = (bmask >> i & 1) != 0;
            std::vector<const AccPos*> valid;
            for (const auto& ap : acc_positions) {
              if (!ap.pos_ok || !base_dominates(o.levels, ap.result, ap.arg, false)) continue;
              if (o.is_basic(ap.result) && !(ap.arg == Type::base(ap.result) || (!ap.arg_base.empty() && o.is_basic(ap.arg_base))))
                continue;
              if (!o.is_big(ap.f) && !ap.full_arity) continue;
              valid.push_back(&ap);
            }
            unsigned long first = bounds.maximal_acc ? (1ul << valid.size()) - 1 : 0;
            for (unsigned long amask = first; amask < (1ul << valid.size()); ++amask) {
              o.acc.clear();
              for (std::size_t k = 0; k < valid.size(); ++k)
                if (amask >> k & 1) o.acc[valid[k]->f].insert(valid[k]->index);
              ++result.stats.candidates;
              if (bounds.max_candidates && result.stats.candidates > bounds.max_candidates)
                throw BoundsExceeded("more than " + std::to_string(bounds.max_candidates) + " parameter candidates");
              if (!validate_params(p, o).empty()) continue;
              OrderEngine eng(o, engine);
              bool ok = true;
              for (std::size_t k = 0; k < order.size() && ok; ++k) {
                if (!eng.orient(p.rules[order[k]])) {
                  ok = false;
                  std::rotate(order.begin(), order.begin() + static_cast<long>(k), order.begin() + static_cast<long>(k) + 1);
                }
              }
              if (ok) {
                result.verdict = Verdict::Proved;
                result.params = o;
                result.diagnostics.push_back("enumeration: found after " + std::to_string(result.stats.candidates) +
                                             " candidates");
                return result;
              }
            }
          }
        }
      }
    }
  }
  result.diagnostics.push_back("enumeration: exhausted " + std::to_string(result.stats.candidates) + " candidates");
  return result;
}

SearchResult prove(const Problem& p, const SearchConfig& config) {
  SearchResult r;
  if (config.backend == Backend::Enum) {
    r = enumerate_search(p, config.bounds, config.engine);
  } else {
    EncodeOptions eo = config.encode;
    eo.optimized_feq = config.engine.optimized_feq;
    Encoding enc = encode_problem(p, eo);
    std::string script = smt_script(enc);
    r.stats.definitions = enc.defs.size();
    r.stats.script_bytes = script.size();
    if (!config.dump_smt_path.empty()) {
      std::ofstream out(config.dump_smt_path, std::ios::binary);
      if (!out) throw SolverError("cannot write " + config.dump_smt_path);
      out << script;
    }
    SolverResult sr = run_solver(script, config.solver_command, config.timeout_seconds);
    r.stats.solver_seconds = sr.seconds;
    switch (sr.status) {
      case SolverStatus::Sat:
        r.verdict = Verdict::Proved;
        r.params = decode_model(sr.model, p);
        break;
      case SolverStatus::Unsat:
        r.verdict = Verdict::NotProvable;
        r.diagnostics.push_back("solver: unsat");
        break;
      case SolverStatus::Unknown:
        r.verdict = Verdict::Unknown;
        r.diagnostics.push_back(sr.timed_out ? "solver: timeout" : "solver: unknown");
        break;
    }
  }
  if (r.verdict == Verdict::Proved) recheck(p, r, config.engine);
  return r;
}

}  // namespace hoterm
