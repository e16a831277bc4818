// ergolab: configuration-driven batch runs of the verifiers and generators,
// with deterministic CSV/JSON outputs.
//
// Exit codes: 0 all cells passed, 1 at least one asserted bound failed,
// 2 usage or config error, 3 resource budget or stall.

#include "ergo/dynamics.hpp"
#include "ergo/io.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

using ergo::DistanceFn;
using ergo::FiniteSubset;
using ergo::FolnerSchedule;
using ergo::GroupElement;
using ergo::Int;
using ergo::InputError;
using ergo::MeasureSystem;
using ergo::Observable;
using ergo::QuadVal;
using ergo::Rational;
using ergo::Rng;
using ergo::Table;
using json = nlohmann::json;

namespace {

constexpr std::uint64_t kSeedUnset = std::numeric_limits<std::uint64_t>::max();

struct CommonOpts {
  std::string configPath;
  std::string outDir = "out";
  std::string format = "both";
  std::uint64_t seed = kSeedUnset;
  long long budget = -1;
  long long horizon = -1;
};

struct RunOut {
  Table table;
  json summary = json::object();
  bool pass = true;
};

const json& need(const json& c, const std::string& key) {
  if (!c.is_object() || !c.contains(key)) throw InputError("config missing field: " + key);
  return c.at(key);
}

long long need_int(const json& c, const std::string& key) {
  const json& v = need(c, key);
  if (!v.is_number_integer()) throw InputError("config field must be an integer: " + key);
  return v.get<long long>();
}

long long opt_int(const json& c, const std::string& key, long long dflt) {
  if (!c.is_object() || !c.contains(key)) return dflt;
  return need_int(c, key);
}

std::string need_str(const json& c, const std::string& key) {
  const json& v = need(c, key);
  if (!v.is_string()) throw InputError("config field must be a string: " + key);
  return v.get<std::string>();
}

Rational json_rat(const json& v, const std::string& key) {
  if (v.is_string()) return ergo::parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  throw InputError("config field must be a rational string or integer: " + key);
}

Rational need_rat(const json& c, const std::string& key) { return json_rat(need(c, key), key); }

std::vector<Rational> need_rat_list(const json& c, const std::string& key) {
  const json& v = need(c, key);
  if (!v.is_array() || v.empty()) throw InputError("config field must be a nonempty array: " + key);
  std::vector<Rational> out;
  for (const auto& e : v) out.push_back(json_rat(e, key));
  return out;
}

std::vector<long long> need_int_list(const json& c, const std::string& key) {
  const json& v = need(c, key);
  if (!v.is_array() || v.empty()) throw InputError("config field must be a nonempty array: " + key);
  std::vector<long long> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw InputError("config field must hold integers: " + key);
    out.push_back(e.get<long long>());
  }
  return out;
}

std::vector<std::string> need_str_list(const json& c, const std::string& key) {
  const json& v = need(c, key);
  if (!v.is_array() || v.empty()) throw InputError("config field must be a nonempty array: " + key);
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw InputError("config field must hold strings: " + key);
    out.push_back(e.get<std::string>());
  }
  return out;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// "n+1", "2n", "2n+3", "n", also "trivial" (constant 0, an always-open gate)
std::function<long long(long long)> parse_index_fn(const std::string& s) {
  if (s == "trivial") return [](long long) { return 0ll; };
  if (s == "square") return [](long long n) { return n * n; };
  auto np = s.find('n');
  if (np == std::string::npos) throw InputError("index function must mention n: " + s);
  std::string head = s.substr(0, np);
  if (!head.empty() && head.back() == '*') head.pop_back();
  long long coef = head.empty() ? 1 : (all_digits(head) ? std::stoll(head) : -1);
  std::string tail = s.substr(np + 1);
  long long off = 0;
  if (!tail.empty()) {
    if (tail[0] != '+' || !all_digits(tail.substr(1)))
      throw InputError("index function must look like a*n+b: " + s);
    off = std::stoll(tail.substr(1));
  }
  if (coef < 0) throw InputError("index function must look like a*n+b: " + s);
  return [coef, off](long long n) { return coef * n + off; };
}

std::function<Int(const Int&)> parse_growth_fn(const std::string& s) {
  parse_index_fn(s);  // shape validation
  if (s == "trivial") return [](const Int&) { return Int(0); };
  if (s == "square") return [](const Int& n) { return n * n; };
  auto np = s.find('n');
  std::string head = s.substr(0, np);
  if (!head.empty() && head.back() == '*') head.pop_back();
  Int coef = head.empty() ? 1 : Int(head);
  std::string tail = s.substr(np + 1);
  Int off = tail.empty() ? 0 : Int(tail.substr(1));
  return [coef, off](const Int& n) { return coef * n + off; };
}

struct NamedSeq {
  ergo::SequenceFn fn;
  std::string name;
};

NamedSeq build_family(const json& f) {
  std::string type = need_str(f, "type");
  if (type == "S") {
    long long j = need_int(f, "j");
    return {ergo::family_S(j), "S(" + std::to_string(j) + ")"};
  }
  if (type == "S-prime") {
    long long j = need_int(f, "j");
    std::string beta = need_str(f, "beta");
    return {ergo::family_S_prime(j, parse_index_fn(beta)),
            "S'(" + std::to_string(j) + ";" + beta + ")"};
  }
  if (type == "step") {
    long long n = need_int(f, "n");
    return {ergo::family_step(n), "step(" + std::to_string(n) + ")"};
  }
  if (type == "superaffine") {
    long long k = need_int(f, "k");
    std::string nseq = need_str(f, "nseq");
    return {ergo::family_superaffine(k, parse_index_fn(nseq)),
            "superaffine(" + std::to_string(k) + ";" + nseq + ")"};
  }
  throw InputError("config field family.type: unknown value " + type);
}

std::vector<NamedSeq> build_families(const json& cfg) {
  std::vector<NamedSeq> out;
  if (cfg.contains("families")) {
    const json& arr = need(cfg, "families");
    if (!arr.is_array() || arr.empty())
      throw InputError("config field families must be a nonempty array");
    for (const auto& f : arr) out.push_back(build_family(f));
  } else {
    out.push_back(build_family(need(cfg, "family")));
  }
  return out;
}

FolnerSchedule build_schedule(const json& s, long long budget) {
  std::string type = need_str(s, "type");
  if (type == "cesaro") return ergo::cesaro_schedule(budget);
  if (type == "box") return ergo::box_schedule(static_cast<int>(need_int(s, "dim")), budget);
  if (type == "bs12") return ergo::bs12_schedule(budget);
  if (type == "greedy")
    return ergo::greedy_computable_folner(ergo::lattice_group(1), ergo::interval_enumerator(),
                                          need_int(s, "count"),
                                          opt_int(s, "scan-horizon", 1000000), budget);
  throw InputError("config field schedule.type: unknown value " + type);
}

MeasureSystem build_system(const json& s) {
  std::string type = need_str(s, "type");
  if (type == "torus")
    return ergo::make_torus_system(static_cast<int>(need_int(s, "d")), need_int(s, "N"));
  if (type == "bs12") return ergo::make_bs12_affine_system(need_int(s, "q"));
  throw InputError("config field system.type: unknown value " + type);
}

// the pinned pairing: rank-1 torus takes one-sided intervals, rank-d boxes,
// the affine circle takes the dilation rectangles
FolnerSchedule schedule_for(const MeasureSystem& sys, long long budget) {
  if (sys.is_torus() && sys.torus_dim() == 1) return ergo::cesaro_schedule(budget);
  if (sys.is_torus()) return ergo::box_schedule(sys.torus_dim(), budget);
  return ergo::bs12_schedule(budget);
}

QuadVal eta_for(const std::string& spec, const Rational& eps) {
  if (spec == "u/4") return ergo::uc_modulus_hilbert(eps) * Rational(1, 4);
  if (spec == "u/8") return ergo::uc_modulus_hilbert(eps) * Rational(1, 8);
  return QuadVal(ergo::parse_rational(spec));
}

Observable random_observable(Rng& r, long long npts, bool nonneg) {
  Observable f(static_cast<size_t>(npts));
  for (auto& v : f) v = r.grid64(nonneg);
  return f;
}

// divide by the least integer t with t^2 * capSq >= ||f||^2
Observable downscale(const MeasureSystem& sys, Observable f, const Rational& capSq) {
  if (capSq <= 0) throw InputError("norm cap must be positive");
  Rational q = ergo::obs_norm_sq(sys, f);
  long long t = 1;
  while (Rational(t) * t * capSq < q) ++t;
  if (t == 1) return f;
  return ergo::obs_scale(f, Rational(1, t));
}

std::string chain_json(const std::vector<long long>& chain) {
  json arr = json::array();
  for (long long c : chain) arr.push_back(c);
  return arr.dump();
}

json element_json(const GroupElement& g) {
  if (const auto* e = std::get_if<ergo::LatticeElt>(&g.v)) {
    json arr = json::array();
    for (long long c : e->c) arr.push_back(c);
    return arr;
  }
  if (const auto* e = std::get_if<ergo::Bs12Elt>(&g.v)) {
    // translation part num * 2^exp, then the level
    return json{{"num", e->x.num.str()}, {"exp", -e->x.exp}, {"level", e->n}};
  }
  return json(ergo::element_string(g));
}

json subset_json(const FiniteSubset& f) {
  json elems = json::array();
  for (const auto& g : f.elements()) elems.push_back(element_json(g));
  return json{{"group", ergo::group_name(f.group())}, {"elements", std::move(elems)}};
}

long long effective_budget(const json& cfg, const CommonOpts& opt) {
  long long b = opt_int(cfg, "budget-elements", ergo::kDefaultElementBudget);
  if (opt.budget >= 0) b = opt.budget;
  if (b < 1) throw InputError("config field budget-elements must be positive");
  return b;
}

std::uint64_t effective_seed(const json& cfg, const CommonOpts& opt) {
  if (opt.seed != kSeedUnset) return opt.seed;
  if (cfg.contains("seed")) {
    const json& v = cfg.at("seed");
    if (!v.is_number_unsigned() && !v.is_number_integer())
      throw InputError("config field seed must be an integer");
    return v.get<std::uint64_t>();
  }
  return 0;
}

// ---------------------------------------------------------------- runners

RunOut run_folner_stats(const json& cfg, const CommonOpts& opt) {
  RunOut out;
  long long budget = effective_budget(cfg, opt);
  FolnerSchedule s = build_schedule(need(cfg, "schedule"), budget);
  std::vector<long long> idx = need_int_list(cfg, "indices");
  bool emit = cfg.value("emit-elements", false);
  out.table.columns = {"cell", "schedule", "idx", "cardinality", "defect_prev", "beta_half"};
  json sets = json::array();
  for (size_t i = 0; i < idx.size(); ++i) {
    long long n = idx[i];
    std::string defect = "";
    if (i > 0) defect = ergo::rat_string(s.max_defect(n, idx[i - 1]).first);
    std::string beta = "";
    if (auto cf = s.closed_form(); cf && n >= 1) beta = std::to_string(cf->at(n, Rational(1, 2)));
    out.table.rows.push_back({std::to_string(i), s.name(), std::to_string(n),
                              s.cardinality_at(n).str(), defect, beta});
    if (emit) sets.push_back(json{{"idx", n}, {"set", subset_json(s.set_at(n))}});
  }
  if (emit) out.summary["sets"] = std::move(sets);
  return out;
}

RunOut run_modulus(const json& cfg, const CommonOpts& opt) {
  RunOut out;
  long long budget = effective_budget(cfg, opt);
  FolnerSchedule s = build_schedule(need(cfg, "schedule"), budget);
  auto cf = s.closed_form();
  if (!cf) throw InputError("schedule lacks a closed-form modulus");
  long long extra = opt_int(cfg, "extra", 8);
  if (opt.horizon >= 0) extra = opt.horizon;
  const json& cells = need(cfg, "cells");
  if (!cells.is_array() || cells.empty())
    throw InputError("config field cells must be a nonempty array");
  out.table.columns = {"cell",    "schedule", "n",       "eps",   "beta", "horizon",
                       "pass",    "fail_m",   "witness", "witness_defect", "elements"};
  long long cell = 0;
  for (const auto& c : cells) {
    long long n = need_int(c, "n");
    Rational eps = need_rat(c, "eps");
    long long beta = cf->at(n, eps);
    long long horizon = beta + extra;
    ergo::ModulusReport rep = ergo::verify_modulus(s, cf->fn(), n, eps, horizon);
    out.pass = out.pass && rep.pass;
    out.table.rows.push_back(
        {std::to_string(cell), s.name(), std::to_string(n), ergo::rat_string(eps),
         std::to_string(beta), std::to_string(horizon), rep.pass ? "true" : "false",
         rep.pass ? "" : std::to_string(rep.failM),
         rep.pass ? "" : ergo::element_string(rep.witness),
         rep.pass ? "" : ergo::rat_string(rep.witnessDefect), std::to_string(rep.cells)});
    ++cell;
  }
  return out;
}

RunOut run_fluctuations(const json& cfg, const CommonOpts& opt) {
  (void)opt;
  RunOut out;
  std::vector<NamedSeq> fams = build_families(cfg);
  std::vector<Rational> epss = need_rat_list(cfg, "eps");
  long long prefix = need_int(cfg, "prefix");
  bool spaced = cfg.contains("beta");
  std::string betaName = spaced ? need_str(cfg, "beta") : "";
  out.table.columns = {"cell", "family", "eps", "beta", "count", "chain"};
  long long cell = 0;
  for (const auto& fam : fams) {
    std::vector<Rational> seq = ergo::seq_prefix(fam.fn, prefix);
    for (const auto& eps : epss) {
      ergo::FluctuationReport rep =
          spaced ? ergo::count_fluctuations_at_distance(seq, eps, parse_index_fn(betaName))
                 : ergo::count_fluctuations(seq, eps);
      out.table.rows.push_back({std::to_string(cell), fam.name, ergo::rat_string(eps), betaName,
                                std::to_string(rep.count), chain_json(rep.chain)});
      ++cell;
    }
  }
  return out;
}

RunOut run_metastability(const json& cfg, const CommonOpts& opt) {
  (void)opt;
  RunOut out;
  std::string mode = cfg.value("mode", std::string("index"));
  if (mode == "index") {
    std::vector<NamedSeq> fams = build_families(cfg);
    std::vector<std::string> Fs = need_str_list(cfg, "F");
    std::vector<Rational> epss = need_rat_list(cfg, "eps");
    long long prefix = need_int(cfg, "prefix");
    out.table.columns = {"cell", "family", "F", "eps", "found", "index"};
    long long cell = 0;
    for (const auto& fam : fams) {
      std::vector<Rational> seq = ergo::seq_prefix(fam.fn, prefix);
      for (const auto& Fname : Fs) {
        auto F = parse_index_fn(Fname);
        for (const auto& eps : epss) {
          ergo::MetastabilityReport rep = ergo::metastable_index(seq, F, eps);
          out.table.rows.push_back({std::to_string(cell), fam.name, Fname, ergo::rat_string(eps),
                                    rep.found ? "true" : "false",
                                    rep.found ? std::to_string(rep.index) : ""});
          ++cell;
        }
      }
    }
    return out;
  }
  if (mode == "phi") {
    const json& cells = need(cfg, "cells");
    if (!cells.is_array() || cells.empty())
      throw InputError("config field cells must be a nonempty array");
    Int cap = Int(opt_int(cfg, "cap", 1000000));
    out.table.columns = {"cell", "lambda", "beta", "F", "eps", "phi"};
    long long cell = 0;
    for (const auto& c : cells) {
      long long lambda = need_int(c, "lambda");
      std::string betaName = need_str(c, "beta");
      std::string Fname = need_str(c, "F");
      Rational eps = need_rat(c, "eps");
      auto bg = parse_growth_fn(betaName);
      auto beta = [bg](const Int& n, const Rational&) { return bg(n); };
      Int phi = ergo::distance_to_metastability(lambda, beta, parse_growth_fn(Fname), eps, cap);
      out.table.rows.push_back({std::to_string(cell), std::to_string(lambda), betaName, Fname,
                                ergo::rat_string(eps), phi.str()});
      ++cell;
    }
    return out;
  }
  throw InputError("config field mode: unknown value " + mode);
}

RunOut run_verify_main_bound(const json& cfg, const CommonOpts& opt) {
  RunOut out;
  long long budget = effective_budget(cfg, opt);
  std::uint64_t seed = effective_seed(cfg, opt);
  const json& systems = need(cfg, "systems");
  if (!systems.is_array() || systems.empty())
    throw InputError("config field systems must be a nonempty array");
  std::vector<Rational> epss = need_rat_list(cfg, "eps");
  std::string etaSpec = need_str(cfg, "eta");
  long long nObs = need_int(cfg, "observables");
  long long nMax = need_int(cfg, "nmax");
  if (nObs < 1 || nMax < 1) throw InputError("observables and nmax must be positive");
  for (const auto& eps : epss) {
    QuadVal u = ergo::uc_modulus_hilbert(eps);
    QuadVal eta = eta_for(etaSpec, eps);
    if ((u - eta * Rational(2)).sign() <= 0)
      throw InputError("eta must stay below half the convexity modulus: 2*eta >= u at eps=" +
                       ergo::rat_string(eps));
  }
  out.table.columns = {"cell", "system", "schedule", "eps",     "eta",  "obs",
                       "norm_sq", "count",  "bound",    "vacuous", "pass"};
  size_t nSys = systems.size(), nEps = epss.size();
  size_t total = nSys * nEps * static_cast<size_t>(nObs);
  out.table.rows.resize(total);
  long long sysIdx = 0;
  for (const auto& sjson : systems) {
    MeasureSystem sys = build_system(sjson);
    FolnerSchedule sched = schedule_for(sys, budget);
    for (long long ob = 0; ob < nObs; ++ob) {
      Rng r(ergo::cell_seed(seed, static_cast<std::uint64_t>(sysIdx * 100000 + ob)));
      Observable f = random_observable(r, sys.npoints(), false);
      std::vector<Observable> avgs;
      avgs.reserve(static_cast<size_t>(nMax));
      for (long long n = 1; n <= nMax; ++n)
        avgs.push_back(ergo::ergodic_average(sys, sched, n, f, budget));
      for (size_t ei = 0; ei < nEps; ++ei) {
        QuadVal eta = eta_for(etaSpec, epss[ei]);
        ergo::MainBoundReport rep =
            ergo::verify_main_bound(sys, sched, f, epss[ei], eta, nMax, &avgs);
        out.pass = out.pass && rep.pass;
        size_t cell = (static_cast<size_t>(sysIdx) * nEps + ei) * static_cast<size_t>(nObs) +
                      static_cast<size_t>(ob);
        out.table.rows[cell] = {std::to_string(cell),
                                sys.name(),
                                sched.name(),
                                ergo::rat_string(epss[ei]),
                                eta.str(),
                                std::to_string(ob),
                                ergo::rat_string(rep.normSq),
                                std::to_string(rep.count),
                                rep.bound.str(),
                                rep.vacuous ? "true" : "false",
                                rep.pass ? "true" : "false"};
      }
    }
    ++sysIdx;
  }
  return out;
}

RunOut run_verify_fast(const json& cfg, const CommonOpts& opt) {
  RunOut out;
  long long budget = effective_budget(cfg, opt);
  std::uint64_t seed = effective_seed(cfg, opt);
  const json& systems = need(cfg, "systems");
  if (!systems.is_array() || systems.empty())
    throw InputError("config field systems must be a nonempty array");
  long long lambda = need_int(cfg, "lambda");
  long long len = need_int(cfg, "len");
  Rational epsStar = need_rat(cfg, "eps-star");
  Rational eps = need_rat(cfg, "eps");
  QuadVal eta = eta_for(need_str(cfg, "eta"), eps);
  QuadVal u = ergo::uc_modulus_hilbert(eps);
  if ((u - eta * Rational(2)).sign() <= 0)
    throw InputError("eta must stay below half the convexity modulus: 2*eta >= u at eps=" +
                     ergo::rat_string(eps));
  long long nObs = need_int(cfg, "observables");
  Rational capSq = need_rat(cfg, "norm-cap-sq");
  long long scan = opt_int(cfg, "scan-horizon", 100000);
  out.table.columns = {"cell", "system", "obs", "precondition", "count", "bound", "pass"};
  json refined = json::array();
  long long cell = 0;
  for (const auto& sjson : systems) {
    MeasureSystem sys = build_system(sjson);
    FolnerSchedule base = schedule_for(sys, budget);
    FolnerSchedule fast = ergo::fast_refine(base, lambda, epsStar, len, scan);
    json idxs = json::array();
    for (long long i = 1; i <= len; ++i) idxs.push_back(fast.refined_index(i));
    refined.push_back(json{{"system", sys.name()}, {"indices", std::move(idxs)}});
    for (long long ob = 0; ob < nObs; ++ob) {
      Rng r(ergo::cell_seed(seed, static_cast<std::uint64_t>(cell)));
      Observable f = downscale(sys, random_observable(r, sys.npoints(), false), capSq);
      ergo::FastCorollaryReport rep =
          ergo::verify_fast_corollary(sys, fast, lambda, f, eps, eta, len);
      out.pass = out.pass && rep.pass;
      out.table.rows.push_back({std::to_string(cell), sys.name(), std::to_string(ob),
                                rep.precondition ? "true" : "false", std::to_string(rep.count),
                                rep.bound.str(), rep.pass ? "true" : "false"});
      ++cell;
    }
  }
  out.summary["refined"] = std::move(refined);
  return out;
}

RunOut run_slow_rate(const json& cfg, const CommonOpts& opt) {
  (void)opt;
  RunOut out;
  const json& cells = need(cfg, "cells");
  if (!cells.is_array() || cells.empty())
    throw InputError("config field cells must be a nonempty array");
  out.table.columns = {"cell", "d",       "n",      "alpha", "eps",
                       "m",    "diff_sq", "avg_sq", "pass"};
  long long cell = 0;
  for (const auto& c : cells) {
    int d = static_cast<int>(need_int(c, "d"));
    long long n = need_int(c, "n");
    Rational alpha = need_rat(c, "alpha");
    ergo::SlowRateReport rep = ergo::slow_rate_witness(d, n, alpha);
    out.pass = out.pass && rep.pass;
    out.table.rows.push_back({std::to_string(cell), std::to_string(d), std::to_string(n),
                              ergo::rat_string(alpha), ergo::rat_string(rep.eps),
                              std::to_string(rep.m), ergo::rat_string(rep.diffSq),
                              ergo::rat_string(rep.avgSq), rep.pass ? "true" : "false"});
    ++cell;
  }
  return out;
}

RunOut run_upcrossings(const json& cfg, const CommonOpts& opt) {
  RunOut out;
  std::string mode = cfg.value("mode", std::string("sequence"));
  const json& bandsJson = need(cfg, "bands");
  if (!bandsJson.is_array() || bandsJson.empty())
    throw InputError("config field bands must be a nonempty array");
  std::vector<std::pair<Rational, Rational>> bands;
  for (const auto& b : bandsJson) {
    if (!b.is_array() || b.size() != 2)
      throw InputError("config field bands must hold [alpha, beta] pairs");
    bands.emplace_back(json_rat(b.at(0), "bands"), json_rat(b.at(1), "bands"));
  }
  if (mode == "sequence") {
    std::vector<NamedSeq> fams = build_families(cfg);
    long long prefix = need_int(cfg, "prefix");
    out.table.columns = {"cell", "family", "alpha", "beta", "count", "pairs"};
    long long cell = 0;
    for (const auto& fam : fams) {
      std::vector<Rational> seq = ergo::seq_prefix(fam.fn, prefix);
      for (const auto& [alpha, beta] : bands) {
        ergo::UpcrossingReport rep = ergo::count_upcrossings(seq, alpha, beta);
        json pairs = json::array();
        for (const auto& [lo, hi] : rep.pairs) pairs.push_back(json::array({lo, hi}));
        out.table.rows.push_back({std::to_string(cell), fam.name, ergo::rat_string(alpha),
                                  ergo::rat_string(beta), std::to_string(rep.count),
                                  pairs.dump()});
        ++cell;
      }
    }
    return out;
  }
  if (mode == "bishop") {
    std::uint64_t seed = effective_seed(cfg, opt);
    const json& systems = need(cfg, "systems");
    if (!systems.is_array() || systems.empty())
      throw InputError("config field systems must be a nonempty array");
    long long nObs = need_int(cfg, "observables");
    std::vector<long long> ks = need_int_list(cfg, "k");
    long long horizon = opt_int(cfg, "horizon", 64);
    if (opt.horizon >= 0) horizon = opt.horizon;
    out.table.columns = {"cell", "system", "obs", "alpha", "beta", "k", "lhs", "rhs", "pass"};
    long long cell = 0;
    long long sysIdx = 0;
    for (const auto& sjson : systems) {
      MeasureSystem sys = build_system(sjson);
      for (long long ob = 0; ob < nObs; ++ob) {
        Rng r(ergo::cell_seed(seed, static_cast<std::uint64_t>(sysIdx * 100000 + ob)));
        Observable f = random_observable(r, sys.npoints(), true);
        for (const auto& [alpha, beta] : bands) {
          for (long long k : ks) {
            ergo::BishopReport rep = ergo::bishop_upcrossing_check(sys, f, alpha, beta, k, horizon);
            out.pass = out.pass && rep.pass;
            out.table.rows.push_back({std::to_string(cell), sys.name(), std::to_string(ob),
                                      ergo::rat_string(alpha), ergo::rat_string(beta),
                                      std::to_string(k), ergo::rat_string(rep.lhs),
                                      ergo::rat_string(rep.rhs), rep.pass ? "true" : "false"});
            ++cell;
          }
        }
      }
      ++sysIdx;
    }
    return out;
  }
  throw InputError("config field mode: unknown value " + mode);
}

RunOut run_learn(const json& cfg, const CommonOpts& opt) {
  (void)opt;
  RunOut out;
  std::vector<NamedSeq> fams = build_families(cfg);
  std::vector<long long> ks = need_int_list(cfg, "k");
  std::vector<std::string> betas = need_str_list(cfg, "beta");
  long long prefix = need_int(cfg, "prefix");
  out.table.columns = {"cell", "family", "k", "beta", "mind_changes", "transcript"};
  long long cell = 0;
  for (const auto& fam : fams) {
    std::vector<Rational> seq = ergo::seq_prefix(fam.fn, prefix);
    for (long long k : ks) {
      for (const auto& betaName : betas) {
        ergo::LearnReport rep = ergo::learn_limit(seq, k, parse_index_fn(betaName));
        out.table.rows.push_back({std::to_string(cell), fam.name, std::to_string(k), betaName,
                                  std::to_string(rep.mindChanges), chain_json(rep.transcript)});
        ++cell;
      }
    }
  }
  return out;
}

RunOut run_rate_from_limit(const json& cfg, const CommonOpts& opt) {
  RunOut out;
  std::uint64_t seed = effective_seed(cfg, opt);
  std::vector<long long> Ns = need_int_list(cfg, "Ns");
  long long nObs = need_int(cfg, "observables");
  std::vector<Rational> epss = need_rat_list(cfg, "eps");
  out.table.columns = {"cell", "N",       "obs",     "eps", "m",
                       "u_norm", "worst_n", "worst_gap_sq", "pass"};
  long long cell = 0;
  long long sysIdx = 0;
  for (long long N : Ns) {
    MeasureSystem sys = ergo::make_torus_system(1, N);
    for (long long ob = 0; ob < nObs; ++ob) {
      Rng r(ergo::cell_seed(seed, static_cast<std::uint64_t>(sysIdx * 100000 + ob)));
      Observable f = random_observable(r, sys.npoints(), false);
      for (const auto& eps : epss) {
        ergo::RateCertificate rep = ergo::rate_from_limit_norm(sys, f, eps);
        out.pass = out.pass && rep.pass;
        out.table.rows.push_back({std::to_string(cell), std::to_string(N), std::to_string(ob),
                                  ergo::rat_string(eps), std::to_string(rep.m),
                                  ergo::fmt_double(rep.uNorm), std::to_string(rep.worstN),
                                  ergo::rat_string(rep.worstGapSq), rep.pass ? "true" : "false"});
        ++cell;
      }
    }
    ++sysIdx;
  }
  return out;
}

RunOut dispatch(const std::string& kind, const json& cfg, const CommonOpts& opt) {
  if (kind == "folner-stats") return run_folner_stats(cfg, opt);
  if (kind == "modulus") return run_modulus(cfg, opt);
  if (kind == "fluctuations") return run_fluctuations(cfg, opt);
  if (kind == "metastability") return run_metastability(cfg, opt);
  if (kind == "verify-main-bound") return run_verify_main_bound(cfg, opt);
  if (kind == "verify-fast") return run_verify_fast(cfg, opt);
  if (kind == "slow-rate") return run_slow_rate(cfg, opt);
  if (kind == "upcrossings") return run_upcrossings(cfg, opt);
  if (kind == "learn") return run_learn(cfg, opt);
  if (kind == "rate-from-limit") return run_rate_from_limit(cfg, opt);
  throw InputError("unknown experiment kind: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab: batch experiments over exact averaging checks"};
  app.require_subcommand(1);
  CommonOpts opt;
  const char* kinds[] = {"folner-stats", "modulus",      "fluctuations", "metastability",
                         "verify-main-bound", "verify-fast", "slow-rate", "upcrossings",
                         "learn",        "rate-from-limit"};
  for (const char* k : kinds) {
    CLI::App* sub = app.add_subcommand(k, std::string("run a ") + k + " experiment");
    sub->add_option("--config", opt.configPath, "JSON experiment config")->required();
    sub->add_option("--out", opt.outDir, "output directory (default: out)");
    sub->add_option("--seed", opt.seed, "override the config rng seed");
    sub->add_option("--budget-elements", opt.budget, "override the element budget");
    sub->add_option("--horizon", opt.horizon, "override the kind-specific horizon field");
    sub->add_option("--format", opt.format, "csv | json | both (default: both)")
        ->check(CLI::IsMember({"csv", "json", "both"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  std::string kind = app.get_subcommands().front()->get_name();
  try {
    json cfg = ergo::load_json_file(opt.configPath);
    std::string schema = need_str(cfg, "schema");
    if (schema != "ergolab/1") throw InputError("config field schema: unsupported value " + schema);
    if (cfg.contains("kind") && need_str(cfg, "kind") != kind)
      throw InputError("config field kind does not match the subcommand");
    RunOut result = dispatch(kind, cfg, opt);
    result.summary["schema"] = "ergolab/1";
    result.summary["kind"] = kind;
    result.summary["cells"] = result.table.rows.size();
    result.summary["pass"] = result.pass;
    ergo::write_outputs(opt.outDir, opt.format, result.table, result.summary);
    std::cout << kind << ": cells=" << result.table.rows.size()
              << " pass=" << (result.pass ? "true" : "false") << "\n";
    return result.pass ? 0 : 1;
  } catch (const ergo::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const ergo::StallError& e) {
    std::cerr << "stall: " << e.what() << "\n";
    return 3;
  } catch (const ergo::CertificateError& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return 1;
  } catch (const ergo::ErgoError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
