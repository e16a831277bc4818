// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ergo/dynamics.hpp"
#include "ergo/modes.hpp"
#include "json.hpp"

using namespace ergo;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double secs(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct SysCell {
  MeasureSystem sys;
  FolnerSchedule sched;
};

std::vector<SysCell> full_grid() {
  return {{make_torus_system(1, 8), cesaro_schedule()},
          {make_torus_system(1, 16), cesaro_schedule()},
          {make_torus_system(2, 8), box_schedule(2)},
          {make_torus_system(2, 16), box_schedule(2)},
          {make_bs12_affine_system(5), bs12_schedule()},
          {make_bs12_affine_system(9), bs12_schedule()}};
}

Observable rand_obs(Rng& rng, const MeasureSystem& sys, bool nonneg = false) {
  Observable f(static_cast<size_t>(sys.npoints()));
  for (auto& v : f) v = rng.grid64(nonneg);
  return f;
}

struct Verdict {
  bool pass = true;
  long long cells = 0;
  std::string note;
};

// 1. at-distance fluctuation counts never exceed floor(2||x|| / (u - 2 eta))
Verdict criterion1() {
  Verdict v;
  auto t0 = Clock::now();
  const std::vector<Rational> epss = {rat(1, 4), rat(1, 2)};
  auto grid = full_grid();
  for (size_t si = 0; si < grid.size(); ++si) {
    const auto& [sys, sched] = grid[si];
    for (int ob = 0; ob < 100; ++ob) {
      Rng rng(cell_seed(101, si * 1000 + static_cast<std::uint64_t>(ob)));
      Observable f = rand_obs(rng, sys);
      std::vector<Observable> avgs;
      avgs.reserve(24);
      for (long long n = 1; n <= 24; ++n) avgs.push_back(ergodic_average(sys, sched, n, f));
      for (const auto& eps : epss) {
        QuadVal eta = uc_modulus_hilbert(eps) * rat(1, 4);
        MainBoundReport rep = verify_main_bound(sys, sched, f, eps, eta, 24, &avgs);
        ++v.cells;
        if (!rep.pass || Int(rep.count) > rep.bound) {
          v.pass = false;
          v.note = "count above bound at system " + sys.name();
        }
      }
    }
  }
  double el = secs(t0);
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(1) << el << "s";
  if (el >= 180.0) {
    v.pass = false;
    v.note += " exceeded the 3 minute budget";
  }
  v.note = v.note.empty() ? ss.str() : ss.str() + ", " + v.note;
  return v;
}

// 2. ||A_K x - A_K A_N x|| < eta ||x|| with the closed-form K, zero gap for invariant x
Verdict criterion2() {
  Verdict v;
  auto t0 = Clock::now();
  const std::vector<Rational> etas = {rat(1, 4), rat(1, 8)};
  auto grid = full_grid();
  for (size_t si = 0; si < grid.size(); ++si) {
    const auto& [sys, sched] = grid[si];
    DistanceFn beta = sched.closed_form()->fn();
    for (long long N = 1; N <= 3; ++N) {
      for (const auto& eta : etas) {
        for (int ob = 0; ob < 100; ++ob) {
          Rng rng(cell_seed(202, si * 100000 + static_cast<std::uint64_t>(N) * 1000 +
                                     static_cast<std::uint64_t>(ob) * 2 + (eta == rat(1, 4))));
          Observable f = rand_obs(rng, sys);
          AveragingReport rep = averaging_lemma_check(sys, sched, beta, N, eta, f);
          ++v.cells;
          if (!rep.pass) {
            v.pass = false;
            v.note = "gap too wide at system " + sys.name();
          }
        }
        Observable flat(static_cast<size_t>(sys.npoints()), rat(3, 7));
        AveragingReport inv = averaging_lemma_check(sys, sched, beta, N, eta, flat);
        ++v.cells;
        if (!inv.pass || inv.gapSq != 0) {
          v.pass = false;
          v.note = "invariant observable moved at system " + sys.name();
        }
      }
    }
  }
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(1) << secs(t0) << "s";
  v.note = v.note.empty() ? ss.str() : ss.str() + ", " + v.note;
  return v;
}

// 3. along a greedily refined fast prefix, plain counts stay within lambda * bound + lambda
Verdict criterion3() {
  Verdict v;
  std::vector<SysCell> grid = {{make_torus_system(2, 16), box_schedule(2)},
                               {make_bs12_affine_system(9), bs12_schedule()}};
  const Rational eps = rat(39, 20);
  const QuadVal eta(rat(3, 8));
  for (size_t si = 0; si < grid.size(); ++si) {
    FolnerSchedule fast = fast_refine(grid[si].sched, 1, Rational(1), 6);
    for (int ob = 0; ob < 50; ++ob) {
      Rng rng(cell_seed(303, si * 1000 + static_cast<std::uint64_t>(ob)));
      Observable f = obs_scale(rand_obs(rng, grid[si].sys), rat(1, 8));
      FastCorollaryReport rep = verify_fast_corollary(grid[si].sys, fast, 1, f, eps, eta, 6);
      ++v.cells;
      if (!rep.precondition || !rep.pass) {
        v.pass = false;
        v.note = "fast prefix failed at system " + grid[si].sys.name();
      }
    }
  }
  return v;
}

// 4. closed-form moduli verified by exact set arithmetic over a tail window
Verdict criterion4() {
  Verdict v;
  const std::vector<Rational> epss = {rat(1, 2), rat(1, 4)};
  FolnerSchedule box = box_schedule(2);
  for (long long n = 1; n <= 4; ++n)
    for (const auto& eps : epss) {
      long long beta = box.closed_form()->at(n, eps);
      ModulusReport rep = verify_modulus(box, box.closed_form()->fn(), n, eps, beta + 8);
      ++v.cells;
      if (!rep.pass) {
        v.pass = false;
        v.note = "box modulus failed at n=" + std::to_string(n);
      }
    }
  FolnerSchedule bs = bs12_schedule();
  for (long long j = 1; j <= 2; ++j)
    for (const auto& eps : epss) {
      long long beta = bs.closed_form()->at(j, eps);
      ModulusReport rep = verify_modulus(bs, bs.closed_form()->fn(), j, eps, beta + 2);
      ++v.cells;
      if (!rep.pass) {
        v.pass = false;
        v.note = "rectangle modulus failed at j=" + std::to_string(j);
      }
    }
  return v;
}

// 5. mode separations: DP vs brute force, the witness families, the beta(n)=n+1 collapse
Verdict criterion5() {
  Verdict v;
  const std::vector<Rational> epss = {Rational(1), rat(1, 2)};
  auto fail = [&](const std::string& why) {
    v.pass = false;
    if (v.note.empty()) v.note = why;
  };
  // (a) + (e): every binary sequence of length <= 10
  auto succ = [](long long n) { return n + 1; };
  for (long long len = 1; len <= 10; ++len) {
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
      std::vector<Rational> x(static_cast<size_t>(len));
      for (long long i = 0; i < len; ++i) x[static_cast<size_t>(i)] = (mask >> i) & 1u;
      for (const auto& eps : epss) {
        ++v.cells;
        if (count_fluctuations(x, eps).count != brute_fluctuations(x, eps))
          fail("dynamic program disagrees with brute force");
        if (count_fluctuations_at_distance(x, eps, succ).count != count_fluctuations(x, eps).count)
          fail("beta(n)=n+1 must collapse to the plain count");
      }
    }
  }
  // (b) exact counts plus the iterated-growth metastability cap
  Rng rng(cell_seed(505, 1));
  std::vector<std::pair<long long, long long>> fs;
  for (int t = 0; t < 20; ++t)
    fs.emplace_back(static_cast<long long>(rng.range(1, 5)), static_cast<long long>(rng.range(0, 4)));
  for (long long j = 1; j <= 50; ++j) {
    std::vector<Rational> seq = seq_prefix(family_S(j), 512);
    ++v.cells;
    if (count_fluctuations(seq, Rational(1)).count != j) fail("witness family count is off");
    for (const auto& [a, b] : fs) {
      auto F = [a, b](long long n) { return a * n + b; };
      MetastabilityReport rep = metastable_index(seq, F, Rational(1));
      long long bound = 1;
      const long long steps = F(1) + 1;
      for (long long s = 0; s < steps; ++s) bound = F(bound);
      ++v.cells;
      if (!rep.found || rep.index > bound) fail("metastable index escaped the iterated cap");
    }
  }
  // (c) spread family under matching spacing
  for (long long j = 1; j <= 6; ++j) {
    for (auto btilde : {std::function<long long(long long)>([](long long n) { return n + 2; }),
                        std::function<long long(long long)>([](long long n) { return 2 * n; })}) {
      std::vector<Rational> prime = seq_prefix(family_S_prime(j, btilde), 4096);
      long long plain = count_fluctuations(seq_prefix(family_S(j), 64), Rational(1)).count;
      ++v.cells;
      if (count_fluctuations_at_distance(prime, Rational(1), btilde).count != plain)
        fail("spread family under its own spacing must match the plain count");
    }
  }
  // (d) superaffine spacing crushes the count
  {
    auto nseq = [](long long i) { return i * i; };
    auto half = [](long long n) { return n + (n + 1) / 2; };
    std::vector<Rational> seq = seq_prefix(family_superaffine(8, nseq), 80);
    ++v.cells;
    if (count_fluctuations(seq, Rational(1)).count < 8) fail("superaffine family too tame");
    if (count_fluctuations_at_distance(seq, Rational(1), half).count > 2)
      fail("superaffine spacing must cap the count at 2");
  }
  return v;
}

// 6. unit witnesses with slow averages, exact rational verdicts
Verdict criterion6() {
  Verdict v;
  for (long long n : {2ll, 3ll}) {
    Rational alpha = rat(1, n == 2 ? 4 : 8);
    for (int d : {1, 2}) {
      SlowRateReport rep = slow_rate_witness(d, n, alpha);
      Rational eps = rep.eps;
      ++v.cells;
      bool ok = rep.pass && rep.diffSq < eps * eps && rep.avgSq > (1 - eps) * (1 - eps) &&
                (1 - eps) > alpha;
      if (!ok) {
        v.pass = false;
        v.note = "witness failed at d=" + std::to_string(d) + " n=" + std::to_string(n);
      }
    }
  }
  return v;
}

// 7. upcrossing measure against ||f||_1 / (k (beta - alpha))
Verdict criterion7() {
  Verdict v;
  const std::vector<std::pair<Rational, Rational>> bands = {{rat(1, 8), rat(3, 8)},
                                                            {rat(1, 4), rat(3, 4)}};
  for (long long N : {12ll, 16ll}) {
    MeasureSystem sys = make_torus_system(1, N);
    for (int ob = 0; ob < 20; ++ob) {
      Rng rng(cell_seed(707, static_cast<std::uint64_t>(N) * 100 + static_cast<std::uint64_t>(ob)));
      Observable f = rand_obs(rng, sys, true);
      for (const auto& [alpha, beta] : bands)
        for (long long k = 1; k <= 3; ++k) {
          BishopReport rep = bishop_upcrossing_check(sys, f, alpha, beta, k, 64);
          ++v.cells;
          if (!rep.pass || rep.lhs > rep.rhs) {
            v.pass = false;
            v.note = "upcrossing mass above the bound at N=" + std::to_string(N);
          }
        }
    }
  }
  return v;
}

// 8. certified rate indices stay Cauchy over a tenfold horizon
Verdict criterion8() {
  Verdict v;
  FolnerSchedule iv = cesaro_schedule();
  for (long long N : {4ll, 8ll}) {
    MeasureSystem sys = make_torus_system(1, N);
    for (int ob = 0; ob < 10; ++ob) {
      Rng rng(cell_seed(808, static_cast<std::uint64_t>(N) * 100 + static_cast<std::uint64_t>(ob)));
      Observable f = rand_obs(rng, sys);
      for (const auto& eps : {rat(1, 10), rat(1, 100)}) {
        RateCertificate rep = rate_from_limit_norm(sys, f, eps);
        ++v.cells;
        if (!rep.pass || rep.m < 1) {
          v.pass = false;
          v.note = "certificate rejected its own index at N=" + std::to_string(N);
          continue;
        }
        Observable am = ergodic_average(sys, iv, rep.m, f);
        for (int t = 0; t <= 24; ++t) {
          long long n = rep.m + (9 * rep.m * t) / 24;
          Rational gapSq = obs_dist_sq(sys, ergodic_average(sys, iv, n, f), am);
          if (gapSq >= eps * eps) {
            v.pass = false;
            v.note = "sampled gap broke the certificate at n=" + std::to_string(n);
          }
        }
      }
    }
  }
  return v;
}

// 9. every shipped experiment run is byte-identical under a repeated seed
Verdict criterion9() {
  Verdict v;
  const char* bin = std::getenv("ERGOLAB_BIN");
  const char* cfgs = std::getenv("ERGOLAB_CONFIGS");
  if (!bin || !cfgs) {
    v.pass = false;
    v.note = "ERGOLAB_BIN / ERGOLAB_CONFIGS must be set";
    return v;
  }
  fs::path scratch = "acceptance_scratch";
  fs::create_directories(scratch);
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(cfgs))
    if (e.path().extension() == ".json" && e.path().filename() != "invalid-eta.json")
      configs.push_back(e.path());
  std::sort(configs.begin(), configs.end());
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return in.good() || in.eof() ? ss.str() : std::string();
  };
  for (const auto& cfg : configs) {
    std::ifstream in(cfg);
    nlohmann::json j = nlohmann::json::parse(in);
    std::string kind = j.at("kind").get<std::string>();
    std::string stem = cfg.stem().string();
    for (const char* tag : {"one", "two"}) {
      fs::path out = scratch / (stem + "-" + tag);
      std::string cmd = std::string(bin) + " " + kind + " --config " + cfg.string() + " --out " +
                        out.string() + " --seed 424242 --format both > /dev/null 2>&1";
      int st = std::system(cmd.c_str());
      if (st == -1 || WEXITSTATUS(st) != 0) {
        v.pass = false;
        v.note = stem + " exited nonzero";
      }
    }
    ++v.cells;
    for (const char* f : {"results.csv", "results.json", "summary.json"}) {
      std::string a = slurp(scratch / (stem + "-one") / f);
      std::string b = slurp(scratch / (stem + "-two") / f);
      if (a.empty() || a != b) {
        v.pass = false;
        v.note = stem + "/" + f + " differs between reruns";
      }
    }
  }
  if (v.cells == 0) {
    v.pass = false;
    v.note = "no configs found";
  }
  return v;
}

}  // namespace

int main() {
  struct Row {
    int id;
    const char* label;
    Verdict (*run)();
  };
  const Row rows[] = {
      {1, "fluctuation counts stay within the convexity bound", criterion1},
      {2, "two-scale averaging gap stays below eta times the norm", criterion2},
      {3, "fast prefixes keep plain counts within the scaled bound", criterion3},
      {4, "closed-form moduli verified by exact set arithmetic", criterion4},
      {5, "mode hierarchy: counters, witness families, spacing collapse", criterion5},
      {6, "slow-rate witnesses beat every uniform rate", criterion6},
      {7, "upcrossing measure obeys the weak-type bound", criterion7},
      {8, "rate certificates stay Cauchy over a tenfold horizon", criterion8},
      {9, "seeded experiment runs are byte-identical", criterion9},
  };
  int failures = 0;
  for (const auto& row : rows) {
    Verdict v;
    try {
      v = row.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.note = std::string("exception: ") + e.what();
    }
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << row.id << ". " << row.label << " ("
              << v.cells << " cells" << (v.note.empty() ? "" : ", " + v.note) << ")" << std::endl;
    if (!v.pass) ++failures;
  }
  std::cout << (failures == 0 ? "acceptance: all 9 criteria pass"
                              : "acceptance: " + std::to_string(failures) + " criteria failing")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
