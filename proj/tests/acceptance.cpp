// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <boost/math/special_functions/beta.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace warpalign;
namespace wt = warpalign::testing;
namespace fs = std::filesystem;

namespace {

class Report {
 public:
  /// Records one check; the criterion passes only if every check does.
  void check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    lines_.push_back(std::string(ok ? "    ok   " : "    FAIL ") + what);
  }
  bool ok() const { return ok_; }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  bool ok_ = true;
  std::vector<std::string> lines_;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double beta_cdf(double a, double b, double x) { return boost::math::ibeta(a, b, std::clamp(x, 0.0, 1.0)); }

// 1. Marginal moments of D_theta o id.
void prior_moments_check(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  const WarpPrior prior(PLWarp::identity(), 80, 10.0);
  const std::vector<double> ss{0.25, 0.5, 0.75};
  std::vector<std::vector<double>> xs(ss.size());
  for (int i = 0; i < 10000; ++i) {
    const PLWarp w = sample(prior, rng);
    for (std::size_t k = 0; k < ss.size(); ++k) xs[k].push_back(w.eval(ss[k]));
  }
  for (std::size_t k = 0; k < ss.size(); ++k) {
    const auto st = wt::stats(xs[k]);
    const double s = ss[k], var = s * (1 - s) / 11.0;
    r.check(std::abs(st.mean - s) <= 3 * st.mean_se,
            "s=" + fmt(s) + " mean " + fmt(st.mean, 6) + " (3 SE = " + fmt(3 * st.mean_se) + ")");
    r.check(std::abs(st.variance - var) <= 0.1 * var,
            "s=" + fmt(s) + " variance " + fmt(st.variance) + " vs " + fmt(var) + " (10%)");
  }
  const double secs = seconds_since(t0);
  r.check(secs < 30.0, "runtime " + fmt(secs, 3) + " s < 30 s");
}

// 2. Knot marginals on a supplied partition are Beta(theta H, theta (1 - H)).
void beta_marginal_check(Report& r) {
  Rng rng(1002);
  const double theta = 10.0;
  const PLWarp h = tabulate_cdf([](double t) { return t * t; }, 2001);
  const WarpPrior prior(h, 10, theta);
  const Grid partition({0.0, 0.1, 0.25, 0.4, 0.5, 0.65, 0.8, 0.9, 1.0});
  std::vector<std::vector<double>> xs(partition.size());
  for (int i = 0; i < 10000; ++i) {
    const PLWarp w = sample_on_partition(prior, partition, rng);
    for (std::size_t k = 1; k + 1 < partition.size(); ++k) xs[k].push_back(w.eval(partition[k]));
  }
  for (std::size_t k = 1; k + 1 < partition.size(); ++k) {
    const double hk = h.eval(partition[k]);
    const double d = wt::ks_statistic(xs[k], [&](double x) { return beta_cdf(theta * hk, theta * (1 - hk), x); });
    const double p = wt::ks_pvalue(d, xs[k].size());
    r.check(p > 0.01, "s=" + fmt(partition[k]) + " KS D=" + fmt(d) + " p=" + fmt(p));
  }
}

// 3. Restriction to [a,b] behaves like D_{theta (H(b) - H(a))} o H_restricted.
void subset_invariance_check(Report& r) {
  Rng rng(1003);
  const double theta = 20.0;
  const PLWarp h = tabulate_cdf([](double t) { return t * t; }, 2001);
  const WarpPrior prior(h, 40, theta);
  // a, b and the evaluation points are knots of the supplied partition
  const Grid partition = Grid::uniform(41);
  const double a = partition[8], b = partition[28];
  const std::vector<double> us{0.25, 0.5, 0.75};
  std::vector<std::vector<double>> xs(us.size());
  for (int i = 0; i < 10000; ++i) {
    const PLWarp w = restrict(sample_on_partition(prior, partition, rng), a, b);
    for (std::size_t k = 0; k < us.size(); ++k) xs[k].push_back(w.eval(us[k]));
  }
  const double ha = h.eval(a), hb = h.eval(b);
  for (std::size_t k = 0; k < us.size(); ++k) {
    const double mean = (h.eval(a + us[k] * (b - a)) - ha) / (hb - ha);
    const double var = mean * (1 - mean) / (1 + theta * (hb - ha));
    const auto st = wt::stats(xs[k]);
    r.check(std::abs(st.mean - mean) <= 3 * st.mean_se,
            "u=" + fmt(us[k]) + " mean " + fmt(st.mean) + " vs " + fmt(mean) + " (3 SE = " + fmt(3 * st.mean_se) + ")");
    r.check(std::abs(st.variance - var) <= 3 * st.variance_se,
            "u=" + fmt(us[k]) + " variance " + fmt(st.variance) + " vs " + fmt(var) + " (3 SE = " +
                fmt(3 * st.variance_se) + ")");
  }
}

// 4. Fixed-partition sampling degenerates as the partition refines.
void degeneracy_check(Report& r) {
  Rng rng(1004);
  const std::vector<int> ns{20, 500};
  const auto uni = degeneracy_report(ns, 1.2, PLWarp::identity(), 200, rng);
  r.check(uni[0].median_sup_distance >= 3 * uni[1].median_sup_distance,
          "equi-spaced: median " + fmt(uni[0].median_sup_distance) + " -> " + fmt(uni[1].median_sup_distance) +
              " (factor " + fmt(uni[0].median_sup_distance / uni[1].median_sup_distance, 3) + ")");
  const auto beta = degeneracy_report(ns, 1.2, tabulate_cdf([](double t) { return t * t; }, 2001), 200, rng);
  r.check(beta[0].median_sup_distance >= 3 * beta[1].median_sup_distance,
          "Beta(2,1) partition: median " + fmt(beta[0].median_sup_distance) + " -> " +
              fmt(beta[1].median_sup_distance) + " (factor " +
              fmt(beta[0].median_sup_distance / beta[1].median_sup_distance, 3) + ")");
  std::vector<double> xs;
  for (int i = 0; i < 20000; ++i) xs.push_back(std::sqrt(100.0) * (sample_fixed(100, 1.0, rng).eval(0.5) - 0.5));
  const double v = wt::stats(xs).variance;
  r.check(std::abs(v - 0.25) <= 0.15 * 0.25, "bridge variance at t=0.5, n=100: " + fmt(v) + " vs 0.25 (15%)");
}

// 5. Circular warps.
void circular_check(Report& r) {
  Rng rng(1005);
  const WarpPrior prior(PLWarp::identity(), 20, 10.0);
  int bad_start = 0, bad_wrap = 0;
  const Grid dense = Grid::uniform(4001);
  for (int i = 0; i < 2000; ++i) {
    const auto seeds = i % 2 ? SeedDistribution::uniform() : SeedDistribution::von_mises(rnd::uniform(rng), 5.0);
    const CircularWarp cw = sample_circular(prior, seeds, rng);
    if (std::abs(cw.eval(0.0) - cw.seed()) > 1e-12 && !(cw.seed() == 1.0 && cw.eval(0.0) == 0.0)) ++bad_start;
    // exactly one downward jump of the wrapped map over a dense grid
    int drops = 0;
    double prev = cw.eval(0.0);
    for (std::size_t k = 1; k < dense.size(); ++k) {
      const double v = cw.eval(dense[k]);
      if (v < prev - 0.5) ++drops;
      prev = v;
    }
    const bool whole = cw.seed() == 1.0;
    if (drops != (whole ? 0 : 1)) ++bad_wrap;
  }
  r.check(bad_start == 0, "eval(0) = c for all 2000 sampled circular warps (" + std::to_string(bad_start) + " bad)");
  r.check(bad_wrap == 0, "unique wrap point for all 2000 (" + std::to_string(bad_wrap) + " bad)");
  const CircularWarp sq = make_circular(tabulate_cdf([](double t) { return t * t; }, 10001), 0.94);
  r.check(std::abs(sq.wrap_point() - 0.2449) <= 0.005, "t^2 with c=0.94: t_c = " + fmt(sq.wrap_point(), 6));
}

double enumerate_paths(const Srvf& q1, const Srvf& q2, const std::vector<DpStep>& steps) {
  const int last = static_cast<int>(q1.size()) - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> t{0.0}, y{0.0};
  std::function<void(int, int)> walk = [&](int i, int j) {
    if (i == last && j == last) {
      best = std::min(best, warp_energy(q1, q2, PLWarp(t, y)));
      return;
    }
    for (const auto& s : steps) {
      if (i + s.di > last || j + s.dj > last) continue;
      t.push_back(q1.grid[static_cast<std::size_t>(i + s.di)]);
      y.push_back(q1.grid[static_cast<std::size_t>(j + s.dj)]);
      walk(i + s.di, j + s.dj);
      t.pop_back();
      y.pop_back();
    }
  };
  walk(0, 0);
  return best;
}

// 6. DP equals brute-force path enumeration on 6x6 lattices.
void dp_oracle_check(Report& r) {
  Rng rng(1006);
  const std::vector<DpStep> small{{1, 1}, {1, 2}, {2, 1}};
  double worst_small = 0.0, worst_full = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Srvf a = to_srvf(wt::make_function(6, wt::random_smooth_function(rng)));
    const Srvf b = to_srvf(wt::make_function(6, wt::random_smooth_function(rng)));
    DpConfig cfg;
    cfg.neighborhood = small;
    worst_small = std::max(worst_small, std::abs(dp_align(a, b, cfg).energy - enumerate_paths(a, b, small)));
    worst_full = std::max(worst_full, std::abs(dp_align(a, b).energy - enumerate_paths(a, b, DpConfig{}.neighborhood)));
  }
  r.check(worst_small <= 1e-12, "50 pairs, steps {(1,1),(1,2),(2,1)}: max |DP - enumeration| = " + fmt(worst_small));
  r.check(worst_full <= 1e-12, "50 pairs, default 7 steps: max |DP - enumeration| = " + fmt(worst_full));
}

SaConfig acceptance_sa() {
  SaConfig c;
  c.max_iters = 100000;
  return c;
}

// 7. Simulated annealing.
void sa_check(Report& r) {
  const double e1 = std::exp(-1.0);
  const bool rule = metropolis_accept(1.0, 0.5, 1.0, 0.9999) && metropolis_accept(1.0, 2.0, 1.0, e1 - 1e-12) &&
                    !metropolis_accept(1.0, 2.0, 1.0, e1 + 1e-12) &&
                    std::abs(acceptance_probability(0.0, 3.0, 3.0) - e1) < 1e-15 &&
                    acceptance_probability(2.0, 1.0, 0.1) == 1.0;
  r.check(rule, "acceptance rule exact on fixed tuples");

  const Srvf q1 = to_srvf(fixtures::two_bump(100).first);
  Rng rng(1007);
  const AlignmentResult self = sa_align(q1, q1, acceptance_sa(), rng);
  r.check(sup_distance(self.warp, PLWarp::identity()) <= 0.05,
          "self-alignment: sup distance to identity " + fmt(sup_distance(self.warp, PLWarp::identity())));

  Rng wrng(2007);
  const PLWarp w0 = sample(WarpPrior(PLWarp::identity(), 10, 30.0), wrng);
  const Srvf q2 = warp_action(q1, w0);
  const auto t0 = std::chrono::steady_clock::now();
  const AlignmentResult sa = sa_align(q1, q2, acceptance_sa(), rng);
  const double secs = seconds_since(t0);
  const DpResult dp = dp_align(q1, q2);
  const double sa_d = std::sqrt(sa.final_energy), dp_d = std::sqrt(dp.energy);
  r.check(sa.final_energy < 0.05 * sa.initial_energy, "known warp: SA energy " + fmt(sa.initial_energy) + " -> " +
                                                          fmt(sa.final_energy) + " (" +
                                                          fmt(100 * sa.final_energy / sa.initial_energy, 3) + "% of initial)");
  r.check(sa_d <= 1.1 * dp_d, "known warp: SA distance " + fmt(sa_d) + " vs DP distance " + fmt(dp_d) + " (ratio " +
                                  fmt(sa_d / dp_d, 3) + ", limit 1.1)");
  r.check(secs < 60.0, "SA runtime " + fmt(secs, 3) + " s < 60 s at m=100");
}

// 8. Shape pipeline.
void shape_check(Report& r) {
  Rng rng(1008);
  const auto spirals = fixtures::spirals(100);
  const Srvf s1 = as_shape(to_srvf(spirals.first)), s2 = as_shape(to_srvf(spirals.second));
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m.topLeftCorner(2, 2) = Rotation::planar(0.9).matrix();
  const Rotation o(m);
  const AlignmentResult rot = sa_align_open_shape(s1, rotate(s1, o), acceptance_sa(), rng);
  const double rot_err = (rot.rotation.matrix() - o.matrix().transpose()).operatorNorm();
  r.check(rot_err <= 1e-2, "rotation recovery: operator-norm error " + fmt(rot_err));

  const std::size_t grid = 101;
  const double step = 1.0 / static_cast<double>(grid - 1);
  const Srvf c1 = as_shape(to_srvf(fixtures::closed_shapes(grid).first));
  const Srvf c2 = apply_seed(c1, 0.3);
  const DpClosedResult dp = dp_align_closed(c1, c2);
  r.check(std::abs(dp.seed - 0.7) <= step + 1e-12, "DP seed recovery: " + fmt(dp.seed) + " vs 0.7 (one step " + fmt(step) + ")");
  const AlignmentResult sa = sa_align_closed(c1, c2, acceptance_sa(), rng);
  double gap = std::fmod(std::abs(sa.seed - 0.7), 1.0);
  gap = std::min(gap, 1.0 - gap);
  r.check(gap <= step + 1e-12, "SA seed recovery: " + fmt(sa.seed) + " vs 0.7 (one step " + fmt(step) +
                                  "), final energy " + fmt(sa.final_energy));

  const AlignmentResult sp = sa_align_open_shape(s1, s2, acceptance_sa(), rng);
  const double before = shape_dist(s1, s2), after = shape_dist(s1, apply_alignment(s2, sp));
  r.check(after <= 0.5 * before, "spiral pair: shape distance " + fmt(before) + " -> " + fmt(after) + " (" +
                                     fmt(100 * after / before, 3) + "%)");
}

// 9. Bayesian alignment by importance resampling.
void bayes_check(Report& r) {
  std::vector<double> logw;
  for (double sse : {0.5, 1.0, 2.0}) logw.push_back(marginal_loglik_from_sse(sse, 4, 1.0, 1.0));
  const double raw[] = {std::pow(1.25, -3.0), std::pow(1.5, -3.0), 0.125};
  const double total = raw[0] + raw[1] + raw[2];
  const auto w = normalize_log_weights(logw);
  double err = 0.0;
  for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(w[static_cast<std::size_t>(i)] - raw[i] / total));
  const double two_log2 = marginal_loglik_from_sse(0.0, 2, 1.0, 1.0) - marginal_loglik_from_sse(2.0, 2, 1.0, 1.0);
  r.check(err <= 1e-12 && std::abs(two_log2 - 2 * std::log(2.0)) <= 1e-15,
          "hand-computed weights: max error " + fmt(err) + ", SSE 0 vs 2 gap " + fmt(two_log2, 15));

  Rng rng(1009);
  const auto pair = fixtures::two_bump(100);
  const Srvf q1 = to_srvf(pair.first);
  const PosteriorBand self = posterior_summary(sir_posterior(q1, q1, BayesConfig{}, rng), Grid::uniform(101));
  double sup = 0.0;
  for (std::size_t k = 0; k < self.grid.size(); ++k) sup = std::max(sup, std::abs(self.mean[k] - self.grid[k]));
  r.check(sup <= 0.1, "self-alignment posterior mean (N=20000): sup distance to identity " + fmt(sup));

  LandmarkSet lm;
  {
    std::vector<LandmarkPair> p;
    for (const auto& [a, b] : fixtures::two_bump_peaks()) p.push_back({a, b});
    lm = LandmarkSet(p);
  }
  const ConstrainedResult c = constrained_align(pair.first, pair.second, lm, BayesConfig{}, 1009);
  const Grid g = grid_with_landmarks(Grid::uniform(101), lm);
  const PosteriorBand band = posterior_summary(c.posterior_warps, g);
  double at_landmarks = 0.0, between = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double width = band.upper[k] - band.lower[k];
    for (const auto& p : lm.pairs())
      if (g[k] == p.a) at_landmarks = std::max(at_landmarks, width);
    if (g[k] > lm.pairs()[0].a && g[k] < lm.pairs()[1].a) between = std::max(between, width);
  }
  r.check(at_landmarks < 1e-6, "landmark run: band width at landmarks " + fmt(at_landmarks));
  r.check(between > 0.0, "landmark run: max band width between landmarks " + fmt(between));
}

// 10. Robustness of SA to its tuning constants.
void robustness_check(Report& r) {
  const auto pair = fixtures::two_bump(100);
  const Srvf q1 = to_srvf(pair.first), q2 = to_srvf(pair.second);
  const Grid g = Grid::uniform(101);
  std::vector<std::vector<double>> means;
  std::vector<std::string> names;
  std::uint64_t stream = 0;
  for (int n : {10, 20, 40})
    for (double theta : {50.0, 100.0, 150.0})
      for (double t0 : {5.0, 10.0, 15.0})
        for (double cooling : {1.0001, 1.001}) {
          SaConfig c;
          c.n = n;
          c.theta = theta;
          c.t0 = t0;
          c.cooling = cooling;
          std::vector<double> mean(g.size(), 0.0);
          for (int rep = 0; rep < 20; ++rep) {
            Rng rng = make_stream(1010, stream++);
            const auto v = sa_align(q1, q2, c, rng).warp.eval_on(g);
            for (std::size_t k = 0; k < g.size(); ++k) mean[k] += v[k] / 20.0;
          }
          means.push_back(std::move(mean));
          names.push_back("n=" + std::to_string(n) + " theta=" + fmt(theta) + " T0=" + fmt(t0) + " c=" + fmt(cooling, 6));
        }
  double worst = 0.0;
  std::string where;
  for (std::size_t i = 0; i < means.size(); ++i)
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) d = std::max(d, std::abs(means[i][k] - means[j][k]));
      if (d > worst) {
        worst = d;
        where = names[i] + " vs " + names[j];
      }
    }
  r.check(worst < 0.1, std::to_string(means.size()) + " configs x 20 runs: max pairwise sup distance of mean warps " +
                           fmt(worst) + " (" + where + ")");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> dir_files(const fs::path& d) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(d)) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(WARPALIGN_CLI) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 11. CLI determinism.
void determinism_check(Report& r) {
  const fs::path root = fs::temp_directory_path() / ("warpalign_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path fx = root / "fx";
  if (run_cli("--out " + fx.string() + " fixtures", root / "fx.log") != 0) {
    r.check(false, "fixtures command failed");
    return;
  }
  auto f = [&](const std::string& name) { return (fx / name).string(); };
  const std::string tb = f("two_bump_1.csv") + " " + f("two_bump_2.csv");
  const std::string sp = f("spirals_1.csv") + " " + f("spirals_2.csv");
  const std::string cs = f("closed_shapes_1.csv") + " " + f("closed_shapes_2.csv");
  const std::vector<std::pair<std::string, std::string>> commands{
      {"sample-warps", "sample-warps --n 20 --theta 10 --count 300"},
      {"align-sa", "align-sa " + tb},
      {"align-sa --mode closed", "align-sa --mode closed --iters 5000 " + cs},
      {"align-sa --landmarks", "align-sa --landmarks " + f("two_bump_landmarks.csv") + " " + tb},
      {"align-dp", "align-dp " + tb},
      {"align-dp closed", "align-dp " + cs},
      {"align-bayes", "align-bayes " + tb},
      {"align-bayes --landmarks", "align-bayes --landmarks " + f("two_bump_landmarks.csv") + " " + tb},
      {"geodesic", "geodesic --shape --align dp " + sp},
      {"distance", "distance --align dp " + tb},
      {"degeneracy", "degeneracy --alpha 1.2 --ns 20,100,300,500"},
      {"fixtures", "fixtures"},
  };
  int idx = 0;
  for (const auto& [label, args] : commands) {
    const fs::path a = root / ("a" + std::to_string(idx)), b = root / ("b" + std::to_string(idx));
    ++idx;
    const int ca = run_cli("--seed 11 --out " + a.string() + " " + args, root / "a.log");
    const int cb = run_cli("--seed 11 --out " + b.string() + " " + args, root / "b.log");
    const bool same = ca == 0 && cb == 0 && slurp(root / "a.log") == slurp(root / "b.log") && dir_files(a) == dir_files(b);
    const auto count = ca == 0 ? dir_files(a).size() : 0;
    r.check(same, label + ": " + std::to_string(count) + " files byte-identical across two runs");
  }
  fs::remove_all(root);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Report&)>>> criteria{
      {"prior moments", prior_moments_check},
      {"Beta knot marginals", beta_marginal_check},
      {"subset invariance", subset_invariance_check},
      {"degeneracy of fixed partitions", degeneracy_check},
      {"circular warps", circular_check},
      {"DP oracle equivalence", dp_oracle_check},
      {"SA correctness", sa_check},
      {"shape pipeline", shape_check},
      {"Bayesian SIR", bayes_check},
      {"SA robustness", robustness_check},
      {"CLI determinism", determinism_check},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Report rep;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(rep);
    } catch (const std::exception& e) {
      rep.check(false, std::string("exception: ") + e.what());
    }
    std::cout << "CRITERION " << (i + 1) << " " << (rep.ok() ? "PASS" : "FAIL") << "  " << criteria[i].first << " ("
              << fmt(seconds_since(t0), 3) << " s)\n";
    for (const auto& line : rep.lines()) std::cout << line << "\n";
    std::cout.flush();
    if (!rep.ok()) ++failed;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed\n" : "all criteria passed\n");
  return failed ? 1 : 0;
}
