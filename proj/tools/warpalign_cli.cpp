// warpalign: sample warps, align curves and report distances from the command line.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "warpalign/fixtures.hpp"
#include "warpalign/io.hpp"
#include "warpalign/warpalign.hpp"

namespace fs = std::filesystem;
using namespace warpalign;
using io::json;

namespace {

constexpr int kUsageError = 2;
constexpr int kDataError = 3;
constexpr int kNumericalError = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

unsigned thread_cap() {
  const char* env = std::getenv("WARPALIGN_THREADS");
  if (env == nullptr || *env == '\0') return std::max(1u, std::thread::hardware_concurrency());
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw UsageError("WARPALIGN_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

/// Collects the files a command writes and records them in manifest.json.
class Outputs {
 public:
  Outputs(std::string command, const CLI::App& sub, std::uint64_t seed, const std::string& dir)
      : command_(std::move(command)), dir_(dir) {
    fs::create_directories(dir_);
    for (const auto* opt : sub.get_options()) {
      const std::string name = opt->get_single_name();
      if (name.empty() || name == "help") continue;
      if (opt->count() > 0) {
        const auto& r = opt->results();
        config_[name] = r.size() == 1 ? json(r.front()) : json(r);
      } else if (!opt->get_default_str().empty()) {
        config_[name] = opt->get_default_str();
      } else if (opt->get_expected_max() == 0) {
        config_[name] = false;
      }
    }
    config_["seed"] = std::to_string(seed);
  }

  std::string path(const std::string& name) {
    files_.push_back(name);
    return (dir_ / name).string();
  }

  void finish() const {
    json outputs = json::object();
    for (const auto& f : files_) outputs[f] = "fnv1a64:" + fnv1a_hex(dir_ / f);
    const json manifest{{"command", command_},
                        {"version", kVersion},
                        {"libraries", {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                     std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                     std::to_string(EIGEN_MINOR_VERSION)}}},
                        {"config", config_},
                        {"outputs", outputs}};
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
  }

 private:
  std::string command_;
  fs::path dir_;
  json config_ = json::object();
  std::vector<std::string> files_;
};

struct CurvePairIn {
  Curve first;
  Curve second;
};

CurvePairIn load_pair(const std::string& a, const std::string& b, int grid) {
  Curve c1 = io::load_curve(a);
  Curve c2 = io::load_curve(b);
  if (c1.dim() != c2.dim()) throw DataError("curves have different dimensions");
  if (c1.topology() != c2.topology()) throw DataError("one curve is closed and the other is not");
  if (grid < 3) throw UsageError("--grid must be at least 3");
  return {resample(c1, static_cast<std::size_t>(grid)), resample(c2, static_cast<std::size_t>(grid))};
}

Srvf shape_srvf(const Curve& c) { return as_shape(to_srvf(c)); }

std::string plain_number(double v) {
  std::string s = io::format_double(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void write_csv_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << io::format_double(v);
    first = false;
  }
  out << "\n";
}

SaMode parse_mode(const std::string& s) {
  if (s == "function") return SaMode::function;
  if (s == "open") return SaMode::open_shape;
  if (s == "closed") return SaMode::closed_shape;
  throw UsageError("unknown mode " + s);
}

// ---- commands ----------------------------------------------------------------

struct SampleArgs {
  int n = 20;
  double theta = 10.0;
  int count = 100;
  std::string mean;
  bool fixed = false;
  double alpha = 1.0;
  bool circular = false;
  double seed_center = 0.0;
  double seed_kappa = 0.0;
  int grid = 101;
};

void run_sample(const SampleArgs& a, std::uint64_t seed, Outputs& out) {
  if (a.count < 1) throw UsageError("--count must be positive");
  const PLWarp mean = a.mean.empty() ? PLWarp::identity() : io::load_warp(a.mean);
  const WarpPrior prior(mean, a.n, a.theta);
  const SeedDistribution seeds =
      a.seed_kappa > 0.0 ? SeedDistribution::von_mises(a.seed_center, a.seed_kappa) : SeedDistribution::uniform();
  Rng rng(seed);
  std::vector<PLWarp> warps;
  std::ofstream lines(out.path("warps.jsonl"), std::ios::binary);
  for (int i = 0; i < a.count; ++i) {
    if (a.circular) {
      const auto cw = sample_circular(prior, seeds, rng);
      lines << io::to_json(cw).dump() << "\n";
      warps.push_back(cw.base());
    } else {
      warps.push_back(a.fixed ? sample_fixed(a.n, a.alpha, rng) : sample(prior, rng));
      lines << io::to_json(warps.back()).dump() << "\n";
    }
  }
  lines.close();
  if (a.grid >= 2) {
    const Grid g = Grid::uniform(static_cast<std::size_t>(a.grid));
    std::ofstream csv(out.path("warps_grid.csv"), std::ios::binary);
    csv << "t";
    for (int i = 0; i < a.count; ++i) csv << ",w" << i;
    csv << "\n";
    for (std::size_t k = 0; k < g.size(); ++k) {
      csv << io::format_double(g[k]);
      for (const auto& w : warps) csv << ',' << io::format_double(w.eval(g[k]));
      csv << "\n";
    }
  }
  std::cout << "wrote " << a.count << " warps\n";
}

struct AlignArgs {
  std::string first, second;
  int grid = 100;
  std::string landmarks;
};

struct SaArgs : AlignArgs {
  SaConfig cfg;
  std::string mode = "function";
  bool no_early_stop = false;
};

Curve aligned_curve(const Curve& c2, const AlignmentResult& r) {
  Curve c = c2.closed() && r.seed != 0.0 ? apply_seed(c2, r.seed) : c2;
  c = reparameterize(c, r.warp);
  if (c.dim() > 1 && r.rotation.dim() == c.dim()) c = rotate(c, r.rotation);
  return c;
}

json constrained_json(const ConstrainedResult& r) {
  json segs = json::array();
  for (std::size_t j = 0; j < r.segment_warps.size(); ++j)
    segs.push_back({{"lo", r.breakpoints[j]},
                    {"hi", r.breakpoints[j + 1]},
                    {"partition_size", r.segment_priors[j].partition_size},
                    {"concentration", r.segment_priors[j].concentration},
                    {"energy", r.segment_energies[j]},
                    {"warp", io::to_json(r.segment_warps[j])}});
  return json{{"warp", io::to_json(r.warp)},
              {"prewarp", io::to_json(r.prewarp)},
              {"glued", io::to_json(r.glued)},
              {"energy", r.energy},
              {"segments", segs}};
}

void run_sa(SaArgs a, std::uint64_t seed, unsigned threads, Outputs& out) {
  a.cfg.mode = parse_mode(a.mode);
  a.cfg.early_stop = !a.no_early_stop;
  a.cfg.validate();
  const auto pair = load_pair(a.first, a.second, a.grid);
  if (!a.landmarks.empty()) {
    if (a.cfg.mode != SaMode::function) throw UsageError("--landmarks supports --mode function only");
    const auto lm = io::load_landmarks(a.landmarks);
    const auto r = constrained_align(pair.first, pair.second, lm, a.cfg, seed, threads);
    std::ofstream(out.path("result.json"), std::ios::binary) << constrained_json(r).dump(2) << "\n";
    io::write_warp(out.path("warp.json"), r.warp);
    std::ofstream seg(out.path("segments.csv"), std::ios::binary);
    seg << "segment,lo,hi,energy\n";
    for (std::size_t j = 0; j < r.segment_energies.size(); ++j)
      seg << j << ',' << io::format_double(r.breakpoints[j]) << ',' << io::format_double(r.breakpoints[j + 1]) << ','
          << io::format_double(r.segment_energies[j]) << "\n";
    seg.close();
    io::write_curve(out.path("aligned.csv"), reparameterize(pair.second, r.warp));
    std::cout << "energy " << io::format_double(r.energy) << "\n";
    return;
  }
  Srvf q1 = to_srvf(pair.first);
  Srvf q2 = to_srvf(pair.second);
  if (a.cfg.mode != SaMode::function) {
    q1 = as_shape(std::move(q1));
    q2 = as_shape(std::move(q2));
  }
  if (a.cfg.mode == SaMode::closed_shape && !pair.first.closed())
    throw UsageError("--mode closed needs curves marked '# closed'");
  Rng rng(seed);
  const auto r = align(q1, q2, a.cfg, rng);
  json j = io::to_json(r);
  j["mode"] = a.mode;
  std::ofstream(out.path("result.json"), std::ios::binary) << j.dump(2) << "\n";
  io::write_warp(out.path("warp.json"), r.warp);
  io::write_energy_trace(out.path("energy_trace.csv"), r.energy_trace);
  io::write_curve(out.path("aligned.csv"), aligned_curve(pair.second, r));
  std::cout << "initial " << io::format_double(r.initial_energy) << " final " << io::format_double(r.final_energy)
            << "\n";
}

struct DpArgs : AlignArgs {
  bool shape = false;
  int stride = 1;
};

void run_dp(const DpArgs& a, Outputs& out) {
  DpConfig cfg;
  cfg.grid_size = a.grid;
  cfg.seed_stride = a.stride;
  cfg.validate();
  const auto pair = load_pair(a.first, a.second, a.grid);
  const bool closed = pair.first.closed();
  const bool shape = a.shape || closed;
  Srvf q1 = to_srvf(pair.first);
  Srvf q2 = to_srvf(pair.second);
  if (shape) {
    q1 = as_shape(std::move(q1));
    q2 = as_shape(std::move(q2));
  }
  AlignmentResult r;
  r.initial_energy = warp_energy(q1, q2, PLWarp::identity());
  if (closed) {
    auto d = dp_align_closed(q1, q2, cfg);
    r.seed = d.seed;
    r.warp = std::move(d.warp);
    r.final_energy = d.energy;
  } else {
    auto d = dp_align(q1, q2, cfg);
    r.warp = std::move(d.warp);
    r.final_energy = d.energy;
  }
  r.rotation = Rotation(q1.dim());
  if (shape && q1.dim() > 1) {
    Srvf moved = q2;
    if (closed && r.seed != 0.0) moved = apply_seed(moved, r.seed);
    r.rotation = optimal_rotation(q1, warp_action(moved, r.warp));
  }
  const double aligned = l2_dist(q1, apply_alignment(q2, r));
  io::write_warp(out.path("warp.json"), r.warp);
  json j{{"energy", r.final_energy},
         {"initial_energy", r.initial_energy},
         {"seed", r.seed},
         {"rotation", io::to_json(r.rotation)},
         {"aligned_distance", aligned}};
  std::ofstream(out.path("result.json"), std::ios::binary) << j.dump(2) << "\n";
  std::ofstream csv(out.path("energy.csv"), std::ios::binary);
  csv << "initial_energy,final_energy,aligned_distance\n";
  write_csv_row(csv, {r.initial_energy, r.final_energy, aligned});
  csv.close();
  io::write_curve(out.path("aligned.csv"), aligned_curve(pair.second, r));
  std::cout << "energy " << io::format_double(r.final_energy) << "\n";
}

struct BayesArgs : AlignArgs {
  int n = 20;
  double theta = 10.0;
  BayesConfig cfg;
};

void run_bayes(BayesArgs a, std::uint64_t seed, unsigned threads, Outputs& out) {
  a.cfg.prior = WarpPrior(PLWarp::identity(), a.n, a.theta);
  a.cfg.validate();
  const auto pair = load_pair(a.first, a.second, a.grid);
  PosteriorBand band{pair.first.grid(), PLWarp(), {}, {}, {}};
  json j;
  if (!a.landmarks.empty()) {
    const auto lm = io::load_landmarks(a.landmarks);
    const auto r = constrained_align(pair.first, pair.second, lm, a.cfg, seed, threads);
    band = posterior_summary(std::span<const PLWarp>(r.posterior_warps), grid_with_landmarks(pair.first.grid(), lm));
    j = constrained_json(r);
  } else {
    const Srvf q1 = to_srvf(pair.first);
    const Srvf q2 = to_srvf(pair.second);
    Rng rng(seed);
    const auto post = sir_posterior(q1, q2, a.cfg, rng);
    band = posterior_summary(post, q1.grid);
    j = json{{"ess", post.ess}, {"energy", warp_energy(q1, q2, band.mean_warp)}};
  }
  j["mean_warp"] = io::to_json(band.mean_warp);
  j["draws"] = a.cfg.draws;
  j["resample_size"] = a.cfg.resample_size;
  io::write_warp(out.path("mean_warp.json"), band.mean_warp);
  io::write_band(out.path("band.csv"), band);
  io::write_curve(out.path("aligned.csv"), reparameterize(pair.second, band.mean_warp));
  std::ofstream(out.path("posterior.json"), std::ios::binary) << j.dump(2) << "\n";
  std::cout << "posterior mean written\n";
}

struct PairArgs {
  std::string first, second;
  int grid = 100;
  bool shape = false;
  std::string align = "none";
};

/// SRVFs of the pair, optionally aligned by DP (q2 replaced by its aligned version).
std::pair<Srvf, Srvf> prepared_pair(const PairArgs& a, CurvePairIn& pair) {
  pair = load_pair(a.first, a.second, a.grid);
  const bool shape = a.shape || pair.first.closed();
  Srvf q1 = shape ? shape_srvf(pair.first) : to_srvf(pair.first);
  Srvf q2 = shape ? shape_srvf(pair.second) : to_srvf(pair.second);
  if (a.align == "dp") {
    AlignmentResult r;
    if (pair.first.closed()) {
      auto d = dp_align_closed(q1, q2);
      r.seed = d.seed;
      r.warp = std::move(d.warp);
    } else {
      r.warp = dp_align(q1, q2).warp;
    }
    r.rotation = Rotation(q1.dim());
    if (shape && q1.dim() > 1) {
      const Srvf moved = pair.first.closed() && r.seed != 0.0 ? apply_seed(q2, r.seed) : q2;
      r.rotation = optimal_rotation(q1, warp_action(moved, r.warp));
    }
    q2 = apply_alignment(q2, r);
    pair.second = aligned_curve(pair.second, r);
  } else if (a.align != "none") {
    throw UsageError("--align must be none or dp");
  }
  return {std::move(q1), std::move(q2)};
}

double pair_distance(const Srvf& q1, const Srvf& q2) {
  return q1.is_shape ? shape_dist(q1, q2) : l2_dist(q1, q2);
}

void run_distance(const PairArgs& a, Outputs* out) {
  CurvePairIn pair{io::load_curve(a.first), io::load_curve(a.second)};
  const auto [q1, q2] = prepared_pair(a, pair);
  const double d = pair_distance(q1, q2);
  std::cout << plain_number(d) << "\n";
  if (out != nullptr)
    std::ofstream(out->path("distance.json"), std::ios::binary)
        << json{{"distance", d}, {"shape", q1.is_shape}, {"align", a.align}}.dump(2) << "\n";
}

void run_geodesic(const PairArgs& a, int steps, Outputs& out) {
  CurvePairIn pair{io::load_curve(a.first), io::load_curve(a.second)};
  const auto [q1, q2] = prepared_pair(a, pair);
  const auto path = geodesic(q1, q2, steps);
  const Eigen::RowVectorXd s1 = pair.first.points().row(0);
  const Eigen::RowVectorXd s2 = pair.second.points().row(0);
  std::ofstream summary(out.path("geodesic.csv"), std::ios::binary);
  summary << "step,s,distance_from_start\n";
  for (int i = 0; i < steps; ++i) {
    const double s = static_cast<double>(i) / (steps - 1);
    const Eigen::RowVectorXd start = q1.is_shape ? Eigen::RowVectorXd::Zero(q1.dim()) : Eigen::RowVectorXd((1.0 - s) * s1 + s * s2);
    Srvf q = path[static_cast<std::size_t>(i)];
    q.topology = Topology::open;
    std::ostringstream name;
    name << "geodesic_step_" << std::setw(3) << std::setfill('0') << i << ".csv";
    io::write_curve(out.path(name.str()), from_srvf(q, start));
    summary << i << ',' << io::format_double(s) << ',' << io::format_double(pair_distance(q1, path[static_cast<std::size_t>(i)]))
            << "\n";
  }
  std::cout << "wrote " << steps << " steps\n";
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--ns must be a comma-separated list of integers, got '" + s + "'");
    }
  }
  if (out.empty()) throw UsageError("--ns is empty");
  return out;
}

void run_degeneracy(double alpha, const std::string& ns, int samples, const std::string& partition,
                    std::uint64_t seed, Outputs& out) {
  const auto n_list = parse_int_list(ns);
  PLWarp cdf;
  if (partition == "beta") {
    cdf = tabulate_cdf([](double t) { return t * t; });  // Beta(2,1)
  } else if (partition != "uniform") {
    throw UsageError("--partition must be uniform or beta");
  }
  Rng rng(seed);
  const auto rows = degeneracy_report(n_list, alpha, cdf, samples, rng);
  std::ostringstream csv;
  csv << "n,median_sup_distance\n";
  for (const auto& r : rows) csv << r.n << ',' << io::format_double(r.median_sup_distance) << "\n";
  std::ofstream(out.path("degeneracy.csv"), std::ios::binary) << csv.str();
  std::cout << csv.str();
}

void run_fixtures(int m, Outputs& out) {
  if (m < 3) throw UsageError("--m must be at least 3");
  for (const auto& p : fixtures::all(static_cast<std::size_t>(m))) {
    io::write_curve(out.path(p.name + "_1.csv"), p.first);
    io::write_curve(out.path(p.name + "_2.csv"), p.second);
  }
  std::ofstream lm(out.path("two_bump_landmarks.csv"), std::ios::binary);
  lm << "a,b\n";
  for (const auto& [a, b] : fixtures::two_bump_peaks()) lm << io::format_double(a) << ',' << io::format_double(b) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic curve registration with Dirichlet-process warp priors"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  std::string out_dir;
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  auto* out_opt = app.add_option("--out", out_dir, "output directory");

  SampleArgs sa_args;
  auto* sample_cmd = app.add_subcommand("sample-warps", "sample warps from the prior");
  sample_cmd->add_option("--n", sa_args.n, "partition size")->capture_default_str();
  sample_cmd->add_option("--theta", sa_args.theta, "concentration")->capture_default_str();
  sample_cmd->add_option("--count", sa_args.count, "number of warps")->capture_default_str();
  sample_cmd->add_option("--mean", sa_args.mean, "mean warp JSON (default identity)")->check(CLI::ExistingFile);
  sample_cmd->add_flag("--fixed", sa_args.fixed, "fixed equi-spaced partition with Dirichlet(alpha) increments");
  sample_cmd->add_option("--alpha", sa_args.alpha, "Dirichlet parameter for --fixed")->capture_default_str();
  sample_cmd->add_flag("--circular", sa_args.circular, "sample circular warps");
  sample_cmd->add_option("--seed-center", sa_args.seed_center, "von Mises seed center in [0,1)")->capture_default_str();
  sample_cmd->add_option("--seed-kappa", sa_args.seed_kappa, "von Mises seed concentration (0 = uniform)")
      ->capture_default_str();
  sample_cmd->add_option("--grid", sa_args.grid, "grid size of warps_grid.csv (0 = none)")->capture_default_str();

  SaArgs sa;
  auto* sa_cmd = app.add_subcommand("align-sa", "simulated-annealing alignment");
  sa_cmd->add_option("curve1", sa.first)->required()->check(CLI::ExistingFile);
  sa_cmd->add_option("curve2", sa.second)->required()->check(CLI::ExistingFile);
  sa_cmd->add_option("--n", sa.cfg.n, "proposal partition size")->capture_default_str();
  sa_cmd->add_option("--theta", sa.cfg.theta, "proposal concentration")->capture_default_str();
  sa_cmd->add_option("--t0", sa.cfg.t0, "initial temperature")->capture_default_str();
  sa_cmd->add_option("--cooling", sa.cfg.cooling, "cooling factor")->capture_default_str();
  sa_cmd->add_option("--iters", sa.cfg.max_iters, "iterations")->capture_default_str();
  sa_cmd->add_option("--blend", sa.cfg.blend, "proposal weight against the identity")->capture_default_str();
  sa_cmd->add_option("--mode", sa.mode, "function | open | closed")->capture_default_str();
  sa_cmd->add_option("--kappa", sa.cfg.von_mises_kappa, "von Mises seed concentration")->capture_default_str();
  sa_cmd->add_option("--grid", sa.grid, "resampling size")->capture_default_str();
  sa_cmd->add_option("--landmarks", sa.landmarks, "landmark CSV (a,b)")->check(CLI::ExistingFile);
  sa_cmd->add_flag("--no-early-stop", sa.no_early_stop, "run all iterations");

  DpArgs dp;
  auto* dp_cmd = app.add_subcommand("align-dp", "dynamic-programming alignment");
  dp_cmd->add_option("curve1", dp.first)->required()->check(CLI::ExistingFile);
  dp_cmd->add_option("curve2", dp.second)->required()->check(CLI::ExistingFile);
  dp_cmd->add_option("--grid", dp.grid, "resampling size and lattice size")->capture_default_str();
  dp_cmd->add_option("--stride", dp.stride, "seed search stride for closed curves")->capture_default_str();
  dp_cmd->add_flag("--shape", dp.shape, "normalize to unit-norm SRVFs and fit a rotation");

  BayesArgs by;
  auto* by_cmd = app.add_subcommand("align-bayes", "posterior of the warp by importance resampling");
  by_cmd->add_option("curve1", by.first)->required()->check(CLI::ExistingFile);
  by_cmd->add_option("curve2", by.second)->required()->check(CLI::ExistingFile);
  by_cmd->add_option("--n", by.n, "prior partition size")->capture_default_str();
  by_cmd->add_option("--theta", by.theta, "prior concentration")->capture_default_str();
  by_cmd->add_option("--a0", by.cfg.a0, "precision prior shape")->capture_default_str();
  by_cmd->add_option("--b0", by.cfg.b0, "precision prior rate")->capture_default_str();
  by_cmd->add_option("--draws", by.cfg.draws, "prior draws")->capture_default_str();
  by_cmd->add_option("--resample", by.cfg.resample_size, "resample size")->capture_default_str();
  by_cmd->add_option("--grid", by.grid, "resampling size")->capture_default_str();
  by_cmd->add_option("--landmarks", by.landmarks, "landmark CSV (a,b)")->check(CLI::ExistingFile);

  PairArgs geo;
  int steps = 5;
  auto* geo_cmd = app.add_subcommand("geodesic", "geodesic path between two curves");
  geo_cmd->add_option("curve1", geo.first)->required()->check(CLI::ExistingFile);
  geo_cmd->add_option("curve2", geo.second)->required()->check(CLI::ExistingFile);
  geo_cmd->add_option("--steps", steps, "number of curves on the path")->capture_default_str();
  geo_cmd->add_option("--grid", geo.grid, "resampling size")->capture_default_str();
  geo_cmd->add_flag("--shape", geo.shape, "shape geodesic on the unit sphere");
  geo_cmd->add_option("--align", geo.align, "none | dp")->capture_default_str();

  PairArgs dist;
  auto* dist_cmd = app.add_subcommand("distance", "elastic distance between two curves");
  dist_cmd->add_option("curve1", dist.first)->required()->check(CLI::ExistingFile);
  dist_cmd->add_option("curve2", dist.second)->required()->check(CLI::ExistingFile);
  dist_cmd->add_option("--grid", dist.grid, "resampling size")->capture_default_str();
  dist_cmd->add_flag("--shape", dist.shape, "shape distance (arc length on the unit sphere)");
  dist_cmd->add_option("--align", dist.align, "none | dp")->capture_default_str();

  double alpha = 1.2;
  std::string ns = "20,100,300,500";
  int samples = 200;
  std::string partition = "uniform";
  auto* deg_cmd = app.add_subcommand("degeneracy", "fixed-partition degeneracy report");
  deg_cmd->add_option("--alpha", alpha, "Dirichlet parameter")->capture_default_str();
  deg_cmd->add_option("--ns", ns, "comma-separated partition sizes")->capture_default_str();
  deg_cmd->add_option("--samples", samples, "warps per partition size")->capture_default_str();
  deg_cmd->add_option("--partition", partition, "uniform | beta")->capture_default_str();

  int fixture_m = 100;
  auto* fix_cmd = app.add_subcommand("fixtures", "write the bundled synthetic curves");
  fix_cmd->add_option("--m", fixture_m, "samples per curve")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    const unsigned threads = thread_cap();
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "distance") {
      if (out_opt->count() > 0) {
        Outputs out(name, *sub, seed, out_dir);
        run_distance(dist, &out);
        out.finish();
      } else {
        run_distance(dist, nullptr);
      }
      return 0;
    }
    if (out_dir.empty()) throw UsageError("--out is required for " + name);
    Outputs out(name, *sub, seed, out_dir);
    if (name == "sample-warps") run_sample(sa_args, seed, out);
    else if (name == "align-sa") run_sa(sa, seed, threads, out);
    else if (name == "align-dp") run_dp(dp, out);
    else if (name == "align-bayes") run_bayes(by, seed, threads, out);
    else if (name == "geodesic") run_geodesic(geo, steps, out);
    else if (name == "degeneracy") run_degeneracy(alpha, ns, samples, partition, seed, out);
    else if (name == "fixtures") run_fixtures(fixture_m, out);
    out.finish();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const DomainError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  }
}
