#include "commands.hpp"

#include "qmcpde/estimators.hpp"
#include "qmcpde/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <thread>

namespace qmcpde::cli {

namespace {

constexpr std::uint64_t kTailSeedTag = 0x7461696cULL;  // gv random tail stream

GridSpec grid_from(const RunConfig& cfg) { return GridSpec{cfg.m0, cfg.d}; }

CovarianceModel model_from(const RunConfig& cfg) {
  return CovarianceModel{cfg.sigma2, cfg.lambda, cfg.nu, cfg.d};
}

void check_matches_config(const Embedding& emb, const RunConfig& cfg) {
  if (emb.grid.dim != cfg.d || emb.grid.m0 != cfg.m0 ||
      emb.model.sigma2 != cfg.sigma2 || emb.model.lambda != cfg.lambda ||
      emb.model.nu != cfg.nu)
    throw ConfigError("embedding file does not match the config parameters");
}

BjMode bj_mode_from(const RunConfig& cfg) {
  return cfg.bj_mode == "bound" ? BjMode::bound : BjMode::exact;
}

std::uint64_t tail_seed_from(const RunConfig& cfg) {
  return mix64(mix64(cfg.seed) ^ kTailSeedTag);
}

Mesh mesh_from(const RunConfig& cfg) {
  if (!cfg.mesh_file.empty()) {
    Mesh mesh = load_mesh(cfg.mesh_file);
    if (mesh.dim != cfg.d)
      throw ConfigError("mesh file dimension does not match the config");
    return mesh;
  }
  const Domain domain = cfg.d == 1   ? Domain::unit_interval
                        : cfg.d == 2 ? Domain::unit_square
                                     : Domain::unit_cube;
  return structured_mesh(domain, cfg.effective_mesh_k());
}

std::vector<int> qoi_from(const RunConfig& cfg, const Mesh& mesh) {
  if (cfg.qoi_box.empty()) {
    std::vector<int> all(mesh.num_elements());
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  std::vector<double> lo(cfg.d), hi(cfg.d);
  for (int axis = 0; axis < cfg.d; ++axis) {
    lo[axis] = cfg.qoi_box[2 * axis];
    hi[axis] = cfg.qoi_box[2 * axis + 1];
  }
  std::vector<int> region = elements_in_box(mesh, lo, hi);
  if (region.empty())
    throw ConfigError("qoi box contains no element centroid");
  return region;
}

ProblemInstance make_instance(const RunConfig& cfg, Embedding emb,
                              const BjResult& bj) {
  ProblemInstance p;
  p.mean.assign(emb.grid.num_points(), cfg.mean);
  p.mesh = mesh_from(cfg);
  p.qoi_elements = qoi_from(cfg, p.mesh);
  p.coord_order = bj.order;
  p.embedding = std::move(emb);
  return p;
}

std::vector<double> sorted_b(const BjResult& bj) {
  std::vector<double> b(bj.order.size());
  for (std::size_t r = 0; r < bj.order.size(); ++r) b[r] = bj.b[bj.order[r]];
  return b;
}

void emit_csv(const RunConfig& cfg, const std::vector<StudyRow>& rows) {
  if (cfg.csv_file.empty()) {
    write_csv(std::cout, rows);
    return;
  }
  std::ofstream os(cfg.csv_file);
  if (!os) throw ConfigError("cannot open csv output " + cfg.csv_file);
  write_csv(os, rows);
  std::cout << "wrote " << cfg.csv_file << "\n";
}

StudyMeta meta_from(const RunConfig& cfg, const Embedding& emb) {
  return StudyMeta{cfg.d,    cfg.m0,    cfg.lambda,
                   cfg.nu,   emb.size(), cfg.effective_mesh_k()};
}

int effective_workers(const RunConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int cmd_embed(const RunConfig& cfg) {
  if (cfg.embedding_file.empty())
    throw ConfigError("embed: set [output] embedding = <path>");

  const GrowthMode growth = cfg.growth == "doubling" ? GrowthMode::doubling
                                                     : GrowthMode::increment;
  const Embedding emb = minimal_embedding(grid_from(cfg), model_from(cfg),
                                          cfg.effective_m_cap(), growth);
  save_embedding(emb, cfg.embedding_file);

  const auto [vmin, vmax] =
      std::minmax_element(emb.eigenvalues.begin(), emb.eigenvalues.end());
  std::printf("m %d\n", emb.m);
  std::printf("ell %.12g\n", emb.edge_length());
  std::printf("s %lld\n", static_cast<long long>(emb.size()));
  std::printf("min_eigenvalue %.12g\n", *vmin);
  std::printf("max_eigenvalue %.12g\n", *vmax);
  std::printf("criterion_p0.75 %.12g\n", qmc_criterion(emb, 0.75));
  std::printf("criterion_p1.00 %.12g\n", qmc_criterion(emb, 1.0));
  std::printf("wrote %s\n", cfg.embedding_file.c_str());
  return 0;
}

int cmd_cbc(const RunConfig& cfg) {
  if (cfg.embedding_file.empty())
    throw ConfigError("cbc: set [output] embedding = <path>");
  if (cfg.gv_file.empty())
    throw ConfigError("cbc: set [output] gv = <path>");

  const Embedding emb = load_embedding(cfg.embedding_file);
  check_matches_config(emb, cfg);

  const BjResult bj = compute_bj(emb, bj_mode_from(cfg));
  const WeightSetup w = make_weight_setup(sorted_b(bj), cfg.kappa);
  const GeneratingVector gv =
      cbc_construct(static_cast<int>(cfg.n), static_cast<int>(emb.size()), w,
                    tail_seed_from(cfg));
  save_generating_vector(gv, cfg.gv_file);

  std::printf("n %d\n", gv.n);
  std::printf("s %d\n", gv.dim());
  std::printf("sstar %d\n", gv.cbc_prefix);
  std::printf("wrote %s\n", cfg.gv_file.c_str());
  return 0;
}

int cmd_run(const RunConfig& cfg) {
  if (cfg.embedding_file.empty())
    throw ConfigError("run: set [output] embedding = <path>");
  Embedding emb = load_embedding(cfg.embedding_file);
  check_matches_config(emb, cfg);

  const BjResult bj = compute_bj(emb, bj_mode_from(cfg));
  const StudyMeta meta = meta_from(cfg, emb);
  const int workers = effective_workers(cfg);

  std::vector<StudyRow> rows;
  if (cfg.method == "qmc") {
    if (cfg.gv_file.empty()) throw ConfigError("run: set [output] gv = <path>");
    const GeneratingVector gv = load_generating_vector(cfg.gv_file);
    if (gv.dim() != emb.size())
      throw ConfigError("run: generating vector dimension != s");
    if (gv.b_hash != hash_doubles(sorted_b(bj)))
      throw ConfigError("run: generating vector was built for different b_j");
    const ProblemInstance p = make_instance(cfg, std::move(emb), bj);
    const std::int64_t schedule[] = {gv.n};
    rows = convergence_study(
        p, Method::qmc, schedule, cfg.q, cfg.seed, meta,
        [&gv](std::int64_t) -> const GeneratingVector& { return gv; }, workers);
  } else {
    const ProblemInstance p = make_instance(cfg, std::move(emb), bj);
    const std::int64_t schedule[] = {cfg.mc_samples};
    rows = convergence_study(p, Method::mc, schedule, cfg.q, cfg.seed, meta,
                             {}, workers);
  }
  emit_csv(cfg, rows);
  return 0;
}

int cmd_study(const RunConfig& cfg) {
  if (cfg.embedding_file.empty())
    throw ConfigError("study: set [output] embedding = <path>");
  Embedding emb = load_embedding(cfg.embedding_file);
  check_matches_config(emb, cfg);

  const BjResult bj = compute_bj(emb, bj_mode_from(cfg));
  const StudyMeta meta = meta_from(cfg, emb);
  const int workers = effective_workers(cfg);
  const int s = static_cast<int>(emb.size());

  std::vector<StudyRow> rows;
  if (cfg.method == "qmc") {
    if (cfg.n_schedule.empty())
      throw ConfigError("study: set [estimate] n_schedule for qmc");
    const WeightSetup w = make_weight_setup(sorted_b(bj), cfg.kappa);
    const std::uint64_t tail = tail_seed_from(cfg);
    std::map<std::int64_t, GeneratingVector> cache;
    const ProblemInstance p = make_instance(cfg, std::move(emb), bj);
    rows = convergence_study(
        p, Method::qmc, cfg.n_schedule, cfg.q, cfg.seed, meta,
        [&](std::int64_t n) -> const GeneratingVector& {
          auto it = cache.find(n);
          if (it == cache.end())
            it = cache.emplace(n, cbc_construct(static_cast<int>(n), s, w, tail))
                     .first;
          return it->second;
        },
        workers);
  } else {
    if (cfg.N_schedule.empty())
      throw ConfigError("study: set [estimate] N_schedule for mc");
    const ProblemInstance p = make_instance(cfg, std::move(emb), bj);
    rows = convergence_study(p, Method::mc, cfg.N_schedule, cfg.q, cfg.seed,
                             meta, {}, workers);
  }
  emit_csv(cfg, rows);
  return 0;
}

}  // namespace qmcpde::cli
