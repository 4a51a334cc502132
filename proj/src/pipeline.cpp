#include "cake/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cake/cube_io.hpp"
#include "cake/ripcheck.hpp"

namespace cake {

namespace fs = std::filesystem;
using nlohmann::json;

// --- seeds ---------------------------------------------------------------

std::uint64_t ExperimentConfig::scene_seed() const {
  return seed_override ? *seed_override : scene.seed;
}

std::uint64_t ExperimentConfig::family_seed(MaskFamily f) const {
  const std::uint64_t base = seed_override ? *seed_override + 1000 : mask_seed;
  return base + std::uint64_t(f) * 7919;
}

std::uint64_t ExperimentConfig::noise_seed() const {
  return seed_override ? *seed_override + 2000 : noise.seed;
}

bool ExperimentConfig::has_family(MaskFamily f) const {
  return std::find(families.begin(), families.end(), f) != families.end();
}

// --- config parsing --------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

struct RawConfig {
  // (section, key, value) triples in file order
  std::vector<std::tuple<std::string, std::string, std::string>> entries;

  const std::string* find(const std::string& sec, const std::string& key) const {
    const std::string* hit = nullptr;
    for (const auto& [s, k, v] : entries)
      if (s == sec && k == key) hit = &v;
    return hit;
  }
  std::vector<std::string> all(const std::string& sec,
                               const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [s, k, v] : entries)
      if (s == sec && k == key) out.push_back(v);
    return out;
  }
};

RawConfig parse_raw(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config: " + path);
  RawConfig raw;
  std::string line, section;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    raw.entries.emplace_back(section, trim(line.substr(0, eq)),
                             trim(line.substr(eq + 1)));
  }
  return raw;
}

double to_double(const std::string& v, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value '" + v + "' for " + what);
  }
}

std::int64_t to_int(const std::string& v, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value '" + v + "' for " + what);
  }
}

MaskFamily parse_family(const std::string& name) {
  if (name == "rademacher") return MaskFamily::Rademacher;
  if (name == "phase_shift") return MaskFamily::PhaseShift;
  if (name == "dsm") return MaskFamily::Dsm;
  throw ConfigError("config: unknown mask family '" + name + "'");
}

}  // namespace

std::string family_tag(MaskFamily f) {
  switch (f) {
    case MaskFamily::Rademacher: return "rademacher";
    case MaskFamily::PhaseShift: return "phase_shift";
    case MaskFamily::Dsm: return "dsm";
  }
  return "unknown";
}

ExperimentConfig load_config(const std::string& path) {
  const RawConfig raw = parse_raw(path);
  ExperimentConfig cfg = default_config();

  auto geti = [&](const char* sec, const char* key, int fallback) {
    const std::string* v = raw.find(sec, key);
    return v ? int(to_int(*v, std::string(sec) + "." + key)) : fallback;
  };
  auto getd = [&](const char* sec, const char* key, double fallback) {
    const std::string* v = raw.find(sec, key);
    return v ? to_double(*v, std::string(sec) + "." + key) : fallback;
  };
  auto getu = [&](const char* sec, const char* key, std::uint64_t fallback) {
    const std::string* v = raw.find(sec, key);
    return v ? std::uint64_t(to_int(*v, std::string(sec) + "." + key))
             : fallback;
  };

  try {
    cfg.geometry = make_geometry(
        geti("geometry", "n1", cfg.geometry.n1),
        geti("geometry", "n2", cfg.geometry.n2),
        geti("geometry", "frames", cfg.geometry.N),
        geti("geometry", "d1", cfg.geometry.d1),
        geti("geometry", "d2", cfg.geometry.d2),
        geti("geometry", "block", cfg.geometry.B));
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  // scene
  cfg.scene.seed = getu("scene", "seed", cfg.scene.seed);
  if (const std::string* bg = raw.find("scene", "background")) {
    std::istringstream ss(*bg);
    std::string kind;
    ss >> kind;
    if (kind == "none") {
      cfg.scene.background = SceneSpec::Background::None;
    } else if (kind == "const") {
      cfg.scene.background = SceneSpec::Background::Constant;
      ss >> cfg.scene.bg_value;
    } else if (kind == "blobs") {
      cfg.scene.background = SceneSpec::Background::Blobs;
      ss >> cfg.scene.blob_count >> cfg.scene.blob_amp;
    } else if (kind == "image") {
      cfg.scene.background = SceneSpec::Background::Image;
      std::string img_path;
      ss >> img_path;
      if (img_path.empty())
        throw ConfigError("config: background image needs a path");
      try {
        read_pgm(img_path, cfg.scene.bg_image, cfg.scene.bg_rows,
                 cfg.scene.bg_cols);
      } catch (const FormatError& e) {
        throw ConfigError(std::string("config: background image: ") + e.what());
      }
    } else {
      throw ConfigError("config: unknown background '" + kind + "'");
    }
    if (ss.fail()) throw ConfigError("config: malformed background line");
  }
  if (const std::string* dr = raw.find("scene", "bg_drift")) {
    std::istringstream ss(*dr);
    ss >> cfg.scene.bg_vr >> cfg.scene.bg_vc;
    if (ss.fail()) throw ConfigError("config: malformed bg_drift line");
  }
  {
    auto objected = raw.all("scene", "object");
    if (!objected.empty()) cfg.scene.objects.clear();
    for (const std::string& line : objected) {
      std::istringstream ss(line);
      std::string kind;
      ss >> kind;
      SceneObject obj;
      if (kind == "rect") {
        obj.kind = SceneObject::Kind::Rect;
        ss >> obj.r0 >> obj.c0 >> obj.height >> obj.width >> obj.vr >> obj.vc >>
            obj.intensity;
      } else if (kind == "disc") {
        obj.kind = SceneObject::Kind::Disc;
        ss >> obj.r0 >> obj.c0 >> obj.radius >> obj.vr >> obj.vc >>
            obj.intensity;
      } else {
        throw ConfigError("config: unknown object kind '" + kind + "'");
      }
      if (ss.fail()) throw ConfigError("config: malformed object line");
      cfg.scene.objects.push_back(obj);
    }
  }

  // masks
  if (const std::string* fams = raw.find("masks", "families")) {
    cfg.families.clear();
    std::istringstream ss(*fams);
    std::string name;
    while (std::getline(ss, name, ',')) {
      name = trim(name);
      if (!name.empty()) cfg.families.push_back(parse_family(name));
    }
    if (cfg.families.empty())
      throw ConfigError("config: masks.families is empty");
  }
  cfg.mask_seed = getu("masks", "seed", cfg.mask_seed);
  cfg.alpha = getd("masks", "alpha", cfg.alpha);
  cfg.beta = getd("masks", "beta", cfg.beta);

  // acquire
  if (const std::string* ds = raw.find("acquire", "downsampler")) {
    if (*ds == "subsample") cfg.downsampler = Downsampler::Subsample;
    else if (*ds == "integrate") cfg.downsampler = Downsampler::Integrate;
    else if (*ds == "demod") cfg.downsampler = Downsampler::RandomDemod;
    else if (*ds == "demod01") cfg.downsampler = Downsampler::RandomDemodBinary;
    else throw ConfigError("config: unknown downsampler '" + *ds + "'");
  }
  cfg.demod_seed = getu("acquire", "demod_seed", cfg.demod_seed);
  if (const std::string* nz = raw.find("acquire", "noise")) {
    std::istringstream ss(*nz);
    std::string kind;
    ss >> kind;
    if (kind == "none") {
      cfg.noise = NoiseModel::none();
    } else if (kind == "gaussian") {
      double sigma = 0.0;
      std::uint64_t seed = 0;
      ss >> sigma >> seed;
      if (ss.fail()) throw ConfigError("config: malformed noise line");
      if (sigma < 0) throw ConfigError("config: noise sigma must be >= 0");
      cfg.noise = NoiseModel::gaussian(sigma, seed);
    } else {
      throw ConfigError("config: unknown noise kind '" + kind + "'");
    }
  }

  // solver
  cfg.tvl1.tau_tv = getd("solver", "tau_tv", cfg.tvl1.tau_tv);
  cfg.tvl1.tau_l1 = getd("solver", "tau_l1", cfg.tvl1.tau_l1);
  cfg.tvl1.max_iters = geti("solver", "max_iters", cfg.tvl1.max_iters);
  cfg.tvl1.obj_tol = getd("solver", "obj_tol", cfg.tvl1.obj_tol);
  cfg.tvl1.tv_inner_iters =
      geti("solver", "tv_inner_iters", cfg.tvl1.tv_inner_iters);
  cfg.flow_solver.eps_data = getd("solver", "eps1", cfg.flow_solver.eps_data);
  cfg.flow_solver.eps_flow = getd("solver", "eps2", cfg.flow_solver.eps_flow);
  cfg.flow_solver.max_iters =
      geti("solver", "of_max_iters", cfg.flow_solver.max_iters);
  cfg.flow_solver.max_matvec =
      geti("solver", "of_max_matvec", cfg.flow_solver.max_matvec);
  cfg.flow_solver.wavelet_levels =
      geti("solver", "wavelet_levels", cfg.flow_solver.wavelet_levels);

  // flow estimation
  cfg.flow_estimation.lambda = getd("flow", "lambda", cfg.flow_estimation.lambda);
  cfg.flow_estimation.levels = geti("flow", "levels", cfg.flow_estimation.levels);
  cfg.flow_estimation.iterations =
      geti("flow", "iterations", cfg.flow_estimation.iterations);

  // metrics
  if (const std::string* roi = raw.find("metrics", "roi")) {
    std::istringstream ss(*roi);
    ss >> cfg.roi.r0 >> cfg.roi.c0 >> cfg.roi.height >> cfg.roi.width;
    if (ss.fail()) throw ConfigError("config: malformed roi line");
  } else if (cfg.roi.empty()) {
    cfg.roi = {0, 0, cfg.geometry.n1, cfg.geometry.n2};
  }
  cfg.discount_blocks =
      geti("metrics", "discount_blocks", cfg.discount_blocks);

  // ripcheck
  cfg.rip_trials = geti("ripcheck", "trials", cfg.rip_trials);
  cfg.rip_delta_d = getd("ripcheck", "delta_d", cfg.rip_delta_d);
  cfg.rip_delta_o = getd("ripcheck", "delta_o", cfg.rip_delta_o);
  cfg.rip_s = geti("ripcheck", "s", cfg.rip_s);
  cfg.rip_seed = getu("ripcheck", "seed", cfg.rip_seed);
  try {
    cfg.rip_geometry = make_geometry(
        geti("ripcheck", "n1", cfg.rip_geometry.n1),
        geti("ripcheck", "n2", cfg.rip_geometry.n2),
        geti("ripcheck", "b", cfg.rip_geometry.B),
        geti("ripcheck", "d1", cfg.rip_geometry.d1),
        geti("ripcheck", "d2", cfg.rip_geometry.d2),
        geti("ripcheck", "b", cfg.rip_geometry.B));
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("config: ripcheck geometry: ") + e.what());
  }

  if (const std::string* dir = raw.find("output", "dir")) cfg.out_dir = *dir;

  // default ROI must fit the configured geometry
  if (cfg.roi.r0 + cfg.roi.height > cfg.geometry.n1 ||
      cfg.roi.c0 + cfg.roi.width > cfg.geometry.n2)
    throw ConfigError("config: roi exceeds frame bounds");
  return cfg;
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.geometry = make_geometry(64, 64, 32, 2, 2, 4);

  cfg.scene.seed = 7;
  cfg.scene.background = SceneSpec::Background::Blobs;
  cfg.scene.blob_count = 8;
  cfg.scene.blob_amp = 0.35;
  SceneObject a;
  a.kind = SceneObject::Kind::Rect;
  a.r0 = 8; a.c0 = 6; a.height = 10; a.width = 8;
  a.vr = 0.5; a.vc = 0.9; a.intensity = 0.55;
  SceneObject b;
  b.kind = SceneObject::Kind::Disc;
  b.r0 = 40; b.c0 = 44; b.radius = 5.5;
  b.vr = -0.7; b.vc = 0.55; b.intensity = 0.7;
  SceneObject c;
  c.kind = SceneObject::Kind::Rect;
  c.r0 = 44; c.c0 = 14; c.height = 6; c.width = 12;
  c.vr = 0.9; c.vc = -0.5; c.intensity = 0.45;
  cfg.scene.objects = {a, b, c};

  cfg.families = {MaskFamily::Rademacher, MaskFamily::Dsm};
  cfg.mask_seed = 101;
  cfg.alpha = 0.383;
  cfg.beta = 0.924;

  cfg.downsampler = Downsampler::Subsample;
  cfg.noise = NoiseModel::none();

  cfg.roi = {0, 0, 64, 64};
  cfg.discount_blocks = 1;

  cfg.rip_geometry = make_geometry(16, 16, 2, 2, 2, 2);
  cfg.rip_trials = 1000;

  cfg.out_dir = "out";
  return cfg;
}

// --- artifact naming ---------------------------------------------------------

static std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string scene_path(const ExperimentConfig& c) {
  return join(c.out_dir, "scene.vcub");
}
std::string masks_path(const ExperimentConfig& c, MaskFamily f) {
  return join(c.out_dir, "masks_" + family_tag(f) + ".msks");
}
std::string measurement_path(const ExperimentConfig& c, MaskFamily f) {
  return join(c.out_dir, "meas_" + family_tag(f) + ".vcub");
}
std::string coarse_path(const ExperimentConfig& c) {
  return join(c.out_dir, "coarse.vcub");
}
std::string coarse_up_path(const ExperimentConfig& c) {
  return join(c.out_dir, "coarse_up.vcub");
}
std::string flow_path(const ExperimentConfig& c) {
  return join(c.out_dir, "flow.flow");
}
std::string recon_path(const ExperimentConfig& c, const std::string& label) {
  return join(c.out_dir, "recon_" + label + ".vcub");
}
std::string metrics_path(const ExperimentConfig& c) {
  return join(c.out_dir, "metrics.txt");
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw StageDependencyError("missing file: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[65536];
  while (f.read(buf, sizeof buf) || f.gcount() > 0) {
    const std::streamsize got = f.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= std::uint8_t(buf[i]);
      h *= 1099511628211ull;
    }
    if (!f) break;
  }
  return h;
}

// --- manifest ------------------------------------------------------------------

namespace {

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["geometry"] = {{"n1", c.geometry.n1}, {"n2", c.geometry.n2},
                   {"frames", c.geometry.N}, {"d1", c.geometry.d1},
                   {"d2", c.geometry.d2}, {"block", c.geometry.B}};
  j["scene_seed"] = c.scene_seed();
  j["mask_seed"] = c.seed_override ? *c.seed_override + 1000 : c.mask_seed;
  j["noise_seed"] = c.noise_seed();
  j["demod_seed"] = c.demod_seed;
  j["ripcheck_seed"] = c.rip_seed;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["noise_sigma"] = c.noise.sigma;
  j["tau_tv"] = c.tvl1.tau_tv;
  j["tau_l1"] = c.tvl1.tau_l1;
  j["eps1"] = c.flow_solver.eps_data;
  j["eps2"] = c.flow_solver.eps_flow;
  j["flow_lambda"] = c.flow_estimation.lambda;
  j["flow_levels"] = c.flow_estimation.levels;
  j["flow_iterations"] = c.flow_estimation.iterations;
  j["roi"] = {c.roi.r0, c.roi.c0, c.roi.height, c.roi.width};
  j["discount_blocks"] = c.discount_blocks;
  std::vector<std::string> fams;
  for (auto f : c.families) fams.push_back(family_tag(f));
  j["families"] = fams;
  return j;
}

void manifest_update(const ExperimentConfig& cfg, const std::string& stage,
                     const std::vector<std::string>& outputs) {
  const std::string path = join(cfg.out_dir, "manifest.json");
  json m;
  {
    std::ifstream f(path);
    if (f) {
      try {
        f >> m;
      } catch (...) {
        m = json::object();
      }
    }
  }
  m["config"] = config_to_json(cfg);
  json files = m.contains("files") ? m["files"] : json::object();
  for (const std::string& out : outputs) {
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  (unsigned long long)fnv1a64_file(out));
    files[fs::path(out).filename().string()] = hex;
  }
  m["files"] = files;
  json stages = m.contains("stages") ? m["stages"] : json::array();
  stages.push_back(stage);
  m["stages"] = stages;
  std::ofstream f(path, std::ios::trunc);
  f << m.dump(2) << "\n";
}

void require_file(const std::string& path) {
  if (!fs::exists(path))
    throw StageDependencyError("missing upstream artifact: " + path);
}

MaskSequence load_family_masks(const ExperimentConfig& cfg, MaskFamily f) {
  const std::string path = masks_path(cfg, f);
  require_file(path);
  MaskSequence seq = read_masks(path);
  if (!(seq.geometry == cfg.geometry))
    throw ConfigError("mask file geometry differs from config: " + path);
  return seq;
}

}  // namespace

// --- stages ----------------------------------------------------------------------

std::string cmd_synth(const ExperimentConfig& cfg, bool dump_pgm) {
  fs::create_directories(cfg.out_dir);
  SceneSpec spec = cfg.scene;
  spec.seed = cfg.scene_seed();
  VideoCube scene = synth_scene(spec, cfg.geometry);
  write_cube(scene, scene_path(cfg));
  if (dump_pgm) dump_pgm_frames(scene, join(cfg.out_dir, "scene"));
  manifest_update(cfg, "synth", {scene_path(cfg)});
  char buf[128];
  std::snprintf(buf, sizeof buf, "synth: wrote %dx%dx%d scene", cfg.geometry.N,
                cfg.geometry.n1, cfg.geometry.n2);
  return buf;
}

std::string cmd_masks(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::vector<std::string> outputs;
  for (MaskFamily f : cfg.families) {
    MaskSequence seq;
    const std::uint64_t seed = cfg.family_seed(f);
    switch (f) {
      case MaskFamily::Rademacher:
        seq = gen_rademacher(cfg.geometry, seed);
        break;
      case MaskFamily::PhaseShift:
        seq = gen_phase_shift_sequence(cfg.geometry, seed);
        break;
      case MaskFamily::Dsm:
        seq = gen_dsm(cfg.geometry, cfg.alpha, cfg.beta, seed);
        break;
    }
    write_masks(seq, masks_path(cfg, f));
    outputs.push_back(masks_path(cfg, f));
  }
  manifest_update(cfg, "masks", outputs);
  return "masks: wrote " + std::to_string(outputs.size()) + " sequence(s)";
}

std::string cmd_acquire(const ExperimentConfig& cfg) {
  require_file(scene_path(cfg));
  VideoCube scene = read_cube(scene_path(cfg));
  require_scene_shape(scene, cfg.geometry);
  std::vector<std::string> outputs;
  NoiseModel noise = cfg.noise;
  noise.seed = cfg.noise_seed();
  for (MaskFamily f : cfg.families) {
    MaskSequence masks = load_family_masks(cfg, f);
    CakeOperator op(masks, cfg.downsampler, cfg.demod_seed);
    VideoCube y = op.forward(scene, noise);
    write_cube(y, measurement_path(cfg, f));
    outputs.push_back(measurement_path(cfg, f));
  }
  manifest_update(cfg, "acquire", outputs);
  return "acquire: wrote " + std::to_string(outputs.size()) +
         " measurement cube(s)";
}

std::string cmd_coarse(const ExperimentConfig& cfg) {
  MaskSequence masks = load_family_masks(cfg, MaskFamily::Dsm);
  require_file(measurement_path(cfg, MaskFamily::Dsm));
  VideoCube y = read_cube(measurement_path(cfg, MaskFamily::Dsm));
  VideoCube coarse = coarse_estimate(y, masks);
  write_cube(coarse, coarse_path(cfg));
  manifest_update(cfg, "coarse", {coarse_path(cfg)});
  return "coarse: wrote closed-form dual-scale estimate";
}

std::string cmd_flow(const ExperimentConfig& cfg) {
  require_file(coarse_path(cfg));
  VideoCube coarse = read_cube(coarse_path(cfg));
  VideoCube up = upsample_coarse(coarse, cfg.geometry);
  write_cube(up, coarse_up_path(cfg));
  FlowField flow = estimate_flow_sequence(up, cfg.flow_estimation);
  write_flow(flow, flow_path(cfg));
  manifest_update(cfg, "flow", {coarse_up_path(cfg), flow_path(cfg)});
  return "flow: wrote upsampled coarse cube and flow field";
}

namespace {

void write_report(const ExperimentConfig& cfg, const std::string& label,
                  const SolverReport& report) {
  std::ofstream f(join(cfg.out_dir, "report_" + label + ".txt"),
                  std::ios::trunc);
  f << report.to_log() << "summary\n" << report.summary();
}

}  // namespace

std::string cmd_recon(const ExperimentConfig& cfg, const std::string& method,
                      bool dump_pgm) {
  std::vector<std::string> outputs;
  std::string status;

  if (method == "spline") {
    require_file(scene_path(cfg));
    VideoCube scene = read_cube(scene_path(cfg));
    NoiseModel noise = cfg.noise;
    noise.seed = cfg.noise_seed() + 17;
    VideoCube conv = conventional_baseline(scene, cfg.geometry, noise);
    write_cube(conv, join(cfg.out_dir, "conv.vcub"));
    VideoCube est = spline_baseline(conv, cfg.geometry);
    write_cube(est, recon_path(cfg, "spline"));
    if (dump_pgm) dump_pgm_frames(est, join(cfg.out_dir, "recon_spline"));
    outputs = {join(cfg.out_dir, "conv.vcub"), recon_path(cfg, "spline")};
    status = "recon spline: wrote conventional baseline";
  } else if (method == "tvl1") {
    for (MaskFamily f : cfg.families) {
      MaskSequence masks = load_family_masks(cfg, f);
      require_file(measurement_path(cfg, f));
      VideoCube y = read_cube(measurement_path(cfg, f));
      CakeOperator op(masks, cfg.downsampler, cfg.demod_seed);
      auto [est, report] = reconstruct_tv_l1(op, y, cfg.tvl1);
      const std::string label = "tvl1_" + family_tag(f);
      write_cube(est, recon_path(cfg, label));
      write_report(cfg, label, report);
      if (dump_pgm)
        dump_pgm_frames(est, join(cfg.out_dir, "recon_" + label));
      outputs.push_back(recon_path(cfg, label));
    }
    status = "recon tvl1: wrote " + std::to_string(outputs.size()) +
             " estimate(s)";
  } else if (method == "of") {
    MaskSequence masks = load_family_masks(cfg, MaskFamily::Dsm);
    require_file(measurement_path(cfg, MaskFamily::Dsm));
    require_file(flow_path(cfg));
    VideoCube y = read_cube(measurement_path(cfg, MaskFamily::Dsm));
    FlowField flow = read_flow(flow_path(cfg));
    MotionOperator motion(flow);
    CakeOperator op(masks, cfg.downsampler, cfg.demod_seed);
    auto [est, report] =
        reconstruct_optical_flow(op, y, motion, cfg.flow_solver);
    write_cube(est, recon_path(cfg, "of"));
    write_report(cfg, "of", report);
    if (dump_pgm) dump_pgm_frames(est, join(cfg.out_dir, "recon_of"));
    outputs = {recon_path(cfg, "of")};
    status = "recon of: wrote flow-constrained estimate";
  } else if (method == "coarse-only") {
    require_file(coarse_path(cfg));
    VideoCube coarse = read_cube(coarse_path(cfg));
    VideoCube est = upsample_coarse(coarse, cfg.geometry);
    write_cube(est, recon_path(cfg, "coarse"));
    if (dump_pgm) dump_pgm_frames(est, join(cfg.out_dir, "recon_coarse"));
    outputs = {recon_path(cfg, "coarse")};
    status = "recon coarse-only: wrote upsampled coarse preview";
  } else {
    throw ConfigError("unknown recon method '" + method + "'");
  }

  manifest_update(cfg, "recon:" + method, outputs);
  return status;
}

std::string cmd_metrics(const ExperimentConfig& cfg) {
  require_file(scene_path(cfg));
  VideoCube truth = read_cube(scene_path(cfg));
  const FrameRange range = FrameRange::discount_blocks(
      cfg.geometry.N, cfg.geometry.B, cfg.discount_blocks);

  const std::vector<std::pair<std::string, std::string>> rows = {
      {"spline", recon_path(cfg, "spline")},
      {"cake", recon_path(cfg, "tvl1_rademacher")},
      {"dsm-cake", recon_path(cfg, "tvl1_dsm")},
      {"of-cake", recon_path(cfg, "of")},
  };
  std::string table = "# method rmse_percent\n";
  for (const auto& [label, path] : rows) {
    require_file(path);
    VideoCube est = read_cube(path);
    const double rmse = rmse_percent(est, truth, cfg.roi, range);
    char line[96];
    std::snprintf(line, sizeof line, "%s %.6f\n", label.c_str(), rmse);
    table += line;
  }
  std::ofstream f(metrics_path(cfg), std::ios::trunc);
  f << table;
  f.close();
  manifest_update(cfg, "metrics", {metrics_path(cfg)});
  return table;
}

std::string cmd_ripcheck(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  GramStats stats = concentration_report(
      cfg.rip_geometry, MaskFamily::Rademacher, cfg.rip_trials,
      cfg.rip_delta_d, cfg.rip_delta_o, cfg.rip_s, cfg.rip_seed);

  // Gersgorin / exact chain on fresh toy instances
  std::string report = stats.summary();
  {
    MaskSequence masks = gen_rademacher(cfg.rip_geometry, cfg.rip_seed + 7);
    std::vector<double> G = gram_matrix(masks, Downsampler::Subsample);
    const int nB = int(cfg.rip_geometry.n() * cfg.rip_geometry.B);
    const double bound =
        gersgorin_delta_bound(G, nB, cfg.rip_s, 100000, cfg.rip_seed);
    const double exact = exact_rip_delta(G, nB, cfg.rip_s, 100000,
                                         cfg.rip_seed);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "gersgorin_bound=%.8f\nexact_delta_s=%.8f\nchain_holds=%d\n",
                  bound, exact, exact <= bound ? 1 : 0);
    report += buf;
  }
  const std::string path = join(cfg.out_dir, "ripcheck.txt");
  std::ofstream f(path, std::ios::trunc);
  f << report;
  f.close();
  manifest_update(cfg, "ripcheck", {path});
  return report;
}

}  // namespace cake
