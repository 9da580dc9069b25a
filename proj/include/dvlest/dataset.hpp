#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dvlest/beamsnet.hpp"
#include "dvlest/errors.hpp"
#include "dvlest/geometry.hpp"
#include "dvlest/random.hpp"
#include "dvlest/snmnn.hpp"
#include "dvlest/variant.hpp"

namespace dvlest {

struct ImuRecord {
  double t = 0.0;             // s
  Vec3 specific_force{0, 0, 0};  // m/s^2
  Vec3 angular_rate{0, 0, 0};    // rad/s
};

struct DvlEpoch {
  double t = 0.0;
  Vec4 clean_beams{0, 0, 0, 0};
  Vec4 corrupted_beams{0, 0, 0, 0};
  Vec3 truth_velocity{0, 0, 0};
};

struct Mission {
  std::string id;
  std::vector<ImuRecord> imu;
  std::vector<DvlEpoch> dvl;
  double duration_s = 0.0;
  /// Set once the error model has been applied; the window builder refuses
  /// missions without it so clean beams can never leak into model inputs.
  bool corruption_applied = false;
};

// ---------------------------------------------------------------------------
// Velocity profiles

enum class ProfileKind { Sinusoidal, PiecewiseConstant };

/// Per-axis velocity profile with an analytic derivative (the synthetic
/// specific force). Piecewise-constant levels switch through a short cosine
/// ramp so the derivative stays bounded; a hard jump would make the 100 Hz
/// specific-force channel a delta spike.
struct AxisProfile {
  ProfileKind kind = ProfileKind::Sinusoidal;

  // sinusoidal
  double amplitude = 0.0;
  double period_s = 60.0;
  double phase_rad = 0.0;
  double offset = 0.0;

  // piecewise-constant
  std::vector<double> levels;
  double segment_s = 80.0;
  double ramp_s = 3.0;

  static AxisProfile sine(double amplitude, double period_s,
                          double phase_rad = 0.0, double offset = 0.0) {
    AxisProfile p;
    p.kind = ProfileKind::Sinusoidal;
    p.amplitude = amplitude;
    p.period_s = period_s;
    p.phase_rad = phase_rad;
    p.offset = offset;
    return p;
  }

  static AxisProfile piecewise(std::vector<double> levels, double segment_s,
                               double ramp_s = 3.0) {
    AxisProfile p;
    p.kind = ProfileKind::PiecewiseConstant;
    p.levels = std::move(levels);
    p.segment_s = segment_s;
    p.ramp_s = ramp_s;
    return p;
  }

  double value(double t) const {
    if (kind == ProfileKind::Sinusoidal) {
      return offset + amplitude * std::sin(2.0 * kPi * t / period_s + phase_rad);
    }
    if (levels.empty()) return 0.0;
    const std::size_t seg = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(0.0, t) / segment_s),
        levels.size() - 1);
    const double local = t - static_cast<double>(seg) * segment_s;
    if (seg == 0 || local >= ramp_s) return levels[seg];
    const double u = local / ramp_s;
    const double prev = levels[seg - 1];
    return prev + (levels[seg] - prev) * 0.5 * (1.0 - std::cos(kPi * u));
  }

  double derivative(double t) const {
    if (kind == ProfileKind::Sinusoidal) {
      return amplitude * (2.0 * kPi / period_s) *
             std::cos(2.0 * kPi * t / period_s + phase_rad);
    }
    if (levels.empty()) return 0.0;
    const std::size_t seg = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(0.0, t) / segment_s),
        levels.size() - 1);
    const double local = t - static_cast<double>(seg) * segment_s;
    if (seg == 0 || local >= ramp_s) return 0.0;
    const double u = local / ramp_s;
    const double prev = levels[seg - 1];
    return (levels[seg] - prev) * 0.5 * kPi / ramp_s * std::sin(kPi * u);
  }
};

struct SyntheticTrajectoryConfig {
  std::string id = "synthetic";
  double duration_s = 400.0;
  std::array<AxisProfile, 3> profile;
  BeamGeometry geometry = BeamGeometry::janus();
  ErrorModelConfig error;
  double imu_rate_hz = 100.0;
  double dvl_rate_hz = 1.0;
  double imu_accel_noise_std = 0.01;  // m/s^2
  double imu_gyro_noise_std = 0.001;  // rad/s
  std::uint64_t seed = 0;
};

inline std::uint64_t mission_stream_seed(std::uint64_t global_seed,
                                         const std::string& mission_id,
                                         std::uint64_t stream) {
  return Rng::mix(Rng::mix(global_seed, fnv1a64(mission_id.data(),
                                                mission_id.size())),
                  stream);
}

/// Fill corrupted_beams = clean + bias + noise. Each mission gets its own
/// stream derived from (seed, mission id), so corrupting missions in any
/// order yields the same bytes.
inline void apply_corruption(Mission& m, const ErrorModelConfig& cfg) {
  Rng rng(mission_stream_seed(cfg.seed, m.id, 0xbea5ULL));
  for (DvlEpoch& e : m.dvl) {
    const BeamMeasurement clean{e.t, e.clean_beams};
    e.corrupted_beams = corrupt_measurement(clean, cfg, rng).beams;
  }
  m.corruption_applied = true;
}

/// Synthesize one mission: truth velocity from the profile, clean beams
/// through the forward model at the DVL rate, IMU channels as the analytic
/// velocity derivative (specific force) plus sensor noise at the IMU rate;
/// angular-rate channels are noise-only (no attitude model). Corruption is
/// applied per cfg.error.
inline Mission synthesize_mission(const SyntheticTrajectoryConfig& cfg) {
  detail::require(cfg.duration_s >= 5.0,
                  "synthesize_mission: duration must exceed warm-up (>= 5 s)");
  Mission m;
  m.id = cfg.id;
  m.duration_s = cfg.duration_s;

  const TransformMatrix h = build_transform(cfg.geometry);
  Rng imu_rng(mission_stream_seed(cfg.seed, cfg.id, 0x1111ULL));

  const std::size_t n_imu = static_cast<std::size_t>(
      std::llround(cfg.duration_s * cfg.imu_rate_hz));
  const double dt_imu = 1.0 / cfg.imu_rate_hz;
  m.imu.reserve(n_imu);
  for (std::size_t i = 0; i < n_imu; ++i) {
    ImuRecord r;
    r.t = static_cast<double>(i) * dt_imu;
    for (int a = 0; a < 3; ++a) {
      r.specific_force[a] = cfg.profile[a].derivative(r.t) +
                            imu_rng.normal(0.0, cfg.imu_accel_noise_std);
      r.angular_rate[a] = imu_rng.normal(0.0, cfg.imu_gyro_noise_std);
    }
    m.imu.push_back(r);
  }

  const std::size_t n_dvl = static_cast<std::size_t>(
      std::llround(cfg.duration_s * cfg.dvl_rate_hz));
  const double dt_dvl = 1.0 / cfg.dvl_rate_hz;
  m.dvl.reserve(n_dvl);
  for (std::size_t k = 0; k < n_dvl; ++k) {
    DvlEpoch e;
    e.t = static_cast<double>(k) * dt_dvl;
    for (int a = 0; a < 3; ++a) e.truth_velocity[a] = cfg.profile[a].value(e.t);
    e.clean_beams =
        project_velocity(BodyVelocity{e.truth_velocity}, h, e.t).beams;
    e.corrupted_beams = e.clean_beams;
    m.dvl.push_back(e);
  }

  ErrorModelConfig err = cfg.error;
  err.seed = cfg.seed;
  apply_corruption(m, err);
  return m;
}

// ---------------------------------------------------------------------------
// Windowing

/// Per-variant warm-up: number of leading DVL epochs that cannot form a
/// sample. BeamsNetV1 additionally needs the 4 s IMU window, checked against
/// the actual records.
inline std::size_t window_warmup_epochs(ModelVariant v) {
  switch (v) {
    case ModelVariant::BeamsNetV1: return 4;  // 3 past epochs + 4 s of IMU
    case ModelVariant::BeamsNetV2: return 3;
    case ModelVariant::SnmnnV1: return 0;
    case ModelVariant::SnmnnV2: return 3;
  }
  return 0;
}

namespace detail {

/// Index of the last IMU record with t <= t_epoch (+ small slack for
/// accumulated floating-point drift in sample timestamps).
inline std::ptrdiff_t last_imu_at_or_before(const std::vector<ImuRecord>& imu,
                                            double t_epoch, double slack) {
  std::ptrdiff_t lo = -1, hi = static_cast<std::ptrdiff_t>(imu.size()) - 1;
  const double limit = t_epoch + slack;
  while (lo < hi) {
    const std::ptrdiff_t mid = (lo + hi + 1) / 2;
    if (imu[static_cast<std::size_t>(mid)].t <= limit)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

}  // namespace detail

/// Build model-input windows from a corrupted mission. Inputs come from
/// corrupted beams (and IMU where the variant uses it); the target is the
/// uncorrupted truth velocity. Every feature in a sample precedes or
/// coincides with its target epoch. Missions shorter than the warm-up
/// produce an empty vector.
inline std::vector<WindowedSample> make_windows(const Mission& m,
                                                ModelVariant variant,
                                                double imu_rate_hz = 100.0) {
  dvlest::detail::require(
      m.corruption_applied,
      "make_windows: mission '" + m.id + "' has no corruption applied");
  std::vector<WindowedSample> out;
  const std::size_t warmup = window_warmup_epochs(variant);
  if (m.dvl.size() <= warmup) return out;
  const double dt_imu = 1.0 / imu_rate_hz;
  const double slack = 0.25 * dt_imu;

  for (std::size_t k = warmup; k < m.dvl.size(); ++k) {
    const DvlEpoch& epoch = m.dvl[k];
    WindowedSample s;
    s.t = epoch.t;
    s.current_beams = epoch.corrupted_beams;
    s.target = epoch.truth_velocity;

    if (variant == ModelVariant::BeamsNetV1 ||
        variant == ModelVariant::BeamsNetV2 ||
        variant == ModelVariant::SnmnnV2) {
      s.past_beams = Tensor({kPastEpochs, kBeams});
      for (std::size_t e = 0; e < kPastEpochs; ++e) {
        const Vec4& b = m.dvl[k - kPastEpochs + e].corrupted_beams;
        for (std::size_t j = 0; j < kBeams; ++j) s.past_beams.at(e, j) = b[j];
      }
    }

    if (variant == ModelVariant::BeamsNetV1) {
      const std::ptrdiff_t end =
          detail::last_imu_at_or_before(m.imu, epoch.t, slack);
      const std::ptrdiff_t begin =
          end - static_cast<std::ptrdiff_t>(kImuWindowLen) + 1;
      if (begin < 0) continue;  // not enough IMU history yet
      if (end >= 0 && epoch.t - m.imu[static_cast<std::size_t>(end)].t >
                          2.0 * dt_imu)
        continue;  // IMU does not cover this epoch
      s.imu_window = Tensor({kImuChannels, kImuWindowLen});
      for (std::size_t i = 0; i < kImuWindowLen; ++i) {
        const ImuRecord& r = m.imu[static_cast<std::size_t>(begin) + i];
        for (std::size_t a = 0; a < 3; ++a) {
          s.imu_window.at(a, i) = r.specific_force[a];
          s.imu_window.at(3 + a, i) = r.angular_rate[a];
        }
      }
    } else if (variant == ModelVariant::SnmnnV1) {
      // epoch-averaged IMU over the second (t-1, t]
      const std::ptrdiff_t end =
          detail::last_imu_at_or_before(m.imu, epoch.t, slack);
      const std::ptrdiff_t begin0 =
          detail::last_imu_at_or_before(m.imu, epoch.t - 1.0, slack) + 1;
      if (end < begin0) continue;  // no IMU samples in this second
      Vec3 sf{0, 0, 0}, ar{0, 0, 0};
      const double inv_n = 1.0 / static_cast<double>(end - begin0 + 1);
      for (std::ptrdiff_t i = begin0; i <= end; ++i) {
        const ImuRecord& r = m.imu[static_cast<std::size_t>(i)];
        for (int a = 0; a < 3; ++a) {
          sf[a] += r.specific_force[a] * inv_n;
          ar[a] += r.angular_rate[a] * inv_n;
        }
      }
      s.imu_window = Tensor({kImuChannels, 1});
      for (std::size_t a = 0; a < 3; ++a) {
        s.imu_window.at(a, 0) = sf[a];
        s.imu_window.at(3 + a, 0) = ar[a];
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Assemble the SNMNN input vector from a window: V1 packs the 6
/// epoch-averaged IMU channels plus the 4 current beams (10 values); V2
/// packs the beams of epochs t-3..t oldest first (16 values).
inline std::vector<double> assemble_snmnn_input(const WindowedSample& s,
                                                ModelVariant variant) {
  std::vector<double> x;
  if (variant == ModelVariant::SnmnnV1) {
    dvlest::detail::require(s.imu_window.numel() == kImuChannels,
                            "snmnn-v1 input: missing epoch-averaged IMU");
    x.assign(s.imu_window.v.begin(), s.imu_window.v.end());
    x.insert(x.end(), s.current_beams.begin(), s.current_beams.end());
  } else if (variant == ModelVariant::SnmnnV2) {
    dvlest::detail::require(s.past_beams.numel() == kPastEpochs * kBeams,
                            "snmnn-v2 input: missing past beams");
    x.assign(s.past_beams.v.begin(), s.past_beams.v.end());
    x.insert(x.end(), s.current_beams.begin(), s.current_beams.end());
  } else {
    throw ContractViolation("assemble_snmnn_input: not an SNMNN variant");
  }
  return x;
}

inline SnmnnSequence make_snmnn_sequence(const Mission& m,
                                         ModelVariant variant,
                                         double imu_rate_hz = 100.0) {
  SnmnnSequence seq;
  seq.mission_id = m.id;
  for (const WindowedSample& w : make_windows(m, variant, imu_rate_hz)) {
    SnmnnSample s;
    s.t = w.t;
    s.input = assemble_snmnn_input(w, variant);
    s.target = w.target;
    seq.steps.push_back(std::move(s));
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Mission split

struct MissionSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  bool empty_test_warning = false;
};

/// Split at mission granularity; windows never cross the split because they
/// are built per mission afterwards.
inline MissionSplit split_missions(const std::vector<Mission>& missions,
                                   const std::vector<std::string>& test_ids) {
  std::set<std::string> seen;
  for (const Mission& m : missions)
    if (!seen.insert(m.id).second)
      throw ConfigError("split_missions: duplicate mission id '" + m.id + "'");
  std::set<std::string> test_set;
  for (const std::string& id : test_ids)
    if (!test_set.insert(id).second)
      throw ConfigError("split_missions: mission '" + id +
                        "' listed twice in the test set");
  for (const std::string& id : test_set)
    if (!seen.count(id))
      throw ConfigError("split_missions: unknown test mission id '" + id +
                        "'");
  MissionSplit split;
  for (std::size_t i = 0; i < missions.size(); ++i) {
    if (test_set.count(missions[i].id))
      split.test.push_back(i);
    else
      split.train.push_back(i);
  }
  split.empty_test_warning = test_set.empty();
  return split;
}

// ---------------------------------------------------------------------------
// Delimited-text ingestion (real recordings)

/// Column mapping for one delimited table.
struct TableSchema {
  std::string time;
  std::vector<std::string> columns;  // data columns in canonical order
  double time_scale = 1.0;           // e.g. 1e-3 for ms
  double value_scale = 1.0;          // e.g. 9.80665 for g -> m/s^2
  double rate_hz = 0.0;              // nominal, 0 disables the rate check
};

struct MissionSchema {
  char delimiter = ',';
  TableSchema imu_force;    // 3 specific-force columns
  TableSchema imu_rate;     // 3 angular-rate columns (same file)
  TableSchema dvl_beams;    // 4 beam columns
  TableSchema dvl_truth;    // 3 truth-velocity columns (same file)

  static MissionSchema canonical() {
    MissionSchema s;
    s.imu_force = {"t", {"fx", "fy", "fz"}, 1.0, 1.0, 100.0};
    s.imu_rate = {"t", {"wx", "wy", "wz"}, 1.0, 1.0, 100.0};
    s.dvl_beams = {"t", {"b1", "b2", "b3", "b4"}, 1.0, 1.0, 1.0};
    s.dvl_truth = {"t", {"vx", "vy", "vz"}, 1.0, 1.0, 1.0};
    return s;
  }
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line,
                                           char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == delim) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw DataError("cannot parse number '" + s + "' in " + context);
  return v;
}

struct ParsedTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t column(const std::string& name, const std::string& file) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw DataError("missing column '" + name + "' in " + file);
    return static_cast<std::size_t>(it - header.begin());
  }
};

inline ParsedTable read_table(const std::string& path, char delim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  ParsedTable t;
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw DataError("'" + path + "' is empty");
  t.header = split_line(line, delim);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line, delim);
    if (cells.size() != t.header.size())
      throw DataError("row with " + std::to_string(cells.size()) +
                      " cells does not match header of " +
                      std::to_string(t.header.size()) + " in " + path);
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
      row[i] = parse_double(cells[i], path);
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw DataError("'" + path + "' has no data rows");
  return t;
}

inline void check_times(const std::vector<double>& t, double rate_hz,
                        const std::string& what) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw DataError(what + ": timestamps are not strictly increasing at row " +
                      std::to_string(i));
  if (rate_hz > 0.0 && t.size() >= 2) {
    const double mean_dt =
        (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    const double nominal = 1.0 / rate_hz;
    if (std::abs(mean_dt - nominal) > 0.05 * nominal)
      throw DataError(what + ": mean sample interval " +
                      std::to_string(mean_dt) + " s deviates more than 5% from nominal " +
                      std::to_string(nominal) + " s");
  }
}

}  // namespace detail

/// Ingest one mission from two delimited-text tables (IMU and DVL/truth)
/// using the supplied column mapping. Units are converted to SI at this
/// boundary; beam columns are preserved as the clean stream. The error
/// model still has to be applied before windowing.
inline Mission load_mission(const std::string& imu_path,
                            const std::string& dvl_path,
                            const MissionSchema& schema,
                            const std::string& mission_id) {
  Mission m;
  m.id = mission_id;

  const detail::ParsedTable imu =
      detail::read_table(imu_path, schema.delimiter);
  const std::size_t it_col = imu.column(schema.imu_force.time, imu_path);
  std::array<std::size_t, 3> f_col, w_col;
  for (int a = 0; a < 3; ++a) {
    f_col[a] = imu.column(schema.imu_force.columns.at(a), imu_path);
    w_col[a] = imu.column(schema.imu_rate.columns.at(a), imu_path);
  }
  for (const std::vector<double>& row : imu.rows) {
    ImuRecord r;
    r.t = row[it_col] * schema.imu_force.time_scale;
    for (int a = 0; a < 3; ++a) {
      r.specific_force[a] = row[f_col[a]] * schema.imu_force.value_scale;
      r.angular_rate[a] = row[w_col[a]] * schema.imu_rate.value_scale;
    }
    m.imu.push_back(r);
  }

  const detail::ParsedTable dvl =
      detail::read_table(dvl_path, schema.delimiter);
  const std::size_t dt_col = dvl.column(schema.dvl_beams.time, dvl_path);
  std::array<std::size_t, 4> b_col;
  std::array<std::size_t, 3> v_col;
  for (int b = 0; b < 4; ++b)
    b_col[b] = dvl.column(schema.dvl_beams.columns.at(b), dvl_path);
  for (int a = 0; a < 3; ++a)
    v_col[a] = dvl.column(schema.dvl_truth.columns.at(a), dvl_path);
  for (const std::vector<double>& row : dvl.rows) {
    DvlEpoch e;
    e.t = row[dt_col] * schema.dvl_beams.time_scale;
    for (int b = 0; b < 4; ++b)
      e.clean_beams[b] = row[b_col[b]] * schema.dvl_beams.value_scale;
    e.corrupted_beams = e.clean_beams;
    for (int a = 0; a < 3; ++a)
      e.truth_velocity[a] = row[v_col[a]] * schema.dvl_truth.value_scale;
    m.dvl.push_back(e);
  }

  std::vector<double> imu_t, dvl_t;
  for (const ImuRecord& r : m.imu) imu_t.push_back(r.t);
  for (const DvlEpoch& e : m.dvl) dvl_t.push_back(e.t);
  detail::check_times(imu_t, schema.imu_force.rate_hz, imu_path);
  detail::check_times(dvl_t, schema.dvl_beams.rate_hz, dvl_path);
  if (dvl_t.front() < imu_t.front() - 1.0 || dvl_t.back() > imu_t.back() + 1.0)
    throw DataError("DVL epochs of '" + mission_id +
                    "' are not covered by the IMU time span");

  m.duration_s = std::max(imu_t.back() - imu_t.front(),
                          dvl_t.back() - dvl_t.front());
  return m;
}

// ---------------------------------------------------------------------------
// Canonical mission container (.dvm)
//
// Line 1 is a JSON header carrying counts, flags and an FNV-1a checksum of
// the data section; the data section is two tab-separated blocks, one per
// sensor, with doubles printed at %.17g so a round trip is bit-exact.

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void save_mission(const std::string& path, const Mission& m,
                         const std::string& config_hash = "",
                         std::uint64_t seed = 0) {
  std::ostringstream data;
  data << "# imu t fx fy fz wx wy wz\n";
  for (const ImuRecord& r : m.imu) {
    data << detail::fmt_g17(r.t);
    for (int a = 0; a < 3; ++a) data << '\t' << detail::fmt_g17(r.specific_force[a]);
    for (int a = 0; a < 3; ++a) data << '\t' << detail::fmt_g17(r.angular_rate[a]);
    data << '\n';
  }
  data << "# dvl t b1 b2 b3 b4 c1 c2 c3 c4 vx vy vz\n";
  for (const DvlEpoch& e : m.dvl) {
    data << detail::fmt_g17(e.t);
    for (int b = 0; b < 4; ++b) data << '\t' << detail::fmt_g17(e.clean_beams[b]);
    for (int b = 0; b < 4; ++b) data << '\t' << detail::fmt_g17(e.corrupted_beams[b]);
    for (int a = 0; a < 3; ++a) data << '\t' << detail::fmt_g17(e.truth_velocity[a]);
    data << '\n';
  }
  const std::string body = data.str();
  char checksum[32];
  std::snprintf(checksum, sizeof(checksum), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(body.data(), body.size())));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "{\"format\":\"dvlest-mission\",\"version\":1,\"id\":\"" << m.id
      << "\",\"duration_s\":" << detail::fmt_g17(m.duration_s)
      << ",\"imu_count\":" << m.imu.size() << ",\"dvl_count\":" << m.dvl.size()
      << ",\"corruption_applied\":" << (m.corruption_applied ? "true" : "false")
      << ",\"checksum\":\"" << checksum << "\",\"config_hash\":\""
      << config_hash << "\",\"seed\":" << seed << "}\n";
  out << body;
}

inline Mission load_mission_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header) || header.empty())
    throw DataError("'" + path + "' is empty");
  if (header.find("\"format\":\"dvlest-mission\"") == std::string::npos)
    throw DataError("'" + path + "' is not a dvlest mission container");

  auto extract = [&](const std::string& key) -> std::string {
    const std::string pat = "\"" + key + "\":";
    const std::size_t pos = header.find(pat);
    if (pos == std::string::npos)
      throw DataError("'" + path + "' header lacks \"" + key + "\"");
    std::size_t start = pos + pat.size();
    if (header[start] == '"') {
      const std::size_t close = header.find('"', start + 1);
      return header.substr(start + 1, close - start - 1);
    }
    std::size_t end = start;
    while (end < header.size() && header[end] != ',' && header[end] != '}')
      ++end;
    return header.substr(start, end - start);
  };

  Mission m;
  m.id = extract("id");
  m.duration_s = detail::parse_double(extract("duration_s"), path);
  m.corruption_applied = (extract("corruption_applied") == "true");
  const std::size_t imu_count =
      static_cast<std::size_t>(std::stoull(extract("imu_count")));
  const std::size_t dvl_count =
      static_cast<std::size_t>(std::stoull(extract("dvl_count")));
  const std::string expect_checksum = extract("checksum");

  std::string body((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  char checksum[32];
  std::snprintf(checksum, sizeof(checksum), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(body.data(), body.size())));
  if (expect_checksum != checksum)
    throw DataError("checksum mismatch in '" + path +
                    "': file is corrupt or was edited");

  std::istringstream is(body);
  std::string line;
  int section = 0;  // 1 = imu, 2 = dvl
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      section = line.rfind("# imu", 0) == 0 ? 1 : 2;
      continue;
    }
    const std::vector<std::string> cells = detail::split_line(line, '\t');
    if (section == 1) {
      if (cells.size() != 7) throw DataError("bad imu row in '" + path + "'");
      ImuRecord r;
      r.t = detail::parse_double(cells[0], path);
      for (int a = 0; a < 3; ++a) {
        r.specific_force[a] = detail::parse_double(cells[1 + a], path);
        r.angular_rate[a] = detail::parse_double(cells[4 + a], path);
      }
      m.imu.push_back(r);
    } else if (section == 2) {
      if (cells.size() != 12) throw DataError("bad dvl row in '" + path + "'");
      DvlEpoch e;
      e.t = detail::parse_double(cells[0], path);
      for (int b = 0; b < 4; ++b) {
        e.clean_beams[b] = detail::parse_double(cells[1 + b], path);
        e.corrupted_beams[b] = detail::parse_double(cells[5 + b], path);
      }
      for (int a = 0; a < 3; ++a)
        e.truth_velocity[a] = detail::parse_double(cells[9 + a], path);
      m.dvl.push_back(e);
    } else {
      throw DataError("data before section marker in '" + path + "'");
    }
  }
  if (m.imu.size() != imu_count || m.dvl.size() != dvl_count)
    throw DataError("record counts in '" + path + "' do not match its header");
  return m;
}

}  // namespace dvlest
