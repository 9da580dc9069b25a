#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dvlest/errors.hpp"
#include "dvlest/geometry.hpp"
#include "dvlest/metrics.hpp"

namespace dvlest {

/// Per-method evaluation: the four paper metrics (components pooled across
/// axes and epochs), a per-axis breakdown for diagnostics, the error-norm
/// series and the KDE of the error norms.
struct EvaluationReport {
  std::string method;
  std::size_t n_epochs = 0;
  double rmse = 0.0;
  double mae = 0.0;
  double r2 = 0.0;
  double vaf = 0.0;
  Vec3 rmse_axis{0, 0, 0};
  Vec3 mae_axis{0, 0, 0};
  std::vector<ErrorNormPoint> error_norms;
  KdeCurve kde;
};

inline EvaluationReport evaluate_series(const std::string& method,
                                        const std::vector<double>& t,
                                        const std::vector<Vec3>& truth,
                                        const std::vector<Vec3>& estimate) {
  detail::require(t.size() == truth.size() && truth.size() == estimate.size(),
                  "evaluate_series: misaligned sequences");
  detail::require(!t.empty(), "evaluate_series: empty series");
  EvaluationReport rep;
  rep.method = method;
  rep.n_epochs = t.size();

  std::vector<double> y, yhat;
  y.reserve(3 * t.size());
  yhat.reserve(3 * t.size());
  for (std::size_t a = 0; a < 3; ++a) {
    std::vector<double> ya(t.size()), ha(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      ya[i] = truth[i][a];
      ha[i] = estimate[i][a];
      y.push_back(truth[i][a]);
      yhat.push_back(estimate[i][a]);
    }
    rep.rmse_axis[a] = rmse(ya, ha);
    rep.mae_axis[a] = mae(ya, ha);
  }
  rep.rmse = rmse(y, yhat);
  rep.mae = mae(y, yhat);
  rep.r2 = r_squared(y, yhat);
  rep.vaf = vaf(y, yhat);
  rep.error_norms = error_norm_series(t, truth, estimate);

  std::vector<double> norms(rep.error_norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i)
    norms[i] = rep.error_norms[i].norm;
  rep.kde = kde_density(norms);
  return rep;
}

namespace detail {

inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

}  // namespace detail

/// One structured-text document per method.
inline void write_report(const std::string& path, const EvaluationReport& r,
                         const std::string& config_hash) {
  std::ofstream out = detail::open_out(path);
  out << "method: " << r.method << "\n"
      << "epochs: " << r.n_epochs << "\n"
      << "rmse_mps: " << detail::fmt6(r.rmse) << "\n"
      << "mae_mps: " << detail::fmt6(r.mae) << "\n"
      << "r2: " << detail::fmt6(r.r2) << "\n"
      << "vaf_pct: " << detail::fmt6(r.vaf) << "\n"
      << "rmse_axis_mps: " << detail::fmt6(r.rmse_axis[0]) << " "
      << detail::fmt6(r.rmse_axis[1]) << " " << detail::fmt6(r.rmse_axis[2])
      << "\n"
      << "mae_axis_mps: " << detail::fmt6(r.mae_axis[0]) << " "
      << detail::fmt6(r.mae_axis[1]) << " " << detail::fmt6(r.mae_axis[2])
      << "\n"
      << "kde_bandwidth_mps: " << detail::fmt6(r.kde.bandwidth) << "\n"
      << "config_hash: " << config_hash << "\n";
}

inline void write_error_norm_series(const std::string& path,
                                    const EvaluationReport& r,
                                    const std::string& config_hash) {
  std::ofstream out = detail::open_out(path);
  out << "# dvlest error-norm series\tmethod=" << r.method
      << "\tconfig_hash=" << config_hash << "\n";
  out << "t_s\terror_norm_mps\n";
  for (const ErrorNormPoint& p : r.error_norms)
    out << detail::fmt6(p.t) << '\t' << detail::fmt6(p.norm) << '\n';
}

inline void write_kde_curve(const std::string& path,
                            const EvaluationReport& r,
                            const std::string& config_hash) {
  std::ofstream out = detail::open_out(path);
  out << "# dvlest kde curve\tmethod=" << r.method
      << "\tconfig_hash=" << config_hash << "\n";
  out << "error_mps\tdensity\n";
  for (std::size_t i = 0; i < r.kde.x.size(); ++i)
    out << detail::fmt6(r.kde.x[i]) << '\t' << detail::fmt6(r.kde.density[i])
        << '\n';
}

/// Table-2-style comparison: one row per method, improvement percentages
/// computed against the row named `baseline` as (LS - model) / LS * 100.
inline void write_comparison_table(const std::string& path,
                                   const std::vector<EvaluationReport>& rows,
                                   const std::string& baseline,
                                   const std::string& config_hash) {
  const EvaluationReport* ls = nullptr;
  for (const EvaluationReport& r : rows)
    if (r.method == baseline) ls = &r;
  std::ofstream out = detail::open_out(path);
  out << "# dvlest comparison\tconfig_hash=" << config_hash << "\n";
  out << "method\trmse_mps\tmae_mps\tvaf_pct\tr2\trmse_improvement_pct\t"
         "mae_improvement_pct\n";
  for (const EvaluationReport& r : rows) {
    out << r.method << '\t' << detail::fmt6(r.rmse) << '\t'
        << detail::fmt6(r.mae) << '\t' << detail::fmt6(r.vaf) << '\t'
        << detail::fmt6(r.r2);
    if (ls && &r != ls) {
      out << '\t' << detail::fmt6(100.0 * (ls->rmse - r.rmse) / ls->rmse)
          << '\t' << detail::fmt6(100.0 * (ls->mae - r.mae) / ls->mae);
    } else {
      out << "\t-\t-";
    }
    out << '\n';
  }
}

}  // namespace dvlest
