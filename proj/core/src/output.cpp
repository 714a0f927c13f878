#include "xtalk/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace xtalk {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

Series series(const std::vector<SweepRecord>& records, ProtocolKind p, InitialState s,
              bool by_v = false, bool corrected = false) {
  Series out;
  for (const auto& r : select(records, p, s)) {
    const double y = corrected ? r.infidelity_corrected.value_or(0.0) : r.infidelity;
    out.x.push_back(by_v ? r.v13 : r.epsilon);
    out.y.push_back(y);
  }
  return out;
}

bool has(const std::vector<SweepRecord>& records, ProtocolKind p, InitialState s) {
  return std::any_of(records.begin(), records.end(),
                     [&](const SweepRecord& r) { return r.protocol == p && r.initial_state == s; });
}

// Value at the grid point closest (in log) to x0, or NaN when absent.
double at_nearest(const Series& s, double x0) {
  double best = std::numeric_limits<double>::infinity();
  double y = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (!(s.x[i] > 0)) continue;
    const double d = std::abs(std::log(s.x[i] / x0));
    if (d < best) {
      best = d;
      y = s.y[i];
    }
  }
  return y;
}

json slope_or_null(const Series& s, double lo, double hi) {
  try {
    const LogLogFit f = fit_loglog(s.x, s.y, lo, hi);
    return {{"slope", f.slope}, {"points", f.points}};
  } catch (const std::invalid_argument&) {
    return nullptr;
  }
}

json epsilon_summary(const std::vector<SweepRecord>& records, const ExperimentConfig& cfg) {
  json j;
  const double lo = cfg.fit_window[0];
  const double hi = cfg.fit_window[1];
  j["fit_window"] = {lo, hi};
  json slopes;
  for (ProtocolKind p : {ProtocolKind::SinglePulse, ProtocolKind::DoublePulse}) {
    for (InitialState s : kAllInitialStates) {
      if (!has(records, p, s)) continue;
      slopes[std::string(to_string(p))][std::string(to_string(s))] =
          slope_or_null(series(records, p, s), lo, hi);
    }
  }
  j["slopes"] = slopes;
  if (has(records, ProtocolKind::DoublePulse, InitialState::g00)) {
    const Series d00 = series(records, ProtocolKind::DoublePulse, InitialState::g00);
    try {
      j["quadratic_coefficient_simulated"] = fit_quadratic_coefficient(d00.x, d00.y, lo, hi);
    } catch (const std::invalid_argument&) {
    }
    for (const auto& r : select(records, ProtocolKind::DoublePulse, InitialState::g00)) {
      if (r.perturb_prediction && r.epsilon > 0) {
        j["quadratic_coefficient_predicted"] = *r.perturb_prediction / (r.epsilon * r.epsilon);
        break;
      }
    }
  }
  if (has(records, ProtocolKind::SinglePulse, InitialState::superposition) &&
      has(records, ProtocolKind::DoublePulse, InitialState::superposition)) {
    const Series s = series(records, ProtocolKind::SinglePulse, InitialState::superposition);
    const Series d = series(records, ProtocolKind::DoublePulse, InitialState::superposition);
    json sup = json::array();
    for (std::size_t i = 0; i < s.x.size() && i < d.x.size(); ++i) {
      sup.push_back({{"epsilon", s.x[i]}, {"factor", d.y[i] > 0 ? s.y[i] / d.y[i] : 0.0}});
    }
    j["suppression"] = sup;
    j["suppression_at_1e-2"] = at_nearest(s, 1e-2) / at_nearest(d, 1e-2);
    const Crossover c = locate_crossover(d.x, d.y);
    j["crossover"] = {{"found", c.found},
                      {"local_slope_1p5_at", c.location},
                      {"linear_coeff", c.linear_coeff},
                      {"quadratic_coeff", c.quadratic_coeff},
                      {"ratio_linear_over_quadratic",
                       c.quadratic_coeff != 0.0 ? c.linear_coeff / c.quadratic_coeff : 0.0}};
  }
  return j;
}

json vdw_summary(const std::vector<SweepRecord>& records) {
  json j;
  const Series s = series(records, ProtocolKind::SinglePulse, InitialState::superposition, true);
  const Series d = series(records, ProtocolKind::DoublePulse, InitialState::superposition, true);
  json pts = json::array();
  double strong = std::numeric_limits<double>::infinity();
  double weak = std::numeric_limits<double>::infinity();
  double failure = std::numeric_limits<double>::infinity();
  double failure_at = 0.0;
  for (std::size_t i = 0; i < s.x.size() && i < d.x.size(); ++i) {
    const double f = d.y[i] > 0 ? s.y[i] / d.y[i] : 0.0;
    pts.push_back({{"v", s.x[i]}, {"single", s.y[i]}, {"double", d.y[i]}, {"factor", f}});
    if (s.x[i] >= 10.0) strong = std::min(strong, f);
    if (s.x[i] <= 0.1) weak = std::min(weak, f);
    if (s.x[i] >= 0.3 && s.x[i] <= 3.0 && f < failure) {
      failure = f;
      failure_at = s.x[i];
    }
  }
  j["points"] = pts;
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  j["regimes"] = {{"strong_min_factor", finite_or_null(strong)},
                  {"weak_min_factor", finite_or_null(weak)},
                  {"failure_min_factor", finite_or_null(failure)},
                  {"failure_min_at", failure_at}};
  return j;
}

json correction_summary(const std::vector<SweepRecord>& records) {
  json j;
  json pts = json::array();
  double max_ratio = 0.0;
  std::array<double, 4> prev{};
  bool first = true;
  for (const auto& r : select(records, ProtocolKind::DoublePulse, InitialState::superposition)) {
    const double corr = r.infidelity_corrected.value_or(r.infidelity);
    const double ratio = r.infidelity > 0 ? corr / r.infidelity : 1.0;
    json p = {{"epsilon", r.epsilon}, {"uncorrected", r.infidelity}, {"corrected", corr},
              {"ratio", ratio}};
    if (r.phases) {
      // Unwrap against the previous grid point so plots do not jump by 2 pi.
      std::array<double, 4> ph{r.phases->phi1, r.phases->phi2, r.phases->phi2_101, r.phases->phi3};
      if (!first) {
        for (std::size_t k = 0; k < 4; ++k) {
          ph[k] += 2 * std::numbers::pi * std::round((prev[k] - ph[k]) / (2 * std::numbers::pi));
        }
      }
      prev = ph;
      first = false;
      p["phases"] = {{"phi1", ph[0]}, {"phi2", ph[1]}, {"phi2_101", ph[2]}, {"phi3", ph[3]}};
    }
    if (r.epsilon >= 1e-3 && r.epsilon <= 1e-1) max_ratio = std::max(max_ratio, ratio);
    pts.push_back(p);
  }
  j["points"] = pts;
  j["max_ratio_1e-3_to_1e-1"] = max_ratio;
  return j;
}

// ---- SVG -------------------------------------------------------------------

struct Curve {
  std::string label;
  std::string color;
  bool dashed;
  Series data;
};

void panel(std::ostringstream& o, double x0, double y0, double w, double h, const std::string& title,
           const std::string& xlabel, const std::vector<Curve>& curves) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = 0;
  double ymin = std::numeric_limits<double>::infinity(), ymax = 0;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.data.x.size(); ++i) {
      if (!(c.data.x[i] > 0 && c.data.y[i] > 0)) continue;
      xmin = std::min(xmin, c.data.x[i]);
      xmax = std::max(xmax, c.data.x[i]);
      ymin = std::min(ymin, c.data.y[i]);
      ymax = std::max(ymax, c.data.y[i]);
    }
  }
  o << "<g>\n<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << w << "\" height=\"" << h
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << x0 + w / 2 << "\" y=\"" << y0 - 8 << "\" text-anchor=\"middle\">" << title
    << "</text>\n";
  o << "<text x=\"" << x0 + w / 2 << "\" y=\"" << y0 + h + 34
    << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
  if (!(xmax > 0) || !(ymax > 0)) {
    o << "</g>\n";
    return;
  }
  const double lx0 = std::floor(std::log10(xmin)), lx1 = std::ceil(std::log10(xmax));
  const double ly0 = std::floor(std::log10(ymin)), ly1 = std::max(std::ceil(std::log10(ymax)), ly0 + 1);
  const double sx = w / std::max(lx1 - lx0, 1.0);
  const double sy = h / (ly1 - ly0);
  auto px = [&](double x) { return x0 + (std::log10(x) - lx0) * sx; };
  auto py = [&](double y) { return y0 + h - (std::log10(y) - ly0) * sy; };
  for (double d = lx0; d <= lx1; d += 1) {
    o << "<text x=\"" << x0 + (d - lx0) * sx << "\" y=\"" << y0 + h + 16
      << "\" text-anchor=\"middle\" font-size=\"10\">1e" << d << "</text>\n";
  }
  for (double d = ly0; d <= ly1; d += 1) {
    o << "<text x=\"" << x0 - 4 << "\" y=\"" << y0 + h - (d - ly0) * sy + 3
      << "\" text-anchor=\"end\" font-size=\"10\">1e" << d << "</text>\n";
  }
  double ly = y0 + 14;
  for (const auto& c : curves) {
    o << "<polyline fill=\"none\" stroke=\"" << c.color << "\""
      << (c.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (std::size_t i = 0; i < c.data.x.size(); ++i) {
      if (!(c.data.x[i] > 0 && c.data.y[i] > 0)) continue;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(c.data.x[i]), py(c.data.y[i]));
      o << buf;
    }
    o << "\"/>\n";
    o << "<text x=\"" << x0 + 8 << "\" y=\"" << ly << "\" font-size=\"11\" fill=\"" << c.color
      << "\">" << c.label << "</text>\n";
    ly += 14;
  }
  o << "</g>\n";
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kCsvSchemaLine << '\n' << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << num(r.epsilon) << ',' << num(r.v12) << ',' << num(r.v13) << ',' << num(r.v23) << ','
        << to_string(r.protocol) << ',' << to_string(r.initial_state) << ',' << num(r.infidelity)
        << ',' << opt_num(r.infidelity_corrected) << ',' << opt_num(r.perturb_prediction) << '\n';
  }
}

std::string summary_json(const std::vector<SweepRecord>& records, const ExperimentConfig& cfg,
                         SweepKind kind) {
  json j;
  switch (kind) {
    case SweepKind::Epsilon:
      j = epsilon_summary(records, cfg);
      j["kind"] = "epsilon";
      break;
    case SweepKind::Vdw:
      j = vdw_summary(records);
      j["kind"] = "vdw";
      j["epsilon"] = cfg.sweep.epsilon;
      break;
    case SweepKind::Correction:
      j = correction_summary(records);
      j["kind"] = "correction";
      break;
  }
  j["records"] = records.size();
  return j.dump(2) + "\n";
}

std::string render_svg(const std::vector<SweepRecord>& records, SweepKind kind) {
  std::ostringstream o;
  const bool four = kind == SweepKind::Epsilon;
  const double W = four ? 900 : 480, H = four ? 720 : 380;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string single = "#1f77b4", dbl = "#d62728", pred = "#2ca02c";
  if (kind == SweepKind::Epsilon) {
    const std::array<std::pair<InitialState, const char*>, 4> panels{
        {{InitialState::g00, "(a) gate |00>"},
         {InitialState::g01, "(b) gate |01>, |10>"},
         {InitialState::g11, "(c) gate |11>"},
         {InitialState::superposition, "(d) superposition"}}};
    for (std::size_t k = 0; k < panels.size(); ++k) {
      const auto [s, title] = panels[k];
      std::vector<Curve> curves;
      if (has(records, ProtocolKind::SinglePulse, s)) {
        curves.push_back({"single", single, false, series(records, ProtocolKind::SinglePulse, s)});
      }
      if (has(records, ProtocolKind::DoublePulse, s)) {
        curves.push_back({"double", dbl, false, series(records, ProtocolKind::DoublePulse, s)});
      }
      if (s == InitialState::g00) {
        for (ProtocolKind p : {ProtocolKind::SinglePulse, ProtocolKind::DoublePulse}) {
          Series ps;
          for (const auto& r : select(records, p, s)) {
            if (r.perturb_prediction) {
              ps.x.push_back(r.epsilon);
              ps.y.push_back(*r.perturb_prediction);
            }
          }
          if (!ps.x.empty()) {
            curves.push_back({std::string("perturbative ") + std::string(to_string(p)), pred, true, ps});
          }
        }
      }
      panel(o, 80 + (k % 2) * 430, 40 + (k / 2) * 340, 340, 260, title, "epsilon", curves);
    }
  } else if (kind == SweepKind::Vdw) {
    panel(o, 80, 40, 360, 280, "infidelity vs V13 = V23", "V / (hbar Omega0)",
          {{"single", single, false, series(records, ProtocolKind::SinglePulse, InitialState::superposition, true)},
           {"double", dbl, false, series(records, ProtocolKind::DoublePulse, InitialState::superposition, true)}});
  } else {
    panel(o, 80, 40, 360, 280, "phase correction", "epsilon",
          {{"double", dbl, false, series(records, ProtocolKind::DoublePulse, InitialState::superposition)},
           {"double + correction", pred, false,
            series(records, ProtocolKind::DoublePulse, InitialState::superposition, false, true)}});
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<std::filesystem::path> emit_outputs(const std::vector<SweepRecord>& records,
                                                const ExperimentConfig& cfg, SweepKind kind,
                                                const std::string& stem) {
  if (records.empty()) throw std::invalid_argument("emit_outputs: no records");
  const auto& dir = cfg.output.directory;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::string& ext, const std::string& content) {
    const auto path = dir / (stem + ext);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
    written.push_back(path);
  };
  if (cfg.output.csv) {
    std::ostringstream o;
    write_csv(o, records);
    write(".csv", o.str());
  }
  if (cfg.output.json) write(".json", summary_json(records, cfg, kind));
  if (cfg.output.svg) write(".svg", render_svg(records, kind));
  return written;
}

}  // namespace xtalk
