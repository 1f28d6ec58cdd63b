#include "islab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace islab {

namespace {

std::string fmt(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "K,epsilon,E,k_trunc,err_l2_f0,err_hm1_f1,err_h1_f0,err_l2_f1,ceiling,wall_s\n";
  for (const ReportRow& r : report.rows) {
    os << fmt(r.K) << ',' << fmt(r.epsilon) << ',' << fmt(r.E) << ',' << fmt(r.k_trunc)
       << ',' << fmt(r.err_l2_f0) << ',' << fmt(r.err_hm1_f1) << ',' << fmt(r.err_h1_f0)
       << ',' << fmt(r.err_l2_f1) << ',' << fmt(r.ceiling) << ',' << fmt(r.wall_s)
       << '\n';
  }
  return os.str();
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::vector<ReportRow> rows;
  std::istringstream is(text);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<Real> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    require(vals.size() == 10, "report csv: malformed row");
    ReportRow r;
    r.K = vals[0];
    r.epsilon = vals[1];
    r.E = vals[2];
    r.k_trunc = vals[3];
    r.err_l2_f0 = vals[4];
    r.err_hm1_f1 = vals[5];
    r.err_h1_f0 = vals[6];
    r.err_l2_f1 = vals[7];
    r.ceiling = vals[8];
    r.wall_s = vals[9];
    rows.push_back(r);
  }
  return rows;
}

std::string report_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["version"] = report.version;
  j["config_hash"] = report.config_hash;
  j["physics"] = report.physics;
  j["diameter"] = report.diameter;
  j["epsilon_target"] = report.epsilon_target;
  j["noise_floor_rel"] = report.noise_floor_rel;
  j["noiseless_floor_rel"] = report.noiseless_floor_rel;
  j["plateau_floor_rel"] = report.plateau_floor_rel;
  j["calibrated_ceiling_c"] = report.calibrated_ceiling_c;
  j["m1"] = report.m1;
  j["m2e"] = report.m2e;
  auto rows = nlohmann::ordered_json::array();
  for (const ReportRow& r : report.rows) {
    nlohmann::ordered_json rj;
    rj["K"] = r.K;
    rj["epsilon"] = r.epsilon;
    rj["E"] = std::isfinite(r.E) ? nlohmann::ordered_json(r.E)
                                 : nlohmann::ordered_json(nullptr);
    rj["k_trunc"] = r.k_trunc;
    rj["err_l2_f0"] = r.err_l2_f0;
    rj["err_hm1_f1"] = r.err_hm1_f1;
    rj["err_h1_f0"] = r.err_h1_f0;
    rj["err_l2_f1"] = r.err_l2_f1;
    rj["ceiling"] = r.ceiling;
    rj["lhs_sq"] = r.lhs_sq;
    rj["wall_s"] = r.wall_s;
    rj["ok"] = r.ok;
    rj["note"] = r.note;
    rows.push_back(rj);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

ExperimentReport parse_report_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentReport report;
  report.version = j.value("version", "");
  report.config_hash = j.value("config_hash", "");
  report.physics = j.value("physics", "scalar");
  report.diameter = j.value("diameter", 0.0);
  report.epsilon_target = j.value("epsilon_target", 0.0);
  report.noise_floor_rel = j.value("noise_floor_rel", 0.0);
  report.noiseless_floor_rel = j.value("noiseless_floor_rel", 0.0);
  report.plateau_floor_rel = j.value("plateau_floor_rel", 0.0);
  report.calibrated_ceiling_c = j.value("calibrated_ceiling_c", 0.0);
  report.m1 = j.value("m1", 0.0);
  report.m2e = j.value("m2e", 0.0);
  for (const auto& rj : j.at("rows")) {
    ReportRow r;
    r.K = rj.at("K").get<Real>();
    r.epsilon = rj.at("epsilon").get<Real>();
    r.E = rj.at("E").is_null() ? std::numeric_limits<Real>::quiet_NaN()
                               : rj.at("E").get<Real>();
    r.k_trunc = rj.at("k_trunc").get<Real>();
    r.err_l2_f0 = rj.at("err_l2_f0").get<Real>();
    r.err_hm1_f1 = rj.at("err_hm1_f1").get<Real>();
    r.err_h1_f0 = rj.at("err_h1_f0").get<Real>();
    r.err_l2_f1 = rj.at("err_l2_f1").get<Real>();
    r.ceiling = rj.at("ceiling").get<Real>();
    r.lhs_sq = rj.value("lhs_sq", 0.0);
    r.wall_s = rj.at("wall_s").get<Real>();
    r.ok = rj.value("ok", true);
    r.note = rj.value("note", "");
    report.rows.push_back(r);
  }
  return report;
}

namespace {

struct PlotBox {
  Real x0 = 80, y0 = 40, w = 480, h = 360;
};

std::string polyline(const std::vector<std::pair<Real, Real>>& pts, const char* color) {
  std::ostringstream os;
  os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
  for (const auto& [x, y] : pts) os << x << ',' << y << ' ';
  os << "\"/>\n";
  return os.str();
}

}  // namespace

std::string report_svg(const ExperimentReport& report) {
  // log2 K against log10 of the relative error and of the scaled ceiling
  PlotBox box;
  std::vector<Real> xs, err, ceil;
  for (const ReportRow& r : report.rows) {
    if (!r.ok || r.err_l2_f0 <= 0.0) continue;
    xs.push_back(std::log2(r.K));
    err.push_back(std::log10(r.err_l2_f0));
    // ceiling drawn in the same relative scale as the measured error
    const Real rel_ceiling =
        r.lhs_sq > 0.0 ? r.err_l2_f0 * std::sqrt(r.ceiling / r.lhs_sq) : r.ceiling;
    ceil.push_back(std::log10(std::max(rel_ceiling, 1e-300)));
  }
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
        "viewBox=\"0 0 640 480\">\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  os << "  <text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        "reconstruction error vs K ("
     << report.physics << ")</text>\n";
  if (xs.size() >= 2) {
    Real xmin = xs.front(), xmax = xs.front();
    Real ymin = 1e300, ymax = -1e300;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xmin = std::min(xmin, xs[i]);
      xmax = std::max(xmax, xs[i]);
      ymin = std::min({ymin, err[i], ceil[i]});
      ymax = std::max({ymax, err[i], ceil[i]});
    }
    if (xmax - xmin < 1e-9) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-9) ymax = ymin + 1.0;
    const auto mapx = [&](Real x) { return box.x0 + (x - xmin) / (xmax - xmin) * box.w; };
    const auto mapy = [&](Real y) {
      return box.y0 + box.h - (y - ymin) / (ymax - ymin) * box.h;
    };
    std::vector<std::pair<Real, Real>> perr, pceil;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      perr.emplace_back(mapx(xs[i]), mapy(err[i]));
      pceil.emplace_back(mapx(xs[i]), mapy(ceil[i]));
    }
    os << "  <line x1=\"" << box.x0 << "\" y1=\"" << box.y0 + box.h << "\" x2=\""
       << box.x0 + box.w << "\" y2=\"" << box.y0 + box.h
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "  <line x1=\"" << box.x0 << "\" y1=\"" << box.y0 << "\" x2=\"" << box.x0
       << "\" y2=\"" << box.y0 + box.h << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << polyline(perr, "#d62728");
    os << polyline(pceil, "#1f77b4");
    os << "  <text x=\"" << box.x0 + box.w / 2 << "\" y=\"470\" text-anchor=\"middle\" "
          "font-size=\"13\">log2 K</text>\n";
    os << "  <text x=\"20\" y=\"" << box.y0 + box.h / 2
       << "\" font-size=\"13\" transform=\"rotate(-90 20 " << box.y0 + box.h / 2
       << ")\">log10 relative error</text>\n";
    os << "  <text x=\"" << box.x0 + 8 << "\" y=\"" << box.y0 + 16
       << "\" font-size=\"12\" fill=\"#d62728\">measured</text>\n";
    os << "  <text x=\"" << box.x0 + 8 << "\" y=\"" << box.y0 + 32
       << "\" font-size=\"12\" fill=\"#1f77b4\">theorem ceiling</text>\n";
  } else {
    os << "  <text x=\"320\" y=\"240\" text-anchor=\"middle\" font-size=\"14\">"
          "no rows</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string bound_rows_csv(const BoundSuiteResult& result) {
  std::ostringstream os;
  os << "functional,k_re,k_im,value,bound,ratio,pass\n";
  for (const BoundCheckRow& r : result.rows) {
    os << r.functional << ',' << fmt(r.k_re) << ',' << fmt(r.k_im) << ',' << fmt(r.value)
       << ',' << fmt(r.bound) << ',' << fmt(r.ratio) << ',' << (r.pass ? 1 : 0) << '\n';
  }
  return os.str();
}

void emit_report(const ExperimentReport& report, const std::string& dir,
                 const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& suffix, const std::string& content) {
    const std::string path = dir + "/" + stem + suffix;
    std::ofstream os(path, std::ios::binary);
    require(os.good(), "emit_report: cannot open output file");
    os << content;
    require(os.good(), "emit_report: short write");
  };
  write(".csv", report_csv(report));
  write(".json", report_json(report));
  write(".svg", report_svg(report));
}

bool reports_equal_modulo_timing(const std::string& csv_a, const std::string& csv_b) {
  const auto strip = [](const std::string& text) {
    std::ostringstream out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      const std::size_t cut = line.rfind(',');
      out << (cut == std::string::npos ? line : line.substr(0, cut)) << '\n';
    }
    return out.str();
  };
  return strip(csv_a) == strip(csv_b);
}

}  // namespace islab
