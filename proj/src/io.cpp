#include "nanorod/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nanorod {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw OutputError("write failed: " + path);
}

std::string scan_csv(const ScanTable& t) {
  std::ostringstream os;
  os << "param,energy,tail_bound,cond_estimate\n";
  for (const ScanRow& r : t.rows)
    os << format_double(r.param) << ',' << format_double(r.energy) << ',' << format_double(r.tail_bound) << ','
       << format_double(r.cond_estimate) << '\n';
  return os.str();
}

std::string fit_json(const SlopeFit& fit) {
  nlohmann::ordered_json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["window"] = {fit.window_lo, fit.window_hi};
  j["points"] = fit.points;
  j["admissible"] = fit.admissible;
  return j.dump(2) + "\n";
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "x1,x2,x3,re_ux,re_uy,re_uz,im_ux,im_uy,im_uz,asym_ux,asym_uy,asym_uz,abs_diff\n";
  for (const CompareRow& r : rows) {
    for (int k = 0; k < 3; ++k) os << format_double(r.x(k)) << ',';
    for (int k = 0; k < 3; ++k) os << format_double(r.numeric(k).real()) << ',';
    for (int k = 0; k < 3; ++k) os << format_double(r.numeric(k).imag()) << ',';
    for (int k = 0; k < 3; ++k) os << format_double(r.asymptotic(k).real()) << ',';
    os << format_double((r.numeric - r.asymptotic).norm()) << '\n';
  }
  return os.str();
}

double relative_l2(const std::vector<CompareRow>& rows) {
  double num = 0, diff = 0;
  for (const CompareRow& r : rows) {
    num += r.numeric.squaredNorm();
    diff += (r.numeric - r.asymptotic).squaredNorm();
  }
  if (diff == 0.0) return 0.0;
  if (num == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(diff / num);
}

}  // namespace nanorod
