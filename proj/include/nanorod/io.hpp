#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nanorod/resonance.hpp"

namespace nanorod {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// %.17g
std::string format_double(double v);

void ensure_directory(const std::string& dir);
void write_text(const std::string& path, const std::string& content);

// header "param,energy,tail_bound,cond_estimate"
std::string scan_csv(const ScanTable& t);
// {"slope", "intercept", "r2", "window": [lo, hi], "points", "admissible"}
std::string fit_json(const SlopeFit& fit);

struct CompareRow {
  Vec3 x;
  Eigen::Vector3cd numeric, asymptotic;
};

// header "x1,x2,x3,re_ux,re_uy,re_uz,im_ux,im_uy,im_uz,asym_ux,asym_uy,asym_uz,abs_diff"
// (asym columns hold real parts; the asymptotic field is real for real contrast and omega = 0)
std::string compare_csv(const std::vector<CompareRow>& rows);

// relative L2 difference sqrt(sum |num - asym|^2 / sum |num|^2); 0 when both vanish
double relative_l2(const std::vector<CompareRow>& rows);

}  // namespace nanorod
