#pragma once

#include <string>

namespace willmore {

// Element of A_{k,l}: c_sc sin(k t1) cos(l t2) + c_cs cos(k t1) sin(l t2)
//                   + c_cc cos(k t1) cos(l t2) + c_ss sin(k t1) sin(l t2),
// with chart angles t1 = x/r, t2 = y/s on the homogeneous torus.
struct FourierMode {
  int k = 1;
  int l = 0;
  double c_sc = 0.0;
  double c_cs = 0.0;
  double c_cc = 0.0;
  double c_ss = 0.0;

  void validate() const;
  bool boundary() const { return k == 0 || l == 0; }
  bool is_zero() const;
  // Squared coefficients of the basis functions that are not identically zero.
  double active_norm2() const;
  // Mean of Phi^2 over the torus.
  double mean_square() const;
  double value(double t1, double t2) const;
};

// Eigen-patterns of the mode-diagonal quadratic forms, with
// theta+- = k t1 +- l t2.
enum class ModePattern { SinPlus, CosPlus, SinMinus, CosMinus };

FourierMode pattern_mode(int k, int l, ModePattern p);
std::string pattern_name(ModePattern p);
ModePattern pattern_from_name(const std::string& name);

// The invariance modes (1,1), (1,0), (0,1).
bool is_invariance_mode(int k, int l);

}  // namespace willmore
