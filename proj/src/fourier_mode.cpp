#include "willmore/fourier_mode.hpp"

#include <cmath>

#include "willmore/errors.hpp"

namespace willmore {

void FourierMode::validate() const {
  if (k < 0 || l < 0) throw DomainError("mode indices must be nonnegative");
  if (k == 0 && l == 0) throw DomainError("mode (0,0) is not a Fourier mode");
}

bool FourierMode::is_zero() const { return active_norm2() == 0.0; }

double FourierMode::active_norm2() const {
  if (k == 0) return c_cs * c_cs + c_cc * c_cc;
  if (l == 0) return c_sc * c_sc + c_cc * c_cc;
  return c_sc * c_sc + c_cs * c_cs + c_cc * c_cc + c_ss * c_ss;
}

double FourierMode::mean_square() const {
  return boundary() ? active_norm2() / 2.0 : active_norm2() / 4.0;
}

double FourierMode::value(double t1, double t2) const {
  double s1 = std::sin(k * t1), c1 = std::cos(k * t1);
  double s2 = std::sin(l * t2), c2 = std::cos(l * t2);
  return c_sc * s1 * c2 + c_cs * c1 * s2 + c_cc * c1 * c2 + c_ss * s1 * s2;
}

FourierMode pattern_mode(int k, int l, ModePattern p) {
  FourierMode m{k, l, 0.0, 0.0, 0.0, 0.0};
  switch (p) {
    case ModePattern::SinPlus: m.c_sc = 1.0; m.c_cs = 1.0; break;
    case ModePattern::CosPlus: m.c_cc = 1.0; m.c_ss = -1.0; break;
    case ModePattern::SinMinus: m.c_sc = 1.0; m.c_cs = -1.0; break;
    case ModePattern::CosMinus: m.c_cc = 1.0; m.c_ss = 1.0; break;
  }
  return m;
}

std::string pattern_name(ModePattern p) {
  switch (p) {
    case ModePattern::SinPlus: return "sin+";
    case ModePattern::CosPlus: return "cos+";
    case ModePattern::SinMinus: return "sin-";
    case ModePattern::CosMinus: return "cos-";
  }
  return "?";
}

ModePattern pattern_from_name(const std::string& name) {
  if (name == "sin+") return ModePattern::SinPlus;
  if (name == "cos+") return ModePattern::CosPlus;
  if (name == "sin-") return ModePattern::SinMinus;
  if (name == "cos-") return ModePattern::CosMinus;
  throw UsageError("unknown mode pattern '" + name + "'");
}

bool is_invariance_mode(int k, int l) {
  return (k == 1 && l == 1) || (k == 1 && l == 0) || (k == 0 && l == 1);
}

}  // namespace willmore
