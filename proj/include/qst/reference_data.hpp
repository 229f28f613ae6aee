// Bundled characterization targets used as defaults by the command-line
// pipelines and the regression suites: fourteen squeezed thermal states of
// increasing thermal component (with their quoted uncertainties) and four
// near-boundary Werner states.
#pragma once

#include <array>

namespace qst {

struct CvTargetRow {
  double var_x, sigma_var_x;
  double var_p, sigma_var_p;
  double n_tot, sigma_n_tot;
  double s, sigma_s;
  double mu, sigma_mu;
};

inline constexpr std::array<CvTargetRow, 14> kCvTargets = {{
    {0.48, 0.03, 3.15, 0.09, 0.41, 0.02, 0.39, 0.01, 0.81, 0.03},
    {0.67, 0.04, 3.33, 0.09, 0.50, 0.02, 0.45, 0.01, 0.67, 0.02},
    {0.62, 0.04, 3.77, 0.11, 0.60, 0.02, 0.40, 0.02, 0.66, 0.02},
    {0.69, 0.05, 3.94, 0.11, 0.66, 0.02, 0.41, 0.02, 0.61, 0.02},
    {0.70, 0.05, 4.51, 0.12, 0.80, 0.03, 0.39, 0.02, 0.56, 0.02},
    {0.77, 0.05, 4.54, 0.13, 0.83, 0.03, 0.41, 0.02, 0.54, 0.02},
    {0.77, 0.05, 4.60, 0.13, 0.84, 0.03, 0.41, 0.02, 0.53, 0.02},
    {0.93, 0.06, 5.00, 0.14, 0.98, 0.03, 0.43, 0.02, 0.46, 0.02},
    {0.95, 0.06, 5.36, 0.15, 1.08, 0.03, 0.42, 0.01, 0.44, 0.02},
    {0.93, 0.07, 5.56, 0.15, 1.12, 0.03, 0.41, 0.02, 0.44, 0.02},
    {1.00, 0.07, 5.80, 0.17, 1.20, 0.03, 0.42, 0.02, 0.42, 0.02},
    {1.13, 0.07, 5.87, 0.16, 1.25, 0.03, 0.44, 0.02, 0.39, 0.01},
    {1.11, 0.08, 6.33, 0.18, 1.36, 0.04, 0.42, 0.02, 0.38, 0.01},
    {1.30, 0.08, 6.16, 0.18, 1.36, 0.04, 0.46, 0.02, 0.35, 0.01},
}};

struct DvTargetRow {
  double p, sigma_p;
};

inline constexpr std::array<DvTargetRow, 4> kDvTargets = {{
    {0.32, 0.04},
    {0.35, 0.04},
    {0.28, 0.04},
    {0.44, 0.05},
}};

}  // namespace qst
