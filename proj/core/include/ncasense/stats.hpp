#pragma once

#include <vector>

namespace nca {

struct MannWhitneyResult {
    double u = 0.0;  // min(U_a, U_b), midrank ties
    double p = 0.0;  // two-sided
};

// Exact null distribution by enumerating all C(n1+n2, n1) labelings;
// p = P(|U_a - n1*n2/2| >= |observed|). Feasible for n1+n2 <= ~20.
MannWhitneyResult mann_whitney_u_exact(const std::vector<double>& a,
                                       const std::vector<double>& b);

// Normal approximation with midrank tie correction and continuity
// correction.
MannWhitneyResult mann_whitney_u_approx(const std::vector<double>& a,
                                        const std::vector<double>& b);

// Exact enumeration when n1+n2 <= 12, normal approximation otherwise.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace nca
