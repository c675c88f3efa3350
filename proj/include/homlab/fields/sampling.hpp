#pragma once

#include <vector>

#include "homlab/fields/matrix_field.hpp"
#include "homlab/numerics/assembly.hpp"
#include "homlab/numerics/grid.hpp"

namespace homlab {

/// Coefficient value at every element center.
inline std::vector<double> sample_elements(const Grid& g, const CoefficientField& a) {
    std::vector<double> v(g.element_count());
    for (std::size_t e = 0; e < v.size(); ++e) v[e] = a(g.element_center(e));
    return v;
}

inline ElementCoefficients sample_elements(const Grid& g, const MatrixField& A) {
    ElementCoefficients c;
    c.matrices.resize(g.element_count());
    for (std::size_t e = 0; e < c.matrices.size(); ++e) c.matrices[e] = A(g.element_center(e));
    return c;
}

}  // namespace homlab
