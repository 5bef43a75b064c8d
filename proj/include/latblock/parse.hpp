#pragma once

#include "latblock/covariance.hpp"
#include "latblock/geometry.hpp"

#include <string>
#include <vector>

namespace latblock {

/// `name` or `name:key=value,...`, e.g. `hypercube:d=2`, `circle:r=0.5`,
/// `rotrect:theta=0.7854,l1=0.7071,l2=0.7071`, `hex:l=0.5`, `trapezoid:b1=0.3,b2=0.6`,
/// `parallelogram:gamma=1.0472,l1=0.5,l2=0.5`, `sphere:r=0.5`, `cylinder:r=0.4,h=0.9`,
/// `diamond`, `righttri`, `isotri`.
Template parse_template(const std::string& spec);

/// `expsep:b1=1,b2=1`, `gausssep:b1=0.5,b2=0.3`, `gaussiso:b=2[,d=2]`, `white[:d=2]`,
/// `table:@file.csv` (columns k1..kd,sigma). `dim_hint` fills in d where the string omits it.
Covariogram parse_covariogram(const std::string& spec, int dim_hint = 0);

/// Comma-separated reals.
std::vector<double> parse_reals(const std::string& text);
/// As parse_reals; with dim > 0 a single value is broadcast to dim entries.
Vector parse_vector(const std::string& text, int dim = 0);

}  // namespace latblock
