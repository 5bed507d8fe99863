// Copyright 2026 The dmipt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DMIPT_SCALING_H
#define DMIPT_SCALING_H

namespace dmipt {

/// Critical point and exponents of the measurement-induced transition in the brick-wall
/// Clifford circuit. Defaults are the literature values used throughout.
struct ScalingConstants {
    double p_c = 0.15995;
    double nu = 1.260;
    double z = 1.0;
    double alpha = 1.57;

    /// Scaling dimension of the drive velocity, z + 1/nu.
    double r() const { return z + 1.0 / nu; }
    /// Coefficient of ln R at p_c for drives from the area-law side, -alpha/r.
    double delta() const { return -alpha / r(); }

    /// Throws std::invalid_argument unless nu > 0, z > 0, and r > 1.
    void validate() const;
};

struct DerivedExponents {
    double r;
    double delta;
    double inv_nu_r;  // 1/(nu r), the exponent of R in g R^{-1/(nu r)}
    double inv_r;
};

DerivedExponents derived_exponents(const ScalingConstants &c);

}  // namespace dmipt

#endif
