#pragma once

#include <string>
#include <string_view>

namespace glacia {

/// Bounded, odd, nondecreasing functions normalised to the limits -1 and +1.
enum class SigmoidFamily {
    Tanh,       ///< tanh(u)
    Logistic,   ///< 2 / (1 + exp(-u)) - 1 == tanh(u / 2)
    Algebraic,  ///< u / sqrt(1 + u^2)
    Erf,        ///< erf(u)
};

std::string_view to_string(SigmoidFamily family);
/// Throws ConfigError on an unknown name.
SigmoidFamily sigmoid_family_from_string(std::string_view name);

double sigmoid(SigmoidFamily family, double u);
double sigmoid_deriv(SigmoidFamily family, double u);
double sigmoid_deriv2(SigmoidFamily family, double u);
double sigmoid_deriv3(SigmoidFamily family, double u);

/// Maximum of the derivative, attained at u = 0.
double sigmoid_max_deriv(SigmoidFamily family);

/// Inverse of the sigmoid on (-1, 1). Throws RangeError outside.
double sigmoid_inverse(SigmoidFamily family, double v);

/// Nonnegative u with sigmoid_deriv(u) == slope, for 0 < slope <= max deriv.
/// Closed form for every shipped family; throws RangeError otherwise.
double sigmoid_deriv_inverse(SigmoidFamily family, double slope);

}  // namespace glacia
