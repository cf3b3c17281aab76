#pragma once
#include <optional>
#include <string>

namespace morreylab {

// Gap fraction gamma stored together with its complement 1 - gamma. When lambda
// sits just below an integer, gamma rounds to 1 in double precision while the
// complement 2^(1 - 1/(k - lambda)) is still representable.
struct GapFraction {
    double value = 0.5;
    double complement = 0.5;

    static GapFraction from_gamma(double gamma);
    static GapFraction from_codimension(double k_minus_lambda);
};

enum class ParamMode { general, radial };

struct MorreyParams {
    int n = 0;
    double p = 0;
    double lambda = 0;
    std::optional<double> q;
    std::optional<double> alpha;
    ParamMode mode = ParamMode::general;

    int k = 0;
    double p1 = 0;
    double p2 = 0;
    bool lambda_integer = false;

    // Throws IntegerLambdaGamma when lambda is an integer.
    GapFraction gamma() const;
    // Exponent of the triple-norm tail envelope: lambda - alpha p - p.
    double triple_decay() const;

    std::string describe() const;

private:
    GapFraction gamma_{};
    friend MorreyParams derive(int, double, double, std::optional<double>,
                               std::optional<double>, ParamMode);
};

MorreyParams derive(int n, double p, double lambda, std::optional<double> q = {},
                    std::optional<double> alpha = {},
                    ParamMode mode = ParamMode::general);

// Flat "key = value" text, '#' starts a comment. Keys: n p lambda q alpha mode.
MorreyParams parse_config(const std::string& text);

double hausdorff_dimension(double gamma);
double hausdorff_dimension(const GapFraction& gamma);

} // namespace morreylab
