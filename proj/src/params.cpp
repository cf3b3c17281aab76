#include "morreylab/params.hpp"

#include "morreylab/errors.hpp"

#include <cmath>
#include <sstream>

namespace morreylab {

GapFraction GapFraction::from_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw DomainError("gap fraction must lie in (0,1), got " + std::to_string(gamma));
    return {gamma, 1.0 - gamma};
}

GapFraction GapFraction::from_codimension(double d) {
    if (!(d > 0.0 && d < 1.0))
        throw DomainError("k - lambda must lie in (0,1)");
    const double c = std::exp2(1.0 - 1.0 / d);
    return {1.0 - c, c};
}

GapFraction MorreyParams::gamma() const {
    if (lambda_integer)
        throw IntegerLambdaGamma("gamma is undefined for integer lambda");
    return gamma_;
}

double MorreyParams::triple_decay() const {
    if (!alpha)
        throw ConfigError("alpha is not set");
    return lambda - *alpha * p - p;
}

std::string MorreyParams::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "n=" << n << " p=" << p << " lambda=" << lambda;
    if (q) os << " q=" << *q;
    if (alpha) os << " alpha=" << *alpha;
    os << " mode=" << (mode == ParamMode::radial ? "radial" : "general");
    return os.str();
}

MorreyParams derive(int n, double p, double lambda, std::optional<double> q,
                    std::optional<double> alpha, ParamMode mode) {
    if (!std::isfinite(p) || !std::isfinite(lambda) || (q && !std::isfinite(*q)) ||
        (alpha && !std::isfinite(*alpha)))
        throw ConfigError("parameters must be finite");
    if (n < 2)
        throw OrderingViolation("n must be at least 2");
    const bool p_ok = mode == ParamMode::radial ? p >= 1.0 : p > 1.0;
    if (!p_ok || !(p < lambda) || !(lambda < n)) {
        throw OrderingViolation(mode == ParamMode::radial
                                    ? "need 1 <= p < lambda < n"
                                    : "need 1 < p < lambda < n");
    }
    if (q && !(*q > 0.0))
        throw ConfigError("q must be positive");

    MorreyParams m;
    m.n = n;
    m.p = p;
    m.lambda = lambda;
    m.q = q;
    m.alpha = alpha;
    m.mode = mode;
    m.k = static_cast<int>(std::ceil(lambda));
    m.p1 = lambda * p / (lambda - p);
    m.p2 = n * p / (lambda - p);
    m.lambda_integer = lambda == std::floor(lambda);
    if (!m.lambda_integer)
        m.gamma_ = GapFraction::from_codimension(m.k - lambda);

    if (alpha) {
        if (!(*alpha > 0.0)) throw AlphaRangeViolation("alpha must be positive");
        const double hi = (lambda - p) / p;
        if (q && mode == ParamMode::general && !(lambda / *q <= *alpha && *alpha < hi))
            throw AlphaRangeViolation("alpha must satisfy lambda/q <= alpha < (lambda-p)/p");
        if (q && mode == ParamMode::radial && !(*alpha <= hi))
            throw AlphaRangeViolation("radial alpha must satisfy alpha <= (lambda-p)/p");
    }
    return m;
}

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + key + ": '" + v + "'");
    }
}
} // namespace

MorreyParams parse_config(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::optional<double> n, p, lambda, q, alpha;
    ParamMode mode = ParamMode::general;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) eq = line.find(':');
        if (eq == std::string::npos) throw ConfigError("expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "n") n = to_real(key, val);
        else if (key == "p") p = to_real(key, val);
        else if (key == "lambda") lambda = to_real(key, val);
        else if (key == "q") q = to_real(key, val);
        else if (key == "alpha") alpha = to_real(key, val);
        else if (key == "mode") {
            if (val == "radial") mode = ParamMode::radial;
            else if (val == "general") mode = ParamMode::general;
            else throw ConfigError("mode must be radial or general");
        } else {
            throw ConfigError("unknown key " + key);
        }
    }
    if (!n || !p || !lambda) throw ConfigError("n, p and lambda are required");
    if (*n != std::floor(*n)) throw ConfigError("n must be an integer");
    return derive(static_cast<int>(*n), *p, *lambda, q, alpha, mode);
}

double hausdorff_dimension(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw DomainError("hausdorff_dimension needs gamma in (0,1)");
    return hausdorff_dimension(GapFraction{gamma, 1.0 - gamma});
}

double hausdorff_dimension(const GapFraction& g) {
    if (!(g.value > 0.0 || g.complement < 1.0) || !(g.complement > 0.0) || !(g.complement < 1.0))
        throw DomainError("hausdorff_dimension needs gamma in (0,1)");
    return -std::log(2.0) / (std::log(g.complement) - std::log(2.0));
}

} // namespace morreylab
