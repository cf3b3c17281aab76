#pragma once
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace morreylab {

struct Node {
    double x;
    double w;
};
using Rule = std::vector<Node>;

// Gauss-Legendre nodes on [-1,1]; supported orders 4, 8, 16.
std::span<const Node> gauss_legendre(int order);

void append_gauss(Rule& rule, double a, double b, int order = 8);

// A point where the integrand varies on the length scale |x - at| + scale.
struct Focus {
    double at;
    double scale;
    // When finite the integrand behaves like |x - at|^power; the innermost cells
    // [at, at +- scale] then get a single node carrying the power-law integral.
    double power = std::numeric_limits<double>::quiet_NaN();
};

// Composite Gauss rule on [a,b] with cells refined geometrically (ratio 2) towards
// every focus and extra breakpoints added verbatim.
Rule graded_rule(double a, double b, std::span<const Focus> foci,
                 std::span<const double> breaks = {}, int order = 8, int min_cells = 1);

double integrate_rule(const Rule& rule, const std::function<double(double)>& f);

// Neumaier compensated sum.
class KahanSum {
public:
    void add(double x);
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0, c_ = 0.0;
};

// Endpoint-singular smooth integrands; thin wrapper over Boost tanh-sinh.
double tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol,
                 std::int64_t* evaluations = nullptr);

// Surface area of the unit sphere S^{m} in R^{m+1}; sphere_area(0) = 2.
double sphere_area(int m);

} // namespace morreylab
