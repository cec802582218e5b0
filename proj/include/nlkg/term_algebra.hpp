#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlkg/nonlinearity.hpp"
#include "nlkg/spectral.hpp"

namespace nlkg {

using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Rational& q);
double to_double(const Rational& q);
Rational factorial(int n);

// Immutable expression DAG over w-powers, the Duhamel operator and products.
//
// Construction always returns the canonical form: products are flattened,
// w-powers inside a product are merged into a single factor, w^0 factors are
// dropped, and the remaining factors are sorted. A product with no factor is
// w^0 and a product with one factor is that factor, so structural equality of
// canonical forms is equality of expressions.
class TermExpr {
public:
    enum class Kind { WPower = 0, Duhamel = 1, Product = 2 };

    static TermExpr w_power(int exponent);
    static TermExpr duhamel(TermExpr child);
    static TermExpr product(std::vector<TermExpr> factors);
    static TermExpr unit() { return w_power(0); }

    Kind kind() const noexcept;
    // WPower exponent; 0 for other kinds.
    int power() const noexcept;
    const std::vector<TermExpr>& children() const noexcept;

    bool is_unit() const noexcept { return kind() == Kind::WPower && power() == 0; }
    // Homogeneity degree in w.
    int degree() const noexcept;
    // Nesting depth of the Duhamel operator.
    int duhamel_depth() const noexcept;

    std::string to_string() const;

    friend std::strong_ordering operator<=>(const TermExpr& a, const TermExpr& b);
    friend bool operator==(const TermExpr& a, const TermExpr& b) { return (a <=> b) == 0; }

private:
    struct Node;
    explicit TermExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

TermExpr operator*(const TermExpr& a, const TermExpr& b);

// Monomial in the Taylor variables y3, y4, ...; exponents()[i] belongs to y_{i+3}.
class Monomial {
public:
    Monomial() = default;
    static Monomial variable(int index, int exponent = 1);

    int exponent(int index) const noexcept;
    int degree() const noexcept;
    bool empty() const noexcept { return exps_.empty(); }
    // Largest variable index with positive exponent, 0 for the empty monomial.
    int max_index() const noexcept { return exps_.empty() ? 0 : static_cast<int>(exps_.size()) + 2; }
    int min_index() const noexcept;
    const std::vector<int>& exponents() const noexcept { return exps_; }

    // Product of the variables raised to their exponents; values[i] is y_{i+3}.
    double evaluate(std::span<const double> values) const;
    std::string to_string() const;

    friend Monomial operator*(const Monomial& a, const Monomial& b);
    // Descending lexicographic: y3^3 sorts before y3 y5 before y4^2.
    friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial& a, const Monomial& b) = default;

private:
    void trim();
    std::vector<int> exps_;
};

struct WTerm {
    Rational coefficient;
    Monomial monomial;
    TermExpr expr;
};

// Sum of rational-coefficient terms (monomial in y) x (expression DAG).
// Terms are unique per (monomial, expr) and coefficients are nonzero.
class WPolynomial {
public:
    WPolynomial() = default;
    static WPolynomial term(Rational c, Monomial m, TermExpr e);

    void add(const Rational& c, const Monomial& m, const TermExpr& e);
    WPolynomial& operator+=(const WPolynomial& other);
    WPolynomial& operator*=(const Rational& c);

    // Gamma applied termwise (linearity).
    WPolynomial duhamel() const;
    WPolynomial times_monomial(const Monomial& m) const;

    bool empty() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }
    std::vector<WTerm> terms() const;
    // Sum of all coefficients.
    Rational coefficient_mass() const;

    // Canonical text, e.g. "10 * y3^2 * w^2 * G(w^3)"; "0" when empty.
    std::string to_string() const;

    friend WPolynomial operator*(const WPolynomial& a, const WPolynomial& b);
    friend bool operator==(const WPolynomial& a, const WPolynomial& b) = default;

private:
    using Key = std::pair<Monomial, TermExpr>;
    std::map<Key, Rational> terms_;
};

WPolynomial operator+(WPolynomial a, const WPolynomial& b);

// k_N = min(floor((N-3)/2), floor(N/3)); N >= 5.
int k_max(int order);

// Correction functional W_N[y3..y_{N-2}]. Empty for N = 3, 4.
WPolynomial build_W(int order);
// W~_N = y_N w^N + W_N.
WPolynomial build_W_tilde(int order);
// Cubic-case functional for odd N >= 3 (no y variables).
WPolynomial build_cubic_W(int order);

// Substitute exact values for some variables; others stay symbolic.
WPolynomial substitute(const WPolynomial& poly, const std::map<int, Rational>& values);

// Coefficient-weighted expression sum with floating point weights.
struct TermSum {
    std::vector<std::pair<double, TermExpr>> terms;
    bool empty() const noexcept { return terms.empty(); }
};

// Substitute numbers for every variable; values[i] is y_{i+3}. Throws
// InvalidInput if a monomial uses a variable beyond the supplied values.
TermSum specialize(const WPolynomial& poly, std::span<const double> values);
// For polynomials without y variables.
TermSum as_term_sum(const WPolynomial& poly);

// Numerical realisation of expression DAGs for one free solution.
//
// A Duhamel node evaluates as Gamma(dealias(child)), the same forcing the
// interaction solver feeds into Gamma. Products are exact grid products.
// Sub-expressions are memoised per evaluator.
class TermEvaluator {
public:
    TermEvaluator(const StateH& phi, const TimeWindow& window);

    const FieldSeries& free() const noexcept { return free_; }
    const FieldSeries& eval(const TermExpr& expr);
    FieldSeries eval(const TermSum& sum);

private:
    FieldSeries free_;
    std::map<TermExpr, FieldSeries> memo_;
};

FieldSeries evaluate(const TermSum& sum, const StateH& phi, const TimeWindow& window);

// One term of a W-polynomial paired with w_phi: coefficient * monomial * value,
// where value = int expr * w_phi d(t,x).
struct PairedTerm {
    double coefficient;
    Monomial monomial;
    double value;
};

std::vector<PairedTerm> pair_with_free(const WPolynomial& poly, TermEvaluator& evaluator);
// Sum of coefficient * monomial(values) * value.
double evaluate_paired(std::span<const PairedTerm> paired, std::span<const double> values);

// A_n(lambda phi) = A_0 + sum_{k=1}^n N^(k)(w)/k! (Gamma A_{n-k})^k with
// A_0 = N(w), w = w_{lambda phi}. Each term is dealiased.
FieldSeries build_A(int n, const StateH& phi, double lambda, const Nonlinearity& spec, const TimeWindow& window);

// Brute-force series-in-lambda propagator for N(y) = sum_{m>=3} y_m/m! y^m.
//
// Runs the Picard iteration u = lambda w + Gamma dealias(N(u)) on truncated
// power series in lambda and returns the coefficients of N(u_{lambda phi}):
// result[k] is the lambda^k coefficient, k = 0..max_order. taylor[i] is y_{i+3}.
std::vector<FieldSeries> picard_series(const StateH& phi, std::span<const double> taylor, int max_order,
                                       const TimeWindow& window);

}  // namespace nlkg
