#include <algorithm>
#include <sstream>

#include "nlkg/errors.hpp"
#include "nlkg/term_algebra.hpp"

namespace nlkg {

std::string to_string(const Rational& q) {
    const auto num = boost::multiprecision::numerator(q);
    const auto den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational factorial(int n) {
    if (n < 0) throw InvalidInput("factorial of negative number");
    Rational r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// --- TermExpr ----------------------------------------------------------------

struct TermExpr::Node {
    Kind kind;
    int power = 0;
    std::vector<TermExpr> children;
    int degree = 0;
    int depth = 0;
};

TermExpr TermExpr::w_power(int exponent) {
    if (exponent < 0) throw InvalidInput("TermExpr: negative w exponent");
    auto n = std::make_shared<Node>();
    n->kind = Kind::WPower;
    n->power = exponent;
    n->degree = exponent;
    return TermExpr(std::move(n));
}

TermExpr TermExpr::duhamel(TermExpr child) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Duhamel;
    n->degree = child.degree();
    n->depth = child.duhamel_depth() + 1;
    n->children.push_back(std::move(child));
    return TermExpr(std::move(n));
}

TermExpr TermExpr::product(std::vector<TermExpr> factors) {
    int w_exp = 0;
    std::vector<TermExpr> rest;
    auto absorb = [&](const TermExpr& f, auto& self) -> void {
        switch (f.kind()) {
            case Kind::WPower:
                w_exp += f.power();
                break;
            case Kind::Product:
                for (const auto& c : f.children()) self(c, self);
                break;
            case Kind::Duhamel:
                rest.push_back(f);
                break;
        }
    };
    for (const auto& f : factors) absorb(f, absorb);
    if (w_exp > 0) rest.push_back(w_power(w_exp));
    if (rest.empty()) return unit();
    if (rest.size() == 1) return rest.front();
    std::sort(rest.begin(), rest.end());
    auto n = std::make_shared<Node>();
    n->kind = Kind::Product;
    for (const auto& c : rest) {
        n->degree += c.degree();
        n->depth = std::max(n->depth, c.duhamel_depth());
    }
    n->children = std::move(rest);
    return TermExpr(std::move(n));
}

TermExpr::Kind TermExpr::kind() const noexcept { return node_->kind; }
int TermExpr::power() const noexcept { return node_->power; }
const std::vector<TermExpr>& TermExpr::children() const noexcept { return node_->children; }
int TermExpr::degree() const noexcept { return node_->degree; }
int TermExpr::duhamel_depth() const noexcept { return node_->depth; }

std::strong_ordering operator<=>(const TermExpr& a, const TermExpr& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = static_cast<int>(a.kind()) <=> static_cast<int>(b.kind()); c != 0) return c;
    if (auto c = a.power() <=> b.power(); c != 0) return c;
    const auto& ac = a.children();
    const auto& bc = b.children();
    return std::lexicographical_compare_three_way(ac.begin(), ac.end(), bc.begin(), bc.end());
}

TermExpr operator*(const TermExpr& a, const TermExpr& b) { return TermExpr::product({a, b}); }

std::string TermExpr::to_string() const {
    switch (kind()) {
        case Kind::WPower:
            if (power() == 0) return "1";
            if (power() == 1) return "w";
            return "w^" + std::to_string(power());
        case Kind::Duhamel:
            return "G(" + children().front().to_string() + ")";
        case Kind::Product: {
            std::string out;
            const auto& ch = children();
            for (std::size_t i = 0; i < ch.size();) {
                std::size_t j = i;
                while (j < ch.size() && ch[j] == ch[i]) ++j;
                if (!out.empty()) out += " * ";
                out += ch[i].to_string();
                if (j - i > 1) out += "^" + std::to_string(j - i);
                i = j;
            }
            return out;
        }
    }
    return {};
}

// --- Monomial ----------------------------------------------------------------

Monomial Monomial::variable(int index, int exponent) {
    if (index < 3) throw InvalidInput("Monomial: variable index must be >= 3");
    if (exponent < 0) throw InvalidInput("Monomial: negative exponent");
    Monomial m;
    m.exps_.assign(static_cast<std::size_t>(index - 2), 0);
    m.exps_.back() = exponent;
    m.trim();
    return m;
}

void Monomial::trim() {
    while (!exps_.empty() && exps_.back() == 0) exps_.pop_back();
}

int Monomial::exponent(int index) const noexcept {
    const int i = index - 3;
    if (i < 0 || i >= static_cast<int>(exps_.size())) return 0;
    return exps_[static_cast<std::size_t>(i)];
}

int Monomial::degree() const noexcept {
    int d = 0;
    for (int e : exps_) d += e;
    return d;
}

int Monomial::min_index() const noexcept {
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        if (exps_[i] > 0) return static_cast<int>(i) + 3;
    }
    return 0;
}

double Monomial::evaluate(std::span<const double> values) const {
    if (exps_.size() > values.size()) {
        throw InvalidInput("Monomial::evaluate: missing value for y" + std::to_string(max_index()));
    }
    double r = 1.0;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        for (int e = 0; e < exps_[i]; ++e) r *= values[i];
    }
    return r;
}

std::string Monomial::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        if (exps_[i] == 0) continue;
        if (!out.empty()) out += " * ";
        out += "y" + std::to_string(i + 3);
        if (exps_[i] > 1) out += "^" + std::to_string(exps_[i]);
    }
    return out;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.exps_.assign(std::max(a.exps_.size(), b.exps_.size()), 0);
    for (std::size_t i = 0; i < a.exps_.size(); ++i) r.exps_[i] += a.exps_[i];
    for (std::size_t i = 0; i < b.exps_.size(); ++i) r.exps_[i] += b.exps_[i];
    r.trim();
    return r;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    const std::size_t n = std::max(a.exps_.size(), b.exps_.size());
    for (std::size_t i = 0; i < n; ++i) {
        const int ea = i < a.exps_.size() ? a.exps_[i] : 0;
        const int eb = i < b.exps_.size() ? b.exps_[i] : 0;
        if (ea != eb) return eb <=> ea;
    }
    return std::strong_ordering::equal;
}

// --- WPolynomial -------------------------------------------------------------

WPolynomial WPolynomial::term(Rational c, Monomial m, TermExpr e) {
    WPolynomial p;
    p.add(c, m, e);
    return p;
}

void WPolynomial::add(const Rational& c, const Monomial& m, const TermExpr& e) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(Key{m, e}, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

WPolynomial& WPolynomial::operator+=(const WPolynomial& other) {
    for (const auto& [key, c] : other.terms_) add(c, key.first, key.second);
    return *this;
}

WPolynomial& WPolynomial::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [key, coef] : terms_) coef *= c;
    return *this;
}

WPolynomial operator+(WPolynomial a, const WPolynomial& b) { return a += b; }

WPolynomial operator*(const WPolynomial& a, const WPolynomial& b) {
    WPolynomial r;
    for (const auto& [ka, ca] : a.terms_) {
        for (const auto& [kb, cb] : b.terms_) {
            r.add(ca * cb, ka.first * kb.first, ka.second * kb.second);
        }
    }
    return r;
}

WPolynomial WPolynomial::duhamel() const {
    WPolynomial r;
    for (const auto& [key, c] : terms_) r.add(c, key.first, TermExpr::duhamel(key.second));
    return r;
}

WPolynomial WPolynomial::times_monomial(const Monomial& m) const {
    WPolynomial r;
    for (const auto& [key, c] : terms_) r.add(c, key.first * m, key.second);
    return r;
}

std::vector<WTerm> WPolynomial::terms() const {
    std::vector<WTerm> out;
    out.reserve(terms_.size());
    for (const auto& [key, c] : terms_) out.push_back({c, key.first, key.second});
    return out;
}

Rational WPolynomial::coefficient_mass() const {
    Rational total = 0;
    for (const auto& [key, c] : terms_) total += c;
    return total;
}

std::string WPolynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [key, c] : terms_) {
        const auto& [mono, expr] = key;
        Rational mag = c;
        if (c < 0) {
            os << (first ? "-" : " - ");
            mag = -c;
        } else if (!first) {
            os << " + ";
        }
        first = false;
        std::vector<std::string> parts;
        if (mag != 1 || mono.empty()) parts.push_back(nlkg::to_string(mag));
        if (!mono.empty()) parts.push_back(mono.to_string());
        if (!expr.is_unit() || parts.empty()) parts.push_back(expr.to_string());
        for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? " * " : "") << parts[i];
    }
    return os.str();
}

}  // namespace nlkg
