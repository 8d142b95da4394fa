#include "fraclab/catalog.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fraclab/errors.hpp"
#include "fraclab/spectral.hpp"

namespace fraclab {

namespace {

std::vector<double> poly_derivative(const std::vector<double>& p) {
    if (p.size() <= 1) return {};
    std::vector<double> d(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * double(k);
    return d;
}

std::vector<double> poly_times_affine(const std::vector<double>& poly, double p, double q) {
    std::vector<double> out(poly.size() + 1, 0.0);
    for (std::size_t k = 0; k < poly.size(); ++k) {
        out[k] += p * poly[k];
        out[k + 1] += q * poly[k];
    }
    while (out.size() > 1 && out.back() == 0.0) out.pop_back();
    return out;
}

double poly_eval(const std::vector<double>& p, double x) {
    double v = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) v = v * x + p[k];
    return v;
}

bool poly_zero(const std::vector<double>& p) {
    for (double c : p)
        if (c != 0.0) return false;
    return true;
}

} // namespace

SmoothFunction SmoothFunction::polynomial(std::vector<double> coeffs) {
    SmoothFunction f;
    f.add_term({std::move(coeffs), 0.0, 0});
    return f;
}

SmoothFunction SmoothFunction::sine(double omega, double amplitude) {
    SmoothFunction f;
    f.add_term({{amplitude}, omega, 1});
    return f;
}

SmoothFunction SmoothFunction::cosine(double omega, double amplitude) {
    SmoothFunction f;
    f.add_term({{amplitude}, omega, 2});
    return f;
}

void SmoothFunction::add_term(Term t) {
    if (poly_zero(t.poly)) return;
    for (Term& existing : terms_) {
        if (existing.trig == t.trig && existing.omega == t.omega) {
            if (existing.poly.size() < t.poly.size()) existing.poly.resize(t.poly.size(), 0.0);
            for (std::size_t k = 0; k < t.poly.size(); ++k) existing.poly[k] += t.poly[k];
            return;
        }
    }
    terms_.push_back(std::move(t));
}

double SmoothFunction::operator()(double x) const {
    double v = 0.0;
    for (const Term& t : terms_) {
        double factor = 1.0;
        if (t.trig == 1) factor = std::sin(t.omega * x);
        if (t.trig == 2) factor = std::cos(t.omega * x);
        v += poly_eval(t.poly, x) * factor;
    }
    return v;
}

SmoothFunction SmoothFunction::derivative() const {
    SmoothFunction out;
    for (const Term& t : terms_) {
        out.add_term({poly_derivative(t.poly), t.omega, t.trig});
        if (t.trig == 1) {
            // (P sin)' has P omega cos
            std::vector<double> scaled = t.poly;
            for (double& c : scaled) c *= t.omega;
            out.add_term({std::move(scaled), t.omega, 2});
        } else if (t.trig == 2) {
            std::vector<double> scaled = t.poly;
            for (double& c : scaled) c *= -t.omega;
            out.add_term({std::move(scaled), t.omega, 1});
        }
    }
    return out;
}

SmoothFunction SmoothFunction::scaled(double s) const {
    SmoothFunction out;
    for (Term t : terms_) {
        for (double& c : t.poly) c *= s;
        out.add_term(std::move(t));
    }
    return out;
}

SmoothFunction SmoothFunction::plus(const SmoothFunction& other) const {
    SmoothFunction out = *this;
    for (const Term& t : other.terms_) out.add_term(t);
    return out;
}

SmoothFunction SmoothFunction::times_affine(double p, double q) const {
    SmoothFunction out;
    for (const Term& t : terms_) out.add_term({poly_times_affine(t.poly, p, q), t.omega, t.trig});
    return out;
}

double SmoothFunction::sup_norm(double lo, double hi, int samples) const {
    double m = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double x = lo + (hi - lo) * double(i) / double(samples);
        m = std::max(m, std::fabs((*this)(x)));
    }
    return m;
}

std::string CoefficientSpec::describe() const {
    std::ostringstream os;
    if (constant())
        os << "const:" << p;
    else
        os << "affine:" << p << "," << q;
    return os.str();
}

CoefficientSpec parse_coefficient(const std::string& text) {
    CoefficientSpec spec;
    if (text.empty() || text == "const" || text == "const:1") return spec;
    if (text.rfind("const:", 0) == 0) {
        spec.p = std::stod(text.substr(6));
        return spec;
    }
    if (text.rfind("affine:", 0) == 0) {
        const std::string body = text.substr(7);
        const auto comma = body.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("coefficient catalog: affine needs two values, got '" +
                                        text + "'");
        spec.p = std::stod(body.substr(0, comma));
        spec.q = std::stod(body.substr(comma + 1));
        return spec;
    }
    throw std::invalid_argument("coefficient catalog: unknown entry '" + text + "'");
}

RhsEntry parse_rhs(const std::string& text, const Grid& grid) {
    RhsEntry e;
    e.name = text;
    const double lo = grid.left, hi = grid.right;
    if (text == "const") {
        e.closed_form = SmoothFunction::polynomial({1.0});
    } else if (text == "poly2") {
        // (x - lo)(hi - x) = -lo*hi + (lo+hi) x - x^2
        e.closed_form = SmoothFunction::polynomial({-lo * hi, lo + hi, -1.0});
    } else if (text == "linear") {
        e.closed_form = SmoothFunction::polynomial({0.0, 1.0});
    } else if (text.rfind("sin:", 0) == 0) {
        const int k = std::stoi(text.substr(4));
        if (k < 1) throw std::invalid_argument("rhs catalog: sin:k needs k >= 1");
        const double omega = double(k) * M_PI / (hi - lo);
        // sin(k pi (x - lo)/L) = sin(omega x)cos(omega lo) - cos(omega x)sin(omega lo)
        e.closed_form = SmoothFunction::sine(omega, std::cos(omega * lo))
                            .plus(SmoothFunction::cosine(omega, -std::sin(omega * lo)));
    } else if (text.rfind("eigen:", 0) == 0) {
        const int k = std::stoi(text.substr(6));
        if (k < 1) throw std::invalid_argument("rhs catalog: eigen:k needs k >= 1");
        e.eigen_index = k;
    } else if (text.rfind("custom:", 0) == 0) {
        e.csv_path = text.substr(7);
    } else {
        throw std::invalid_argument("rhs catalog: unknown entry '" + text + "'");
    }
    return e;
}

std::vector<double> sample_rhs(const RhsEntry& rhs, const Grid& grid,
                               const SpectralDecomposition* dec) {
    const int n = grid.size();
    std::vector<double> f(n);
    if (rhs.closed_form) {
        for (int i = 0; i < n; ++i) f[i] = (*rhs.closed_form)(grid.x[i]);
        return f;
    }
    if (rhs.eigen_index) {
        if (!dec)
            throw std::invalid_argument("sample_rhs: eigen:k needs a decomposition");
        const int k = *rhs.eigen_index;
        if (k > dec->size())
            throw std::invalid_argument("sample_rhs: eigen index exceeds mode count");
        auto v = dec->eigenvector(k - 1);
        return {v.begin(), v.end()};
    }
    std::ifstream in(*rhs.csv_path);
    if (!in)
        throw std::invalid_argument("sample_rhs: cannot open '" + *rhs.csv_path + "'");
    std::string line;
    int i = 0;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v;
        if (!(ls >> v)) continue;
        if (i >= n)
            throw std::invalid_argument("sample_rhs: too many samples in '" + *rhs.csv_path + "'");
        f[i++] = v;
    }
    if (i != n)
        throw std::invalid_argument("sample_rhs: expected " + std::to_string(n) + " samples, got " +
                                    std::to_string(i));
    return f;
}

} // namespace fraclab
