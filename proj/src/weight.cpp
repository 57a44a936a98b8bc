#include "klx/weight.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "klx/normal.hpp"

namespace klx {

namespace {

double poly_eval(const std::vector<double>& c, double t) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * t + c[i];
    return v;
}

std::string strip_spaces(const std::string& s) {
    std::string out;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) out.push_back(ch);
    return out;
}

}  // namespace

Weight Weight::constant_one() {
    Weight w;
    w.fn_ = [](double) { return 1.0; };
    w.poly_ = std::vector<double>{1.0};
    w.label_ = "const1";
    return w;
}

Weight Weight::polynomial(std::vector<double> coeffs, std::string label) {
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
    Weight w;
    w.poly_ = coeffs;
    w.fn_ = [coeffs](double t) { return poly_eval(coeffs, t); };
    w.label_ = label.empty() ? "poly" : std::move(label);
    return w;
}

Weight Weight::normal_quantile() {
    Weight w;
    w.fn_ = [](double t) { return 1.0 / normal_pdf(klx::normal_quantile(t)); };
    w.normal_quantile_ = true;
    w.square_integrable_ = false;
    w.label_ = "normquant";
    return w;
}

Weight Weight::point_mass(double t0, double coeff) {
    if (t0 < 0.0 || t0 > 1.0) throw ConfigError("point mass location must lie in [0,1]");
    Weight w;
    w.atoms_.push_back({WeightAtom::Kind::PointMass, t0, coeff});
    w.square_integrable_ = false;
    std::ostringstream os;
    os << "delta:" << t0;
    w.label_ = os.str();
    return w;
}

Weight Weight::dipole(double t0, double coeff) {
    if (t0 < 0.0 || t0 > 1.0) throw ConfigError("dipole location must lie in [0,1]");
    Weight w;
    w.atoms_.push_back({WeightAtom::Kind::Dipole, t0, coeff});
    w.square_integrable_ = false;
    std::ostringstream os;
    os << "ddelta:" << t0;
    w.label_ = os.str();
    return w;
}

Weight Weight::tabulated(const Vector& values, std::string label) {
    if (values.size() < 2) throw ConfigError("tabulated weight needs at least 2 values");
    for (Index i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i])) throw ConfigError("tabulated weight has non-finite value");
    const Index n = values.size();
    Vector v = values;
    Weight w;
    w.fn_ = [v, n](double t) {
        double u = std::clamp(t, 0.0, 1.0) * static_cast<double>(n - 1);
        Index i = std::min<Index>(static_cast<Index>(u), n - 2);
        double f = u - static_cast<double>(i);
        return (1.0 - f) * v[i] + f * v[i + 1];
    };
    for (Index i = 1; i + 1 < n; ++i)
        w.breakpoints_.push_back(static_cast<double>(i) / static_cast<double>(n - 1));
    w.label_ = label.empty() ? "csv" : std::move(label);
    return w;
}

Weight Weight::function(std::function<double(double)> fn, std::string label,
                        bool sq_integrable, std::vector<double> breakpoints) {
    Weight w;
    w.fn_ = std::move(fn);
    w.breakpoints_ = std::move(breakpoints);
    w.square_integrable_ = sq_integrable;
    w.label_ = std::move(label);
    return w;
}

double Weight::fn_value(double t) const {
    if (!fn_) return 0.0;
    return fn_(t);
}

Weight Weight::operator+(const Weight& other) const {
    if (has_function_part() && other.has_function_part())
        throw ConfigError("weight sums support at most one function part");
    Weight w = has_function_part() ? *this : other;
    const Weight& a = has_function_part() ? other : *this;
    w.atoms_.insert(w.atoms_.end(), a.atoms_.begin(), a.atoms_.end());
    if (!a.atoms_.empty() || !w.square_integrable_) w.square_integrable_ = false;
    if (!atoms_.empty() || !other.atoms_.empty()) w.square_integrable_ = false;
    w.label_ = label_ + "+" + other.label_;
    return w;
}

// ---------------------------------------------------------------------------
// Polynomial expression parser.

namespace {

struct PolyParser {
    std::string s;
    std::size_t pos = 0;

    char peek() const { return pos < s.size() ? s[pos] : '\0'; }
    char get() { return pos < s.size() ? s[pos++] : '\0'; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("polynomial parse error at position " + std::to_string(pos) +
                          ": " + what + " in '" + s + "'");
    }

    static std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b,
                                   double sign) {
        std::vector<double> r(std::max(a.size(), b.size()), 0.0);
        for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
        for (std::size_t i = 0; i < b.size(); ++i) r[i] += sign * b[i];
        return r;
    }

    static std::vector<double> mul(const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> r(a.size() + b.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
        if (r.size() > 33) throw ConfigError("polynomial degree limit (32) exceeded");
        return r;
    }

    std::vector<double> expr() {
        std::vector<double> r = term();
        while (peek() == '+' || peek() == '-') {
            char op = get();
            r = add(r, term(), op == '+' ? 1.0 : -1.0);
        }
        return r;
    }

    std::vector<double> term() {
        std::vector<double> r = unary();
        while (peek() == '*' || peek() == '/') {
            char op = get();
            std::vector<double> rhs = unary();
            if (op == '*') {
                r = mul(r, rhs);
            } else {
                if (rhs.size() != 1 || rhs[0] == 0.0)
                    fail("division is only allowed by a nonzero constant");
                for (double& c : r) c /= rhs[0];
            }
        }
        return r;
    }

    std::vector<double> unary() {
        if (peek() == '-') {
            get();
            std::vector<double> r = unary();
            for (double& c : r) c = -c;
            return r;
        }
        if (peek() == '+') get();
        return factor();
    }

    std::vector<double> factor() {
        std::vector<double> base = primary();
        if (peek() == '^') {
            get();
            std::size_t start = pos;
            while (std::isdigit(static_cast<unsigned char>(peek()))) get();
            if (pos == start) fail("expected a nonnegative integer exponent");
            int e = std::stoi(s.substr(start, pos - start));
            std::vector<double> r{1.0};
            for (int i = 0; i < e; ++i) r = mul(r, base);
            return r;
        }
        return base;
    }

    std::vector<double> primary() {
        char c = peek();
        if (c == 't') {
            get();
            return {0.0, 1.0};
        }
        if (c == '(') {
            get();
            std::vector<double> r = expr();
            if (get() != ')') fail("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos;
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') get();
            return {std::stod(s.substr(start, pos - start))};
        }
        fail("expected 't', a number, or '('");
    }
};

}  // namespace

std::vector<double> parse_polynomial(const std::string& expr) {
    PolyParser p{strip_spaces(expr)};
    if (p.s.empty()) throw ConfigError("empty polynomial expression");
    std::vector<double> r = p.expr();
    if (p.pos != p.s.size()) p.fail("trailing characters");
    while (r.size() > 1 && r.back() == 0.0) r.pop_back();
    return r;
}

// ---------------------------------------------------------------------------
// Weight spec grammar.

namespace {

bool starts_atom(const std::string& s) {
    static const char* prefixes[] = {"const1", "poly:", "delta:", "ddelta:", "normquant", "csv:"};
    std::size_t at = 0;
    // optional "<coeff>*"
    std::size_t star = s.find('*');
    if (star != std::string::npos) {
        bool numeric = star > 0;
        for (std::size_t i = 0; i < star && numeric; ++i) {
            char c = s[i];
            if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.' && c != '-') numeric = false;
        }
        if (numeric) at = star + 1;
    }
    for (const char* p : prefixes) {
        std::size_t len = std::string(p).size();
        if (s.size() - at >= len && s.compare(at, len, p) == 0) return true;
    }
    return false;
}

Weight parse_atom(const std::string& spec) {
    std::string s = spec;
    double coeff = 1.0;
    std::size_t star = s.find('*');
    if (star != std::string::npos && starts_atom(s) && !starts_atom(s.substr(0, star))) {
        coeff = std::stod(s.substr(0, star));
        s = s.substr(star + 1);
    }
    auto value_of = [&](const std::string& rest) {
        try {
            return std::stod(rest);
        } catch (const std::exception&) {
            throw ConfigError("bad number in weight spec: " + rest);
        }
    };
    if (s == "const1") {
        if (coeff == 1.0) return Weight::constant_one();
        return Weight::polynomial({coeff}, spec);
    }
    if (s == "normquant") {
        if (coeff != 1.0) throw ConfigError("normquant does not take a coefficient");
        return Weight::normal_quantile();
    }
    if (s.rfind("poly:", 0) == 0) {
        std::vector<double> c = parse_polynomial(s.substr(5));
        if (coeff != 1.0)
            for (double& v : c) v *= coeff;
        return Weight::polynomial(c, spec);
    }
    if (s.rfind("delta:", 0) == 0) return Weight::point_mass(value_of(s.substr(6)), coeff);
    if (s.rfind("ddelta:", 0) == 0) return Weight::dipole(value_of(s.substr(7)), coeff);
    if (s.rfind("csv:", 0) == 0) {
        std::ifstream in(s.substr(4));
        if (!in) throw ConfigError("cannot open weight file: " + s.substr(4));
        std::vector<double> vals;
        std::string line;
        while (std::getline(in, line)) {
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ls(line);
            double v;
            while (ls >> v) vals.push_back(v);
        }
        if (vals.size() < 2) throw ConfigError("weight file must hold a header n and n values");
        int n = static_cast<int>(std::llround(vals[0]));
        if (n < 2 || static_cast<std::size_t>(n) + 1 != vals.size())
            throw ConfigError("weight file must hold a header n and n values");
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = vals[i + 1];
        Weight w = Weight::tabulated(v, spec);
        if (coeff != 1.0) throw ConfigError("csv weights do not take a coefficient");
        return w;
    }
    throw ConfigError("unknown weight spec: " + spec);
}

}  // namespace

Weight parse_weight(const std::string& spec) {
    std::string s = strip_spaces(spec);
    if (s.empty()) throw ConfigError("empty weight spec");
    // Split on '+' only where a new atom begins; '+' inside poly expressions
    // stays with the current segment.
    std::vector<std::string> segs;
    std::string cur;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t plus = s.find('+', pos);
        std::string piece = s.substr(pos, plus == std::string::npos ? plus : plus - pos);
        if (cur.empty()) {
            cur = piece;
        } else if (starts_atom(piece)) {
            segs.push_back(cur);
            cur = piece;
        } else {
            cur += "+" + piece;
        }
        if (plus == std::string::npos) break;
        pos = plus + 1;
    }
    if (!cur.empty()) segs.push_back(cur);

    Weight w = parse_atom(segs[0]);
    for (std::size_t i = 1; i < segs.size(); ++i) w = w + parse_atom(segs[i]);
    return w;
}

}  // namespace klx
