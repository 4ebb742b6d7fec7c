#include "mlab/linalg.hpp"
#include "mlab/poly.hpp"
#include "mlab/rational.hpp"

#include "mlab/errors.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace mlab {

// ---------------------------------------------------------------------------
// rationals

long double to_ld(const Rat& r) {
    return r.convert_to<long double>();
}

double to_d(const Rat& r) {
    return r.convert_to<double>();
}

namespace {

// cpp_int's string constructor honors C prefixes (leading 0 = octal); plain
// decimal is wanted here, so redundant leading zeros are stripped first.
BigInt parse_decimal_int(const std::string& s, const std::string& context) {
    if (s.empty() || s == "-" || s == "+")
        fail(ErrorCode::BadInput, "malformed number: " + context);
    std::string digits = s;
    size_t start = (digits[0] == '-' || digits[0] == '+') ? 1 : 0;
    size_t nz = start;
    while (nz + 1 < digits.size() && digits[nz] == '0') ++nz;
    digits = digits.substr(0, start) + digits.substr(nz);
    try {
        return BigInt(digits);
    } catch (const std::exception&) {
        fail(ErrorCode::BadInput, "malformed number: " + context);
    }
}

} // namespace

Rat rat_from_string(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) fail(ErrorCode::BadInput, "empty numeric literal");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (num.empty() || den.empty())
            fail(ErrorCode::BadInput, "malformed fraction: " + text);
        BigInt n = parse_decimal_int(num, text), d = parse_decimal_int(den, text);
        if (d == 0) fail(ErrorCode::BadInput, "zero denominator: " + text);
        return Rat(n, d);
    }

    // Decimal / scientific literal.  Split mantissa and exponent, move the
    // decimal point into the exponent, then build numerator/denominator.
    long expo = 0;
    std::string mant = s;
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        mant = s.substr(0, epos);
        std::string es = s.substr(epos + 1);
        if (es.empty()) fail(ErrorCode::BadInput, "malformed exponent: " + text);
        try {
            expo = std::stol(es);
        } catch (const std::exception&) {
            fail(ErrorCode::BadInput, "malformed exponent: " + text);
        }
    }
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
        expo -= static_cast<long>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    BigInt n = parse_decimal_int(mant, text);
    Rat r(n);
    BigInt p10 = 1;
    for (long i = 0; i < std::abs(expo); ++i) p10 *= 10;
    if (expo >= 0)
        r *= Rat(p10);
    else
        r /= Rat(p10);
    return r;
}

std::string rat_to_string(const Rat& r) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(r);
    if (boost::multiprecision::denominator(r) != 1)
        os << '/' << boost::multiprecision::denominator(r);
    return os.str();
}

// ---------------------------------------------------------------------------
// polynomials

PolyQ::PolyQ(const Rat& c) {
    if (c != 0) c_.push_back(c);
}

PolyQ::PolyQ(std::initializer_list<Rat> coeffs_low_first) : c_(coeffs_low_first) {
    trim();
}

PolyQ PolyQ::monomial(int degree, const Rat& c) {
    PolyQ p;
    if (c != 0) {
        p.c_.assign(static_cast<size_t>(degree) + 1, Rat(0));
        p.c_.back() = c;
    }
    return p;
}

PolyQ PolyQ::variable() { return monomial(1, Rat(1)); }

void PolyQ::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

const Rat& PolyQ::coeff(int k) const {
    static const Rat zero(0);
    if (k < 0 || k >= static_cast<int>(c_.size())) return zero;
    return c_[static_cast<size_t>(k)];
}

void PolyQ::set_coeff(int k, const Rat& v) {
    if (k >= static_cast<int>(c_.size())) {
        if (v == 0) return;
        c_.resize(static_cast<size_t>(k) + 1, Rat(0));
    }
    c_[static_cast<size_t>(k)] = v;
    trim();
}

PolyQ PolyQ::operator+(const PolyQ& o) const {
    PolyQ r = *this;
    r += o;
    return r;
}

PolyQ& PolyQ::operator+=(const PolyQ& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rat(0));
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

PolyQ PolyQ::operator-(const PolyQ& o) const {
    PolyQ r = *this;
    r -= o;
    return r;
}

PolyQ& PolyQ::operator-=(const PolyQ& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rat(0));
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

PolyQ PolyQ::operator-() const {
    PolyQ r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

PolyQ PolyQ::operator*(const PolyQ& o) const {
    if (is_zero() || o.is_zero()) return PolyQ();
    PolyQ r;
    r.c_.assign(c_.size() + o.c_.size() - 1, Rat(0));
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < o.c_.size(); ++j)
            r.c_[i + j] += c_[i] * o.c_[j];
    }
    r.trim();
    return r;
}

PolyQ PolyQ::operator*(const Rat& s) const {
    if (s == 0) return PolyQ();
    PolyQ r = *this;
    for (auto& c : r.c_) c *= s;
    return r;
}

PolyQ operator*(const Rat& s, const PolyQ& p) { return p * s; }

PolyQ PolyQ::derivative() const {
    PolyQ r;
    if (c_.size() <= 1) return r;
    r.c_.resize(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i)
        r.c_[i - 1] = c_[i] * Rat(static_cast<long>(i));
    r.trim();
    return r;
}

Rat PolyQ::eval(const Rat& x) const {
    Rat acc(0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
}

long double PolyQ::eval_ld(long double x) const {
    long double acc = 0.0L;
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + to_ld(c_[i]);
    return acc;
}

void PolyQ::divrem(const PolyQ& d, PolyQ& q, PolyQ& r) const {
    if (d.is_zero()) fail(ErrorCode::ZeroPolynomial, "division by zero polynomial");
    q = PolyQ();
    r = *this;
    const int dd = d.degree();
    const Rat& lead = d.c_.back();
    while (!r.is_zero() && r.degree() >= dd) {
        int k = r.degree() - dd;
        Rat f = r.c_.back() / lead;
        q.set_coeff(k, q.coeff(k) + f);
        // r -= f * h^k * d
        for (int i = 0; i <= dd; ++i)
            r.c_[static_cast<size_t>(k + i)] -= f * d.c_[static_cast<size_t>(i)];
        r.trim();
    }
}

PolyQ PolyQ::divide_exact(const PolyQ& d) const {
    PolyQ q, r;
    divrem(d, q, r);
    if (!r.is_zero())
        fail(ErrorCode::BadInput, "divide_exact: nonzero remainder");
    return q;
}

PolyQ PolyQ::monic() const {
    if (is_zero()) return PolyQ();
    return *this * (Rat(1) / c_.back());
}

std::string PolyQ::to_string(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const Rat& c = coeff(k);
        if (c == 0) continue;
        Rat a = c < 0 ? Rat(-c) : c;
        if (first) {
            if (c < 0) os << "-";
            first = false;
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        bool unit = (a == 1) && k > 0;
        if (!unit) os << rat_to_string(a);
        if (k > 0) {
            if (!unit) os << "*";
            os << var;
            if (k > 1) os << "^" << k;
        }
    }
    return os.str();
}

PolyQ poly_gcd(PolyQ a, PolyQ b) {
    while (!b.is_zero()) {
        PolyQ q, r;
        a.divrem(b, q, r);
        a = b;
        b = r.monic(); // normalize each step to keep coefficients tame
    }
    return a.monic();
}

PolyQ squarefree_part(const PolyQ& p) {
    if (p.is_zero()) return p;
    if (p.degree() == 0) return PolyQ(Rat(1));
    PolyQ g = poly_gcd(p, p.derivative());
    return p.divide_exact(g);
}

namespace {

int variations_at(const std::vector<PolyQ>& chain, const Rat& x) {
    int count = 0, prev = 0;
    for (const auto& p : chain) {
        int s = sign_of(p.eval(x));
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++count;
        prev = s;
    }
    return count;
}

} // namespace

int sturm_count(const PolyQ& p_in, const Rat& a, const Rat& b) {
    if (p_in.is_zero())
        fail(ErrorCode::ZeroPolynomial, "sturm_count on zero polynomial");
    if (!(a < b)) fail(ErrorCode::BadInput, "sturm_count: need a < b");

    PolyQ p = squarefree_part(p_in);
    // Exclude endpoint roots so the count is over the open interval.
    PolyQ lin_a{-a, Rat(1)}, lin_b{-b, Rat(1)};
    while (!p.is_zero() && p.degree() >= 1 && p.eval(a) == 0)
        p = p.divide_exact(lin_a);
    while (!p.is_zero() && p.degree() >= 1 && p.eval(b) == 0)
        p = p.divide_exact(lin_b);
    if (p.degree() <= 0) return 0;

    std::vector<PolyQ> chain{p, p.derivative()};
    while (!chain.back().is_zero() && chain.back().degree() >= 1) {
        PolyQ q, r;
        chain[chain.size() - 2].divrem(chain.back(), q, r);
        if (r.is_zero()) break;
        chain.push_back(-r);
    }
    return variations_at(chain, a) - variations_at(chain, b);
}

// ---------------------------------------------------------------------------
// rational matrices

MatQ::MatQ(int rows, int cols)
    : rows_(rows), cols_(cols),
      a_(static_cast<size_t>(rows) * static_cast<size_t>(cols), Rat(0)) {}

MatQ MatQ::identity(int n) {
    MatQ m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

MatQ MatQ::operator*(const MatQ& o) const {
    MatQ r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Rat& aik = at(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < o.cols_; ++j)
                r.at(i, j) += aik * o.at(k, j);
        }
    return r;
}

std::vector<Rat> MatQ::operator*(const std::vector<Rat>& v) const {
    std::vector<Rat> r(static_cast<size_t>(rows_), Rat(0));
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if (at(i, j) != 0) r[static_cast<size_t>(i)] += at(i, j) * v[static_cast<size_t>(j)];
    return r;
}

namespace {

// Reduced row echelon form in place; returns pivot column per pivot row.
std::vector<int> rref(MatQ& m) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
        int sel = -1;
        for (int r = row; r < m.rows(); ++r)
            if (m.at(r, col) != 0) { sel = r; break; }
        if (sel < 0) continue;
        if (sel != row)
            for (int c = 0; c < m.cols(); ++c) std::swap(m.at(sel, c), m.at(row, c));
        Rat inv = Rat(1) / m.at(row, col);
        for (int c = col; c < m.cols(); ++c) m.at(row, c) *= inv;
        for (int r = 0; r < m.rows(); ++r) {
            if (r == row || m.at(r, col) == 0) continue;
            Rat f = m.at(r, col);
            for (int c = col; c < m.cols(); ++c) m.at(r, c) -= f * m.at(row, c);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

} // namespace

std::vector<std::vector<Rat>> nullspace(const MatQ& A) {
    MatQ m = A;
    std::vector<int> pivots = rref(m);
    std::vector<bool> is_pivot(static_cast<size_t>(A.cols()), false);
    for (int c : pivots) is_pivot[static_cast<size_t>(c)] = true;

    std::vector<std::vector<Rat>> basis;
    for (int free_col = 0; free_col < A.cols(); ++free_col) {
        if (is_pivot[static_cast<size_t>(free_col)]) continue;
        std::vector<Rat> v(static_cast<size_t>(A.cols()), Rat(0));
        v[static_cast<size_t>(free_col)] = 1;
        for (size_t pr = 0; pr < pivots.size(); ++pr)
            v[static_cast<size_t>(pivots[pr])] = -m.at(static_cast<int>(pr), free_col);
        basis.push_back(std::move(v));
    }
    return basis;
}

int rank(const MatQ& A) {
    MatQ m = A;
    return static_cast<int>(rref(m).size());
}

std::vector<Rat> solve_linear(const MatQ& A, const std::vector<Rat>& b) {
    if (A.rows() != A.cols() || A.rows() != static_cast<int>(b.size()))
        fail(ErrorCode::BadInput, "solve_linear: shape mismatch");
    MatQ aug(A.rows(), A.cols() + 1);
    for (int i = 0; i < A.rows(); ++i) {
        for (int j = 0; j < A.cols(); ++j) aug.at(i, j) = A.at(i, j);
        aug.at(i, A.cols()) = b[static_cast<size_t>(i)];
    }
    std::vector<int> pivots = rref(aug);
    if (static_cast<int>(pivots.size()) != A.rows() || pivots.back() == A.cols())
        fail(ErrorCode::BadInput, "solve_linear: singular system");
    std::vector<Rat> x(static_cast<size_t>(A.cols()));
    for (int i = 0; i < A.rows(); ++i) x[static_cast<size_t>(pivots[static_cast<size_t>(i)])] = aug.at(i, A.cols());
    return x;
}

// ---------------------------------------------------------------------------
// polynomial matrices

PolyMat::PolyMat(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}

PolyMat PolyMat::identity(int n) {
    PolyMat m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = PolyQ(Rat(1));
    return m;
}

PolyMat PolyMat::operator*(const PolyMat& o) const {
    PolyMat r(n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            if (at(i, k).is_zero()) continue;
            for (int j = 0; j < n_; ++j)
                r.at(i, j) += at(i, k) * o.at(k, j);
        }
    return r;
}

PolyMat PolyMat::operator+(const PolyMat& o) const {
    PolyMat r = *this;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) r.at(i, j) += o.at(i, j);
    return r;
}

PolyMat PolyMat::operator-(const PolyMat& o) const {
    PolyMat r = *this;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) r.at(i, j) -= o.at(i, j);
    return r;
}

PolyMat PolyMat::scale(const PolyQ& s) const {
    PolyMat r = *this;
    for (auto& e : r.a_) e = e * s;
    return r;
}

PolyMat PolyMat::derivative() const {
    PolyMat r = *this;
    for (auto& e : r.a_) e = e.derivative();
    return r;
}

PolyQ PolyMat::det() const {
    if (n_ == 1) return at(0, 0);
    if (n_ == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    if (n_ == 3) {
        PolyQ d;
        d += at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1));
        d -= at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0));
        d += at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
        return d;
    }
    fail(ErrorCode::BadInput, "PolyMat::det supports n <= 3");
}

PolyMat PolyMat::adjugate() const {
    PolyMat r(n_);
    if (n_ == 1) {
        r.at(0, 0) = PolyQ(Rat(1));
        return r;
    }
    if (n_ == 2) {
        r.at(0, 0) = at(1, 1);
        r.at(0, 1) = -at(0, 1);
        r.at(1, 0) = -at(1, 0);
        r.at(1, 1) = at(0, 0);
        return r;
    }
    if (n_ == 3) {
        auto minor = [&](int r0, int c0) {
            int rs[2], cs[2], ri = 0, ci = 0;
            for (int i = 0; i < 3; ++i) if (i != r0) rs[ri++] = i;
            for (int j = 0; j < 3; ++j) if (j != c0) cs[ci++] = j;
            return at(rs[0], cs[0]) * at(rs[1], cs[1]) - at(rs[0], cs[1]) * at(rs[1], cs[0]);
        };
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                PolyQ m = minor(j, i); // transpose of cofactor matrix
                r.at(i, j) = ((i + j) % 2 == 0) ? m : -m;
            }
        return r;
    }
    fail(ErrorCode::BadInput, "PolyMat::adjugate supports n <= 3");
}

MatQ PolyMat::eval(const Rat& h) const {
    MatQ m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m.at(i, j) = at(i, j).eval(h);
    return m;
}

} // namespace mlab
