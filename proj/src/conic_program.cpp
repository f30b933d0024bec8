#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mauav/conic.hpp"

namespace mauav::conic {

Affine& Affine::operator+=(const Affine& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
}

Affine& Affine::operator-=(const Affine& o) {
    for (const auto& t : o.terms) terms.push_back({t.var, -t.coef});
    constant -= o.constant;
    return *this;
}

Affine& Affine::operator*=(double s) {
    for (auto& t : terms) t.coef *= s;
    constant *= s;
    return *this;
}

double Affine::eval(const Eigen::VectorXd& x) const {
    double v = constant;
    for (const auto& t : terms) v += t.coef * x[t.var];
    return v;
}

Affine operator+(Affine a, const Affine& b) { return a += b; }
Affine operator-(Affine a, const Affine& b) { return a -= b; }
Affine operator-(Affine a) { return a *= -1.0; }
Affine operator*(double s, Affine a) { return a *= s; }
Affine operator*(Affine a, double s) { return a *= s; }

namespace {

int pair_index(int n, int i, int j) { return i * n - i * (i + 1) / 2 + (j - i - 1); }

// Merge duplicate variables and drop exact zeros.
Affine compact(const Affine& a) {
    Affine out;
    out.constant = a.constant;
    std::vector<Term> t = a.terms;
    std::sort(t.begin(), t.end(), [](const Term& l, const Term& r) { return l.var < r.var; });
    for (const auto& term : t) {
        if (!out.terms.empty() && out.terms.back().var == term.var) out.terms.back().coef += term.coef;
        else out.terms.push_back(term);
    }
    std::erase_if(out.terms, [](const Term& term) { return term.coef == 0.0; });
    return out;
}

std::string format_affine(const Affine& a) {
    std::string s;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", a.constant);
    s += buf;
    for (const auto& t : a.terms) {
        std::snprintf(buf, sizeof buf, " %+.17g*x%d", t.coef, t.var);
        s += buf;
    }
    return s;
}

}  // namespace

int HermitianVar::re_index(int i, int j) const { return offset + order + 2 * pair_index(order, i, j); }
int HermitianVar::im_index(int i, int j) const { return offset + order + 2 * pair_index(order, i, j) + 1; }
Affine HermitianVar::re(int i, int j) const {
    if (i == j) return Affine::variable(diag_index(i));
    if (i > j) std::swap(i, j);
    return Affine::variable(re_index(i, j));
}
Affine HermitianVar::im(int i, int j) const {
    if (i == j) return Affine{};
    if (i < j) return Affine::variable(im_index(i, j));
    return Affine::variable(im_index(j, i), -1.0);
}

Affine trace_product(const Eigen::MatrixXcd& c, const HermitianVar& w) {
    if (c.rows() != w.order || c.cols() != w.order) throw ProgramError("trace_product: dimension mismatch");
    Affine out;
    for (int i = 0; i < w.order; ++i) out.terms.push_back({w.diag_index(i), c(i, i).real()});
    for (int i = 0; i < w.order; ++i)
        for (int j = i + 1; j < w.order; ++j) {
            out.terms.push_back({w.re_index(i, j), 2.0 * c(i, j).real()});
            out.terms.push_back({w.im_index(i, j), 2.0 * c(i, j).imag()});
        }
    return out;
}

Affine trace(const HermitianVar& w) {
    Affine out;
    for (int i = 0; i < w.order; ++i) out.terms.push_back({w.diag_index(i), 1.0});
    return out;
}

std::vector<std::vector<Affine>> real_embedding(const HermitianVar& w) {
    const int n = w.order;
    std::vector<std::vector<Affine>> m(2 * n, std::vector<Affine>(2 * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Affine re = w.re(i, j);
            const Affine im = w.im(i, j);
            m[i][j] = re;
            m[n + i][n + j] = re;
            m[i][n + j] = -im;
            m[n + i][j] = im;
        }
    return m;
}

Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& c) {
    const auto n = c.rows();
    Eigen::MatrixXd m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = c.real();
    m.bottomRightCorner(n, n) = c.real();
    m.topRightCorner(n, n) = -c.imag();
    m.bottomLeftCorner(n, n) = c.imag();
    return m;
}

int ProgramBuilder::allocate(const std::string& name, int count) {
    if (name.empty()) throw ProgramError("variable name must not be empty");
    if (block_names_.count(name)) throw ProgramError("duplicate variable name '" + name + "'");
    if (count < 1) throw ProgramError("variable '" + name + "' must have positive size");
    const int offset = variable_count();
    block_names_[name] = offset;
    program_.blocks_.push_back({name, {offset, count}});
    for (int i = 0; i < count; ++i)
        program_.names_.push_back(count == 1 ? name : name + "[" + std::to_string(i) + "]");
    return offset;
}

ScalarVar ProgramBuilder::add_scalar(const std::string& name) { return ScalarVar{allocate(name, 1)}; }

VectorVar ProgramBuilder::add_vector(const std::string& name, int size) {
    return VectorVar{allocate(name, size), size};
}

HermitianVar ProgramBuilder::add_hermitian(const std::string& name, int order) {
    if (order < 1) throw ProgramError("Hermitian variable '" + name + "' must have positive order");
    return HermitianVar{allocate(name, order * order), order};
}

void ProgramBuilder::check(const Affine& e) const {
    for (const auto& t : e.terms) {
        if (t.var < 0 || t.var >= variable_count())
            throw ProgramError("expression references undeclared variable x" + std::to_string(t.var));
        if (!std::isfinite(t.coef)) throw ProgramError("non-finite coefficient");
    }
    if (!std::isfinite(e.constant)) throw ProgramError("non-finite constant");
}

void ProgramBuilder::add_nonnegative(const Affine& e) {
    check(e);
    program_.cones_.push_back({ConeKind::Nonnegative, 1, {compact(e)}});
}

void ProgramBuilder::add_less_equal(const Affine& lhs, const Affine& rhs) { add_nonnegative(rhs - lhs); }

void ProgramBuilder::add_second_order(const Affine& t, const std::vector<Affine>& x) {
    ConeConstraint c{ConeKind::SecondOrder, static_cast<int>(x.size()) + 1, {}};
    check(t);
    c.rows.push_back(compact(t));
    for (const auto& xi : x) {
        check(xi);
        c.rows.push_back(compact(xi));
    }
    program_.cones_.push_back(std::move(c));
}

void ProgramBuilder::add_rotated_second_order(const Affine& u, const Affine& v, const std::vector<Affine>& y) {
    // ||y||^2 <= u v, u, v >= 0  <=>  ||(2y, u - v)|| <= u + v
    std::vector<Affine> rest;
    rest.reserve(y.size() + 1);
    for (const auto& yi : y) rest.push_back(2.0 * yi);
    rest.push_back(u - v);
    add_second_order(u + v, rest);
}

void ProgramBuilder::add_exponential(const Affine& x, const Affine& y, const Affine& z) {
    check(x);
    check(y);
    check(z);
    program_.cones_.push_back({ConeKind::Exponential, 3, {compact(x), compact(y), compact(z)}});
}

void ProgramBuilder::add_psd(const std::vector<std::vector<Affine>>& m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) throw ProgramError("PSD constraint must be non-empty");
    for (const auto& row : m)
        if (static_cast<int>(row.size()) != n) throw ProgramError("PSD constraint must be square");
    ConeConstraint c{ConeKind::Psd, n, {}};
    for (int col = 0; col < n; ++col)
        for (int r = 0; r <= col; ++r) {
            check(m[r][col]);
            const Affine diff = compact(m[r][col] - m[col][r]);
            if (!diff.terms.empty() || std::abs(diff.constant) > 1e-12)
                throw ProgramError("PSD constraint must be symmetric");
            c.rows.push_back(compact(m[r][col]));
        }
    program_.cones_.push_back(std::move(c));
}

void ProgramBuilder::add_psd(const HermitianVar& w) { add_psd(real_embedding(w)); }

void ProgramBuilder::add_equality(const Affine& e) {
    check(e);
    program_.equalities_.push_back(compact(e));
}

void ProgramBuilder::minimize(const Affine& objective) {
    check(objective);
    program_.objective_ = compact(objective);
    program_.sense_ = Sense::Minimize;
    objective_set_ = true;
}

void ProgramBuilder::maximize(const Affine& objective) {
    check(objective);
    program_.objective_ = compact(objective);
    program_.sense_ = Sense::Maximize;
    objective_set_ = true;
}

ScalarVar ProgramBuilder::add_log_term(double weight, const Affine& arg, const std::string& name) {
    if (!objective_set_ || program_.sense_ != Sense::Maximize)
        throw ProgramError("log terms require a maximization objective set first");
    if (!(weight > 0.0)) throw ProgramError("log term weight must be positive");
    const ScalarVar t = add_scalar(name.empty() ? "log_term_" + std::to_string(log_terms_) : name);
    ++log_terms_;
    Affine excess = compact(arg);
    const double c = excess.constant;
    if (c > 0.0) {
        excess.constant = 0.0;
        check(excess);
        program_.cones_.push_back(
            {ConeKind::ShiftedExponential, 3, {compact(Affine(t) - std::log(c)), Affine(1.0), compact(excess * (1.0 / c))}});
    } else {
        add_exponential(t, Affine(1.0), arg);
    }
    program_.objective_ = compact(program_.objective_ + weight * Affine(t));
    return t;
}

void ProgramBuilder::set_start(int var, double value) {
    if (var < 0 || var >= variable_count()) throw ProgramError("start hint for undeclared variable");
    program_.hint_[var] = value;
}

ConicProgram ProgramBuilder::build() const { return program_; }

void ConicProgram::dump(std::ostream& os) const {
    os << "# mauav conic program\n";
    os << "variables " << variable_count() << "\n";
    for (const auto& [name, range] : blocks_)
        os << "block " << name << " " << range.first << " " << range.second << "\n";
    os << "objective " << (sense_ == Sense::Maximize ? "maximize " : "minimize ")
       << format_affine(objective_) << "\n";
    static const char* kind_name[] = {"nonneg", "soc", "exp", "psd", "exp1p"};
    for (const auto& c : cones_) {
        os << "cone " << kind_name[static_cast<int>(c.kind)] << " " << c.order << " " << c.rows.size() << "\n";
        for (const auto& r : c.rows) os << "  " << format_affine(r) << "\n";
    }
    for (const auto& e : equalities_) os << "eq " << format_affine(e) << "\n";
}

const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

Eigen::MatrixXcd Solution::value(const HermitianVar& w) const {
    Eigen::MatrixXcd m(w.order, w.order);
    for (int i = 0; i < w.order; ++i) {
        m(i, i) = x[w.diag_index(i)];
        for (int j = i + 1; j < w.order; ++j) {
            const std::complex<double> v(x[w.re_index(i, j)], x[w.im_index(i, j)]);
            m(i, j) = v;
            m(j, i) = std::conj(v);
        }
    }
    return m;
}

}  // namespace mauav::conic
