#pragma once

// Solver-agnostic convex program representation plus a primal barrier
// interior-point backend. Supported cones: nonnegative orthant, second-order,
// exponential, and real symmetric PSD (complex Hermitian variables are lowered
// through the real embedding [[Re, -Im], [Im, Re]]).

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mauav::conic {

class ProgramError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Term {
    int var;
    double coef;
};

// sum_i coef_i * x[var_i] + constant
struct Affine {
    std::vector<Term> terms;
    double constant = 0.0;

    Affine() = default;
    Affine(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
    static Affine variable(int index, double coef = 1.0) {
        Affine a;
        a.terms.push_back({index, coef});
        return a;
    }

    Affine& operator+=(const Affine& o);
    Affine& operator-=(const Affine& o);
    Affine& operator*=(double s);
    double eval(const Eigen::VectorXd& x) const;
};

Affine operator+(Affine a, const Affine& b);
Affine operator-(Affine a, const Affine& b);
Affine operator-(Affine a);
Affine operator*(double s, Affine a);
Affine operator*(Affine a, double s);

struct ScalarVar {
    int index = -1;
    operator Affine() const { return Affine::variable(index); }  // NOLINT(google-explicit-constructor)
};

struct VectorVar {
    int offset = -1;
    int size = 0;
    Affine operator[](int i) const { return Affine::variable(offset + i); }
};

// Hermitian matrix variable; order^2 real degrees of freedom laid out as the
// diagonal entries followed by (Re, Im) pairs of the strict upper triangle.
struct HermitianVar {
    int offset = -1;
    int order = 0;

    int diag_index(int i) const { return offset + i; }
    int re_index(int i, int j) const;  // requires i < j
    int im_index(int i, int j) const;  // requires i < j
    Affine re(int i, int j) const;
    Affine im(int i, int j) const;
    int dof() const { return order * order; }
};

// tr(C W) for Hermitian C; real-valued.
Affine trace_product(const Eigen::MatrixXcd& c, const HermitianVar& w);
Affine trace(const HermitianVar& w);

// 2n x 2n real embedding of a Hermitian variable, as affine entries.
std::vector<std::vector<Affine>> real_embedding(const HermitianVar& w);
Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& c);

enum class ConeKind { Nonnegative, SecondOrder, Exponential, Psd, ShiftedExponential };

// Membership G x + h in K. For SecondOrder the first row is the bound t in
// ||rest|| <= t. For Exponential rows are (x, y, z) with y exp(x/y) <= z;
// ShiftedExponential rows are (x, y, u) with y exp(x/y) <= y + u, which keeps
// log(1 + u) accurate for tiny u.
// For Psd the rows are the upper triangle, column-major: (0,0), (0,1), (1,1), ...
struct ConeConstraint {
    ConeKind kind;
    int order = 0;  // PSD matrix order; otherwise the vector dimension
    std::vector<Affine> rows;
};

enum class Sense { Minimize, Maximize };

class ConicProgram {
public:
    int variable_count() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& variable_names() const { return names_; }
    const std::vector<ConeConstraint>& cones() const { return cones_; }
    const std::vector<Affine>& equalities() const { return equalities_; }
    const Affine& objective() const { return objective_; }
    Sense sense() const { return sense_; }
    const std::map<int, double>& start_hint() const { return hint_; }

    // Text dump: one line per variable block, cone and equality.
    void dump(std::ostream& os) const;

private:
    friend class ProgramBuilder;
    std::vector<std::string> names_;
    std::vector<std::pair<std::string, std::pair<int, int>>> blocks_;
    std::vector<ConeConstraint> cones_;
    std::vector<Affine> equalities_;
    Affine objective_;
    Sense sense_ = Sense::Minimize;
    std::map<int, double> hint_;
};

class ProgramBuilder {
public:
    ScalarVar add_scalar(const std::string& name);
    VectorVar add_vector(const std::string& name, int size);
    HermitianVar add_hermitian(const std::string& name, int order);

    void add_nonnegative(const Affine& e);                       // e >= 0
    void add_less_equal(const Affine& lhs, const Affine& rhs);   // lhs <= rhs
    void add_second_order(const Affine& t, const std::vector<Affine>& x);  // ||x|| <= t
    // ||y||^2 <= u * v with u, v >= 0
    void add_rotated_second_order(const Affine& u, const Affine& v, const std::vector<Affine>& y);
    void add_exponential(const Affine& x, const Affine& y, const Affine& z);
    void add_psd(const std::vector<std::vector<Affine>>& symmetric);
    void add_psd(const HermitianVar& w);
    void add_equality(const Affine& e);  // e == 0

    void minimize(const Affine& objective);
    void maximize(const Affine& objective);
    // Adds weight * ln(arg) to a maximization objective (weight > 0), lowered
    // to t <= ln(arg) through (t, 1, arg) in the exponential cone.
    ScalarVar add_log_term(double weight, const Affine& arg, const std::string& name = "");

    void set_start(int var, double value);
    void set_start(const ScalarVar& v, double value) { set_start(v.index, value); }

    int variable_count() const { return static_cast<int>(program_.names_.size()); }
    ConicProgram build() const;

private:
    void check(const Affine& e) const;
    int allocate(const std::string& name, int count);

    ConicProgram program_;
    std::map<std::string, int> block_names_;
    bool objective_set_ = false;
    int log_terms_ = 0;
};

enum class Status { Optimal, Infeasible, NumericalFailure };
const char* to_string(Status s);

struct Residuals {
    double equality = 0.0;      // max |A x - b|
    double cone_margin = 0.0;   // smallest interior margin over cones (>= 0 when feasible)
    double gap = 0.0;           // duality-gap bound nu / t, objective units
};

struct Solution {
    Status status = Status::NumericalFailure;
    Eigen::VectorXd x;
    double objective = 0.0;
    Residuals residuals;
    int newton_steps = 0;
    std::string message;

    bool ok() const { return status == Status::Optimal; }
    double value(const ScalarVar& v) const { return x[v.index]; }
    double value(const Affine& a) const { return a.eval(x); }
    Eigen::VectorXd value(const VectorVar& v) const { return x.segment(v.offset, v.size); }
    Eigen::MatrixXcd value(const HermitianVar& w) const;
};

struct SolverOptions {
    // Target bound on the optimality gap, relative to max(gap_floor, |objective|) in the
    // program's own objective units.
    double tolerance = 1e-8;
    double gap_floor = 1.0;
    int max_newton_steps = 1500;
    double barrier_growth = 12.0;
};

Solution solve(const ConicProgram& p, const SolverOptions& opts = {});

}  // namespace mauav::conic
