#pragma once

#include <array>

namespace nemlat {

inline constexpr double kConstructTol = 1e-12;
inline constexpr double kMemberTol = 1e-9;
inline constexpr double kReconstructTol = 1e-10;

class Director2 {
public:
    // throws InvalidDirector when | |(x,y)| - 1 | > 1e-9; renormalizes otherwise
    Director2(double x, double y);
    static Director2 from_angle(double theta);

    double x() const { return x_; }
    double y() const { return y_; }
    double dot(const Director2& o) const { return x_ * o.x_ + y_ * o.y_; }
    Director2 operator-() const { return Director2(-x_, -y_, 0); }
    Director2 rotated(double phi) const;
    // sign flipped so that the first nonzero component is nonnegative
    Director2 canonical() const;

private:
    Director2(double x, double y, int) : x_(x), y_(y) {}
    double x_, y_;
};

class Director3 {
public:
    Director3(double x, double y, double z);

    double x() const { return v_[0]; }
    double y() const { return v_[1]; }
    double z() const { return v_[2]; }
    double operator[](int k) const { return v_[k]; }
    const std::array<double, 3>& vec() const { return v_; }
    double dot(const Director3& o) const { return v_[0] * o.v_[0] + v_[1] * o.v_[1] + v_[2] * o.v_[2]; }
    Director3 operator-() const { return Director3(-v_[0], -v_[1], -v_[2], 0); }
    Director3 canonical() const;

private:
    Director3(double x, double y, double z, int) : v_{x, y, z} {}
    std::array<double, 3> v_;
};

// symmetric 2x2 [[a, b], [b, c]]
struct Sym2 {
    double a = 0, b = 0, c = 0;
};

// symmetric 3x3, upper triangle
struct Sym3 {
    double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;
    double at(int i, int j) const;
    double trace() const { return xx + yy + zz; }
};

double frobenius2(const Sym2& m);
double frobenius2(const Sym3& m);
Sym2 operator-(const Sym2& p, const Sym2& q);
Sym3 operator-(const Sym3& p, const Sym3& q);

class QTensor2 {
public:
    // validates trace and eigenvalue range at 1e-12; throws InvalidQTensor
    QTensor2(double q11, double q12, double q22);
    explicit QTensor2(const Sym2& m) : QTensor2(m.a, m.b, m.c) {}
    // deviatoric coordinates q1 = Q11 - 1/2, q2 = Q12
    static QTensor2 from_deviatoric(double q1, double q2);
    static QTensor2 half_identity() { return QTensor2(0.5, 0.0, 0.5); }

    double q11() const { return m_.a; }
    double q12() const { return m_.b; }
    double q22() const { return m_.c; }
    double q1() const { return m_.a - 0.5; }
    double q2() const { return m_.b; }
    const Sym2& mat() const { return m_; }

private:
    Sym2 m_;
};

class QTensor3 {
public:
    explicit QTensor3(const Sym3& m);
    static QTensor3 third_identity();
    const Sym3& mat() const { return m_; }

private:
    Sym3 m_;
};

struct Decomposition2 {
    Director2 u, v;
};

struct Decomposition3 {
    Director3 u, v, w, z;
};

struct Eigen2 {
    std::array<double, 2> values;  // ascending
    std::array<std::array<double, 2>, 2> vectors;
};

struct Eigen3 {
    std::array<double, 3> values;  // ascending
    std::array<std::array<double, 3>, 3> vectors;
};

Eigen2 eigen_sym(const Sym2& m);
Eigen3 eigen_sym(const Sym3& m);

struct Membership {
    bool inside;
    double trace_defect;
    double min_eigenvalue;
};

Membership in_K(const Sym2& m);
Membership in_K(const Sym3& m);

QTensor2 q_of(const Director2& u);
QTensor3 q_of(const Director3& u);
double deviatoric_norm(const QTensor2& q);
QTensor2 midpoint(const Director2& u, const Director2& v);
QTensor3 midpoint(const Director3& u, const Director3& v);

Decomposition2 decompose2(const QTensor2& q);
Decomposition2 decompose2(const Sym2& m);
Decomposition3 decompose3(const QTensor3& q);
Decomposition3 decompose3(const Sym3& m);

Sym2 reconstruct(const Decomposition2& d);
Sym3 reconstruct(const Decomposition3& d);
Sym3 quad_mean(const std::array<Director3, 4>& quad);

}  // namespace nemlat
