#pragma once

#include <vector>

#include "weakiso/quad.hpp"

namespace weakiso {

// integral binary quadratic form a*X^2 + b*X*Y + c*Y^2, positive definite
struct QuadraticForm {
  Int a, b, c;

  QuadraticForm(const Int& aa, const Int& bb, const Int& cc) : a(aa), b(bb), c(cc) {
    if (a <= 0 || disc() >= 0) throw std::invalid_argument("form is not positive definite");
  }

  Int disc() const { return b * b - 4 * a * c; }
  bool is_primitive() const { return gcd_int(gcd_int(a, b), c) == 1; }
  bool is_reduced() const;

  // evaluate at (u, v)
  Int eval(const Int& u, const Int& v) const { return a * u * u + b * u * v + c * v * v; }

  bool operator==(const QuadraticForm& o) const { return a == o.a && b == o.b && c == o.c; }
  bool operator!=(const QuadraticForm& o) const { return !(*this == o); }
  bool operator<(const QuadraticForm& o) const {
    if (a != o.a) return a < o.a;
    if (b != o.b) return b < o.b;
    return c < o.c;
  }

  std::string str() const { return "(" + a.get_str() + "," + b.get_str() + "," + c.get_str() + ")"; }
};

// unique reduced representative of the proper equivalence class
QuadraticForm reduce(QuadraticForm f);

// identity form (1, b0, c0) of the given order discriminant
QuadraticForm principal_form(const Int& order_disc);

// class inverse: the opposite form, reduced
QuadraticForm inverse(const QuadraticForm& f);

// Gauss/Dirichlet composition of primitive forms of equal discriminant, reduced output
QuadraticForm compose(const QuadraticForm& f1, const QuadraticForm& f2);

// f^n under composition (n >= 0)
QuadraticForm compose_pow(const QuadraticForm& f, const Int& n);

struct IdealClass {
  QuadraticForm form;  // reduced
  QuadOrder order;

  IdealClass(const QuadraticForm& f, const QuadOrder& o) : form(reduce(f)), order(o) {
    if (form.disc() != o.order_disc()) throw std::invalid_argument("form discriminant does not match order");
    if (!form.is_primitive()) throw std::invalid_argument("class of an imprimitive form is not proper");
  }

  bool operator==(const IdealClass& o) const { return order == o.order && form == o.form; }
  bool operator!=(const IdealClass& o) const { return !(*this == o); }
};

// all proper ideal classes of the order, identity first, then sorted
std::vector<IdealClass> class_group(const QuadOrder& order);

// h(O) from h(O_K) by the conductor formula; test oracle for class_group sizes
Int class_number_by_formula(const QuadOrder& order);

}  // namespace weakiso
