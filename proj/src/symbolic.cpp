#include "partlab/symbolic.hpp"

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace partlab {

namespace {

const Rat kHalf(1, 2);

bool is_integer(const Rat& r) { return r.get_den() == 1; }

}  // namespace

bool QuasiPoly2::is_zero() const {
  return even_c0 == 0 && even_c1 == 0 && odd_c0 == 0 && odd_c1 == 0;
}

Rat QuasiPoly2::value_rat(long n) const {
  const bool even = ((n % 2) + 2) % 2 == 0;
  Rat v = even ? even_c0 + even_c1 * Rat(n) : odd_c0 + odd_c1 * Rat(n);
  v.canonicalize();
  return v;
}

Int QuasiPoly2::value_at(long n) const {
  const Rat v = value_rat(n);
  if (!is_integer(v)) {
    throw std::logic_error("quasi-polynomial tail is not integer-valued at " +
                           std::to_string(n));
  }
  return v.get_num();
}

bool QuasiPoly2::integer_valued(long lo, long hi) const {
  for (long n = lo; n <= hi; ++n) {
    if (!is_integer(value_rat(n))) return false;
  }
  return true;
}

QuasiPoly2 QuasiPoly2::shifted(long d) const {
  // g'(n) = g(n - d). Each branch re-centers; when d is odd the branches
  // additionally swap because n and n - d have opposite parity.
  QuasiPoly2 out;
  const Rat dd(d);
  if (d % 2 == 0) {
    out.even_c0 = even_c0 - even_c1 * dd;
    out.even_c1 = even_c1;
    out.odd_c0 = odd_c0 - odd_c1 * dd;
    out.odd_c1 = odd_c1;
  } else {
    out.even_c0 = odd_c0 - odd_c1 * dd;
    out.even_c1 = odd_c1;
    out.odd_c0 = even_c0 - even_c1 * dd;
    out.odd_c1 = even_c1;
  }
  out.even_c0.canonicalize();
  out.even_c1.canonicalize();
  out.odd_c0.canonicalize();
  out.odd_c1.canonicalize();
  return out;
}

bool operator==(const QuasiPoly2& a, const QuasiPoly2& b) {
  return a.even_c0 == b.even_c0 && a.even_c1 == b.even_c1 &&
         a.odd_c0 == b.odd_c0 && a.odd_c1 == b.odd_c1;
}

QuasiPoly2 operator+(const QuasiPoly2& a, const QuasiPoly2& b) {
  return QuasiPoly2{a.even_c0 + b.even_c0, a.even_c1 + b.even_c1,
                    a.odd_c0 + b.odd_c0, a.odd_c1 + b.odd_c1};
}

QuasiPoly2 operator-(const QuasiPoly2& a, const QuasiPoly2& b) {
  return QuasiPoly2{a.even_c0 - b.even_c0, a.even_c1 - b.even_c1,
                    a.odd_c0 - b.odd_c0, a.odd_c1 - b.odd_c1};
}

namespace {

// Shared expansion state for one cap. cell(a, b) is the collected signed
// coefficient map of the cell rooted at p(n-a) under head p(n-b). The
// child offsets run over [2a-b+1, cap] independently of n (terms beyond n
// vanish by the p(negative) = 0 convention), so the recursion is a pure
// function of (a, b) and can be memoized.
class Expander {
 public:
  explicit Expander(long cap) : cap_(cap) {}

  const std::map<long, Int>& cell(long a, long b) {
    const std::pair<long, long> key{a, b};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::map<long, Int> out;
    out[a] = 1;
    for (long c = 2 * a - b + 1; c <= cap_; ++c) {
      for (const auto& [offset, coef] : cell(c, a)) {
        auto [slot, inserted] = out.emplace(offset, -coef);
        if (!inserted) slot->second -= coef;
      }
    }
    for (auto it = out.begin(); it != out.end();) {
      it = (it->second == 0) ? out.erase(it) : std::next(it);
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  long cap_;
  std::map<std::pair<long, long>, std::map<long, Int>> memo_;
};

void check_parcel_preconditions(long a, long b, long cap) {
  if (cap < 1) {
    throw std::invalid_argument("expand_parcel_symbolic: cap must be >= 1");
  }
  if (b < 0 || b >= a || a > cap) {
    throw std::invalid_argument(
        "expand_parcel_symbolic: requires 0 <= b < a <= cap, got a = " +
        std::to_string(a) + ", b = " + std::to_string(b) +
        ", cap = " + std::to_string(cap));
  }
}

}  // namespace

LinearForm expand_parcel_symbolic(long a, long b, long cap) {
  check_parcel_preconditions(a, b, cap);
  Expander expander(cap);
  LinearForm form;
  form.coeffs = expander.cell(a, b);
  form.cap = cap;
  form.lo = 0;
  form.hi = cap;
  return form;
}

LinearForm expand_symbolic(long cap, TailVariant variant) {
  if (cap < 2) {
    throw std::invalid_argument("expand_symbolic: cap must be >= 2");
  }
  long first = 1;
  if (variant == TailVariant::OneSub) first = 2;
  if (variant == TailVariant::TwoSub) first = 3;

  Expander expander(cap);
  LinearForm form;
  for (long c = first; c <= cap; ++c) {
    for (const auto& [offset, coef] : expander.cell(c, 0)) {
      auto [slot, inserted] = form.coeffs.emplace(offset, coef);
      if (!inserted) slot->second += coef;
    }
  }
  for (auto it = form.coeffs.begin(); it != form.coeffs.end();) {
    it = (it->second == 0) ? form.coeffs.erase(it) : std::next(it);
  }

  if (variant == TailVariant::OneSub) {
    form.tail = QuasiPoly2{Rat(1), Rat(0), Rat(1), Rat(0)};
  } else if (variant == TailVariant::TwoSub) {
    // floor(n/2) + 1: n/2 + 1 for even n, (n-1)/2 + 1 for odd n.
    form.tail = QuasiPoly2{Rat(1), kHalf, kHalf, kHalf};
  }

  form.cap = cap;
  form.lo = 2;
  form.hi = cap;
  return form;
}

LinearForm shift_form(const LinearForm& form, long d) {
  if (d < 1) throw std::invalid_argument("shift_form: d must be >= 1");
  LinearForm out;
  for (const auto& [offset, coef] : form.coeffs) {
    out.coeffs.emplace(offset + d, coef);
  }
  out.tail = form.tail.shifted(d);
  out.cap = form.cap + d;
  out.lo = form.lo + d;
  out.hi = form.hi + d;
  return out;
}

Int evaluate_form(const LinearForm& form, long n,
                  const PartitionTable& table) {
  Int acc(0);
  for (const auto& [offset, coef] : form.coeffs) {
    const long m = n - offset;
    if (m >= 0) acc += coef * table.at(m);
  }
  if (!form.tail.is_zero()) acc += form.tail.value_at(n);
  return acc;
}

long empirical_lower_bound(const LinearForm& form,
                           const PartitionTable& table) {
  for (long n = form.lo; n <= form.hi; ++n) {
    if (evaluate_form(form, n, table) != table.at(n)) {
      throw std::logic_error(
          "empirical_lower_bound: form fails inside its own window at n = " +
          std::to_string(n));
    }
  }
  long lo = form.lo;
  while (lo > 0 && evaluate_form(form, lo - 1, table) == table.at(lo - 1)) {
    --lo;
  }
  return lo;
}

long first_expanding_offset(long cap) {
  if (cap < 2) {
    throw std::invalid_argument("first_expanding_offset: cap must be >= 2");
  }
  // Largest a whose child range [2a+1, cap] under the top-level head is
  // nonempty; in the ascending-tab display this is the first cell.
  return (cap - 1) / 2;
}

namespace {

// Renders c0 + c1*n with denominators dividing 2 in the tightest natural
// shape: plain integers, "n/2", "(n - 1)/2", integer affine strings, or a
// generic "(A n + B)/2".
std::string branch_string(const Rat& c0, const Rat& c1) {
  if (c1 == 0) return to_decimal(c0);
  if (is_integer(c0) && is_integer(c1)) {
    std::string s;
    if (c1 == 1) {
      s = "n";
    } else if (c1 == -1) {
      s = "-n";
    } else {
      s = to_decimal(c1) + "n";
    }
    if (c0 > 0) s += " + " + to_decimal(c0);
    if (c0 < 0) s += " - " + to_decimal(Rat(-c0));
    return s;
  }
  // Half-integer slope or intercept: write (A n + B)/2 with integer A, B.
  const Rat a2 = c1 * 2;
  const Rat b2 = c0 * 2;
  const Int a = a2.get_num();
  const Int b = b2.get_num();
  std::string num;
  if (a == 1) {
    num = "n";
  } else if (a == -1) {
    num = "-n";
  } else {
    num = to_decimal(a) + "n";
  }
  if (b > 0) num += " + " + to_decimal(b);
  if (b < 0) num += " - " + to_decimal(Int(-b));
  if (b == 0) return num == "n" ? "n/2" : "(" + num + ")/2";
  return "(" + num + ")/2";
}

std::string tail_string(const QuasiPoly2& tail) {
  const bool branches_equal =
      tail.even_c0 == tail.odd_c0 && tail.even_c1 == tail.odd_c1;
  if (branches_equal) return branch_string(tail.even_c0, tail.even_c1);
  return "[n even: " + branch_string(tail.even_c0, tail.even_c1) +
         ", n odd: " + branch_string(tail.odd_c0, tail.odd_c1) + "]";
}

}  // namespace

std::string render_form(const LinearForm& form) {
  std::ostringstream out;
  out << "p(n) = ";
  bool first = true;
  for (const auto& [offset, coef] : form.coeffs) {
    const bool negative = coef < 0;
    Int magnitude = negative ? Int(-coef) : coef;
    if (first) {
      if (negative) out << "-";
    } else {
      out << (negative ? " - " : " + ");
    }
    if (magnitude != 1) out << to_decimal(magnitude);
    out << "p(n-" << offset << ")";
    first = false;
  }
  if (!form.tail.is_zero()) {
    std::string tail = tail_string(form.tail);
    if (!first) {
      if (!tail.empty() && tail.front() == '-') {
        out << " - " << tail.substr(1);
      } else {
        out << " + " << tail;
      }
    } else {
      out << tail;
    }
    first = false;
  }
  if (first) out << "0";
  out << "  [" << form.lo << " <= n <= " << form.hi << "]";
  return out.str();
}

}  // namespace partlab
