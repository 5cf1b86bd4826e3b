#ifndef D2C_BIGINT_HPP
#define D2C_BIGINT_HPP

#include <boost/multiprecision/cpp_int.hpp>

namespace d2c {

using BigInt = boost::multiprecision::cpp_int;

// Euclidean division: a = b*q + r with 0 <= r < |b|. Callers check b != 0.
inline BigInt euclid_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;  // truncates toward zero
    BigInt r = a % b;
    if (r < 0) q += (b > 0) ? -1 : 1;
    return q;
}

inline BigInt euclid_mod(const BigInt& a, const BigInt& b) {
    BigInt r = a % b;
    if (r < 0) r += abs(b);
    return r;
}

}  // namespace d2c

#endif
