#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace latcoh {

using Int = mpz_class;
using Rat = mpq_class;
using IntVec = std::vector<int64_t>;
using RatVec = std::vector<Rat>;
using IntMat = std::vector<std::vector<int64_t>>;

struct OverflowError : std::runtime_error {
  OverflowError() : std::runtime_error("int64 overflow") {}
};

inline int64_t add_ck(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError();
  return r;
}
inline int64_t sub_ck(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError();
  return r;
}
inline int64_t mul_ck(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError();
  return r;
}

int64_t to_i64(const Int& x);
Int floor_of(const Rat& x);
Int ceil_of(const Rat& x);
std::string rat_str(const Rat& x);
Rat parse_rat(const std::string& s);
bool is_integral(const Rat& x);
int64_t floor_div(int64_t a, int64_t b);
int64_t ceil_div(int64_t a, int64_t b);

}  // namespace latcoh
