#pragma once

#include <gmpxx.h>

#include "hrsearch/mpint.hpp"

namespace hrsearch {

mpz_class to_mpz(const MPInt& x);
// Throws OverflowError if x does not fit in the given number of limbs.
MPInt from_mpz(const mpz_class& x, std::size_t limbs);

}  // namespace hrsearch
