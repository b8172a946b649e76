/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/types.hpp"

#include <doctest.h>

#include <random>

using namespace miniallo;

TEST_CASE("element type spelling round trips") {
  for (const char *s : {"int1", "int8", "uint3", "uint128", "index", "float16",
                        "float32", "float64", "fixed(8,4)", "ufixed(12,0)"}) {
    auto t = parseElemType(s);
    REQUIRE(t);
    CHECK(t->str() == s);
  }
  CHECK_FALSE(parseElemType("int0"));
  CHECK_FALSE(parseElemType("int129"));
  CHECK_FALSE(parseElemType("float8"));
  CHECK_FALSE(parseElemType("fixed(8,9)"));
  CHECK_FALSE(parseElemType("bogus"));
}

TEST_CASE("integer promotion widens by one bit") {
  auto r = promoteBinary("+", ElemType::intTy(32), ElemType::intTy(32));
  REQUIRE(r.type);
  CHECK(*r.type == ElemType::intTy(33));

  r = promoteBinary("*", ElemType::intTy(8), ElemType::intTy(8));
  REQUIRE(r.type);
  CHECK(r.type->width == 16);

  r = promoteBinary("*", ElemType::fixedTy(8, 4), ElemType::fixedTy(6, 2));
  REQUIRE(r.type);
  CHECK(*r.type == ElemType::fixedTy(14, 6));
}

TEST_CASE("no implicit conversion between float and integral") {
  auto r = promoteBinary("+", ElemType::floatTy(32), ElemType::intTy(8));
  CHECK_FALSE(r.type);
  CHECK_FALSE(r.error.empty());
  CHECK_FALSE(storeCompatible(ElemType::floatTy(32), ElemType::intTy(8)));
  CHECK(storeCompatible(ElemType::intTy(17), ElemType::intTy(16)));
  CHECK(implicitlyWidens(ElemType::intTy(8), ElemType::intTy(16)));
  CHECK_FALSE(implicitlyWidens(ElemType::intTy(16), ElemType::intTy(8)));
}

// Two's-complement wrap checked against a plain modular oracle.
TEST_CASE("wrap matches modular reduction") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    int w = 1 + static_cast<int>(rng() % 62);
    int64_t v = static_cast<int64_t>(rng());
    int64_t mod = int64_t(1) << w;
    int64_t u = ((v % mod) + mod) % mod;
    CHECK(wrapInt(v, w, false) == u);
    int64_t s = u >= mod / 2 ? u - mod : u;
    CHECK(wrapInt(v, w, true) == s);
  }
}

TEST_CASE("floor division rounds toward negative infinity") {
  CHECK(floorDiv(7, 2) == 3);
  CHECK(floorDiv(-7, 2) == -4);
  CHECK(floorDiv(7, -2) == -4);
  CHECK(floorMod(-7, 2) == 1);
  CHECK(floorMod(7, -2) == -1);
  for (int a = -20; a <= 20; ++a)
    for (int b = -5; b <= 5; ++b) {
      if (b == 0)
        continue;
      i128 q = floorDiv(a, b), r = floorMod(a, b);
      CHECK(q * b + r == a);
      CHECK((r == 0 || (r < 0) == (b < 0)));
    }
}

TEST_CASE("rescale floors dropped fraction bits") {
  // 1.75 in fixed(*,2) = 7; to one fraction bit -> 1.5 = 3.
  CHECK(rescale(7, 2, 1) == 3);
  // -1.75 = -7 -> floor to -2.0 = -4 at one fraction bit.
  CHECK(rescale(-7, 2, 1) == -4);
  CHECK(rescale(3, 1, 4) == 24);
}

// Intermediates never overflow: exhaustive over int4 x int4 for + - *.
TEST_CASE("promoted intermediate holds every result") {
  for (const char *op : {"+", "-", "*"}) {
    for (int w1 = 1; w1 <= 6; ++w1)
      for (int w2 = 1; w2 <= 6; ++w2) {
        auto r = promoteBinary(op, ElemType::intTy(w1), ElemType::intTy(w2));
        REQUIRE(r.type);
        int w = r.type->width;
        for (int64_t a = -(1 << (w1 - 1)); a < (1 << (w1 - 1)); ++a)
          for (int64_t b = -(1 << (w2 - 1)); b < (1 << (w2 - 1)); ++b) {
            int64_t v = op[0] == '+' ? a + b : op[0] == '-' ? a - b : a * b;
            CHECK(wrapInt(v, w, true) == v);
          }
      }
  }
}

TEST_CASE("promoted intermediate holds random wide results") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    int w1 = 9 + static_cast<int>(rng() % 56), w2 = 9 + static_cast<int>(rng() % 56);
    auto r = promoteBinary("*", ElemType::intTy(w1), ElemType::intTy(w2));
    REQUIRE(r.type);
    i128 a = wrapInt(static_cast<int64_t>(rng()), w1, true);
    i128 b = wrapInt(static_cast<int64_t>(rng()), w2, true);
    CHECK(wrapInt(a * b, r.type->width, true) == a * b);
  }
}

TEST_CASE("bitsForSigned") {
  CHECK(bitsForSigned(0) == 1);
  CHECK(bitsForSigned(-1) == 1);
  CHECK(bitsForSigned(127) == 8);
  CHECK(bitsForSigned(-128) == 8);
  CHECK(bitsForSigned(128) == 9);
}
