#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dgdeform/graded.hpp"

using namespace dgdeform;

namespace {

template <class K>
MatX<K> mat2(K a, K b, K c, K d) {
  MatX<K> m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("solve: identity returns rhs") {
  MatX<Rat> id = MatX<Rat>::Identity(3, 3);
  VecX<Rat> b(3);
  b << Rat(1), Rat(-2, 3), Rat(7);
  auto x = solve<Rat>(id, b);
  REQUIRE(x.has_value());
  CHECK(*x == b);
}

TEST_CASE("solve: zero matrix certifies no solution") {
  MatX<Rat> z = MatX<Rat>::Zero(2, 2);
  VecX<Rat> b(2);
  b << Rat(1), Rat(0);
  CHECK_FALSE(solve<Rat>(z, b).has_value());
}

TEST_CASE("solve over F5: [[2]] x = (3) gives x = 4") {
  MatX<Fp> a(1, 1);
  a(0, 0) = Fp(2, 5);
  VecX<Fp> b(1);
  b(0) = Fp(3, 5);
  auto x = solve<Fp>(a, b);
  REQUIRE(x.has_value());
  CHECK((*x)(0) == Fp(4, 5));
  CHECK(Fp(2, 5) * (*x)(0) == Fp(3, 5));
}

TEST_CASE("solve reproduces rhs exactly over both fields") {
  std::mt19937_64 rng(13);
  auto rnd_rat = [&]() { return Rat((long long)(rng() % 17) - 8, 1 + (long long)(rng() % 5)); };
  for (int trial = 0; trial < 25; ++trial) {
    MatX<Rat> a(4, 4);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 4; ++j) a(i, j) = rnd_rat();
    VecX<Rat> x0(4);
    for (Index i = 0; i < 4; ++i) x0(i) = rnd_rat();
    VecX<Rat> b = a * x0;
    auto x = solve<Rat>(a, b);
    REQUIRE(x.has_value());
    CHECK(VecX<Rat>(a * *x) == b);
  }
  for (int trial = 0; trial < 25; ++trial) {
    MatX<Fp> a(5, 3);
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 3; ++j) a(i, j) = Fp((long long)(rng() % 7), 7);
    VecX<Fp> x0(3);
    for (Index i = 0; i < 3; ++i) x0(i) = Fp((long long)(rng() % 7), 7);
    VecX<Fp> b = a * x0;
    auto x = solve<Fp>(a, b);
    REQUIRE(x.has_value());
    CHECK(VecX<Fp>(a * *x) == b);
  }
}

TEST_CASE("kernel and column space are complementary in rank") {
  MatX<Rat> a(3, 4);
  a << Rat(1), Rat(2), Rat(3), Rat(4),
       Rat(2), Rat(4), Rat(6), Rat(8),
       Rat(0), Rat(1), Rat(1), Rat(0);
  Index r = rank<Rat>(a);
  CHECK(r == 2);
  CHECK(kernel<Rat>(a).cols() == 2);
  CHECK(column_space<Rat>(a).cols() == 2);
  MatX<Rat> k = kernel<Rat>(a);
  CHECK(is_zero(MatX<Rat>(a * k)));
}

TEST_CASE("inverse") {
  MatX<Rat> a = mat2(Rat(1), Rat(2), Rat(3), Rat(4));
  auto inv = inverse<Rat>(a);
  REQUIRE(inv.has_value());
  CHECK(MatX<Rat>(a * *inv) == MatX<Rat>(MatX<Rat>::Identity(2, 2)));
  MatX<Rat> sing = mat2(Rat(1), Rat(2), Rat(2), Rat(4));
  CHECK_FALSE(inverse<Rat>(sing).has_value());
}

TEST_CASE("cohomology slice: zero differentials give full space") {
  MatX<Rat> din = MatX<Rat>::Zero(3, 0);
  MatX<Rat> dout = MatX<Rat>::Zero(0, 3);
  auto h = cohomology_slice<Rat>(din, dout);
  CHECK(h.dim == 3);
  CHECK(MatX<Rat>(h.proj * h.reps) == MatX<Rat>(MatX<Rat>::Identity(3, 3)));
}

TEST_CASE("cohomology slice: acyclic two-term complex") {
  // k --id--> k at the right slot: H = ker/im = 0
  MatX<Rat> din(1, 1);
  din(0, 0) = Rat(1);
  MatX<Rat> dout = MatX<Rat>::Zero(0, 1);
  auto h = cohomology_slice<Rat>(din, dout);
  CHECK(h.dim == 0);
}

TEST_CASE("complex cohomology with windows") {
  // degrees 0,1,2 each dim 1, zero differential
  GradedSpace sp({"u", "v", "w"}, {0, 1, 2});
  Complex<Rat> c{sp, MatX<Rat>::Zero(3, 3), Window::all()};
  c.validate();
  auto dims = cohomology_dims(c, Window::at(0, 2));
  REQUIRE(dims.size() == 3);
  CHECK(dims[0] == 1);
  CHECK(dims[1] == 1);
  CHECK(dims[2] == 1);

  Complex<Rat> truncated{sp, MatX<Rat>::Zero(3, 3), Window::at(0, 2)};
  CHECK_THROWS_AS(complex_cohomology(truncated, Window::at(0, 2)), WindowError);
  CHECK_NOTHROW(complex_cohomology(truncated, Window::at(1, 1)));
}

TEST_CASE("euler characteristic conservation on random complexes (property)") {
  // random square-zero differential: take d = N with N structured as strictly
  // upper in degree order via random rank-1 compositions u·v^T with v·u = 0
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> labels;
    std::vector<int> degs;
    int dims[3] = {2, 3, 2};
    for (int d = 0; d < 3; ++d)
      for (int i = 0; i < dims[d]; ++i) {
        labels.push_back("x" + std::to_string(d) + std::to_string(i));
        degs.push_back(d);
      }
    GradedSpace sp(labels, degs);
    Index n = sp.total_dim();
    // random degree-+1 map, then correct to square zero by restricting to a
    // map that kills its own image: pick d1 random, then d2 with d2∘d1 = 0
    MatX<Fp> d = MatX<Fp>::Zero(n, n);
    MatX<Fp> d0(dims[1], dims[0]), d1(dims[2], dims[1]);
    for (Index i = 0; i < d0.rows(); ++i)
      for (Index j = 0; j < d0.cols(); ++j) d0(i, j) = Fp((long long)(rng() % 5), 5);
    // d1 columns constrained: d1 * d0 = 0  => rows of d1 in kernel of d0^T
    MatX<Fp> kerT = kernel<Fp>(MatX<Fp>(d0.transpose()));
    for (Index i = 0; i < d1.rows(); ++i) {
      VecX<Fp> row = VecX<Fp>::Zero(dims[1]);
      for (Index c = 0; c < kerT.cols(); ++c)
        row += Fp((long long)(rng() % 5), 5) * kerT.col(c);
      d1.row(i) = row.transpose();
    }
    d.block(sp.first_index(1), sp.first_index(0), dims[1], dims[0]) = d0;
    d.block(sp.first_index(2), sp.first_index(1), dims[2], dims[1]) = d1;
    Complex<Fp> c{sp, d, Window::all()};
    c.validate();
    auto hd = cohomology_dims(c, Window::at(0, 2));
    long long euler_h = (long long)hd[0] - hd[1] + hd[2];
    long long euler_c = (long long)dims[0] - dims[1] + dims[2];
    CHECK(euler_h == euler_c);
  }
}
