#include <cmath>
#include <random>
#include <vector>

#include "antnet/answer_repr.hpp"
#include "antnet/gradcheck.hpp"
#include "antnet/question_repr.hpp"
#include "doctest.h"

using namespace antnet;
using ad::Axis;
using ad::Graph;
using ad::Tensor;
using ad::Var;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, std::mt19937_64& rng, double scale = 1.0) {
  return uniform(r, c, scale, rng);
}

SkeletonWeights manual_weights(Graph& g, std::vector<double> raw, std::vector<bool> member) {
  SkeletonWeights w;
  const std::size_t m = raw.size();
  w.raw = g.constant(Tensor(m, 1, std::move(raw)));
  w.member = std::move(member);
  w.normalized.assign(m, 1.0 / static_cast<double>(m));
  return w;
}

double sum_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("skeleton scores: identity bilinear form on basis vectors") {
  Graph g;
  const Tensor q = Tensor::matrix({{1, 0}, {0, 1}});
  const Tensor answer = Tensor::matrix({{1, 0}, {1, 0}});
  const Tensor ctx = answer_context(std::vector<Tensor>{answer});
  const SkeletonWeights w = skeleton_scores(g.constant(q), g.constant(ctx), g.constant(Tensor::identity(2)));
  CHECK(w.raw.value() == Tensor::column({1.0, 0.0}));
  CHECK(w.member == std::vector<bool>{true, false});
  CHECK(std::abs(sum_of(w.normalized) - 1.0) <= 1e-9);
}

TEST_CASE("skeleton scores: zero form is uniform with every word a member") {
  std::mt19937_64 rng(1);
  Graph g;
  const Tensor q = random_tensor(4, 3, rng);
  const Tensor ctx = answer_context(std::vector<Tensor>{random_tensor(2, 3, rng)});
  const SkeletonWeights w = skeleton_scores(g.constant(q), g.constant(ctx), g.constant(Tensor(3, 3)));
  for (double v : w.raw.value().values()) CHECK(v == 0.0);
  for (double v : w.normalized) CHECK(v == 0.25);
  CHECK(w.member == std::vector<bool>(4, true));
}

TEST_CASE("skeleton scores match the double sum and are invariant to duplicated answers") {
  std::mt19937_64 rng(2);
  const std::size_t e = 3;
  const Tensor q = random_tensor(4, e, rng);
  const Tensor w_s = random_tensor(e, e, rng);
  const std::vector<Tensor> answers = {random_tensor(2, e, rng), random_tensor(5, e, rng)};

  // (1/J) Σ_j (1/N_j) Σ_n q_mᵀ W_s s_{j,n}, evaluated term by term.
  std::vector<double> expected(4, 0.0);
  for (std::size_t m = 0; m < 4; ++m) {
    for (const Tensor& a : answers) {
      double per_answer = 0.0;
      for (std::size_t n = 0; n < a.rows(); ++n)
        for (std::size_t i = 0; i < e; ++i)
          for (std::size_t j = 0; j < e; ++j) per_answer += q(m, i) * w_s(i, j) * a(n, j);
      expected[m] += per_answer / static_cast<double>(a.rows());
    }
    expected[m] /= static_cast<double>(answers.size());
  }

  Graph g;
  const auto w = skeleton_scores(g.constant(q), g.constant(answer_context(answers)), g.constant(w_s));
  for (std::size_t m = 0; m < 4; ++m) CHECK(w.raw.value()[m] == doctest::Approx(expected[m]).epsilon(1e-12));

  std::vector<Tensor> doubled = answers;
  doubled.insert(doubled.end(), answers.begin(), answers.end());
  const auto w2 = skeleton_scores(g.constant(q), g.constant(answer_context(doubled)), g.constant(w_s));
  for (std::size_t m = 0; m < 4; ++m) CHECK(w2.raw.value()[m] == doctest::Approx(w.raw.value()[m]).epsilon(1e-14));
  CHECK(w2.member == w.member);

  CHECK_THROWS_AS(answer_context(std::vector<Tensor>{}), ShapeError);
}

TEST_CASE("skeleton normalization sums to one and always has a member") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng() % 8;
    Graph g;
    const auto w = skeleton_scores(g.constant(random_tensor(m, 4, rng, 3.0)),
                                   g.constant(random_tensor(1, 4, rng, 3.0)),
                                   g.constant(random_tensor(4, 4, rng, 3.0)));
    CHECK(std::abs(sum_of(w.normalized) - 1.0) <= 1e-9);
    std::size_t members = 0;
    for (bool b : w.member) members += b ? 1 : 0;
    CHECK(members >= 1);
  }
}

TEST_CASE("skeleton representation examples") {
  Graph g;
  const Tensor h = Tensor::matrix({{1, 2}, {3, -4}, {5, 6}});
  Var hidden = g.constant(h);

  SUBCASE("single member returns its state") {
    const auto u = skeleton_repr(hidden, manual_weights(g, {0.2, 0.9, 0.1}, {false, true, false}));
    CHECK(u.value() == Tensor::row({3, -4}));
  }
  SUBCASE("equal scores give the arithmetic mean") {
    const auto u = skeleton_repr(hidden, manual_weights(g, {0.7, 0.7, 0.1}, {true, true, false}));
    CHECK(u.value()[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(u.value()[1] == doctest::Approx(-1.0).epsilon(1e-15));
  }
  SUBCASE("scores 2 and 1 give (2h1 + h2)/3") {
    const auto u = skeleton_repr(hidden, manual_weights(g, {2.0, 1.0, -1.0}, {true, true, false}));
    CHECK(u.value()[0] == doctest::Approx((2.0 * 1 + 3) / 3.0).epsilon(1e-15));
    CHECK(u.value()[1] == doctest::Approx((2.0 * 2 - 4) / 3.0).epsilon(1e-15));
  }
  SUBCASE("zero scores fall back to the uniform mean of the members") {
    const auto u = skeleton_repr(hidden, manual_weights(g, {0.0, 0.0, 0.0}, {true, true, true}));
    CHECK(u.value()[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(u.value()[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("mixed signs fall back to the uniform mean of the members") {
    const auto u = skeleton_repr(hidden, manual_weights(g, {0.5, -0.5, 0.0}, {true, true, false}));
    CHECK(u.value() == Tensor::row({2, -1}));
  }
}

TEST_CASE("skeleton representation is invariant to positive rescaling of scores") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    Graph g;
    Var hidden = g.constant(random_tensor(4, 3, rng));
    std::vector<double> raw(4);
    for (double& r : raw) r = pos(rng);
    std::vector<bool> member = {true, true, rng() % 2 == 0, true};
    const double c = pos(rng) * 10.0;
    std::vector<double> scaled = raw;
    for (double& r : scaled) r *= c;
    const Tensor a = skeleton_repr(hidden, manual_weights(g, raw, member)).value();
    const Tensor b = skeleton_repr(hidden, manual_weights(g, scaled, member)).value();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("full representation examples") {
  std::mt19937_64 rng(5);
  Graph g;
  const Tensor h = random_tensor(4, 3, rng);
  Var hidden = g.constant(h);
  Var u = g.constant(random_tensor(1, 3, rng));

  const FullRepr zero = full_repr(hidden, u, g.constant(Tensor(3, 3)));
  for (double a : zero.att.value().values()) CHECK(a == 0.25);
  const Tensor mean = ad::mean(hidden, Axis::rows).value();
  for (std::size_t c = 0; c < 3; ++c) CHECK(zero.v.value()[c] == doctest::Approx(mean[c]).epsilon(1e-15));

  const Tensor single = random_tensor(1, 3, rng);
  const FullRepr one = full_repr(g.constant(single), u, g.constant(random_tensor(3, 3, rng)));
  CHECK(one.att.value() == Tensor::column({1.0}));
  CHECK(one.v.value() == single);

  Tensor same(4, 3);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 3; ++c) same(r, c) = static_cast<double>(c) - 0.5;
  const FullRepr common = full_repr(g.constant(same), u, g.constant(random_tensor(3, 3, rng)));
  for (std::size_t c = 0; c < 3; ++c)
    CHECK(common.v.value()[c] == doctest::Approx(same(0, c)).epsilon(1e-14));

  CHECK_THROWS_AS(full_repr(hidden, u, g.constant(Tensor(2, 3))), ShapeError);
}

TEST_CASE("full representation lies in the convex hull of the states") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    Graph g;
    const std::size_t m = 1 + rng() % 6;
    const Tensor h = random_tensor(m, 4, rng, 2.0);
    const FullRepr r = full_repr(g.constant(h), g.constant(random_tensor(1, 4, rng, 2.0)),
                                 g.constant(random_tensor(4, 4, rng, 2.0)));
    double total = 0.0;
    for (double a : r.att.value().values()) total += a;
    CHECK(std::abs(total - 1.0) <= 1e-9);
    for (std::size_t c = 0; c < 4; ++c) {
      double lo = h(0, c), hi = h(0, c);
      for (std::size_t k = 1; k < m; ++k) {
        lo = std::min(lo, h(k, c));
        hi = std::max(hi, h(k, c));
      }
      CHECK(r.v.value()[c] >= lo - 1e-12);
      CHECK(r.v.value()[c] <= hi + 1e-12);
    }
  }
}

TEST_CASE("gradients through W_s and W_a pass a finite-difference check") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    CAPTURE(seed);
    std::mt19937_64 rng(seed);
    ParamStore ps;
    ParamId w_s = ps.add("w_s", random_tensor(3, 3, rng));
    ParamId w_a = ps.add("w_a", random_tensor(4, 4, rng));
    ParamId h = ps.add("h", random_tensor(5, 4, rng));
    const Tensor q = random_tensor(5, 3, rng);
    const Tensor ctx = random_tensor(1, 3, rng);
    const Tensor probe = random_tensor(1, 4, rng);
    auto f = [&](ParamStore& p, bool with_grad) {
      Graph g;
      Var hidden = g.param(p[h]);
      const auto sk = skeleton_scores(g.constant(q), g.constant(ctx), g.param(p[w_s]));
      Var u = skeleton_repr(hidden, sk);
      const FullRepr fr = full_repr(hidden, u, g.param(p[w_a]));
      Var s = ad::add(ad::sum(ad::mul(ad::add(fr.v, u), g.constant(probe))),
                      ad::sum(ad::mul(sk.raw, sk.raw)));
      if (with_grad) g.backward(s);
      return s.scalar();
    };
    CHECK(finite_diff_check(ps, f, 1e-5).max_relative_error <= 1e-5);
  }
}

TEST_CASE("relevance scores") {
  std::mt19937_64 rng(7);
  Graph g;
  Var h = g.constant(random_tensor(4, 2, rng));
  Var u = g.constant(random_tensor(1, 2, rng));

  const Tensor half = relevance_scores(h, u, g.constant(Tensor(1, 4)), g.constant(Tensor(1, 1))).value();
  CHECK(half.rows() == 4);
  for (double p : half.values()) CHECK(p == 0.5);

  const Tensor sat =
      relevance_scores(h, u, g.constant(Tensor(1, 4)), g.constant(Tensor::row({20.0}))).value();
  for (double p : sat.values()) CHECK(p > 0.999999);

  Var one = g.constant(Tensor::matrix({{2.0, 7.0}}));
  const double p = relevance_scores(one, u, g.constant(Tensor::row({1, 0, 0, 0})),
                                    g.constant(Tensor(1, 1)))
                       .scalar();
  CHECK(p == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-15));
  CHECK(p == doctest::Approx(0.8807970779778823).epsilon(1e-12));

  for (double x : relevance_scores(h, u, g.constant(random_tensor(1, 4, rng, 5.0)),
                                   g.constant(Tensor::row({0.3})))
                      .value()
                      .values()) {
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }

  CHECK_THROWS_AS(relevance_scores(h, u, g.constant(Tensor(1, 3)), g.constant(Tensor(1, 1))), ShapeError);
}

TEST_CASE("enlarge and augment") {
  Graph g;
  CHECK(enlarge(g.constant(Tensor::column({0.25})), 4).value() == Tensor::row({0.25, 0.25, 0.25, 0.25}));
  CHECK(enlarge(g.constant(Tensor::column({0.7})), 1).value() == Tensor::row({0.7}));
  CHECK_THROWS_AS(enlarge(g.constant(Tensor::column({0.5})), 0), ShapeError);

  Var e = enlarge(g.constant(Tensor::column({0.5})), 3);
  CHECK(augment(g.constant(Tensor::row({1, 2})), e).value() == Tensor::row({1, 2, 0.5, 0.5, 0.5}));
  CHECK_THROWS_AS(augment(g.constant(Tensor(2, 2)), e), ShapeError);

  ParamStore ps;
  ParamId p = ps.add("p", Tensor::column({0.4, 0.9}));
  Graph g2;
  Var big = enlarge(g2.param(ps[p]), 13);
  const Tensor& v = big.value();
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 13; ++c) CHECK(v(r, c) == ps[p].value[r]);
  g2.backward(ad::sum(big));
  CHECK(ps[p].grad == Tensor::column({13.0, 13.0}));
}

TEST_CASE("relevance block passes a finite-difference check") {
  std::mt19937_64 rng(8);
  ParamStore ps;
  ParamId h = ps.add("h", random_tensor(4, 3, rng));
  ParamId u = ps.add("u", random_tensor(1, 3, rng));
  ParamId w_p = ps.add("w_p", random_tensor(1, 6, rng));
  ParamId b_p = ps.add("b_p", random_tensor(1, 1, rng));
  const Tensor probe = random_tensor(4, 3 + 5, rng);
  auto f = [&](ParamStore& p, bool with_grad) {
    Graph g;
    Var hidden = g.param(p[h]);
    Var scores = relevance_scores(hidden, g.param(p[u]), g.param(p[w_p]), g.param(p[b_p]));
    Var s = ad::sum(ad::mul(augment(hidden, enlarge(scores, 5)), g.constant(probe)));
    if (with_grad) g.backward(s);
    return s.scalar();
  };
  CHECK(finite_diff_check(ps, f, 1e-5).max_relative_error <= 1e-5);
}
