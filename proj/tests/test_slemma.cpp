#include "sqcqp/rng.hpp"
#include "sqcqp/slemma.hpp"

#include "doctest.h"
#include "oracle.hpp"

using namespace sqcqp;

TEST_CASE("multiplier alternative reduces to the aggregate minimum") {
  const QuadForm norm2{1.0, Vector::Zero(3), 0.0};
  CHECK(slemma::check_multiplier_alternative(Vector{{1.0}}, {norm2}));

  const QuadForm shifted{1.0, Vector::Zero(3), -1.0};
  CHECK_FALSE(slemma::check_multiplier_alternative(Vector{{1.0}}, {shifted}));

  // Vertex formula: aggregate of ||x||^2 - 2x_1 and the constant 1 has
  // minimum 1 - 1 = 0.
  const QuadForm shifted_vertex{1.0, Vector{{-1.0, 0.0, 0.0}}, 0.0};
  const QuadForm one{0.0, Vector::Zero(3), 1.0};
  CHECK(slemma::check_multiplier_alternative(Vector{{1.0, 1.0}}, {shifted_vertex, one}));

  CHECK_THROWS_AS(slemma::check_multiplier_alternative(Vector{{0.0}}, {norm2}),
                  std::invalid_argument);
}

TEST_CASE("strict point search") {
  const QuadForm ball{1.0, Vector::Zero(4), -1.0};
  const auto inside = slemma::search_strict_point({ball});
  REQUIRE(inside.found);
  CHECK(inside.x.norm() < 1.0);

  const QuadForm plus{1.0, Vector::Zero(4), 0.0};
  const QuadForm minus{-1.0, Vector::Zero(4), 0.0};
  minimax::Budget small;
  small.starts = 25;
  small.max_iters = 80;
  CHECK_FALSE(slemma::search_strict_point({plus, minus}, small).found);

  const QuadForm complement{-1.0, Vector::Zero(4), 1.0};
  const QuadForm halfspace{0.0, Vector{{1.0, 0, 0, 0}}, 0.0};
  const auto pt = slemma::search_strict_point({complement, halfspace});
  REQUIRE(pt.found);
  CHECK(eval(complement, pt.x) < 0.0);
  CHECK(eval(halfspace, pt.x) < 0.0);
}

TEST_CASE("null space basis is orthonormal and annihilates the rows") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const int n = 6, rows = 1 + t % 4;
    Matrix B(rows, n);
    for (int i = 0; i < rows; ++i) B.row(i) = rng.normal_vector(n).transpose();
    const Matrix basis = slemma::null_space_basis(B);
    REQUIRE(basis.cols() == n - rows);  // random rows are independent
    CHECK((B * basis).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((basis.transpose() * basis - Matrix::Identity(basis.cols(), basis.cols()))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("hand-checkable witness in three dimensions") {
  // Rows e1, e2: the null space is the third axis; the sphere equation
  // gives alpha^2 = 1/2.
  std::vector<QuadForm> fs = {QuadForm{0.3, Vector{{1.0, 0.0, 0.0}}, 0.1},
                              QuadForm{-0.7, Vector{{0.0, 1.0, 0.0}}, 0.4}};
  Vector xv = Vector::Zero(3), xw = Vector::Zero(3);
  xv[0] = 1.0;
  xw[1] = 1.0;
  const auto w = slemma::build_omega_witness(fs, xv, xw, 0.5);
  CHECK(std::abs(w.x_tilde[0] - 0.5) < 1e-12);
  CHECK(std::abs(w.x_tilde[1] - 0.5) < 1e-12);
  CHECK(std::abs(std::abs(w.x_tilde[2]) - std::sqrt(0.5)) < 1e-12);
  CHECK(w.x_tilde.squaredNorm() == doctest::Approx(1.0));
  CHECK(std::abs(std::abs(w.alpha_star) - std::sqrt(0.5)) < 1e-12);
}

TEST_CASE("degenerate witness branch") {
  std::vector<QuadForm> fs = {QuadForm{1.0, Vector{{1.0, 0.0, 0.0}}, 0.0}};
  const Vector v = Vector{{0.3, -0.2, 0.9}};
  const auto w = slemma::build_omega_witness(fs, v, v, 0.25);
  CHECK(w.degenerate);
  CHECK(w.x_tilde.isApprox(v));
  CHECK(w.inequality_residual <= 1e-12);
}

TEST_CASE("witness invariants hold on random instances") {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const int n = 10, m = 3;
    const Problem p = oracle::random_sqcqp(n, m, rng);
    const auto fs = slemma::probe_functionals(p, std::nullopt);
    const Vector xv = 3.0 * rng.normal_vector(n);
    const Vector xw = 3.0 * rng.normal_vector(n);
    const double lambda = rng.uniform(0.05, 0.95);
    const auto w = slemma::build_omega_witness(fs, xv, xw, lambda);
    const double tol = slemma::witness_tol(xv, xw);
    CHECK(w.sphere_residual <= tol);
    CHECK(w.linsys_residual <= tol);
    CHECK(w.inequality_residual <= tol);

    // The discriminant of the sphere equation is nonnegative by the
    // parallelogram identity; assert the formula directly.
    const Vector q = lambda * xv + (1.0 - lambda) * xw;
    const double disc = std::pow(w.u_star.dot(q), 2) +
                        lambda * (1.0 - lambda) * w.u_star.squaredNorm() *
                            (xv - xw).squaredNorm();
    CHECK(disc >= 0.0);
  }
}

TEST_CASE("interpolation identity for squared norms") {
  Rng rng(37);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 7;
    const Vector xv = 5.0 * rng.normal_vector(n);
    const Vector xw = 5.0 * rng.normal_vector(n);
    const double l = rng.uniform(0.0, 1.0);
    const double lhs = (l * xv + (1.0 - l) * xw).squaredNorm();
    const double rhs = l * xv.squaredNorm() + (1.0 - l) * xw.squaredNorm() -
                       l * (1.0 - l) * (xv - xw).squaredNorm();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("witness construction rejects bad inputs") {
  std::vector<QuadForm> fs = {QuadForm{1.0, Vector{{1.0, 0.0}}, 0.0},
                              QuadForm{0.0, Vector{{0.0, 1.0}}, 0.0}};
  const Vector a = Vector{{1.0, 0.0}}, b = Vector{{0.0, 1.0}};
  CHECK_THROWS_AS(slemma::build_omega_witness(fs, a, b, 0.5), slemma::RankError);
  std::vector<QuadForm> one = {fs[0]};
  CHECK_THROWS_AS(slemma::build_omega_witness(one, a, b, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(slemma::build_omega_witness(one, a, b, 1.0), std::invalid_argument);
  CHECK_NOTHROW(slemma::build_omega_witness(one, a, b, 0.5));
}

TEST_CASE("convexity probe") {
  Rng rng(41);
  SUBCASE("random instance passes every sample") {
    const Problem p = oracle::random_sqcqp(8, 2, rng);
    const auto rep = slemma::omega_convexity_probe(p, 300, 42);
    CHECK(rep.passes == 300);
    CHECK_FALSE(rep.structural_failure);
    CHECK(rep.failures.empty());
  }
  SUBCASE("full-rank linear coefficients are a structural failure") {
    const Problem p = Problem::make(
        QuadForm{1.0, Vector{{1.0, 0.0}}, 0.0},
        {QuadForm{1.0, Vector{{0.0, 1.0}}, -1.0}});
    const auto rep = slemma::omega_convexity_probe(p, 50, 42);
    CHECK(rep.structural_failure);
    CHECK(rep.passes == 0);
  }
  SUBCASE("objective-only functional list passes") {
    const std::vector<QuadForm> fs = {QuadForm{-2.0, Vector{{0.5, -0.3}}, 1.0}};
    const auto rep = slemma::omega_convexity_probe(fs, 2, 100, 42);
    CHECK(rep.passes == 100);
  }
  SUBCASE("candidate point shifts the objective functional") {
    const Problem p = oracle::random_sqcqp(6, 2, rng);
    const Vector cand = rng.normal_vector(6);
    const auto fs = slemma::probe_functionals(p, cand);
    CHECK(eval(fs[0], cand) == doctest::Approx(0.0));  // f0 = J - J(candidate)
    const auto rep = slemma::omega_convexity_probe(p, 100, 42, cand);
    CHECK(rep.passes == 100);
  }
}

TEST_CASE("the two alternative statements exclude each other") {
  Rng rng(43);
  int strict_cases = 0, separating_cases = 0;

  for (int t = 0; t < 15; ++t) {
    // Instances with a strict point by construction.
    const Problem p = oracle::random_sqcqp(4, 2, rng);
    const auto sp = slemma::search_strict_point(p.constraints);
    if (!sp.found) continue;
    ++strict_cases;
    const int grid = 8;
    Vector gamma(2);
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        if (i == 0 && j == 0) continue;
        gamma << 0.25 * i, 0.25 * j;
        CHECK_FALSE(slemma::check_multiplier_alternative(gamma, p.constraints));
      }
  }

  for (int t = 0; t < 15; ++t) {
    // Split a globally nonnegative quadratic into two pieces: gamma = (1,1)
    // separates, so no strict point can exist.
    const int n = 4;
    const Vector peak = rng.normal_vector(n);
    const QuadForm total{1.0, -peak, peak.squaredNorm()};  // ||x - peak||^2
    QuadForm g{rng.uniform(-0.5, 0.5), 0.3 * rng.normal_vector(n), rng.uniform(-1, 1)};
    const QuadForm f1{total.a - g.a, total.b - g.b, total.c - g.c};
    REQUIRE(slemma::check_multiplier_alternative(Vector{{1.0, 1.0}}, {f1, g}));
    ++separating_cases;
    minimax::Budget b;
    b.starts = 30;
    b.max_iters = 100;
    CHECK_FALSE(slemma::search_strict_point({f1, g}, b).found);
  }
  CHECK(strict_cases > 5);
  CHECK(separating_cases == 15);
}

TEST_CASE("classify_alternative returns a single verdict") {
  const QuadForm ball{1.0, Vector::Zero(4), -1.0};
  const auto a = slemma::classify_alternative({ball});
  CHECK(a.which == slemma::AlternativeResult::Kind::StrictPoint);

  const QuadForm nonneg{1.0, Vector::Zero(4), 0.0};
  const auto b = slemma::classify_alternative({nonneg});
  CHECK(b.which == slemma::AlternativeResult::Kind::SeparatingMultipliers);
}
