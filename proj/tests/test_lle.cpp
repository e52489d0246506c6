#include <catch2/catch_amalgamated.hpp>

#include "qlle/lle.hpp"
#include "oracles.hpp"

using namespace qlle;

TEST_CASE("knn on collinear points") {
    DataMatrix d;
    d.points.resize(1, 4);
    d.points << 0.0, 1.0, 2.0, 3.0;
    NeighborGraph g = knn(d, 1);
    REQUIRE(g.neighbors[0][0] == 1);
    REQUIRE(g.neighbors[1][0] == 0);  // tie between 0 and 2 goes to the lower index
    REQUIRE(g.neighbors[3][0] == 2);
}

TEST_CASE("knn on the S-curve with paper parameters") {
    DataMatrix d = gen_s_curve(32, 7);
    NeighborGraph g = knn(d, 4);
    for (int i = 0; i < 32; ++i) {
        REQUIRE(int(g.neighbors[i].size()) == 4);
        for (int j = 0; j < 4; ++j) {
            REQUIRE(g.neighbors[i][j] != i);
            if (j > 0) REQUIRE(g.distances[i][j] >= g.distances[i][j - 1]);
        }
    }
}

TEST_CASE("knn duplicate points take the duplicate first") {
    DataMatrix d;
    d.points.resize(1, 4);
    d.points << 0.0, 5.0, 0.0, 9.0;
    NeighborGraph g = knn(d, 2);
    REQUIRE(g.neighbors[0][0] == 2);
    REQUIRE(g.distances[0][0] == 0.0);
    REQUIRE(g.neighbors[2][0] == 0);
}

TEST_CASE("knn rejects k >= N") {
    DataMatrix d = gen_s_curve(4, 1);
    REQUIRE_THROWS_AS(knn(d, 4), contract_error);
}

TEST_CASE("single neighbor forces weight 1") {
    DataMatrix d;
    d.points.resize(2, 3);
    d.points << 0.0, 1.0, 5.0, 0.0, 0.0, 1.0;
    NeighborGraph g = knn(d, 1);
    RealMatrix w = local_weights(d, g);
    REQUIRE(w(1, 0) == Catch::Approx(1.0));
    REQUIRE(w.col(0).sum() == Catch::Approx(1.0));
}

TEST_CASE("symmetric two-neighbor point gets equal weights") {
    DataMatrix d;
    d.points.resize(2, 3);
    d.points << 0.0, -1.0, 1.0, 0.0, 0.0, 0.0;
    NeighborGraph g = knn(d, 2);
    RealMatrix w = local_weights(d, g);
    REQUIRE(w(1, 0) == Catch::Approx(0.5).margin(1e-10));
    REQUIRE(w(2, 0) == Catch::Approx(0.5).margin(1e-10));
}

TEST_CASE("weights match the constrained least-squares oracle") {
    auto rg = oracle::rng(5);
    DataMatrix d;
    d.points = oracle::random_real(rg, 3, 10);
    NeighborGraph g = knn(d, 3);
    RealMatrix w = local_weights(d, g);
    for (int i = 0; i < 10; ++i) {
        RealMatrix nbrs(3, 3);
        for (int j = 0; j < 3; ++j) nbrs.col(j) = d.points.col(g.neighbors[i][j]);
        // Same ridge as the library makes the minimizer unique, so the
        // weight vectors themselves must agree.
        double ridge = kDefaultWeightRidge * local_gram(d, g, i).trace();
        RealVector wo = oracle::constrained_reconstruction_weights(
            RealVector(d.points.col(i)), nbrs, ridge);
        for (int j = 0; j < 3; ++j)
            REQUIRE(std::abs(w(g.neighbors[i][j], i) - wo[j]) < 1e-8);
    }
}

TEST_CASE("weight columns sum to one with support on the graph") {
    DataMatrix d = gen_swiss_roll(20, 3);
    NeighborGraph g = knn(d, 4);
    RealMatrix w = local_weights(d, g);
    for (int i = 0; i < 20; ++i) {
        REQUIRE(w.col(i).sum() == Catch::Approx(1.0).margin(1e-10));
        for (int r = 0; r < 20; ++r) {
            bool in_graph = false;
            for (int j : g.neighbors[i])
                if (j == r) in_graph = true;
            if (!in_graph) REQUIRE(w(r, i) == 0.0);
        }
    }
}

TEST_CASE("appendix stationarity: 2 C_i w_i + mu 1 = 0 for some mu") {
    DataMatrix d = gen_s_curve(16, 9);
    NeighborGraph g = knn(d, 3);
    RealMatrix w = local_weights(d, g);
    for (int i = 0; i < 16; ++i) {
        RealMatrix c = local_gram(d, g, i);
        c.diagonal().array() += kDefaultWeightRidge * c.trace();  // objective the solve uses
        RealVector wi(3);
        for (int j = 0; j < 3; ++j) wi[j] = w(g.neighbors[i][j], i);
        RealVector grad = 2.0 * c * wi;
        double mu = -grad.mean();
        REQUIRE((grad.array() + mu).abs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("build_m on W = I is zero") {
    RealMatrix m = build_m(RealMatrix::Identity(5, 5));
    REQUIRE(m.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_m matches the explicit expansion on a toy set") {
    DataMatrix d = gen_s_curve(4, 2);
    NeighborGraph g = knn(d, 2);
    RealMatrix w = local_weights(d, g);
    RealMatrix m = build_m(w);
    RealMatrix i4 = RealMatrix::Identity(4, 4);
    RealMatrix expect = (i4 - w) * (i4 - w.transpose());
    REQUIRE((m - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("M annihilates the ones vector and is PSD") {
    DataMatrix d = gen_swiss_roll(12, 4);
    RealMatrix w = local_weights(d, knn(d, 4));
    RealMatrix m = build_m(w);
    REQUIRE((m * RealVector::Ones(12)).cwiseAbs().maxCoeff() < 1e-9);
    auto ed = eig_hermitian(m.cast<Complex>());
    REQUIRE(ed.eigenvalues[0] > -1e-10);
    REQUIRE(std::abs(ed.eigenvalues[0]) < 1e-9);
    RealVector ones_dir = RealVector::Ones(12) / std::sqrt(12.0);
    REQUIRE(std::abs(ed.eigenvectors.col(0).real().dot(ones_dir)) > 1.0 - 1e-9);
}

TEST_CASE("embedding constraints on the paper setup") {
    DataMatrix d = gen_s_curve(32, 7);
    EmbeddingMatrix y = lle(d, 4, 2);
    REQUIRE(y.d() == 2);
    REQUIRE(y.n() == 32);
    REQUIRE((y.y * RealVector::Ones(32)).cwiseAbs().maxCoeff() < 1e-8);
    RealMatrix cov = y.y * y.y.transpose() / 32.0;
    REQUIRE((cov - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("embed with d = N-1 returns all nontrivial eigenvectors") {
    DataMatrix d = gen_s_curve(4, 2);
    RealMatrix m = build_m(local_weights(d, knn(d, 2)));
    EmbeddingMatrix y = embed(m, 3);
    RealMatrix cov = y.y * y.y.transpose() / 4.0;
    REQUIRE((cov - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE_THROWS_AS(embed(m, 4), contract_error);
}

TEST_CASE("tr(Y M Y^T) equals N (lambda_2 + lambda_3) for d = 2") {
    DataMatrix d = gen_swiss_roll(8, 6);
    RealMatrix m = build_m(local_weights(d, knn(d, 3)));
    LleDiagnostics diag;
    EmbeddingMatrix y = embed(m, 2, &diag);
    double tr = (y.y * m * y.y.transpose()).trace();
    double expect = 8.0 * (diag.eigenvalues[1] + diag.eigenvalues[2]);
    REQUIRE(std::abs(tr - expect) < 1e-9 * std::max(1.0, std::abs(expect)));
}

TEST_CASE("embed beats random constraint-satisfying embeddings") {
    auto rg = oracle::rng(77);
    DataMatrix d;
    d.points = oracle::random_real(rg, 3, 6);
    RealMatrix m = build_m(local_weights(d, knn(d, 3)));
    EmbeddingMatrix y = embed(m, 2);
    double best = (y.y * m * y.y.transpose()).trace();
    for (int trial = 0; trial < 2000; ++trial) {
        RealMatrix cand = oracle::random_constrained_embedding(rg, 2, 6);
        double score = (cand * m * cand.transpose()).trace();
        REQUIRE(score >= best - 1e-9);
    }
}
