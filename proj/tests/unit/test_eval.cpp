#include <doctest.h>

#include <cmath>

#include "mvrbm/eval.hpp"
#include "mvrbm/oracle.hpp"
#include "support/synthetic.hpp"

using namespace mvrbm;

TEST_CASE("psnr: degenerate pairs") {
    const Matrix a = Matrix::Constant(4, 4, 0.3);
    const Metrics same = psnr(a, a);
    CHECK(same.rmse == 0.0);
    CHECK(std::isinf(same.psnr));

    const Metrics worst = psnr(Matrix::Zero(4, 4), Matrix::Ones(4, 4));
    CHECK(worst.rmse == doctest::Approx(255.0));
    CHECK(worst.psnr == doctest::Approx(0.0));
    CHECK(worst.per_pixel_mae == doctest::Approx(1.0));

    CHECK_THROWS_AS(psnr(Matrix::Zero(2, 2), Matrix::Zero(3, 2)), DimensionError);
}

TEST_CASE("psnr: consistent with the published bicubic reference pair") {
    // rmse 5.0134 on the 8-bit scale implies 34.1282 dB under this convention.
    const double db = 20.0 * std::log10(255.0 / 5.0134);
    CHECK(db == doctest::Approx(34.1282).epsilon(1e-4));
}

TEST_CASE("psnr: strictly decreasing in rmse") {
    Rng rng(3);
    double last_rmse = -1.0, last_psnr = 1e9;
    for (int t = 1; t <= 20; ++t) {
        const Matrix ref = Matrix::Zero(6, 6);
        const Matrix test = Matrix::Constant(6, 6, t * 0.05);
        const Metrics m = psnr(ref, test);
        CHECK(m.rmse > last_rmse);
        CHECK(m.psnr < last_psnr);
        last_rmse = m.rmse;
        last_psnr = m.psnr;
    }
}

TEST_CASE("reconstruction_error: totals and the L1 metric axioms") {
    const Matrix ones = Matrix::Ones(28, 28);
    CHECK(reconstruction_error(ones, ones).total == 0.0);
    const ReconError e = reconstruction_error(ones, Matrix::Zero(28, 28));
    CHECK(e.total == doctest::Approx(784.0));
    CHECK(e.per_pixel == doctest::Approx(1.0));

    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix a(3, 3), b(3, 3), c(3, 3);
        for (Index i = 0; i < 3; ++i)
            for (Index j = 0; j < 3; ++j) {
                a(i, j) = rng.uniform();
                b(i, j) = rng.uniform();
                c(i, j) = rng.uniform();
            }
        const double ab = reconstruction_error(a, b).per_pixel;
        const double bc = reconstruction_error(b, c).per_pixel;
        const double ac = reconstruction_error(a, c).per_pixel;
        CHECK(ac <= ab + bc + 1e-15);
        CHECK(reconstruction_error(a, b).per_pixel ==
              doctest::Approx(reconstruction_error(b, a).per_pixel));
    }
}

TEST_CASE("hidden_features: length, order, and oracle agreement") {
    const MvrbmParams zero = MvrbmParams::zeros({3, 3, 2, 4});
    const Vector f = hidden_features(Matrix::Ones(3, 3), zero);
    CHECK(f.size() == 8);
    CHECK((f.array() == 0.5).all());

    Rng rng(7);
    const MvrbmParams p = testsupport::random_params(2, 2, 2, 2, rng);
    const Matrix half = Matrix::Constant(2, 2, 0.5);
    const Matrix x = sample_bernoulli(half, rng);
    const Matrix h = hidden_activation(x, p);
    const Vector feats = hidden_features(x, p);
    for (Index l = 0; l < 2; ++l)  // column-major flattening
        for (Index k = 0; k < 2; ++k) CHECK(feats(l * 2 + k) == h(k, l));

    const ExactModel m = enumerate_model(p);
    const Matrix cond = m.exact_hidden_conditional(encode_state(x));
    CHECK((feats - Eigen::Map<const Vector>(cond.data(), cond.size())).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("knn_classify: exact hit, tie rule, and separable blobs") {
    Matrix train(2, 1);
    train << 0.0, 2.0;
    const std::vector<int> labels{7, 8};

    Matrix hit(1, 1);
    hit << 2.0;
    CHECK(knn_classify(train, labels, hit, {8}).predicted[0] == 8);
    CHECK(knn_classify(train, labels, hit, {8}).error_rate == 0.0);

    Matrix tie(1, 1);
    tie << 1.0;  // equidistant: the lower training index wins
    CHECK(knn_classify(train, labels, tie, {0}).predicted[0] == 7);

    Rng rng(9);
    const int per_class = 30;
    Matrix blob_train(3 * per_class, 2), blob_test(3 * per_class, 2);
    std::vector<int> blob_train_labels, blob_test_labels;
    const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
    for (int c = 0; c < 3; ++c)
        for (int n = 0; n < per_class; ++n) {
            const Index r = c * per_class + n;
            blob_train(r, 0) = centers[c][0] + rng.normal(0.0, 0.5);
            blob_train(r, 1) = centers[c][1] + rng.normal(0.0, 0.5);
            blob_test(r, 0) = centers[c][0] + rng.normal(0.0, 0.5);
            blob_test(r, 1) = centers[c][1] + rng.normal(0.0, 0.5);
            blob_train_labels.push_back(c);
            blob_test_labels.push_back(c);
        }
    const KnnResult res = knn_classify(blob_train, blob_train_labels, blob_test, blob_test_labels);
    CHECK(res.error_rate == 0.0);

    CHECK_THROWS_AS(knn_classify(Matrix(0, 2), {}, blob_test, blob_test_labels), UsageError);
    CHECK_THROWS_AS(knn_classify(train, labels, Matrix::Zero(1, 3), {0}), DimensionError);
}

TEST_CASE("knn_classify: permutation covariant in test order") {
    Rng rng(11);
    Matrix train(20, 3), test(10, 3);
    std::vector<int> train_labels, test_labels(10, 0);
    for (Index i = 0; i < 20; ++i) {
        for (Index j = 0; j < 3; ++j) train(i, j) = rng.uniform();
        train_labels.push_back(static_cast<int>(i % 4));
    }
    for (Index i = 0; i < 10; ++i)
        for (Index j = 0; j < 3; ++j) test(i, j) = rng.uniform();

    const auto forward = knn_classify(train, train_labels, test, test_labels);
    Matrix reversed = test.colwise().reverse();
    const auto backward = knn_classify(train, train_labels, reversed, test_labels);
    for (Index i = 0; i < 10; ++i) CHECK(forward.predicted[i] == backward.predicted[9 - i]);
}
