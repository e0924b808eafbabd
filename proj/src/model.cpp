#include "mvrbm/model.hpp"

namespace mvrbm {

void MvrbmParams::validate() const {
    if (U.rows() != C.rows())
        throw DimensionError("params: U has " + std::to_string(U.rows()) + " rows but C has " +
                             std::to_string(C.rows()));
    if (V.rows() != C.cols())
        throw DimensionError("params: V has " + std::to_string(V.rows()) + " rows but C has " +
                             std::to_string(C.cols()) + " cols");
    if (U.cols() != B.rows())
        throw DimensionError("params: U has " + std::to_string(U.cols()) + " cols but B has " +
                             std::to_string(B.rows()) + " rows");
    if (V.cols() != B.cols())
        throw DimensionError("params: V has " + std::to_string(V.cols()) + " cols but B has " +
                             std::to_string(B.cols()) + " cols");
    if (B.rows() < 1 || B.cols() < 1 || C.rows() < 1 || C.cols() < 1)
        throw DimensionError("params: all dimensions must be >= 1");
    if (!U.allFinite() || !V.allFinite() || !B.allFinite() || !C.allFinite())
        throw DataError("params: non-finite entries");
}

MvrbmParams MvrbmParams::zeros(const LayerShape& s) {
    s.validate();
    MvrbmParams p;
    p.U = Matrix::Zero(s.hidden_rows, s.visible_rows);
    p.V = Matrix::Zero(s.hidden_cols, s.visible_cols);
    p.B = Matrix::Zero(s.visible_rows, s.visible_cols);
    p.C = Matrix::Zero(s.hidden_rows, s.hidden_cols);
    return p;
}

namespace {

void fill_gaussian(Matrix& m, double stddev, Rng& rng) {
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal(0.0, stddev);
}

void check_visible(const Matrix& X, const MvrbmParams& p, const char* name) {
    require_shape(X, p.visible_rows(), p.visible_cols(), name);
}

void check_hidden(const Matrix& Y, const MvrbmParams& p, const char* name) {
    require_shape(Y, p.hidden_rows(), p.hidden_cols(), name);
}

}  // namespace

MvrbmParams init_params(const LayerShape& shape, Rng& rng) {
    MvrbmParams p = MvrbmParams::zeros(shape);
    fill_gaussian(p.U, 0.1, rng);
    fill_gaussian(p.V, 0.1, rng);
    return p;
}

double energy(const Matrix& X, const Matrix& Y, const MvrbmParams& params) {
    check_visible(X, params, "X");
    check_hidden(Y, params, "Y");
    const double interaction = (params.U * X * params.V.transpose()).cwiseProduct(Y).sum();
    return -interaction - X.cwiseProduct(params.B).sum() - Y.cwiseProduct(params.C).sum();
}

double full_tensor_energy(const Matrix& X, const Matrix& Y, const std::vector<double>& W4,
                          const Matrix& B, const Matrix& C) {
    const Index I = X.rows(), J = X.cols(), K = Y.rows(), L = Y.cols();
    require_shape(B, I, J, "B");
    require_shape(C, K, L, "C");
    if (static_cast<Index>(W4.size()) != I * J * K * L)
        throw DimensionError("W4 has " + std::to_string(W4.size()) + " entries, expected " +
                             std::to_string(I * J * K * L));
    double interaction = 0.0;
    std::size_t idx = 0;
    for (Index i = 0; i < I; ++i)
        for (Index j = 0; j < J; ++j)
            for (Index k = 0; k < K; ++k)
                for (Index l = 0; l < L; ++l) interaction += X(i, j) * W4[idx++] * Y(k, l);
    return -interaction - X.cwiseProduct(B).sum() - Y.cwiseProduct(C).sum();
}

std::vector<double> factored_tensor(const MvrbmParams& params) {
    const Index I = params.visible_rows(), J = params.visible_cols();
    const Index K = params.hidden_rows(), L = params.hidden_cols();
    std::vector<double> w4;
    w4.reserve(static_cast<std::size_t>(I * J * K * L));
    for (Index i = 0; i < I; ++i)
        for (Index j = 0; j < J; ++j)
            for (Index k = 0; k < K; ++k)
                for (Index l = 0; l < L; ++l) w4.push_back(params.U(k, i) * params.V(l, j));
    return w4;
}

Matrix visible_activation(const Matrix& Y, const MvrbmParams& params) {
    check_hidden(Y, params, "Y");
    return sigmoid(visible_preactivation(Y, params));
}

Matrix hidden_activation(const Matrix& X, const MvrbmParams& params) {
    check_visible(X, params, "X");
    return sigmoid(hidden_preactivation(X, params));
}

Matrix sample_bernoulli(const Matrix& activation, Rng& rng) {
    Matrix out(activation.rows(), activation.cols());
    for (Index i = 0; i < activation.rows(); ++i)
        for (Index j = 0; j < activation.cols(); ++j)
            out(i, j) = rng.uniform() < activation(i, j) ? 1.0 : 0.0;
    return out;
}

std::pair<Matrix, Matrix> gibbs_step(const Matrix& X, const MvrbmParams& params, Rng& rng) {
    Matrix y = sample_bernoulli(hidden_activation(X, params), rng);
    Matrix x_next = sample_bernoulli(visible_activation(y, params), rng);
    return {std::move(y), std::move(x_next)};
}

Matrix kron_weight(const MvrbmParams& params) {
    const Matrix vt = params.V.transpose();  // J x L
    const Matrix ut = params.U.transpose();  // I x K
    const Index I = ut.rows(), K = ut.cols(), J = vt.rows(), L = vt.cols();
    Matrix w(I * J, K * L);
    for (Index j = 0; j < J; ++j)
        for (Index l = 0; l < L; ++l) w.block(j * I, l * K, I, K) = vt(j, l) * ut;
    return w;
}

}  // namespace mvrbm
