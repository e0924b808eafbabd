#include "mvrbm/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace mvrbm {

namespace {

constexpr int kMaxStateBits = 20;

Matrix decode_bits(std::size_t idx, Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = (idx >> (i * cols + j)) & 1u ? 1.0 : 0.0;
    return m;
}

double log_sum_exp(const std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

void check_cap(int total_bits) {
    if (total_bits > kMaxStateBits)
        throw UsageError("state space needs " + std::to_string(total_bits) +
                         " bits, cap is " + std::to_string(kMaxStateBits));
}

}  // namespace

std::size_t encode_state(const Matrix& m) {
    std::size_t idx = 0;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0) idx |= std::size_t{1} << (i * m.cols() + j);
    return idx;
}

Matrix ExactModel::decode_visible(std::size_t x_idx) const {
    return decode_bits(x_idx, params.visible_rows(), params.visible_cols());
}

Matrix ExactModel::decode_hidden(std::size_t y_idx) const {
    return decode_bits(y_idx, params.hidden_rows(), params.hidden_cols());
}

Matrix ExactModel::exact_visible_conditional(std::size_t y_idx) const {
    const Index I = params.visible_rows(), J = params.visible_cols();
    Matrix cond = Matrix::Zero(I, J);
    double total = 0.0;
    for (std::size_t x = 0; x < visible_states(); ++x) {
        const double p = joint_prob(x, y_idx);
        total += p;
        for (Index i = 0; i < I; ++i)
            for (Index j = 0; j < J; ++j)
                if ((x >> (i * J + j)) & 1u) cond(i, j) += p;
    }
    return cond / total;
}

Matrix ExactModel::exact_hidden_conditional(std::size_t x_idx) const {
    const Index K = params.hidden_rows(), L = params.hidden_cols();
    Matrix cond = Matrix::Zero(K, L);
    double total = 0.0;
    for (std::size_t y = 0; y < hidden_states(); ++y) {
        const double p = joint_prob(x_idx, y);
        total += p;
        for (Index k = 0; k < K; ++k)
            for (Index l = 0; l < L; ++l)
                if ((y >> (k * L + l)) & 1u) cond(k, l) += p;
    }
    return cond / total;
}

std::pair<Matrix, Matrix> ExactModel::sample(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = joint.size() - 1;
    for (std::size_t s = 0; s < joint.size(); ++s) {
        acc += joint[s];
        if (u < acc) {
            pick = s;
            break;
        }
    }
    const std::size_t y_idx = pick & (hidden_states() - 1);
    const std::size_t x_idx = pick >> hidden_bits;
    return {decode_visible(x_idx), decode_hidden(y_idx)};
}

ExactModel enumerate_model(const MvrbmParams& params) {
    params.validate();
    ExactModel m;
    m.params = params;
    m.visible_bits = static_cast<int>(params.visible_rows() * params.visible_cols());
    m.hidden_bits = static_cast<int>(params.hidden_rows() * params.hidden_cols());
    check_cap(m.visible_bits + m.hidden_bits);

    const std::size_t nx = m.visible_states(), ny = m.hidden_states();
    std::vector<double> neg_energy(nx * ny);
    for (std::size_t x = 0; x < nx; ++x) {
        const Matrix X = m.decode_visible(x);
        for (std::size_t y = 0; y < ny; ++y) {
            const Matrix Y = m.decode_hidden(y);
            neg_energy[(x << m.hidden_bits) | y] = -energy(X, Y, params);
        }
    }
    m.log_z = log_sum_exp(neg_energy);
    m.joint.resize(neg_energy.size());
    for (std::size_t s = 0; s < neg_energy.size(); ++s)
        m.joint[s] = std::exp(neg_energy[s] - m.log_z);

    m.visible_marginal.assign(nx, 0.0);
    m.hidden_marginal.assign(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) {
            const double p = m.joint[(x << m.hidden_bits) | y];
            m.visible_marginal[x] += p;
            m.hidden_marginal[y] += p;
        }
    return m;
}

double log_z_factored(const MvrbmParams& params) {
    params.validate();
    const int hidden_bits = static_cast<int>(params.hidden_rows() * params.hidden_cols());
    check_cap(hidden_bits);
    const std::size_t ny = std::size_t{1} << hidden_bits;
    std::vector<double> terms(ny);
    for (std::size_t y = 0; y < ny; ++y) {
        const Matrix Y = decode_bits(y, params.hidden_rows(), params.hidden_cols());
        const Matrix pre = visible_preactivation(Y, params);
        double t = Y.cwiseProduct(params.C).sum();
        for (Index i = 0; i < pre.rows(); ++i)
            for (Index j = 0; j < pre.cols(); ++j) t += softplus(pre(i, j));
        terms[y] = t;
    }
    return log_sum_exp(terms);
}

namespace {

// log of the unnormalized visible likelihood: log sum_Y exp(-E(X, Y)).
double free_energy_term(const Matrix& X, const MvrbmParams& params) {
    const Matrix pre = hidden_preactivation(X, params);
    double t = X.cwiseProduct(params.B).sum();
    for (Index k = 0; k < pre.rows(); ++k)
        for (Index l = 0; l < pre.cols(); ++l) t += softplus(pre(k, l));
    return t;
}

// Accumulates the expected energy slope at a clamped visible state, i.e. the
// conditional mean over the hidden layer, scaled by `weight`.
void accumulate_slope(const Matrix& X, const MvrbmParams& p, double weight,
                      GradientIncrement& g) {
    const Matrix h = sigmoid(hidden_preactivation(X, p));
    g.dU.noalias() += weight * (h * p.V * X.transpose());
    g.dV.noalias() += weight * (h.transpose() * p.U * X);
    g.dB += weight * X;
    g.dC += weight * h;
}

}  // namespace

double exact_loglik(const std::vector<Matrix>& data, const MvrbmParams& params) {
    if (data.empty()) throw UsageError("exact_loglik: empty dataset");
    const ExactModel m = enumerate_model(params);
    double s = 0.0;
    for (const Matrix& x : data) s += free_energy_term(x, params);
    return s / static_cast<double>(data.size()) - m.log_z;
}

GradientIncrement exact_loglik_gradient(const std::vector<Matrix>& data,
                                        const MvrbmParams& params) {
    if (data.empty()) throw UsageError("exact_loglik_gradient: empty dataset");
    const ExactModel m = enumerate_model(params);
    GradientIncrement g = GradientIncrement::zeros_like(params);
    for (const Matrix& x : data) {
        require_shape(x, params.visible_rows(), params.visible_cols(), "data sample");
        accumulate_slope(x, params, 1.0 / static_cast<double>(data.size()), g);
    }
    for (std::size_t x = 0; x < m.visible_states(); ++x)
        accumulate_slope(m.decode_visible(x), params, -m.visible_marginal[x], g);
    return g;
}

MultimodalSample MmExactModel::decode_visible(std::size_t v_idx) const {
    MultimodalSample s;
    const Index I = params.base.visible_rows(), J = params.base.visible_cols();
    s.x = decode_bits(v_idx & ((std::size_t{1} << (I * J)) - 1), I, J);
    int offset = static_cast<int>(I * J);
    for (const auto& ch : params.channels) {
        const Index h = ch.A.rows(), w = ch.A.cols();
        s.channels.push_back(decode_bits((v_idx >> offset) & ((std::size_t{1} << (h * w)) - 1), h, w));
        offset += static_cast<int>(h * w);
    }
    return s;
}

MmExactModel mm_enumerate_model(const MultimodalParams& params) {
    params.validate();
    MmExactModel m;
    m.params = params;
    int vb = static_cast<int>(params.base.visible_rows() * params.base.visible_cols());
    for (const auto& ch : params.channels) vb += static_cast<int>(ch.A.size());
    m.visible_bits = vb;
    m.hidden_bits = static_cast<int>(params.hidden_rows() * params.hidden_cols());
    check_cap(m.visible_bits + m.hidden_bits);

    const std::size_t nv = m.visible_states(), ny = m.hidden_states();
    std::vector<double> neg_energy(nv * ny);
    for (std::size_t v = 0; v < nv; ++v) {
        const MultimodalSample s = m.decode_visible(v);
        for (std::size_t y = 0; y < ny; ++y) {
            const Matrix Y = decode_bits(y, params.hidden_rows(), params.hidden_cols());
            neg_energy[(v << m.hidden_bits) | y] = -mm_energy(s, Y, params);
        }
    }
    m.log_z = log_sum_exp(neg_energy);
    m.joint.resize(neg_energy.size());
    for (std::size_t s = 0; s < neg_energy.size(); ++s)
        m.joint[s] = std::exp(neg_energy[s] - m.log_z);
    m.visible_marginal.assign(nv, 0.0);
    for (std::size_t v = 0; v < nv; ++v)
        for (std::size_t y = 0; y < ny; ++y) m.visible_marginal[v] += m.joint[(v << m.hidden_bits) | y];
    return m;
}

namespace {

Matrix mm_pre(const MultimodalSample& s, const MultimodalParams& p) {
    Matrix pre = hidden_preactivation(s.x, p.base);
    for (std::size_t e = 0; e < p.channels.size(); ++e)
        pre.noalias() += p.channels[e].Q * s.channels[e] * p.channels[e].R.transpose();
    return pre;
}

double mm_free_energy_term(const MultimodalSample& s, const MultimodalParams& p) {
    const Matrix pre = mm_pre(s, p);
    double t = s.x.cwiseProduct(p.base.B).sum();
    for (std::size_t e = 0; e < p.channels.size(); ++e)
        t += s.channels[e].cwiseProduct(p.channels[e].A).sum();
    for (Index k = 0; k < pre.rows(); ++k)
        for (Index l = 0; l < pre.cols(); ++l) t += softplus(pre(k, l));
    return t;
}

void mm_accumulate_slope(const MultimodalSample& s, const MultimodalParams& p, double weight,
                         MmGradient& g) {
    const Matrix h = sigmoid(mm_pre(s, p));
    g.primary.dU.noalias() += weight * (h * p.base.V * s.x.transpose());
    g.primary.dV.noalias() += weight * (h.transpose() * p.base.U * s.x);
    g.primary.dB += weight * s.x;
    g.primary.dC += weight * h;
    for (std::size_t e = 0; e < p.channels.size(); ++e) {
        g.channels[e].dQ.noalias() += weight * (h * p.channels[e].R * s.channels[e].transpose());
        g.channels[e].dR.noalias() += weight * (h.transpose() * p.channels[e].Q * s.channels[e]);
        g.channels[e].dA += weight * s.channels[e];
    }
}

}  // namespace

double mm_exact_loglik(const std::vector<MultimodalSample>& data, const MultimodalParams& params) {
    if (data.empty()) throw UsageError("mm_exact_loglik: empty dataset");
    const MmExactModel m = mm_enumerate_model(params);
    double s = 0.0;
    for (const auto& d : data) s += mm_free_energy_term(d, params);
    return s / static_cast<double>(data.size()) - m.log_z;
}

MmGradient mm_exact_loglik_gradient(const std::vector<MultimodalSample>& data,
                                    const MultimodalParams& params) {
    if (data.empty()) throw UsageError("mm_exact_loglik_gradient: empty dataset");
    const MmExactModel m = mm_enumerate_model(params);
    MmGradient g = MmGradient::zeros_like(params);
    for (const auto& d : data) mm_accumulate_slope(d, params, 1.0 / static_cast<double>(data.size()), g);
    for (std::size_t v = 0; v < m.visible_states(); ++v)
        mm_accumulate_slope(m.decode_visible(v), params, -m.visible_marginal[v], g);
    return g;
}

}  // namespace mvrbm
