#include "afreg/hmm.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "afreg/error.hpp"

namespace afreg::hmm {

namespace {

void check_symbols(const HmmModel& model, const Symbols& obs) {
    for (const int s : obs) {
        if (s < 0 || s >= model.n_symbols()) {
            fail(ErrorCode::SymbolOutOfRange, fmt::format("symbol {} outside [0, {})", s, model.n_symbols()));
        }
    }
}

struct ForwardBackward {
    Eigen::MatrixXd alpha;  // scaled, rows sum to 1
    Eigen::MatrixXd beta;
    Eigen::VectorXd scale;
    double loglik = 0.0;
};

ForwardBackward forward_pass(const HmmModel& model, const Symbols& obs) {
    const auto T = static_cast<Eigen::Index>(obs.size());
    const Eigen::Index n = model.n_states();
    ForwardBackward fb;
    fb.alpha.resize(T, n);
    fb.scale.resize(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        const auto e = model.emission.col(obs[static_cast<std::size_t>(t)]);
        Eigen::VectorXd a = t == 0 ? Eigen::VectorXd(model.initial.cwiseProduct(e))
                                   : Eigen::VectorXd((model.transition.transpose() * fb.alpha.row(t - 1).transpose()).cwiseProduct(e));
        const double c = a.sum();
        if (!(c > 0.0)) {
            fb.loglik = -std::numeric_limits<double>::infinity();
            fb.scale(t) = 0.0;
            fb.alpha.row(t).setZero();
            return fb;
        }
        fb.scale(t) = c;
        fb.alpha.row(t) = (a / c).transpose();
        fb.loglik += std::log(c);
    }
    return fb;
}

void backward_pass(const HmmModel& model, const Symbols& obs, ForwardBackward& fb) {
    const auto T = static_cast<Eigen::Index>(obs.size());
    fb.beta.resize(T, model.n_states());
    fb.beta.row(T - 1).setOnes();
    for (Eigen::Index t = T - 2; t >= 0; --t) {
        const auto e = model.emission.col(obs[static_cast<std::size_t>(t + 1)]);
        fb.beta.row(t) = (model.transition * e.cwiseProduct(fb.beta.row(t + 1).transpose())).transpose() / fb.scale(t + 1);
    }
}

Eigen::MatrixXd normalize_rows(Eigen::MatrixXd m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double s = m.row(i).sum();
        if (s > 0.0) {
            m.row(i) /= s;
        } else {
            m.row(i).setConstant(1.0 / static_cast<double>(m.cols()));
        }
    }
    return m;
}

}  // namespace

void HmmModel::validate(double tol) const {
    const Eigen::Index n = transition.rows();
    if (n < 1 || transition.cols() != n || emission.rows() != n || emission.cols() < 1 || initial.size() != n) {
        fail(ErrorCode::DimensionMismatch, "HMM matrix shapes are inconsistent");
    }
    auto stochastic = [tol](const auto& rows) {
        for (Eigen::Index i = 0; i < rows.rows(); ++i) {
            if ((rows.row(i).array() < 0.0).any() || (rows.row(i).array() > 1.0).any() ||
                std::abs(rows.row(i).sum() - 1.0) > tol) {
                return false;
            }
        }
        return true;
    };
    if (!stochastic(transition) || !stochastic(emission) || !stochastic(initial.transpose())) {
        fail(ErrorCode::InvalidArgument, "HMM rows must be probability vectors");
    }
}

Eigen::MatrixXd mle_transition(const Symbols& obs, int n_symbols) {
    if (obs.size() < 2) fail(ErrorCode::TooShort, "need at least two observations");
    if (n_symbols < 1) fail(ErrorCode::InvalidArgument, "need at least one symbol");
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n_symbols, n_symbols);
    for (const int s : obs) {
        if (s < 0 || s >= n_symbols) fail(ErrorCode::SymbolOutOfRange, fmt::format("symbol {}", s));
    }
    for (std::size_t t = 1; t < obs.size(); ++t) counts(obs[t - 1], obs[t]) += 1.0;
    return normalize_rows(counts);
}

double forward_loglik(const HmmModel& model, const Symbols& obs) {
    model.validate();
    check_symbols(model, obs);
    if (obs.empty()) return 0.0;
    return forward_pass(model, obs).loglik;
}

BaumWelchResult baum_welch(const Symbols& obs, const HmmModel& init, int max_iter, double tol) {
    init.validate();
    if (obs.size() < 2) fail(ErrorCode::TooShort, "need at least two observations");
    check_symbols(init, obs);
    const auto T = static_cast<Eigen::Index>(obs.size());
    const Eigen::Index n = init.n_states();
    const Eigen::Index m = init.n_symbols();

    BaumWelchResult res;
    res.model = init;
    ForwardBackward fb = forward_pass(init, obs);
    res.loglik_trace.push_back(fb.loglik);
    if (!std::isfinite(fb.loglik)) fail(ErrorCode::InvalidArgument, "initial model gives the data zero probability");

    for (int iter = 0; iter < max_iter; ++iter) {
        const HmmModel& cur = res.model;
        backward_pass(cur, obs, fb);
        const Eigen::MatrixXd gamma = fb.alpha.cwiseProduct(fb.beta);  // rows already sum to 1
        Eigen::MatrixXd xi_sum = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index t = 0; t + 1 < T; ++t) {
            const auto e = cur.emission.col(obs[static_cast<std::size_t>(t + 1)]);
            const Eigen::VectorXd right = e.cwiseProduct(fb.beta.row(t + 1).transpose()) / fb.scale(t + 1);
            xi_sum += (fb.alpha.row(t).transpose() * right.transpose()).cwiseProduct(cur.transition);
        }
        Eigen::MatrixXd emit = Eigen::MatrixXd::Zero(n, m);
        for (Eigen::Index t = 0; t < T; ++t) emit.col(obs[static_cast<std::size_t>(t)]) += gamma.row(t).transpose();

        HmmModel next;
        next.transition = normalize_rows(xi_sum);
        next.emission = normalize_rows(emit);
        next.initial = gamma.row(0).transpose() / gamma.row(0).sum();
        ++res.iterations;

        ForwardBackward next_fb = forward_pass(next, obs);
        const double gain = next_fb.loglik - res.loglik_trace.back();
        if (!(gain >= 0.0) && gain < -1e-9) break;  // numerical stall; keep the better model
        res.model = std::move(next);
        fb = std::move(next_fb);
        res.loglik_trace.push_back(fb.loglik);
        if (gain < tol) break;
    }
    return res;
}

std::vector<int> viterbi(const HmmModel& model, const Symbols& obs) {
    model.validate();
    check_symbols(model, obs);
    if (obs.empty()) return {};
    const auto T = static_cast<Eigen::Index>(obs.size());
    const Eigen::Index n = model.n_states();
    const Eigen::MatrixXd log_a = model.transition.array().log().matrix();
    const Eigen::MatrixXd log_b = model.emission.array().log().matrix();
    Eigen::MatrixXd score(T, n);
    Eigen::MatrixXi back(T, n);
    for (Eigen::Index s = 0; s < n; ++s) score(0, s) = std::log(model.initial[s]) + log_b(s, obs[0]);
    for (Eigen::Index t = 1; t < T; ++t) {
        for (Eigen::Index s = 0; s < n; ++s) {
            Eigen::Index best = 0;
            double best_v = score(t - 1, 0) + log_a(0, s);
            for (Eigen::Index p = 1; p < n; ++p) {
                const double v = score(t - 1, p) + log_a(p, s);
                if (v > best_v) {
                    best_v = v;
                    best = p;
                }
            }
            score(t, s) = best_v + log_b(s, obs[static_cast<std::size_t>(t)]);
            back(t, s) = static_cast<int>(best);
        }
    }
    std::vector<int> path(static_cast<std::size_t>(T));
    Eigen::Index last = 0;
    for (Eigen::Index s = 1; s < n; ++s) {
        if (score(T - 1, s) > score(T - 1, last)) last = s;
    }
    path.back() = static_cast<int>(last);
    for (Eigen::Index t = T - 1; t > 0; --t) {
        path[static_cast<std::size_t>(t - 1)] = back(t, path[static_cast<std::size_t>(t)]);
    }
    return path;
}

HmmModel initial_model(const Symbols& obs, int n_symbols) {
    HmmModel m;
    m.transition = mle_transition(obs, n_symbols);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n_symbols, n_symbols);
    m.emission = 0.9 * eye + Eigen::MatrixXd::Constant(n_symbols, n_symbols, 0.1 / n_symbols);
    m.initial = Eigen::VectorXd::Constant(n_symbols, 1.0 / n_symbols);
    return m;
}

std::pair<std::vector<int>, Symbols> sample(const HmmModel& model, std::size_t length, std::uint64_t seed) {
    model.validate();
    std::mt19937_64 rng(seed);
    auto draw = [&](const auto& probs) {
        std::vector<double> w(probs.data(), probs.data() + probs.size());
        return std::discrete_distribution<int>(w.begin(), w.end())(rng);
    };
    std::vector<int> hidden;
    Symbols obs;
    for (std::size_t t = 0; t < length; ++t) {
        const int s = t == 0 ? draw(Eigen::VectorXd(model.initial)) : draw(Eigen::VectorXd(model.transition.row(hidden.back()).transpose()));
        hidden.push_back(s);
        obs.push_back(draw(Eigen::VectorXd(model.emission.row(s).transpose())));
    }
    return {hidden, obs};
}

}  // namespace afreg::hmm
