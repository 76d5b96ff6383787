#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace afreg::hmm {

using Symbols = std::vector<int>;

struct HmmModel {
    Eigen::MatrixXd transition;  // n x n, row-stochastic
    Eigen::MatrixXd emission;    // n x m, row-stochastic
    Eigen::VectorXd initial;     // n

    Eigen::Index n_states() const noexcept { return transition.rows(); }
    Eigen::Index n_symbols() const noexcept { return emission.cols(); }
    void validate(double tol = 1e-10) const;
};

/// Row i: empirical frequencies of transitions out of symbol i; unseen rows are uniform.
Eigen::MatrixXd mle_transition(const Symbols& obs, int n_symbols);

/// log P(obs | model) from the scaled forward recursion.
double forward_loglik(const HmmModel& model, const Symbols& obs);

struct BaumWelchResult {
    HmmModel model;
    std::vector<double> loglik_trace;  // loglik of each model visited, starting with init
    int iterations = 0;                // EM updates performed
};

/// EM until the loglik gain drops below tol or max_iter updates. The returned model is
/// the last one whose loglik was evaluated.
BaumWelchResult baum_welch(const Symbols& obs, const HmmModel& init, int max_iter = 500, double tol = 1e-8);

/// Most probable hidden path (ties toward lower state indices).
std::vector<int> viterbi(const HmmModel& model, const Symbols& obs);

/// Count-based transition start, identity-leaning emissions (0.9 identity + 0.1 uniform), uniform initial.
HmmModel initial_model(const Symbols& obs, int n_symbols);

/// Draws a (hidden, observed) sequence pair.
std::pair<std::vector<int>, Symbols> sample(const HmmModel& model, std::size_t length, std::uint64_t seed);

}  // namespace afreg::hmm
