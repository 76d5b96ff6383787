#include "afreg/optim.hpp"

#include <cmath>
#include <limits>

namespace afreg::optim {

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x[i]));
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

BfgsResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const BfgsOptions& options,
                         const Gradient& gradient) {
    const auto grad = [&](const Eigen::VectorXd& x) {
        return gradient ? gradient(x) : numeric_gradient(f, x, options.fd_step);
    };
    const Eigen::Index n = x0.size();
    BfgsResult result;
    result.x = x0;
    result.value = f(x0);
    if (!std::isfinite(result.value)) return result;

    Eigen::VectorXd x = x0;
    double fx = result.value;
    Eigen::VectorXd g = grad(x);
    Eigen::MatrixXd inv_h = Eigen::MatrixXd::Identity(n, n);

    for (int iter = 0; iter < options.max_iter; ++iter) {
        result.iterations = iter + 1;
        if (!g.allFinite()) break;
        if (g.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
            result.converged = true;
            break;
        }
        Eigen::VectorXd dir = -inv_h * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            inv_h.setIdentity();
            dir = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0;
        Eigen::VectorXd x_new;
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + step * dir;
            f_new = f(x_new);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const Eigen::VectorXd g_new = grad(x_new);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-300) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
            inv_h = (eye - rho * s * y.transpose()) * inv_h * (eye - rho * y * s.transpose()) +
                    rho * s * s.transpose();
        }
        const double decrease = fx - f_new;
        x = x_new;
        g = g_new;
        fx = f_new;
        if (fx < result.value) {
            result.value = fx;
            result.x = x;
        }
        if (decrease <= options.f_tol * std::max(1.0, std::abs(fx))) {
            result.converged = g.lpNorm<Eigen::Infinity>() <= std::sqrt(options.grad_tol);
            break;
        }
    }
    return result;
}

}  // namespace afreg::optim
