#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "afreg/hmm.hpp"
#include "afreg/state_estimation.hpp"

namespace afreg::io {

inline constexpr int kDocumentVersion = 1;

/// Everything needed to rebuild the fitted state-space model.
struct ModelDocument {
    NsBasisSpec basis;
    OuParams ou;
    bool non_stationary = false;
    EstimationMode mode = EstimationMode::Daily;
    double step = 0.0;
    Eigen::VectorXd maturities;
    Eigen::MatrixXd R;
    Eigen::VectorXd init_mean;
    Eigen::MatrixXd init_cov;
    double loglik = 0.0;
    double loglik_initial = 0.0;
};

ModelDocument to_document(const PipelineFit& fit);

/// State-space model rebuilt from the document (exact discretization of the stored OU parameters).
StateSpaceModel state_space(const ModelDocument& doc);

void write_model(std::ostream& out, const ModelDocument& doc);
ModelDocument read_model(std::istream& in);

struct HmmDocument {
    std::string label;  // e.g. the maturity pair
    hmm::HmmModel model;
    std::vector<double> loglik_trace;
    int iterations = 0;
};

void write_hmm(std::ostream& out, const std::vector<HmmDocument>& fits, const std::string& selected);
std::vector<HmmDocument> read_hmm(std::istream& in, std::string* selected = nullptr);

}  // namespace afreg::io
