#include "afreg/model_io.hpp"

#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "afreg/error.hpp"

namespace afreg::io {

namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
    return v;
}

Eigen::MatrixXd matrix_from(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != cols) fail(ErrorCode::Config, "ragged matrix in document");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

json parse(std::istream& in) {
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::Config, fmt::format("malformed document: {}", e.what()));
    }
}

void check_version(const json& doc) {
    const int v = doc.value("version", -1);
    if (v != kDocumentVersion) fail(ErrorCode::Config, fmt::format("unsupported document version {}", v));
}

template <typename Fn>
auto guarded(Fn fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        fail(ErrorCode::Config, fmt::format("document field error: {}", e.what()));
    }
}

}  // namespace

ModelDocument to_document(const PipelineFit& fit) {
    ModelDocument d;
    d.basis = fit.spec;
    d.ou = fit.ou;
    d.non_stationary = fit.non_stationary;
    d.mode = fit.options.mode;
    d.step = fit.step;
    d.maturities = fit.maturities;
    d.R = fit.model.R;
    d.init_mean = fit.model.init_mean;
    d.init_cov = fit.model.init_cov;
    d.loglik = fit.filtered.loglik;
    d.loglik_initial = fit.loglik_initial;
    return d;
}

StateSpaceModel state_space(const ModelDocument& doc) {
    StateSpaceModel m;
    m.dyn = exact_discretization(doc.ou, doc.step);
    m.H = design_matrix(doc.basis, doc.maturities);
    m.R = doc.R;
    m.init_mean = doc.init_mean;
    m.init_cov = doc.init_cov;
    m.validate();
    return m;
}

void write_model(std::ostream& out, const ModelDocument& doc) {
    json j;
    j["version"] = kDocumentVersion;
    j["basis"] = {{"n_factors", doc.basis.n_factors}, {"tau", doc.basis.tau}, {"exponents", doc.basis.exponents}};
    j["ou"] = {{"A", matrix_json(doc.ou.A)},
               {"K", vector_json(doc.ou.K)},
               {"sigma", vector_json(doc.ou.sigma)},
               {"non_stationary", doc.non_stationary}};
    j["R"] = matrix_json(doc.R);
    j["init"] = {{"mean", vector_json(doc.init_mean)}, {"cov", matrix_json(doc.init_cov)}};
    j["mode"] = std::string(to_string(doc.mode));
    j["step"] = doc.step;
    j["maturities"] = vector_json(doc.maturities);
    j["loglik"] = {{"fitted", doc.loglik}, {"regression_start", doc.loglik_initial}};
    out << j.dump(2) << '\n';
}

ModelDocument read_model(std::istream& in) {
    const json j = parse(in);
    check_version(j);
    return guarded([&] {
        ModelDocument d;
        d.basis.n_factors = j.at("basis").at("n_factors").get<int>();
        d.basis.tau = j.at("basis").at("tau").get<double>();
        d.basis.exponents = j.at("basis").at("exponents").get<std::vector<double>>();
        d.basis.validate();
        d.ou.A = matrix_from(j.at("ou").at("A"));
        d.ou.K = vector_from(j.at("ou").at("K"));
        d.ou.sigma = vector_from(j.at("ou").at("sigma"));
        d.non_stationary = j.at("ou").at("non_stationary").get<bool>();
        d.R = matrix_from(j.at("R"));
        d.init_mean = vector_from(j.at("init").at("mean"));
        d.init_cov = matrix_from(j.at("init").at("cov"));
        d.mode = parse_estimation_mode(j.at("mode").get<std::string>());
        d.step = j.at("step").get<double>();
        d.maturities = vector_from(j.at("maturities"));
        d.loglik = j.at("loglik").at("fitted").get<double>();
        d.loglik_initial = j.at("loglik").at("regression_start").get<double>();
        return d;
    });
}

void write_hmm(std::ostream& out, const std::vector<HmmDocument>& fits, const std::string& selected) {
    json j;
    j["version"] = kDocumentVersion;
    j["selected"] = selected;
    json models = json::array();
    for (const auto& f : fits) {
        models.push_back({{"label", f.label},
                          {"n_states", f.model.n_states()},
                          {"transition", matrix_json(f.model.transition)},
                          {"emission", matrix_json(f.model.emission)},
                          {"initial", vector_json(f.model.initial)},
                          {"iterations", f.iterations},
                          {"loglik_trace", f.loglik_trace}});
    }
    j["models"] = models;
    out << j.dump(2) << '\n';
}

std::vector<HmmDocument> read_hmm(std::istream& in, std::string* selected) {
    const json j = parse(in);
    check_version(j);
    return guarded([&] {
        if (selected) *selected = j.at("selected").get<std::string>();
        std::vector<HmmDocument> out;
        for (const auto& m : j.at("models")) {
            HmmDocument d;
            d.label = m.at("label").get<std::string>();
            d.model.transition = matrix_from(m.at("transition"));
            d.model.emission = matrix_from(m.at("emission"));
            d.model.initial = vector_from(m.at("initial"));
            d.iterations = m.at("iterations").get<int>();
            d.loglik_trace = m.at("loglik_trace").get<std::vector<double>>();
            out.push_back(std::move(d));
        }
        return out;
    });
}

}  // namespace afreg::io
