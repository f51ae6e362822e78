#include "afd/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "afd/error.hpp"
#include "afd/kernels.hpp"
#include "afd/util.hpp"

namespace afd {

namespace {
constexpr double kKktTol = 1e-6;
constexpr double kBoxEps = 1e-12;   // alpha closer than this to a bound counts as at-bound
constexpr double kFreeEps = 1e-8;   // free support vector margin for rho
constexpr double kAlphaKeep = 1e-12;
}  // namespace

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
    if (x.size() != y.size()) fail(Errc::length_mismatch, "kernel arguments differ in length");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

OcSvmModel train(const std::vector<FeatureVector>& standardized, double nu, double gamma) {
    const std::size_t n = standardized.size();
    if (n == 0) fail(Errc::empty_training_set, "one-class SVM needs at least one training vector");
    if (!(nu > 0.0) || nu > 1.0) fail(Errc::bad_config, "nu must be in (0, 1]");
    if (!(gamma > 0.0)) fail(Errc::bad_config, "gamma must be > 0");
    const std::size_t dim = standardized[0].values.size();
    for (const auto& v : standardized)
        if (v.values.size() != dim) fail(Errc::length_mismatch, "inconsistent training vector lengths");

    const double c = 1.0 / (nu * static_cast<double>(n));

    // full kernel matrix; training sets here are hundreds of vectors
    std::vector<std::vector<double>> K(n, std::vector<double>(n));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const auto& xi = standardized[static_cast<std::size_t>(i)].values;
        for (std::size_t j = 0; j < n; ++j)
            K[static_cast<std::size_t>(i)][j] = rbf_kernel(xi, standardized[j].values, gamma);
    }

    // LibSVM-style init: first floor(nu*n) points at the upper bound, the
    // remainder on the next point. Always feasible since n*c >= 1.
    std::vector<double> alpha(n, 0.0);
    {
        double remaining = 1.0;
        for (std::size_t i = 0; i < n && remaining > 0.0; ++i) {
            double a = std::min(c, remaining);
            alpha[i] = a;
            remaining -= a;
        }
    }

    std::vector<double> g(n, 0.0);  // gradient = K*alpha
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += K[i][j] * alpha[j];
        g[i] = acc;
    }

    const std::size_t max_iter = 1000 * std::max<std::size_t>(n, 100);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // i: smallest gradient among coordinates that can still grow
        std::size_t i_up = n;
        double g_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (alpha[i] < c - kBoxEps && g[i] < g_min) {
                g_min = g[i];
                i_up = i;
            }
        }
        // optimality gap against the largest gradient among shrinkable ones
        double g_max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            if (alpha[j] > kBoxEps && g[j] > g_max) g_max = g[j];
        if (i_up == n || g_max - g_min <= kKktTol) break;

        // j: best second-order gain among shrinkable coordinates above g_min
        std::size_t j_dn = n;
        double best_gain = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (alpha[j] <= kBoxEps || j == i_up) continue;
            double diff = g[j] - g_min;
            if (diff <= 0.0) continue;
            double eta = K[i_up][i_up] + K[j][j] - 2.0 * K[i_up][j];
            if (eta < 1e-12) eta = 1e-12;
            double gain = diff * diff / eta;
            if (gain > best_gain) {
                best_gain = gain;
                j_dn = j;
            }
        }
        if (j_dn == n) break;

        double eta = K[i_up][i_up] + K[j_dn][j_dn] - 2.0 * K[i_up][j_dn];
        if (eta < 1e-12) eta = 1e-12;
        double step = (g[j_dn] - g[i_up]) / eta;
        step = std::min(step, c - alpha[i_up]);
        step = std::min(step, alpha[j_dn]);
        if (step <= 0.0) break;

        alpha[i_up] += step;
        alpha[j_dn] -= step;
        const auto& Ki = K[i_up];
        const auto& Kj = K[j_dn];
        for (std::size_t t = 0; t < n; ++t) g[t] += step * (Ki[t] - Kj[t]);
    }

    OcSvmModel model;
    model.nu = nu;
    model.gamma = gamma;

    // rho: average gradient over free support vectors; if none, the largest
    // gradient among bounded ones (flagged).
    double rho_acc = 0.0;
    std::size_t rho_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > kFreeEps && alpha[i] < c - kFreeEps) {
            rho_acc += g[i];
            ++rho_count;
        }
    }
    if (rho_count > 0) {
        model.rho = rho_acc / static_cast<double>(rho_count);
    } else {
        double rho_max = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            if (alpha[i] > kBoxEps && g[i] > rho_max) rho_max = g[i];
        model.rho = rho_max;
        model.rho_from_bounded = true;
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > kAlphaKeep) {
            model.support_vectors.push_back(standardized[i].values);
            model.alpha.push_back(alpha[i]);
        }
    }
    // identity scaler until the caller attaches the real one
    model.scaler.mean.assign(dim, 0.0);
    model.scaler.std.assign(dim, 1.0);
    return model;
}

OcSvmModel train_on_raw(const std::vector<FeatureVector>& raw, double nu, double gamma) {
    Scaler scaler = Scaler::fit(raw);
    OcSvmModel model = train(standardize(raw, scaler), nu, gamma);
    model.scaler = std::move(scaler);
    return model;
}

DecisionResult decision(const OcSvmModel& model, const FeatureVector& x) {
    if (model.feature_layout_version != kFeatureLayoutVersion)
        fail(Errc::layout_mismatch, "model feature layout version mismatch");
    if (model.support_vectors.empty()) fail(Errc::corrupt_model, "model has no support vectors");
    if (x.values.size() != model.support_vectors[0].size())
        fail(Errc::layout_mismatch, "input dimension does not match model");
    double acc = 0.0;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        acc += model.alpha[i] * rbf_kernel(model.support_vectors[i], x.values, model.gamma);
    double score = acc - model.rho;
    return {score, score >= 0.0};
}

DecisionResult decide_raw(const OcSvmModel& model, const FeatureVector& raw) {
    return decision(model, model.scaler.transform(raw));
}

double dual_objective(const OcSvmModel& model) {
    double acc = 0.0;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        for (std::size_t j = 0; j < model.support_vectors.size(); ++j)
            acc += model.alpha[i] * model.alpha[j] *
                   rbf_kernel(model.support_vectors[i], model.support_vectors[j], model.gamma);
    return 0.5 * acc;
}

namespace {

void dump_vector(std::ostream& out, const std::vector<double>& v) {
    out << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',';
        out << format_double(v[i]);
    }
    out << ']';
}

}  // namespace

void save_model(const OcSvmModel& model, std::ostream& out) {
    out << "{\"version\":" << model.feature_layout_version << ",\"nu\":" << format_double(model.nu)
        << ",\"gamma\":" << format_double(model.gamma) << ",\"rho\":" << format_double(model.rho)
        << ",\"rho_from_bounded\":" << (model.rho_from_bounded ? "true" : "false") << ",\"scaler\":{\"mean\":";
    dump_vector(out, model.scaler.mean);
    out << ",\"std\":";
    dump_vector(out, model.scaler.std);
    out << "},\"svs\":[";
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        if (i) out << ',';
        dump_vector(out, model.support_vectors[i]);
    }
    out << "],\"alpha\":";
    dump_vector(out, model.alpha);
    out << "}\n";
}

OcSvmModel load_model(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(Errc::corrupt_model, "model file: not a JSON object");
    OcSvmModel model;
    try {
        int version = j.at("version").get<int>();
        if (version != kFeatureLayoutVersion)
            fail(Errc::version_mismatch,
                 "model feature layout version " + std::to_string(version) + " != " +
                     std::to_string(kFeatureLayoutVersion));
        model.feature_layout_version = version;
        model.nu = j.at("nu").get<double>();
        model.gamma = j.at("gamma").get<double>();
        model.rho = j.at("rho").get<double>();
        model.rho_from_bounded = j.value("rho_from_bounded", false);
        model.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
        model.scaler.std = j.at("scaler").at("std").get<std::vector<double>>();
        model.support_vectors = j.at("svs").get<std::vector<std::vector<double>>>();
        model.alpha = j.at("alpha").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::corrupt_model, std::string("model file: ") + e.what());
    }
    if (model.support_vectors.size() != model.alpha.size() || model.support_vectors.empty())
        fail(Errc::corrupt_model, "model file: svs/alpha size mismatch");
    for (const auto& sv : model.support_vectors)
        if (sv.size() != model.support_vectors[0].size())
            fail(Errc::corrupt_model, "model file: ragged support vectors");
    return model;
}

OcSvmModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open model file: " + path);
    return load_model(in);
}

void save_model_file(const OcSvmModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write model file: " + path);
    save_model(model, out);
}

OcSvmModel update_model(const OcSvmModel& model, const std::vector<RelabeledExample>& relabeled,
                        TrainingStore& store) {
    for (const auto& ex : relabeled) {
        if (ex.is_fall) {
            store.fall_vectors.push_back(ex.vector);
        } else {
            auto it = std::find_if(store.fall_vectors.begin(), store.fall_vectors.end(),
                                   [&](const FeatureVector& v) { return v.values == ex.vector.values; });
            if (it != store.fall_vectors.end()) store.fall_vectors.erase(it);
        }
    }
    if (store.fall_vectors.empty())
        fail(Errc::empty_resulting_set, "relabeling removed every fall training vector");
    return train_on_raw(store.fall_vectors, model.nu, model.gamma);
}

}  // namespace afd
