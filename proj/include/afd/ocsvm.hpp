#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "afd/features.hpp"

namespace afd {

// One-class SVM in the Scholkopf nu-formulation with the dual scaled to
// sum(alpha) = 1, 0 <= alpha_i <= 1/(nu*n). RBF kernel only.
struct OcSvmModel {
    int feature_layout_version = kFeatureLayoutVersion;
    double nu = 0.1;
    double gamma = 1.0 / 112.0;
    double rho = 0.0;
    bool rho_from_bounded = false;  // no free support vector; rho fell back to max over bounded
    std::vector<std::vector<double>> support_vectors;  // standardized space
    std::vector<double> alpha;                         // > 1e-12, same order as support_vectors
    Scaler scaler;
};

struct DecisionResult {
    double score = 0.0;
    bool is_fall = false;
};

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

// Solves the dual min 1/2 a'Ka s.t. 0 <= a_i <= 1/(nu*n), sum a = 1 by
// SMO-style pair updates to KKT tolerance 1e-6. Deterministic: maximal
// violator paired with the best second-order partner, ties to lowest index.
// Inputs must already be standardized; the returned model carries an
// identity scaler until the caller attaches one.
OcSvmModel train(const std::vector<FeatureVector>& standardized, double nu, double gamma);

// Fits a scaler on the raw vectors, standardizes, trains, attaches the scaler.
OcSvmModel train_on_raw(const std::vector<FeatureVector>& raw, double nu, double gamma);

// score = sum_i alpha_i K(sv_i, x) - rho; is_fall when score >= 0.
// x must be standardized with the model's scaler.
DecisionResult decision(const OcSvmModel& model, const FeatureVector& x);

// Convenience: standardizes with the model's scaler, then decides.
DecisionResult decide_raw(const OcSvmModel& model, const FeatureVector& raw);

// Dual objective 1/2 a'Ka of this model's stored solution (for oracle checks).
double dual_objective(const OcSvmModel& model);

// Model file (.ocsvm.json). Doubles round-trip bit-exactly, so loaded models
// reproduce every decision score of the saved one.
void save_model(const OcSvmModel& model, std::ostream& out);
OcSvmModel load_model(std::istream& in);
OcSvmModel load_model_file(const std::string& path);
void save_model_file(const OcSvmModel& model, const std::string& path);

// Feedback-driven retraining. The store holds the raw fall-class training
// vectors; relabeled entries add missed falls and remove vectors that turned
// out not to be falls (matched by exact equality). Retrains from scratch
// with the model's (nu, gamma).
struct TrainingStore {
    std::vector<FeatureVector> fall_vectors;  // raw (unstandardized)
};

struct RelabeledExample {
    FeatureVector vector;  // raw
    bool is_fall = false;
};

OcSvmModel update_model(const OcSvmModel& model, const std::vector<RelabeledExample>& relabeled,
                        TrainingStore& store);

}  // namespace afd
