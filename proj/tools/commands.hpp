#pragma once

// Subcommands of the filterlr tool. Each one reads its inputs, calls the
// library and writes its artifacts plus run-manifest.json into the output
// directory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace filterlr::cli {

struct GlobalOptions {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string output_dir = ".";
    bool verbose = false;
    std::string label = "y";
};

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v);

/// Collects the resolved configuration, inputs and outputs of one run.
class Run {
public:
    Run(std::string command, const GlobalOptions& global);

    nlohmann::ordered_json& config() { return config_; }
    const GlobalOptions& global() const { return global_; }

    /// Reads an input file and records its hash.
    std::string read_input(const std::filesystem::path& path);
    /// Writes `content` to output_dir/name and records its hash.
    void write_output(const std::string& name, const std::string& content);
    void note(const std::string& message);
    void log(const std::string& message) const;
    /// Writes run-manifest.json.
    void finish();

private:
    std::string command_;
    GlobalOptions global_;
    nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
    nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
    nlohmann::ordered_json outputs_ = nlohmann::ordered_json::array();
    nlohmann::ordered_json notes_ = nlohmann::ordered_json::array();
};

struct BaggingOptions {
    int bags = 100;
    int k = 1;               ///< 1: mean aggregation; >1: k-means with k clusters
    int splits_per_bag = 0;  ///< 0: 1 for the mean, 3 for k-means
    std::string criterion = "gini";
};

struct ThresholdsOptions {
    std::string data;
    BaggingOptions bagging;
};

struct FitOptions {
    std::string data;
    std::string thresholds;  ///< empty: estimate with `bagging`
    BaggingOptions bagging;
    std::optional<double> lambda;
    bool cv = false;
    int folds = 5;
    std::string metric = "deviance";
    bool two_se = false;
    std::string rule;  ///< overrides two_se when set
    int n_lambdas = 50;
    double lambda_min_ratio = 1e-3;
    double tol = 1e-8;
    int max_iters = 5000;
};

struct PredictOptions {
    std::string model;
    std::string data;
    double cutoff = 0.5;
};

struct EvaluateOptions {
    std::string model;
    std::string data;
    std::string predictions;  ///< alternative to model + data: a probability column and the label
    std::string probability_column = "probability";
    double alpha = 0.9;
    double fpr_hi = 0.1;
};

struct RiskscoreOptions {
    std::string model;
    std::string score;
    double merge_tol = 1e-8;
};

struct SimulateOptions {
    std::string design = "table1";
    std::string study;  ///< JSON study config; overrides design
    int reps = 50;
    bool emit_dataset = false;
    std::size_t n = 0;  ///< dataset size for emit_dataset (0: the design's first n)
};

void run_thresholds(const ThresholdsOptions& opt, const GlobalOptions& global);
void run_fit(const FitOptions& opt, const GlobalOptions& global);
void run_predict(const PredictOptions& opt, const GlobalOptions& global);
void run_evaluate(const EvaluateOptions& opt, const GlobalOptions& global);
void run_riskscore(const RiskscoreOptions& opt, const GlobalOptions& global);
void run_simulate(const SimulateOptions& opt, const GlobalOptions& global);

/// Expands `--config file.json` into command-line arguments placed right
/// after the subcommand, so explicit flags still take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace filterlr::cli
