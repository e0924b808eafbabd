#ifndef MVRBM_PIPELINES_HPP
#define MVRBM_PIPELINES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvrbm/data_io.hpp"
#include "mvrbm/eval.hpp"
#include "mvrbm/multimodal.hpp"
#include "mvrbm/persistence.hpp"
#include "mvrbm/rbm.hpp"
#include "mvrbm/trainer.hpp"

namespace mvrbm {

// Metrics CSV row: experiment_id,metric,value,source. Rows with source
// "paper" are static published reference values, never recomputed here.
struct MetricRow {
    std::string experiment_id;
    std::string metric;
    double value;
    std::string source = "run";
};

void write_metrics_csv(const std::vector<MetricRow>& rows, const std::string& path);

// Image input: either an IDX pair or a manifest of PGM files, optionally
// filtered by label and subsampled to `count` images (random without
// replacement from a stream derived from the command seed).
struct DatasetSelector {
    std::string idx_images;
    std::string idx_labels;
    std::string manifest;
    int digit = -1;
    long count = -1;
};

LabeledDataset load_dataset(const DatasetSelector& sel, std::uint64_t seed);

struct TrainOptions {
    DatasetSelector data;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string model_kind = "mvrbm";  // mvrbm | rbm | mmvrbm
    Index hidden_rows = 15;
    Index hidden_cols = 15;
    TrainConfig cfg;  // seed is overwritten from `seed`
    double binarize_threshold = 0.5;
    bool continuous = false;
    // multimodal patch training
    Index patch = 15;
    long n_patches = 2000;
    double factor = 2.0;
};

struct TrainOutcome {
    std::string model_path;
    std::string telemetry_path;
    double final_recon_error = 0.0;
};

TrainOutcome cmd_train(const TrainOptions& opt);

struct DenoiseOptions {
    std::string model_path;
    DatasetSelector data;
    std::string out_dir;
    std::uint64_t seed = 0;
    double noise_fraction = 0.1;
    bool sample_hidden = false;  // default: deterministic mean-field hidden pass
    double binarize_threshold = 0.5;
    bool continuous = false;
};

struct DenoiseOutcome {
    double mean_mae_noisy = 0.0;
    double mean_mae_denoised = 0.0;
    std::string metrics_path;
};

DenoiseOutcome cmd_denoise(const DenoiseOptions& opt);

struct ClassifyOptions {
    std::string model_path;
    std::string train_idx_images, train_idx_labels;
    std::string test_idx_images, test_idx_labels;
    long train_count = -1;
    long test_count = -1;
    std::uint64_t seed = 0;
    bool with_raw_baseline = false;
    std::string out_dir;
    double binarize_threshold = 0.5;
};

struct ClassifyOutcome {
    double error_rate = 0.0;
    std::optional<double> error_rate_raw;
    std::string metrics_path;
};

ClassifyOutcome cmd_classify(const ClassifyOptions& opt);

struct SuperresOptions {
    std::string model_path;
    std::string input_path;                 // low-resolution PGM or PPM
    std::optional<std::string> reference;   // ground truth for metrics
    double factor = 2.0;
    int cycles = 3;
    Index stride = 0;  // 0 = patch/2
    std::string out_dir;
};

struct SuperresOutcome {
    std::string output_path;
    std::optional<double> psnr_bicubic;
    std::optional<double> psnr_sr;
    bool under_trained = false;
    std::string metrics_path;
};

SuperresOutcome cmd_superres(const SuperresOptions& opt);

struct FiltersOptions {
    std::string model_path;
    std::string out_dir;
};

// One tile per hidden unit (k, l): the rank-one image u_k v_l^T, min-max
// normalized, laid out on a K x L grid of (I+1) x (J+1) cells with one-pixel
// black separators; the full canvas is (K*(I+1)-1) x (L*(J+1)-1).
std::string cmd_filters(const FiltersOptions& opt);

struct EvalOptions {
    std::string reference_path;
    std::string test_path;
    std::string out_dir;  // empty = stdout only
};

Metrics cmd_eval(const EvalOptions& opt);

}  // namespace mvrbm

#endif
