#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "mvrbm/pipelines.hpp"

namespace {

// 0 success, 1 usage/config error, 2 data error, 3 numerical divergence.
constexpr int kUsageExit = 1;
constexpr int kDataExit = 2;
constexpr int kDivergenceExit = 3;

std::string config_path_sink;

void add_config_flag(CLI::App* cmd) {
    // Later arguments win, so values expanded from a config file (inserted
    // first) are overridden by explicit flags.
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--config", config_path_sink, "Read options from a key=value file");
}

// Expands `--config file` into the file's key=value pairs, inserted right
// after the subcommand token so explicit flags keep precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::size_t sub = args.size();
    for (std::size_t i = 0; i < args.size(); ++i)
        if (!args[i].empty() && args[i][0] != '-') {
            sub = i;
            break;
        }
    if (sub == args.size()) return args;

    std::string path;
    for (std::size_t i = sub + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::vector<std::string> expanded(args.begin(), args.begin() + sub + 1);
    for (const auto& [key, value] : mvrbm::read_config(path))
        expanded.push_back("--" + key + "=" + value);
    expanded.insert(expanded.end(), args.begin() + sub + 1, args.end());
    return expanded;
}

void add_dataset_flags(CLI::App* cmd, mvrbm::DatasetSelector& sel) {
    cmd->add_option("--idx-images", sel.idx_images, "IDX image file");
    cmd->add_option("--idx-labels", sel.idx_labels, "IDX label file");
    cmd->add_option("--manifest", sel.manifest, "Text file listing one PGM path per line");
    cmd->add_option("--digit", sel.digit, "Keep only images with this label");
    cmd->add_option("--count", sel.count, "Random subset size (seeded)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix-variate RBM toolkit: training, denoising, classification,"
                 " super-resolution"};
    app.require_subcommand(1);

    mvrbm::TrainOptions train_opt;
    auto* train = app.add_subcommand("train", "Train a model and write artifact + telemetry");
    add_config_flag(train);
    add_dataset_flags(train, train_opt.data);
    train->add_option("--out", train_opt.out_dir, "Output directory")->required();
    train->add_option("--seed", train_opt.seed, "RNG seed")->required();
    train->add_option("--model-kind", train_opt.model_kind, "mvrbm | rbm | mmvrbm");
    train->add_option("--hidden-rows", train_opt.hidden_rows, "Hidden rows (K)");
    train->add_option("--hidden-cols", train_opt.hidden_cols, "Hidden cols (L)");
    train->add_option("--epochs", train_opt.cfg.epochs, "Training epochs");
    train->add_option("--lr", train_opt.cfg.learning_rate, "Learning rate");
    train->add_option("--weight-decay", train_opt.cfg.weight_decay, "Factor decay coefficient");
    train->add_option("--momentum", train_opt.cfg.momentum, "Momentum coefficient");
    train->add_option("--batch-size", train_opt.cfg.batch_size, "Mini-batch size");
    train->add_option("--cd-steps", train_opt.cfg.cd_steps, "Gibbs transitions per chain");
    train->add_flag("--mean-field-negative", train_opt.cfg.mean_field_negative,
                    "Propagate chain visible states as probabilities");
    train->add_option("--binarize-threshold", train_opt.binarize_threshold,
                      "Pixel threshold for binary units");
    train->add_flag("--continuous", train_opt.continuous,
                    "Keep gray values as unit means instead of binarizing");
    train->add_option("--patch", train_opt.patch, "Patch edge for multimodal training");
    train->add_option("--n-patches", train_opt.n_patches, "Patch count for multimodal training");
    train->add_option("--factor", train_opt.factor, "Magnification factor (multimodal)");

    mvrbm::DenoiseOptions denoise_opt;
    auto* denoise = app.add_subcommand("denoise", "Corrupt images and reconstruct them");
    add_config_flag(denoise);
    add_dataset_flags(denoise, denoise_opt.data);
    denoise->add_option("--model", denoise_opt.model_path, "Model artifact")->required();
    denoise->add_option("--out", denoise_opt.out_dir, "Output directory")->required();
    denoise->add_option("--seed", denoise_opt.seed, "RNG seed")->required();
    denoise->add_option("--noise-fraction", denoise_opt.noise_fraction,
                        "Fraction of pixels hit by salt & pepper noise");
    denoise->add_flag("--sample-hidden", denoise_opt.sample_hidden,
                      "Sample the hidden state instead of the mean-field pass");
    denoise->add_option("--binarize-threshold", denoise_opt.binarize_threshold,
                        "Pixel threshold for binary units");
    denoise->add_flag("--continuous", denoise_opt.continuous, "Skip input binarization");

    mvrbm::ClassifyOptions classify_opt;
    auto* classify = app.add_subcommand("classify", "1-NN classification on hidden features");
    add_config_flag(classify);
    classify->add_option("--model", classify_opt.model_path, "Model artifact")->required();
    classify->add_option("--train-idx-images", classify_opt.train_idx_images)->required();
    classify->add_option("--train-idx-labels", classify_opt.train_idx_labels)->required();
    classify->add_option("--test-idx-images", classify_opt.test_idx_images)->required();
    classify->add_option("--test-idx-labels", classify_opt.test_idx_labels)->required();
    classify->add_option("--train-count", classify_opt.train_count, "Training subset size");
    classify->add_option("--test-count", classify_opt.test_count, "Test subset size");
    classify->add_option("--seed", classify_opt.seed, "RNG seed")->required();
    classify->add_flag("--with-raw-baseline", classify_opt.with_raw_baseline,
                       "Also run raw-pixel 1-NN on the same subset");
    classify->add_option("--out", classify_opt.out_dir, "Output directory")->required();
    classify->add_option("--binarize-threshold", classify_opt.binarize_threshold,
                         "Pixel threshold for binary units");

    mvrbm::SuperresOptions sr_opt;
    std::string sr_reference;
    auto* superres = app.add_subcommand("superres", "Upscale an image with a multimodal model");
    add_config_flag(superres);
    superres->add_option("--model", sr_opt.model_path, "Model artifact")->required();
    superres->add_option("--input", sr_opt.input_path, "Low-resolution PGM/PPM")->required();
    superres->add_option("--reference", sr_reference, "Ground-truth image for metrics");
    superres->add_option("--factor", sr_opt.factor, "Magnification factor");
    superres->add_option("--cycles", sr_opt.cycles, "Mean-field refinement cycles");
    superres->add_option("--stride", sr_opt.stride, "Patch grid stride (default patch/2)");
    superres->add_option("--out", sr_opt.out_dir, "Output directory")->required();

    mvrbm::FiltersOptions filters_opt;
    auto* filters = app.add_subcommand("filters", "Render the learned dictionary as a tile grid");
    add_config_flag(filters);
    filters->add_option("--model", filters_opt.model_path, "Model artifact")->required();
    filters->add_option("--out", filters_opt.out_dir, "Output directory")->required();

    mvrbm::EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "RMSE / PSNR / MAE between two images");
    add_config_flag(eval);
    eval->add_option("--reference", eval_opt.reference_path, "Reference image")->required();
    eval->add_option("--test", eval_opt.test_path, "Image to score")->required();
    eval->add_option("--out", eval_opt.out_dir, "Output directory (default: print CSV)");

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsageExit;
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);  // CLI11 consumes from the back
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageExit;
    }

    try {
        if (*train) {
            const auto r = mvrbm::cmd_train(train_opt);
            std::printf("model: %s\ntelemetry: %s\nfinal recon error: %.6f\n",
                        r.model_path.c_str(), r.telemetry_path.c_str(), r.final_recon_error);
        } else if (*denoise) {
            const auto r = mvrbm::cmd_denoise(denoise_opt);
            std::printf("mean MAE noisy: %.6f\nmean MAE denoised: %.6f\nmetrics: %s\n",
                        r.mean_mae_noisy, r.mean_mae_denoised, r.metrics_path.c_str());
        } else if (*classify) {
            const auto r = mvrbm::cmd_classify(classify_opt);
            std::printf("error rate: %.4f\n", r.error_rate);
            if (r.error_rate_raw) std::printf("raw-pixel error rate: %.4f\n", *r.error_rate_raw);
            std::printf("metrics: %s\n", r.metrics_path.c_str());
        } else if (*superres) {
            if (!sr_reference.empty()) sr_opt.reference = sr_reference;
            const auto r = mvrbm::cmd_superres(sr_opt);
            std::printf("output: %s\n", r.output_path.c_str());
            if (r.psnr_sr)
                std::printf("PSNR bicubic: %.4f dB\nPSNR sr: %.4f dB%s\n", *r.psnr_bicubic,
                            *r.psnr_sr, r.under_trained ? " (under-trained)" : "");
        } else if (*filters) {
            std::printf("filters: %s\n", mvrbm::cmd_filters(filters_opt).c_str());
        } else if (*eval) {
            mvrbm::cmd_eval(eval_opt);
        }
    } catch (const mvrbm::UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsageExit;
    } catch (const mvrbm::DivergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kDivergenceExit;
    } catch (const mvrbm::DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kDataExit;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kDataExit;
    }
    return 0;
}
