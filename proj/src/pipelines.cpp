#include "mvrbm/pipelines.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

namespace mvrbm {

namespace fs = std::filesystem;

namespace {

// Secondary stream for data selection so it cannot collide with the
// training stream started from the same user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::string ensure_out_dir(const std::string& out_dir) {
    if (out_dir.empty()) throw UsageError("output directory is required");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory " + out_dir + ": " + ec.message());
    return out_dir;
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void append_value(std::string& csv, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    csv += buf;
}

std::vector<Matrix> binarize_all(const std::vector<Matrix>& images, double threshold,
                                 bool continuous) {
    if (continuous) {
        std::vector<Matrix> out;
        out.reserve(images.size());
        for (const auto& img : images) out.push_back(clamp_unit(img));
        return out;
    }
    std::vector<Matrix> out;
    out.reserve(images.size());
    for (const auto& img : images) out.push_back(binarize(img, threshold));
    return out;
}

const MvrbmParams& expect_mvrbm(const LoadedModel& model, const std::string& path) {
    if (const auto* p = std::get_if<MvrbmParams>(&model)) return *p;
    throw DataError(path + ": expected a factored matrix model artifact");
}

const MultimodalParams& expect_mmvrbm(const LoadedModel& model, const std::string& path) {
    if (const auto* p = std::get_if<MultimodalParams>(&model)) return *p;
    throw DataError(path + ": expected a multimodal model artifact");
}

std::vector<MetricRow> classify_paper_rows() {
    return {
        {"classify_reference", "error_rate_t300_n10000", 0.0571, "paper"},
        {"classify_reference", "error_rate_t3000_n10000", 0.0520, "paper"},
        {"classify_reference", "error_rate_n50000", 0.0359, "paper"},
        {"classify_reference", "error_rate_n600", 0.1387, "paper"},
    };
}

std::vector<MetricRow> superres_paper_rows() {
    return {
        {"superres_reference", "lena_x2_bicubic_rmse", 5.0134, "paper"},
        {"superres_reference", "lena_x2_bicubic_psnr_db", 34.1282, "paper"},
        {"superres_reference", "lena_x2_sparse_sr_rmse", 4.0900, "paper"},
        {"superres_reference", "lena_x2_sparse_sr_seconds", 679.529, "paper"},
        {"superres_reference", "lena_x2_sparse_sr_psnr_db", 35.8963, "paper"},
        {"superres_reference", "lena_x2_mmvrbm_rmse", 4.3804, "paper"},
        {"superres_reference", "lena_x2_mmvrbm_seconds", 36.116, "paper"},
        {"superres_reference", "lena_x2_mmvrbm_psnr_db", 35.3006, "paper"},
        {"superres_reference", "bird_x2_bicubic_rmse", 4.7932, "paper"},
        {"superres_reference", "bird_x2_bicubic_psnr_db", 34.5184, "paper"},
        {"superres_reference", "bird_x2_sparse_sr_rmse", 3.7975, "paper"},
        {"superres_reference", "bird_x2_sparse_sr_seconds", 748.225, "paper"},
        {"superres_reference", "bird_x2_sparse_sr_psnr_db", 36.5409, "paper"},
        {"superres_reference", "bird_x2_mmvrbm_rmse", 3.9459, "paper"},
        {"superres_reference", "bird_x2_mmvrbm_seconds", 35.196, "paper"},
        {"superres_reference", "bird_x2_mmvrbm_psnr_db", 36.2514, "paper"},
        {"superres_reference", "psnr_by_patch_10", 35.1621, "paper"},
        {"superres_reference", "psnr_by_patch_15", 35.3227, "paper"},
        {"superres_reference", "psnr_by_patch_20", 35.3555, "paper"},
        {"superres_reference", "psnr_by_patch_30", 35.3606, "paper"},
        {"superres_reference", "psnr_by_patch_35", 35.3564, "paper"},
    };
}

std::vector<MetricRow> denoise_paper_rows() {
    return {
        {"denoise_reference", "recon_error_total_per_image", 10.8488, "paper"},
        {"denoise_reference", "recon_error_per_pixel", 10.8488 / 784.0, "paper"},
    };
}

std::vector<Index> grid_positions(Index total, Index patch, Index stride) {
    std::vector<Index> pos;
    for (Index p = 0;; p += stride) {
        if (p + patch >= total) {
            pos.push_back(total - patch);
            break;
        }
        pos.push_back(p);
    }
    return pos;
}

// Patch-wise mean-field inference over the full plane with uniform overlap
// averaging.
Matrix superresolve_plane(const Matrix& x0_full, const MultimodalParams& params, int cycles,
                          Index stride_rows, Index stride_cols) {
    const Index pr = params.base.visible_rows(), pc = params.base.visible_cols();
    if (x0_full.rows() < pr || x0_full.cols() < pc)
        throw DataError("input upscales to " + shape_str(x0_full) +
                        ", smaller than the model patch " + std::to_string(pr) + "x" +
                        std::to_string(pc));
    const auto raw = extract_features(x0_full);
    std::array<Matrix, 4> feats;
    for (int e = 0; e < 4; ++e) feats[e] = normalize_feature(raw[e], e);
    if (params.channels.size() != 4)
        throw DataError("multimodal model has " + std::to_string(params.channels.size()) +
                        " channels, expected 4 derivative channels");

    Matrix acc = Matrix::Zero(x0_full.rows(), x0_full.cols());
    Matrix weight = Matrix::Zero(x0_full.rows(), x0_full.cols());
    for (Index r : grid_positions(x0_full.rows(), pr, stride_rows)) {
        for (Index c : grid_positions(x0_full.cols(), pc, stride_cols)) {
            std::vector<Matrix> z;
            z.reserve(4);
            for (int e = 0; e < 4; ++e) z.push_back(feats[e].block(r, c, pr, pc));
            const Matrix patch = sr_infer(z, x0_full.block(r, c, pr, pc), params, cycles);
            acc.block(r, c, pr, pc) += patch;
            weight.block(r, c, pr, pc) += Matrix::Ones(pr, pc);
        }
    }
    return clamp_unit((acc.array() / weight.array()).matrix());
}

}  // namespace

void write_metrics_csv(const std::vector<MetricRow>& rows, const std::string& path) {
    std::string csv = "experiment_id,metric,value,source\n";
    for (const auto& r : rows) {
        csv += r.experiment_id + "," + r.metric + ",";
        append_value(csv, r.value);
        csv += "," + r.source + "\n";
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open " + path);
    out << csv;
}

LabeledDataset load_dataset(const DatasetSelector& sel, std::uint64_t seed) {
    LabeledDataset data;
    if (!sel.manifest.empty()) {
        for (const auto& p : read_manifest(sel.manifest)) {
            data.images.push_back(read_pgm(p));
            data.labels.push_back(0);
        }
    } else if (!sel.idx_images.empty()) {
        data = load_idx(sel.idx_images, sel.idx_labels);
    } else {
        throw UsageError("no dataset given: provide --idx-images/--idx-labels or --manifest");
    }

    if (sel.digit >= 0) {
        LabeledDataset kept;
        for (std::size_t n = 0; n < data.size(); ++n)
            if (data.labels[n] == sel.digit) {
                kept.images.push_back(std::move(data.images[n]));
                kept.labels.push_back(data.labels[n]);
            }
        data = std::move(kept);
    }

    if (sel.count >= 0 && static_cast<std::size_t>(sel.count) < data.size()) {
        Rng rng(derive_seed(seed, 0xDA7A));
        std::vector<std::size_t> idx(data.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        const auto m = static_cast<std::size_t>(sel.count);
        for (std::size_t t = 0; t < m; ++t)
            std::swap(idx[t], idx[t + rng.index_below(idx.size() - t)]);
        LabeledDataset kept;
        for (std::size_t t = 0; t < m; ++t) {
            kept.images.push_back(std::move(data.images[idx[t]]));
            kept.labels.push_back(data.labels[idx[t]]);
        }
        data = std::move(kept);
    }
    if (data.images.empty()) throw DataError("dataset selection produced no images");
    return data;
}

TrainOutcome cmd_train(const TrainOptions& opt) {
    const std::string out_dir = ensure_out_dir(opt.out_dir);
    TrainConfig cfg = opt.cfg;
    cfg.seed = opt.seed;
    cfg.validate();

    TrainOutcome outcome;
    outcome.model_path = join(out_dir, "model.mvrbm");
    outcome.telemetry_path = join(out_dir, "telemetry.csv");

    std::vector<EpochReport> telemetry;
    const auto observer = [&telemetry](const EpochReport& r) { telemetry.push_back(r); };
    const auto flush_telemetry = [&] { write_telemetry_csv(telemetry, outcome.telemetry_path); };

    try {
        if (opt.model_kind == "mmvrbm") {
            LabeledDataset corpus = load_dataset(opt.data, opt.seed);
            Rng patch_rng(derive_seed(opt.seed, 0xA7C4));
            PatchSet patches = sample_patches(corpus.images, opt.patch,
                                              static_cast<std::size_t>(opt.n_patches), opt.factor,
                                              patch_rng);
            MultimodalShape shape;
            shape.primary = {opt.patch, opt.patch, opt.hidden_rows, opt.hidden_cols};
            for (int e = 0; e < 4; ++e) shape.channels.emplace_back(opt.patch, opt.patch);
            auto [params, reports] = mm_train(patches.samples, shape, cfg, observer);
            save_model(params, outcome.model_path);
            outcome.final_recon_error = reports.empty() ? 0.0 : reports.back().recon_error;
        } else if (opt.model_kind == "rbm") {
            LabeledDataset data = load_dataset(opt.data, opt.seed);
            const auto imgs = binarize_all(data.images, opt.binarize_threshold, opt.continuous);
            std::vector<Vector> vecs;
            vecs.reserve(imgs.size());
            for (const auto& img : imgs) vecs.push_back(vectorize(img));
            const Index visible = vecs.front().size();
            const Index hidden = opt.hidden_rows * opt.hidden_cols;
            auto [params, reports] = rbm_train(vecs, visible, hidden, cfg, observer);
            save_model(params, outcome.model_path);
            outcome.final_recon_error = reports.empty() ? 0.0 : reports.back().recon_error;
        } else if (opt.model_kind == "mvrbm") {
            LabeledDataset data = load_dataset(opt.data, opt.seed);
            const auto imgs = binarize_all(data.images, opt.binarize_threshold, opt.continuous);
            const LayerShape shape{imgs.front().rows(), imgs.front().cols(), opt.hidden_rows,
                                   opt.hidden_cols};
            auto [params, reports] = train(imgs, shape, cfg, observer);
            save_model(params, outcome.model_path);
            outcome.final_recon_error = reports.empty() ? 0.0 : reports.back().recon_error;
        } else {
            throw UsageError("unknown model kind '" + opt.model_kind + "'");
        }
    } catch (const DivergenceError&) {
        flush_telemetry();  // keep the rows of the completed epochs
        throw;
    }
    flush_telemetry();
    return outcome;
}

DenoiseOutcome cmd_denoise(const DenoiseOptions& opt) {
    const std::string out_dir = ensure_out_dir(opt.out_dir);
    const LoadedModel model = load_model(opt.model_path);
    const MvrbmParams& params = expect_mvrbm(model, opt.model_path);
    LabeledDataset data = load_dataset(opt.data, opt.seed);

    Rng rng(opt.seed);
    std::vector<MetricRow> rows = denoise_paper_rows();
    double sum_noisy = 0.0, sum_denoised = 0.0;
    char name[64];
    for (std::size_t n = 0; n < data.size(); ++n) {
        const Matrix clean = clamp_unit(data.images[n]);
        require_shape(clean, params.visible_rows(), params.visible_cols(), "image");
        const Matrix noisy = salt_pepper(clean, opt.noise_fraction, rng);
        const Matrix input = opt.continuous ? noisy : binarize(noisy, opt.binarize_threshold);
        const Matrix hidden = opt.sample_hidden
                                  ? sample_bernoulli(hidden_activation(input, params), rng)
                                  : hidden_activation(input, params);
        const Matrix denoised = sigmoid(visible_preactivation(hidden, params));

        const double mae_noisy = reconstruction_error(clean, noisy).per_pixel;
        const double mae_denoised = reconstruction_error(clean, denoised).per_pixel;
        sum_noisy += mae_noisy;
        sum_denoised += mae_denoised;

        std::snprintf(name, sizeof name, "noisy_%04zu.pgm", n);
        write_pgm(noisy, join(out_dir, name));
        std::snprintf(name, sizeof name, "denoised_%04zu.pgm", n);
        write_pgm(denoised, join(out_dir, name));
        std::snprintf(name, sizeof name, "image_%04zu", n);
        rows.push_back({name, "mae_noisy", mae_noisy});
        rows.push_back({name, "mae_denoised", mae_denoised});
    }
    const double count = static_cast<double>(data.size());
    DenoiseOutcome outcome;
    outcome.mean_mae_noisy = sum_noisy / count;
    outcome.mean_mae_denoised = sum_denoised / count;
    outcome.metrics_path = join(out_dir, "metrics.csv");
    rows.push_back({"denoise", "mean_mae_noisy", outcome.mean_mae_noisy});
    rows.push_back({"denoise", "mean_mae_denoised", outcome.mean_mae_denoised});
    rows.push_back({"denoise", "noise_fraction", opt.noise_fraction});
    write_metrics_csv(rows, outcome.metrics_path);
    return outcome;
}

ClassifyOutcome cmd_classify(const ClassifyOptions& opt) {
    const std::string out_dir = ensure_out_dir(opt.out_dir);
    const LoadedModel model = load_model(opt.model_path);

    DatasetSelector train_sel{opt.train_idx_images, opt.train_idx_labels, "", -1, opt.train_count};
    DatasetSelector test_sel{opt.test_idx_images, opt.test_idx_labels, "", -1, opt.test_count};
    LabeledDataset train_set = load_dataset(train_sel, opt.seed);
    LabeledDataset test_set = load_dataset(test_sel, derive_seed(opt.seed, 0x7E57));

    const auto train_imgs = binarize_all(train_set.images, opt.binarize_threshold, false);
    const auto test_imgs = binarize_all(test_set.images, opt.binarize_threshold, false);

    const auto feature_of = [&](const Matrix& img) -> Vector {
        if (const auto* p = std::get_if<MvrbmParams>(&model)) return hidden_features(img, *p);
        if (const auto* p = std::get_if<RbmParams>(&model))
            return rbm_hidden_activation(vectorize(img), *p);
        throw DataError(opt.model_path + ": classification needs a factored or classic model");
    };

    const Index dim = feature_of(train_imgs.front()).size();
    Matrix train_feats(static_cast<Index>(train_imgs.size()), dim);
    for (std::size_t n = 0; n < train_imgs.size(); ++n)
        train_feats.row(static_cast<Index>(n)) = feature_of(train_imgs[n]).transpose();
    Matrix test_feats(static_cast<Index>(test_imgs.size()), dim);
    for (std::size_t n = 0; n < test_imgs.size(); ++n)
        test_feats.row(static_cast<Index>(n)) = feature_of(test_imgs[n]).transpose();

    const KnnResult knn = knn_classify(train_feats, train_set.labels, test_feats, test_set.labels);

    ClassifyOutcome outcome;
    outcome.error_rate = knn.error_rate;
    std::vector<MetricRow> rows = classify_paper_rows();
    rows.push_back({"classify", "error_rate", knn.error_rate});
    rows.push_back({"classify", "train_count", static_cast<double>(train_imgs.size())});
    rows.push_back({"classify", "test_count", static_cast<double>(test_imgs.size())});

    if (opt.with_raw_baseline) {
        const Index pix = train_imgs.front().size();
        Matrix raw_train(static_cast<Index>(train_imgs.size()), pix);
        for (std::size_t n = 0; n < train_imgs.size(); ++n)
            raw_train.row(static_cast<Index>(n)) = vectorize(train_imgs[n]).transpose();
        Matrix raw_test(static_cast<Index>(test_imgs.size()), pix);
        for (std::size_t n = 0; n < test_imgs.size(); ++n)
            raw_test.row(static_cast<Index>(n)) = vectorize(test_imgs[n]).transpose();
        const KnnResult raw = knn_classify(raw_train, train_set.labels, raw_test, test_set.labels);
        outcome.error_rate_raw = raw.error_rate;
        rows.push_back({"classify", "error_rate_raw_pixel", raw.error_rate});
    }

    std::map<std::pair<int, int>, long> confusion;
    for (std::size_t n = 0; n < test_set.labels.size(); ++n)
        ++confusion[{test_set.labels[n], knn.predicted[n]}];
    for (const auto& [key, count] : confusion)
        rows.push_back({"classify",
                        "confusion_" + std::to_string(key.first) + "_" + std::to_string(key.second),
                        static_cast<double>(count)});

    outcome.metrics_path = join(out_dir, "metrics.csv");
    write_metrics_csv(rows, outcome.metrics_path);
    return outcome;
}

SuperresOutcome cmd_superres(const SuperresOptions& opt) {
    const std::string out_dir = ensure_out_dir(opt.out_dir);
    if (opt.cycles < 1) throw UsageError("cycles must be >= 1");
    if (!(opt.factor > 1.0)) throw UsageError("factor must be > 1");
    const LoadedModel model = load_model(opt.model_path);
    const MultimodalParams& params = expect_mmvrbm(model, opt.model_path);
    const Index pr = params.base.visible_rows(), pc = params.base.visible_cols();
    const Index stride_rows = opt.stride > 0 ? opt.stride : std::max<Index>(1, pr / 2);
    const Index stride_cols = opt.stride > 0 ? opt.stride : std::max<Index>(1, pc / 2);

    const bool color = is_ppm_file(opt.input_path);
    Matrix low_y;
    Matrix low_cb, low_cr;
    if (color) {
        const YCbCr ycc = ycbcr_split(read_ppm(opt.input_path));
        low_y = ycc.y;
        low_cb = ycc.cb;
        low_cr = ycc.cr;
    } else {
        low_y = read_pgm(opt.input_path);
    }

    const Matrix x0_full = bicubic_resize(low_y, opt.factor);
    const Matrix sr_y = superresolve_plane(x0_full, params, opt.cycles, stride_rows, stride_cols);

    SuperresOutcome outcome;
    std::vector<MetricRow> rows = superres_paper_rows();
    if (color) {
        YCbCr up;
        up.y = sr_y;
        up.cb = bicubic_resize(low_cb, opt.factor);
        up.cr = bicubic_resize(low_cr, opt.factor);
        outcome.output_path = join(out_dir, "sr.ppm");
        write_ppm(ycbcr_merge(up), outcome.output_path);
    } else {
        outcome.output_path = join(out_dir, "sr.pgm");
        write_pgm(sr_y, outcome.output_path);
    }
    write_pgm(x0_full, join(out_dir, "x0_bicubic.pgm"));

    if (opt.reference) {
        Matrix ref_y;
        if (is_ppm_file(*opt.reference)) {
            ref_y = ycbcr_split(read_ppm(*opt.reference)).y;
        } else {
            ref_y = read_pgm(*opt.reference);
        }
        if (ref_y.rows() != sr_y.rows() || ref_y.cols() != sr_y.cols())
            throw DataError("reference is " + shape_str(ref_y) + " but output is " +
                            shape_str(sr_y));
        const Metrics m_bicubic = psnr(ref_y, x0_full);
        const Metrics m_sr = psnr(ref_y, sr_y);
        outcome.psnr_bicubic = m_bicubic.psnr;
        outcome.psnr_sr = m_sr.psnr;
        outcome.under_trained = !(m_sr.psnr >= m_bicubic.psnr + 0.1);
        rows.push_back({"superres", "psnr_bicubic_db", m_bicubic.psnr});
        rows.push_back({"superres", "rmse_bicubic", m_bicubic.rmse});
        rows.push_back({"superres", "psnr_sr_db", m_sr.psnr});
        rows.push_back({"superres", "rmse_sr", m_sr.rmse});
        rows.push_back({"superres", "under_trained", outcome.under_trained ? 1.0 : 0.0});
    }
    rows.push_back({"superres", "factor", opt.factor});
    rows.push_back({"superres", "cycles", static_cast<double>(opt.cycles)});
    outcome.metrics_path = join(out_dir, "metrics.csv");
    write_metrics_csv(rows, outcome.metrics_path);
    return outcome;
}

std::string cmd_filters(const FiltersOptions& opt) {
    const std::string out_dir = ensure_out_dir(opt.out_dir);
    const LoadedModel model = load_model(opt.model_path);
    const MvrbmParams& params = expect_mvrbm(model, opt.model_path);
    const Index I = params.visible_rows(), J = params.visible_cols();
    const Index K = params.hidden_rows(), L = params.hidden_cols();

    Matrix canvas = Matrix::Zero(K * (I + 1) - 1, L * (J + 1) - 1);
    for (Index k = 0; k < K; ++k)
        for (Index l = 0; l < L; ++l) {
            Matrix tile = params.U.row(k).transpose() * params.V.row(l);
            const double lo = tile.minCoeff(), hi = tile.maxCoeff();
            if (hi > lo)
                tile = ((tile.array() - lo) / (hi - lo)).matrix();
            else
                tile.setConstant(0.5);
            canvas.block(k * (I + 1), l * (J + 1), I, J) = tile;
        }
    const std::string path = join(out_dir, "filters.pgm");
    write_pgm(canvas, path);
    return path;
}

Metrics cmd_eval(const EvalOptions& opt) {
    const Matrix reference = is_ppm_file(opt.reference_path)
                                 ? ycbcr_split(read_ppm(opt.reference_path)).y
                                 : read_pgm(opt.reference_path);
    const Matrix test = is_ppm_file(opt.test_path) ? ycbcr_split(read_ppm(opt.test_path)).y
                                                   : read_pgm(opt.test_path);
    const Metrics m = psnr(reference, test);
    std::vector<MetricRow> rows{{"eval", "rmse", m.rmse},
                                {"eval", "psnr_db", m.psnr},
                                {"eval", "per_pixel_mae", m.per_pixel_mae}};
    if (!opt.out_dir.empty()) {
        write_metrics_csv(rows, join(ensure_out_dir(opt.out_dir), "metrics.csv"));
    } else {
        std::string csv = "experiment_id,metric,value,source\n";
        for (const auto& r : rows) {
            csv += r.experiment_id + "," + r.metric + ",";
            append_value(csv, r.value);
            csv += "," + r.source + "\n";
        }
        std::cout << csv;
    }
    return m;
}

}  // namespace mvrbm
