#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mvrbm/data_io.hpp"
#include "mvrbm/eval.hpp"
#include "mvrbm/multimodal.hpp"
#include "mvrbm/oracle.hpp"
#include "mvrbm/persistence.hpp"
#include "mvrbm/rbm.hpp"
#include "mvrbm/trainer.hpp"

namespace py = pybind11;
using namespace mvrbm;

namespace {

py::object load_model_py(const std::string& path) {
    LoadedModel model = load_model(path);
    return std::visit([](auto&& p) { return py::cast(std::forward<decltype(p)>(p)); },
                      std::move(model));
}

}  // namespace

PYBIND11_MODULE(_mvrbm, m) {
    m.doc() = "Matrix-variate RBM toolkit: bilinear energy models over binary matrices,"
              " contrastive-divergence training, and the image pipelines built on them.";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

    py::class_<Rng>(m, "Rng", "Seedable random stream with a pinned draw order")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", &Rng::uniform)
        .def("normal", &Rng::normal, py::arg("mean") = 0.0, py::arg("stddev") = 1.0);

    py::class_<LayerShape>(m, "LayerShape")
        .def(py::init([](Index i, Index j, Index k, Index l) {
                 return LayerShape{i, j, k, l};
             }),
             py::arg("visible_rows"), py::arg("visible_cols"), py::arg("hidden_rows"),
             py::arg("hidden_cols"))
        .def_readwrite("visible_rows", &LayerShape::visible_rows)
        .def_readwrite("visible_cols", &LayerShape::visible_cols)
        .def_readwrite("hidden_rows", &LayerShape::hidden_rows)
        .def_readwrite("hidden_cols", &LayerShape::hidden_cols);

    py::class_<MvrbmParams>(m, "MvrbmParams")
        .def(py::init<>())
        .def_readwrite("U", &MvrbmParams::U)
        .def_readwrite("V", &MvrbmParams::V)
        .def_readwrite("B", &MvrbmParams::B)
        .def_readwrite("C", &MvrbmParams::C)
        .def("shape", &MvrbmParams::shape)
        .def_static("zeros", &MvrbmParams::zeros, py::arg("shape"));

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("weight_decay", &TrainConfig::weight_decay)
        .def_readwrite("momentum", &TrainConfig::momentum)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("cd_steps", &TrainConfig::cd_steps)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("mean_field_negative", &TrainConfig::mean_field_negative);

    py::class_<EpochReport>(m, "EpochReport")
        .def_readonly("epoch", &EpochReport::epoch)
        .def_readonly("recon_error", &EpochReport::recon_error)
        .def_readonly("grad_norm_u", &EpochReport::grad_norm_u)
        .def_readonly("grad_norm_v", &EpochReport::grad_norm_v)
        .def_readonly("grad_norm_b", &EpochReport::grad_norm_b)
        .def_readonly("grad_norm_c", &EpochReport::grad_norm_c)
        .def_readonly("seconds", &EpochReport::seconds);

    m.def("init_params", &init_params, py::arg("shape"), py::arg("rng"));
    m.def("energy", &energy, py::arg("X"), py::arg("Y"), py::arg("params"));
    m.def("visible_activation", &visible_activation, py::arg("Y"), py::arg("params"));
    m.def("hidden_activation", &hidden_activation, py::arg("X"), py::arg("params"));
    m.def("sample_bernoulli",
          py::overload_cast<const Matrix&, Rng&>(&sample_bernoulli), py::arg("activation"),
          py::arg("rng"));
    m.def("gibbs_step", &gibbs_step, py::arg("X"), py::arg("params"), py::arg("rng"));
    m.def("kron_weight", &kron_weight, py::arg("params"));
    m.def("param_count", &param_count, py::arg("shape"));

    m.def(
        "train",
        [](const std::vector<Matrix>& data, const LayerShape& shape, const TrainConfig& cfg) {
            return train(data, shape, cfg);
        },
        py::arg("data"), py::arg("shape"), py::arg("config"),
        "CD-K training; returns (params, per-epoch reports)");

    py::class_<RbmParams>(m, "RbmParams")
        .def(py::init<>())
        .def_readwrite("W", &RbmParams::W)
        .def_readwrite("b", &RbmParams::b)
        .def_readwrite("c", &RbmParams::c);
    m.def("rbm_energy", &rbm_energy, py::arg("x"), py::arg("y"), py::arg("params"));
    m.def("rbm_hidden_activation", &rbm_hidden_activation, py::arg("x"), py::arg("params"));
    m.def("rbm_visible_activation", &rbm_visible_activation, py::arg("y"), py::arg("params"));
    m.def(
        "rbm_train",
        [](const std::vector<Vector>& data, Index visible_dim, Index hidden_dim,
           const TrainConfig& cfg) { return rbm_train(data, visible_dim, hidden_dim, cfg); },
        py::arg("data"), py::arg("visible_dim"), py::arg("hidden_dim"), py::arg("config"));
    m.def("kron_instantiate", &kron_instantiate, py::arg("params"),
          "Classic RBM with the same joint distribution on vectorized states");

    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init<>())
        .def_readwrite("Q", &ChannelParams::Q)
        .def_readwrite("R", &ChannelParams::R)
        .def_readwrite("A", &ChannelParams::A);
    py::class_<MultimodalParams>(m, "MultimodalParams")
        .def(py::init<>())
        .def_readwrite("base", &MultimodalParams::base)
        .def_readwrite("channels", &MultimodalParams::channels);
    py::class_<MultimodalShape>(m, "MultimodalShape")
        .def(py::init<>())
        .def_readwrite("primary", &MultimodalShape::primary)
        .def_readwrite("channels", &MultimodalShape::channels);
    py::class_<MultimodalSample>(m, "MultimodalSample")
        .def(py::init<>())
        .def(py::init([](Matrix x, std::vector<Matrix> channels) {
                 return MultimodalSample{std::move(x), std::move(channels)};
             }),
             py::arg("x"), py::arg("channels"))
        .def_readwrite("x", &MultimodalSample::x)
        .def_readwrite("channels", &MultimodalSample::channels);

    m.def("mm_energy", &mm_energy, py::arg("sample"), py::arg("Y"), py::arg("params"));
    m.def("mm_hidden_activation", &mm_hidden_activation, py::arg("sample"), py::arg("params"));
    m.def("mm_visible_activation", &mm_visible_activation, py::arg("Y"), py::arg("params"),
          py::arg("channel"));
    m.def(
        "mm_train",
        [](const std::vector<MultimodalSample>& data, const MultimodalShape& shape,
           const TrainConfig& cfg) { return mm_train(data, shape, cfg); },
        py::arg("data"), py::arg("shape"), py::arg("config"));
    m.def("sr_infer", &sr_infer, py::arg("features"), py::arg("x0"), py::arg("params"),
          py::arg("cycles") = 3,
          "Deterministic mean-field refinement of the primary channel");

    py::class_<ExactModel>(m, "ExactModel")
        .def_readonly("log_z", &ExactModel::log_z)
        .def("joint_prob", &ExactModel::joint_prob, py::arg("x_index"), py::arg("y_index"))
        .def("exact_visible_conditional", &ExactModel::exact_visible_conditional, py::arg("y_index"))
        .def("exact_hidden_conditional", &ExactModel::exact_hidden_conditional, py::arg("x_index"));
    m.def("enumerate_model", &enumerate_model, py::arg("params"),
          "Exact joint by exhaustive enumeration (tiny models only)");
    m.def("exact_loglik", &exact_loglik, py::arg("data"), py::arg("params"));

    py::class_<Metrics>(m, "Metrics")
        .def_readonly("rmse", &Metrics::rmse)
        .def_readonly("psnr", &Metrics::psnr)
        .def_readonly("per_pixel_mae", &Metrics::per_pixel_mae);
    m.def("psnr", &psnr, py::arg("reference"), py::arg("test"));
    m.def("hidden_features", &hidden_features, py::arg("X"), py::arg("params"));
    py::class_<KnnResult>(m, "KnnResult")
        .def_readonly("predicted", &KnnResult::predicted)
        .def_readonly("error_rate", &KnnResult::error_rate);
    m.def("knn_classify", &knn_classify, py::arg("train_features"), py::arg("train_labels"),
          py::arg("test_features"), py::arg("test_labels"), py::arg("k") = 1);

    m.def("binarize", &binarize, py::arg("image"), py::arg("threshold") = 0.5);
    m.def("salt_pepper", &salt_pepper, py::arg("image"), py::arg("fraction"), py::arg("rng"));
    m.def("extract_features", &extract_features, py::arg("image"));
    m.def("normalize_feature", &normalize_feature, py::arg("raw"), py::arg("feature_index"));
    m.def("bicubic_resize", &bicubic_resize, py::arg("image"), py::arg("factor"));
    m.def("read_pgm", &read_pgm, py::arg("path"));
    m.def("write_pgm", &write_pgm, py::arg("image"), py::arg("path"));

    m.def("save_model", py::overload_cast<const MvrbmParams&, const std::string&>(&save_model),
          py::arg("params"), py::arg("path"));
    m.def("save_model", py::overload_cast<const RbmParams&, const std::string&>(&save_model),
          py::arg("params"), py::arg("path"));
    m.def("save_model",
          py::overload_cast<const MultimodalParams&, const std::string&>(&save_model),
          py::arg("params"), py::arg("path"));
    m.def("load_model", &load_model_py, py::arg("path"));
}
