#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csigan/checkpoint.hpp"
#include "csigan/experiments.hpp"
#include "csigan/grad_check.hpp"
#include "csigan/losses.hpp"

namespace py = pybind11;
using namespace csigan;

namespace {

py::dict split_to_dict(const DatasetSplit& split) {
    const auto pack = [](const std::vector<CsiSample>& samples) {
        Eigen::MatrixXd x(samples.empty() ? 0 : samples.front().values.size(),
                          static_cast<Eigen::Index>(samples.size()));
        std::vector<int> labels(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            x.col(static_cast<Eigen::Index>(i)) = samples[i].values;
            labels[i] = samples[i].label;
        }
        return std::make_pair(x, labels);
    };
    auto [train_x, train_y] = pack(split.train);
    auto [test_x, test_y] = pack(split.test);
    py::dict d;
    d["train_x"] = train_x;
    d["train_y"] = train_y;
    d["test_x"] = test_x;
    d["test_y"] = test_y;
    d["labeled_idx"] = split.labeled_idx;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "semi-supervised GAN for CSI fingerprint localization: core operations";

    // ---- primitive ops ----
    m.def("dense_forward", &dense_forward, py::arg("x"), py::arg("params"));
    m.def("conv1d_forward", &conv1d_forward, py::arg("feature_map"), py::arg("bank"));
    m.def("deconv1d_forward", &deconv1d_forward, py::arg("feature_map"), py::arg("bank"),
          py::arg("crop") = 0);
    m.def("transpose_bank", &transpose_bank, py::arg("bank"));
    m.def("relu", py::overload_cast<const Eigen::VectorXd&>(&relu), py::arg("x"));
    m.def(
        "leaky_relu",
        [](const Eigen::VectorXd& x, double alpha) { return leaky_relu(x, alpha); },
        py::arg("x"), py::arg("alpha") = 0.2);
    m.def("tanh_act", py::overload_cast<const Eigen::VectorXd&>(&tanh_act), py::arg("x"));
    m.def("softmax", &softmax, py::arg("logits"));
    m.def("lambda_real_prob", &lambda_real_prob, py::arg("logits"));
    m.def("categorical_ce", &categorical_ce, py::arg("probs"), py::arg("label"));
    m.def("binary_ce", &binary_ce, py::arg("q"), py::arg("target"));

    py::class_<DenseParams>(m, "DenseParams")
        .def(py::init<int, int>(), py::arg("in_dim"), py::arg("out_dim"))
        .def_readwrite("weight", &DenseParams::weight)
        .def_readwrite("bias", &DenseParams::bias);

    py::class_<ConvKernelBank>(m, "ConvKernelBank")
        .def(py::init<int, int, int>(), py::arg("taps"), py::arg("in_slices"),
             py::arg("out_slices"))
        .def_readwrite("kernels", &ConvKernelBank::kernels)
        .def_readwrite("bias", &ConvKernelBank::bias)
        .def_readonly("taps", &ConvKernelBank::taps)
        .def_readonly("in_slices", &ConvKernelBank::in_slices)
        .def_readonly("out_slices", &ConvKernelBank::out_slices);

    // ---- adam ----
    py::class_<AdamHyper>(m, "AdamHyper")
        .def(py::init<>())
        .def(py::init([](double lr, double beta1, double beta2, double epsilon) {
                 return AdamHyper{lr, beta1, beta2, epsilon};
             }),
             py::arg("lr") = 2e-4, py::arg("beta1") = 0.5, py::arg("beta2") = 0.999,
             py::arg("epsilon") = 1e-8)
        .def_readwrite("lr", &AdamHyper::lr)
        .def_readwrite("beta1", &AdamHyper::beta1)
        .def_readwrite("beta2", &AdamHyper::beta2)
        .def_readwrite("epsilon", &AdamHyper::epsilon);

    py::class_<AdamState>(m, "AdamState")
        .def(py::init<Eigen::Index>(), py::arg("size"))
        .def_readonly("t", &AdamState::t);

    m.def(
        "adam_step",
        [](Eigen::VectorXd params, const Eigen::VectorXd& grads, AdamState& state,
           const AdamHyper& hp) {
            Eigen::ArrayXd p = params.array();
            Eigen::ArrayXd g = grads.array();
            adam_step(Eigen::Map<Eigen::ArrayXd>(p.data(), p.size()),
                      Eigen::Map<const Eigen::ArrayXd>(g.data(), g.size()), state, hp);
            return Eigen::VectorXd(p.matrix());
        },
        py::arg("params"), py::arg("grads"), py::arg("state"), py::arg("hyper"),
        "One bias-corrected Adam update; returns the new parameters.");

    m.def(
        "grad_check",
        [](const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
           const Eigen::VectorXd& analytic, double h, Eigen::Index max_coords,
           std::uint64_t seed) {
            auto res = grad_check(f, x0, analytic, h, max_coords, seed);
            return py::make_tuple(res.max_rel_err, res.worst_index);
        },
        py::arg("f"), py::arg("x0"), py::arg("analytic_grad"), py::arg("h") = 1e-5,
        py::arg("max_coords") = 0, py::arg("seed") = 1);

    // ---- models ----
    py::class_<ClassifyResult>(m, "ClassifyResult")
        .def_readonly("probabilities", &ClassifyResult::probabilities)
        .def_readonly("predicted_class", &ClassifyResult::predicted_class);

    py::class_<Generator>(m, "Generator")
        .def_property_readonly("kind", [](const Generator& g) { return std::string(g.kind()); })
        .def_property_readonly("latent_dim", &Generator::latent_dim)
        .def("generate", &Generator::generate, py::arg("z"))
        .def(
            "generate_batch",
            [](Generator& g, const Eigen::MatrixXd& z) { return Eigen::MatrixXd(g.forward(z)); },
            py::arg("z"));

    py::class_<GeneratorNet, Generator>(m, "GeneratorNet");
    py::class_<SimplifiedGeneratorNet, Generator>(m, "SimplifiedGeneratorNet");

    py::class_<DiscClassNet>(m, "DiscClassNet")
        .def(
            "logits",
            [](DiscClassNet& net, const Eigen::MatrixXd& x) { return Eigen::MatrixXd(net.logits(x)); },
            py::arg("x"))
        .def("discriminate", &DiscClassNet::discriminate, py::arg("x"))
        .def("classify", &DiscClassNet::classify, py::arg("x"));

    m.def(
        "build_generator",
        [](std::uint64_t seed) -> std::unique_ptr<Generator> {
            return std::make_unique<GeneratorNet>(seed);
        },
        py::arg("seed"));
    m.def(
        "build_simplified_generator",
        [](std::uint64_t seed) -> std::unique_ptr<Generator> {
            return std::make_unique<SimplifiedGeneratorNet>(seed);
        },
        py::arg("seed"));
    m.def(
        "build_discriminator",
        [](std::uint64_t seed) { return std::make_unique<DiscClassNet>(seed); },
        py::arg("seed"));

    m.def("save_generator",
          [](const std::string& path, Generator& g) { save_checkpoint(path, g); });
    m.def("save_discriminator",
          [](const std::string& path, DiscClassNet& n) { save_checkpoint(path, n); });
    m.def("load_generator", &load_generator, py::arg("path"));
    m.def("load_discriminator", &load_discriminator, py::arg("path"));

    // ---- dataset ----
    py::class_<SynthParams>(m, "SynthParams")
        .def(py::init<>())
        .def_readwrite("classes", &SynthParams::classes)
        .def_readwrite("train_per_class", &SynthParams::train_per_class)
        .def_readwrite("test_per_class", &SynthParams::test_per_class)
        .def_readwrite("seed", &SynthParams::seed)
        .def_readwrite("noise_sigma", &SynthParams::noise_sigma);

    py::class_<DatasetSplit>(m, "DatasetSplit")
        .def("arrays", &split_to_dict,
             "train/test matrices (columns are samples), labels, labeled indices")
        .def_property_readonly("classes", &DatasetSplit::classes)
        .def_property_readonly("width", &DatasetSplit::width);

    m.def("synth_generate", &synth_generate, py::arg("params"));
    m.def("normalize", &normalize, py::arg("split"));
    m.def("select_labeled_subset", &select_labeled_subset, py::arg("split"),
          py::arg("per_class"), py::arg("seed"));
    m.def("save_csv", &save_csv, py::arg("split"), py::arg("path"));
    m.def("load_csv", &load_csv, py::arg("path"));

    // ---- training ----
    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("labeled_per_class", &TrainConfig::labeled_per_class)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("cnn_only", &TrainConfig::cnn_only)
        .def_readwrite("simplified_g", &TrainConfig::simplified_g)
        .def_readwrite("phase_wise", &TrainConfig::phase_wise)
        .def_readwrite("steps_per_epoch", &TrainConfig::steps_per_epoch)
        .def_readwrite("gan_opt", &TrainConfig::gan_opt)
        .def_readwrite("gen_opt", &TrainConfig::gen_opt)
        .def_readwrite("cls_opt", &TrainConfig::cls_opt);

    py::class_<EpochStats>(m, "EpochStats")
        .def_readonly("epoch", &EpochStats::epoch)
        .def_readonly("classifier_loss", &EpochStats::classifier_loss)
        .def_readonly("discriminator_loss", &EpochStats::discriminator_loss)
        .def_readonly("generator_loss", &EpochStats::generator_loss)
        .def_readonly("test_accuracy", &EpochStats::test_accuracy);

    py::class_<TrainResult>(m, "TrainResult")
        .def_property_readonly("generator",
                               [](TrainResult& r) { return r.generator.get(); },
                               py::return_value_policy::reference_internal)
        .def_property_readonly("net", [](TrainResult& r) { return r.net.get(); },
                               py::return_value_policy::reference_internal)
        .def_property_readonly("history",
                               [](const TrainResult& r) { return r.history.epochs; });

    m.def("train", [](const TrainConfig& cfg, const DatasetSplit& data) { return train(cfg, data); },
          py::arg("config"), py::arg("data"),
          py::call_guard<py::gil_scoped_release>());
    m.def("evaluate_accuracy",
          [](DiscClassNet& net, const DatasetSplit& data) {
              return evaluate_accuracy(net, data.test);
          },
          py::arg("net"), py::arg("data"));
}
