#include "rrlab/network.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "rrlab/kernels.hpp"

namespace rrlab {

Params::Params(std::vector<Mat> ls) : layers(std::move(ls)) { validate(); }

void Params::validate() const {
    if (layers.size() < 2) throw std::invalid_argument("Params: depth must be >= 2");
    for (std::size_t l = 1; l < layers.size(); ++l)
        if (layers[l].cols() != layers[l - 1].rows())
            throw std::invalid_argument("Params: layer shapes do not chain");
}

std::vector<std::size_t> Params::widths() const {
    std::vector<std::size_t> w;
    w.push_back(input_dim());
    for (const Mat& m : layers) w.push_back(m.rows());
    return w;
}

double Params::theta_norm_sq() const {
    double s = 0.0;
    for (const Mat& m : layers) s += kernels::sumsq(m.size(), m.data());
    return s;
}

double Params::theta_norm() const { return std::sqrt(theta_norm_sq()); }

Dataset Dataset::regression(Mat x, Mat y) {
    if (x.cols() != y.cols()) throw std::invalid_argument("Dataset: X/Y column counts differ");
    Dataset d;
    d.x = std::move(x);
    d.y_mat = std::move(y);
    return d;
}

Dataset Dataset::classification(Mat x, std::vector<int> labels) {
    if (x.cols() != labels.size())
        throw std::invalid_argument("Dataset: X/label counts differ");
    for (int y : labels)
        if (y != 1 && y != -1) throw std::invalid_argument("Dataset: labels must be +-1");
    Dataset d;
    d.x = std::move(x);
    d.labels = std::move(labels);
    return d;
}

Vec forward(const Params& p, const Vec& x) {
    if (x.size() != p.input_dim()) throw std::invalid_argument("forward: input length mismatch");
    Vec h = x;
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        Vec z = matvec(p.layers[l], h);
        if (l + 1 < p.layers.size()) kernels::relu(z.size(), z.data(), z.data());
        h = std::move(z);
    }
    return h;
}

Mat forward_batch(const Params& p, const Mat& x) {
    if (x.rows() != p.input_dim()) throw std::invalid_argument("forward_batch: input rows mismatch");
    Mat h = x;
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        Mat z = p.layers[l] * h;
        if (l + 1 < p.layers.size()) kernels::relu(z.size(), z.data(), z.data());
        h = std::move(z);
    }
    return h;
}

std::vector<std::vector<bool>> activation_pattern(const Params& p, const Vec& x) {
    if (x.size() != p.input_dim())
        throw std::invalid_argument("activation_pattern: input length mismatch");
    std::vector<std::vector<bool>> masks;
    Vec h = x;
    for (std::size_t l = 0; l + 1 < p.layers.size(); ++l) {
        Vec z = matvec(p.layers[l], h);
        std::vector<bool> mask(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) mask[i] = z[i] > 0.0;
        kernels::relu(z.size(), z.data(), z.data());
        masks.push_back(std::move(mask));
        h = std::move(z);
    }
    return masks;
}

Params scale(const Params& p, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("scale: factor must be positive");
    Params q = p;
    for (Mat& m : q.layers) kernels::scal(m.size(), c, m.data());
    return q;
}

std::string params_to_json(const Params& p) {
    nlohmann::json j;
    j["layers"] = nlohmann::json::array();
    for (const Mat& m : p.layers) {
        nlohmann::json lj;
        lj["rows"] = m.rows();
        lj["cols"] = m.cols();
        lj["data"] = m.entries();
        j["layers"].push_back(std::move(lj));
    }
    return j.dump();
}

Params params_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<Mat> layers;
    for (const auto& lj : j.at("layers")) {
        const std::size_t rows = lj.at("rows").get<std::size_t>();
        const std::size_t cols = lj.at("cols").get<std::size_t>();
        Vec data = lj.at("data").get<Vec>();
        layers.emplace_back(rows, cols, std::move(data));
    }
    return Params(std::move(layers));
}

}  // namespace rrlab
