#include "fdwm/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fdwm/rng.hpp"
#include "fdwm/tensor_io.hpp"

namespace fdwm {

namespace {

struct Shape {
    int ch = 0, h = 0, w = 0;
    std::size_t size() const { return static_cast<std::size_t>(ch) * h * w; }
};

// Activation shape after every layer; index 0 is the input.
std::vector<Shape> propagate_shapes(const Architecture& arch) {
    if (arch.in_h < 1 || arch.in_w < 1 || arch.in_ch < 1)
        throw std::invalid_argument("architecture: bad input dims");
    std::vector<Shape> shapes;
    shapes.push_back({arch.in_ch, arch.in_h, arch.in_w});
    bool flat = false;
    for (const auto& l : arch.layers) {
        Shape s = shapes.back();
        switch (l.kind) {
            case LayerKind::Conv3x3:
                if (flat) throw std::invalid_argument("architecture: conv after flatten");
                if (l.units < 1) throw std::invalid_argument("architecture: conv needs channels");
                s.ch = l.units;
                break;
            case LayerKind::ReLU:
                break;
            case LayerKind::MaxPool2:
                if (flat) throw std::invalid_argument("architecture: pool after flatten");
                if (s.h < 2 || s.w < 2)
                    throw std::invalid_argument("architecture: pool input too small");
                s.h /= 2;
                s.w /= 2;
                break;
            case LayerKind::Flatten:
                s = {1, 1, static_cast<int>(s.size())};
                flat = true;
                break;
            case LayerKind::Dense:
                if (!flat && (s.ch != 1 || s.h != 1))
                    throw std::invalid_argument("architecture: dense needs flattened input");
                if (l.units < 1) throw std::invalid_argument("architecture: dense needs units");
                s = {1, 1, l.units};
                flat = true;
                break;
        }
        shapes.push_back(s);
    }
    if (arch.layers.empty() || arch.layers.back().kind != LayerKind::Dense)
        throw std::invalid_argument("architecture: must end with a dense layer");
    return shapes;
}

const char* kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Conv3x3: return "conv3x3";
        case LayerKind::ReLU: return "relu";
        case LayerKind::MaxPool2: return "maxpool2";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::Dense: return "dense";
    }
    return "?";
}

void conv3x3_forward(const double* in, const Shape& is, const Tensor& w, const Tensor& b,
                     double* out, const Shape& os) {
    const int H = is.h, W = is.w;
    for (int oc = 0; oc < os.ch; ++oc) {
        double* op = out + static_cast<std::size_t>(oc) * H * W;
        for (int i = 0; i < H * W; ++i) op[i] = b.v[oc];
        for (int ic = 0; ic < is.ch; ++ic) {
            const double* ip = in + static_cast<std::size_t>(ic) * H * W;
            const double* wp = w.v.data() + (static_cast<std::size_t>(oc) * is.ch + ic) * 9;
            for (int y = 0; y < H; ++y) {
                const int y0 = std::max(0, y - 1), y1 = std::min(H - 1, y + 1);
                for (int x = 0; x < W; ++x) {
                    const int x0 = std::max(0, x - 1), x1 = std::min(W - 1, x + 1);
                    double acc = 0.0;
                    for (int yy = y0; yy <= y1; ++yy)
                        for (int xx = x0; xx <= x1; ++xx)
                            acc += wp[(yy - y + 1) * 3 + (xx - x + 1)] * ip[yy * W + xx];
                    op[y * W + x] += acc;
                }
            }
        }
    }
}

void conv3x3_backward(const double* in, const Shape& is, const Tensor& w, const double* gout,
                      const Shape& os, Tensor& gw, Tensor& gb, double* gin) {
    const int H = is.h, W = is.w;
    for (int oc = 0; oc < os.ch; ++oc) {
        const double* gp = gout + static_cast<std::size_t>(oc) * H * W;
        for (int i = 0; i < H * W; ++i) gb.v[oc] += gp[i];
        for (int ic = 0; ic < is.ch; ++ic) {
            const double* ip = in + static_cast<std::size_t>(ic) * H * W;
            const double* wp = w.v.data() + (static_cast<std::size_t>(oc) * is.ch + ic) * 9;
            double* gwp = gw.v.data() + (static_cast<std::size_t>(oc) * is.ch + ic) * 9;
            double* gip = gin ? gin + static_cast<std::size_t>(ic) * H * W : nullptr;
            for (int y = 0; y < H; ++y) {
                const int y0 = std::max(0, y - 1), y1 = std::min(H - 1, y + 1);
                for (int x = 0; x < W; ++x) {
                    const int x0 = std::max(0, x - 1), x1 = std::min(W - 1, x + 1);
                    const double g = gp[y * W + x];
                    for (int yy = y0; yy <= y1; ++yy)
                        for (int xx = x0; xx <= x1; ++xx) {
                            const int k = (yy - y + 1) * 3 + (xx - x + 1);
                            gwp[k] += g * ip[yy * W + xx];
                            if (gip) gip[yy * W + xx] += g * wp[k];
                        }
                }
            }
        }
    }
}

}  // namespace

std::string Architecture::to_text() const {
    std::ostringstream os;
    os << "input:" << in_h << "x" << in_w << "x" << in_ch;
    for (const auto& l : layers) {
        os << "|" << kind_name(l.kind);
        if (l.kind == LayerKind::Conv3x3 || l.kind == LayerKind::Dense) os << ":" << l.units;
    }
    return os.str();
}

Architecture Architecture::from_text(const std::string& text) {
    Architecture a;
    std::stringstream ss(text);
    std::string tok;
    bool first = true;
    while (std::getline(ss, tok, '|')) {
        if (first) {
            int h = 0, w = 0, c = 0;
            if (std::sscanf(tok.c_str(), "input:%dx%dx%d", &h, &w, &c) != 3)
                throw std::invalid_argument("architecture: bad input token '" + tok + "'");
            a.in_h = h;
            a.in_w = w;
            a.in_ch = c;
            first = false;
            continue;
        }
        const auto colon = tok.find(':');
        const std::string name = tok.substr(0, colon);
        const int units = colon == std::string::npos ? 0 : std::stoi(tok.substr(colon + 1));
        if (name == "conv3x3") a.layers.push_back({LayerKind::Conv3x3, units});
        else if (name == "relu") a.layers.push_back({LayerKind::ReLU, 0});
        else if (name == "maxpool2") a.layers.push_back({LayerKind::MaxPool2, 0});
        else if (name == "flatten") a.layers.push_back({LayerKind::Flatten, 0});
        else if (name == "dense") a.layers.push_back({LayerKind::Dense, units});
        else throw std::invalid_argument("architecture: unknown layer '" + name + "'");
    }
    propagate_shapes(a);  // validates
    return a;
}

int Architecture::output_units() const {
    for (auto it = layers.rbegin(); it != layers.rend(); ++it)
        if (it->kind == LayerKind::Dense) return it->units;
    return 0;
}

Architecture tinycnn_arch(int h, int w, int d, int classes, int conv1, int conv2, int hidden) {
    Architecture a;
    a.in_h = h;
    a.in_w = w;
    a.in_ch = d;
    a.layers = {{LayerKind::Conv3x3, conv1}, {LayerKind::ReLU, 0},   {LayerKind::MaxPool2, 0},
                {LayerKind::Conv3x3, conv2}, {LayerKind::ReLU, 0},   {LayerKind::MaxPool2, 0},
                {LayerKind::Flatten, 0},     {LayerKind::Dense, hidden}, {LayerKind::ReLU, 0},
                {LayerKind::Dense, classes}};
    propagate_shapes(a);
    return a;
}

Architecture mlp_arch(int h, int w, int d, int classes, int hidden) {
    Architecture a;
    a.in_h = h;
    a.in_w = w;
    a.in_ch = d;
    a.layers = {{LayerKind::Flatten, 0},
                {LayerKind::Dense, hidden},
                {LayerKind::ReLU, 0},
                {LayerKind::Dense, classes}};
    propagate_shapes(a);
    return a;
}

Classifier init(const Architecture& arch, int class_count, std::uint64_t seed) {
    const auto shapes = propagate_shapes(arch);
    if (arch.output_units() != class_count)
        throw std::invalid_argument("init: final dense layer has " +
                                    std::to_string(arch.output_units()) + " outputs, expected " +
                                    std::to_string(class_count));
    Classifier m;
    m.arch = arch;
    m.class_count = class_count;
    m.init_seed = seed;
    Rng rng(mix64(seed, 0x1417ull));
    for (std::size_t li = 0; li < arch.layers.size(); ++li) {
        const auto& l = arch.layers[li];
        if (l.kind == LayerKind::Conv3x3) {
            const int ic = shapes[li].ch;
            Tensor w{{l.units, ic, 3, 3}, {}};
            w.v.resize(static_cast<std::size_t>(l.units) * ic * 9);
            const double a = std::sqrt(6.0 / (static_cast<double>(ic) * 9));
            for (auto& x : w.v) x = rng.uniform(-a, a);
            m.params.push_back(std::move(w));
            m.param_is_weight.push_back(true);
            m.params.push_back({{l.units}, std::vector<double>(l.units, 0.0)});
            m.param_is_weight.push_back(false);
        } else if (l.kind == LayerKind::Dense) {
            const int in = static_cast<int>(shapes[li].size());
            Tensor w{{l.units, in}, {}};
            w.v.resize(static_cast<std::size_t>(l.units) * in);
            const double a = std::sqrt(6.0 / static_cast<double>(in));
            for (auto& x : w.v) x = rng.uniform(-a, a);
            m.params.push_back(std::move(w));
            m.param_is_weight.push_back(true);
            m.params.push_back({{l.units}, std::vector<double>(l.units, 0.0)});
            m.param_is_weight.push_back(false);
        }
    }
    return m;
}

namespace {

// Activations after every layer (index 0 = input). Reused across samples.
struct Workspace {
    std::vector<Shape> shapes;
    std::vector<std::vector<double>> act;
    std::vector<std::vector<double>> grad;  // same layout, for backward

    void bind(const Architecture& arch) {
        shapes = propagate_shapes(arch);
        act.resize(shapes.size());
        grad.resize(shapes.size());
        for (std::size_t i = 0; i < shapes.size(); ++i) {
            act[i].assign(shapes[i].size(), 0.0);
            grad[i].assign(shapes[i].size(), 0.0);
        }
    }
};

void forward_pass(const Classifier& m, const double* input, Workspace& ws) {
    std::copy(input, input + ws.shapes[0].size(), ws.act[0].begin());
    std::size_t pi = 0;
    for (std::size_t li = 0; li < m.arch.layers.size(); ++li) {
        const auto& l = m.arch.layers[li];
        const auto& in = ws.act[li];
        auto& out = ws.act[li + 1];
        const Shape& is = ws.shapes[li];
        const Shape& os = ws.shapes[li + 1];
        switch (l.kind) {
            case LayerKind::Conv3x3:
                conv3x3_forward(in.data(), is, m.params[pi], m.params[pi + 1], out.data(), os);
                pi += 2;
                break;
            case LayerKind::ReLU:
                for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
                break;
            case LayerKind::MaxPool2:
                for (int c = 0; c < os.ch; ++c)
                    for (int y = 0; y < os.h; ++y)
                        for (int x = 0; x < os.w; ++x) {
                            const double* ip =
                                in.data() + (static_cast<std::size_t>(c) * is.h + 2 * y) * is.w +
                                2 * x;
                            const double a = ip[0], b = ip[1], cc = ip[is.w], d = ip[is.w + 1];
                            out[(static_cast<std::size_t>(c) * os.h + y) * os.w + x] =
                                std::max(std::max(a, b), std::max(cc, d));
                        }
                break;
            case LayerKind::Flatten:
                std::copy(in.begin(), in.end(), out.begin());
                break;
            case LayerKind::Dense: {
                const Tensor& w = m.params[pi];
                const Tensor& b = m.params[pi + 1];
                const int n_in = static_cast<int>(is.size());
                for (int o = 0; o < l.units; ++o) {
                    const double* wp = w.v.data() + static_cast<std::size_t>(o) * n_in;
                    double acc = b.v[o];
                    for (int i = 0; i < n_in; ++i) acc += wp[i] * in[i];
                    out[o] = acc;
                }
                pi += 2;
                break;
            }
        }
    }
}

// Backward from d(loss)/d(scores) already stored in ws.grad.back().
// Accumulates parameter gradients into `grads`.
void backward_pass(const Classifier& m, Workspace& ws, std::vector<Tensor>& grads) {
    std::size_t pi = m.params.size();
    for (std::size_t li = m.arch.layers.size(); li-- > 0;) {
        const auto& l = m.arch.layers[li];
        const auto& in = ws.act[li];
        auto& gin = ws.grad[li];
        const auto& gout = ws.grad[li + 1];
        const Shape& is = ws.shapes[li];
        const Shape& os = ws.shapes[li + 1];
        std::fill(gin.begin(), gin.end(), 0.0);
        switch (l.kind) {
            case LayerKind::Dense: {
                pi -= 2;
                const Tensor& w = m.params[pi];
                Tensor& gw = grads[pi];
                Tensor& gb = grads[pi + 1];
                const int n_in = static_cast<int>(is.size());
                for (int o = 0; o < l.units; ++o) {
                    const double g = gout[o];
                    gb.v[o] += g;
                    const double* wp = w.v.data() + static_cast<std::size_t>(o) * n_in;
                    double* gwp = gw.v.data() + static_cast<std::size_t>(o) * n_in;
                    for (int i = 0; i < n_in; ++i) {
                        gwp[i] += g * in[i];
                        gin[i] += g * wp[i];
                    }
                }
                break;
            }
            case LayerKind::Flatten:
                std::copy(gout.begin(), gout.end(), gin.begin());
                break;
            case LayerKind::MaxPool2:
                for (int c = 0; c < os.ch; ++c)
                    for (int y = 0; y < os.h; ++y)
                        for (int x = 0; x < os.w; ++x) {
                            const std::size_t base =
                                (static_cast<std::size_t>(c) * is.h + 2 * y) * is.w + 2 * x;
                            // route to the first maximum in scan order
                            const std::size_t cand[4] = {base, base + 1, base + is.w,
                                                         base + is.w + 1};
                            std::size_t best = cand[0];
                            for (int k = 1; k < 4; ++k)
                                if (in[cand[k]] > in[best]) best = cand[k];
                            gin[best] +=
                                gout[(static_cast<std::size_t>(c) * os.h + y) * os.w + x];
                        }
                break;
            case LayerKind::ReLU:
                for (std::size_t i = 0; i < gin.size(); ++i)
                    gin[i] = in[i] > 0.0 ? gout[i] : 0.0;
                break;
            case LayerKind::Conv3x3:
                pi -= 2;
                conv3x3_backward(in.data(), is, m.params[pi], gout.data(), os, grads[pi],
                                 grads[pi + 1], li > 0 ? gin.data() : nullptr);
                break;
        }
    }
}

double cross_entropy_grad(std::span<const double> scores, int label, std::vector<double>& gout) {
    // softmax + CE with the usual max-shift; gradient is p - onehot
    double mx = scores[0];
    for (double s : scores) mx = std::max(mx, s);
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        gout[i] = std::exp(scores[i] - mx);
        sum += gout[i];
    }
    const double loss = std::log(sum) - (scores[label] - mx);
    for (auto& g : gout) g /= sum;
    gout[label] -= 1.0;
    return loss;
}

void check_input(const Classifier& m, const Image& img) {
    if (img.height != m.arch.in_h || img.width != m.arch.in_w || img.channels != m.arch.in_ch)
        throw std::invalid_argument("forward: image dims do not match architecture input");
}

std::vector<Tensor> zeros_like(const std::vector<Tensor>& params) {
    std::vector<Tensor> z;
    z.reserve(params.size());
    for (const auto& p : params) z.push_back({p.shape, std::vector<double>(p.size(), 0.0)});
    return z;
}

}  // namespace

std::vector<double> forward(const Classifier& m, const Image& image) {
    check_input(m, image);
    Workspace ws;
    ws.bind(m.arch);
    forward_pass(m, image.pixels.data(), ws);
    return ws.act.back();
}

int predict(const Classifier& m, const Image& image) {
    const auto scores = forward(m, image);
    int best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = static_cast<int>(i);
    return best;
}

struct Predictor::Impl {
    const Classifier* model;
    Workspace ws;
};

Predictor::Predictor(const Classifier& model) : impl_(std::make_unique<Impl>()) {
    impl_->model = &model;
    impl_->ws.bind(model.arch);
}
Predictor::~Predictor() = default;
Predictor::Predictor(Predictor&&) noexcept = default;
Predictor& Predictor::operator=(Predictor&&) noexcept = default;

int Predictor::predict(const Image& image) {
    check_input(*impl_->model, image);
    forward_pass(*impl_->model, image.pixels.data(), impl_->ws);
    const auto& scores = impl_->ws.act.back();
    int best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = static_cast<int>(i);
    return best;
}

std::vector<double> softmax(std::span<const double> scores) {
    std::vector<double> p(scores.size());
    double mx = scores[0];
    for (double s : scores) mx = std::max(mx, s);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(scores[i] - mx);
        sum += p[i];
    }
    for (auto& x : p) x /= sum;
    return p;
}

void SgdMomentum::init(const std::vector<Tensor>& params) { velocity = zeros_like(params); }

void SgdMomentum::step(std::vector<Tensor>& params, const std::vector<Tensor>& grads) {
    for (std::size_t t = 0; t < params.size(); ++t) {
        auto& v = velocity[t].v;
        auto& p = params[t].v;
        const auto& g = grads[t].v;
        for (std::size_t i = 0; i < p.size(); ++i) {
            v[i] = momentum * v[i] - lr * g[i];
            p[i] += v[i];
        }
    }
}

TrainHistory train(Classifier& model, std::span<const LabeledSample> train_set,
                   std::span<const LabeledSample> val_set, const TrainConfig& cfg) {
    if (cfg.lr < 0.0) throw std::invalid_argument("train: lr must be >= 0");
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
        throw std::invalid_argument("train: momentum must be in [0,1)");
    if (cfg.batch < 1) throw std::invalid_argument("train: batch must be >= 1");
    if (train_set.empty()) throw std::invalid_argument("train: empty training set");
    for (const auto& s : train_set) {
        check_input(model, s.image);
        if (s.label < 0 || s.label >= model.class_count)
            throw std::invalid_argument("train: label " + std::to_string(s.label) +
                                        " out of range for class_count " +
                                        std::to_string(model.class_count));
    }

    Workspace ws;
    ws.bind(model.arch);
    SgdMomentum opt{cfg.lr, cfg.momentum, {}};
    opt.init(model.params);
    std::vector<Tensor> grads = zeros_like(model.params);

    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainHistory hist;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng(mix64(cfg.seed, 0xE90C4 + static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch);
            for (auto& g : grads) std::fill(g.v.begin(), g.v.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t k = start; k < stop; ++k) {
                const auto& s = train_set[order[k]];
                forward_pass(model, s.image.pixels.data(), ws);
                batch_loss += cross_entropy_grad(ws.act.back(), s.label, ws.grad.back());
                backward_pass(model, ws, grads);
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch offset " +
                                         std::to_string(start));
            for (auto& g : grads)
                for (auto& x : g.v) x *= inv;
            opt.step(model.params, grads);
            loss_sum += batch_loss;
        }
        for (const auto& p : model.params)
            for (double x : p.v)
                if (!std::isfinite(x))
                    throw std::runtime_error("train: non-finite parameter after epoch " +
                                             std::to_string(epoch));
        EpochStats st;
        st.train_loss = loss_sum / static_cast<double>(train_set.size());
        st.val_accuracy =
            val_set.empty() ? std::numeric_limits<double>::quiet_NaN() : evaluate(model, val_set);
        hist.epochs.push_back(st);
        ++model.epochs_seen;
    }
    return hist;
}

double evaluate(const Classifier& model, std::span<const LabeledSample> samples) {
    if (samples.empty()) throw std::invalid_argument("evaluate: empty sample set");
    Workspace ws;
    ws.bind(model.arch);
    std::size_t correct = 0;
    for (const auto& s : samples) {
        check_input(model, s.image);
        forward_pass(model, s.image.pixels.data(), ws);
        const auto& scores = ws.act.back();
        int best = 0;
        for (std::size_t i = 1; i < scores.size(); ++i)
            if (scores[i] > scores[best]) best = static_cast<int>(i);
        correct += (best == s.label);
    }
    return static_cast<double>(correct) / static_cast<double>(samples.size());
}

GradCheckResult grad_check(const Classifier& model, const LabeledSample& sample, double step,
                           double kink_margin) {
    if (model.parameter_count() >= 10000)
        throw std::invalid_argument("grad_check: model too large (>= 1e4 parameters)");
    check_input(model, sample.image);

    Workspace ws;
    ws.bind(model.arch);
    forward_pass(model, sample.image.pixels.data(), ws);

    GradCheckResult res;
    for (std::size_t li = 0; li < model.arch.layers.size(); ++li) {
        const auto& l = model.arch.layers[li];
        if (l.kind == LayerKind::ReLU) {
            for (double pre : ws.act[li])
                if (std::abs(pre) < kink_margin) res.skipped_kink = true;
        } else if (l.kind == LayerKind::MaxPool2) {
            const Shape& is = ws.shapes[li];
            const Shape& os = ws.shapes[li + 1];
            const auto& in = ws.act[li];
            for (int c = 0; c < os.ch; ++c)
                for (int y = 0; y < os.h; ++y)
                    for (int x = 0; x < os.w; ++x) {
                        const std::size_t base =
                            (static_cast<std::size_t>(c) * is.h + 2 * y) * is.w + 2 * x;
                        double v[4] = {in[base], in[base + 1], in[base + is.w],
                                       in[base + is.w + 1]};
                        std::sort(v, v + 4);
                        // A routing tie only matters when the maximum is
                        // alive; windows of ReLU-dead zeros are flat.
                        if (v[3] - v[2] < kink_margin && v[3] > kink_margin)
                            res.skipped_kink = true;
                    }
        }
    }
    if (res.skipped_kink) return res;

    std::vector<Tensor> grads = zeros_like(model.params);
    cross_entropy_grad(ws.act.back(), sample.label, ws.grad.back());
    backward_pass(model, ws, grads);

    Classifier probe = model;
    std::vector<double> dummy(model.class_count);
    const auto loss_at = [&]() {
        forward_pass(probe, sample.image.pixels.data(), ws);
        return cross_entropy_grad(ws.act.back(), sample.label, dummy);
    };
    for (std::size_t t = 0; t < model.params.size(); ++t) {
        for (std::size_t i = 0; i < model.params[t].size(); ++i) {
            const double orig = probe.params[t].v[i];
            probe.params[t].v[i] = orig + step;
            const double lp = loss_at();
            probe.params[t].v[i] = orig - step;
            const double lm = loss_at();
            probe.params[t].v[i] = orig;
            const double gn = (lp - lm) / (2.0 * step);
            const double ga = grads[t].v[i];
            const double rel = std::abs(ga - gn) / std::max({1.0, std::abs(ga), std::abs(gn)});
            res.max_rel_error = std::max(res.max_rel_error, rel);
        }
    }
    return res;
}

void save_checkpoint(const std::filesystem::path& path, const Classifier& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
    out.write("FDWM-CKPT", 9);
    const std::uint16_t version = 1;
    unsigned char vb[2] = {static_cast<unsigned char>(version & 0xFF),
                           static_cast<unsigned char>(version >> 8)};
    out.write(reinterpret_cast<const char*>(vb), 2);
    const std::string text = model.arch.to_text();
    std::uint32_t len = static_cast<std::uint32_t>(text.size());
    unsigned char lb[4];
    for (int i = 0; i < 4; ++i) lb[i] = static_cast<unsigned char>((len >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(lb), 4);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    std::uint32_t cc = static_cast<std::uint32_t>(model.class_count);
    for (int i = 0; i < 4; ++i) lb[i] = static_cast<unsigned char>((cc >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(lb), 4);
    for (const auto& p : model.params) {
        TensorFile t;
        t.dims.assign(p.shape.begin(), p.shape.end());
        t.values = p.v;
        write_tensor(out, t);
    }
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path.string());
}

Classifier load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path.string());
    char magic[9];
    in.read(magic, 9);
    if (!in || std::memcmp(magic, "FDWM-CKPT", 9) != 0)
        throw std::runtime_error("load_checkpoint: bad magic in " + path.string());
    unsigned char vb[2];
    in.read(reinterpret_cast<char*>(vb), 2);
    if ((vb[0] | (vb[1] << 8)) != 1)
        throw std::runtime_error("load_checkpoint: unsupported version in " + path.string());
    unsigned char lb[4];
    in.read(reinterpret_cast<char*>(lb), 4);
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(lb[i]) << (8 * i);
    std::string text(len, '\0');
    in.read(text.data(), len);
    in.read(reinterpret_cast<char*>(lb), 4);
    std::uint32_t cc = 0;
    for (int i = 0; i < 4; ++i) cc |= static_cast<std::uint32_t>(lb[i]) << (8 * i);
    if (!in) throw std::runtime_error("load_checkpoint: truncated header in " + path.string());

    Classifier fresh = init(Architecture::from_text(text), static_cast<int>(cc), 0);
    for (auto& p : fresh.params) {
        TensorFile t = read_tensor(in, path.string());
        if (t.element_count() != p.size())
            throw std::runtime_error("load_checkpoint: tensor size mismatch in " + path.string());
        p.v = std::move(t.values);
    }
    return fresh;
}

}  // namespace fdwm
