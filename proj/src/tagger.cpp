#include "logstamp/tagger.hpp"

#include <algorithm>
#include <cmath>

#include "linalg.hpp"
#include "logstamp/errors.hpp"
#include "logstamp/serialize.hpp"

namespace logstamp {

namespace {

constexpr const char* kTaggerMagic = "LSTMP-TAG";
constexpr std::uint16_t kTaggerVersion = 1;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// offsets of the nine gate blocks inside one direction's parameter block
struct GateOffsets {
    std::size_t wz, uz, bz, wr, ur, br, wh, uh, bh;

    GateOffsets(std::size_t base, int d, int h) {
        const std::size_t wd = static_cast<std::size_t>(h) * static_cast<std::size_t>(d);
        const std::size_t uh_sz = static_cast<std::size_t>(h) * static_cast<std::size_t>(h);
        const std::size_t hb = static_cast<std::size_t>(h);
        wz = base;
        uz = wz + wd;
        bz = uz + uh_sz;
        wr = bz + hb;
        ur = wr + wd;
        br = ur + uh_sz;
        wh = br + hb;
        uh = wh + wd;
        bh = uh + uh_sz;
    }
};

struct GruTrace {
    std::vector<double> z, r, hc, h; // each T x hidden
};

// One gated recurrent pass. `reversed` walks the sequence back to front.
void gru_forward(const float* params, const GateOffsets& off, int d, int h,
                 const std::vector<std::vector<float>>& inputs, bool reversed, GruTrace& trace) {
    const int t_len = static_cast<int>(inputs.size());
    const std::size_t hs = static_cast<std::size_t>(h);
    trace.z.assign(static_cast<std::size_t>(t_len) * hs, 0.0);
    trace.r.assign(static_cast<std::size_t>(t_len) * hs, 0.0);
    trace.hc.assign(static_cast<std::size_t>(t_len) * hs, 0.0);
    trace.h.assign(static_cast<std::size_t>(t_len) * hs, 0.0);

    std::vector<double> x(static_cast<std::size_t>(d));
    std::vector<double> h_prev(hs, 0.0);
    std::vector<double> az(hs), ar(hs), ah(hs), rh(hs);

    for (int step = 0; step < t_len; ++step) {
        const int t = reversed ? t_len - 1 - step : step;
        const auto& in = inputs[static_cast<std::size_t>(t)];
        for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = static_cast<double>(in[static_cast<std::size_t>(j)]);

        for (int i = 0; i < h; ++i) az[static_cast<std::size_t>(i)] = static_cast<double>(params[off.bz + static_cast<std::size_t>(i)]);
        detail::matvec_acc(params + off.wz, x.data(), h, d, az.data());
        detail::matvec_acc(params + off.uz, h_prev.data(), h, h, az.data());

        for (int i = 0; i < h; ++i) ar[static_cast<std::size_t>(i)] = static_cast<double>(params[off.br + static_cast<std::size_t>(i)]);
        detail::matvec_acc(params + off.wr, x.data(), h, d, ar.data());
        detail::matvec_acc(params + off.ur, h_prev.data(), h, h, ar.data());

        double* zt = trace.z.data() + static_cast<std::size_t>(t) * hs;
        double* rt = trace.r.data() + static_cast<std::size_t>(t) * hs;
        for (int i = 0; i < h; ++i) {
            zt[i] = sigmoid(az[static_cast<std::size_t>(i)]);
            rt[i] = sigmoid(ar[static_cast<std::size_t>(i)]);
            rh[static_cast<std::size_t>(i)] = rt[i] * h_prev[static_cast<std::size_t>(i)];
        }

        for (int i = 0; i < h; ++i) ah[static_cast<std::size_t>(i)] = static_cast<double>(params[off.bh + static_cast<std::size_t>(i)]);
        detail::matvec_acc(params + off.wh, x.data(), h, d, ah.data());
        detail::matvec_acc(params + off.uh, rh.data(), h, h, ah.data());

        double* hct = trace.hc.data() + static_cast<std::size_t>(t) * hs;
        double* ht = trace.h.data() + static_cast<std::size_t>(t) * hs;
        for (int i = 0; i < h; ++i) {
            hct[i] = std::tanh(ah[static_cast<std::size_t>(i)]);
            ht[i] = (1.0 - zt[i]) * h_prev[static_cast<std::size_t>(i)] + zt[i] * hct[i];
            h_prev[static_cast<std::size_t>(i)] = ht[i];
        }
    }
}

// Backprop through one direction. `dh` holds d(loss)/d(h_t) contributions
// from the output layer and is consumed in reverse traversal order.
void gru_backward(const float* params, const GateOffsets& off, int d, int h,
                  const std::vector<std::vector<float>>& inputs, bool reversed,
                  const GruTrace& trace, const std::vector<double>& dh, double* grad) {
    const int t_len = static_cast<int>(inputs.size());
    const std::size_t hs = static_cast<std::size_t>(h);

    std::vector<double> x(static_cast<std::size_t>(d));
    std::vector<double> carry(hs, 0.0); // d(loss)/d(h_t) flowing from later steps
    std::vector<double> daz(hs), dar(hs), dah(hs), drh(hs), dh_prev(hs), rh(hs), h_prev(hs);

    for (int step = t_len - 1; step >= 0; --step) {
        const int t = reversed ? t_len - 1 - step : step;
        const int t_prev = reversed ? t + 1 : t - 1;
        const bool has_prev = t_prev >= 0 && t_prev < t_len;
        const auto& in = inputs[static_cast<std::size_t>(t)];
        for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = static_cast<double>(in[static_cast<std::size_t>(j)]);

        const double* zt = trace.z.data() + static_cast<std::size_t>(t) * hs;
        const double* rt = trace.r.data() + static_cast<std::size_t>(t) * hs;
        const double* hct = trace.hc.data() + static_cast<std::size_t>(t) * hs;
        const double* hp = has_prev ? trace.h.data() + static_cast<std::size_t>(t_prev) * hs : nullptr;
        for (int i = 0; i < h; ++i) {
            h_prev[static_cast<std::size_t>(i)] = hp ? hp[i] : 0.0;
            rh[static_cast<std::size_t>(i)] = rt[i] * h_prev[static_cast<std::size_t>(i)];
        }

        std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
        for (int i = 0; i < h; ++i) {
            const double dht = dh[static_cast<std::size_t>(t) * hs + static_cast<std::size_t>(i)] + carry[static_cast<std::size_t>(i)];
            const double dz = dht * (hct[i] - h_prev[static_cast<std::size_t>(i)]);
            const double dhc = dht * zt[i];
            dh_prev[static_cast<std::size_t>(i)] += dht * (1.0 - zt[i]);
            daz[static_cast<std::size_t>(i)] = dz * zt[i] * (1.0 - zt[i]);
            dah[static_cast<std::size_t>(i)] = dhc * (1.0 - hct[i] * hct[i]);
        }

        std::fill(drh.begin(), drh.end(), 0.0);
        detail::matvec_t_acc(params + off.uh, dah.data(), h, h, drh.data());
        for (int i = 0; i < h; ++i) {
            const double dr = drh[static_cast<std::size_t>(i)] * h_prev[static_cast<std::size_t>(i)];
            dh_prev[static_cast<std::size_t>(i)] += drh[static_cast<std::size_t>(i)] * rt[i];
            dar[static_cast<std::size_t>(i)] = dr * rt[i] * (1.0 - rt[i]);
        }
        detail::matvec_t_acc(params + off.uz, daz.data(), h, h, dh_prev.data());
        detail::matvec_t_acc(params + off.ur, dar.data(), h, h, dh_prev.data());

        detail::outer_acc(grad + off.wz, daz.data(), x.data(), h, d);
        detail::outer_acc(grad + off.wr, dar.data(), x.data(), h, d);
        detail::outer_acc(grad + off.wh, dah.data(), x.data(), h, d);
        detail::outer_acc(grad + off.uz, daz.data(), h_prev.data(), h, h);
        detail::outer_acc(grad + off.ur, dar.data(), h_prev.data(), h, h);
        detail::outer_acc(grad + off.uh, dah.data(), rh.data(), h, h);
        for (int i = 0; i < h; ++i) {
            grad[off.bz + static_cast<std::size_t>(i)] += daz[static_cast<std::size_t>(i)];
            grad[off.br + static_cast<std::size_t>(i)] += dar[static_cast<std::size_t>(i)];
            grad[off.bh + static_cast<std::size_t>(i)] += dah[static_cast<std::size_t>(i)];
        }
        carry = dh_prev;
    }
}

struct ConvTrace {
    std::vector<double> u; // T x hidden (post-tanh)
};

void conv_forward(const float* params, const TaggerLayout& lay,
                  const std::vector<std::vector<float>>& inputs, ConvTrace& trace) {
    const int d = lay.input_dim;
    const int h = lay.hidden_dim;
    const int t_len = static_cast<int>(inputs.size());
    const std::size_t filter = static_cast<std::size_t>(h) * static_cast<std::size_t>(d);
    const std::size_t bias = lay.conv + 3 * filter;
    trace.u.assign(static_cast<std::size_t>(t_len) * static_cast<std::size_t>(h), 0.0);

    std::vector<double> x(static_cast<std::size_t>(d));
    std::vector<double> a(static_cast<std::size_t>(h));
    for (int t = 0; t < t_len; ++t) {
        for (int i = 0; i < h; ++i) a[static_cast<std::size_t>(i)] = static_cast<double>(params[bias + static_cast<std::size_t>(i)]);
        for (int k = -1; k <= 1; ++k) {
            const int src = t + k;
            if (src < 0 || src >= t_len) continue;
            const auto& in = inputs[static_cast<std::size_t>(src)];
            for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = static_cast<double>(in[static_cast<std::size_t>(j)]);
            detail::matvec_acc(params + lay.conv + static_cast<std::size_t>(k + 1) * filter, x.data(), h, d,
                               a.data());
        }
        double* ut = trace.u.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(h);
        for (int i = 0; i < h; ++i) ut[i] = std::tanh(a[static_cast<std::size_t>(i)]);
    }
}

void check_inputs(const TaggerModel& model, const std::vector<std::vector<float>>& inputs) {
    if (inputs.empty()) throw_error(ErrorKind::Input, "tagger: empty token sequence");
    for (const auto& v : inputs)
        if (static_cast<int>(v.size()) != model.input_dim)
            throw_error(ErrorKind::Consistency, "tagger: input dimension mismatch");
}

// features per position fed to the output layer
void output_features(const TaggerModel& model, const GruTrace& fwd, const GruTrace& bwd,
                     const ConvTrace& conv, int t, std::vector<double>& f) {
    const int h = model.config.hidden_dim;
    const std::size_t hs = static_cast<std::size_t>(h);
    switch (model.architecture) {
    case TaggerArch::RecurrentBidir:
        for (int i = 0; i < h; ++i) {
            f[static_cast<std::size_t>(i)] = fwd.h[static_cast<std::size_t>(t) * hs + static_cast<std::size_t>(i)];
            f[hs + static_cast<std::size_t>(i)] = bwd.h[static_cast<std::size_t>(t) * hs + static_cast<std::size_t>(i)];
        }
        break;
    case TaggerArch::RecurrentUnidir:
        for (int i = 0; i < h; ++i) f[static_cast<std::size_t>(i)] = fwd.h[static_cast<std::size_t>(t) * hs + static_cast<std::size_t>(i)];
        break;
    case TaggerArch::Convolutional:
        for (int i = 0; i < h; ++i) f[static_cast<std::size_t>(i)] = conv.u[static_cast<std::size_t>(t) * hs + static_cast<std::size_t>(i)];
        break;
    }
}

void run_forward(const TaggerModel& model, const std::vector<std::vector<float>>& inputs,
                 GruTrace& fwd, GruTrace& bwd, ConvTrace& conv) {
    const TaggerLayout lay = model.layout();
    const float* p = model.params.data();
    const int d = lay.input_dim;
    const int h = lay.hidden_dim;
    if (model.architecture == TaggerArch::Convolutional) {
        conv_forward(p, lay, inputs, conv);
    } else {
        gru_forward(p, GateOffsets(lay.gates_fwd, d, h), d, h, inputs, false, fwd);
        if (model.architecture == TaggerArch::RecurrentBidir)
            gru_forward(p, GateOffsets(lay.gates_bwd, d, h), d, h, inputs, true, bwd);
    }
}

void init_tagger_params(TaggerModel& model, Rng& rng) {
    const TaggerLayout lay = model.layout();
    model.params.assign(lay.total, 0.0f);
    const double scale_in = 1.0 / std::sqrt(static_cast<double>(lay.input_dim));
    const double scale_h = 1.0 / std::sqrt(static_cast<double>(lay.hidden_dim));
    auto fill = [&](std::size_t off, std::size_t count, double scale) {
        for (std::size_t i = 0; i < count; ++i)
            model.params[off + i] = static_cast<float>(rng.uniform(-scale, scale));
    };
    const std::size_t wd = static_cast<std::size_t>(lay.hidden_dim) * static_cast<std::size_t>(lay.input_dim);
    const std::size_t uu = static_cast<std::size_t>(lay.hidden_dim) * static_cast<std::size_t>(lay.hidden_dim);
    const std::size_t hb = static_cast<std::size_t>(lay.hidden_dim);
    if (model.architecture == TaggerArch::Convolutional) {
        fill(lay.conv, 3 * wd, scale_in);
        // conv bias stays zero
    } else {
        auto fill_gates = [&](std::size_t base) {
            GateOffsets off(base, lay.input_dim, lay.hidden_dim);
            fill(off.wz, wd, scale_in);
            fill(off.uz, uu, scale_h);
            fill(off.wr, wd, scale_in);
            fill(off.ur, uu, scale_h);
            fill(off.wh, wd, scale_in);
            fill(off.uh, uu, scale_h);
            // write-gate bias starts negative so fresh cells retain state
            // across several steps instead of overwriting it every token
            for (std::size_t i = 0; i < hb; ++i) model.params[off.bz + i] = -1.0f;
        };
        fill_gates(lay.gates_fwd);
        if (model.architecture == TaggerArch::RecurrentBidir) fill_gates(lay.gates_bwd);
    }
    fill(lay.out_w, static_cast<std::size_t>(2) * static_cast<std::size_t>(lay.out_features()),
         1.0 / std::sqrt(static_cast<double>(lay.out_features())));
}

} // namespace

const char* tagger_arch_name(TaggerArch arch) {
    switch (arch) {
    case TaggerArch::RecurrentBidir: return "recurrent_bidir";
    case TaggerArch::RecurrentUnidir: return "recurrent_unidir";
    case TaggerArch::Convolutional: return "convolutional";
    }
    return "recurrent_bidir";
}

TaggerArch tagger_arch_from_name(const std::string& name) {
    if (name == "recurrent_bidir" || name == "bidir") return TaggerArch::RecurrentBidir;
    if (name == "recurrent_unidir" || name == "unidir") return TaggerArch::RecurrentUnidir;
    if (name == "convolutional" || name == "conv") return TaggerArch::Convolutional;
    throw_error(ErrorKind::Parameter, "unknown tagger architecture: " + name);
}

void TaggerConfig::validate() const {
    if (hidden_dim < 1 || epochs < 1)
        throw_error(ErrorKind::Parameter, "tagger: hidden_dim and epochs must be >= 1");
    if (!(learning_rate > 0.0))
        throw_error(ErrorKind::Parameter, "tagger: learning_rate must be positive");
}

std::size_t TaggerLayout::gate_block_size() const {
    const std::size_t wd = static_cast<std::size_t>(hidden_dim) * static_cast<std::size_t>(input_dim);
    const std::size_t uu = static_cast<std::size_t>(hidden_dim) * static_cast<std::size_t>(hidden_dim);
    return 3 * (wd + uu + static_cast<std::size_t>(hidden_dim));
}

int TaggerLayout::out_features() const { return bidirectional ? 2 * hidden_dim : hidden_dim; }

TaggerLayout TaggerLayout::make(TaggerArch arch, int input_dim, int hidden_dim) {
    TaggerLayout lay;
    lay.input_dim = input_dim;
    lay.hidden_dim = hidden_dim;
    lay.bidirectional = arch == TaggerArch::RecurrentBidir;
    lay.convolutional = arch == TaggerArch::Convolutional;
    std::size_t off = 0;
    if (lay.convolutional) {
        lay.conv = off;
        off += 3 * static_cast<std::size_t>(hidden_dim) * static_cast<std::size_t>(input_dim) +
               static_cast<std::size_t>(hidden_dim);
    } else {
        lay.gates_fwd = off;
        off += lay.gate_block_size();
        if (lay.bidirectional) {
            lay.gates_bwd = off;
            off += lay.gate_block_size();
        }
    }
    lay.out_w = off;
    off += static_cast<std::size_t>(2) * static_cast<std::size_t>(lay.out_features());
    lay.out_b = off;
    off += 2;
    lay.total = off;
    return lay;
}

TaggerModel make_tagger(const TaggerConfig& config, int input_dim) {
    config.validate();
    if (input_dim < 1) throw_error(ErrorKind::Parameter, "tagger: input_dim must be >= 1");
    TaggerModel model;
    model.architecture = config.architecture;
    model.config = config;
    model.input_dim = input_dim;
    Rng rng(config.seed);
    init_tagger_params(model, rng);
    return model;
}

double tagging_loss(const TaggerModel& model, const std::vector<std::vector<float>>& inputs,
                    const std::vector<WordLabel>& labels) {
    check_inputs(model, inputs);
    if (labels.size() != inputs.size())
        throw_error(ErrorKind::Consistency, "tagger: token/label length mismatch");

    const TaggerLayout lay = model.layout();
    GruTrace fwd, bwd;
    ConvTrace conv;
    run_forward(model, inputs, fwd, bwd, conv);

    const int t_len = static_cast<int>(inputs.size());
    const int nf = lay.out_features();
    std::vector<double> f(static_cast<std::size_t>(nf));
    const float* p = model.params.data();
    double loss = 0.0;
    for (int t = 0; t < t_len; ++t) {
        output_features(model, fwd, bwd, conv, t, f);
        double logits[2] = {static_cast<double>(p[lay.out_b]), static_cast<double>(p[lay.out_b + 1])};
        detail::matvec_acc(p + lay.out_w, f.data(), 2, nf, logits);
        const double m = std::max(logits[0], logits[1]);
        const double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
        const int y = labels[static_cast<std::size_t>(t)] == WordLabel::Template ? 0 : 1;
        loss += lse - logits[y];
    }
    return loss / static_cast<double>(t_len);
}

double tagging_loss_grad(const TaggerModel& model, const std::vector<std::vector<float>>& inputs,
                         const std::vector<WordLabel>& labels, std::vector<double>& grad) {
    check_inputs(model, inputs);
    if (labels.size() != inputs.size())
        throw_error(ErrorKind::Consistency, "tagger: token/label length mismatch");
    if (grad.size() != model.params.size())
        throw_error(ErrorKind::Consistency, "tagger: gradient buffer size mismatch");

    const TaggerLayout lay = model.layout();
    const int d = lay.input_dim;
    const int h = lay.hidden_dim;
    const std::size_t hs = static_cast<std::size_t>(h);
    GruTrace fwd, bwd;
    ConvTrace conv;
    run_forward(model, inputs, fwd, bwd, conv);

    const int t_len = static_cast<int>(inputs.size());
    const int nf = lay.out_features();
    const float* p = model.params.data();
    const double inv_t = 1.0 / static_cast<double>(t_len);

    std::vector<double> f(static_cast<std::size_t>(nf));
    std::vector<double> df(static_cast<std::size_t>(nf));
    std::vector<double> dhf, dhb, du;
    if (model.architecture == TaggerArch::Convolutional) {
        du.assign(static_cast<std::size_t>(t_len) * hs, 0.0);
    } else {
        dhf.assign(static_cast<std::size_t>(t_len) * hs, 0.0);
        if (lay.bidirectional) dhb.assign(static_cast<std::size_t>(t_len) * hs, 0.0);
    }

    double loss = 0.0;
    for (int t = 0; t < t_len; ++t) {
        output_features(model, fwd, bwd, conv, t, f);
        double logits[2] = {static_cast<double>(p[lay.out_b]), static_cast<double>(p[lay.out_b + 1])};
        detail::matvec_acc(p + lay.out_w, f.data(), 2, nf, logits);
        const double m = std::max(logits[0], logits[1]);
        const double e0 = std::exp(logits[0] - m);
        const double e1 = std::exp(logits[1] - m);
        const double sum = e0 + e1;
        const int y = labels[static_cast<std::size_t>(t)] == WordLabel::Template ? 0 : 1;
        loss += (m + std::log(sum) - logits[y]) * inv_t;

        double dlogits[2] = {(e0 / sum) * inv_t, (e1 / sum) * inv_t};
        dlogits[y] -= inv_t;

        detail::outer_acc(grad.data() + lay.out_w, dlogits, f.data(), 2, nf);
        grad[lay.out_b] += dlogits[0];
        grad[lay.out_b + 1] += dlogits[1];
        std::fill(df.begin(), df.end(), 0.0);
        detail::matvec_t_acc(p + lay.out_w, dlogits, 2, nf, df.data());

        switch (model.architecture) {
        case TaggerArch::RecurrentBidir:
            for (int i = 0; i < h; ++i) {
                dhf[static_cast<std::size_t>(t) * hs + static_cast<std::size_t>(i)] += df[static_cast<std::size_t>(i)];
                dhb[static_cast<std::size_t>(t) * hs + static_cast<std::size_t>(i)] += df[hs + static_cast<std::size_t>(i)];
            }
            break;
        case TaggerArch::RecurrentUnidir:
            for (int i = 0; i < h; ++i)
                dhf[static_cast<std::size_t>(t) * hs + static_cast<std::size_t>(i)] += df[static_cast<std::size_t>(i)];
            break;
        case TaggerArch::Convolutional:
            for (int i = 0; i < h; ++i)
                du[static_cast<std::size_t>(t) * hs + static_cast<std::size_t>(i)] += df[static_cast<std::size_t>(i)];
            break;
        }
    }

    if (model.architecture == TaggerArch::Convolutional) {
        const std::size_t filter = static_cast<std::size_t>(h) * static_cast<std::size_t>(d);
        const std::size_t bias = lay.conv + 3 * filter;
        std::vector<double> x(static_cast<std::size_t>(d));
        std::vector<double> dau(hs);
        for (int t = 0; t < t_len; ++t) {
            const double* ut = conv.u.data() + static_cast<std::size_t>(t) * hs;
            for (int i = 0; i < h; ++i)
                dau[static_cast<std::size_t>(i)] = du[static_cast<std::size_t>(t) * hs + static_cast<std::size_t>(i)] * (1.0 - ut[i] * ut[i]);
            for (int i = 0; i < h; ++i) grad[bias + static_cast<std::size_t>(i)] += dau[static_cast<std::size_t>(i)];
            for (int k = -1; k <= 1; ++k) {
                const int src = t + k;
                if (src < 0 || src >= t_len) continue;
                const auto& in = inputs[static_cast<std::size_t>(src)];
                for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = static_cast<double>(in[static_cast<std::size_t>(j)]);
                detail::outer_acc(grad.data() + lay.conv + static_cast<std::size_t>(k + 1) * filter,
                                  dau.data(), x.data(), h, d);
            }
        }
    } else {
        gru_backward(p, GateOffsets(lay.gates_fwd, d, h), d, h, inputs, false, fwd, dhf,
                     grad.data());
        if (lay.bidirectional)
            gru_backward(p, GateOffsets(lay.gates_bwd, d, h), d, h, inputs, true, bwd, dhb,
                         grad.data());
    }
    return loss;
}

std::vector<WordLabel> tag_embedded(const TaggerModel& model,
                                    const std::vector<std::vector<float>>& inputs) {
    check_inputs(model, inputs);
    const TaggerLayout lay = model.layout();
    GruTrace fwd, bwd;
    ConvTrace conv;
    run_forward(model, inputs, fwd, bwd, conv);

    const int nf = lay.out_features();
    const float* p = model.params.data();
    std::vector<double> f(static_cast<std::size_t>(nf));
    std::vector<WordLabel> labels;
    labels.reserve(inputs.size());
    for (int t = 0; t < static_cast<int>(inputs.size()); ++t) {
        output_features(model, fwd, bwd, conv, t, f);
        double logits[2] = {static_cast<double>(p[lay.out_b]), static_cast<double>(p[lay.out_b + 1])};
        detail::matvec_acc(p + lay.out_w, f.data(), 2, nf, logits);
        // ties break toward TEMPLATE
        labels.push_back(logits[0] >= logits[1] ? WordLabel::Template : WordLabel::Variable);
    }
    return labels;
}

TaggerModel train_tagger(const std::vector<LabeledSentence>& labeled, const EncoderModel& encoder,
                         const TaggerConfig& config) {
    config.validate();
    if (labeled.empty()) throw_error(ErrorKind::Input, "train_tagger: empty training set");
    for (const auto& ls : labeled) {
        if (ls.tokens.empty()) throw_error(ErrorKind::Input, "train_tagger: empty sentence");
        if (ls.tokens.size() != ls.labels.size())
            throw_error(ErrorKind::Consistency, "train_tagger: token/label length mismatch");
    }

    TaggerModel model = make_tagger(config, encoder.config.embed_dim);

    // encoder is frozen, so embeddings are computed once
    std::vector<std::vector<std::vector<float>>> inputs;
    inputs.reserve(labeled.size());
    for (const auto& ls : labeled) inputs.push_back(embed_tokens(encoder, ls.tokens));

    Rng rng(derive_seed(config.seed, 0x7461676765725f31ULL));
    std::vector<int> order(labeled.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    std::vector<double> grad(model.params.size(), 0.0);
    const double lr = config.learning_rate;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        std::int64_t token_total = 0;
        for (int idx : order) {
            const auto& ls = labeled[static_cast<std::size_t>(idx)];
            std::fill(grad.begin(), grad.end(), 0.0);
            const double loss =
                tagging_loss_grad(model, inputs[static_cast<std::size_t>(idx)], ls.labels, grad);
            loss_sum += loss * static_cast<double>(ls.tokens.size());
            token_total += static_cast<std::int64_t>(ls.tokens.size());
            for (std::size_t i = 0; i < model.params.size(); ++i)
                if (grad[i] != 0.0)
                    model.params[i] = static_cast<float>(static_cast<double>(model.params[i]) - lr * grad[i]);
        }
        model.meta.epoch_losses.push_back(
            token_total > 0 ? loss_sum / static_cast<double>(token_total) : 0.0);
    }
    model.meta.final_loss =
        model.meta.epoch_losses.empty() ? 0.0 : model.meta.epoch_losses.back();

    std::int64_t correct = 0, total = 0;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        const auto predicted = tag_embedded(model, inputs[i]);
        for (std::size_t t = 0; t < predicted.size(); ++t) {
            if (predicted[t] == labeled[i].labels[t]) ++correct;
            ++total;
        }
    }
    model.meta.train_accuracy =
        total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    return model;
}

std::vector<WordLabel> tag(const TaggerModel& model, const EncoderModel& encoder,
                           const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw_error(ErrorKind::Input, "tag: empty token list");
    return tag_embedded(model, embed_tokens(encoder, tokens));
}

double token_accuracy(const TaggerModel& model, const EncoderModel& encoder,
                      const std::vector<LabeledSentence>& labeled) {
    if (labeled.empty()) throw_error(ErrorKind::Input, "token_accuracy: empty input");
    std::int64_t correct = 0, total = 0;
    for (const auto& ls : labeled) {
        const auto predicted = tag(model, encoder, ls.tokens);
        if (predicted.size() != ls.labels.size())
            throw_error(ErrorKind::Consistency, "token_accuracy: label length mismatch");
        for (std::size_t t = 0; t < predicted.size(); ++t) {
            if (predicted[t] == ls.labels[t]) ++correct;
            ++total;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

void save_tagger(const TaggerModel& model, const std::string& path) {
    BinaryWriter w;
    w.put_u8(static_cast<std::uint8_t>(model.architecture));
    w.put_i32(model.config.hidden_dim);
    w.put_i32(model.config.epochs);
    w.put_f64(model.config.learning_rate);
    w.put_u64(model.config.seed);
    w.put_i32(model.input_dim);
    w.put_f32_array(model.params);
    w.put_f64_array(model.meta.epoch_losses);
    w.put_f64(model.meta.final_loss);
    w.put_f64(model.meta.train_accuracy);
    w.write_file(path, kTaggerMagic, kTaggerVersion);
}

TaggerModel load_tagger(const std::string& path) {
    BinaryReader r(path, kTaggerMagic, kTaggerVersion);
    TaggerModel model;
    const std::uint8_t arch = r.get_u8();
    if (arch > 2) throw_error(ErrorKind::Format, "unknown tagger architecture tag in " + path);
    model.architecture = static_cast<TaggerArch>(arch);
    model.config.architecture = model.architecture;
    model.config.hidden_dim = r.get_i32();
    model.config.epochs = r.get_i32();
    model.config.learning_rate = r.get_f64();
    model.config.seed = r.get_u64();
    model.input_dim = r.get_i32();
    model.params = r.get_f32_array();
    model.meta.epoch_losses = r.get_f64_array();
    model.meta.final_loss = r.get_f64();
    model.meta.train_accuracy = r.get_f64();
    if (model.params.size() != model.layout().total)
        throw_error(ErrorKind::Corruption, "tagger parameter count mismatch in " + path);
    return model;
}

} // namespace logstamp
