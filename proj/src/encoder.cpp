#include "logstamp/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "linalg.hpp"
#include "logstamp/errors.hpp"
#include "logstamp/serialize.hpp"

namespace logstamp {

namespace {

constexpr const char* kEncoderMagic = "LSTMP-ENC";
constexpr std::uint16_t kEncoderVersion = 1;

struct ForwardTrace {
    // all T x dim, flattened row-major
    std::vector<double> emb; // T x d, input embeddings (after masking)
    std::vector<double> hf;  // T x h
    std::vector<double> hb;  // T x h
    std::vector<double> ctx; // T x d
};

void encoder_forward(const EncoderModel& model, const std::vector<int>& input_ids,
                     ForwardTrace& trace) {
    const EncoderLayout lay = model.layout();
    const int d = lay.embed_dim;
    const int h = lay.hidden_dim;
    const int t_len = static_cast<int>(input_ids.size());
    const float* p = model.params.data();

    trace.emb.assign(static_cast<std::size_t>(t_len) * d, 0.0);
    trace.hf.assign(static_cast<std::size_t>(t_len) * h, 0.0);
    trace.hb.assign(static_cast<std::size_t>(t_len) * h, 0.0);
    trace.ctx.assign(static_cast<std::size_t>(t_len) * d, 0.0);

    for (int t = 0; t < t_len; ++t) {
        const float* row = p + lay.embeddings +
                           static_cast<std::size_t>(input_ids[static_cast<std::size_t>(t)]) * d;
        double* e = trace.emb.data() + static_cast<std::size_t>(t) * d;
        for (int j = 0; j < d; ++j) e[j] = static_cast<double>(row[j]);
    }

    std::vector<double> pre(static_cast<std::size_t>(h));
    // forward direction over the prefix
    for (int t = 0; t < t_len; ++t) {
        const double* e = trace.emb.data() + static_cast<std::size_t>(t) * d;
        double* hft = trace.hf.data() + static_cast<std::size_t>(t) * h;
        for (int i = 0; i < h; ++i) pre[static_cast<std::size_t>(i)] = static_cast<double>(p[lay.b_fwd + static_cast<std::size_t>(i)]);
        detail::matvec_acc(p + lay.w_fwd, e, h, d, pre.data());
        if (t > 0)
            detail::matvec_acc(p + lay.u_fwd, trace.hf.data() + static_cast<std::size_t>(t - 1) * h, h, h,
                               pre.data());
        for (int i = 0; i < h; ++i) hft[i] = std::tanh(pre[static_cast<std::size_t>(i)]);
    }
    // backward direction over the suffix
    for (int t = t_len - 1; t >= 0; --t) {
        const double* e = trace.emb.data() + static_cast<std::size_t>(t) * d;
        double* hbt = trace.hb.data() + static_cast<std::size_t>(t) * h;
        for (int i = 0; i < h; ++i) pre[static_cast<std::size_t>(i)] = static_cast<double>(p[lay.b_bwd + static_cast<std::size_t>(i)]);
        detail::matvec_acc(p + lay.w_bwd, e, h, d, pre.data());
        if (t + 1 < t_len)
            detail::matvec_acc(p + lay.u_bwd, trace.hb.data() + static_cast<std::size_t>(t + 1) * h, h, h,
                               pre.data());
        for (int i = 0; i < h; ++i) hbt[i] = std::tanh(pre[static_cast<std::size_t>(i)]);
    }
    // projection of [hf; hb] to embed_dim
    std::vector<double> cat(static_cast<std::size_t>(2) * h);
    for (int t = 0; t < t_len; ++t) {
        std::memcpy(cat.data(), trace.hf.data() + static_cast<std::size_t>(t) * h,
                    static_cast<std::size_t>(h) * sizeof(double));
        std::memcpy(cat.data() + h, trace.hb.data() + static_cast<std::size_t>(t) * h,
                    static_cast<std::size_t>(h) * sizeof(double));
        double* c = trace.ctx.data() + static_cast<std::size_t>(t) * d;
        for (int j = 0; j < d; ++j) c[j] = static_cast<double>(p[lay.proj_bias + static_cast<std::size_t>(j)]);
        detail::matvec_acc(p + lay.proj, cat.data(), d, 2 * h, c);
    }
}

std::vector<int> apply_mask(const std::vector<int>& ids, const std::vector<int>& mask_positions,
                            int mask_id) {
    std::vector<int> masked = ids;
    for (int pos : mask_positions) {
        if (pos < 0 || pos >= static_cast<int>(ids.size()))
            throw_error(ErrorKind::Consistency, "mask position out of range");
        masked[static_cast<std::size_t>(pos)] = mask_id;
    }
    return masked;
}

// log-softmax of the tied logits E * c at one position; returns loss for
// `target` and optionally the softmax probabilities.
double scored_loss(const EncoderModel& model, const double* ctx, int target,
                   std::vector<double>* probs_out) {
    const EncoderLayout lay = model.layout();
    const int d = lay.embed_dim;
    const int v = lay.vocab_size;
    const float* emb = model.params.data() + lay.embeddings;

    std::vector<double> logits(static_cast<std::size_t>(v));
    for (int i = 0; i < v; ++i)
        logits[static_cast<std::size_t>(i)] =
            detail::dot_fd(emb + static_cast<std::size_t>(i) * d, ctx, d);
    double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& z : logits) {
        z = std::exp(z - max_logit);
        sum += z;
    }
    for (double& z : logits) z /= sum;
    double p_target = logits[static_cast<std::size_t>(target)];
    if (probs_out) *probs_out = std::move(logits);
    return -std::log(std::max(p_target, 1e-300));
}

void init_params(EncoderModel& model, Rng& rng) {
    const EncoderLayout lay = model.layout();
    model.params.assign(lay.total, 0.0f);
    auto fill = [&](std::size_t off, std::size_t count, double scale) {
        for (std::size_t i = 0; i < count; ++i)
            model.params[off + i] = static_cast<float>(rng.uniform(-scale, scale));
    };
    const int d = lay.embed_dim;
    const int h = lay.hidden_dim;
    const std::size_t v = static_cast<std::size_t>(lay.vocab_size);
    fill(lay.embeddings, v * static_cast<std::size_t>(d), 0.1);
    fill(lay.w_fwd, static_cast<std::size_t>(h) * d, 1.0 / std::sqrt(static_cast<double>(d)));
    fill(lay.u_fwd, static_cast<std::size_t>(h) * h, 1.0 / std::sqrt(static_cast<double>(h)));
    fill(lay.w_bwd, static_cast<std::size_t>(h) * d, 1.0 / std::sqrt(static_cast<double>(d)));
    fill(lay.u_bwd, static_cast<std::size_t>(h) * h, 1.0 / std::sqrt(static_cast<double>(h)));
    fill(lay.proj, static_cast<std::size_t>(d) * 2 * h, 1.0 / std::sqrt(2.0 * h));
    // biases start at zero
}

} // namespace

void EncoderConfig::validate() const {
    if (embed_dim < 1 || hidden_dim < 1 || epochs < 1)
        throw_error(ErrorKind::Parameter, "encoder: embed_dim, hidden_dim, epochs must be >= 1");
    if (!(learning_rate > 0.0))
        throw_error(ErrorKind::Parameter, "encoder: learning_rate must be positive");
    if (!(mask_probability > 0.0) || !(mask_probability < 1.0))
        throw_error(ErrorKind::Parameter, "encoder: mask_probability must be in (0,1)");
    if (max_vocab < 1) throw_error(ErrorKind::Parameter, "encoder: max_vocab must be >= 1");
    if (min_token_count < 1)
        throw_error(ErrorKind::Parameter, "encoder: min_token_count must be >= 1");
    if (max_line_visits < 0)
        throw_error(ErrorKind::Parameter, "encoder: max_line_visits must be >= 0");
}

Vocabulary::Vocabulary(std::vector<std::string> real_tokens) : tokens_(std::move(real_tokens)) {
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], static_cast<int>(i));
}

int Vocabulary::id_of(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? unknown_id() : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
    static const std::string kUnknown = "<unk>";
    static const std::string kMask = "<mask>";
    if (id == unknown_id()) return kUnknown;
    if (id == mask_id()) return kMask;
    return tokens_.at(static_cast<std::size_t>(id));
}

EncoderLayout EncoderLayout::make(int vocab_size, int embed_dim, int hidden_dim) {
    EncoderLayout lay;
    lay.vocab_size = vocab_size;
    lay.embed_dim = embed_dim;
    lay.hidden_dim = hidden_dim;
    const std::size_t v = static_cast<std::size_t>(vocab_size);
    const std::size_t d = static_cast<std::size_t>(embed_dim);
    const std::size_t h = static_cast<std::size_t>(hidden_dim);
    std::size_t off = 0;
    lay.embeddings = off; off += v * d;
    lay.w_fwd = off; off += h * d;
    lay.u_fwd = off; off += h * h;
    lay.b_fwd = off; off += h;
    lay.w_bwd = off; off += h * d;
    lay.u_bwd = off; off += h * h;
    lay.b_bwd = off; off += h;
    lay.proj = off; off += d * 2 * h;
    lay.proj_bias = off; off += d;
    lay.total = off;
    return lay;
}

Vocabulary build_vocab(const Dataset& corpus, const EncoderConfig& config) {
    config.validate();
    if (corpus.empty()) throw_error(ErrorKind::Input, "build_vocab: corpus is empty");

    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& rec : corpus.records)
        for (const auto& tok : rec.tokens) counts[tok]++;

    std::vector<std::pair<std::string, std::int64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::vector<std::string> kept;
    for (const auto& [tok, count] : ranked) {
        if (count < config.min_token_count) break;
        if (static_cast<int>(kept.size()) >= config.max_vocab) break;
        kept.push_back(tok);
    }
    return Vocabulary(std::move(kept));
}

std::vector<int> token_ids(const Vocabulary& vocab, const std::vector<std::string>& tokens) {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& tok : tokens) ids.push_back(vocab.id_of(tok));
    return ids;
}

std::vector<int> sample_mask_positions(Rng& rng, std::size_t length, double p) {
    std::vector<int> positions;
    for (std::size_t i = 0; i < length; ++i)
        if (rng.bernoulli(p)) positions.push_back(static_cast<int>(i));
    return positions;
}

double masked_prediction_loss(const EncoderModel& model, const std::vector<int>& ids,
                              const std::vector<int>& mask_positions) {
    if (ids.empty()) throw_error(ErrorKind::Input, "masked_prediction_loss: empty token list");
    if (mask_positions.empty()) return 0.0;
    ForwardTrace trace;
    encoder_forward(model, apply_mask(ids, mask_positions, model.vocab.mask_id()), trace);
    const int d = model.config.embed_dim;
    double loss = 0.0;
    for (int pos : mask_positions)
        loss += scored_loss(model, trace.ctx.data() + static_cast<std::size_t>(pos) * d,
                            ids[static_cast<std::size_t>(pos)], nullptr);
    return loss / static_cast<double>(mask_positions.size());
}

double masked_prediction_loss_grad(const EncoderModel& model, const std::vector<int>& ids,
                                   const std::vector<int>& mask_positions,
                                   std::vector<double>& grad) {
    if (ids.empty()) throw_error(ErrorKind::Input, "masked_prediction_loss_grad: empty token list");
    if (grad.size() != model.params.size())
        throw_error(ErrorKind::Consistency, "gradient buffer size mismatch");
    if (mask_positions.empty()) return 0.0;

    const EncoderLayout lay = model.layout();
    const int d = lay.embed_dim;
    const int h = lay.hidden_dim;
    const float* p = model.params.data();

    const std::vector<int> input_ids = apply_mask(ids, mask_positions, model.vocab.mask_id());
    const int t_len = static_cast<int>(ids.size());

    ForwardTrace trace;
    encoder_forward(model, input_ids, trace);

    const double inv_m = 1.0 / static_cast<double>(mask_positions.size());
    double loss = 0.0;

    // d(loss)/d(ctx_t) for every position, plus the tied-embedding output grads
    std::vector<double> dctx(static_cast<std::size_t>(t_len) * d, 0.0);
    std::vector<double> probs;
    for (int pos : mask_positions) {
        const double* c = trace.ctx.data() + static_cast<std::size_t>(pos) * d;
        const int target = ids[static_cast<std::size_t>(pos)];
        loss += scored_loss(model, c, target, &probs) * inv_m;
        double* dc = dctx.data() + static_cast<std::size_t>(pos) * d;
        const float* emb = p + lay.embeddings;
        for (int v = 0; v < lay.vocab_size; ++v) {
            double dz = probs[static_cast<std::size_t>(v)] * inv_m;
            if (v == target) dz -= inv_m;
            if (dz == 0.0) continue;
            const float* ev = emb + static_cast<std::size_t>(v) * d;
            double* de = grad.data() + lay.embeddings + static_cast<std::size_t>(v) * d;
            for (int j = 0; j < d; ++j) {
                dc[j] += dz * static_cast<double>(ev[j]);
                de[j] += dz * c[j];
            }
        }
    }

    // projection backward: ctx_t = proj [hf;hb] + proj_bias
    std::vector<double> dhf(static_cast<std::size_t>(t_len) * h, 0.0);
    std::vector<double> dhb(static_cast<std::size_t>(t_len) * h, 0.0);
    std::vector<double> cat(static_cast<std::size_t>(2) * h);
    std::vector<double> dcat(static_cast<std::size_t>(2) * h);
    for (int t = 0; t < t_len; ++t) {
        const double* dc = dctx.data() + static_cast<std::size_t>(t) * d;
        bool all_zero = true;
        for (int j = 0; j < d; ++j)
            if (dc[j] != 0.0) { all_zero = false; break; }
        if (all_zero) continue;
        std::memcpy(cat.data(), trace.hf.data() + static_cast<std::size_t>(t) * h,
                    static_cast<std::size_t>(h) * sizeof(double));
        std::memcpy(cat.data() + h, trace.hb.data() + static_cast<std::size_t>(t) * h,
                    static_cast<std::size_t>(h) * sizeof(double));
        detail::outer_acc(grad.data() + lay.proj, dc, cat.data(), d, 2 * h);
        for (int j = 0; j < d; ++j) grad[lay.proj_bias + static_cast<std::size_t>(j)] += dc[j];
        std::fill(dcat.begin(), dcat.end(), 0.0);
        detail::matvec_t_acc(p + lay.proj, dc, d, 2 * h, dcat.data());
        double* dhft = dhf.data() + static_cast<std::size_t>(t) * h;
        double* dhbt = dhb.data() + static_cast<std::size_t>(t) * h;
        for (int i = 0; i < h; ++i) {
            dhft[i] += dcat[static_cast<std::size_t>(i)];
            dhbt[i] += dcat[static_cast<std::size_t>(h + i)];
        }
    }

    std::vector<double> demb(static_cast<std::size_t>(t_len) * d, 0.0);
    std::vector<double> da(static_cast<std::size_t>(h));

    // forward-direction BPTT, t = T-1 .. 0
    for (int t = t_len - 1; t >= 0; --t) {
        const double* hft = trace.hf.data() + static_cast<std::size_t>(t) * h;
        double* dhft = dhf.data() + static_cast<std::size_t>(t) * h;
        for (int i = 0; i < h; ++i) da[static_cast<std::size_t>(i)] = dhft[i] * (1.0 - hft[i] * hft[i]);
        detail::outer_acc(grad.data() + lay.w_fwd, da.data(),
                          trace.emb.data() + static_cast<std::size_t>(t) * d, h, d);
        if (t > 0) {
            detail::outer_acc(grad.data() + lay.u_fwd, da.data(),
                              trace.hf.data() + static_cast<std::size_t>(t - 1) * h, h, h);
            detail::matvec_t_acc(p + lay.u_fwd, da.data(), h, h,
                                 dhf.data() + static_cast<std::size_t>(t - 1) * h);
        }
        for (int i = 0; i < h; ++i) grad[lay.b_fwd + static_cast<std::size_t>(i)] += da[static_cast<std::size_t>(i)];
        detail::matvec_t_acc(p + lay.w_fwd, da.data(), h, d,
                             demb.data() + static_cast<std::size_t>(t) * d);
    }

    // backward-direction BPTT, t = 0 .. T-1 (hb_t feeds hb_{t-1})
    for (int t = 0; t < t_len; ++t) {
        const double* hbt = trace.hb.data() + static_cast<std::size_t>(t) * h;
        double* dhbt = dhb.data() + static_cast<std::size_t>(t) * h;
        for (int i = 0; i < h; ++i) da[static_cast<std::size_t>(i)] = dhbt[i] * (1.0 - hbt[i] * hbt[i]);
        detail::outer_acc(grad.data() + lay.w_bwd, da.data(),
                          trace.emb.data() + static_cast<std::size_t>(t) * d, h, d);
        if (t + 1 < t_len) {
            detail::outer_acc(grad.data() + lay.u_bwd, da.data(),
                              trace.hb.data() + static_cast<std::size_t>(t + 1) * h, h, h);
            detail::matvec_t_acc(p + lay.u_bwd, da.data(), h, h,
                                 dhb.data() + static_cast<std::size_t>(t + 1) * h);
        }
        for (int i = 0; i < h; ++i) grad[lay.b_bwd + static_cast<std::size_t>(i)] += da[static_cast<std::size_t>(i)];
        detail::matvec_t_acc(p + lay.w_bwd, da.data(), h, d,
                             demb.data() + static_cast<std::size_t>(t) * d);
    }

    // input-embedding grads (masked positions train the MASK row)
    for (int t = 0; t < t_len; ++t) {
        double* de = grad.data() + lay.embeddings +
                     static_cast<std::size_t>(input_ids[static_cast<std::size_t>(t)]) * d;
        const double* src = demb.data() + static_cast<std::size_t>(t) * d;
        for (int j = 0; j < d; ++j) de[j] += src[j];
    }

    return loss;
}

EncoderModel train_encoder(const Dataset& corpus, const EncoderConfig& config) {
    config.validate();
    if (corpus.empty()) throw_error(ErrorKind::Input, "train_encoder: corpus is empty");

    EncoderModel model;
    model.config = config;
    model.vocab = build_vocab(corpus, config);

    Rng rng(config.seed);
    init_params(model, rng);

    std::vector<std::vector<int>> lines;
    lines.reserve(corpus.size());
    for (const auto& rec : corpus.records) lines.push_back(token_ids(model.vocab, rec.tokens));

    std::vector<int> order(lines.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    std::vector<double> grad(model.params.size(), 0.0);
    const double lr = config.learning_rate;
    std::int64_t visits_left =
        config.max_line_visits > 0 ? config.max_line_visits : -1; // -1: no cap

    for (int epoch = 0; epoch < config.epochs && visits_left != 0; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        std::int64_t masked_total = 0;
        for (int idx : order) {
            if (visits_left == 0) break;
            if (visits_left > 0) --visits_left;
            const auto& ids = lines[static_cast<std::size_t>(idx)];
            std::vector<int> masks =
                sample_mask_positions(rng, ids.size(), config.mask_probability);
            if (masks.empty()) continue;
            std::fill(grad.begin(), grad.end(), 0.0);
            double line_loss = masked_prediction_loss_grad(model, ids, masks, grad);
            loss_sum += line_loss * static_cast<double>(masks.size());
            masked_total += static_cast<std::int64_t>(masks.size());
            for (std::size_t i = 0; i < model.params.size(); ++i) {
                if (grad[i] != 0.0)
                    model.params[i] = static_cast<float>(static_cast<double>(model.params[i]) - lr * grad[i]);
            }
        }
        double epoch_loss = masked_total > 0 ? loss_sum / static_cast<double>(masked_total) : 0.0;
        model.meta.epoch_losses.push_back(epoch_loss);
    }
    model.meta.final_loss =
        model.meta.epoch_losses.empty() ? 0.0 : model.meta.epoch_losses.back();
    return model;
}

std::vector<std::vector<float>> embed_tokens(const EncoderModel& model,
                                             const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw_error(ErrorKind::Input, "embed_tokens: empty token list");
    ForwardTrace trace;
    encoder_forward(model, token_ids(model.vocab, tokens), trace);
    const int d = model.config.embed_dim;
    std::vector<std::vector<float>> out(tokens.size(), std::vector<float>(static_cast<std::size_t>(d)));
    for (std::size_t t = 0; t < tokens.size(); ++t)
        for (int j = 0; j < d; ++j)
            out[t][static_cast<std::size_t>(j)] =
                static_cast<float>(trace.ctx[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)]);
    return out;
}

SentenceEmbedding embed_sentence(const EncoderModel& model,
                                 const std::vector<std::string>& tokens, int source_id) {
    if (tokens.empty()) throw_error(ErrorKind::Input, "embed_sentence: empty token list");
    const auto vectors = embed_tokens(model, tokens);
    const int d = model.config.embed_dim;
    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    for (const auto& v : vectors)
        for (int j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] += static_cast<double>(v[static_cast<std::size_t>(j)]);
    double norm2 = 0.0;
    for (int j = 0; j < d; ++j) {
        mean[static_cast<std::size_t>(j)] /= static_cast<double>(vectors.size());
        norm2 += mean[static_cast<std::size_t>(j)] * mean[static_cast<std::size_t>(j)];
    }
    SentenceEmbedding emb;
    emb.source_id = source_id;
    emb.vector.resize(static_cast<std::size_t>(d));
    if (norm2 == 0.0) {
        emb.vector[0] = 1.0f; // degenerate all-zero pooling, pin to a fixed axis
        return emb;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (int j = 0; j < d; ++j)
        emb.vector[static_cast<std::size_t>(j)] = static_cast<float>(mean[static_cast<std::size_t>(j)] * inv);
    return emb;
}

void save_encoder(const EncoderModel& model, const std::string& path) {
    BinaryWriter w;
    w.put_i32(model.config.embed_dim);
    w.put_i32(model.config.hidden_dim);
    w.put_i32(model.config.epochs);
    w.put_f64(model.config.learning_rate);
    w.put_f64(model.config.mask_probability);
    w.put_i32(model.config.max_vocab);
    w.put_i32(model.config.min_token_count);
    w.put_u64(static_cast<std::uint64_t>(model.config.max_line_visits));
    w.put_u64(model.config.seed);
    w.put_u32(static_cast<std::uint32_t>(model.vocab.real_tokens().size()));
    for (const auto& tok : model.vocab.real_tokens()) w.put_string(tok);
    w.put_f32_array(model.params);
    w.put_f64_array(model.meta.epoch_losses);
    w.put_f64(model.meta.final_loss);
    w.write_file(path, kEncoderMagic, kEncoderVersion);
}

EncoderModel load_encoder(const std::string& path) {
    BinaryReader r(path, kEncoderMagic, kEncoderVersion);
    EncoderModel model;
    model.config.embed_dim = r.get_i32();
    model.config.hidden_dim = r.get_i32();
    model.config.epochs = r.get_i32();
    model.config.learning_rate = r.get_f64();
    model.config.mask_probability = r.get_f64();
    model.config.max_vocab = r.get_i32();
    model.config.min_token_count = r.get_i32();
    model.config.max_line_visits = static_cast<std::int64_t>(r.get_u64());
    model.config.seed = r.get_u64();
    std::uint32_t vocab_count = r.get_u32();
    std::vector<std::string> tokens(vocab_count);
    for (auto& tok : tokens) tok = r.get_string();
    model.vocab = Vocabulary(std::move(tokens));
    model.params = r.get_f32_array();
    model.meta.epoch_losses = r.get_f64_array();
    model.meta.final_loss = r.get_f64();
    if (model.params.size() != model.layout().total)
        throw_error(ErrorKind::Corruption, "encoder parameter count mismatch in " + path);
    return model;
}

double masked_prediction_accuracy(const EncoderModel& model, const Dataset& corpus) {
    if (corpus.empty()) throw_error(ErrorKind::Input, "masked_prediction_accuracy: empty corpus");
    const EncoderLayout lay = model.layout();
    const int d = lay.embed_dim;
    const float* emb = model.params.data() + lay.embeddings;
    const int real_vocab = static_cast<int>(model.vocab.real_tokens().size());

    std::int64_t correct = 0, total = 0;
    ForwardTrace trace;
    for (const auto& rec : corpus.records) {
        const std::vector<int> ids = token_ids(model.vocab, rec.tokens);
        for (std::size_t pos = 0; pos < ids.size(); ++pos) {
            std::vector<int> input = ids;
            input[pos] = model.vocab.mask_id();
            encoder_forward(model, input, trace);
            const double* c = trace.ctx.data() + pos * static_cast<std::size_t>(d);
            int best = 0;
            double best_score = -1e300;
            for (int v = 0; v < real_vocab; ++v) {
                double s = detail::dot_fd(emb + static_cast<std::size_t>(v) * d, c, d);
                if (s > best_score) {
                    best_score = s;
                    best = v;
                }
            }
            if (best == ids[pos]) ++correct;
            ++total;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

} // namespace logstamp
