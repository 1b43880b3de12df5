#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "logstamp/corpus.hpp"
#include "logstamp/rng.hpp"

namespace logstamp {

struct EncoderConfig {
    int embed_dim = 64;
    int hidden_dim = 128;
    int epochs = 5;
    double learning_rate = 0.01;
    double mask_probability = 0.15;
    int max_vocab = 20000;
    int min_token_count = 1;
    // when positive, training stops after this many line visits (the last
    // pass may be partial); keeps the effective schedule comparable between
    // a 200-line split and a 2000-line corpus
    std::int64_t max_line_visits = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Token ids are frequency-ranked; two reserved ids (UNKNOWN, MASK) sit after
// the real tokens.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> real_tokens);

    int size() const { return static_cast<int>(tokens_.size()) + 2; }
    int unknown_id() const { return static_cast<int>(tokens_.size()); }
    int mask_id() const { return static_cast<int>(tokens_.size()) + 1; }

    // id for a token, falling back to UNKNOWN
    int id_of(const std::string& token) const;
    const std::string& token_of(int id) const;
    bool contains(const std::string& token) const { return index_.count(token) > 0; }

    const std::vector<std::string>& real_tokens() const { return tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

// Offsets of the named parameter blocks inside the flat parameter vector.
struct EncoderLayout {
    int vocab_size = 0;
    int embed_dim = 0;
    int hidden_dim = 0;

    std::size_t embeddings = 0; // vocab_size x embed_dim
    std::size_t w_fwd = 0;      // hidden x embed
    std::size_t u_fwd = 0;      // hidden x hidden
    std::size_t b_fwd = 0;      // hidden
    std::size_t w_bwd = 0;
    std::size_t u_bwd = 0;
    std::size_t b_bwd = 0;
    std::size_t proj = 0;      // embed x 2*hidden
    std::size_t proj_bias = 0; // embed
    std::size_t total = 0;

    static EncoderLayout make(int vocab_size, int embed_dim, int hidden_dim);
};

struct TrainingMeta {
    std::vector<double> epoch_losses;
    double final_loss = 0.0;
};

// Bidirectional recurrent token encoder trained on the raw corpus with a
// masked-token objective. The prediction head is tied to the embedding
// table: a masked position is scored against every token embedding.
struct EncoderModel {
    EncoderConfig config;
    Vocabulary vocab;
    std::vector<float> params;
    TrainingMeta meta;

    EncoderLayout layout() const {
        return EncoderLayout::make(vocab.size(), config.embed_dim, config.hidden_dim);
    }
};

struct SentenceEmbedding {
    std::vector<float> vector;
    int source_id = -1;
};

Vocabulary build_vocab(const Dataset& corpus, const EncoderConfig& config);

EncoderModel train_encoder(const Dataset& corpus, const EncoderConfig& config);

// One embed_dim vector per token; position i sees the whole sequence through
// the forward and backward recurrences.
std::vector<std::vector<float>> embed_tokens(const EncoderModel& model,
                                             const std::vector<std::string>& tokens);

// Mean of the contextual token vectors, L2-normalized.
SentenceEmbedding embed_sentence(const EncoderModel& model,
                                 const std::vector<std::string>& tokens, int source_id = -1);

void save_encoder(const EncoderModel& model, const std::string& path);
EncoderModel load_encoder(const std::string& path);

// --- training internals, exposed for diagnostics and gradient verification ---

std::vector<int> token_ids(const Vocabulary& vocab, const std::vector<std::string>& tokens);

// Bernoulli(p) per position.
std::vector<int> sample_mask_positions(Rng& rng, std::size_t length, double p);

// Mean cross-entropy over `mask_positions` of predicting the original ids;
// `ids` are the unmasked token ids, masking happens internally.
double masked_prediction_loss(const EncoderModel& model, const std::vector<int>& ids,
                              const std::vector<int>& mask_positions);

// Same loss, accumulating d(loss)/d(param) into `grad` (size = params size).
double masked_prediction_loss_grad(const EncoderModel& model, const std::vector<int>& ids,
                                   const std::vector<int>& mask_positions,
                                   std::vector<double>& grad);

// Leave-one-out masked accuracy over a corpus: each position masked in turn,
// argmax over real tokens compared with the original.
double masked_prediction_accuracy(const EncoderModel& model, const Dataset& corpus);

} // namespace logstamp
