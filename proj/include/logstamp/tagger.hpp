#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logstamp/encoder.hpp"
#include "logstamp/labeler.hpp"

namespace logstamp {

enum class TaggerArch { RecurrentBidir, RecurrentUnidir, Convolutional };

const char* tagger_arch_name(TaggerArch arch);
TaggerArch tagger_arch_from_name(const std::string& name);

struct TaggerConfig {
    TaggerArch architecture = TaggerArch::RecurrentBidir;
    int hidden_dim = 64;
    int epochs = 10;
    double learning_rate = 0.01;
    std::uint64_t seed = 0;

    void validate() const;
};

// Parameter block offsets. Recurrent cells are gated (update/reset); the
// convolutional variant is a single width-3 filter bank.
struct TaggerLayout {
    int input_dim = 0;
    int hidden_dim = 0;
    bool bidirectional = false;
    bool convolutional = false;

    // per direction (fwd always, bwd only when bidirectional):
    // w_z,u_z,b_z / w_r,u_r,b_r / w_h,u_h,b_h
    std::size_t gates_fwd = 0;
    std::size_t gates_bwd = 0;
    // convolutional: filters k_{-1},k_0,k_{+1} (each hidden x input) + bias
    std::size_t conv = 0;
    std::size_t out_w = 0; // 2 x (output feature width)
    std::size_t out_b = 0; // 2
    std::size_t total = 0;

    std::size_t gate_block_size() const;
    int out_features() const;

    static TaggerLayout make(TaggerArch arch, int input_dim, int hidden_dim);
};

struct TaggerMeta {
    std::vector<double> epoch_losses;
    double final_loss = 0.0;
    double train_accuracy = 0.0;
};

struct TaggerModel {
    TaggerArch architecture = TaggerArch::RecurrentBidir;
    TaggerConfig config;
    int input_dim = 0; // encoder embed_dim
    std::vector<float> params;
    TaggerMeta meta;

    TaggerLayout layout() const {
        return TaggerLayout::make(architecture, input_dim, config.hidden_dim);
    }
};

// Train the word classifier on frozen encoder embeddings against
// pseudo-labels. Mean per-token cross-entropy, plain SGD, deterministic
// under config.seed.
TaggerModel train_tagger(const std::vector<LabeledSentence>& labeled,
                         const EncoderModel& encoder, const TaggerConfig& config);

// One label per token; logit ties break toward TEMPLATE.
std::vector<WordLabel> tag(const TaggerModel& model, const EncoderModel& encoder,
                           const std::vector<std::string>& tokens);

double token_accuracy(const TaggerModel& model, const EncoderModel& encoder,
                      const std::vector<LabeledSentence>& labeled);

void save_tagger(const TaggerModel& model, const std::string& path);
TaggerModel load_tagger(const std::string& path);

// --- gradient-check surface ---

// Mean cross-entropy of one sentence given precomputed input embeddings
// (inputs.size() x input_dim) against labels.
double tagging_loss(const TaggerModel& model, const std::vector<std::vector<float>>& inputs,
                    const std::vector<WordLabel>& labels);

// Same, accumulating parameter gradients into `grad`.
double tagging_loss_grad(const TaggerModel& model, const std::vector<std::vector<float>>& inputs,
                         const std::vector<WordLabel>& labels, std::vector<double>& grad);

// Fresh randomly-initialized model for tests.
TaggerModel make_tagger(const TaggerConfig& config, int input_dim);

std::vector<WordLabel> tag_embedded(const TaggerModel& model,
                                    const std::vector<std::vector<float>>& inputs);

} // namespace logstamp
