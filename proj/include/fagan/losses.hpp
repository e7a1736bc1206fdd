#pragma once

// Generator and discriminator objectives. The content loss measures squared
// distance between features of a frozen extractor; the identity extractor
// degenerates it to pixel-space MSE. Probabilities are clamped to
// [1e-7, 1 - 1e-7] before any log.

#include "fagan/blocks.hpp"
#include "fagan/conv.hpp"
#include "fagan/tensor.hpp"

namespace fagan {

inline constexpr double kProbClamp = 1e-7;
inline constexpr double kAdversarialWeight = 1e-3;

enum class FeatureMode { Identity, RandomConv };

// Frozen, seeded conv stack (1 -> 16 -> 16 -> 32, stride 2, ReLU between).
// Parameters never receive gradients; the same seed always yields the same
// features.
template <typename T>
class FeatureExtractor {
  public:
    explicit FeatureExtractor(FeatureMode mode = FeatureMode::RandomConv, unsigned seed = 2024,
                              std::size_t in_channels = 1)
        : mode_(mode), seed_(seed) {
        if (mode_ == FeatureMode::RandomConv) {
            std::mt19937 rng(seed);
            layers_.push_back(ConvLayer<T>::make(in_channels, 16, 3, rng));
            layers_.push_back(ConvLayer<T>::make(16, 16, 3, rng));
            layers_.push_back(ConvLayer<T>::make(16, 32, 3, rng));
            for (auto& l : layers_) {
                l.weight.set_requires_grad(false);
                l.bias.set_requires_grad(false);
            }
        }
    }

    FeatureMode mode() const { return mode_; }
    unsigned seed() const { return seed_; }

    Tensor<T> features(const Tensor<T>& x) const {
        if (mode_ == FeatureMode::Identity) return x;
        auto h = relu(layers_[0].forward(x, 2));
        h = relu(layers_[1].forward(h, 2));
        return layers_[2].forward(h, 2);
    }

    // pooled feature vector, used for distribution statistics
    Tensor<T> pooled_features(const Tensor<T>& x) const { return global_avg_pool(features(x)); }

    std::size_t feature_dim(std::size_t in_channels = 1) const {
        return mode_ == FeatureMode::Identity ? in_channels : 32;
    }

  private:
    FeatureMode mode_;
    unsigned seed_;
    std::vector<ConvLayer<T>> layers_;
};

struct LossReport {
    double content = 0;
    double adversarial = 0;
    double combined = 0;
    double d_loss = 0;
};

// mean squared feature distance, normalized over the feature grid
template <typename T>
Tensor<T> content_loss(const Tensor<T>& sr, const Tensor<T>& hr, const FeatureExtractor<T>& fx) {
    if (sr.shape() != hr.shape())
        throw DimensionError("content_loss: shape mismatch " + shape_str(sr.shape()) + " vs " +
                             shape_str(hr.shape()));
    return mean(abs_square(sub(fx.features(sr), fx.features(hr))));
}

namespace detail {
template <typename T>
Tensor<T> clamped_probs(const Tensor<T>& p, const char* who) {
    for (T v : p.data())
        if (!(v >= T(0) && v <= T(1)))
            throw ContractError(std::string(who) + ": probability outside [0,1]");
    return clamp(p, kProbClamp, 1.0 - kProbClamp);
}
}  // namespace detail

enum class BatchReduction { Sum, Mean };

// -log D(G(lr)) over the batch; Sum is the literal form, Mean is what the
// trainer uses so the step size does not scale with batch size
template <typename T>
Tensor<T> adversarial_loss_g(const Tensor<T>& d_fake, BatchReduction reduction = BatchReduction::Sum) {
    auto neg_log = scalar_mul(log(detail::clamped_probs(d_fake, "adversarial_loss_g")), -1.0);
    return reduction == BatchReduction::Sum ? sum(neg_log) : mean(neg_log);
}

template <typename T>
Tensor<T> combined_loss_g(const Tensor<T>& content, const Tensor<T>& adversarial) {
    return add(content, scalar_mul(adversarial, kAdversarialWeight));
}

inline double combined_loss_g(double content, double adversarial) {
    return content + kAdversarialWeight * adversarial;
}

// -mean log D(real) - mean log(1 - D(fake))
template <typename T>
Tensor<T> discriminator_loss(const Tensor<T>& d_real, const Tensor<T>& d_fake) {
    auto real_term = mean(log(detail::clamped_probs(d_real, "discriminator_loss")));
    auto ones = Tensor<T>::ones(d_fake.shape());
    auto fake_term = mean(log(detail::clamped_probs(sub(ones, d_fake), "discriminator_loss")));
    return scalar_mul(add(real_term, fake_term), -1.0);
}

}  // namespace fagan
