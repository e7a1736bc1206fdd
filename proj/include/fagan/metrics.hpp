#pragma once

// Image quality metrics: PSNR (dB, capped for identical images), SSIM
// (global single-window form and the 11x11 Gaussian-windowed mean), and the
// Frechet distance between Gaussian feature statistics.

#include "fagan/image.hpp"
#include "fagan/losses.hpp"

#include <string>
#include <vector>

namespace fagan {

inline constexpr double kPsnrCap = 99.0;

double psnr(const ImageBuffer& x, const ImageBuffer& y, double peak = 255.0);

enum class SsimMode { Global, Windowed };

// Global mode uses whole-image statistics; windowed mode averages the local
// index over 11x11 Gaussian windows (sigma 1.5). C1 = (0.01 L)^2,
// C2 = (0.03 L)^2 with L the declared dynamic range.
double ssim(const ImageBuffer& x, const ImageBuffer& y, SsimMode mode = SsimMode::Windowed);

struct GaussianStats {
    std::vector<double> mean;  // D
    std::vector<double> cov;   // D x D row-major, unbiased
    std::size_t n = 0;
    std::size_t dim() const { return mean.size(); }
};

// sample mean and unbiased covariance of explicit feature vectors (>= 2)
GaussianStats stats_from_features(const std::vector<std::vector<double>>& feats);

GaussianStats feature_stats(const std::vector<ImageBuffer>& images, const FeatureExtractor<double>& fx);

// Principal square root of a symmetric PSD matrix (row-major d x d).
// Eigenvalues below -1e-8 raise NumericError; small negatives clamp to 0.
std::vector<double> psd_sqrt(const std::vector<double>& m, std::size_t d);

// ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2}), via the symmetric
// form sqrt(S_a)^T S_b sqrt(S_a)
double fid(const GaussianStats& a, const GaussianStats& b);

struct PairMetrics {
    std::string name;
    double psnr = 0;
    double ssim = 0;
};

struct MetricReport {
    std::vector<PairMetrics> pairs;
    double mean_psnr = 0;
    double std_psnr = 0;
    double mean_ssim = 0;
    double std_ssim = 0;
    double fid = 0;
    GaussianStats reference_stats;
    GaussianStats candidate_stats;
};

// Pairwise PSNR/SSIM plus FID over the two sets; pairs are evaluated in the
// order given (callers sort names first for reproducible reports).
MetricReport evaluate_pairs(const std::vector<ImageBuffer>& reference,
                            const std::vector<ImageBuffer>& candidate,
                            const std::vector<std::string>& names, const FeatureExtractor<double>& fx,
                            SsimMode mode = SsimMode::Windowed);

void write_metric_csv(const std::string& path, const MetricReport& report);

}  // namespace fagan
