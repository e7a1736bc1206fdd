#include "fagan/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace fagan {

namespace {

void check_same_dims(const ImageBuffer& x, const ImageBuffer& y, const char* who) {
    if (x.height != y.height || x.width != y.width)
        throw DimensionError(std::string(who) + ": image dimensions differ");
}

}  // namespace

double psnr(const ImageBuffer& x, const ImageBuffer& y, double peak) {
    check_same_dims(x, y, "psnr");
    double mse = 0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        const double d = y.values[i] - x.values[i];
        mse += d * d;
    }
    mse /= static_cast<double>(x.values.size());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

namespace {

double ssim_term(double mx, double my, double vx, double vy, double cov, double L) {
    const double c1 = (0.01 * L) * (0.01 * L);
    const double c2 = (0.03 * L) * (0.03 * L);
    return ((2 * mx * my + c1) * (2 * cov + c2)) /
           ((mx * mx + my * my + c1) * (vx + vy + c2));
}

double ssim_global(const ImageBuffer& x, const ImageBuffer& y) {
    const double n = static_cast<double>(x.values.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        mx += x.values[i];
        my += y.values[i];
    }
    mx /= n;
    my /= n;
    double vx = 0, vy = 0, cov = 0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
        const double dx = x.values[i] - mx, dy = y.values[i] - my;
        vx += dx * dx;
        vy += dy * dy;
        cov += dx * dy;
    }
    vx /= n;
    vy /= n;
    cov /= n;
    return ssim_term(mx, my, vx, vy, cov, x.range);
}

constexpr int kWin = 11;

double ssim_windowed(const ImageBuffer& x, const ImageBuffer& y) {
    double g[kWin];
    double gsum = 0;
    for (int i = 0; i < kWin; ++i) {
        const double t = i - (kWin - 1) / 2.0;
        g[i] = std::exp(-t * t / (2.0 * 1.5 * 1.5));
        gsum += g[i];
    }
    for (double& w : g) w /= gsum;

    const int H = static_cast<int>(x.height), W = static_cast<int>(x.width);
    double acc = 0;
    std::size_t count = 0;
    // valid region only: windows fully inside the image
    for (int r = 0; r + kWin <= H; ++r)
        for (int c = 0; c + kWin <= W; ++c) {
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int i = 0; i < kWin; ++i)
                for (int j = 0; j < kWin; ++j) {
                    const double w = g[i] * g[j];
                    const double a = x.at(static_cast<std::size_t>(r + i), static_cast<std::size_t>(c + j));
                    const double b = y.at(static_cast<std::size_t>(r + i), static_cast<std::size_t>(c + j));
                    mx += w * a;
                    my += w * b;
                    sxx += w * a * a;
                    syy += w * b * b;
                    sxy += w * a * b;
                }
            acc += ssim_term(mx, my, sxx - mx * mx, syy - my * my, sxy - mx * my, x.range);
            ++count;
        }
    return acc / static_cast<double>(count);
}

}  // namespace

double ssim(const ImageBuffer& x, const ImageBuffer& y, SsimMode mode) {
    check_same_dims(x, y, "ssim");
    if (x.range != y.range) throw DimensionError("ssim: images declare different ranges");
    // images smaller than the window fall back to whole-image statistics
    if (mode == SsimMode::Global || x.height < kWin || x.width < kWin) return ssim_global(x, y);
    return ssim_windowed(x, y);
}

GaussianStats stats_from_features(const std::vector<std::vector<double>>& feats) {
    if (feats.size() < 2) throw ContractError("stats_from_features: need at least 2 samples");
    const std::size_t d = feats[0].size(), n = feats.size();
    for (const auto& f : feats)
        if (f.size() != d) throw DimensionError("stats_from_features: ragged feature vectors");
    GaussianStats s;
    s.n = n;
    s.mean.assign(d, 0.0);
    for (const auto& f : feats)
        for (std::size_t i = 0; i < d; ++i) s.mean[i] += f[i];
    for (double& m : s.mean) m /= static_cast<double>(n);
    s.cov.assign(d * d, 0.0);
    for (const auto& f : feats)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                s.cov[i * d + j] += (f[i] - s.mean[i]) * (f[j] - s.mean[j]);
    for (double& c : s.cov) c /= static_cast<double>(n - 1);
    return s;
}

GaussianStats feature_stats(const std::vector<ImageBuffer>& images, const FeatureExtractor<double>& fx) {
    if (images.size() < 2) throw ContractError("feature_stats: need at least 2 images");
    std::vector<std::vector<double>> feats;
    feats.reserve(images.size());
    for (const auto& img : images) {
        // range-normalized so feature statistics are O(1) regardless of the
        // declared pixel range
        ImageBuffer unit = img;
        for (double& v : unit.values) v /= img.range;
        unit.range = 1.0;
        auto pooled = fx.pooled_features(image_to_tensor<double>(unit));
        feats.emplace_back(pooled.data().begin(), pooled.data().end());
    }
    return stats_from_features(feats);
}

std::vector<double> psd_sqrt(const std::vector<double>& m, std::size_t d) {
    if (m.size() != d * d) throw DimensionError("psd_sqrt: size mismatch");
    Eigen::MatrixXd M(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i * d + j];
    Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) throw NumericError("psd_sqrt: eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < -1e-8) throw NumericError("psd_sqrt: matrix is not PSD (eigenvalue " +
                                              std::to_string(ev[i]) + ")");
        ev[i] = std::sqrt(std::max(0.0, ev[i]));
    }
    Eigen::MatrixXd root = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    std::vector<double> out(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out[i * d + j] = root(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

double fid(const GaussianStats& a, const GaussianStats& b) {
    const std::size_t d = a.dim();
    if (d != b.dim()) throw DimensionError("fid: feature dimensions differ");
    double mean_term = 0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a.mean[i] - b.mean[i];
        mean_term += diff * diff;
    }
    const auto ra = psd_sqrt(a.cov, d);  // S_a^{1/2}
    // S_a^{1/2} S_b S_a^{1/2} is symmetric PSD with the same eigenvalues as S_a S_b
    std::vector<double> tmp(d * d, 0.0), sym(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            const double v = ra[i * d + k];
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) tmp[i * d + j] += v * b.cov[k * d + j];
        }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            const double v = tmp[i * d + k];
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) sym[i * d + j] += v * ra[k * d + j];
        }
    const auto root = psd_sqrt(sym, d);  // (S_a^{1/2} S_b S_a^{1/2})^{1/2}
    double trace_term = 0;
    for (std::size_t i = 0; i < d; ++i)
        trace_term += a.cov[i * d + i] + b.cov[i * d + i] - 2.0 * root[i * d + i];
    return mean_term + trace_term;
}

MetricReport evaluate_pairs(const std::vector<ImageBuffer>& reference,
                            const std::vector<ImageBuffer>& candidate,
                            const std::vector<std::string>& names, const FeatureExtractor<double>& fx,
                            SsimMode mode) {
    if (reference.size() != candidate.size() || reference.size() != names.size())
        throw DimensionError("evaluate_pairs: set sizes differ");
    MetricReport rep;
    for (std::size_t i = 0; i < reference.size(); ++i)
        rep.pairs.push_back({names[i], psnr(reference[i], candidate[i]), ssim(reference[i], candidate[i], mode)});
    const double n = static_cast<double>(rep.pairs.size());
    for (const auto& p : rep.pairs) {
        rep.mean_psnr += p.psnr;
        rep.mean_ssim += p.ssim;
    }
    rep.mean_psnr /= n;
    rep.mean_ssim /= n;
    for (const auto& p : rep.pairs) {
        rep.std_psnr += (p.psnr - rep.mean_psnr) * (p.psnr - rep.mean_psnr);
        rep.std_ssim += (p.ssim - rep.mean_ssim) * (p.ssim - rep.mean_ssim);
    }
    rep.std_psnr = std::sqrt(rep.std_psnr / n);
    rep.std_ssim = std::sqrt(rep.std_ssim / n);
    if (reference.size() >= 2) {
        rep.reference_stats = feature_stats(reference, fx);
        rep.candidate_stats = feature_stats(candidate, fx);
        rep.fid = fid(rep.reference_stats, rep.candidate_stats);
    }
    return rep;
}

void write_metric_csv(const std::string& path, const MetricReport& report) {
    std::ofstream os(path);
    if (!os) throw IoError("write_metric_csv: cannot open " + path);
    os.precision(10);
    os << "name,psnr,ssim\n";
    for (const auto& p : report.pairs) os << p.name << "," << p.psnr << "," << p.ssim << "\n";
    os << "summary,mean_psnr=" << report.mean_psnr << "+-" << report.std_psnr
       << ",mean_ssim=" << report.mean_ssim << "+-" << report.std_ssim << "\n";
    os << "fid," << report.fid << ",\n";
    if (!os) throw IoError("write_metric_csv: write failure on " + path);
}

}  // namespace fagan
