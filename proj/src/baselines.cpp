#include "plstomo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace plstomo {

Eigen::VectorXd sirt(const SystemMatrix& A, const Sinogram& b, int iterations, double relaxation) {
    if (iterations < 1)
        throw std::invalid_argument("sirt: iterations must be >= 1");
    if (!(relaxation > 0.0 && relaxation < 2.0))
        throw std::invalid_argument("sirt: relaxation must lie in (0, 2)");
    if (b.size() != A.rows())
        throw std::invalid_argument("sirt: sinogram length does not match matrix rows");

    const Eigen::VectorXd ones_n = Eigen::VectorXd::Ones(A.cols());
    const Eigen::VectorXd ones_m = Eigen::VectorXd::Ones(A.rows());
    Eigen::VectorXd row_sum = A.weights * ones_n;
    Eigen::VectorXd col_sum = A.weights.transpose() * ones_m;
    Eigen::VectorXd row_w(row_sum.size()), col_w(col_sum.size());
    for (Eigen::Index i = 0; i < row_sum.size(); ++i)
        row_w[i] = row_sum[i] > 0.0 ? 1.0 / row_sum[i] : 0.0;
    for (Eigen::Index i = 0; i < col_sum.size(); ++i)
        col_w[i] = col_sum[i] > 0.0 ? 1.0 / col_sum[i] : 0.0;

    Eigen::VectorXd u = Eigen::VectorXd::Zero(A.cols());
    for (int it = 0; it < iterations; ++it) {
        const Eigen::VectorXd residual = b.values - A.weights * u;
        u += relaxation * col_w.cwiseProduct(A.weights.transpose() * row_w.cwiseProduct(residual));
        u = u.cwiseMax(0.0).cwiseMin(1.0);
    }
    return u;
}

Eigen::VectorXd otsu_threshold(const Eigen::VectorXd& u) {
    if (!u.allFinite())
        throw std::invalid_argument("otsu_threshold: image must be finite");
    Eigen::VectorXd mask = Eigen::VectorXd::Zero(u.size());
    if (u.size() == 0) return mask;

    const double lo = u.minCoeff();
    const double hi = u.maxCoeff();
    if (!(hi > lo)) return mask; // constant image: all background

    constexpr int kBins = 256;
    const double width = (hi - lo) / kBins;
    std::vector<double> hist(kBins, 0.0);
    std::vector<double> level(kBins, 0.0);
    for (int k = 0; k < kBins; ++k) level[static_cast<std::size_t>(k)] = lo + (k + 0.5) * width;
    for (Eigen::Index p = 0; p < u.size(); ++p) {
        int bin = static_cast<int>(std::floor((u[p] - lo) / width));
        bin = std::clamp(bin, 0, kBins - 1);
        hist[static_cast<std::size_t>(bin)] += 1.0;
    }

    const double total = static_cast<double>(u.size());
    double sum_all = 0.0;
    for (int k = 0; k < kBins; ++k) sum_all += level[static_cast<std::size_t>(k)] * hist[static_cast<std::size_t>(k)];

    // Split after bin k: class 0 = bins [0,k], class 1 = bins (k,255].
    int best_split = 0;
    double best_var = -1.0;
    double w0 = 0.0, sum0 = 0.0;
    for (int k = 0; k < kBins - 1; ++k) {
        w0 += hist[static_cast<std::size_t>(k)];
        sum0 += level[static_cast<std::size_t>(k)] * hist[static_cast<std::size_t>(k)];
        const double w1 = total - w0;
        if (w0 <= 0.0 || w1 <= 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) { // strict: ties keep the lower threshold
            best_var = var;
            best_split = k;
        }
    }

    const double threshold = lo + (best_split + 1) * width;
    for (Eigen::Index p = 0; p < u.size(); ++p)
        mask[p] = u[p] >= threshold ? 1.0 : 0.0;
    return mask;
}

double jaccard_index(const Eigen::VectorXd& mask_a, const Eigen::VectorXd& mask_b) {
    if (mask_a.size() != mask_b.size())
        throw std::invalid_argument("jaccard_index: mask lengths differ");
    long inter = 0, uni = 0;
    for (Eigen::Index p = 0; p < mask_a.size(); ++p) {
        const bool a = mask_a[p] > 0.5;
        const bool b = mask_b[p] > 0.5;
        inter += (a && b) ? 1 : 0;
        uni += (a || b) ? 1 : 0;
    }
    if (uni == 0) return 1.0; // two empty masks are identical
    return static_cast<double>(inter) / static_cast<double>(uni);
}

MetricReport compare(const Eigen::VectorXd& mask_est, const Eigen::VectorXd& mask_true,
                     const SystemMatrix& A, const Sinogram& b) {
    if (mask_est.size() != mask_true.size())
        throw std::invalid_argument("compare: mask lengths differ");
    if (mask_est.size() != A.cols())
        throw std::invalid_argument("compare: mask length does not match matrix columns");
    if (b.size() != A.rows())
        throw std::invalid_argument("compare: sinogram length does not match matrix rows");

    MetricReport report;
    report.jaccard = jaccard_index(mask_est, mask_true);

    long mismatched = 0;
    for (Eigen::Index p = 0; p < mask_est.size(); ++p)
        mismatched += (mask_est[p] > 0.5) != (mask_true[p] > 0.5) ? 1 : 0;
    report.pixel_error_fraction =
        mask_est.size() > 0 ? static_cast<double>(mismatched) / static_cast<double>(mask_est.size())
                            : 0.0;

    const double m = static_cast<double>(A.rows());
    report.sinogram_rmse =
        m > 0.0 ? std::sqrt((A.weights * mask_est - b.values).squaredNorm() / m) : 0.0;
    return report;
}

} // namespace plstomo
