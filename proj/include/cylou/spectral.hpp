#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cylou {

// Eigenvalue growth laws used to certify tail bounds of mode series.
//
// Weyl: lambda_k = c * k^(2/d) exactly for all stored modes (k is 1-based).
// PowerLog: c_lo * k^p * log(k+1)^q <= lambda_k <= c_hi * k^p * log(k+1)^q,
// asserted for modes beyond the stored truncation only.
struct Weyl {
    int d;
    double c;
};
struct PowerLog {
    double p;
    double q;
    double c_lo;
    double c_hi;
};
using GrowthLaw = std::variant<Weyl, PowerLog>;

inline double weyl_lambda(const Weyl& w, std::size_t k_one_based) {
    return w.c * std::pow(static_cast<double>(k_one_based), 2.0 / w.d);
}

// Coordinates of a vector in the eigenbasis. May be shorter than the model's
// truncation; missing coordinates are zero.
struct CoeffVector {
    std::vector<double> c;

    CoeffVector() = default;
    explicit CoeffVector(std::vector<double> coeffs) : c(std::move(coeffs)) {
        for (double x : c)
            if (!std::isfinite(x))
                throw std::invalid_argument("CoeffVector: entries must be finite");
    }

    std::size_t size() const { return c.size(); }
    double operator[](std::size_t k) const { return c[k]; }

    double norm2() const {
        double s = 0.0;
        for (double x : c) s += x * x;
        return std::sqrt(s);
    }
};

inline CoeffVector operator-(const CoeffVector& v) {
    std::vector<double> out(v.c.size());
    for (std::size_t k = 0; k < v.c.size(); ++k) out[k] = -v.c[k];
    return CoeffVector(std::move(out));
}

// Diagonal generator -A with point spectrum (-lambda_k), truncated to the
// first N modes. Mode indices are 1-based in formulas and 0-based in storage.
// Immutable after construction; any claim about the untruncated operator is
// the business of the criteria layer via growth_law.
class SpectralModel {
public:
    explicit SpectralModel(std::vector<double> lambdas,
                           std::optional<GrowthLaw> growth_law = std::nullopt,
                           std::optional<std::vector<double>> q_diag = std::nullopt,
                           std::optional<std::vector<double>> a_diag = std::nullopt)
        : lambdas_(std::move(lambdas)),
          growth_law_(std::move(growth_law)),
          q_diag_(std::move(q_diag)),
          a_diag_(std::move(a_diag)) {
        if (lambdas_.empty())
            throw std::invalid_argument("SpectralModel: eigenvalue list is empty");
        double prev = 0.0;
        for (double l : lambdas_) {
            if (!(l > 0.0) || !std::isfinite(l))
                throw std::invalid_argument("SpectralModel: eigenvalues must be positive and finite");
            if (l < prev)
                throw std::invalid_argument("SpectralModel: eigenvalues must be nondecreasing");
            prev = l;
        }
        if (growth_law_ && std::holds_alternative<Weyl>(*growth_law_)) {
            const auto& w = std::get<Weyl>(*growth_law_);
            if (w.d < 1 || !(w.c > 0.0))
                throw std::invalid_argument("SpectralModel: Weyl law needs d >= 1, c > 0");
            for (std::size_t k = 0; k < lambdas_.size(); ++k)
                if (lambdas_[k] != weyl_lambda(w, k + 1))
                    throw std::invalid_argument(
                        "SpectralModel: stored eigenvalue " + std::to_string(k + 1) +
                        " does not match the declared Weyl law");
        }
        if (growth_law_ && std::holds_alternative<PowerLog>(*growth_law_)) {
            const auto& g = std::get<PowerLog>(*growth_law_);
            if (!(g.p > 0.0) || g.q < 0.0 || !(g.c_lo > 0.0) || g.c_hi < g.c_lo)
                throw std::invalid_argument("SpectralModel: invalid PowerLog growth law");
        }
        if (q_diag_) {
            if (q_diag_->size() != lambdas_.size())
                throw std::invalid_argument("SpectralModel: q_diag length != number of modes");
            for (double q : *q_diag_)
                if (q < 0.0 || !std::isfinite(q))
                    throw std::invalid_argument("SpectralModel: q_diag entries must be >= 0");
        }
        if (a_diag_ && a_diag_->size() != lambdas_.size())
            throw std::invalid_argument("SpectralModel: a_diag length != number of modes");
    }

    std::size_t n_modes() const { return lambdas_.size(); }
    const std::vector<double>& lambdas() const { return lambdas_; }
    double lambda(std::size_t k) const { return lambdas_[k]; }
    double lambda_min() const { return lambdas_.front(); }
    const std::optional<GrowthLaw>& growth_law() const { return growth_law_; }
    const std::optional<std::vector<double>>& q_diag() const { return q_diag_; }
    const std::optional<std::vector<double>>& a_diag() const { return a_diag_; }

    SpectralModel with_q_diag(std::vector<double> q) const {
        return SpectralModel(lambdas_, growth_law_, std::move(q), a_diag_);
    }
    SpectralModel with_a_diag(std::vector<double> a) const {
        return SpectralModel(lambdas_, growth_law_, q_diag_, std::move(a));
    }

private:
    std::vector<double> lambdas_;
    std::optional<GrowthLaw> growth_law_;
    std::optional<std::vector<double>> q_diag_;
    std::optional<std::vector<double>> a_diag_;
};

// T(t) applied coordinate-wise: (e^{-lambda_k t} v_k).
inline CoeffVector semigroup_apply(const SpectralModel& model, const CoeffVector& v, double t) {
    if (!(t >= 0.0))
        throw std::invalid_argument("semigroup_apply: t must be >= 0");
    if (v.size() > model.n_modes())
        throw std::invalid_argument("semigroup_apply: vector longer than model truncation");
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        out[k] = std::exp(-model.lambda(k) * t) * v[k];
    return CoeffVector(std::move(out));
}

// lambda_k = c * k^(2/d), k = 1..n. Dirichlet-Laplacian growth on a
// d-dimensional domain, with the sharp constant family c_k == c.
inline SpectralModel weyl_eigenvalues(int d, double c, std::size_t n) {
    if (d < 1 || !(c > 0.0) || n < 1)
        throw std::invalid_argument("weyl_eigenvalues: need d >= 1, c > 0, n >= 1");
    const Weyl law{d, c};
    std::vector<double> lambdas(n);
    for (std::size_t k = 0; k < n; ++k) lambdas[k] = weyl_lambda(law, k + 1);
    return SpectralModel(std::move(lambdas), GrowthLaw(law));
}

// Squared Hilbert-Schmidt norm of T(s) over the stored modes:
// sum_k e^{-2 lambda_k s}. Only defined for s > 0; the untruncated series may
// blow up as s -> 0, so that limit is ruled on by the criteria layer.
inline double hs_norm_sq(const SpectralModel& model, double s) {
    if (!(s > 0.0))
        throw std::invalid_argument("hs_norm_sq: s must be > 0");
    double sum = 0.0;
    for (double l : model.lambdas()) sum += std::exp(-2.0 * l * s);
    return sum;
}

} // namespace cylou
