#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccheis/error.hpp"

namespace ccheis {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One eigenvalue block of W: the value `a` repeated on a 2k-dimensional block.
struct SpectrumBlock {
    double a = 1.0;
    int k = 1;
};

/// Spectral description of a generalized H-type group G(2n, m, U, W) together
/// with the diagonal of A = B^T B. Construct through `GroupSpec::create`, which
/// validates the Radon-Hurwitz constraints and fills the derived constants.
class GroupSpec {
public:
    static GroupSpec create(std::vector<SpectrumBlock> blocks, int m, std::vector<double> b,
                            std::optional<std::vector<Mat>> u_matrices = std::nullopt);

    const std::vector<SpectrumBlock>& blocks() const { return blocks_; }
    int ell() const { return static_cast<int>(blocks_.size()); }
    int m() const { return m_; }
    const std::vector<double>& b() const { return b_; }
    const std::optional<std::vector<Mat>>& u_matrices() const { return u_; }

    int n() const { return n_; }
    /// K = sum_j a_j^2 k_j.
    double K() const { return K_; }
    /// C_H = K / n.
    double C_H() const { return C_H_; }
    /// N = n + m + 1/2.
    double N() const { return N_; }
    /// Subordination weights: k_j / N for j < ell, remainder on the top block.
    const std::vector<double>& c_frak() const { return c_frak_; }

    double a(int j) const { return blocks_[j].a; }
    int k(int j) const { return blocks_[j].k; }
    double a_top() const { return blocks_.back().a; }
    /// Offset of block j inside the 2n-vector x.
    int block_offset(int j) const { return offsets_[j]; }
    int dim_x() const { return 2 * n_; }

    bool has_u() const { return u_.has_value(); }
    bool is_normalized() const { return a_top() == 1.0; }

    /// Canonical one-line description, stable across runs.
    std::string canonical() const;

private:
    GroupSpec() = default;

    std::vector<SpectrumBlock> blocks_;
    int m_ = 1;
    std::vector<double> b_;
    std::optional<std::vector<Mat>> u_;
    int n_ = 0;
    double K_ = 0.0;
    double C_H_ = 0.0;
    double N_ = 0.0;
    std::vector<double> c_frak_;
    std::vector<int> offsets_;
};

struct GroupPoint {
    Vec x;
    Vec t;
};

GroupPoint identity(const GroupSpec& spec);
GroupPoint inverse(const GroupPoint& g);

/// Euclidean norms |x_(j)| of the blocks of x.
std::vector<double> block_norms(const GroupSpec& spec, const Vec& x);
/// Squared block norms |x_(j)|^2.
std::vector<double> block_norms_sq(const GroupSpec& spec, const Vec& x);

/// |Wx| = (sum_j a_j^2 |x_(j)|^2)^{1/2}.
double wx_norm(const GroupSpec& spec, const Vec& x);

/// Rescales so the top eigenvalue becomes 1: a' = a/a_top, b' = b/a_top^2,
/// t' = t/a_top (and U' = U/a_top). The CC distance is unchanged.
std::pair<GroupSpec, GroupPoint> normalize(const GroupSpec& spec, const GroupPoint& point);
GroupSpec normalize(const GroupSpec& spec);

/// Checks skew-symmetry and U_i U_l + U_l U_i = -2 delta_il W^2 entrywise
/// to 1e-12. Throws MissingU when the spec carries no U matrices.
bool validate_htype(const GroupSpec& spec);

/// Canonical model for m = 1: U = blockdiag(a_j J_{2k_j}).
GroupSpec standard_u_m1(const GroupSpec& spec);

/// (x,t)(x',t') = (x + x', t + t' + 1/2 <Ux, x'>).
GroupPoint multiply(const GroupSpec& spec, const GroupPoint& g, const GroupPoint& h);

/// W as an explicit 2n x 2n diagonal matrix.
Mat w_matrix(const GroupSpec& spec);

void check_point(const GroupSpec& spec, const GroupPoint& g);

} // namespace ccheis
