#include "ccheis/group.hpp"

#include <cmath>
#include <sstream>

namespace ccheis {

GroupSpec GroupSpec::create(std::vector<SpectrumBlock> blocks, int m, std::vector<double> b,
                            std::optional<std::vector<Mat>> u_matrices)
{
    if (blocks.empty()) throw Error(ErrorCode::InvalidSpec, "at least one spectral block is required");
    if (m < 1) throw Error(ErrorCode::InvalidSpec, "center dimension m must be >= 1");
    if (static_cast<int>(b.size()) != m)
        throw Error(ErrorCode::InvalidSpec, "b must have exactly m entries");

    for (const auto& blk : blocks) {
        if (!(blk.a > 0.0) || !std::isfinite(blk.a))
            throw Error(ErrorCode::InvalidSpec, "eigenvalues a_j must be positive and finite");
        if (blk.k < 1) throw Error(ErrorCode::InvalidSpec, "block multiplicities k_j must be >= 1");
    }
    for (std::size_t j = 1; j < blocks.size(); ++j) {
        if (!(blocks[j - 1].a < blocks[j].a))
            throw Error(ErrorCode::NonIncreasingSpectrum, "a_j must be strictly increasing");
    }
    for (double bl : b) {
        if (!std::isfinite(bl)) throw Error(ErrorCode::InvalidSpec, "b_l must be finite");
        if (bl < 0.0) throw Error(ErrorCode::NegativeWeight, "b_l must be nonnegative");
    }

    int k_min = blocks.front().k;
    for (const auto& blk : blocks) k_min = std::min(k_min, blk.k);
    // m <= 2 log2(4 k_min) and m + 1 <= 2 k_min
    if (static_cast<double>(m) > 2.0 * std::log2(4.0 * k_min) || m + 1 > 2 * k_min) {
        std::ostringstream os;
        os << "m = " << m << " violates the Radon-Hurwitz bounds for min k_j = " << k_min;
        throw Error(ErrorCode::DimensionConstraint, os.str());
    }

    GroupSpec s;
    s.blocks_ = std::move(blocks);
    s.m_ = m;
    s.b_ = std::move(b);

    s.n_ = 0;
    s.K_ = 0.0;
    for (const auto& blk : s.blocks_) {
        s.offsets_.push_back(2 * s.n_);
        s.n_ += blk.k;
        s.K_ += blk.a * blk.a * blk.k;
    }
    s.C_H_ = s.K_ / s.n_;
    s.N_ = s.n_ + s.m_ + 0.5;

    const int ell = s.ell();
    s.c_frak_.assign(ell, 0.0);
    double acc = 0.0;
    for (int j = 0; j + 1 < ell; ++j) {
        s.c_frak_[j] = s.blocks_[j].k / s.N_;
        acc += s.c_frak_[j];
    }
    s.c_frak_[ell - 1] = 1.0 - acc;

    if (u_matrices) {
        if (static_cast<int>(u_matrices->size()) != m)
            throw Error(ErrorCode::InvalidSpec, "expected m structure matrices U");
        for (const auto& u : *u_matrices) {
            if (u.rows() != 2 * s.n_ || u.cols() != 2 * s.n_)
                throw Error(ErrorCode::InvalidSpec, "U matrices must be 2n x 2n");
        }
        s.u_ = std::move(u_matrices);
    }
    return s;
}

std::string GroupSpec::canonical() const
{
    std::ostringstream os;
    os.precision(17);
    os << "blocks=[";
    for (std::size_t j = 0; j < blocks_.size(); ++j)
        os << (j ? "," : "") << "[" << blocks_[j].a << "," << blocks_[j].k << "]";
    os << "];m=" << m_ << ";b=[";
    for (std::size_t l = 0; l < b_.size(); ++l) os << (l ? "," : "") << b_[l];
    os << "]";
    if (u_) os << ";u=explicit";
    return os.str();
}

GroupPoint identity(const GroupSpec& spec)
{
    return {Vec::Zero(spec.dim_x()), Vec::Zero(spec.m())};
}

GroupPoint inverse(const GroupPoint& g) { return {-g.x, -g.t}; }

void check_point(const GroupSpec& spec, const GroupPoint& g)
{
    if (g.x.size() != spec.dim_x() || g.t.size() != spec.m())
        throw Error(ErrorCode::InvalidSpec, "point dimensions do not match the group");
}

std::vector<double> block_norms_sq(const GroupSpec& spec, const Vec& x)
{
    std::vector<double> out(spec.ell(), 0.0);
    for (int j = 0; j < spec.ell(); ++j)
        out[j] = x.segment(spec.block_offset(j), 2 * spec.k(j)).squaredNorm();
    return out;
}

std::vector<double> block_norms(const GroupSpec& spec, const Vec& x)
{
    auto sq = block_norms_sq(spec, x);
    for (auto& v : sq) v = std::sqrt(v);
    return sq;
}

double wx_norm(const GroupSpec& spec, const Vec& x)
{
    const auto sq = block_norms_sq(spec, x);
    double acc = 0.0;
    for (int j = 0; j < spec.ell(); ++j) acc += spec.a(j) * spec.a(j) * sq[j];
    return std::sqrt(acc);
}

GroupSpec normalize(const GroupSpec& spec)
{
    const double top = spec.a_top();
    if (top == 1.0) return spec;
    std::vector<SpectrumBlock> blocks = spec.blocks();
    for (auto& blk : blocks) blk.a /= top;
    blocks.back().a = 1.0;
    std::vector<double> b = spec.b();
    for (auto& bl : b) bl /= top * top;
    std::optional<std::vector<Mat>> u;
    if (spec.u_matrices()) {
        u = *spec.u_matrices();
        for (auto& mat : *u) mat /= top;
    }
    return GroupSpec::create(std::move(blocks), spec.m(), std::move(b), std::move(u));
}

std::pair<GroupSpec, GroupPoint> normalize(const GroupSpec& spec, const GroupPoint& point)
{
    check_point(spec, point);
    const double top = spec.a_top();
    if (top == 1.0) return {spec, point};
    return {normalize(spec), GroupPoint{point.x, point.t / top}};
}

Mat w_matrix(const GroupSpec& spec)
{
    Vec diag(spec.dim_x());
    for (int j = 0; j < spec.ell(); ++j)
        diag.segment(spec.block_offset(j), 2 * spec.k(j)).setConstant(spec.a(j));
    return diag.asDiagonal();
}

bool validate_htype(const GroupSpec& spec)
{
    if (!spec.u_matrices()) throw Error(ErrorCode::MissingU, "spec carries no U matrices");
    constexpr double tol = 1e-12;
    const auto& us = *spec.u_matrices();
    const Mat w = w_matrix(spec);
    const Mat w2 = w * w;
    for (const auto& u : us) {
        if (((u + u.transpose()).array().abs() > tol).any()) return false;
    }
    for (int i = 0; i < spec.m(); ++i) {
        for (int l = i; l < spec.m(); ++l) {
            Mat anti = us[i] * us[l] + us[l] * us[i];
            if (i == l) anti += 2.0 * w2;
            if ((anti.array().abs() > tol).any()) return false;
        }
    }
    return true;
}

GroupSpec standard_u_m1(const GroupSpec& spec)
{
    if (spec.m() != 1) throw Error(ErrorCode::WrongCenterDim, "standard U model requires m = 1");
    Mat u = Mat::Zero(spec.dim_x(), spec.dim_x());
    for (int j = 0; j < spec.ell(); ++j) {
        const int off = spec.block_offset(j);
        for (int p = 0; p < spec.k(j); ++p) {
            u(off + 2 * p, off + 2 * p + 1) = spec.a(j);
            u(off + 2 * p + 1, off + 2 * p) = -spec.a(j);
        }
    }
    return GroupSpec::create(spec.blocks(), 1, spec.b(), std::vector<Mat>{u});
}

GroupPoint multiply(const GroupSpec& spec, const GroupPoint& g, const GroupPoint& h)
{
    if (!spec.u_matrices()) throw Error(ErrorCode::MissingU, "group law needs U matrices");
    check_point(spec, g);
    check_point(spec, h);
    GroupPoint out{g.x + h.x, g.t + h.t};
    const auto& us = *spec.u_matrices();
    for (int l = 0; l < spec.m(); ++l) out.t[l] += 0.5 * (us[l] * g.x).dot(h.x);
    return out;
}

} // namespace ccheis
