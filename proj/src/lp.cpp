#include "tsys/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tsys/error.hpp"
#include "tsys/kernels.hpp"

namespace tsys {

namespace {

class Simplex {
public:
    Simplex(const Mat& A, const Vec& b, const LpOptions& opt) : m_(A.rows()), n_(A.cols()), opt_(opt) {
        colscale_.resize(n_);
        for (Eigen::Index j = 0; j < n_; ++j) {
            const double s = A.col(j).cwiseAbs().maxCoeff();
            colscale_(j) = s > 0 ? 1.0 / s : 1.0;
        }
        Mat As = A * colscale_.asDiagonal();
        rowscale_.resize(m_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            const double s = As.row(i).cwiseAbs().maxCoeff();
            rowscale_(i) = s > 0 ? 1.0 / s : 1.0;
        }
        As = rowscale_.asDiagonal() * As;
        b_ = rowscale_.cwiseProduct(b);
        flip_ = Vec::Ones(m_);
        for (Eigen::Index i = 0; i < m_; ++i)
            if (b_(i) < 0) {
                flip_(i) = -1;
                b_(i) = -b_(i);
                As.row(i) *= -1;
            }
        A_ = As;
        rowmajor_.resize(static_cast<std::size_t>(m_ * n_));
        for (Eigen::Index i = 0; i < m_; ++i)
            for (Eigen::Index j = 0; j < n_; ++j) rowmajor_[static_cast<std::size_t>(i * n_ + j)] = A_(i, j);
        basis_.resize(static_cast<std::size_t>(m_));
        for (Eigen::Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
        is_basic_.assign(static_cast<std::size_t>(n_ + m_), -1);
        for (Eigen::Index i = 0; i < m_; ++i) is_basic_[static_cast<std::size_t>(n_ + i)] = static_cast<int>(i);
        binv_ = Mat::Identity(m_, m_);
        xb_ = b_;
    }

    LpResult run(const Vec& c) {
        LpResult res;
        Vec c1 = Vec::Zero(n_ + m_);
        c1.tail(m_).setOnes();
        const LpStatus s1 = iterate(c1, false, res.iterations);
        double infeas = 0.0;
        for (Eigen::Index i = 0; i < m_; ++i)
            if (basis_[static_cast<std::size_t>(i)] >= n_) infeas += xb_(i);
        res.infeasibility = infeas;
        const double bscale = std::max(1.0, b_.cwiseAbs().maxCoeff());
        if (s1 == LpStatus::iteration_limit) {
            res.status = s1;
            return res;
        }
        if (infeas > 1e-9 * bscale) {
            res.status = LpStatus::infeasible;
            // Farkas ray from phase-1 duals: y'A_j <= 0, y'b > 0 after undoing the transforms.
            Vec y = duals(c1);
            res.y = unscale_dual(y);
            res.x = Vec::Zero(n_);
            return res;
        }
        drive_out_artificials();
        Vec c2 = Vec::Zero(n_ + m_);
        c2.head(n_) = c.cwiseProduct(colscale_);
        const LpStatus s2 = iterate(c2, true, res.iterations);
        res.status = s2;
        res.x = Vec::Zero(n_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            const Eigen::Index j = basis_[static_cast<std::size_t>(i)];
            if (j < n_) res.x(j) = std::max(0.0, xb_(i)) * colscale_(j);
        }
        res.y = unscale_dual(duals(c2));
        res.objective = c.dot(res.x);
        return res;
    }

private:
    Vec duals(const Vec& cost) const {
        Vec cb(m_);
        for (Eigen::Index i = 0; i < m_; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
        return binv_.transpose() * cb;
    }

    Vec unscale_dual(const Vec& y) const { return y.cwiseProduct(flip_).cwiseProduct(rowscale_); }

    void refactor() {
        Mat B(m_, m_);
        for (Eigen::Index i = 0; i < m_; ++i) B.col(i) = column(basis_[static_cast<std::size_t>(i)]);
        binv_ = B.fullPivLu().inverse();
        xb_ = binv_ * b_;
    }

    Vec column(Eigen::Index j) const {
        if (j < n_) return A_.col(j);
        Vec e = Vec::Zero(m_);
        e(j - n_) = 1.0;
        return e;
    }

    void pivot(Eigen::Index row, Eigen::Index enter, const Vec& u) {
        const double p = u(row);
        const double step = xb_(row) / p;
        xb_ -= step * u;
        xb_(row) = step;
        Vec prow = binv_.row(row) / p;
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (i == row) continue;
            if (u(i) != 0.0) binv_.row(i) -= u(i) * prow.transpose();
        }
        binv_.row(row) = prow.transpose();
        is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(row)])] = -1;
        basis_[static_cast<std::size_t>(row)] = enter;
        is_basic_[static_cast<std::size_t>(enter)] = static_cast<int>(row);
        if (++since_refactor_ >= 40) {
            refactor();
            since_refactor_ = 0;
        }
        for (Eigen::Index i = 0; i < m_; ++i)
            if (xb_(i) < 0 && xb_(i) > -1e-11) xb_(i) = 0.0;
    }

    LpStatus iterate(const Vec& cost, bool phase2, int& iters) {
        std::vector<double> red(static_cast<std::size_t>(n_));
        int degenerate = 0;
        while (iters < opt_.max_iterations) {
            ++iters;
            const Vec y = duals(cost);
            kernels::gemv_t(rowmajor_.data(), static_cast<std::size_t>(m_), static_cast<std::size_t>(n_), y.data(),
                            red.data());
            const bool bland = degenerate > 50;
            Eigen::Index enter = -1;
            double best = -opt_.tol;
            for (Eigen::Index j = 0; j < n_; ++j) {
                if (is_basic_[static_cast<std::size_t>(j)] >= 0) continue;
                const double d = cost(j) - red[static_cast<std::size_t>(j)];
                if (d < best) {
                    enter = j;
                    best = d;
                    if (bland) break;
                }
            }
            if (!phase2 && enter < 0) {
                for (Eigen::Index i = 0; i < m_; ++i) {
                    const Eigen::Index j = n_ + i;
                    if (is_basic_[static_cast<std::size_t>(j)] >= 0) continue;
                    const double d = cost(j) - y(i);
                    if (d < best) {
                        enter = j;
                        best = d;
                        if (bland) break;
                    }
                }
            }
            if (enter < 0) return LpStatus::optimal;
            const Vec u = binv_ * column(enter);
            Eigen::Index row = -1;
            double ratio = std::numeric_limits<double>::infinity();
            double piv = 0.0;
            for (Eigen::Index i = 0; i < m_; ++i) {
                const bool art = basis_[static_cast<std::size_t>(i)] >= n_;
                double r;
                if (u(i) > 1e-11) {
                    r = std::max(0.0, xb_(i)) / u(i);
                } else if (phase2 && art && u(i) < -1e-11) {
                    r = 0.0;
                } else {
                    continue;
                }
                const double au = std::fabs(u(i));
                if (r < ratio - 1e-14 || (r <= ratio + 1e-14 && (bland ? basis_[static_cast<std::size_t>(i)] <
                                                                             basis_[static_cast<std::size_t>(row)]
                                                                       : au > piv))) {
                    ratio = r;
                    row = i;
                    piv = au;
                }
            }
            if (row < 0) return LpStatus::unbounded;
            degenerate = ratio == 0.0 ? degenerate + 1 : 0;
            pivot(row, enter, u);
        }
        return LpStatus::iteration_limit;
    }

    void drive_out_artificials() {
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < n_) continue;
            const Vec r = binv_.row(i);
            Eigen::Index best = -1;
            double bv = 1e-9;
            for (Eigen::Index j = 0; j < n_; ++j) {
                if (is_basic_[static_cast<std::size_t>(j)] >= 0) continue;
                const double v = std::fabs(r.dot(A_.col(j)));
                if (v > bv) {
                    bv = v;
                    best = j;
                }
            }
            if (best >= 0) pivot(i, best, binv_ * column(best));
        }
    }

    Eigen::Index m_, n_;
    LpOptions opt_;
    Mat A_;
    std::vector<double> rowmajor_;
    Vec b_, flip_, colscale_, rowscale_, xb_;
    Mat binv_;
    std::vector<Eigen::Index> basis_;
    std::vector<int> is_basic_;
    int since_refactor_ = 0;
};

}  // namespace

LpResult solve_lp(const Mat& A, const Vec& b, const Vec& c, const LpOptions& opt) {
    if (A.rows() != b.size() || A.cols() != c.size()) throw Error(Errc::DimensionMismatch, "LP shapes");
    Simplex s(A, b, opt);
    return s.run(c);
}

}  // namespace tsys
