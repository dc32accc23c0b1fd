#include "nitool/feasibility.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace nitool {

namespace detail {

Vector sym_to_vec(const Matrix& s) {
    const Eigen::Index n = s.rows();
    Vector             v(n * (n + 1) / 2);
    const double       root2 = std::sqrt(2.0);
    Eigen::Index       idx   = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            v(idx++) = (i == j) ? s(i, i) : s(i, j) * root2;
        }
    }
    return v;
}

Matrix vec_to_sym(const Vector& v, Eigen::Index n) {
    Matrix             s(n, n);
    const double       inv_root2 = 1.0 / std::sqrt(2.0);
    Eigen::Index       idx       = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            if (i == j) {
                s(i, i) = v(idx);
            } else {
                s(i, j) = v(idx) * inv_root2;
                s(j, i) = s(i, j);
            }
            ++idx;
        }
    }
    return s;
}

AffineProjector::AffineProjector(const Matrix& g, const Matrix& c) {
    n_ = g.rows();
    const Eigen::Index m    = g.cols();
    const Eigen::Index nsym = n_ * (n_ + 1) / 2;

    // Constraint operator over the orthonormal symmetric basis:
    // column (i,j) holds vec(E_ij * C^T).
    Matrix       op(n_ * m, nsym);
    const double w   = 1.0 / std::sqrt(2.0);
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < n_; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            Matrix prod = Matrix::Zero(n_, m);
            if (i == j) {
                prod.row(i) = c.col(i).transpose();
            } else {
                prod.row(i) = w * c.col(j).transpose();
                prod.row(j) = w * c.col(i).transpose();
            }
            op.col(idx++) = Eigen::Map<const Vector>(prod.data(), prod.size());
        }
    }

    const Vector g_vec = Eigen::Map<const Vector>(g.data(), g.size());

    Eigen::JacobiSVD<Matrix> svd(op, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const Vector&            sv = svd.singularValues();

    const double sigma0 = (sv.size() > 0) ? sv(0) : 0.0;
    const double cutoff = static_cast<double>(std::max<Eigen::Index>(op.rows(), op.cols())) *
                          std::numeric_limits<double>::epsilon() * sigma0;

    Eigen::Index r = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > cutoff) ++r;
    }

    // minimum-norm particular solution
    particular_ = Vector::Zero(nsym);
    if (r > 0) {
        const Vector coeffs = svd.matrixU().leftCols(r).transpose() * g_vec;
        for (Eigen::Index k = 0; k < r; ++k) {
            particular_ += (coeffs(k) / sv(k)) * svd.matrixV().col(k);
        }
    }
    null_ = svd.matrixV().rightCols(nsym - r);

    consistency_residual_ = (op * particular_ - g_vec).norm();
    consistent_           = consistency_residual_ <= 1e-10 * (1.0 + g_vec.norm());
}

Matrix AffineProjector::project(const Matrix& y) const {
    const Vector v = sym_to_vec(0.5 * (y + y.transpose()));
    const Vector t = null_.transpose() * (v - particular_);
    return vec_to_sym(particular_ + null_ * t, n_);
}

Matrix AffineProjector::particular() const {
    return vec_to_sym(particular_, n_);
}

Vector AffineProjector::to_null_coords(const Matrix& y) const {
    return null_.transpose() * (sym_to_vec(0.5 * (y + y.transpose())) - particular_);
}

Matrix AffineProjector::from_null_coords(const Vector& t) const {
    return vec_to_sym(particular_ + null_ * t, n_);
}

Vector AffineProjector::direction_to_null_coords(const Matrix& g) const {
    return null_.transpose() * sym_to_vec(0.5 * (g + g.transpose()));
}

LyapunovSolver::LyapunovSolver(const Matrix& a) : n_(a.rows()) {
    Matrix k = Matrix::Zero(n_ * n_, n_ * n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
        k.block(j * n_, j * n_, n_, n_) = a;  // I (x) A
        for (Eigen::Index l = 0; l < n_; ++l) {
            k.block(j * n_, l * n_, n_, n_).diagonal().array() += a(j, l);  // A (x) I
        }
    }
    lu_.compute(k);
}

Matrix LyapunovSolver::solve(const Matrix& q) const {
    const Vector q_vec = Eigen::Map<const Vector>(q.data(), q.size());
    const Vector x_vec = lu_.solve(q_vec);
    Matrix       x     = Eigen::Map<const Matrix>(x_vec.data(), n_, n_);
    return 0.5 * (x + x.transpose());
}

namespace {

struct Residuals {
    double lin;
    double lyap_max;
    double y_min;
};

double max_eig_sym(const Matrix& s) {
    if (s.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

double min_eig_sym(const Matrix& s) {
    if (s.rows() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Residuals compute_residuals(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& y) {
    const Matrix ys = 0.5 * (y + y.transpose());
    Residuals    r;
    r.lin      = (b + a * ys * c.transpose()).norm();
    r.lyap_max = max_eig_sym(Matrix(a * ys + ys * a.transpose()));
    r.y_min    = min_eig_sym(ys);
    return r;
}

// eigenvalue clip of a symmetric matrix at a lower floor
Matrix clip_min_eig(const Matrix& s, double floor_value) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()));
    const Vector clipped = solver.eigenvalues().cwiseMax(floor_value);
    Matrix out = solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

// squared Frobenius norm of the PSD part (= squared distance to the NSD cone)
double psd_part_squared_norm(const Matrix& s) {
    if (s.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
    double                                acc = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double lambda = solver.eigenvalues()(i);
        if (lambda > 0.0) acc += lambda * lambda;
    }
    return acc;
}

Matrix psd_part(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()));
    const Vector clipped = solver.eigenvalues().cwiseMax(0.0);
    Matrix out = solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

// Diagonal similarity scaling with power-of-two entries (exactly invertible
// in floating point), LAPACK-balancing style. Conditions the solve for
// systems whose states live on very different magnitude scales (stiff modes).
Vector balance_scaling(const Matrix& a) {
    const Eigen::Index n  = a.rows();
    Matrix             wa = a;
    Vector             t  = Vector::Ones(n);
    for (int sweep = 0; sweep < 8; ++sweep) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                r += std::abs(wa(i, j));
                c += std::abs(wa(j, i));
            }
            if (r == 0.0 || c == 0.0) continue;
            const double f = std::exp2(std::round(0.5 * std::log2(c / r)));
            if (f == 1.0 || !(f > 1e-12) || !(f < 1e12)) continue;
            wa.row(i) *= f;
            wa.col(i) /= f;
            t(i) *= f;
            changed = true;
        }
        if (!changed) break;
    }
    return t;
}

struct CoreResult {
    bool      feasible = false;
    Matrix    y;
    int       iterations = 0;
    bool      stalled    = false;
    Residuals best{0.0, 0.0, 0.0};
};

// Alternating projections with Dykstra corrections, then a preconditioned
// descent on the affine manifold with Gauss-Newton boundary landing for
// instances whose feasible set touches the Lyapunov cone tangentially.
CoreResult solve_core(const Matrix& a, double eps_pd,
                      int max_iters, double residual_tol, const AffineProjector& proj,
                      const Matrix& a0, const Matrix& b0, const Matrix& c0, double eps_pd0,
                      const Vector& inv_scale, const Matrix& start_seed) {
    const Eigen::Index n = a.rows();
    CoreResult         out;

    const double macheps = std::numeric_limits<double>::epsilon();

    // Descent runs in the balanced coordinates, but acceptance is judged on
    // the certificate the caller will see: the mapped-back iterate and the
    // residuals recomputed on the original matrices, with a roundoff-floor
    // allowance (the exact solution itself cannot beat
    // eps_mach * ||A|| * ||Y|| when recomputed in doubles).
    const auto to_original = [&](const Matrix& y) {
        return Matrix(inv_scale.asDiagonal() * y * inv_scale.asDiagonal());
    };
    const auto original_residuals = [&](const Matrix& y) {
        return compute_residuals(a0, b0, c0, to_original(y));
    };
    const double a0_norm = a0.norm();
    const double c0_norm = c0.norm();
    const auto lyap_threshold = [&](const Matrix& y0) {
        return residual_tol + 256.0 * macheps * a0_norm * y0.norm();
    };
    const auto lin_limit = [&](const Matrix& y0) {
        return residual_tol * (1.0 + b0.norm()) +
               256.0 * macheps * a0_norm * y0.norm() * c0_norm;
    };
    const double y_floor = 0.5 * eps_pd0;
    const auto valid = [&](const Residuals& r, const Matrix& y) {
        const Matrix y0 = to_original(y);
        return r.lin <= lin_limit(y0) && r.lyap_max <= lyap_threshold(y0) && r.y_min >= y_floor;
    };
    const auto violation_score = [&](const Residuals& r, const Matrix& y) {
        const Matrix y0 = to_original(y);
        return std::max(0.0, r.lin - lin_limit(y0)) +
               std::max(0.0, r.lyap_max - lyap_threshold(y0)) +
               std::max(0.0, y_floor - r.y_min);
    };

    const LyapunovSolver lyap(a);

    // ---- phase 1: alternating projections with Dykstra corrections --------
    Matrix y      = proj.project(start_seed);
    Matrix p_corr = Matrix::Zero(n, n);
    Matrix q_corr = Matrix::Zero(n, n);

    Matrix    best_y     = y;
    double    best_score = std::numeric_limits<double>::infinity();
    Residuals best_res{0.0, 0.0, 0.0};
    int       last_improved = 0;
    int       iter          = 0;

    const int ap_cap = std::min(max_iters, 600);

    for (iter = 1; iter <= ap_cap; ++iter) {
        y = proj.project(y);

        const Residuals res = original_residuals(y);
        if (valid(res, y)) {
            out.feasible   = true;
            out.y          = y;
            out.iterations = iter;
            out.best       = res;
            return out;
        }
        const double score = violation_score(res, y);
        if (score < best_score - 1e-14) {
            best_score    = score;
            best_y        = y;
            best_res      = res;
            last_improved = iter;
        } else if (iter - last_improved >= 50) {
            out.stalled = true;
            break;
        }

        // shifted PSD cone {Y >= eps_pd I}
        Matrix w  = y + p_corr;
        Matrix yc = clip_min_eig(w, eps_pd);
        p_corr    = w - yc;
        y         = yc;

        // Lyapunov cone {A Y + Y A^T <= 0}: clip the image onto the NSD cone,
        // then pull the change back through one Lyapunov correction
        w = y + q_corr;
        const Matrix z =
            0.5 * ((a * w + w * a.transpose()) + (a * w + w * a.transpose()).transpose());
        const Matrix zn = z - psd_part(z);
        y               = w + lyap.solve(zn - z);
        q_corr          = w - y;
    }
    const int ap_used = std::min(iter, ap_cap);

    // ---- phase 2: descent on the affine manifold ---------------------------
    // Tangentially feasible instances (modal chains, the two-mass
    // uncertainty) leave alternating projections crawling along a quartic
    // flat. On the manifold the squared distance to the cone pair is smooth
    // and convex, so preconditioned conjugate-gradient descent localizes the
    // solution and a Gauss-Newton step on the frozen near-null cluster of
    // A Y + Y A^T lands on the cone boundary at quadratic rate.
    //
    // The manifold is parametrized in the balanced coordinates, but the
    // objective, its gradient and the Gauss-Newton system are evaluated on
    // the original matrices: that is the metric the certificate is judged in,
    // and the congruence map between the two is exact for power-of-two
    // scaling.
    const Eigen::Index d           = proj.null_dimension();
    int                polish_used = 0;
    if (d > 0) {
        const Matrix eps_eye0 = eps_pd0 * Matrix::Identity(n, n);

        const auto objective = [&](const Vector& t) {
            const Matrix y0 = to_original(proj.from_null_coords(t));
            const Matrix z0 = a0 * y0 + y0 * a0.transpose();
            return psd_part_squared_norm(0.5 * (z0 + z0.transpose())) +
                   psd_part_squared_norm(eps_eye0 - y0);
        };

        // original-coordinate Lyapunov images of the scaled null directions,
        // and their Gram matrix as the descent preconditioner
        std::vector<Matrix> images(static_cast<std::size_t>(d));
        Matrix              gram(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            Vector e            = Vector::Zero(d);
            e(i)                = 1.0;
            const Matrix basis0 =
                to_original(Matrix(proj.from_null_coords(e) - proj.particular()));
            images[static_cast<std::size_t>(i)] = a0 * basis0 + basis0 * a0.transpose();
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = i; j < d; ++j) {
                gram(i, j) = (images[static_cast<std::size_t>(i)].array() *
                              images[static_cast<std::size_t>(j)].array())
                                 .sum();
                gram(j, i) = gram(i, j);
            }
        }
        // clipped pseudo-inverse: stiff systems push kappa(Gram) past double
        // precision and a plain factorization would return garbage directions
        Eigen::SelfAdjointEigenSolver<Matrix> gram_eig(gram);
        const double gram_floor      = gram_eig.eigenvalues().maxCoeff() * 1e-10;
        const auto   gram_pinv_apply = [&](const Vector& v) {
            const Vector coeffs = gram_eig.eigenvectors().transpose() * v;
            Vector       scaled(coeffs.size());
            for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
                scaled(i) = coeffs(i) / std::max(gram_eig.eigenvalues()(i), gram_floor);
            }
            return Vector(gram_eig.eigenvectors() * scaled);
        };

        const Matrix scale_mat = inv_scale.asDiagonal();

        Vector t = proj.to_null_coords(best_y);
        {
            const Vector t_seed = proj.to_null_coords(start_seed);
            if (objective(t_seed) < objective(t)) {
                t = t_seed;
            }
        }
        const int polish_cap = std::min(400, std::max(0, max_iters - ap_used));

        Vector grad_prev, pgrad_prev, dir_prev;
        for (int step = 1; step <= polish_cap; ++step) {
            polish_used         = step;
            const Matrix    yt  = proj.from_null_coords(t);
            const Matrix    y0  = to_original(yt);
            const Residuals res = compute_residuals(a0, b0, c0, y0);
            if (valid(res, yt)) {
                out.feasible   = true;
                out.y          = yt;
                out.iterations = ap_used + step;
                out.best       = res;
                return out;
            }
            const double score = violation_score(res, yt);
            if (score < best_score) {
                best_score = score;
                best_y     = yt;
                best_res   = res;
            }

            const Matrix z0 = 0.5 * ((a0 * y0 + y0 * a0.transpose()) +
                                     (a0 * y0 + y0 * a0.transpose()).transpose());
            Eigen::SelfAdjointEigenSolver<Matrix> z_eig(z0);
            const Vector& z_values = z_eig.eigenvalues();
            const double  z_scale  = 1.0 + z_values.cwiseAbs().maxCoeff();
            const double  lam_pos  = std::max(0.0, z_values.maxCoeff());
            const double  f0       = objective(t);

            // Gauss-Newton boundary landing on the frozen near-null cluster
            // U0^T Z(t) U0 = 0, once the positive excursion is small
            if (lam_pos > 0.0 && lam_pos <= 1e-2 * z_scale) {
                bool         took      = false;
                Eigen::Index last_size = -1;
                for (const double window : {10.0, 1e3, 1e5}) {
                    std::vector<Eigen::Index> active;
                    for (Eigen::Index jx = 0; jx < z_values.size(); ++jx) {
                        if (z_values(jx) >= -window * lam_pos &&
                            z_values(jx) >= -0.5 * z_scale) {
                            active.push_back(jx);
                        }
                    }
                    const Eigen::Index h0 = static_cast<Eigen::Index>(active.size());
                    if (h0 == 0 || h0 == last_size) {
                        continue;
                    }
                    last_size = h0;

                    Matrix u0(n, h0);
                    for (Eigen::Index jx = 0; jx < h0; ++jx) {
                        u0.col(jx) =
                            z_eig.eigenvectors().col(active[static_cast<std::size_t>(jx)]);
                    }
                    const Vector resid = sym_to_vec(Matrix(u0.transpose() * z0 * u0));
                    Matrix       jac(h0 * (h0 + 1) / 2, d);
                    for (Eigen::Index ix = 0; ix < d; ++ix) {
                        jac.col(ix) = sym_to_vec(
                            Matrix(u0.transpose() * images[static_cast<std::size_t>(ix)] * u0));
                    }
                    const Vector delta =
                        Eigen::CompleteOrthogonalDecomposition<Matrix>(jac).solve(-resid);
                    double damp = 1.0;
                    for (int trial = 0; trial < 4 && !took; ++trial, damp *= 0.5) {
                        const Vector t2 = t + damp * delta;
                        if (objective(t2) < f0) {
                            t    = t2;
                            took = true;
                        }
                    }
                    if (took) {
                        break;
                    }
                }
                if (took) {
                    grad_prev.resize(0);
                    dir_prev.resize(0);
                    continue;
                }
            }

            // preconditioned Polak-Ribiere conjugate gradient step
            const Matrix pz = psd_part(z0);
            const Matrix pf = psd_part(eps_eye0 - y0);
            const Matrix az = a0.transpose() * pz + pz * a0;
            // pull the original-coordinate gradient back through the
            // congruence before projecting onto the manifold directions
            const Vector grad = proj.direction_to_null_coords(
                Matrix(scale_mat * (az + az.transpose() - 2.0 * pf) * scale_mat));

            if (grad.norm() <= 1e-16 * (1.0 + t.norm()) || f0 <= 1e-30) {
                break;  // at the constrained minimum, still not valid
            }

            Vector pgrad = gram_pinv_apply(grad);
            if (!pgrad.allFinite() || grad.dot(pgrad) <= 0.0) {
                pgrad = grad;
            }
            Vector dir;
            if (dir_prev.size() == 0) {
                dir = -pgrad;
            } else {
                const double denom = grad_prev.dot(pgrad_prev);
                const double beta =
                    denom > 0.0 ? std::max(0.0, (grad - grad_prev).dot(pgrad) / denom) : 0.0;
                dir = -pgrad + beta * dir_prev;
                if (grad.dot(dir) >= 0.0) {
                    dir = -pgrad;
                }
            }
            grad_prev  = grad;
            pgrad_prev = pgrad;

            // bracket a decrease, then ternary-search the convex section
            double alpha = (1.0 + t.norm()) / (1.0 + dir.norm());
            double f_a   = objective(t + alpha * dir);
            int    guard = 0;
            while (f_a >= f0 && guard++ < 60) {
                alpha *= 0.5;
                f_a = objective(t + alpha * dir);
            }
            if (f_a >= f0) {
                break;  // no descent at representable steps
            }
            guard = 0;
            while (guard++ < 60) {
                const double a2 = 2.0 * alpha;
                const double f2 = objective(t + a2 * dir);
                if (f2 < f_a) {
                    alpha = a2;
                    f_a   = f2;
                } else {
                    break;
                }
            }
            double lo = 0.0;
            double hi = 2.0 * alpha;
            for (int k = 0; k < 48; ++k) {
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                if (objective(t + m1 * dir) < objective(t + m2 * dir)) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            const double alpha_star = 0.5 * (lo + hi);
            t += (objective(t + alpha_star * dir) < f0) ? alpha_star * dir : alpha * dir;
            dir_prev = dir;
        }

        const Matrix    yt  = proj.from_null_coords(t);
        const Residuals res = compute_residuals(a0, b0, c0, to_original(yt));
        if (valid(res, yt)) {
            out.feasible   = true;
            out.y          = yt;
            out.iterations = ap_used + polish_used;
            out.best       = res;
            return out;
        }
        if (violation_score(res, yt) < best_score) {
            best_score = violation_score(res, yt);
            best_y     = yt;
            best_res   = res;
        }
    }

    out.y          = best_y;
    out.iterations = ap_used + polish_used;
    out.best       = best_res;
    return out;
}

}  // namespace

}  // namespace detail

FeasibilityProblem::FeasibilityProblem(Matrix a_in, Matrix b_in, Matrix c_in)
    : FeasibilityProblem(std::move(a_in), std::move(b_in), std::move(c_in), 0.0, 5000, 1e-8) {
    eps_pd = default_eps_pd(a, b);
}

FeasibilityProblem::FeasibilityProblem(Matrix a_in, Matrix b_in, Matrix c_in, double eps_pd_in,
                                       int max_iters_in, double residual_tol_in)
    : a(std::move(a_in)), b(std::move(b_in)), c(std::move(c_in)), eps_pd(eps_pd_in),
      max_iters(max_iters_in), residual_tol(residual_tol_in) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("FeasibilityProblem: A must be square");
    }
    if (b.rows() != a.rows() || c.cols() != a.rows() || c.rows() != b.cols()) {
        throw std::invalid_argument("FeasibilityProblem: dimension mismatch");
    }
    if (max_iters < 1 || !(residual_tol > 0.0)) {
        throw std::invalid_argument("FeasibilityProblem: invalid solver configuration");
    }
}

double FeasibilityProblem::default_eps_pd(const Matrix& a, const Matrix& b) {
    if (a.rows() == 0) {
        return 1e-6;
    }
    return 1e-6 * (1.0 + solve_linear(a, b).norm());
}

FeasibilityProblem FeasibilityProblem::from_system(const StateSpaceSystem& sys) {
    return FeasibilityProblem(sys.a, sys.b, sys.c);
}

NiCertificate certificate_from_y(const StateSpaceSystem& sys, const Matrix& y, int iterations) {
    if (y.rows() != sys.order() || y.cols() != sys.order()) {
        throw std::invalid_argument("certificate_from_y: Y must be n x n");
    }
    const auto    res = detail::compute_residuals(sys.a, sys.b, sys.c, y);
    NiCertificate cert;
    cert.y            = 0.5 * (y + y.transpose());
    cert.lin_residual = res.lin;
    cert.lyap_max_eig = res.lyap_max;
    cert.y_min_eig    = res.y_min;
    cert.iterations   = iterations;
    return cert;
}

bool verify_certificate(const StateSpaceSystem& sys, const NiCertificate& cert,
                        const Tolerances& tol) {
    tol.validate();
    if (cert.y.rows() != sys.order() || cert.y.cols() != sys.order() || !all_finite(cert.y)) {
        return false;
    }
    if (sys.order() == 0) {
        return sys.b.norm() == 0.0;
    }
    const double asym = (cert.y - cert.y.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * (1.0 + cert.y.cwiseAbs().maxCoeff())) {
        return false;
    }
    const auto res = detail::compute_residuals(sys.a, sys.b, sys.c, cert.y);

    // thresholds carry the double-precision representability floor in
    // addition to the configured tolerance
    const double macheps = std::numeric_limits<double>::epsilon();
    const double round_floor =
        256.0 * macheps * sys.a.norm() * cert.y.norm() * std::max(1.0, sys.c.norm());
    return res.lin <= tol.eq_tol * (1.0 + sys.b.norm()) + round_floor &&
           res.lyap_max <= tol.eq_tol + round_floor && res.y_min > tol.psd_tol;
}

FeasibilityOutcome solve_ni_feasibility(const FeasibilityProblem& problem) {
    const Eigen::Index n = problem.a.rows();
    if (!(problem.eps_pd > 0.0)) {
        throw std::invalid_argument("solve_ni_feasibility: eps_pd must be strictly positive");
    }

    FeasibilityOutcome outcome;

    if (n == 0) {
        // static system: the constraint set is vacuous, the empty Y certifies
        outcome.status = FeasibilityOutcome::Status::Feasible;
        NiCertificate cert;
        cert.y         = Matrix::Zero(0, 0);
        cert.y_min_eig = std::numeric_limits<double>::infinity();
        outcome.certificate           = cert;
        outcome.diagnostics.y_min_eig = cert.y_min_eig;
        return outcome;
    }

    {
        double max_real = -std::numeric_limits<double>::infinity();
        for (const Complex& lambda : eigenvalues(problem.a)) {
            max_real = std::max(max_real, lambda.real());
        }
        if (!(max_real < -1e-9)) {
            throw std::invalid_argument("solve_ni_feasibility: A is not Hurwitz");
        }
    }

    // balance the state coordinates; power-of-two scaling is exactly
    // invertible, so the certificate maps back without extra roundoff
    const Vector t_scale = detail::balance_scaling(problem.a);
    const Matrix a       = t_scale.asDiagonal() * problem.a * t_scale.cwiseInverse().asDiagonal();
    const Matrix b       = t_scale.asDiagonal() * problem.b;
    const Matrix c       = problem.c * t_scale.cwiseInverse().asDiagonal();
    const double t_max   = t_scale.maxCoeff();
    const double eps_scaled = problem.eps_pd * t_max * t_max;

    // B = -A Y C^T  <=>  Y C^T = -A^-1 B   (A nonsingular since Hurwitz)
    const Matrix                  g = -solve_linear(a, b, 1e-14);
    const detail::AffineProjector proj(g, c);

    if (!proj.consistent()) {
        outcome.diagnostics.affine_consistent = false;
        outcome.diagnostics.note =
            "linear constraint B = -A Y C^T has no symmetric solution (least-squares residual " +
            std::to_string(proj.consistency_residual()) + ")";
        const auto res = detail::compute_residuals(a, b, c, proj.particular());
        outcome.diagnostics.lin_residual = res.lin;
        outcome.diagnostics.lyap_max_eig = res.lyap_max;
        outcome.diagnostics.y_min_eig    = res.y_min;
        return outcome;
    }

    detail::CoreResult core = detail::solve_core(
        a, eps_scaled, problem.max_iters, problem.residual_tol, proj, problem.a, problem.b,
        problem.c, problem.eps_pd, Vector(t_scale.cwiseInverse()),
        Matrix::Identity(n, n));

    if (!core.feasible) {
        // fall back to a start at the gain scale of the affine set; the
        // constraints are positively homogeneous and an instance with gain
        // far from one never converges from the unit-scale start
        const double yp_norm = proj.particular().norm();
        const double scale   = yp_norm > 0.0
                                   ? std::max(yp_norm / std::sqrt(static_cast<double>(n)),
                                              eps_scaled)
                                   : 1.0;
        if (scale < 0.2 || scale > 5.0) {
            const detail::CoreResult rescue = detail::solve_core(
                a, eps_scaled, problem.max_iters, problem.residual_tol, proj, problem.a,
                problem.b, problem.c, problem.eps_pd, Vector(t_scale.cwiseInverse()),
                Matrix(scale * Matrix::Identity(n, n)));
            if (rescue.feasible) {
                core = rescue;
            }
        }
    }

    // map the iterate back to the original coordinates
    const Matrix y_orig = t_scale.cwiseInverse().asDiagonal() * core.y *
                          t_scale.cwiseInverse().asDiagonal();
    const auto res = detail::compute_residuals(problem.a, problem.b, problem.c, y_orig);

    outcome.diagnostics.lin_residual = res.lin;
    outcome.diagnostics.lyap_max_eig = res.lyap_max;
    outcome.diagnostics.y_min_eig    = res.y_min;
    outcome.diagnostics.iterations   = core.iterations;
    outcome.diagnostics.stalled      = core.stalled;

    if (core.feasible) {
        outcome.status = FeasibilityOutcome::Status::Feasible;
        NiCertificate cert;
        cert.y            = 0.5 * (y_orig + y_orig.transpose());
        cert.lin_residual = res.lin;
        cert.lyap_max_eig = res.lyap_max;
        cert.y_min_eig    = res.y_min;
        cert.iterations   = core.iterations;
        outcome.certificate = cert;
    } else {
        outcome.diagnostics.note = "not proven feasible within iteration budget";
    }
    return outcome;
}

}  // namespace nitool
