#include "kml/spectral.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "kml/errors.hpp"

namespace kml {

namespace {

Eigen::MatrixXd grid_points_matrix(const QuadratureGrid& grid) {
    const std::size_t n = grid.size();
    const int d = grid.dimension();
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = grid.point(i);
        for (int a = 0; a < d; ++a) pts(static_cast<Eigen::Index>(i), a) = p[static_cast<std::size_t>(a)];
    }
    return pts;
}

std::vector<double> uniform_axis(int g) {
    std::vector<double> v(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) v[static_cast<std::size_t>(i)] = static_cast<double>(i) / (g - 1);
    return v;
}

// Kernel matrix rows k(x_r, z_j) for a list of evaluation points.
Eigen::MatrixXd kernel_cross(const RadialKernelSpec& kernel, const Eigen::MatrixXd& xs,
                             const Eigen::MatrixXd& zs) {
    Eigen::MatrixXd out(xs.rows(), zs.rows());
    std::vector<double> xbuf(static_cast<std::size_t>(xs.cols()));
    std::vector<double> zbuf(static_cast<std::size_t>(zs.cols()));
    for (Eigen::Index r = 0; r < xs.rows(); ++r) {
        for (Eigen::Index c = 0; c < xs.cols(); ++c) xbuf[static_cast<std::size_t>(c)] = xs(r, c);
        for (Eigen::Index j = 0; j < zs.rows(); ++j) {
            for (Eigen::Index c = 0; c < zs.cols(); ++c) zbuf[static_cast<std::size_t>(c)] = zs(j, c);
            out(r, j) = kernel_eval(kernel, xbuf, zbuf);
        }
    }
    return out;
}

// Tensor grid of G^d uniform points as a matrix.
Eigen::MatrixXd uniform_grid_matrix(int dim, int g) {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(g);
    const std::vector<double> axis = uniform_axis(g);
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), dim);
    std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (int a = 0; a < dim; ++a) pts(static_cast<Eigen::Index>(i), a) = axis[idx[static_cast<std::size_t>(a)]];
        for (int a = dim - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < static_cast<std::size_t>(g)) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
    return pts;
}

} // namespace

SpectralModel build_model(const RadialKernelSpec& kernel, int q) {
    if (q < 8) throw size_error("build_model: q must be >= 8");
    QuadratureGrid grid(kernel.dim, q, kernel.density);
    const std::size_t n = grid.size();

    Eigen::VectorXd scale(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        scale(static_cast<Eigen::Index>(i)) = std::sqrt(grid.weight(i) * grid.density_value(i));

    const Eigen::MatrixXd pts = grid_points_matrix(grid);
    Eigen::MatrixXd b = kernel_cross(kernel, pts, pts);
    for (Eigen::Index i = 0; i < b.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) *= scale(i) * scale(j);
    // enforce exact symmetry against rounding in the kernel evaluations
    b = 0.5 * (b + b.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    if (solver.info() != Eigen::Success)
        throw numerical_error("build_model: eigensolver failed to converge");

    const Eigen::VectorXd ev = solver.eigenvalues();   // ascending
    const double mu1 = ev(ev.size() - 1);
    if (!(mu1 > 0.0)) throw numerical_error("build_model: leading eigenvalue not positive");
    const double cutoff = SpectralModel::kRankCutoff * mu1;
    // Discretization round-off produces eigenvalues of either sign near zero;
    // anything markedly negative means the kernel is not PSD.
    if (ev(0) < -1e-12 * mu1)
        throw numerical_error("build_model: negative eigenvalue above cutoff, kernel not PSD");

    int rank = 0;
    for (Eigen::Index i = ev.size() - 1; i >= 0; --i) {
        if (ev(i) > cutoff) ++rank;
        else break;
    }
    if (rank == 0) throw numerical_error("build_model: numerical rank zero");

    SpectralModel model(std::move(grid), kernel);
    model.rank_ = rank;
    model.eigenvalues_.resize(static_cast<std::size_t>(rank));
    model.phi_.resize(static_cast<Eigen::Index>(n), rank);
    for (int l = 0; l < rank; ++l) {
        const Eigen::Index col = ev.size() - 1 - l;
        model.eigenvalues_[static_cast<std::size_t>(l)] = ev(col);
        model.phi_.col(l) = solver.eigenvectors().col(col).cwiseQuotient(scale);
    }
    return model;
}

Eigen::VectorXd SpectralModel::eigenfunction_nodes(int l) const {
    if (l < 1 || l > rank_) throw index_error("eigenfunction_nodes: index beyond rank");
    return phi_.col(l - 1);
}

double SpectralModel::nystrom_extend(int l, std::span<const double> x) const {
    if (l < 1 || l > rank_) throw index_error("nystrom_extend: index beyond rank");
    if (x.size() != static_cast<std::size_t>(grid_.dimension()))
        throw shape_error("nystrom_extend: point dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i)
        s += grid_.weight(i) * grid_.density_value(i) *
             kernel_eval(kernel_, x, grid_.point(i)) *
             phi_(static_cast<Eigen::Index>(i), l - 1);
    return s / eigenvalues_[static_cast<std::size_t>(l - 1)];
}

double SpectralModel::apply_operator(std::span<const double> f,
                                     std::span<const double> y) const {
    if (f.size() != grid_.size()) throw shape_error("apply_operator: node vector size mismatch");
    if (y.size() != static_cast<std::size_t>(grid_.dimension()))
        throw shape_error("apply_operator: point dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i)
        s += grid_.weight(i) * grid_.density_value(i) * kernel_eval(kernel_, y, grid_.point(i)) *
             f[i];
    return s;
}

std::vector<double> SpectralModel::apply_operator_nodes(std::span<const double> f) const {
    if (f.size() != grid_.size()) throw shape_error("apply_operator: node vector size mismatch");
    std::vector<double> out(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = apply_operator(f, grid_.point(i));
    return out;
}

WeightFunctionRep weight_function(const SpectralModel& model, std::span<const double> x,
                                  double lambda) {
    if (lambda < 0.0) throw domain_error("weight_function: lambda must be >= 0");
    WeightFunctionRep rep;
    rep.lambda = lambda;
    rep.coefficients.resize(static_cast<std::size_t>(model.rank()));
    for (int l = 1; l <= model.rank(); ++l) {
        const double mu = model.eigenvalues()[static_cast<std::size_t>(l - 1)];
        const double phi_x = model.nystrom_extend(l, x);
        const double ratio = mu / (lambda + mu);
        rep.coefficients[static_cast<std::size_t>(l - 1)] = ratio * phi_x;
        rep.squared_l2_norm += ratio * ratio * phi_x * phi_x;
        rep.mixed_norm += ratio * phi_x * phi_x;
    }
    return rep;
}

double empirical_ninf(const SpectralModel& model, double lambda, int grid_resolution) {
    if (!(lambda > 0.0)) throw domain_error("empirical_ninf: lambda must be positive");
    if (grid_resolution < 3) throw domain_error("empirical_ninf: grid resolution must be >= 3");

    const QuadratureGrid& grid = model.grid();
    const Eigen::MatrixXd xs = uniform_grid_matrix(grid.dimension(), grid_resolution);
    const Eigen::MatrixXd zs = grid_points_matrix(grid);
    const Eigen::MatrixXd kx = kernel_cross(model.kernel(), xs, zs);

    // Extension of all retained eigenfunctions to the evaluation grid.
    Eigen::VectorXd wp(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i)
        wp(static_cast<Eigen::Index>(i)) = grid.weight(i) * grid.density_value(i);
    Eigen::MatrixXd ext = kx * wp.asDiagonal() * model.eigenfunction_table();
    for (int l = 0; l < model.rank(); ++l)
        ext.col(l) /= model.eigenvalues()[static_cast<std::size_t>(l)];

    double best = 0.0;
    for (Eigen::Index r = 0; r < ext.rows(); ++r) {
        double s = 0.0;
        for (int l = 0; l < model.rank(); ++l) {
            const double mu = model.eigenvalues()[static_cast<std::size_t>(l)];
            s += mu / (lambda + mu) * ext(r, l) * ext(r, l);
        }
        best = std::max(best, s);
    }
    return best;
}

double empirical_sup_error(const SpectralModel& model, const ProductWeight& w,
                           std::span<const double> x, int grid_resolution) {
    if (grid_resolution < 3) throw domain_error("empirical_sup_error: grid resolution must be >= 3");
    const QuadratureGrid& grid = model.grid();
    if (w.dimension() != grid.dimension())
        throw shape_error("empirical_sup_error: weight dimension mismatch");

    const std::vector<double> f = w.node_values(grid);
    const Eigen::MatrixXd ys = uniform_grid_matrix(grid.dimension(), grid_resolution);
    double worst = 0.0;
    std::vector<double> ybuf(static_cast<std::size_t>(grid.dimension()));
    for (Eigen::Index r = 0; r < ys.rows(); ++r) {
        for (int a = 0; a < grid.dimension(); ++a) ybuf[static_cast<std::size_t>(a)] = ys(r, a);
        const double lhs = model.apply_operator(f, ybuf);
        const double err = std::abs(lhs - kernel_eval(model.kernel(), x, ybuf));
        worst = std::max(worst, err);
    }
    return worst;
}

double empirical_rkhs_error(const SpectralModel& model, const ProductWeight& w,
                            std::span<const double> x) {
    if (model.rank() == 0) throw numerical_error("empirical_rkhs_error: rank-zero model");
    const QuadratureGrid& grid = model.grid();
    const std::vector<double> f = w.node_values(grid);
    const std::vector<double> lf = model.apply_operator_nodes(f);

    double total = 0.0;
    for (int l = 1; l <= model.rank(); ++l) {
        const double mu = model.eigenvalues()[static_cast<std::size_t>(l - 1)];
        double inner = 0.0;   // <L_k W, phi_l> by quadrature
        const Eigen::VectorXd phi = model.eigenfunction_nodes(l);
        for (std::size_t i = 0; i < grid.size(); ++i)
            inner += grid.weight(i) * grid.density_value(i) * lf[i] *
                     phi(static_cast<Eigen::Index>(i));
        const double target = mu * model.nystrom_extend(l, x);   // <k_x, phi_l>
        const double diff = inner - target;
        total += diff * diff / mu;
    }
    return total;
}

DecayFit eigen_decay_fit(const SpectralModel& model) {
    if (model.rank() < 8) throw fit_error("eigen_decay_fit: requires rank >= 8");
    const int r = model.rank();
    const double d = static_cast<double>(model.grid().dimension());

    // Linear least squares on ln mu_l = lnC - c * t_l, t_l = (l+d)^{2/d}.
    double s_t = 0.0, s_tt = 0.0, s_y = 0.0, s_ty = 0.0;
    for (int l = 1; l <= r; ++l) {
        const double t = std::pow(l + d, 2.0 / d);
        const double y = std::log(model.eigenvalues()[static_cast<std::size_t>(l - 1)]);
        s_t += t;
        s_tt += t * t;
        s_y += y;
        s_ty += t * y;
    }
    const double n = static_cast<double>(r);
    const double det = n * s_tt - s_t * s_t;
    if (std::abs(det) < 1e-14) throw fit_error("eigen_decay_fit: degenerate design");
    const double slope = (n * s_ty - s_t * s_y) / det;   // = -c
    const double intercept = (s_y - slope * s_t) / n;    // = lnC

    DecayFit fit;
    fit.c_small = -slope;
    fit.c_big = std::exp(intercept);
    fit.residuals.resize(static_cast<std::size_t>(r));
    for (int l = 1; l <= r; ++l) {
        const double t = std::pow(l + d, 2.0 / d);
        const double y = std::log(model.eigenvalues()[static_cast<std::size_t>(l - 1)]);
        const double res = y - (intercept + slope * t);
        fit.residuals[static_cast<std::size_t>(l - 1)] = res;
        fit.max_residual = std::max(fit.max_residual, std::abs(res));
    }
    return fit;
}

BoundReport interpolation_check(const SpectralModel& model, std::span<const double> coefficients,
                                double s, double b, int grid_resolution) {
    if (!(s > 3.0)) throw domain_error("interpolation_check: s must exceed 3");
    if (coefficients.size() > static_cast<std::size_t>(model.rank()))
        throw index_error("interpolation_check: more coefficients than retained eigenpairs");

    const QuadratureGrid& grid = model.grid();
    const Eigen::MatrixXd xs = uniform_grid_matrix(grid.dimension(), grid_resolution);
    const Eigen::MatrixXd zs = grid_points_matrix(grid);
    const Eigen::MatrixXd kx = kernel_cross(model.kernel(), xs, zs);
    Eigen::VectorXd wp(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i)
        wp(static_cast<Eigen::Index>(i)) = grid.weight(i) * grid.density_value(i);

    Eigen::VectorXd fvals = Eigen::VectorXd::Zero(xs.rows());
    double norm2_sq = 0.0, norms_sq = 0.0;
    for (std::size_t l = 0; l < coefficients.size(); ++l) {
        const double c = coefficients[l];
        if (c == 0.0) continue;
        Eigen::VectorXd ext = kx * (wp.asDiagonal() * model.eigenfunction_table().col(
                                                          static_cast<Eigen::Index>(l)));
        ext /= model.eigenvalues()[l];
        fvals += c * ext;
        norm2_sq += c * c;
        norms_sq += c * c * std::pow(static_cast<double>(l + 1), 2.0 * s);
    }
    const double sup = fvals.cwiseAbs().maxCoeff();
    const double rhs = std::numbers::pi / std::sqrt(6.0) * b * std::pow(norms_sq, 1.5 / s) *
                       std::pow(norm2_sq, 0.5 * (1.0 - 3.0 / s));
    return make_bound_report("interpolation", "s=" + std::to_string(s), rhs, sup, 1e-12);
}

nlohmann::json to_json(const SpectralModel& model) {
    const RadialKernelSpec& k = model.kernel();
    if (k.family != RadialKernelSpec::Family::gaussian)
        throw domain_error("model serialization supports the Gaussian family only");
    nlohmann::json j;
    j["version"] = 1;
    j["kernel"] = {{"family", "gaussian"},
                   {"sigma", k.sigma},
                   {"dim", k.dim},
                   {"density", {{"name", k.density.name}, {"param", k.density.param}}}};
    j["grid"] = {{"dim", model.grid().dimension()}, {"q", model.grid().order()}};
    j["eigenvalues"] = model.eigenvalues();
    std::vector<std::vector<double>> phi(static_cast<std::size_t>(model.rank()));
    for (int l = 0; l < model.rank(); ++l) {
        phi[static_cast<std::size_t>(l)].resize(model.grid().size());
        for (std::size_t i = 0; i < model.grid().size(); ++i)
            phi[static_cast<std::size_t>(l)][i] =
                model.eigenfunction_table()(static_cast<Eigen::Index>(i), l);
    }
    j["phi"] = phi;
    return j;
}

SpectralModel model_from_json(const nlohmann::json& j) {
    if (!j.contains("version")) throw config_error("model cache: missing version field");
    if (j.at("version").get<int>() != 1) throw config_error("model cache: unsupported version");

    const auto& jk = j.at("kernel");
    const std::string density_name = jk.at("density").at("name").get<std::string>();
    DensityHandle density = density_name == "uniform"
                                ? uniform_density()
                                : perturbed_density(jk.at("density").at("param").get<double>());
    RadialKernelSpec kernel =
        gaussian_kernel(jk.at("sigma").get<double>(), jk.at("dim").get<int>(), density);

    QuadratureGrid grid(j.at("grid").at("dim").get<int>(), j.at("grid").at("q").get<int>(),
                        kernel.density);
    SpectralModel model(std::move(grid), std::move(kernel));
    model.eigenvalues_ = j.at("eigenvalues").get<std::vector<double>>();
    model.rank_ = static_cast<int>(model.eigenvalues_.size());
    const auto phi = j.at("phi").get<std::vector<std::vector<double>>>();
    if (phi.size() != model.eigenvalues_.size())
        throw config_error("model cache: eigenvector table does not match spectrum");
    model.phi_.resize(static_cast<Eigen::Index>(model.grid_.size()), model.rank_);
    for (int l = 0; l < model.rank_; ++l) {
        if (phi[static_cast<std::size_t>(l)].size() != model.grid_.size())
            throw config_error("model cache: eigenvector length does not match grid");
        for (std::size_t i = 0; i < model.grid_.size(); ++i)
            model.phi_(static_cast<Eigen::Index>(i), l) = phi[static_cast<std::size_t>(l)][i];
    }
    return model;
}

} // namespace kml
