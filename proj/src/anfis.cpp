#include "drawres/anfis.hpp"

#include <cmath>

namespace drawres {

namespace {

/// Row-wise log strengths (rows x rules).
MatrixXd log_strengths(const FuzzyRuleBase &fis, const Ref<const MatrixXd> &X) {
  const Index R = fis.rules();
  MatrixXd log_w(X.rows(), R);
  for (Index r = 0; r < R; ++r) {
    const Eigen::ArrayXXd t =
        (X.rowwise() - fis.c.row(r)).array().rowwise() / fis.a.row(r).array();
    const Eigen::ArrayXXd u = t.square();
    Eigen::ArrayXXd p(u.rows(), u.cols());
    for (Index i = 0; i < u.cols(); ++i) {
      if (fis.b(r, i) == 1.0)
        p.col(i) = u.col(i);
      else
        p.col(i) = u.col(i).pow(fis.b(r, i));
    }
    log_w.col(r) = -p.rowwise().sum();
  }
  return log_w;
}

MatrixXd normalize_rows(const MatrixXd &log_w) {
  const VectorXd top = log_w.rowwise().maxCoeff();
  if (!top.allFinite())
    throw DomainError("anfis_eval: no rule fires");
  MatrixXd w = (log_w.colwise() - top).array().exp().matrix();
  const VectorXd total = w.rowwise().sum();
  return w.array().colwise() / total.array();
}

/// Rule outputs f_r(x) for every row (rows x rules).
MatrixXd consequent_outputs(const FuzzyRuleBase &fis, const Ref<const MatrixXd> &X) {
  MatrixXd f = X * fis.coef.transpose();
  f.rowwise() += fis.bias.transpose();
  return f;
}

void check_shapes(const FuzzyRuleBase &fis, const Ref<const MatrixXd> &X,
                  const Ref<const VectorXd> &y) {
  if (X.cols() != fis.inputs())
    throw DomainError("anfis: input width differs from rule base");
  if (X.rows() != y.size())
    throw DomainError("anfis: row count of X differs from length of y");
  if (X.rows() == 0)
    throw DomainError("anfis: no training rows");
}

} // namespace

MatrixXd anfis_normalized_strengths(const FuzzyRuleBase &fis, const Ref<const MatrixXd> &X) {
  if (X.cols() != fis.inputs())
    throw DomainError("anfis: input width differs from rule base");
  return normalize_rows(log_strengths(fis, X));
}

VectorXd anfis_predict(const FuzzyRuleBase &fis, const Ref<const MatrixXd> &X) {
  const MatrixXd w_bar = anfis_normalized_strengths(fis, X);
  return w_bar.cwiseProduct(consequent_outputs(fis, X)).rowwise().sum();
}

double anfis_mse(const FuzzyRuleBase &fis, const Ref<const MatrixXd> &X,
                 const Ref<const VectorXd> &y, PremiseGradient *grad) {
  check_shapes(fis, X, y);
  const MatrixXd w_bar = normalize_rows(log_strengths(fis, X));
  const MatrixXd f = consequent_outputs(fis, X);
  const VectorXd out = w_bar.cwiseProduct(f).rowwise().sum();
  const VectorXd err = out - y;
  const double n = static_cast<double>(X.rows());
  if (grad) {
    const Index R = fis.rules(), d = fis.inputs();
    grad->a.setZero(R, d);
    grad->b.setZero(R, d);
    grad->c.setZero(R, d);
    for (Index r = 0; r < R; ++r) {
      // dL / dlog w_r per row
      const Eigen::ArrayXd g =
          (2.0 / n) * err.array() * w_bar.col(r).array() * (f.col(r) - out).array();
      for (Index i = 0; i < d; ++i) {
        const double a = fis.a(r, i), b = fis.b(r, i), c = fis.c(r, i);
        double ga = 0.0, gb = 0.0, gc = 0.0;
        for (Index k = 0; k < X.rows(); ++k) {
          const double t = (X(k, i) - c) / a;
          const double u = t * t;
          if (u == 0.0)
            continue;
          const double p = b == 1.0 ? u : std::pow(u, b);
          // log mu = -p
          ga += g[k] * (2.0 * b * p / a);
          gb += g[k] * (-p * std::log(u));
          gc += g[k] * (2.0 * b * p / (t * a));
        }
        grad->a(r, i) = ga;
        grad->b(r, i) = gb;
        grad->c(r, i) = gc;
      }
    }
  }
  return err.squaredNorm() / n;
}

FuzzyRuleBase anfis_init(const Ref<const MatrixXd> &centers, const Ref<const MatrixXd> &X,
                         const Ref<const VectorXd> &y) {
  if (centers.rows() < 1)
    throw DomainError("anfis_init: need at least one center");
  if (centers.cols() != X.cols())
    throw DomainError("anfis_init: center width differs from input width");
  const Index R = centers.rows(), d = X.cols();
  FuzzyRuleBase fis = FuzzyRuleBase::zeros(R, d);
  const VectorXd mean = X.colwise().mean().transpose();
  for (Index i = 0; i < d; ++i) {
    const double var = (X.col(i).array() - mean[i]).square().mean();
    fis.a.col(i).setConstant(std::max(std::sqrt(var), 1e-6));
  }
  fis.c = centers;
  return anfis_ls_consequents(std::move(fis), X, y);
}

FuzzyRuleBase anfis_ls_consequents(FuzzyRuleBase fis, const Ref<const MatrixXd> &X,
                                   const Ref<const VectorXd> &y, bool *rank_deficient) {
  check_shapes(fis, X, y);
  const Index R = fis.rules(), d = fis.inputs(), n = X.rows();
  const MatrixXd w_bar = anfis_normalized_strengths(fis, X);
  MatrixXd A(n, R * (d + 1));
  for (Index r = 0; r < R; ++r) {
    A.middleCols(r * (d + 1), d) = X.array().colwise() * w_bar.col(r).array();
    A.col(r * (d + 1) + d) = w_bar.col(r);
  }
  Eigen::BDCSVD<MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const VectorXd theta = svd.solve(y);
  if (rank_deficient)
    *rank_deficient = svd.rank() < A.cols();
  for (Index r = 0; r < R; ++r) {
    fis.coef.row(r) = theta.segment(r * (d + 1), d).transpose();
    fis.bias[r] = theta[r * (d + 1) + d];
  }
  return fis;
}

FuzzyRuleBase anfis_train_hybrid(FuzzyRuleBase fis, const Ref<const MatrixXd> &X,
                                 const Ref<const VectorXd> &y, const HybridOptions &options,
                                 std::vector<double> *history) {
  if (options.epochs < 1)
    throw DomainError("anfis_train_hybrid: epochs must be >= 1");
  double rate = options.learning_rate;
  auto clamp_premises = [](FuzzyRuleBase &f) {
    f.a = f.a.cwiseMax(1e-6);
    f.b = f.b.cwiseMax(0.5).cwiseMin(5.0);
  };
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    fis = anfis_ls_consequents(std::move(fis), X, y);
    PremiseGradient g;
    const double mse = anfis_mse(fis, X, y, &g);
    for (Index r = 0; r < fis.rules(); ++r)
      for (Index i = 0; i < fis.inputs(); ++i)
        if (!std::isfinite(g.a(r, i)) || !std::isfinite(g.b(r, i)) || !std::isfinite(g.c(r, i)))
          throw DivergenceError("anfis_train_hybrid: non-finite premise gradient at rule " +
                                std::to_string(r) + ", input " + std::to_string(i) +
                                " (epoch " + std::to_string(epoch + 1) + ")");
    const double norm =
        std::sqrt(g.a.squaredNorm() + g.b.squaredNorm() + g.c.squaredNorm());
    double best = mse;
    if (norm > 0.0) {
      for (int attempt = 0; attempt < 2; ++attempt) {
        FuzzyRuleBase trial = fis;
        const double s = rate / norm;
        trial.a -= s * g.a;
        trial.b -= s * g.b;
        trial.c -= s * g.c;
        clamp_premises(trial);
        const double trial_mse = anfis_mse(trial, X, y);
        if (std::isfinite(trial_mse) && trial_mse <= mse) {
          fis = std::move(trial);
          best = trial_mse;
          break;
        }
        rate *= 0.5;
      }
    }
    if (history)
      history->push_back(best);
  }
  return anfis_ls_consequents(std::move(fis), X, y);
}

} // namespace drawres
