#ifndef DRAWRES_ANFIS_HPP
#define DRAWRES_ANFIS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "drawres/core.hpp"
#include "drawres/scaling.hpp"

namespace drawres {

/// First-order Sugeno rule base with generalized-bell Gaussian premises.
///
/// Rule r fires with strength w_r = prod_i mu_ri(x_i), where
///   mu_ri(x) = exp(-[((x - c_ri) / a_ri)^2]^b_ri),
/// and contributes f_r(x) = coef_r . x + bias_r. Every (rule, input) pair owns its
/// own {a, b, c}.
template <typename Scalar>
struct BasicFuzzyRuleBase {
  Matrix<Scalar> a; // rules x inputs, > 0
  Matrix<Scalar> b; // rules x inputs, > 0
  Matrix<Scalar> c; // rules x inputs
  Matrix<Scalar> coef;
  Vector<Scalar> bias;

  Index rules() const { return a.rows(); }
  Index inputs() const { return a.cols(); }

  static BasicFuzzyRuleBase zeros(Index rules, Index inputs) {
    BasicFuzzyRuleBase f;
    f.a = Matrix<Scalar>::Ones(rules, inputs);
    f.b = Matrix<Scalar>::Ones(rules, inputs);
    f.c = Matrix<Scalar>::Zero(rules, inputs);
    f.coef = Matrix<Scalar>::Zero(rules, inputs);
    f.bias = Vector<Scalar>::Zero(rules);
    return f;
  }
};
using FuzzyRuleBase = BasicFuzzyRuleBase<double>;

/// Layer-by-layer values of one evaluation.
template <typename Scalar>
struct BasicEvalTrace {
  Matrix<Scalar> membership;     // layer 1, rules x inputs, floored at the smallest normal
  Matrix<Scalar> log_membership; // exact layer 1 in the log domain
  Vector<Scalar> strength;    // layer 2, w
  Vector<Scalar> normalized;  // layer 3, w-bar
  Vector<Scalar> rule_output; // layer 4, w-bar * f
  Scalar output{};            // layer 5
};
using EvalTrace = BasicEvalTrace<double>;

namespace detail {

template <typename Scalar>
Scalar log_membership(Scalar x, Scalar a, Scalar b, Scalar c) {
  const Scalar u = (x - c) / a;
  return -std::pow(u * u, b);
}

} // namespace detail

/// Evaluates the rule base at x. Normalization runs in the log domain, so it stays
/// defined when every raw strength underflows; throws DomainError("no rule fires")
/// if the log strengths are themselves degenerate.
template <typename Scalar, typename Derived>
Scalar anfis_eval(const BasicFuzzyRuleBase<Scalar> &fis, const Eigen::MatrixBase<Derived> &x,
                  BasicEvalTrace<Scalar> *trace = nullptr) {
  const Index R = fis.rules(), d = fis.inputs();
  if (x.size() != d)
    throw DomainError("anfis_eval: input has " + std::to_string(x.size()) +
                      " values, rule base expects " + std::to_string(d));
  Vector<Scalar> log_w(R);
  if (trace) {
    trace->membership.resize(R, d);
    trace->log_membership.resize(R, d);
  }
  for (Index r = 0; r < R; ++r) {
    Scalar s(0);
    for (Index i = 0; i < d; ++i) {
      const Scalar lm = detail::log_membership<Scalar>(x(i), fis.a(r, i), fis.b(r, i), fis.c(r, i));
      s += lm;
      if (trace) {
        trace->log_membership(r, i) = lm;
        trace->membership(r, i) =
            std::max(Scalar(std::exp(lm)), Scalar(std::numeric_limits<double>::min()));
      }
    }
    log_w[r] = s;
  }
  const Scalar top = log_w.maxCoeff();
  if (!std::isfinite(static_cast<double>(top)))
    throw DomainError("anfis_eval: no rule fires");
  const Vector<Scalar> shifted = (log_w.array() - top).exp().matrix();
  const Vector<Scalar> w_bar = shifted / shifted.sum();
  const Vector<Scalar> f = fis.coef * x.template cast<Scalar>() + fis.bias;
  const Vector<Scalar> rule_out = w_bar.cwiseProduct(f);
  const Scalar out = rule_out.sum();
  if (trace) {
    trace->strength = log_w.array().exp().matrix();
    trace->normalized = w_bar;
    trace->rule_output = rule_out;
    trace->output = out;
  }
  return out;
}

/// Normalized firing strengths for every row of X (rows x rules).
MatrixXd anfis_normalized_strengths(const FuzzyRuleBase &fis, const Ref<const MatrixXd> &X);

/// Outputs for every row of X.
VectorXd anfis_predict(const FuzzyRuleBase &fis, const Ref<const MatrixXd> &X);

struct PremiseGradient {
  MatrixXd a, b, c; // rules x inputs
};

/// Training MSE of the rule base; fills the premise gradient when non-null.
double anfis_mse(const FuzzyRuleBase &fis, const Ref<const MatrixXd> &X,
                 const Ref<const VectorXd> &y, PremiseGradient *grad = nullptr);

/// One rule per center (rows of `centers`): c = center, a = per-input standard
/// deviation of X (floored at 1e-6), b = 1; consequents by least squares.
FuzzyRuleBase anfis_init(const Ref<const MatrixXd> &centers, const Ref<const MatrixXd> &X,
                         const Ref<const VectorXd> &y);

/// Replaces the consequents by the least-squares solution of the system whose row
/// blocks are w-bar_r * [x, 1]. Singular values below 1e-10 * sigma_max count as
/// zero (minimum-norm solution); `rank_deficient` reports whether that happened.
FuzzyRuleBase anfis_ls_consequents(FuzzyRuleBase fis, const Ref<const MatrixXd> &X,
                                   const Ref<const VectorXd> &y,
                                   bool *rank_deficient = nullptr);

struct HybridOptions {
  int epochs = 50;
  double learning_rate = 0.05; // Euclidean length of each premise step
};

/// Per epoch: least-squares consequents, then one normalized-gradient step on the
/// premises. An epoch that worsens the MSE halves the rate and retries once; a
/// second failure leaves the premises unchanged. `history` receives the MSE after
/// each epoch. Throws DomainError for epochs < 1 and DivergenceError naming the
/// rule and input of a non-finite gradient.
FuzzyRuleBase anfis_train_hybrid(FuzzyRuleBase fis, const Ref<const MatrixXd> &X,
                                 const Ref<const VectorXd> &y, const HybridOptions &options,
                                 std::vector<double> *history = nullptr);

/// Rule base acting on z-scored inputs and targets.
struct AnfisModel {
  FuzzyRuleBase fis;
  Standardizer input_scaling;
  TargetScaler target_scaling;

  VectorXd predict(const Ref<const MatrixXd> &X) const {
    return target_scaling.inverse(anfis_predict(fis, input_scaling.transform(X)));
  }
};

} // namespace drawres

#endif // DRAWRES_ANFIS_HPP
