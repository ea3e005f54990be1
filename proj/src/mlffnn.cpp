#include "drawres/mlffnn.hpp"

#include <cmath>
#include <random>

namespace drawres {

namespace {

MatrixXd hidden_activations(const MlffnnModel &m, const Ref<const MatrixXd> &Xn) {
  MatrixXd z = Xn * m.w_hidden.transpose();
  z.rowwise() += m.b_hidden.transpose();
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

/// Jacobian of the normalized outputs with respect to parameters(), one row per sample.
MatrixXd output_jacobian(const MlffnnModel &m, const Ref<const MatrixXd> &Xn,
                         const Ref<const MatrixXd> &H) {
  const Index n = Xn.rows(), d = m.inputs(), h = m.hidden();
  MatrixXd J(n, h * d + 2 * h + 1);
  for (Index j = 0; j < h; ++j) {
    const VectorXd delta =
        (H.col(j).array() * (1.0 - H.col(j).array()) * m.w_out[j]).matrix();
    J.middleCols(j * d, d) = Xn.array().colwise() * delta.array();
    J.col(h * d + j) = delta;
  }
  J.middleCols(h * d + h, h) = H;
  J.col(h * d + 2 * h).setOnes();
  return J;
}

} // namespace

std::string to_string(MlffnnVariant v) {
  return v == MlffnnVariant::GradientDescent ? "traingd" : "trainlm";
}

MlffnnVariant mlffnn_variant_from_string(const std::string &text) {
  if (text == "traingd" || text == "gradient-descent")
    return MlffnnVariant::GradientDescent;
  if (text == "trainlm" || text == "levenberg-marquardt")
    return MlffnnVariant::LevenbergMarquardt;
  throw DomainError("unknown MLFFNN training variant '" + text + "'");
}

VectorXd MlffnnModel::parameters() const {
  const Index d = inputs(), h = hidden();
  VectorXd p(h * d + 2 * h + 1);
  for (Index j = 0; j < h; ++j)
    p.segment(j * d, d) = w_hidden.row(j).transpose();
  p.segment(h * d, h) = b_hidden;
  p.segment(h * d + h, h) = w_out;
  p[h * d + 2 * h] = b_out;
  return p;
}

void MlffnnModel::set_parameters(const Ref<const VectorXd> &p) {
  const Index d = inputs(), h = hidden();
  if (p.size() != h * d + 2 * h + 1)
    throw DomainError("MlffnnModel: parameter vector has wrong length");
  for (Index j = 0; j < h; ++j)
    w_hidden.row(j) = p.segment(j * d, d).transpose();
  b_hidden = p.segment(h * d, h);
  w_out = p.segment(h * d + h, h);
  b_out = p[h * d + 2 * h];
}

VectorXd MlffnnModel::forward_normalized(const Ref<const MatrixXd> &Xn) const {
  if (hidden() == 0)
    return VectorXd::Constant(Xn.rows(), b_out);
  return (hidden_activations(*this, Xn) * w_out).array() + b_out;
}

VectorXd MlffnnModel::predict(const Ref<const MatrixXd> &X) const {
  return target_scaling.inverse(forward_normalized(input_scaling.transform(X)));
}

double mlffnn_mse(const MlffnnModel &m, const Ref<const MatrixXd> &Xn,
                  const Ref<const VectorXd> &yn, VectorXd *grad) {
  const MatrixXd H = hidden_activations(m, Xn);
  const VectorXd r = ((H * m.w_out).array() + m.b_out).matrix() - yn;
  const double n = static_cast<double>(Xn.rows());
  if (grad) {
    const Index d = m.inputs(), h = m.hidden();
    grad->resize(h * d + 2 * h + 1);
    const VectorXd g_scale = (2.0 / n) * r;
    // dL/dz_hidden = (2/n) r w_out h(1-h)
    const MatrixXd delta =
        ((g_scale * m.w_out.transpose()).array() * H.array() * (1.0 - H.array())).matrix();
    const MatrixXd gW = delta.transpose() * Xn; // h x d
    for (Index j = 0; j < h; ++j)
      grad->segment(j * d, d) = gW.row(j).transpose();
    grad->segment(h * d, h) = delta.colwise().sum().transpose();
    grad->segment(h * d + h, h) = H.transpose() * g_scale;
    (*grad)[h * d + 2 * h] = g_scale.sum();
  }
  return r.squaredNorm() / n;
}

MlffnnModel mlffnn_train(const Ref<const MatrixXd> &X, const Ref<const VectorXd> &y,
                         const MlffnnParams &params) {
  if (params.hidden < 1)
    throw DomainError("mlffnn_train: hidden width must be >= 1");
  if (X.rows() < params.hidden)
    throw DomainError("mlffnn_train: need at least as many rows as hidden nodes");
  if (X.rows() != y.size())
    throw DomainError("mlffnn_train: row count of X differs from length of y");
  if (!X.allFinite() || !y.allFinite())
    throw DomainError("mlffnn_train: non-finite input");

  MlffnnModel m;
  m.input_scaling = Standardizer::fit(X);
  m.target_scaling = TargetScaler::fit(y);
  const MatrixXd Xn = m.input_scaling.transform(X);
  const VectorXd yn = m.target_scaling.transform(y);
  const Index d = X.cols(), h = params.hidden;

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double in_range = 1.0 / std::sqrt(static_cast<double>(d));
  m.w_hidden = MatrixXd::NullaryExpr(h, d, [&] { return in_range * unit(rng); });
  m.b_hidden = VectorXd::NullaryExpr(h, [&] { return unit(rng); });
  const double out_range = 1.0 / std::sqrt(static_cast<double>(h));
  m.w_out = VectorXd::NullaryExpr(h, [&] { return out_range * unit(rng); });
  m.b_out = 0.0;

  double mse = mlffnn_mse(m, Xn, yn);
  int last_finite_epoch = 0;
  int stalled = 0;
  double mu = 1e-3;
  for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
    const double before = mse;
    if (params.variant == MlffnnVariant::GradientDescent) {
      VectorXd grad;
      mlffnn_mse(m, Xn, yn, &grad);
      m.set_parameters(m.parameters() - params.learning_rate * grad);
      mse = mlffnn_mse(m, Xn, yn);
    } else {
      const MatrixXd H = hidden_activations(m, Xn);
      const VectorXd r = ((H * m.w_out).array() + m.b_out).matrix() - yn;
      const MatrixXd J = output_jacobian(m, Xn, H);
      MatrixXd JtJ = MatrixXd::Zero(J.cols(), J.cols());
      JtJ.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose());
      const VectorXd Jtr = J.transpose() * r;
      const VectorXd p0 = m.parameters();
      bool accepted = false;
      while (mu < 1e10) {
        MatrixXd A = JtJ;
        A.diagonal().array() += mu;
        const VectorXd step = A.selfadjointView<Eigen::Lower>().ldlt().solve(-Jtr);
        m.set_parameters(p0 + step);
        const double trial = mlffnn_mse(m, Xn, yn);
        if (std::isfinite(trial) && trial < mse) {
          mse = trial;
          mu = std::max(mu * 0.1, 1e-12);
          accepted = true;
          break;
        }
        mu *= 10.0;
      }
      if (!accepted) {
        m.set_parameters(p0);
        break; // damping exhausted: at a local minimum
      }
    }
    if (!std::isfinite(mse))
      throw DivergenceError("mlffnn_train: training MSE became non-finite after epoch " +
                            std::to_string(last_finite_epoch));
    last_finite_epoch = epoch;
    stalled = (before - mse < 1e-8) ? stalled + 1 : 0;
    if (stalled >= 10)
      break;
  }
  return m;
}

} // namespace drawres
