#include "drawres/models.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "drawres/text.hpp"

namespace drawres {

namespace {

const char *const kHeader = "drawres-model 1";

AnfisModel fit_anfis(const SampleSet &train, const ModelSpec &spec, std::vector<double> &history) {
  AnfisModel m;
  m.input_scaling = Standardizer::fit(train.X);
  m.target_scaling = TargetScaler::fit(train.y);
  const MatrixXd Xn = m.input_scaling.transform(train.X);
  const VectorXd yn = m.target_scaling.transform(train.y);

  // clusters live in the joint input/output space; premises use the input part
  MatrixXd joint(Xn.rows(), Xn.cols() + 1);
  joint << Xn, yn;
  MatrixXd centers;
  if (spec.kind == ModelKind::AnfisSc) {
    centers = subtractive_clusters(joint, spec.subtractive);
  } else {
    FcmParams fp = spec.fcm;
    fp.seed = derive_seed(spec.seed, 11);
    centers = fcm_clusters(joint, fp).centers;
  }
  FuzzyRuleBase fis = anfis_init(centers.leftCols(Xn.cols()), Xn, yn);
  fis = anfis_train_hybrid(std::move(fis), Xn, yn, spec.hybrid, &history);

  if (spec.kind == ModelKind::AnfisGa || spec.kind == ModelKind::AnfisPso) {
    std::variant<GaParams, PsoParams> method;
    if (spec.kind == ModelKind::AnfisGa) {
      GaParams g = spec.ga;
      g.seed = derive_seed(spec.seed, 12);
      method = g;
    } else {
      PsoParams p = spec.pso;
      p.seed = derive_seed(spec.seed, 13);
      method = p;
    }
    TuningResult tuned = anfis_metaheuristic_train(Xn, yn, fis, method, spec.tuning);
    fis = std::move(tuned.fis);
    history = std::move(tuned.history);
  }
  m.fis = std::move(fis);
  return m;
}

// --- serialization helpers -------------------------------------------------

void put_vec(std::ostream &out, const std::string &key, const Ref<const VectorXd> &v) {
  out << key << ' ' << v.size();
  for (Index i = 0; i < v.size(); ++i)
    out << ' ' << text::format_double(v[i]);
  out << '\n';
}

void put_mat(std::ostream &out, const std::string &key, const MatrixXd &m) {
  out << key << ' ' << m.size() << ' ' << m.rows() << ' ' << m.cols();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      out << ' ' << text::format_double(m(r, c));
  out << '\n';
}

void put(std::ostream &out, const std::string &key, double v) {
  out << key << " 1 " << text::format_double(v) << '\n';
}

class Records {
public:
  explicit Records(std::istream &in) {
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (no == 1) {
        if (line != kHeader)
          throw ParseError(1, "not a drawres model file (expected '" + std::string(kHeader) + "')");
        continue;
      }
      if (text::trim(line).empty())
        continue;
      std::istringstream ls(line);
      std::string key;
      ls >> key;
      std::vector<std::string> tok;
      std::string t;
      while (ls >> t)
        tok.push_back(t);
      lines_[key] = {no, std::move(tok)};
    }
    if (no == 0)
      throw ParseError(0, "empty model file");
  }

  bool has(const std::string &key) const { return lines_.count(key) != 0; }

  std::vector<std::string> words(const std::string &key) const {
    const auto &e = entry(key);
    return {e.tok.begin() + 1, e.tok.end()};
  }

  std::string word(const std::string &key) const {
    const auto w = words(key);
    if (w.size() != 1)
      throw ParseError(entry(key).line, key + ": expected one value");
    return w[0];
  }

  VectorXd vec(const std::string &key) const {
    const auto &e = entry(key);
    const auto n = count(e, key);
    if (e.tok.size() != n + 1)
      throw ParseError(e.line, key + ": expected " + std::to_string(n) + " values");
    VectorXd v(static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      v[static_cast<Index>(i)] = number(e, key, e.tok[i + 1]);
    return v;
  }

  MatrixXd mat(const std::string &key) const {
    const auto &e = entry(key);
    const auto n = count(e, key);
    if (e.tok.size() != n + 3)
      throw ParseError(e.line, key + ": malformed matrix record");
    const auto rows = static_cast<Index>(number(e, key, e.tok[1]));
    const auto cols = static_cast<Index>(number(e, key, e.tok[2]));
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != n)
      throw ParseError(e.line, key + ": matrix shape disagrees with its count");
    MatrixXd m(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c)
        m(r, c) = number(e, key, e.tok[static_cast<std::size_t>(3 + r * cols + c)]);
    return m;
  }

  double scalar(const std::string &key) const {
    const VectorXd v = vec(key);
    if (v.size() != 1)
      throw ParseError(entry(key).line, key + ": expected a scalar");
    return v[0];
  }

private:
  struct Entry {
    std::size_t line = 0;
    std::vector<std::string> tok;
  };

  const Entry &entry(const std::string &key) const {
    const auto it = lines_.find(key);
    if (it == lines_.end())
      throw ParseError(0, "model file lacks record '" + key + "'");
    return it->second;
  }

  static std::size_t count(const Entry &e, const std::string &key) {
    if (e.tok.empty())
      throw ParseError(e.line, key + ": missing count");
    const auto n = text::parse_double(e.tok[0]);
    if (!n || *n < 0)
      throw ParseError(e.line, key + ": bad count");
    return static_cast<std::size_t>(*n);
  }

  static double number(const Entry &e, const std::string &key, const std::string &s) {
    const auto v = text::parse_double(s);
    if (!v)
      throw ParseError(e.line, key + ": bad number '" + s + "'");
    return *v;
  }

  std::map<std::string, Entry> lines_;
};

void put_scalers(std::ostream &out, const Standardizer &in, const TargetScaler &t) {
  put_vec(out, "input.mean", in.mean);
  put_vec(out, "input.scale", in.scale);
  put(out, "target.mean", t.mean);
  put(out, "target.scale", t.scale);
}

void get_scalers(const Records &r, Standardizer &in, TargetScaler &t) {
  in.mean = r.vec("input.mean");
  in.scale = r.vec("input.scale");
  t.mean = r.scalar("target.mean");
  t.scale = r.scalar("target.scale");
}

} // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
  case ModelKind::Mlffnn:
    return "mlffnn";
  case ModelKind::AnfisSc:
    return "anfis-sc";
  case ModelKind::AnfisFcm:
    return "anfis-fcm";
  case ModelKind::AnfisGa:
    return "anfis-ga";
  case ModelKind::AnfisPso:
    return "anfis-pso";
  case ModelKind::Gmdh:
    return "gmdh";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string &text) {
  for (ModelKind k : {ModelKind::Mlffnn, ModelKind::AnfisSc, ModelKind::AnfisFcm,
                      ModelKind::AnfisGa, ModelKind::AnfisPso, ModelKind::Gmdh})
    if (to_string(k) == text)
      return k;
  throw DomainError("unknown model kind '" + text +
                    "' (expected mlffnn, anfis-sc, anfis-fcm, anfis-ga, anfis-pso or gmdh)");
}

std::string ModelSpec::describe() const {
  using text::format_double;
  switch (kind) {
  case ModelKind::Mlffnn:
    return "H=" + std::to_string(mlffnn.hidden) + ",F=" + to_string(mlffnn.variant);
  case ModelKind::AnfisSc:
    return "IR=" + format_double(subtractive.radius);
  case ModelKind::AnfisFcm:
    return "NC=" + std::to_string(fcm.clusters) + ",PME=" + format_double(fcm.exponent);
  case ModelKind::AnfisGa:
    return "N=" + std::to_string(ga.population) + ",I=" + std::to_string(ga.max_iters);
  case ModelKind::AnfisPso:
    return "N=" + std::to_string(pso.population) + ",I=" + std::to_string(pso.max_iters);
  case ModelKind::Gmdh:
    return "N=" + std::to_string(gmdh.max_neurons) + ",L=" + std::to_string(gmdh.max_layers) +
           ",P=" + format_double(gmdh.pressure);
  }
  return "";
}

VectorXd TrainedModel::predict(const Ref<const MatrixXd> &X) const {
  if (X.cols() != static_cast<Index>(features.size()))
    throw DomainError("predict: expected " + std::to_string(features.size()) + " feature columns");
  return std::visit([&](const auto &m) { return VectorXd(m.predict(X)); }, model);
}

TrainOutcome train_model(const SampleSet &train, const ModelSpec &spec) {
  if (train.rows() < 2)
    throw DomainError("train_model: need at least two training rows");
  TrainOutcome out;
  out.model.kind = spec.kind;
  out.model.params = spec.describe();
  out.model.features = train.feature_names;
  switch (spec.kind) {
  case ModelKind::Mlffnn: {
    MlffnnParams p = spec.mlffnn;
    p.seed = derive_seed(spec.seed, 10);
    out.model.model = mlffnn_train(train.X, train.y, p);
    break;
  }
  case ModelKind::Gmdh: {
    GmdhParams p = spec.gmdh;
    p.seed = derive_seed(spec.seed, 14);
    GmdhNetwork net = gmdh_train(train.X, train.y, p);
    out.history = net.layer_criteria;
    out.model.model = std::move(net);
    break;
  }
  default:
    out.model.model = fit_anfis(train, spec, out.history);
    break;
  }
  return out;
}

void save_model(std::ostream &out, const TrainedModel &model) {
  out << kHeader << '\n';
  out << "kind 1 " << to_string(model.kind) << '\n';
  out << "params 1 " << (model.params.empty() ? "-" : model.params) << '\n';
  out << "features " << model.features.size();
  for (const auto &f : model.features)
    out << ' ' << f;
  out << '\n';
  if (const auto *m = std::get_if<MlffnnModel>(&model.model)) {
    put_scalers(out, m->input_scaling, m->target_scaling);
    put_mat(out, "mlffnn.w_hidden", m->w_hidden);
    put_vec(out, "mlffnn.b_hidden", m->b_hidden);
    put_vec(out, "mlffnn.w_out", m->w_out);
    put(out, "mlffnn.b_out", m->b_out);
  } else if (const auto *a = std::get_if<AnfisModel>(&model.model)) {
    put_scalers(out, a->input_scaling, a->target_scaling);
    put_mat(out, "anfis.a", a->fis.a);
    put_mat(out, "anfis.b", a->fis.b);
    put_mat(out, "anfis.c", a->fis.c);
    put_mat(out, "anfis.coef", a->fis.coef);
    put_vec(out, "anfis.bias", a->fis.bias);
  } else {
    const auto &g = std::get<GmdhNetwork>(model.model);
    put_scalers(out, g.input_scaling, g.target_scaling);
    put(out, "gmdh.inputs", static_cast<double>(g.inputs));
    put(out, "gmdh.standardize", g.config.standardize ? 1.0 : 0.0);
    put(out, "gmdh.layers", static_cast<double>(g.layers.size()));
    for (std::size_t l = 0; l < g.layers.size(); ++l) {
      const auto &layer = g.layers[l];
      MatrixXd rows(static_cast<Index>(layer.size()), 11);
      for (std::size_t k = 0; k < layer.size(); ++k) {
        const auto &nrn = layer[k];
        rows.row(static_cast<Index>(k)) << double(nrn.u), double(nrn.v), nrn.coef[0], nrn.coef[1],
            nrn.coef[2], nrn.coef[3], nrn.coef[4], nrn.coef[5], nrn.criterion, nrn.lo, nrn.hi;
      }
      put_mat(out, "gmdh.layer." + std::to_string(l), rows);
    }
    put_vec(out, "gmdh.layer_criteria",
        Eigen::Map<const VectorXd>(g.layer_criteria.data(),
                                   static_cast<Index>(g.layer_criteria.size())));
  }
}

TrainedModel load_model(std::istream &in) {
  const Records r(in);
  TrainedModel m;
  m.kind = model_kind_from_string(r.word("kind"));
  m.params = r.word("params");
  if (m.params == "-")
    m.params.clear();
  m.features = r.words("features");
  switch (m.kind) {
  case ModelKind::Mlffnn: {
    MlffnnModel net;
    get_scalers(r, net.input_scaling, net.target_scaling);
    net.w_hidden = r.mat("mlffnn.w_hidden");
    net.b_hidden = r.vec("mlffnn.b_hidden");
    net.w_out = r.vec("mlffnn.w_out");
    net.b_out = r.scalar("mlffnn.b_out");
    if (net.b_hidden.size() != net.hidden() || net.w_out.size() != net.hidden())
      throw ParseError(0, "mlffnn: layer sizes disagree");
    m.model = std::move(net);
    break;
  }
  case ModelKind::Gmdh: {
    GmdhNetwork g;
    get_scalers(r, g.input_scaling, g.target_scaling);
    g.inputs = static_cast<Index>(r.scalar("gmdh.inputs"));
    g.config.standardize = r.scalar("gmdh.standardize") != 0.0;
    const auto L = static_cast<std::size_t>(r.scalar("gmdh.layers"));
    for (std::size_t l = 0; l < L; ++l) {
      const MatrixXd rows = r.mat("gmdh.layer." + std::to_string(l));
      if (rows.cols() != 11)
        throw ParseError(0, "gmdh layer " + std::to_string(l) + ": expected 11 columns");
      std::vector<GmdhNeuron> layer;
      for (Index k = 0; k < rows.rows(); ++k) {
        GmdhNeuron nrn;
        nrn.u = static_cast<Index>(rows(k, 0));
        nrn.v = static_cast<Index>(rows(k, 1));
        for (int c = 0; c < 6; ++c)
          nrn.coef[static_cast<std::size_t>(c)] = rows(k, 2 + c);
        nrn.criterion = rows(k, 8);
        nrn.lo = rows(k, 9);
        nrn.hi = rows(k, 10);
        layer.push_back(nrn);
      }
      g.layers.push_back(std::move(layer));
    }
    const VectorXd crit = r.vec("gmdh.layer_criteria");
    g.layer_criteria.assign(crit.data(), crit.data() + crit.size());
    m.model = std::move(g);
    break;
  }
  default: {
    AnfisModel a;
    get_scalers(r, a.input_scaling, a.target_scaling);
    a.fis.a = r.mat("anfis.a");
    a.fis.b = r.mat("anfis.b");
    a.fis.c = r.mat("anfis.c");
    a.fis.coef = r.mat("anfis.coef");
    a.fis.bias = r.vec("anfis.bias");
    const Index R = a.fis.a.rows(), d = a.fis.a.cols();
    if (a.fis.b.rows() != R || a.fis.c.rows() != R || a.fis.coef.rows() != R ||
        a.fis.bias.size() != R || a.fis.b.cols() != d || a.fis.c.cols() != d ||
        a.fis.coef.cols() != d)
      throw ParseError(0, "anfis: parameter shapes disagree");
    m.model = std::move(a);
    break;
  }
  }
  if (m.features.empty())
    throw ParseError(0, "model lists no features");
  return m;
}

} // namespace drawres
