#include "drawres/selection.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "drawres/ranks.hpp"
#include "drawres/text.hpp"

namespace drawres {

FeatureScores score_features(const Ref<const MatrixXd> &X, const Ref<const VectorXd> &y,
                             const std::vector<std::string> &names,
                             const ForestParams &forest) {
  if (static_cast<Index>(names.size()) != X.cols())
    throw DomainError("score_features: name count differs from column count");
  FeatureScores s;
  s.names = names;
  s.spearman_abs = VectorXd::Zero(X.cols());
  const VectorXd y_ranks = average_ranks(y);
  const bool y_constant = (y.array() == y[0]).all();
  for (Index c = 0; c < X.cols(); ++c) {
    const auto col = X.col(c);
    if (y_constant || (col.array() == col[0]).all())
      continue;
    s.spearman_abs[c] = std::abs(pearson_r(average_ranks(col), y_ranks));
  }
  s.rf_importance = rf_importances(fit_random_forest(X, y, forest));
  return s;
}

FeatureSelection select(const FeatureScores &scores, double f_lin, double f_nonlin) {
  FeatureSelection sel;
  sel.f_lin = f_lin;
  sel.f_nonlin = f_nonlin;
  const std::size_t n = scores.names.size();
  if (n == 0)
    return sel;
  if (!(f_lin >= 0.0 && f_lin <= 1.0 && f_nonlin >= 0.0 && f_nonlin <= 1.0))
    throw DomainError("select: fractions must lie in [0, 1]");

  auto count_for = [](double f, std::size_t total) {
    // guard against 0.3 * 82 landing a hair above an integer
    const double raw = f * static_cast<double>(total);
    return static_cast<std::size_t>(std::ceil(raw - 1e-9));
  };
  auto ranked = [&](const VectorXd &score, const std::vector<std::size_t> &pool) {
    std::vector<std::size_t> order = pool;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (score[Index(a)] != score[Index(b)])
        return score[Index(a)] > score[Index(b)];
      return scores.names[a] < scores.names[b];
    });
    return order;
  };

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto by_rank = ranked(scores.spearman_abs, all);
  const std::size_t n_direct = std::min(n, count_for(f_lin, n));
  std::vector<std::size_t> rest(by_rank.begin() + static_cast<std::ptrdiff_t>(n_direct),
                                by_rank.end());
  for (std::size_t k = 0; k < n_direct; ++k)
    sel.direct.push_back(scores.names[by_rank[k]]);

  const auto by_forest = ranked(scores.rf_importance, rest);
  const std::size_t n_potential = std::min(rest.size(), count_for(f_nonlin, rest.size()));
  for (std::size_t k = 0; k < n_potential; ++k)
    sel.potential.push_back(scores.names[by_forest[k]]);
  return sel;
}

void write_scores_csv(std::ostream &out, const FeatureScores &scores,
                      const FeatureSelection &selection) {
  out << "indicator,spearman_abs,rf_importance,selected_as\n";
  for (std::size_t k = 0; k < scores.names.size(); ++k) {
    const auto &name = scores.names[k];
    const char *tag = "none";
    if (std::find(selection.direct.begin(), selection.direct.end(), name) !=
        selection.direct.end())
      tag = "direct";
    else if (std::find(selection.potential.begin(), selection.potential.end(), name) !=
             selection.potential.end())
      tag = "potential";
    out << name << ',' << text::format_double(scores.spearman_abs[Index(k)]) << ','
        << text::format_double(scores.rf_importance[Index(k)]) << ',' << tag << '\n';
  }
}

void read_scores_csv(std::istream &in, FeatureScores &scores, FeatureSelection &selection) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) ||
      text::trim(line) != "indicator,spearman_abs,rf_importance,selected_as")
    throw ParseError(1, "expected header 'indicator,spearman_abs,rf_importance,selected_as'");
  ++line_no;
  std::vector<double> sp, rf;
  scores = {};
  selection = {};
  // direct/potential lists are stored in selection order by the writer's ranking
  std::vector<std::pair<double, std::string>> direct, potential;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty())
      continue;
    const auto f = text::split(line);
    if (f.size() != 4)
      throw ParseError(line_no, "expected 4 fields");
    const auto a = text::parse_double(f[1]);
    const auto b = text::parse_double(f[2]);
    if (!a || !b)
      throw ParseError(line_no, "malformed score");
    const std::string name(text::trim(f[0]));
    const std::string tag(text::trim(f[3]));
    scores.names.push_back(name);
    sp.push_back(*a);
    rf.push_back(*b);
    if (tag == "direct")
      direct.emplace_back(*a, name);
    else if (tag == "potential")
      potential.emplace_back(*b, name);
    else if (tag != "none")
      throw ParseError(line_no, "unknown selection tag '" + tag + "'");
  }
  scores.spearman_abs = Eigen::Map<VectorXd>(sp.data(), Index(sp.size()));
  scores.rf_importance = Eigen::Map<VectorXd>(rf.data(), Index(rf.size()));
  auto by_score = [](const auto &a, const auto &b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  std::sort(direct.begin(), direct.end(), by_score);
  std::sort(potential.begin(), potential.end(), by_score);
  for (auto &d : direct)
    selection.direct.push_back(d.second);
  for (auto &p : potential)
    selection.potential.push_back(p.second);
}

} // namespace drawres
