#include "softwrap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "softwrap/encode.hpp"

namespace softwrap {

namespace {

void check_pair(std::span<const double> forecasts, std::span<const uint8_t> outcomes) {
  if (forecasts.size() != outcomes.size())
    throw Error(ErrorKind::LengthMismatch, "forecasts and outcomes differ in length");
  if (forecasts.empty()) throw Error(ErrorKind::Empty, "no forecasts");
  for (double f : forecasts) {
    if (!(f >= 0.0 && f <= 1.0))
      throw Error(ErrorKind::BadArguments, "forecast outside [0,1]: " + format_double(f));
  }
}

std::size_t count_distinct(std::span<const double> forecasts) {
  std::vector<double> sorted(forecasts.begin(), forecasts.end());
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

// Table 1 style: 5 decimals, no leading zero (".20284").
std::string fmt5(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5f", v);
  std::string s = buf;
  if (s.rfind("0.", 0) == 0) s.erase(0, 1);
  else if (s.rfind("-0.", 0) == 0) s.erase(1, 1);
  return s;
}

}  // namespace

double brier_score(std::span<const double> forecasts, std::span<const uint8_t> outcomes) {
  check_pair(forecasts, outcomes);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    long double d = static_cast<long double>(forecasts[i]) - (outcomes[i] ? 1.0L : 0.0L);
    sum += d * d;
  }
  return static_cast<double>(sum / static_cast<long double>(forecasts.size()));
}

BrierReport decompose(std::span<const double> forecasts, std::span<const uint8_t> outcomes,
                      const Binning& binning) {
  check_pair(forecasts, outcomes);
  const std::size_t n = forecasts.size();
  const long double n_ld = static_cast<long double>(n);

  bool unique_mode;
  switch (binning.mode) {
    case BinningMode::Unique: unique_mode = true; break;
    case BinningMode::Fixed: unique_mode = false; break;
    case BinningMode::Auto:
    default: unique_mode = count_distinct(forecasts) <= 1000; break;
  }
  int k_bins = binning.bins;
  if (!unique_mode && k_bins < 1) throw Error(ErrorKind::BadArguments, "bins must be >= 1");

  long double label_sum = 0.0L;
  for (uint8_t y : outcomes) label_sum += y;
  const long double p_bar = label_sum / n_ld;

  struct Bin {
    long double w = 0, f_sum = 0, y_sum = 0;
  };
  std::map<int64_t, Bin> by_fixed;
  std::map<double, Bin> by_value;
  for (std::size_t i = 0; i < n; ++i) {
    Bin& bin = unique_mode
                   ? by_value[forecasts[i]]
                   : by_fixed[std::min<int64_t>(static_cast<int64_t>(forecasts[i] * k_bins),
                                                k_bins - 1)];
    bin.w += 1;
    bin.f_sum += forecasts[i];
    bin.y_sum += outcomes[i];
  }

  long double res = 0, unr = 0, oconf = 0;
  auto accumulate = [&](const Bin& bin) {
    long double fk = bin.f_sum / bin.w;
    long double pk = bin.y_sum / bin.w;
    res += bin.w * (pk - p_bar) * (pk - p_bar);
    long double miss = bin.w * (fk - pk) * (fk - pk);
    unr += miss;
    if (fk < pk) oconf += miss;
  };
  if (unique_mode)
    for (const auto& [key, bin] : by_value) accumulate(bin);
  else
    for (const auto& [key, bin] : by_fixed) accumulate(bin);

  BrierReport rep;
  rep.n_points = n;
  rep.unique_binning = unique_mode;
  rep.bins_used = unique_mode ? 0 : k_bins;
  rep.var = static_cast<double>(p_bar * (1.0L - p_bar));
  rep.res = static_cast<double>(res / n_ld);
  rep.unr = static_cast<double>(unr / n_ld);
  rep.oconf = static_cast<double>(oconf / n_ld);
  rep.uns = rep.var - rep.res;
  rep.bs = brier_score(forecasts, outcomes);
  rep.identity_residual = std::fabs(rep.bs - (rep.var - rep.res + rep.unr));
  return rep;
}

BrierReport evaluate_model(const QualityImpactModel& m, const Dataset& eval,
                           const Binning& binning) {
  if (eval.points.empty()) throw Error(ErrorKind::Empty, "evaluation set is empty");
  if (eval.schema != m.schema)
    throw Error(ErrorKind::SchemaMismatch, "evaluation data schema differs from model schema");
  std::vector<double> forecasts(eval.points.size());
  std::vector<uint8_t> outcomes(eval.points.size());
  std::vector<double> enc;
  for (std::size_t i = 0; i < eval.points.size(); ++i) {
    const DataPoint& p = eval.points[i];
    if (!p.outcome_incorrect.has_value())
      throw Error(ErrorKind::SchemaMismatch, "evaluation point lacks a label");
    enc = encode_point(m.schema, m.columns, p);
    forecasts[i] = predict_value(m, enc);
    outcomes[i] = *p.outcome_incorrect ? 1 : 0;
  }
  return decompose(forecasts, outcomes, binning);
}

int SweepResult::jump_count(double tau) const {
  int count = 0;
  for (std::size_t i = 0; i + 1 < u_values.size(); ++i)
    if (std::fabs(u_values[i + 1] - u_values[i]) > tau) ++count;
  return count;
}

SweepResult sweep(const QualityImpactModel& m, const DataPoint& base, const std::string& feature,
                  double lo, double hi, int steps) {
  int fi = m.schema.feature_index(feature);
  if (fi < 0) throw Error(ErrorKind::NotContinuousFeature, "unknown feature '" + feature + "'");
  if (m.schema.features[static_cast<std::size_t>(fi)].kind != FeatureKind::Continuous)
    throw Error(ErrorKind::NotContinuousFeature, "feature '" + feature + "' is categorical");
  if (!(lo < hi)) throw Error(ErrorKind::BadRange, "need lo < hi");
  if (steps < 2) throw Error(ErrorKind::BadRange, "need steps >= 2");

  // locate the single encoded column of the continuous feature
  std::size_t col = 0;
  for (; col < m.columns.size(); ++col)
    if (m.columns[col].feature == fi && !m.columns[col].onehot) break;
  if (col == m.columns.size())
    throw Error(ErrorKind::NotContinuousFeature, "feature '" + feature + "' has no encoded column");

  std::vector<double> enc = encode_point(m.schema, m.columns, base);
  SweepResult out;
  out.feature = feature;
  out.grid.resize(static_cast<std::size_t>(steps));
  out.u_values.resize(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    double x = lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(steps - 1);
    enc[col] = x;
    out.grid[static_cast<std::size_t>(i)] = x;
    out.u_values[static_cast<std::size_t>(i)] = predict_value(m, enc);
  }
  for (std::size_t i = 0; i + 1 < out.u_values.size(); ++i)
    out.max_jump = std::max(out.max_jump, std::fabs(out.u_values[i + 1] - out.u_values[i]));
  return out;
}

std::string select_best(const std::vector<std::pair<std::string, BrierReport>>& reports,
                        double eps) {
  if (reports.empty()) throw Error(ErrorKind::Empty, "no reports to select from");
  double best_bs = reports[0].second.bs;
  for (const auto& [id, rep] : reports) best_bs = std::min(best_bs, rep.bs);
  const std::pair<std::string, BrierReport>* winner = nullptr;
  for (const auto& entry : reports) {
    if (entry.second.bs > best_bs + eps) continue;  // outside the tie set
    if (!winner || entry.second.unr < winner->second.unr ||
        (entry.second.unr == winner->second.unr && entry.first < winner->first))
      winner = &entry;
  }
  return winner->first;
}

std::string render_report_table(const std::vector<std::pair<std::string, BrierReport>>& reports) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s%9s%9s%9s%9s%9s\n", "approach", "bs", "var", "uns",
                "unr", "oconf");
  out << line;
  for (const auto& [id, rep] : reports) {
    std::snprintf(line, sizeof(line), "%-16s%9s%9s%9s%9s%9s\n", id.c_str(), fmt5(rep.bs).c_str(),
                  fmt5(rep.var).c_str(), fmt5(rep.uns).c_str(), fmt5(rep.unr).c_str(),
                  fmt5(rep.oconf).c_str());
    out << line;
  }
  return out.str();
}

std::string render_report_csv(const std::vector<std::pair<std::string, BrierReport>>& reports) {
  std::ostringstream out;
  out << "model_id,bs,var,res,uns,unr,oconf,n_points,binning,identity_residual\n";
  for (const auto& [id, rep] : reports) {
    out << id << ',' << format_double(rep.bs) << ',' << format_double(rep.var) << ','
        << format_double(rep.res) << ',' << format_double(rep.uns) << ','
        << format_double(rep.unr) << ',' << format_double(rep.oconf) << ',' << rep.n_points << ','
        << (rep.unique_binning ? "unique" : "fixed" + std::to_string(rep.bins_used)) << ','
        << format_double(rep.identity_residual) << '\n';
  }
  return out.str();
}

std::vector<std::pair<std::string, BrierReport>> parse_report_csv(const std::string& content) {
  std::vector<std::pair<std::string, BrierReport>> out;
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptyFile, "empty report");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 10) throw Error(ErrorKind::UnparsableValue, "report row: " + line);
    BrierReport rep;
    try {
      rep.bs = std::stod(cells[1]);
      rep.var = std::stod(cells[2]);
      rep.res = std::stod(cells[3]);
      rep.uns = std::stod(cells[4]);
      rep.unr = std::stod(cells[5]);
      rep.oconf = std::stod(cells[6]);
      rep.n_points = static_cast<std::size_t>(std::stoull(cells[7]));
      rep.unique_binning = cells[8] == "unique";
      if (!rep.unique_binning && cells[8].rfind("fixed", 0) == 0)
        rep.bins_used = std::stoi(cells[8].substr(5));
      rep.identity_residual = std::stod(cells[9]);
    } catch (const std::exception&) {
      throw Error(ErrorKind::UnparsableValue, "report row: " + line);
    }
    out.emplace_back(cells[0], rep);
  }
  return out;
}

std::string sweep_to_csv(const SweepResult& s) {
  std::ostringstream out;
  out << s.feature << ",uncertainty\n";
  for (std::size_t i = 0; i < s.grid.size(); ++i)
    out << format_double(s.grid[i]) << ',' << format_double(s.u_values[i]) << '\n';
  return out.str();
}

std::string sweep_to_svg(const SweepResult& s) {
  const int w = 640, h = 360, margin = 40;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << w - margin
      << "\" y2=\"" << h - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
      << h - margin << "\" stroke=\"black\"/>\n";
  double lo = s.grid.front(), hi = s.grid.back();
  out << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    double px = margin + (s.grid[i] - lo) / (hi - lo) * (w - 2 * margin);
    double py = h - margin - s.u_values[i] * (h - 2 * margin);
    out << px << ',' << py << ' ';
  }
  out << "\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" text-anchor=\"middle\" "
      << "font-size=\"13\">" << s.feature << "</text>\n";
  out << "<text x=\"12\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 12," << h / 2 << ")\">uncertainty</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace softwrap
