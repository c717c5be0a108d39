#include "claimdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "claimdiff/errors.hpp"

namespace claimdiff {

double medc(std::span<const MedcSample> samples) {
  if (samples.empty())
    throw Error(ErrorCode::EmptyInput, "medc over an empty sample list");
  double total = 0.0;
  for (const auto& s : samples) total += s.e_a - s.e_b;
  return total / static_cast<double>(samples.size());
}

double ambiguity_rate(std::span<const AmbiguityReport> reports,
                      std::span<const int> word_counts) {
  if (reports.size() != word_counts.size())
    throw Error(ErrorCode::LengthMismatch,
                "reports and word counts are not aligned");
  long matches = 0, words = 0;
  for (const auto& r : reports) matches += r.n_amb;
  for (int w : word_counts) words += w;
  if (words <= 0)
    throw Error(ErrorCode::ZeroWords, "ambiguity rate over zero words");
  return 100.0 * static_cast<double>(matches) / static_cast<double>(words);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // tie run [i, j]: average of 1-based positions
    const double rank = static_cast<double>(i + j) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::LengthMismatch,
                "x has " + std::to_string(x.size()) + " values, y has " +
                    std::to_string(y.size()));
  if (x.size() < 2)
    throw Error(ErrorCode::TooFew, "need at least 2 paired values");

  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(rx.size());

  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw Error(ErrorCode::ConstantInput,
                "rank correlation undefined for constant input");
  return SpearmanResult{sxy / std::sqrt(sxx * syy),
                        static_cast<int>(rx.size())};
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  out << content;
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path);
}

nlohmann::ordered_json aggregate_to_json(const DiagnosticAggregate& agg) {
  nlohmann::ordered_json j;
  j["mean_hall"] = agg.mean_hall;
  j["mean_miss"] = agg.mean_miss;
  j["n_samples"] = agg.n_samples;
  j["samples_with_hall"] = agg.samples_with_hallucination;
  j["per_category"] = {
      {"natural", {{"hall", agg.natural.hall}, {"miss", agg.natural.miss}}},
      {"design", {{"hall", agg.design.hall}, {"miss", agg.design.miss}}},
  };
  return j;
}

}  // namespace

std::string trajectory_csv_header() {
  return "step,mean_reward,mean_length,mean_hall,mean_miss,mean_ref_werr,"
         "emit_logit,err_logit,hedge_logit";
}

std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& trajectory) {
  std::ostringstream out;
  out << trajectory_csv_header() << '\n';
  for (const auto& p : trajectory) {
    out << p.step << ',' << fmt_double(p.mean_reward) << ','
        << fmt_double(p.mean_length) << ',' << fmt_double(p.mean_hall) << ','
        << fmt_double(p.mean_miss) << ',' << fmt_double(p.mean_ref_werr) << ','
        << fmt_double(p.emit_logit) << ',' << fmt_double(p.err_logit) << ','
        << fmt_double(p.hedge_logit) << '\n';
  }
  return out.str();
}

std::vector<TrajectoryPoint> trajectory_from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("step,", 0) != 0)
    throw Error(ErrorCode::InputMalformed,
                path + " does not start with a trajectory header");
  std::vector<TrajectoryPoint> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    TrajectoryPoint p;
    std::istringstream row(line);
    std::string cell;
    double* fields[] = {&p.mean_reward, &p.mean_length, &p.mean_hall,
                        &p.mean_miss,   &p.mean_ref_werr, &p.emit_logit,
                        &p.err_logit,   &p.hedge_logit};
    if (!std::getline(row, cell, ','))
      throw Error(ErrorCode::InputMalformed,
                  path + ": short row at line " + std::to_string(line_no));
    p.step = std::stoi(cell);
    for (double* f : fields) {
      if (!std::getline(row, cell, ','))
        throw Error(ErrorCode::InputMalformed,
                    path + ": short row at line " + std::to_string(line_no));
      *f = std::stod(cell);
    }
    out.push_back(p);
  }
  return out;
}

bool ReportInputs::empty() const {
  return !medc && !ambiguity_rate_pct && !spearman_hall && !spearman_miss &&
         !diagnostics && trajectory.empty();
}

std::vector<std::string> emit_report(const ReportInputs& inputs,
                                     const std::string& out_dir) {
  if (inputs.empty())
    throw Error(ErrorCode::EmptyInput,
                "no metrics computed; refusing to write an empty report");

  nlohmann::ordered_json j;
  std::ostringstream csv;
  csv << "metric,value\n";
  auto add = [&](const std::string& name, double value) {
    j[name] = value;
    csv << name << ',' << fmt_double(value) << '\n';
  };

  if (inputs.medc) add("medc", *inputs.medc);
  if (inputs.ambiguity_rate_pct)
    add("ambiguity_rate_pct", *inputs.ambiguity_rate_pct);
  if (inputs.spearman_hall) {
    add("spearman_hall_rho", inputs.spearman_hall->rho);
    add("spearman_hall_n", inputs.spearman_hall->n);
  }
  if (inputs.spearman_miss) {
    add("spearman_miss_rho", inputs.spearman_miss->rho);
    add("spearman_miss_n", inputs.spearman_miss->n);
  }
  if (inputs.diagnostics) {
    j["diagnostics"] = aggregate_to_json(*inputs.diagnostics);
    add("mean_hall", inputs.diagnostics->mean_hall);
    add("mean_miss", inputs.diagnostics->mean_miss);
  }
  if (!inputs.trajectory.empty()) {
    const auto& first = inputs.trajectory.front();
    const auto& last = inputs.trajectory.back();
    j["trajectory"] = {
        {"steps", static_cast<int>(inputs.trajectory.size())},
        {"initial_mean_reward", first.mean_reward},
        {"final_mean_reward", last.mean_reward},
        {"initial_mean_length", first.mean_length},
        {"final_mean_length", last.mean_length},
        {"final_mean_hall", last.mean_hall},
        {"final_mean_miss", last.mean_miss},
    };
    add("final_mean_reward", last.mean_reward);
    add("final_mean_length", last.mean_length);
  }

  std::vector<std::string> written;
  const std::string json_path = out_dir + "/report.json";
  const std::string csv_path = out_dir + "/report.csv";
  write_file(json_path, j.dump(2) + "\n");
  written.push_back(json_path);
  write_file(csv_path, csv.str());
  written.push_back(csv_path);
  if (!inputs.trajectory.empty()) {
    const std::string svg_path = out_dir + "/trend.svg";
    write_file(svg_path, render_trend_svg(inputs.trajectory));
    written.push_back(svg_path);
  }
  return written;
}

namespace {

struct Series {
  const char* title;
  const char* color;
  std::vector<double> values;
};

void render_panel(std::ostringstream& svg, const Series& series,
                  const std::vector<int>& steps, double x0, double y0,
                  double width, double height) {
  double lo = series.values.empty() ? 0.0 : series.values.front();
  double hi = lo;
  for (double v : series.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-12) {
    hi += 1.0;
    lo -= 1.0;
  }
  const double x_span = std::max<double>(1.0, steps.back() - steps.front());

  svg << "  <rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << width
      << "\" height=\"" << height
      << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  svg << "  <text x=\"" << x0 << "\" y=\"" << y0 - 8
      << "\" font-family=\"sans-serif\" font-size=\"14\">" << series.title
      << "</text>\n";
  svg << "  <text x=\"" << x0 - 8 << "\" y=\"" << y0 + 12
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
      << fmt_double(hi) << "</text>\n";
  svg << "  <text x=\"" << x0 - 8 << "\" y=\"" << y0 + height
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
      << fmt_double(lo) << "</text>\n";

  svg << "  <polyline fill=\"none\" stroke=\"" << series.color
      << "\" stroke-width=\"1.5\" points=\"";
  for (size_t i = 0; i < series.values.size(); ++i) {
    const double x = x0 + (steps[i] - steps.front()) / x_span * width;
    const double y =
        y0 + height - (series.values[i] - lo) / (hi - lo) * height;
    if (i) svg << ' ';
    svg << fmt_double(x) << ',' << fmt_double(y);
  }
  svg << "\"/>\n";
}

}  // namespace

std::string render_trend_svg(const std::vector<TrajectoryPoint>& trajectory) {
  if (trajectory.empty())
    throw Error(ErrorCode::EmptyInput, "no trajectory points to plot");
  std::vector<int> steps;
  Series panels[3] = {
      {"reward", "#1f77b4", {}},
      {"response length", "#2ca02c", {}},
      {"reference-side weighted errors", "#d62728", {}},
  };
  for (const auto& p : trajectory) {
    steps.push_back(p.step);
    panels[0].values.push_back(p.mean_reward);
    panels[1].values.push_back(p.mean_length);
    panels[2].values.push_back(p.mean_ref_werr);
  }

  const double width = 720.0, height = 160.0, x0 = 70.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"820\" "
         "height=\"660\" viewBox=\"0 0 820 660\">\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"820\" height=\"660\" fill=\"white\"/>\n";
  double y0 = 40.0;
  for (const auto& panel : panels) {
    render_panel(svg, panel, steps, x0, y0, width, height);
    y0 += height + 50.0;
  }
  svg << "  <text x=\"" << x0 + width / 2 << "\" y=\"650\" "
         "font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\">training step</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace claimdiff
