#include "framesub/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace framesub {

namespace {

[[noreturn]] void io_fail(const std::string& message) {
  throw Error(ErrorCode::io_failure, message);
}

std::string format_double(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::vector<double> parse_csv_row(const std::string& line, const std::string& path) {
  std::vector<double> values;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, ',')) {
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      io_fail(path + ": cannot parse '" + field + "' as a real number");
    }
  }
  return values;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) io_fail("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) io_fail("cannot open " + path + " for writing");
  return out;
}

}  // namespace

FrameMatrix read_frame_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string header;
  if (!std::getline(in, header)) io_fail(path + ": empty file");
  Index m = 0, count = 0;
  if (std::sscanf(header.c_str(), "m=%td,M=%td", &m, &count) != 2)
    io_fail(path + ": expected header 'm=<int>,M=<int>'");
  if (m < 1 || count < 1) io_fail(path + ": header dimensions must be positive");

  CMatrix rows(count, m);
  std::string line;
  Index i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= count) io_fail(path + ": more rows than the header announces");
    const std::vector<double> values = parse_csv_row(line, path);
    if (static_cast<Index>(values.size()) != 2 * m)
      io_fail(path + ": row " + std::to_string(i) + " does not hold 2m reals");
    for (Index k = 0; k < m; ++k)
      rows(i, k) = Complex(values[static_cast<std::size_t>(2 * k)],
                           values[static_cast<std::size_t>(2 * k + 1)]);
    ++i;
  }
  if (i != count) io_fail(path + ": fewer rows than the header announces");
  return FrameMatrix::fromMatrix(std::move(rows));
}

void write_frame_csv(const std::string& path, const FrameMatrix& frame) {
  std::ofstream out = open_output(path);
  out << "m=" << frame.dimension() << ",M=" << frame.count() << "\n";
  for (Index i = 0; i < frame.count(); ++i) {
    for (Index k = 0; k < frame.dimension(); ++k) {
      if (k > 0) out << ',';
      out << format_double(frame.rows(i, k).real()) << ','
          << format_double(frame.rows(i, k).imag());
    }
    out << "\n";
  }
}

FrameMatrix frame_from_json(const nlohmann::json& j) {
  const Index m = j.at("m").get<Index>();
  const Index count = j.at("M").get<Index>();
  const auto& rows = j.at("rows");
  if (static_cast<Index>(rows.size()) != count) io_fail("JSON frame: row count mismatch");
  CMatrix matrix(count, m);
  for (Index i = 0; i < count; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != 2 * m) io_fail("JSON frame: row length mismatch");
    for (Index k = 0; k < m; ++k)
      matrix(i, k) = Complex(row[static_cast<std::size_t>(2 * k)].get<double>(),
                             row[static_cast<std::size_t>(2 * k + 1)].get<double>());
  }
  return FrameMatrix::fromMatrix(std::move(matrix));
}

nlohmann::json frame_to_json(const FrameMatrix& frame) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < frame.count(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index k = 0; k < frame.dimension(); ++k) {
      row.push_back(frame.rows(i, k).real());
      row.push_back(frame.rows(i, k).imag());
    }
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"m", frame.dimension()}, {"M", frame.count()}, {"rows", std::move(rows)}};
}

FrameMatrix read_frame_json(const std::string& path) {
  std::ifstream in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    io_fail(path + ": " + e.what());
  }
  return frame_from_json(j);
}

void write_frame_json(const std::string& path, const FrameMatrix& frame) {
  std::ofstream out = open_output(path);
  out << frame_to_json(frame).dump(2) << "\n";
}

FrameMatrix read_frame_auto(const std::string& path) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return read_frame_json(path);
  return read_frame_csv(path);
}

NodeSet read_nodes_csv(const std::string& path, Index dimension) {
  if (dimension < 1) throw_invalid_input("node dimension must be positive");
  std::ifstream in = open_input(path);
  NodeSet nodes;
  std::vector<double> weights;
  std::string line;
  bool with_weights = false;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> values = parse_csv_row(line, path);
    if (first) {
      if (static_cast<Index>(values.size()) == dimension + 1)
        with_weights = true;
      else if (static_cast<Index>(values.size()) != dimension)
        io_fail(path + ": rows must hold d or d+1 reals");
      first = false;
    }
    const Index expected = dimension + (with_weights ? 1 : 0);
    if (static_cast<Index>(values.size()) != expected)
      io_fail(path + ": inconsistent column count");
    RVector x(dimension);
    for (Index j = 0; j < dimension; ++j) x[j] = values[static_cast<std::size_t>(j)];
    nodes.nodes.push_back(std::move(x));
    if (with_weights) weights.push_back(values.back());
  }
  if (nodes.nodes.empty()) io_fail(path + ": no nodes");
  if (with_weights)
    nodes.weights = Eigen::Map<const RVector>(weights.data(), static_cast<Index>(weights.size()));
  return nodes;
}

void write_nodes_csv(const std::string& path, const NodeSet& nodes) {
  std::ofstream out = open_output(path);
  const bool with_weights = nodes.weights.size() == nodes.size();
  for (Index i = 0; i < nodes.size(); ++i) {
    const RVector& x = nodes.nodes[static_cast<std::size_t>(i)];
    for (Index j = 0; j < x.size(); ++j) {
      if (j > 0) out << ',';
      out << format_double(x[j]);
    }
    if (with_weights) out << ',' << format_double(nodes.weights[i]);
    out << "\n";
  }
}

CVector read_samples_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<Complex> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> fields = parse_csv_row(line, path);
    if (fields.size() != 2) io_fail(path + ": samples need exactly re,im per row");
    values.emplace_back(fields[0], fields[1]);
  }
  if (values.empty()) io_fail(path + ": no samples");
  return Eigen::Map<const CVector>(values.data(), static_cast<Index>(values.size()));
}

void write_samples_csv(const std::string& path, const CVector& values) {
  std::ofstream out = open_output(path);
  for (Index i = 0; i < values.size(); ++i)
    out << format_double(values[i].real()) << ',' << format_double(values[i].imag()) << "\n";
}

nlohmann::json bounds_to_json(const FrameBounds& bounds) {
  return nlohmann::json{{"A", bounds.lower}, {"B", bounds.upper}};
}

nlohmann::json subframe_to_json(const WeightedSubframe& sub) {
  nlohmann::json j;
  j["J"] = sub.indices;
  std::vector<double> weights(sub.weights.data(), sub.weights.data() + sub.weights.size());
  j["weights"] = weights;
  j["parent_M"] = sub.parent_count;
  return j;
}

nlohmann::json bss_report_json(const BssResult& result, Index frame_count, Index dimension,
                               double b, double delta) {
  nlohmann::json j;
  j["m"] = dimension;
  j["M"] = frame_count;
  j["b"] = b;
  j["delta"] = delta;
  j["kappa"] = result.kappa;
  j["gamma"] = result.gamma;
  j["n_iterations"] = result.iterations;
  j["J"] = result.subframe.indices;
  std::vector<double> weights(result.subframe.weights.data(),
                              result.subframe.weights.data() + result.subframe.weights.size());
  j["weights"] = weights;
  j["bounds_in"] = bounds_to_json(result.bounds_in);
  j["bounds_out"] = bounds_to_json(result.bounds_out);
  j["avg_inner_scans"] = result.avg_inner_scans;
  return j;
}

nlohmann::json experiment_report_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["experiment"] = report.experiment_id;
  j["m"] = report.m;
  j["M"] = report.M;
  j["n"] = report.n;
  j["b"] = report.b;
  j["bounds_before"] = bounds_to_json(report.bounds_before);
  j["bounds_after_bss"] = bounds_to_json(report.bounds_after_bss);
  j["bounds_after_random"] = bounds_to_json(report.bounds_after_random);
  j["theoretical_lower"] = report.theoretical_lower;
  j["inner_iter_avg"] = report.inner_scan_avg;
  j["seed"] = report.seed;
  return j;
}

std::string experiment_report_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream out;
  out << "b,n,A,bound,B,inner_iter_avg\n";
  for (const auto& report : reports) {
    out << format_double(report.b) << ',' << report.n << ','
        << format_double(report.bounds_after_bss.lower) << ','
        << format_double(report.theoretical_lower) << ','
        << format_double(report.bounds_after_bss.upper) << ','
        << format_double(report.inner_scan_avg) << "\n";
  }
  return out.str();
}

nlohmann::json recovery_report_json(const RecoveryReport& report) {
  nlohmann::json j;
  j["n"] = report.n;
  j["m"] = report.m;
  j["b"] = report.b;
  j["mz_lambda_min"] = report.mz_lambda_min;
  j["l2_error"] = report.l2_error;
  j["linf_best_proxy"] = report.linf_best_proxy;
  j["ratio"] = report.ratio;
  j["grid_size"] = report.grid_size;
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_output(path);
  out << content;
}

}  // namespace framesub
