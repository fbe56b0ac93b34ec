#include "io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "version.hpp"

namespace ripsel::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view token, std::size_t line, std::size_t column) {
  const std::string_view t = trim(token);
  double v = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  std::ostringstream os;
  os << "line " << line << ", column " << column << ": ";
  if (t.empty() || ec != std::errc() || ptr != end) {
    os << "cannot parse '" << t << "' as a number";
    throw InvalidInput(os.str());
  }
  if (!std::isfinite(v)) {
    os << "non-finite value '" << t << "'";
    throw InvalidInput(os.str());
  }
  return v;
}

std::vector<Index> sigma_from_json(const Json& j) {
  std::vector<Index> out;
  for (const auto& v : j) out.push_back(v.get<Index>() - 1);
  return out;
}

Json sigma_to_json(const std::vector<Index>& sigma) {
  Json out = Json::array();
  for (Index j : sigma) out.push_back(j + 1);
  return out;
}

double number_or_nan(const Json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

} // namespace

Matrix parse_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pending_blank = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) {
      ++pending_blank;
      continue;
    }
    if (pending_blank > 0) {
      std::ostringstream os;
      os << "line " << line_no - 1 << " is empty";
      throw InvalidInput(os.str());
    }
    std::vector<double> row;
    std::size_t column = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_number(rest.substr(0, comma), line_no, ++column));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream os;
      os << "row " << rows.size() + 1 << " has " << row.size() << (row.size() == 1 ? " field" : " fields")
         << ", expected " << rows.front().size();
      throw InvalidInput(os.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("matrix file is empty");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw InvalidInput("failed writing '" + path + "'");
}

DenseMatrix load_matrix(const std::string& path) {
  try {
    return DenseMatrix(parse_matrix(read_text(path)));
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string format_matrix(const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void save_matrix(const std::string& path, const Matrix& m) { write_text(path, format_matrix(m)); }

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw InvalidInput(path + ": malformed JSON (" + e.what() + ")");
  }
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json certificate_to_json(const SelectionCertificate& cert) {
  const SelectionParams& p = cert.params;
  Json params;
  if (cert.kind == SelectionKind::RestrictedInvertibility) {
    params["epsilon"] = p.epsilon;
    params["weights_hs_norm"] = p.weights_hs_norm;
    params["clamped"] = p.clamped;
    params["alphas"] = p.alphas;
  } else {
    params["lambda"] = p.lambda;
    params["eta"] = p.eta;
    params["column_weight"] = p.column_weight;
    if (p.particular_bound) params["particular_bound"] = *p.particular_bound;
  }
  params["delta"] = p.delta;
  params["initial_barrier"] = p.initial_barrier;
  params["final_barrier"] = p.final_barrier;
  params["barrier_bound"] = p.barrier_bound;
  params["initial_potential"] = p.initial_potential;
  params["op_norm"] = p.op_norm;
  params["hs_norm"] = p.hs_norm;
  params["stable_rank"] = p.stable_rank;
  params["tie_break"] = cert.kind == SelectionKind::RestrictedInvertibility
                            ? "max margin/RHS ratio, then lowest index"
                            : "min F, then lowest index";

  Json trace = Json::array();
  for (std::size_t i = 0; i < cert.trace.size(); ++i) {
    const StepRecord& r = cert.trace[i];
    Json step;
    step["step"] = i + 1;
    step["chosen"] = r.chosen_index + 1;
    step["barrier_before"] = r.barrier_before;
    step["barrier_after"] = r.barrier_after;
    step["potential_before"] = r.potential_before;
    step["potential_after"] = r.potential_after;
    step["feasibility_margin"] = r.feasibility_margin;
    step["aggregate_margin"] = std::isfinite(r.aggregate_margin) ? Json(r.aggregate_margin) : Json(nullptr);
    step["spectral_edge"] = r.spectral_edge;
    trace.push_back(std::move(step));
  }

  Json j;
  j["kind"] = std::string(to_string(cert.kind));
  j["sigma"] = sigma_to_json(cert.sigma);
  j["k"] = cert.target_size;
  j["claimed_bound"] = cert.claimed_bound;
  j["achieved"] = cert.achieved;
  j["params"] = std::move(params);
  j["trace"] = std::move(trace);
  j["warnings"] = cert.warnings;
  j["tool_version"] = kToolVersion;
  return j;
}

SelectionCertificate certificate_from_json(const Json& j) {
  try {
    SelectionCertificate cert;
    cert.kind = selection_kind_from_string(j.at("kind").get<std::string>());
    cert.sigma = sigma_from_json(j.at("sigma"));
    cert.target_size = j.at("k").get<Index>();
    cert.claimed_bound = j.at("claimed_bound").get<double>();
    cert.achieved = j.at("achieved").get<double>();
    const Json& p = j.at("params");
    SelectionParams& out = cert.params;
    out.epsilon = p.value("epsilon", 0.0);
    out.lambda = p.value("lambda", 0.0);
    out.eta = p.value("eta", 0.0);
    out.delta = p.value("delta", 0.0);
    out.initial_barrier = p.value("initial_barrier", 0.0);
    out.final_barrier = p.value("final_barrier", 0.0);
    out.barrier_bound = p.value("barrier_bound", 0.0);
    out.column_weight = p.value("column_weight", 0.0);
    out.initial_potential = p.value("initial_potential", 0.0);
    out.op_norm = p.value("op_norm", 0.0);
    out.hs_norm = p.value("hs_norm", 0.0);
    out.weights_hs_norm = p.value("weights_hs_norm", 0.0);
    out.stable_rank = p.value("stable_rank", 0.0);
    out.clamped = p.value("clamped", false);
    if (p.contains("particular_bound")) out.particular_bound = p.at("particular_bound").get<double>();
    if (p.contains("alphas")) out.alphas = p.at("alphas").get<std::vector<double>>();
    for (const Json& s : j.at("trace")) {
      StepRecord r;
      r.chosen_index = s.at("chosen").get<Index>() - 1;
      r.barrier_before = s.at("barrier_before").get<double>();
      r.barrier_after = s.at("barrier_after").get<double>();
      r.potential_before = s.at("potential_before").get<double>();
      r.potential_after = s.at("potential_after").get<double>();
      r.feasibility_margin = s.at("feasibility_margin").get<double>();
      r.aggregate_margin = number_or_nan(s.at("aggregate_margin"));
      r.spectral_edge = s.at("spectral_edge").get<double>();
      cert.trace.push_back(r);
    }
    cert.warnings = j.at("warnings").get<std::vector<std::string>>();
    return cert;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed certificate: ") + e.what());
  }
}

Json decomposition_to_json(const JohnDecomposition& d) {
  Json points = Json::array();
  for (const Vector& x : d.points) points.push_back(std::vector<double>(x.data(), x.data() + x.size()));
  Json j;
  j["dim"] = d.dim();
  j["points"] = std::move(points);
  j["weights"] = d.weights;
  j["source"] = sigma_to_json(d.source);
  if (d.position) {
    Json rows = Json::array();
    for (Index i = 0; i < d.position->rows(); ++i) {
      const Vector r = d.position->row(i).transpose();
      rows.push_back(std::vector<double>(r.data(), r.data() + r.size()));
    }
    j["position"] = std::move(rows);
  }
  return j;
}

JohnDecomposition decomposition_from_json(const Json& j) {
  try {
    JohnDecomposition d;
    const Index n = j.at("dim").get<Index>();
    if (n < 1) throw InvalidInput("decomposition: dim must be positive");
    for (const Json& p : j.at("points")) {
      const auto v = p.get<std::vector<double>>();
      if (static_cast<Index>(v.size()) != n) throw InvalidInput("decomposition: point length does not match dim");
      d.points.emplace_back(Eigen::Map<const Vector>(v.data(), n));
    }
    d.weights = j.at("weights").get<std::vector<double>>();
    if (d.weights.size() != d.points.size()) throw InvalidInput("decomposition: weight and point counts differ");
    if (d.points.empty()) throw InvalidInput("decomposition has no points");
    for (double c : d.weights) {
      if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("decomposition: weights must be positive and finite");
    }
    if (j.contains("source")) d.source = sigma_from_json(j.at("source"));
    if (j.contains("position")) {
      Matrix pos(n, n);
      Index i = 0;
      for (const Json& r : j.at("position")) {
        const auto v = r.get<std::vector<double>>();
        if (static_cast<Index>(v.size()) != n || i >= n) throw InvalidInput("decomposition: position must be dim x dim");
        pos.row(i++) = Eigen::Map<const Vector>(v.data(), n).transpose();
      }
      d.position = pos;
    }
    return d;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed decomposition: ") + e.what());
  }
}

} // namespace ripsel::cli
