#include "resnet/network_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "resnet/errors.hpp"

namespace resnet {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool skip_line(const std::string& line) { return line.empty() || line[0] == '#'; }

double parse_double(const std::string& token, std::size_t line_no) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError("line " + std::to_string(line_no) + ": '" + token + "' is not a number");
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

Network read_network(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, VertexId> index;
  std::vector<Edge> edges;
  auto vertex = [&](const std::string& label) {
    const auto [it, inserted] = index.emplace(label, labels.size());
    if (inserted) labels.push_back(label);
    return it->second;
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (skip_line(line)) continue;
    std::istringstream fields(line);
    std::string u, v, c, extra;
    if (!(fields >> u >> v >> c) || (fields >> extra)) {
      throw DomainError("line " + std::to_string(line_no) + ": expected `u v c`");
    }
    const double conductance = parse_double(c, line_no);
    const VertexId a = vertex(u);
    const VertexId b = vertex(v);
    edges.push_back({a, b, conductance});
  }
  if (labels.empty()) throw DomainError("network file contains no edges");
  return Network(std::move(labels), std::move(edges));
}

Network read_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open network file '" + path + "'");
  return read_network(in);
}

void write_network(std::ostream& out, const Network& net) {
  out << "# u v conductance\n";
  for (const Edge& e : net.edges()) {
    out << net.label(e.u) << ' ' << net.label(e.v) << ' ' << format_double(e.conductance) << '\n';
  }
}

VertexMeasure read_measure(std::istream& in, const Network& net) {
  std::vector<double> weights(net.size(), 0.0);
  std::vector<char> seen(net.size(), 0);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (skip_line(line)) continue;
    std::istringstream fields(line);
    std::string v, m, extra;
    if (!(fields >> v >> m) || (fields >> extra)) {
      throw DomainError("line " + std::to_string(line_no) + ": expected `v m`");
    }
    const VertexId id = net.index(v);
    if (seen[id]) throw DomainError("line " + std::to_string(line_no) + ": duplicate weight for '" + v + "'");
    seen[id] = 1;
    weights[id] = parse_double(m, line_no);
  }
  for (VertexId id = 0; id < net.size(); ++id) {
    if (!seen[id]) throw DomainError("measure has no weight for vertex '" + net.label(id) + "'");
  }
  return VertexMeasure(std::move(weights));
}

void write_measure(std::ostream& out, const Network& net, const VertexMeasure& mu) {
  out << "# v weight\n";
  for (VertexId v = 0; v < net.size(); ++v) out << net.label(v) << ' ' << format_double(mu[v]) << '\n';
}

void write_resistance_csv(std::ostream& out, const ResistanceMatrix& r) {
  const std::size_t n = r.size();
  for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << r.labels()[j];
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << format_double(r(i, j));
    out << '\n';
  }
}

ResistanceMatrix read_resistance_csv(std::istream& in) {
  std::string raw;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (skip_line(line)) continue;
    auto fields = split_csv(line);
    if (labels.empty()) {
      labels = std::move(fields);
      continue;
    }
    if (fields.size() != labels.size()) {
      throw DomainError("line " + std::to_string(line_no) + ": expected " + std::to_string(labels.size()) +
                        " values");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, line_no));
    rows.push_back(std::move(row));
  }
  if (labels.empty() || rows.size() != labels.size()) {
    throw DomainError("resistance CSV must have a header and one row per label");
  }
  const auto n = static_cast<long>(labels.size());
  Eigen::MatrixXd values(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) values(i, j) = rows[i][j];
  }
  return ResistanceMatrix(std::move(labels), std::move(values));
}

}  // namespace resnet
