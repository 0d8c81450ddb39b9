#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "ampsched/dense.hpp"

namespace ampsched {

void write_csv(std::ostream& out, const Matrix& m) {
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      // Shortest representation that round-trips exactly.
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, m(i, j));
      if (j) out << ',';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

Matrix read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      std::string_view field(line.data() + pos, comma - pos);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::invalid_argument("read_csv: line " + std::to_string(lineno) +
                                    ": bad number '" + std::string(field) + "'");
      row.push_back(v);
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("read_csv: line " + std::to_string(lineno) +
                                  ": expected " + std::to_string(rows.front().size()) +
                                  " fields");
    rows.push_back(std::move(row));
  }
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace ampsched
