#include "mlrfe/export.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <vector>

#include "mlrfe/error.hpp"

namespace mlrfe {

namespace {

std::string num(double v, int width = 0) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (width == 0) return buf;
  for (int p = 15; p > 0 && static_cast<int>(std::string_view(buf).size()) > width; --p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
  }
  return buf;
}

// Names usable in both MPS and LP text: no blanks or operator characters,
// not starting with a digit or a period, unique.
std::vector<std::string> clean_names(const std::vector<std::string>& raw, const char* prefix) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string s = raw[i].empty() ? prefix + std::to_string(i) : raw[i];
    for (char& c : s) {
      const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
      if (!ok) c = '_';
    }
    if (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.' || s[0] == 'e' || s[0] == 'E') {
      s = prefix + s;
    }
    if (!seen.insert(s).second) {
      s += "_" + std::to_string(i);
      seen.insert(s);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> short_names(std::size_t n, char prefix) {
  std::vector<std::string> out(n);
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%c%07zu", prefix, i + 1);
    out[i] = buf;
  }
  return out;
}

struct ColumnEntry {
  std::size_t row;
  double val;
};

std::vector<std::vector<ColumnEntry>> by_column(const LpProblem& lp) {
  std::vector<std::vector<ColumnEntry>> cols(lp.num_cols());
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const auto& row = lp.rows[r];
    for (std::size_t k = 0; k < row.idx.size(); ++k) cols[row.idx[k]].push_back({r, row.val[k]});
  }
  return cols;
}

char sense_letter(RowSense s) {
  switch (s) {
    case RowSense::Le: return 'L';
    case RowSense::Eq: return 'E';
    case RowSense::Ge: return 'G';
  }
  return '?';
}

class MpsWriter {
 public:
  MpsWriter(std::ostream& out, bool fixed) : out_(out), fixed_(fixed) {}

  // Fixed layout: fields start in columns 2, 5, 15, 25, 40, 50.
  void line(std::string_view f1, std::string_view f2, std::string_view f3 = {},
            std::string_view f4 = {}, std::string_view f5 = {}, std::string_view f6 = {}) {
    if (!fixed_) {
      out_ << ' ';
      for (auto f : {f1, f2, f3, f4, f5, f6}) {
        if (!f.empty()) out_ << ' ' << f;
      }
      out_ << '\n';
      return;
    }
    std::string s(61, ' ');
    auto put = [&](std::size_t col, std::string_view f) { s.replace(col - 1, f.size(), f); };
    put(2, f1);
    put(5, f2);
    put(15, f3);
    put(25, f4);
    put(40, f5);
    put(50, f6);
    s.erase(s.find_last_not_of(' ') + 1);
    out_ << s << '\n';
  }

  std::string number(double v) const { return fixed_ ? num(v, 12) : num(v); }

 private:
  std::ostream& out_;
  bool fixed_;
};

void write_mps(std::ostream& out, const MilpModel& m, bool fixed, std::string_view name) {
  const LpProblem& lp = m.lp;
  const auto cols = fixed ? short_names(lp.num_cols(), 'C') : clean_names(m.column_names, "c");
  const auto rows = fixed ? short_names(lp.num_rows(), 'R') : clean_names(m.row_names, "r");
  const std::string obj = fixed ? "COST" : "obj";
  MpsWriter w(out, fixed);

  out << "NAME          " << name << '\n';
  out << "ROWS\n";
  w.line("N", obj);
  for (std::size_t r = 0; r < lp.num_rows(); ++r) w.line(std::string(1, sense_letter(lp.rows[r].sense)), rows[r]);

  out << "COLUMNS\n";
  const auto entries = by_column(lp);
  bool in_int = false;
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    if (m.is_binary[j] != in_int) {
      in_int = m.is_binary[j];
      w.line("", "MARKER", "'MARKER'", "", in_int ? "'INTORG'" : "'INTEND'");
    }
    std::vector<std::pair<std::string_view, std::string>> items;
    if (lp.cost[j] != 0.0 || entries[j].empty()) items.emplace_back(obj, w.number(lp.cost[j]));
    for (const auto& e : entries[j]) items.emplace_back(rows[e.row], w.number(e.val));
    for (std::size_t k = 0; k < items.size(); k += 2) {
      if (k + 1 < items.size()) {
        w.line("", cols[j], items[k].first, items[k].second, items[k + 1].first, items[k + 1].second);
      } else {
        w.line("", cols[j], items[k].first, items[k].second);
      }
    }
  }
  if (in_int) w.line("", "MARKER", "'MARKER'", "", "'INTEND'");

  out << "RHS\n";
  if (lp.cost_offset != 0.0) w.line("", "RHS", obj, w.number(-lp.cost_offset));
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    if (lp.rows[r].rhs != 0.0) w.line("", "RHS", rows[r], w.number(lp.rows[r].rhs));
  }

  out << "BOUNDS\n";
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    const double lo = lp.lo[j];
    const double hi = lp.hi[j];
    if (m.is_binary[j] && lo == 0.0 && hi == 1.0) {
      w.line("BV", "BND", cols[j]);
    } else if (lo == hi) {
      w.line("FX", "BND", cols[j], w.number(lo));
    } else if (std::isinf(lo) && std::isinf(hi)) {
      w.line("FR", "BND", cols[j]);
    } else {
      if (std::isinf(lo)) {
        w.line("MI", "BND", cols[j]);
      } else if (lo != 0.0) {
        w.line("LO", "BND", cols[j], w.number(lo));
      }
      if (!std::isinf(hi)) w.line("UP", "BND", cols[j], w.number(hi));
    }
  }
  out << "ENDATA\n";
}

void write_lp(std::ostream& out, const MilpModel& m, std::string_view name) {
  const LpProblem& lp = m.lp;
  const auto cols = clean_names(m.column_names, "c");
  const auto rows = clean_names(m.row_names, "r");

  // Long expressions wrap after a handful of terms.
  auto expr = [&](const std::vector<int>& idx, const std::vector<double>& val) {
    std::ostringstream s;
    int on_line = 0;
    bool first = true;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (val[k] == 0.0) continue;
      if (on_line == 6) {
        s << "\n   ";
        on_line = 0;
      }
      const double v = val[k];
      s << (v < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
      if (std::abs(v) != 1.0) s << num(std::abs(v)) << ' ';
      s << cols[idx[k]];
      first = false;
      ++on_line;
    }
    if (first) s << "0 " << cols.front();
    return s.str();
  };

  out << "\\ " << name << '\n';
  out << "Minimize\n";
  std::vector<int> idx;
  std::vector<double> val;
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    if (lp.cost[j] == 0.0) continue;
    idx.push_back(static_cast<int>(j));
    val.push_back(lp.cost[j]);
  }
  out << " obj: " << expr(idx, val);
  if (lp.cost_offset != 0.0) out << (lp.cost_offset < 0 ? " - " : " + ") << num(std::abs(lp.cost_offset));
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < lp.num_rows(); ++r) {
    const auto& row = lp.rows[r];
    const char* op = row.sense == RowSense::Le ? "<=" : row.sense == RowSense::Ge ? ">=" : "=";
    out << ' ' << rows[r] << ": " << expr(row.idx, row.val) << ' ' << op << ' ' << num(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    const double lo = lp.lo[j];
    const double hi = lp.hi[j];
    out << ' ';
    if (std::isinf(lo) && std::isinf(hi)) {
      out << cols[j] << " free";
    } else if (lo == hi) {
      out << cols[j] << " = " << num(lo);
    } else {
      out << (std::isinf(lo) ? "-inf" : num(lo)) << " <= " << cols[j] << " <= "
          << (std::isinf(hi) ? "+inf" : num(hi));
    }
    out << '\n';
  }
  if (!m.binaries.empty()) {
    out << "Binaries\n";
    for (int b : m.binaries) out << ' ' << cols[b] << '\n';
  }
  out << "End\n";
}

}  // namespace

ExportFormat parse_export_format(std::string_view tag) {
  if (tag == "mps") return ExportFormat::FixedMps;
  if (tag == "free-mps") return ExportFormat::FreeMps;
  if (tag == "lp") return ExportFormat::Lp;
  throw Error(ErrorCode::UnsupportedFormat,
              "unsupported export format '" + std::string(tag) + "' (mps, free-mps, lp)");
}

const char* to_string(ExportFormat format) {
  switch (format) {
    case ExportFormat::FixedMps: return "mps";
    case ExportFormat::FreeMps: return "free-mps";
    case ExportFormat::Lp: return "lp";
  }
  return "?";
}

void write_milp(std::ostream& out, const MilpModel& milp, ExportFormat format, std::string_view name) {
  switch (format) {
    case ExportFormat::FixedMps: write_mps(out, milp, true, name); break;
    case ExportFormat::FreeMps: write_mps(out, milp, false, name); break;
    case ExportFormat::Lp: write_lp(out, milp, name); break;
  }
}

std::string export_milp(const MilpModel& milp, ExportFormat format, std::string_view name) {
  std::ostringstream s;
  write_milp(s, milp, format, name);
  return s.str();
}

}  // namespace mlrfe
