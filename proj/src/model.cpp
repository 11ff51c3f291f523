#include "mlrfe/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

namespace mlrfe {

const char* to_string(RowSense sense) {
  switch (sense) {
    case RowSense::Le: return "<=";
    case RowSense::Eq: return "=";
    case RowSense::Ge: return ">=";
  }
  return "?";
}

std::size_t ProblemIR::num_continuous() const {
  return static_cast<std::size_t>(std::count_if(variables.begin(), variables.end(), [](const auto& v) {
    return v.kind == VarKind::Continuous;
  }));
}

std::size_t ProblemIR::num_binaries() const { return variables.size() - num_continuous(); }

std::vector<int> ProblemIR::binary_ids() const {
  std::vector<int> ids;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].kind == VarKind::Binary) ids.push_back(static_cast<int>(i));
  }
  return ids;
}

int ProblemIR::find_variable(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

double ProblemIR::objective_value(const std::vector<double>& x) const {
  double v = objective.constant;
  for (const auto& t : objective.terms) v += t.coef * x[t.var];
  return v;
}

int ProblemBuilder::add_continuous(std::string name, double lo, double hi) {
  desc_.variables.push_back({std::move(name), VarKind::Continuous, lo, hi});
  return static_cast<int>(desc_.variables.size() - 1);
}

int ProblemBuilder::add_binary(std::string name) {
  desc_.variables.push_back({std::move(name), VarKind::Binary, 0.0, 1.0});
  return static_cast<int>(desc_.variables.size() - 1);
}

void ProblemBuilder::add_constraint(std::string name, std::vector<LinTerm> terms, RowSense sense,
                                    double rhs) {
  desc_.constraints.push_back({std::move(name), std::move(terms), sense, rhs});
}

void ProblemBuilder::add_interpolant(std::string name, std::vector<int> inputs,
                                     std::vector<InterpolantOutput> outputs,
                                     std::optional<int> activation) {
  desc_.interpolants.push_back({std::move(name), std::move(inputs), std::move(outputs), activation});
}

void ProblemBuilder::minimize(std::vector<LinTerm> terms, double constant) {
  desc_.objective = {std::move(terms), constant};
  desc_.sense = ObjectiveSense::Minimize;
}

void ProblemBuilder::maximize(std::vector<LinTerm> terms, double constant) {
  desc_.objective = {std::move(terms), constant};
  desc_.sense = ObjectiveSense::Maximize;
}

ProblemIR ProblemBuilder::build() const { return build_problem(desc_); }

namespace {

bool valid_id(const ProblemIR& ir, int id) {
  return id >= 0 && static_cast<std::size_t>(id) < ir.variables.size();
}

void check_terms(const ProblemIR& ir, const std::vector<LinTerm>& terms, const std::string& where,
                 std::vector<Violation>& out) {
  std::unordered_set<int> seen;
  for (const auto& t : terms) {
    if (!valid_id(ir, t.var)) {
      out.push_back({ErrorCode::DanglingVariable,
                     where + " references undeclared variable " + std::to_string(t.var)});
      continue;
    }
    if (!std::isfinite(t.coef)) {
      out.push_back({ErrorCode::InvalidModel, where + " has a non-finite coefficient"});
    }
    if (!seen.insert(t.var).second) {
      out.push_back({ErrorCode::InvalidModel,
                     where + " repeats variable " + ir.variables[t.var].name});
    }
  }
}

}  // namespace

std::vector<Violation> validate(const ProblemIR& ir) {
  std::vector<Violation> out;

  std::set<std::string> names;
  for (const auto& v : ir.variables) {
    if (!names.insert(v.name).second) {
      out.push_back({ErrorCode::InvalidModel, "duplicate variable name " + v.name});
    }
    if (std::isnan(v.lo) || std::isnan(v.hi) || v.lo > v.hi) {
      out.push_back({ErrorCode::InvalidModel, "variable " + v.name + " has empty bounds"});
    }
    if (v.kind == VarKind::Binary && (v.lo != 0.0 || v.hi != 1.0)) {
      out.push_back({ErrorCode::InvalidModel, "binary " + v.name + " must have bounds [0,1]"});
    }
  }

  std::vector<bool> referenced(ir.variables.size(), false);
  for (std::size_t r = 0; r < ir.constraints.size(); ++r) {
    const auto& row = ir.constraints[r];
    check_terms(ir, row.terms, "row " + row.name, out);
    if (!std::isfinite(row.rhs)) {
      out.push_back({ErrorCode::InvalidModel, "row " + row.name + " has a non-finite rhs"});
    }
    for (const auto& t : row.terms) {
      if (valid_id(ir, t.var)) referenced[t.var] = true;
    }
  }
  check_terms(ir, ir.objective.terms, "objective", out);
  for (const auto& t : ir.objective.terms) {
    if (valid_id(ir, t.var)) referenced[t.var] = true;
  }

  for (const auto& f : ir.interpolants) {
    const std::string where = "interpolant " + f.name;
    if (f.outputs.empty()) {
      out.push_back({ErrorCode::InvalidModel, where + " has no outputs"});
      continue;
    }
    bool tables_ok = true;
    for (const auto& o : f.outputs) {
      if (auto msg = check_table(o.table); !msg.empty()) {
        out.push_back({ErrorCode::InvalidTable, where + ": " + msg});
        tables_ok = false;
      } else if (!(o.table.grid == f.grid())) {
        out.push_back({ErrorCode::InvalidTable, where + ": output tables use different grids"});
        tables_ok = false;
      }
    }
    if (!tables_ok || f.grid().dims() == 0) continue;
    const Grid& g = f.grid();
    if (f.inputs.size() != g.dims()) {
      out.push_back({ErrorCode::DimensionMismatch,
                     where + " has " + std::to_string(f.inputs.size()) + " inputs for a " +
                         std::to_string(g.dims()) + "-axis grid"});
      continue;
    }
    std::unordered_set<int> used;
    for (std::size_t j = 0; j < f.inputs.size(); ++j) {
      const int id = f.inputs[j];
      if (!valid_id(ir, id)) {
        out.push_back({ErrorCode::DanglingVariable, where + " input is undeclared"});
        continue;
      }
      if (!used.insert(id).second) {
        out.push_back({ErrorCode::InvalidModel, where + " repeats an input variable"});
      }
      const auto& v = ir.variables[id];
      if (v.kind != VarKind::Continuous) {
        out.push_back({ErrorCode::InvalidModel, where + " input " + v.name + " is not continuous"});
      }
      if (!f.activation) {
        const auto& ax = g.axis(j);
        const double tol = kHullClampTol * (ax.back() - ax.front());
        if (v.lo < ax.front() - tol || v.hi > ax.back() + tol) {
          out.push_back({ErrorCode::BoundsOutsideHull,
                         where + " input " + v.name + " bounds leave the axis hull"});
        }
      }
    }
    for (const auto& o : f.outputs) {
      if (!valid_id(ir, o.var)) {
        out.push_back({ErrorCode::DanglingVariable, where + " output is undeclared"});
        continue;
      }
      if (ir.variables[o.var].kind != VarKind::Continuous) {
        out.push_back({ErrorCode::InvalidModel, where + " output is not continuous"});
      }
      if (used.count(o.var)) {
        out.push_back({ErrorCode::InvalidModel, where + " output is also an input"});
      }
    }
    if (f.activation) {
      if (!valid_id(ir, *f.activation)) {
        out.push_back({ErrorCode::DanglingVariable, where + " activation is undeclared"});
      } else if (ir.variables[*f.activation].kind != VarKind::Binary) {
        out.push_back({ErrorCode::InvalidModel, where + " activation is not binary"});
      }
    }
  }

  // Outputs must feed something, or they are dead weight in the relaxation.
  for (const auto& f : ir.interpolants) {
    for (const auto& o : f.outputs) {
      if (valid_id(ir, o.var) && !referenced[o.var]) {
        out.push_back({ErrorCode::DanglingVariable, "interpolant " + f.name + " output " +
                                                        ir.variables[o.var].name +
                                                        " appears in no row or objective"});
      }
    }
  }
  return out;
}

ProblemIR build_problem(ProblemDescription desc) {
  ProblemIR ir;
  ir.variables = std::move(desc.variables);
  ir.constraints = std::move(desc.constraints);
  ir.interpolants = std::move(desc.interpolants);
  ir.objective = std::move(desc.objective);
  if (desc.sense == ObjectiveSense::Maximize) {
    ir.negated = true;
    for (auto& t : ir.objective.terms) t.coef = -t.coef;
    ir.objective.constant = -ir.objective.constant;
  }
  if (auto v = validate(ir); !v.empty()) throw Error(v.front().code, v.front().message);
  return ir;
}

ProblemSize problem_size(const ProblemIR& ir) {
  ProblemSize s;
  s.continuous = ir.num_continuous();
  s.binaries = ir.num_binaries();
  s.constraints = ir.constraints.size();
  s.columns = ir.variables.size();
  s.rows = ir.constraints.size();
  for (const auto& row : ir.constraints) {
    for (const auto& t : row.terms) s.nonzeros += t.coef != 0.0 ? 1 : 0;
  }

  for (const auto& f : ir.interpolants) {
    const Grid& g = f.grid();
    const std::size_t n = g.dims();
    const std::size_t points = g.num_points();
    const std::size_t act = f.activation ? 1 : 0;
    s.xi += g.sum_axis_sizes();
    s.lambda += points;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = g.axis_size(j);
      s.segments += k - 1;
      // linking row: x_j and every nonzero breakpoint
      s.nonzeros += 1 + static_cast<std::size_t>(std::count_if(
                            g.axis(j).begin(), g.axis(j).end(), [](double v) { return v != 0.0; }));
      s.nonzeros += k + act;                 // convexity
      s.nonzeros += k + k * (points / k);    // marginalisation
      s.nonzeros += (k - 1) + act;           // segment choice
      s.nonzeros += k + 2 * (k - 1);         // xi_k <= s_{k-1} + s_k
      s.rows += 1 + 1 + k + 1 + k;
    }
    for (const auto& o : f.outputs) {
      s.rows += 1;
      s.nonzeros += 1 + static_cast<std::size_t>(std::count_if(
                            o.table.values.begin(), o.table.values.end(),
                            [](double v) { return v != 0.0; }));
    }
  }
  s.columns += s.xi + s.lambda + s.segments;
  return s;
}

namespace {

double linear_part(const ProblemIR& ir, const std::vector<double>& x, bool scaled) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ir.variables.size(); ++i) {
    const auto& v = ir.variables[i];
    const double lo = scaled ? std::max(1.0, std::abs(v.lo)) : 1.0;
    const double hi = scaled ? std::max(1.0, std::abs(v.hi)) : 1.0;
    worst = std::max({worst, (v.lo - x[i]) / lo, (x[i] - v.hi) / hi});
    if (v.kind == VarKind::Binary) worst = std::max(worst, std::abs(x[i] - std::round(x[i])));
  }
  for (const auto& row : ir.constraints) {
    double act = 0.0;
    double scale = std::max(1.0, std::abs(row.rhs));
    for (const auto& t : row.terms) {
      act += t.coef * x[t.var];
      scale = std::max(scale, std::abs(t.coef * x[t.var]));
    }
    const double d = (act - row.rhs) / (scaled ? scale : 1.0);
    switch (row.sense) {
      case RowSense::Le: worst = std::max(worst, d); break;
      case RowSense::Ge: worst = std::max(worst, -d); break;
      case RowSense::Eq: worst = std::max(worst, std::abs(d)); break;
    }
  }
  return worst;
}

double interpolant_part(const ProblemIR& ir, const std::vector<double>& x, bool scaled) {
  double worst = 0.0;
  for (const auto& f : ir.interpolants) {
    const bool on = !f.activation || x[*f.activation] > 0.5;
    std::vector<double> in(f.inputs.size());
    for (std::size_t j = 0; j < in.size(); ++j) in[j] = x[f.inputs[j]];
    if (!on) {
      for (double v : in) worst = std::max(worst, std::abs(v));
      for (const auto& o : f.outputs) worst = std::max(worst, std::abs(x[o.var]));
      continue;
    }
    for (const auto& o : f.outputs) {
      double value;
      try {
        value = interpolate(o.table, in);
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
      const double scale = scaled ? std::max(1.0, std::abs(value)) : 1.0;
      worst = std::max(worst, std::abs(x[o.var] - value) / scale);
    }
  }
  return worst;
}

}  // namespace

double linear_violation(const ProblemIR& ir, const std::vector<double>& x) {
  return linear_part(ir, x, false);
}

double interpolant_violation(const ProblemIR& ir, const std::vector<double>& x) {
  return interpolant_part(ir, x, false);
}

double scaled_violation(const ProblemIR& ir, const std::vector<double>& x) {
  return std::max(linear_part(ir, x, true), interpolant_part(ir, x, true));
}

}  // namespace mlrfe
