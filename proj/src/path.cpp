#include "selinf/path.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selinf/active_set.hpp"
#include "selinf/errors.hpp"
#include "selinf/geometry.hpp"

namespace selinf {

namespace {

constexpr double kTieTol = 1e-12;

bool near_tie(double a, double b) {
  return std::abs(a - b) <= kTieTol * std::max({std::abs(a), std::abs(b), 1e-300});
}

void validate_steps(const Dataset& data, std::size_t max_steps) {
  const std::size_t cap = max_path_steps(data);
  if (max_steps < 1 || max_steps > cap) {
    throw ArgumentError("max_steps must lie in [1, " + std::to_string(cap) + "], got " +
                        std::to_string(max_steps));
  }
}

std::string column_label(const Dataset& data, Index j) {
  return "column " + std::to_string(j) + " (" + data.names()[static_cast<std::size_t>(j)] + ")";
}

void check_general_position(const Dataset& data, const VectorXd& resid, Index j) {
  if (!(resid.norm() > 1e-12 * data.X().col(j).norm())) {
    throw GeneralPositionError(column_label(data, j) +
                               " has zero residual after projecting out the active columns");
  }
}

// Shared LAR / lasso loop.
PathTrace lar_like(const Dataset& data, std::size_t max_steps, bool lasso) {
  if (lasso) {
    if (max_steps < 1) throw ArgumentError("max_steps must be at least 1");
  } else {
    validate_steps(data, max_steps);
  }
  PathTrace trace;
  trace.method = lasso ? Method::LASSO : Method::LAR;
  trace.n = data.n();
  trace.p = data.p();

  const VectorXd& y = data.y();
  std::vector<Index> active;
  std::vector<int> signs;
  double lambda_prev = kInf;
  // Pair that just left (barred from re-entering at the same knot) and the
  // variable that just entered (barred from leaving); -1 when none.
  SignedVar just_deleted{-1, 0};
  Index just_added = -1;

  for (std::size_t l = 1; l <= max_steps; ++l) {
    const StepFrame frame(data, active, signs);
    PathStep st;

    double best_add = -kInf;
    const bool entry_open = entry_possible(data, active.size());
    for (Index j = 0; j < data.p() && entry_open; ++j) {
      if (frame.active().contains(j)) continue;
      const VectorXd pj = frame.residual_column(j);
      check_general_position(data, pj, j);
      const double num = pj.dot(y);
      for (int s : {1, -1}) {
        const SignedVar cand{j, s};
        if (lasso && cand == just_deleted) {
          st.excluded_add.push_back(cand);
          continue;
        }
        const double den = frame.c_denominator(j, s);
        if (std::abs(den) < kDenominatorTol) {
          st.excluded_add.push_back(cand);
          st.diagnostics.push_back("entry denominator vanishes for " + column_label(data, j) +
                                   (s > 0 ? " sign +1" : " sign -1") + "; candidate excluded");
          continue;
        }
        const double ratio = num / den;
        if (!(ratio <= lambda_prev)) continue;
        st.competitors_add.push_back(cand);
        if (st.add_choice && near_tie(ratio, best_add)) {
          st.diagnostics.push_back("entry tie between " + column_label(data, st.add_choice->var) +
                                   " and " + column_label(data, j) + "; lower index kept");
        } else if (ratio > best_add) {
          best_add = ratio;
          st.add_choice = cand;
        }
      }
    }
    st.knot_add = best_add;

    double best_del = -kInf;
    if (lasso && !active.empty()) {
      const VectorXd beta = frame.active().pinv(y);
      for (std::size_t pos = 0; pos < active.size(); ++pos) {
        const Index j = active[pos];
        if (j == just_added) {
          st.excluded_del.push_back(j);
          continue;
        }
        const double g = frame.d_denominator(j);
        if (std::abs(g) < kDenominatorTol) {
          st.excluded_del.push_back(j);
          st.diagnostics.push_back("deletion denominator vanishes for " + column_label(data, j) +
                                   "; candidate excluded");
          continue;
        }
        const double ratio = beta[static_cast<Index>(pos)] / g;
        if (!(ratio <= lambda_prev)) continue;
        st.competitors_del.push_back(j);
        if (st.del_choice && near_tie(ratio, best_del)) {
          st.diagnostics.push_back("deletion tie between " + column_label(data, *st.del_choice) +
                                   " and " + column_label(data, j) + "; earlier entry kept");
        } else if (ratio > best_del) {
          best_del = ratio;
          st.del_choice = j;
        }
      }
    }
    st.knot_del = best_del;

    if (!st.add_choice && !st.del_choice) {
      trace.termination = "no eligible candidate at step " + std::to_string(l);
      break;
    }
    const bool do_delete = st.del_choice && (!st.add_choice || best_del >= best_add ||
                                             near_tie(best_del, best_add));
    if (st.del_choice && st.add_choice && near_tie(best_del, best_add)) {
      st.diagnostics.push_back("add/delete tie at the knot; deletion preferred");
    }
    const double lambda = do_delete ? best_del : best_add;
    if (lambda < 0) {
      trace.termination = "next knot is negative at step " + std::to_string(l);
      break;
    }

    st.knot = lambda;
    if (do_delete) {
      st.kind = StepKind::Delete;
      st.variable = *st.del_choice;
      st.sign = 0;
      const auto it = std::find(active.begin(), active.end(), st.variable);
      const std::size_t pos = static_cast<std::size_t>(it - active.begin());
      just_deleted = SignedVar{st.variable, signs[pos]};
      just_added = -1;
      active.erase(it);
      signs.erase(signs.begin() + static_cast<std::ptrdiff_t>(pos));
    } else {
      st.kind = StepKind::Add;
      st.variable = st.add_choice->var;
      st.sign = st.add_choice->sign;
      active.push_back(st.variable);
      signs.push_back(st.sign);
      just_added = st.variable;
      just_deleted = SignedVar{-1, 0};
    }
    st.active_after = active;
    st.signs_after = signs;
    trace.steps.push_back(std::move(st));
    lambda_prev = lambda;
  }
  return trace;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::FS: return "fs";
    case Method::LAR: return "lar";
    case Method::LASSO: return "lasso";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "fs") return Method::FS;
  if (t == "lar") return Method::LAR;
  if (t == "lasso") return Method::LASSO;
  throw ArgumentError("unknown method '" + s + "' (expected fs, lar or lasso)");
}

std::size_t PathTrace::add_steps() const {
  return static_cast<std::size_t>(std::count_if(
      steps.begin(), steps.end(), [](const PathStep& s) { return s.kind == StepKind::Add; }));
}

std::vector<Index> PathTrace::active_before(std::size_t l) const {
  if (l < 1 || l > steps.size() + 1) throw ArgumentError("step index out of range");
  return l == 1 ? std::vector<Index>{} : steps[l - 2].active_after;
}

std::vector<int> PathTrace::signs_before(std::size_t l) const {
  if (l < 1 || l > steps.size() + 1) throw ArgumentError("step index out of range");
  return l == 1 ? std::vector<int>{} : steps[l - 2].signs_after;
}

double PathTrace::knot(std::size_t l) const {
  if (l == 0) return kInf;
  if (l > steps.size()) throw ArgumentError("knot index out of range");
  if (!steps[l - 1].knot) throw ArgumentError("step carries no knot");
  return *steps[l - 1].knot;
}

PathTrace PathTrace::prefix(std::size_t l) const {
  if (l > steps.size()) throw ArgumentError("prefix longer than the trace");
  PathTrace out = *this;
  out.steps.resize(l);
  if (l < steps.size()) out.termination.clear();
  return out;
}

bool entry_possible(const Dataset& data, std::size_t active_size) {
  return active_size < max_path_steps(data);
}

std::size_t max_path_steps(const Dataset& data) {
  const Index n_eff = data.n() - (data.centered() ? 1 : 0);
  return static_cast<std::size_t>(std::max<Index>(0, std::min(n_eff, data.p())));
}

PathTrace fs_path(const Dataset& data, std::size_t max_steps) {
  validate_steps(data, max_steps);
  PathTrace trace;
  trace.method = Method::FS;
  trace.n = data.n();
  trace.p = data.p();

  const VectorXd& y = data.y();
  ActiveSet act(data.X());
  std::vector<int> signs;
  for (std::size_t l = 1; l <= max_steps; ++l) {
    const VectorXd r = act.project_out(y);
    if (!(r.norm() > 1e-12 * y.norm())) {
      trace.termination = "residual is numerically zero before step " + std::to_string(l);
      break;
    }
    PathStep st;
    double best = -kInf;
    double best_inner = 0;
    Index best_j = -1;
    for (Index j = 0; j < data.p(); ++j) {
      if (act.contains(j)) continue;
      const VectorXd xt = act.project_out(data.X().col(j));
      check_general_position(data, xt, j);
      const double inner = xt.dot(y);
      const double score = std::abs(inner) / xt.norm();
      if (best_j >= 0 && near_tie(score, best)) {
        st.diagnostics.push_back("tie between " + column_label(data, best_j) + " and " +
                                 column_label(data, j) + "; lower index kept");
      } else if (score > best) {
        best = score;
        best_inner = inner;
        best_j = j;
      }
    }
    st.kind = StepKind::Add;
    st.variable = best_j;
    st.sign = best_inner >= 0 ? 1 : -1;
    if (best_inner == 0) st.diagnostics.push_back("zero partial correlation; sign set to +1");
    act.add(best_j);
    signs.push_back(st.sign);
    st.active_after = act.columns();
    st.signs_after = signs;
    trace.steps.push_back(std::move(st));
  }
  return trace;
}

PathTrace lar_path(const Dataset& data, std::size_t max_steps) { return lar_like(data, max_steps, false); }

PathTrace lasso_path(const Dataset& data, std::size_t max_steps) { return lar_like(data, max_steps, true); }

PathTrace run_path(Method method, const Dataset& data, std::size_t max_steps) {
  switch (method) {
    case Method::FS: return fs_path(data, max_steps);
    case Method::LAR: return lar_path(data, max_steps);
    case Method::LASSO: return lasso_path(data, max_steps);
  }
  throw ArgumentError("unknown method");
}

void check_trace_matches(const Dataset& data, const PathTrace& trace) {
  if (trace.n != data.n() || trace.p != data.p()) {
    std::ostringstream msg;
    msg << "trace was built for an " << trace.n << "x" << trace.p << " design, dataset is "
        << data.n() << "x" << data.p();
    throw ArgumentError(msg.str());
  }
}

}  // namespace selinf
