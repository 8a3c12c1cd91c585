#include "selinf/polyhedra.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "selinf/errors.hpp"
#include "selinf/geometry.hpp"

namespace selinf {

namespace {

class RowSink {
 public:
  explicit RowSink(Index n) : n_(n) {}

  void add(const VectorXd& row, std::size_t step, const char* family) {
    rows_.push_back(row);
    tags_.push_back(RowTag{step, family});
  }
  void note(std::string msg) { diagnostics_.push_back(std::move(msg)); }

  Polyhedron finish() {
    Polyhedron out;
    out.gamma.resize(static_cast<Index>(rows_.size()), n_);
    for (std::size_t i = 0; i < rows_.size(); ++i) out.gamma.row(static_cast<Index>(i)) = rows_[i];
    out.offset = VectorXd::Zero(out.gamma.rows());
    out.tags = std::move(tags_);
    out.diagnostics = std::move(diagnostics_);
    return out;
  }

 private:
  Index n_;
  std::vector<VectorXd> rows_;
  std::vector<RowTag> tags_;
  std::vector<std::string> diagnostics_;
};

void check_k(const Dataset& data, const PathTrace& trace, std::size_t k, Method expected) {
  check_trace_matches(data, trace);
  if (trace.method != expected) {
    throw ArgumentError("builder for " + to_string(expected) + " given a " + to_string(trace.method) +
                        " trace");
  }
  if (k < 1 || k > trace.size()) {
    throw ArgumentError("step " + std::to_string(k) + " outside the trace (length " +
                        std::to_string(trace.size()) + ")");
  }
}

template <class T>
bool contains_item(const std::vector<T>& v, const T& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Entry-side rows of one LAR or lasso step. b is the previous knot's
// functional (absent at step 1). Membership rows of competitors other than
// the winner are implied by the argmax rows and the winner's own membership
// row, so only the latter is emitted.
void entry_rows(RowSink& sink, const StepFrame& frame, const PathStep& st, std::size_t l,
                const std::optional<VectorXd>& b, Index p, bool entry_open) {
  std::optional<VectorXd> winner;
  if (st.add_choice) winner = frame.c_vector(st.add_choice->var, st.add_choice->sign);
  for (const SignedVar& sv : st.competitors_add) {
    if (sv == *st.add_choice) continue;
    // At step 1 the winner's own variable with the opposite sign gives
    // 2 c_1 >= 0, implied by any other competitor pair.
    if (l == 1 && sv.var == st.add_choice->var && p > 1) continue;
    sink.add(*winner - frame.c_vector(sv.var, sv.sign), l, "argmax");
  }
  if (!b) return;
  if (winner) sink.add(*b - *winner, l, "member");
  if (!entry_open) return;
  for (Index j = 0; j < p; ++j) {
    if (frame.active().contains(j)) continue;
    for (int s : {1, -1}) {
      const SignedVar sv{j, s};
      if (contains_item(st.competitors_add, sv) || contains_item(st.excluded_add, sv)) continue;
      sink.add(frame.c_vector(j, s) - *b, l, "nonmember");
    }
  }
}

void deletion_rows(RowSink& sink, const StepFrame& frame, const PathStep& st, std::size_t l,
                   const VectorXd& b) {
  std::optional<VectorXd> winner;
  if (st.del_choice) winner = frame.d_vector(*st.del_choice);
  for (Index j : st.competitors_del) {
    if (j == *st.del_choice) continue;
    sink.add(*winner - frame.d_vector(j), l, "del_argmax");
  }
  if (winner) sink.add(b - *winner, l, "del_member");
  for (Index j : frame.active().columns()) {
    if (contains_item(st.competitors_del, j) || contains_item(st.excluded_del, j)) continue;
    sink.add(frame.d_vector(j) - b, l, "del_nonmember");
  }
}

// Linear-in-y value of the knot at step l (c or d vector of the step's winner).
std::optional<VectorXd> previous_knot(const Dataset& data, const PathTrace& trace, std::size_t l) {
  if (l == 1) return std::nullopt;
  return knot_functional(data, trace, l - 1);
}

}  // namespace

VectorXd Polyhedron::slack(const VectorXd& y) const { return gamma * y - offset; }

bool Polyhedron::contains(const VectorXd& y, double tol) const {
  if (gamma.rows() == 0) return true;
  return slack(y).minCoeff() >= -tol;
}

Index Polyhedron::count_family(const std::string& family) const {
  return static_cast<Index>(
      std::count_if(tags.begin(), tags.end(), [&](const RowTag& t) { return t.family == family; }));
}

Polyhedron gamma_fs(const Dataset& data, const PathTrace& trace, std::size_t k) {
  check_k(data, trace, k, Method::FS);
  const Index p = data.p();
  RowSink sink(data.n());
  ActiveSet act(data.X());
  for (std::size_t l = 1; l <= k; ++l) {
    const PathStep& st = trace.steps[l - 1];
    const VectorXd xl = act.project_out(data.X().col(st.variable));
    const VectorXd lead = st.sign * xl / xl.norm();
    for (Index j = 0; j < p; ++j) {
      if (j == st.variable || act.contains(j)) continue;
      const VectorXd xj = act.project_out(data.X().col(j));
      const VectorXd unit = xj / xj.norm();
      sink.add(lead - unit, l, "fs_opt");
      sink.add(lead + unit, l, "fs_opt");
    }
    if (static_cast<Index>(l) == p) sink.add(st.sign * xl, l, "fs_sign");
    act.add(st.variable);
  }
  return sink.finish();
}

Polyhedron gamma_lar(const Dataset& data, const PathTrace& trace, std::size_t k) {
  check_k(data, trace, k, Method::LAR);
  RowSink sink(data.n());
  for (std::size_t l = 1; l <= k; ++l) {
    const PathStep& st = trace.steps[l - 1];
    const StepFrame frame = frame_before(data, trace, l);
    const std::optional<VectorXd> b = previous_knot(data, trace, l);
    entry_rows(sink, frame, st, l, b, data.p(),
               entry_possible(data, static_cast<std::size_t>(frame.active().size())));
    if (l > 1 || data.p() == 1) sink.add(frame.c_vector(st.variable, st.sign), l, "nonneg");
  }
  return sink.finish();
}

Polyhedron gamma_lasso(const Dataset& data, const PathTrace& trace, std::size_t k) {
  check_k(data, trace, k, Method::LASSO);
  RowSink sink(data.n());
  for (std::size_t l = 1; l <= k; ++l) {
    const PathStep& st = trace.steps[l - 1];
    const StepFrame frame = frame_before(data, trace, l);
    const std::optional<VectorXd> b = previous_knot(data, trace, l);
    entry_rows(sink, frame, st, l, b, data.p(),
               entry_possible(data, static_cast<std::size_t>(frame.active().size())));
    if (b) deletion_rows(sink, frame, st, l, *b);

    const VectorXd won = st.kind == StepKind::Add ? frame.c_vector(st.variable, st.sign)
                                                  : frame.d_vector(st.variable);
    // Only the executed action's knot must be nonnegative.
    if (l > 1 || data.p() == 1) sink.add(won, l, "nonneg");
    if (st.add_choice && st.del_choice) {
      const VectorXd add = frame.c_vector(st.add_choice->var, st.add_choice->sign);
      const VectorXd del = frame.d_vector(*st.del_choice);
      sink.add(st.kind == StepKind::Add ? VectorXd(add - del) : VectorXd(del - add), l, "order");
    }
  }
  return sink.finish();
}

Polyhedron selection_polyhedron(const Dataset& data, const PathTrace& trace, std::size_t k) {
  switch (trace.method) {
    case Method::FS: return gamma_fs(data, trace, k);
    case Method::LAR: return gamma_lar(data, trace, k);
    case Method::LASSO: return gamma_lasso(data, trace, k);
  }
  throw ArgumentError("unknown method");
}

std::size_t row_bound(Method method, std::size_t p, std::size_t k) {
  const double P = static_cast<double>(p), K = static_cast<double>(k);
  switch (method) {
    case Method::FS: return static_cast<std::size_t>(2 * P * K - K * K - K) + (k == p ? 1 : 0);
    case Method::LAR: return static_cast<std::size_t>(3 * P * K - 1.5 * K * K + 1.5 * K);
    case Method::LASSO: return static_cast<std::size_t>(3 * P * K + K);
  }
  return 0;
}

std::size_t refined_row_bound(std::size_t p, std::size_t k) {
  const double P = static_cast<double>(p), K = static_cast<double>(k);
  return static_cast<std::size_t>(4 * P * K - 2 * K * K - K);
}

MQuantities m_quantities(const Dataset& data, const PathTrace& trace, std::size_t l) {
  check_trace_matches(data, trace);
  if (trace.method == Method::FS) throw ArgumentError("M quantities are defined for LAR and lasso traces");
  if (l < 1 || l > trace.size()) throw ArgumentError("step " + std::to_string(l) + " outside the trace");
  const PathStep& st = trace.steps[l - 1];
  if (st.kind != StepKind::Add) throw ArgumentError("M quantities need an entry step");

  const VectorXd& y = data.y();
  const StepFrame frame = frame_before(data, trace, l);
  const VectorXd c = frame.c_vector(st.variable, st.sign);
  const double sjj = c.squaredNorm();

  std::vector<VectorXd> plus, minus, zero, srows;
  for (const SignedVar& sv : st.competitors_add) {
    if (sv.var == st.variable) continue;
    const VectorXd cp = frame.c_vector(sv.var, sv.sign);
    const double r = c.dot(cp) / sjj;
    const double one_minus = 1.0 - r;
    if (std::abs(one_minus) <= 1e-12) {
      zero.push_back(cp - r * c);
    } else if (one_minus > 0) {
      plus.push_back((cp - r * c) / one_minus);
    } else {
      minus.push_back((cp - r * c) / one_minus);
    }
  }

  if (l > 1) {
    const VectorXd b = knot_functional(data, trace, l - 1);
    const PathStep& prev = trace.steps[l - 2];
    std::optional<StepFrame> prev_frame;
    if (trace.steps[l - 2].kind == StepKind::Add) prev_frame.emplace(frame_before(data, trace, l - 1));
    for (Index j = 0; j < data.p(); ++j) {
      if (frame.active().contains(j)) continue;
      for (int s : {1, -1}) {
        const SignedVar sv{j, s};
        if (contains_item(st.excluded_add, sv)) continue;
        const bool member = contains_item(st.competitors_add, sv);
        if (sv.var == st.variable) {
          if (sv.sign == st.sign) continue;  // own membership sits in the knot chain
          // c(j_l, -s_l) = r c_l; with r <= 1 its membership follows from
          // 0 <= lambda_l <= lambda_{l-1}.
          const double r = frame.c_denominator(j, st.sign) / frame.c_denominator(j, s);
          if (r <= 1.0) continue;
        }
        const VectorXd cp = frame.c_vector(j, s);
        if (member && prev_frame && contains_item(prev.competitors_add, sv) &&
            std::abs(prev_frame->c_denominator(j, s)) >= kDenominatorTol) {
          // Unchanged competitor that already lost to step l-1's winner:
          // c^T y <= lambda_{l-1} is implied.
          const VectorXd old = prev_frame->c_vector(j, s);
          if ((cp - old).norm() <= 1e-12 * old.norm()) continue;
        }
        srows.push_back(member ? VectorXd(b - cp) : VectorXd(cp - b));
      }
    }
  }

  auto stack = [&](const std::vector<VectorXd>& rows) {
    MatrixXd m(static_cast<Index>(rows.size()), data.n());
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Index>(i)) = rows[i];
    return m;
  };
  MQuantities out;
  out.plus_terms = stack(plus);
  out.minus_terms = stack(minus);
  out.zero_terms = stack(zero);
  out.s_rows = stack(srows);
  if (out.plus_terms.rows() > 0) out.m_plus = (out.plus_terms * y).maxCoeff();
  if (out.minus_terms.rows() > 0) out.m_minus = (out.minus_terms * y).minCoeff();
  if (out.zero_terms.rows() > 0) out.m_zero = (out.zero_terms * y).maxCoeff();
  return out;
}

Polyhedron refined_lar_polyhedron(const Dataset& data, const PathTrace& trace, std::size_t k) {
  check_k(data, trace, k, Method::LAR);
  RowSink sink(data.n());
  std::vector<VectorXd> knots;
  for (std::size_t l = 1; l <= k; ++l) knots.push_back(knot_functional(data, trace, l));
  for (std::size_t l = 1; l < k; ++l) sink.add(knots[l - 1] - knots[l], l, "chain");
  sink.add(knots[k - 1], k, "chain");

  for (std::size_t l = 1; l <= k; ++l) {
    const MQuantities mq = m_quantities(data, trace, l);
    const VectorXd& c = knots[l - 1];
    if (l == k) {
      for (Index i = 0; i < mq.plus_terms.rows(); ++i) sink.add(c - mq.plus_terms.row(i).transpose(), l, "m_plus");
    }
    for (Index i = 0; i < mq.minus_terms.rows(); ++i) sink.add(mq.minus_terms.row(i).transpose() - c, l, "m_minus");
    for (Index i = 0; i < mq.zero_terms.rows(); ++i) sink.add(-mq.zero_terms.row(i).transpose(), l, "m_zero");
    for (Index i = 0; i < mq.s_rows.rows(); ++i) sink.add(mq.s_rows.row(i).transpose(), l, "m_s");
  }
  return sink.finish();
}

bool CompactSpacingRep::contains(const VectorXd& y, double tol) const {
  const VectorXd s = gamma * y - offset;
  for (Index i = 0; i < s.size(); ++i) {
    if (std::isfinite(offset[i]) && s[i] < -tol) return false;
  }
  return true;
}

CompactSpacingRep compact_spacing_rep(const Dataset& data, const PathTrace& trace, std::size_t k) {
  check_k(data, trace, k, Method::LAR);
  CompactSpacingRep rep;
  rep.gamma.resize(static_cast<Index>(k) + 1, data.n());
  std::vector<VectorXd> knots;
  for (std::size_t l = 1; l <= k; ++l) knots.push_back(knot_functional(data, trace, l));
  for (std::size_t l = 1; l < k; ++l) rep.gamma.row(static_cast<Index>(l) - 1) = knots[l - 1] - knots[l];
  rep.gamma.row(static_cast<Index>(k) - 1) = knots[k - 1];
  rep.gamma.row(static_cast<Index>(k)) = knots[k - 1];
  rep.m_plus = m_quantities(data, trace, k).m_plus;
  rep.offset = VectorXd::Zero(static_cast<Index>(k) + 1);
  rep.offset[static_cast<Index>(k)] = rep.m_plus;
  return rep;
}

}  // namespace selinf
