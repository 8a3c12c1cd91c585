#include "selinf/geometry.hpp"

#include "selinf/errors.hpp"
#include "selinf/path.hpp"

namespace selinf {

StepFrame::StepFrame(const Dataset& data, const std::vector<Index>& active,
                     const std::vector<int>& signs)
    : data_(&data), act_(data.X()), signs_(signs) {
  if (active.size() != signs.size()) throw ArgumentError("active list and sign list differ in length");
  for (Index j : active) act_.add(j);
  VectorXd s(static_cast<Index>(signs_.size()));
  for (std::size_t i = 0; i < signs_.size(); ++i) s[static_cast<Index>(i)] = signs_[i];
  w_ = act_.pinv_transpose(s);
  g_ = act_.gram_solve(s);
}

double StepFrame::c_denominator(Index j, int s) const {
  return static_cast<double>(s) - data_->X().col(j).dot(w_);
}

VectorXd StepFrame::c_vector(Index j, int s) const {
  return residual_column(j) / c_denominator(j, s);
}

double StepFrame::d_denominator(Index j) const {
  const Index pos = act_.position(j);
  if (pos < 0) throw ArgumentError("d-vector requested for an inactive variable");
  return g_[pos];
}

VectorXd StepFrame::d_vector(Index j) const {
  const Index pos = act_.position(j);
  if (pos < 0) throw ArgumentError("d-vector requested for an inactive variable");
  VectorXd e = VectorXd::Zero(act_.size());
  e[pos] = 1.0;
  return act_.pinv_transpose(e) / g_[pos];
}

StepFrame frame_before(const Dataset& data, const PathTrace& trace, std::size_t l) {
  return StepFrame(data, trace.active_before(l), trace.signs_before(l));
}

VectorXd knot_functional(const Dataset& data, const PathTrace& trace, std::size_t l) {
  if (l < 1 || l > trace.size()) throw ArgumentError("knot_functional: step out of range");
  if (trace.method == Method::FS) throw ArgumentError("forward stepwise steps carry no knot");
  const StepFrame frame = frame_before(data, trace, l);
  const PathStep& st = trace.steps[l - 1];
  if (st.kind == StepKind::Add) return frame.c_vector(st.variable, st.sign);
  return frame.d_vector(st.variable);
}

}  // namespace selinf
