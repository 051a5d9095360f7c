#include "grim/geim.hpp"

#include "grim/error.hpp"

#include <cmath>
#include <string>

namespace grim {
namespace {

// First index attaining the maximum.
Index argmax(const Vector& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

// ||e_i - Q C(:, i)||_X for every feature i.
Vector residual_norms(const NormOracle& norm, const Matrix& q, const Matrix& coeffs, Index n) {
  Vector out(n);
  if (const Matrix* g = norm.gram()) {
    if (q.cols() == 0) return g->diagonal().cwiseMax(0.0).cwiseSqrt();
    const Matrix gq = (*g) * q;
    const Matrix qgq = q.transpose() * gq;
    const Matrix ct = coeffs.transpose();  // N x k
    const Vector cross = (gq.array() * ct.array()).rowwise().sum();
    const Vector quad = ((ct * qgq).array() * ct.array()).rowwise().sum();
    out = g->diagonal() - 2.0 * cross + quad;
    return out.cwiseMax(0.0).cwiseSqrt();
  }
  for (Index i = 0; i < n; ++i) {
    Vector r = Vector::Zero(n);
    r(i) = 1.0;
    if (q.cols() > 0) r -= q * coeffs.col(i);
    out(i) = norm(r);
  }
  return out;
}

}  // namespace

NormOracle NormOracle::from_gram(Matrix gram) {
  if (gram.rows() != gram.cols()) throw DataError("Gram matrix must be square");
  NormOracle o;
  o.gram_ = std::move(gram);
  return o;
}

NormOracle NormOracle::from_function(Function fn) {
  NormOracle o;
  o.fn_ = std::move(fn);
  return o;
}

double NormOracle::operator()(const Vector& coefficients) const {
  if (gram_) {
    if (coefficients.size() != gram_->rows()) throw DataError("norm oracle dimension mismatch");
    return std::sqrt(std::max(0.0, coefficients.dot((*gram_) * coefficients)));
  }
  if (!fn_) throw ConfigError("empty norm oracle");
  return fn_(coefficients);
}

Vector geim_interpolate(const GeimState& state, const Vector& w) {
  if (state.size() == 0) throw ConfigError("GEIM state is empty");
  if (w.size() != state.basis_q.rows()) throw DataError("GEIM interpolation dimension mismatch");
  const Vector values = state.functional_rows * w;
  const Vector c = state.q_evaluations.triangularView<Eigen::Lower>().solve(values);
  return state.basis_q * c;
}

GeimFit geim_fit(const ProblemInstance& instance, const NormOracle& norm, Index n_max,
                 double stop_tol) {
  instance.validate();
  const Index n_features = instance.feature_count();
  const Index lambda = instance.functional_count();
  if (n_max < 1 || n_max > std::min(n_features, lambda)) {
    throw ConfigError("GEIM n_max must lie in [1, min(N, Lambda)]");
  }
  const Matrix& phi_eval = instance.evaluations;
  const double mass = (instance.weights.cwiseAbs().array() * instance.feature_norms.array()).sum();
  const double degenerate = 1e-12 * mass;

  GeimFit fit;
  GeimState& st = fit.state;
  st.basis_q.resize(n_features, 0);
  st.q_evaluations.resize(0, 0);
  st.functional_rows.resize(0, n_features);
  Matrix phi_q(lambda, 0);  // evaluations of every functional on every q_j

  for (Index n = 0; n < n_max; ++n) {
    // Coefficients of J_{n-1}[f_i] in the q basis, all features at once.
    Matrix coeffs(n, n_features);
    if (n > 0) {
      coeffs = st.q_evaluations.triangularView<Eigen::Lower>().solve(st.functional_rows);
    }
    const Vector norms = residual_norms(norm, st.basis_q, coeffs, n_features);
    const Index h = argmax(norms);

    Vector r = Vector::Zero(n_features);
    r(h) = 1.0;
    Vector r_values = phi_eval.col(h);
    if (n > 0) {
      r -= st.basis_q * coeffs.col(h);
      r_values -= phi_q * coeffs.col(h);
    }
    const Index sigma = argmax(r_values.cwiseAbs());
    const double pivot = r_values(sigma);
    if (!(std::abs(pivot) >= degenerate)) {
      throw NumericalError("GEIM normalizer " + std::to_string(pivot) + " at step " +
                           std::to_string(n + 1) + " is below threshold");
    }

    st.selected_features.push_back(h);
    st.selected_functionals.push_back(sigma);
    st.basis_q.conservativeResize(Eigen::NoChange, n + 1);
    st.basis_q.col(n) = r / pivot;
    phi_q.conservativeResize(Eigen::NoChange, n + 1);
    phi_q.col(n) = r_values / pivot;
    st.functional_rows.conservativeResize(n + 1, Eigen::NoChange);
    st.functional_rows.row(n) = phi_eval.row(sigma);
    st.q_evaluations.conservativeResize(n + 1, n + 1);
    for (Index j = 0; j <= n; ++j) {
      st.q_evaluations(n, j) = phi_q(sigma, j);
      st.q_evaluations(j, n) = phi_q(st.selected_functionals[static_cast<std::size_t>(j)], n);
    }
    st.q_evaluations(n, n) = 1.0;

    const Vector interp = geim_interpolate(st, instance.weights);
    const double err = norm(Vector(instance.weights - interp));
    fit.selection_norms.push_back(norms(h));
    fit.phi_errors.push_back(err);
    fit.interpolants.push_back(interp);
    if (err <= stop_tol) break;
  }
  return fit;
}

}  // namespace grim
