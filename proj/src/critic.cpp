#include "rlmpc/critic.hpp"

#include <algorithm>

#include <Eigen/Dense>

#include "rlmpc/error.hpp"

namespace rlmpc {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 1) throw InvalidConfig("replay buffer capacity must be >= 1");
}

void ReplayBuffer::push(const Transition& t) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(t);
}

FeatureVector features(const State& s, const Action& a) {
  const double chi[kChiDim] = {s.x, s.y, s.theta, a.v, a.omega};
  FeatureVector phi;
  int k = 0;
  for (int i = 0; i < kChiDim; ++i) {
    for (int j = i; j < kChiDim; ++j) {
      phi[static_cast<std::size_t>(k++)] = chi[i] * chi[j];
    }
  }
  return phi;
}

double q_value(const CriticWeights& w, const State& s, const Action& a) {
  const FeatureVector phi = features(s, a);
  double q = 0.0;
  for (int i = 0; i < kFeatureDim; ++i) {
    q += w[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i)];
  }
  return q;
}

double td_error(const CriticWeights& w, const CriticWeights& w_prev, const Transition& t) {
  return q_value(w, t.state, t.action) - q_value(w_prev, t.next_state, t.next_action) - t.cost;
}

double critic_loss(const CriticWeights& w, const CriticWeights& w_prev, const ReplayBuffer& buf) {
  if (buf.empty()) throw EmptyBuffer("critic_loss: empty replay buffer");
  double sum = 0.0;
  for (const Transition& t : buf) {
    const double e = td_error(w, w_prev, t);
    sum += e * e;
  }
  return 0.5 * sum;
}

namespace {

// Each transition contributes one affine residual w . phi_i - b_i where
// b_i = cost_i + w_prev . phi'_i.
void assemble_regression(const ReplayBuffer& buf, const CriticWeights& w_prev, Eigen::MatrixXd& A,
                         Eigen::VectorXd& b) {
  const auto n = static_cast<Eigen::Index>(buf.size());
  A.resize(n, kFeatureDim);
  b.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = buf[static_cast<std::size_t>(i)];
    const FeatureVector phi = features(t.state, t.action);
    for (int j = 0; j < kFeatureDim; ++j) A(i, j) = phi[static_cast<std::size_t>(j)];
    b(i) = t.cost + q_value(w_prev, t.next_state, t.next_action);
  }
}

}  // namespace

CriticUpdate update_critic(const ReplayBuffer& buf, const CriticWeights& w_prev) {
  if (buf.empty()) throw EmptyBuffer("update_critic: empty replay buffer");

  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  assemble_regression(buf, w_prev, A, b);

  // Tikhonov term centered at the previous weights: directions the buffer
  // does not identify keep their old values instead of collapsing to zero.
  Eigen::Map<const Eigen::VectorXd> prev(w_prev.data(), kFeatureDim);
  Eigen::MatrixXd gram = A.transpose() * A;
  gram.diagonal().array() += kCriticRidge;
  const Eigen::VectorXd sol = gram.ldlt().solve(A.transpose() * b + kCriticRidge * prev);

  CriticUpdate out;
  for (int j = 0; j < kFeatureDim; ++j) out.weights[static_cast<std::size_t>(j)] = sol(j);
  out.rank_deficient = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(A).rank() < kFeatureDim;
  out.loss = critic_loss(out.weights, w_prev, buf);
  return out;
}

CriticUpdate update_critic_boxed(const ReplayBuffer& buf, const CriticWeights& w_prev,
                                 const CriticWeights& lower, const CriticWeights& upper) {
  if (buf.empty()) throw EmptyBuffer("update_critic_boxed: empty replay buffer");
  for (int i = 0; i < kFeatureDim; ++i) {
    if (lower[static_cast<std::size_t>(i)] > upper[static_cast<std::size_t>(i)]) {
      throw InvalidConfig("update_critic_boxed: lower > upper");
    }
  }

  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  assemble_regression(buf, w_prev, A, b);

  Eigen::Map<const Eigen::VectorXd> prev(w_prev.data(), kFeatureDim);
  Eigen::MatrixXd gram = A.transpose() * A;
  gram.diagonal().array() += kCriticRidge;
  const Eigen::VectorXd rhs = A.transpose() * b + kCriticRidge * prev;

  // Projected Gauss-Seidel: each coordinate step is the exact 1-d minimizer
  // clamped to the box, so the objective never increases from the start.
  Eigen::VectorXd w(kFeatureDim);
  for (int i = 0; i < kFeatureDim; ++i) {
    w(i) = std::clamp(prev(i), lower[static_cast<std::size_t>(i)],
                      upper[static_cast<std::size_t>(i)]);
  }
  for (int sweep = 0; sweep < 500; ++sweep) {
    double worst = 0.0;
    for (int i = 0; i < kFeatureDim; ++i) {
      const double old = w(i);
      const double num = rhs(i) - gram.row(i).dot(w) + gram(i, i) * old;
      const double next = std::clamp(num / gram(i, i), lower[static_cast<std::size_t>(i)],
                                     upper[static_cast<std::size_t>(i)]);
      w(i) = next;
      worst = std::max(worst, std::abs(next - old));
    }
    if (worst <= 1e-12) break;
  }

  CriticUpdate out;
  for (int j = 0; j < kFeatureDim; ++j) out.weights[static_cast<std::size_t>(j)] = w(j);
  out.rank_deficient = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(A).rank() < kFeatureDim;
  out.loss = critic_loss(out.weights, w_prev, buf);
  return out;
}

CriticBox critic_box(const CostMatrix& R, double cap, double cross_cap) {
  CriticBox box;
  const CriticWeights diag = running_cost_weights(R);
  int k = 0;
  for (int i = 0; i < kChiDim; ++i) {
    for (int j = i; j < kChiDim; ++j) {
      const auto idx = static_cast<std::size_t>(k++);
      if (i == j) {
        box.lower[idx] = diag[idx];
        box.upper[idx] = cap;
      } else {
        box.lower[idx] = -cross_cap;
        box.upper[idx] = cross_cap;
      }
    }
  }
  return box;
}

CriticWeights running_cost_weights(const CostMatrix& R) {
  // Diagonal entries of chi chi^T sit at row-major upper-triangle offsets
  // 0, 5, 9, 12, 14 for the 5-vector chi.
  CriticWeights w{};
  w[0] = R.diag[0];
  w[5] = R.diag[1];
  w[9] = R.diag[2];
  w[12] = R.diag[3];
  w[14] = R.diag[4];
  return w;
}

}  // namespace rlmpc
