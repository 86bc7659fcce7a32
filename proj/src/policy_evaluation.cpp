#include "remest/policy_evaluation.hpp"

#include "remest/errors.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <sstream>

namespace remest {

namespace {

using Lu = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;

void factor_or_throw(Lu& lu, const Eigen::SparseMatrix<double>& a, const char* what) {
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    std::ostringstream os;
    os << "sparse LU failed in " << what << ": " << lu.lastErrorMessage();
    throw ConvergenceFailure(os.str());
  }
}

// Tarjan's algorithm, iterative. Returns the component id of every node.
std::vector<int> strong_components(const SparseMatrix& p, int& n_comp) {
  const int n = static_cast<int>(p.rows());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::pair<int, SparseMatrix::InnerIterator>> call;
  int counter = 0;
  n_comp = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.emplace_back(root, SparseMatrix::InnerIterator(p, root));
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, it] = call.back();
      bool descended = false;
      for (; it; ++it) {
        if (it.value() <= 0.0) continue;
        const int w = static_cast<int>(it.col());
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          ++it;
          call.emplace_back(w, SparseMatrix::InnerIterator(p, w));
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      const int done = v;
      if (low[done] == index[done]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = n_comp;
        } while (w != done);
        ++n_comp;
      }
      call.pop_back();
      if (!call.empty()) {
        const int parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  return comp;
}

}  // namespace

SparseMatrix induced_kernel(const SystemModel& model, const std::vector<double>& a) {
  const int N = model.n_states();
  const int n = model.alphabet();
  const int stride = model.x_stride();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(N) * 2 * n);
  for (int s = 0; s < N; ++s) {
    const int x = s / stride;
    const double w_idle = 1.0 - a[s] * model.p_s();
    const double w_sync = a[s] * model.p_s();
    for (int xp = 0; xp < n; ++xp) {
      const double q = model.chain()(x, xp);
      if (q == 0.0) continue;
      if (w_idle > 0.0) trips.emplace_back(s, model.idle_base(s) + xp * stride, w_idle * q);
      if (w_sync > 0.0) trips.emplace_back(s, model.sync_base(s) + xp * stride, w_sync * q);
    }
  }
  SparseMatrix p(N, N);
  p.setFromTriplets(trips.begin(), trips.end());
  return p;
}

std::vector<double> expected_error_cost(const SystemModel& model, const std::vector<double>& a) {
  std::vector<double> c(model.n_states());
  for (int s = 0; s < model.n_states(); ++s) c[s] = (1.0 - a[s] * model.p_s()) * model.idle_cost(s);
  return c;
}

std::vector<std::vector<int>> recurrent_classes(const SparseMatrix& p) {
  int n_comp = 0;
  auto comp = strong_components(p, n_comp);
  std::vector<char> closed(n_comp, 1);
  for (int s = 0; s < p.rows(); ++s) {
    for (SparseMatrix::InnerIterator it(p, s); it; ++it) {
      if (it.value() > 0.0 && comp[it.col()] != comp[s]) closed[comp[s]] = 0;
    }
  }
  std::vector<std::vector<int>> by_comp(n_comp);
  for (int s = 0; s < p.rows(); ++s) {
    if (closed[comp[s]]) by_comp[comp[s]].push_back(s);
  }
  std::vector<std::vector<int>> out;
  for (auto& c : by_comp) {
    if (!c.empty()) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> class_stationary(const SparseMatrix& p, const std::vector<int>& cls) {
  const int m = static_cast<int>(cls.size());
  if (m == 1) return {1.0};
  std::vector<int> local(p.rows(), -1);
  for (int i = 0; i < m; ++i) local[cls[i]] = i;
  // (I - P_kk)^T mu = 0 with the last equation replaced by sum(mu) = 1.
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < m; ++i) {
    if (i != m - 1) trips.emplace_back(i, i, 1.0);
    for (SparseMatrix::InnerIterator it(p, cls[i]); it; ++it) {
      const int j = local[it.col()];
      if (j >= 0 && j != m - 1) trips.emplace_back(j, i, -it.value());
    }
    trips.emplace_back(m - 1, i, 1.0);
  }
  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(trips.begin(), trips.end());
  Lu lu;
  factor_or_throw(lu, A, "stationary distribution of a recurrent class");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(m - 1) = 1.0;
  Eigen::VectorXd mu = lu.solve(rhs);
  return std::vector<double>(mu.data(), mu.data() + m);
}

GainBias policy_evaluate(const SystemModel& model, const DeterministicPolicy& policy,
                         double lambda, int s_ref) {
  const int N = model.n_states();
  if (static_cast<int>(policy.size()) != N) throw DomainError("policy size does not match the model");
  if (s_ref < 0) s_ref = model.s_ref();

  const auto a = transmit_probabilities(policy);
  const SparseMatrix p = induced_kernel(model, a);
  const auto cerr = expected_error_cost(model, a);

  // Columns: total cost, error cost, transmission indicator.
  Eigen::MatrixXd c(N, 3);
  for (int s = 0; s < N; ++s) {
    c(s, 1) = cerr[s];
    c(s, 2) = a[s];
    c(s, 0) = cerr[s] + lambda * a[s];
  }

  const auto classes = recurrent_classes(p);
  std::vector<int> class_of(N, -1);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    for (int s : classes[k]) class_of[s] = static_cast<int>(k);
  }

  // Gains per recurrent class from its stationary distribution.
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N, 3);
  std::vector<int> pins;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const auto& cls = classes[k];
    const int m = static_cast<int>(cls.size());
    const bool has_ref = class_of[s_ref] == static_cast<int>(k);
    pins.push_back(has_ref ? s_ref : cls.front());
    Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(3);
    const auto mu = class_stationary(p, cls);
    for (int i = 0; i < m; ++i) g += mu[i] * c.row(cls[i]);
    for (int s : cls) h.row(s) = g;
  }

  // Transient states: h_T = (I - P_TT)^{-1} P_TR h_R.
  std::vector<int> transient;
  std::vector<int> tlocal(N, -1);
  for (int s = 0; s < N; ++s) {
    if (class_of[s] < 0) {
      tlocal[s] = static_cast<int>(transient.size());
      transient.push_back(s);
    }
  }
  if (!transient.empty()) {
    const int m = static_cast<int>(transient.size());
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, 3);
    for (int i = 0; i < m; ++i) {
      const int s = transient[i];
      trips.emplace_back(i, i, 1.0);
      for (SparseMatrix::InnerIterator it(p, s); it; ++it) {
        const int j = tlocal[it.col()];
        if (j >= 0) {
          trips.emplace_back(i, j, -it.value());
        } else {
          rhs.row(i) += it.value() * h.row(it.col());
        }
      }
    }
    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(trips.begin(), trips.end());
    Lu lu;
    factor_or_throw(lu, A, "absorption into recurrent classes");
    Eigen::MatrixXd ht = lu.solve(rhs);
    for (int i = 0; i < m; ++i) h.row(transient[i]) = ht.row(i);
  }

  // Bias: (I - P) V = c - h, pinned to 0 at one state per recurrent class.
  std::vector<char> pinned(N, 0);
  for (int s : pins) pinned[s] = 1;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(p.nonZeros() + N);
  for (int s = 0; s < N; ++s) {
    trips.emplace_back(s, s, 1.0);
    if (pinned[s]) continue;
    for (SparseMatrix::InnerIterator it(p, s); it; ++it) trips.emplace_back(s, it.col(), -it.value());
  }
  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(trips.begin(), trips.end());
  Lu lu;
  factor_or_throw(lu, A, "bias equation");
  Eigen::VectorXd rhs = c.col(0) - h.col(0);
  for (int s : pins) rhs(s) = 0.0;
  Eigen::VectorXd v = lu.solve(rhs);

  GainBias out;
  out.lambda = lambda;
  out.gain = h(s_ref, 0);
  out.j_component = h(s_ref, 1);
  out.f_component = h(s_ref, 2);
  out.bias.assign(v.data(), v.data() + N);
  out.gain_by_state.assign(h.col(0).data(), h.col(0).data() + N);
  out.n_recurrent_classes = static_cast<int>(classes.size());
  return out;
}

}  // namespace remest
