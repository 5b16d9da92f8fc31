#include "isir/discrete.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace isir {

DiscreteModel::DiscreteModel(VectorXd states_, VectorXd pi_, VectorXd q_,
                             double q_outside_)
    : states(std::move(states_)),
      pi(std::move(pi_)),
      q(std::move(q_)),
      q_outside(q_outside_) {
  const int n = static_cast<int>(pi.size());
  if (states.size() != n || q.size() != n)
    throw std::invalid_argument("discrete model: size mismatch");
  if (n < 1) throw std::invalid_argument("discrete model: empty state list");
  if (std::abs(pi.sum() - 1.0) > 1e-10)
    throw std::invalid_argument("discrete model: pi must sum to 1");
  if (std::abs(q.sum() + q_outside - 1.0) > 1e-10)
    throw std::invalid_argument("discrete model: q + q_outside must sum to 1");
  if (q_outside < 0)
    throw std::invalid_argument("discrete model: negative outside mass");
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    if (pi[i] <= 0)
      throw std::invalid_argument(
          "discrete model: states must carry positive target mass (put "
          "extra proposal mass in q_outside)");
    if (q[i] <= 0)
      throw std::invalid_argument(
          "discrete model: q must be positive wherever pi is");
    weights[i] = pi[i] / q[i];
    if (!std::isfinite(weights[i]))
      throw std::invalid_argument("discrete model: non-finite weight");
  }
  w_hat = weights.maxCoeff();
}

DiscreteModel discrete_model_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model config: " + path);
  nlohmann::json j;
  in >> j;
  auto vec = [](const nlohmann::json& a) {
    VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
    return v;
  };
  DiscreteModel m(vec(j.at("states")), vec(j.at("pi")), vec(j.at("q")),
                  j.value("q_outside", 0.0));
  if (j.contains("M")) m.level_upper = j["M"].get<double>();
  if (j.contains("m")) m.level_lower = j["m"].get<double>();
  return m;
}

void discrete_model_to_json(const DiscreteModel& m, const std::string& path,
                            const std::string& note) {
  nlohmann::json j;
  auto arr = [](const VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  j["states"] = arr(m.states);
  j["pi"] = arr(m.pi);
  j["q"] = arr(m.q);
  j["q_outside"] = m.q_outside;
  if (m.level_upper) j["M"] = *m.level_upper;
  if (m.level_lower) j["m"] = *m.level_lower;
  if (!note.empty()) j["note"] = note;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

DiscreteLogModel::DiscreteLogModel(const DiscreteModel& m) : model(&m) {
  cumq.resize(m.n() + (m.q_outside > 0 ? 1 : 0));
  double acc = 0.0;
  for (int i = 0; i < m.n(); ++i) cumq[i] = (acc += m.q[i]);
  if (m.q_outside > 0) cumq.back() = acc + m.q_outside;
}

double DiscreteLogModel::log_proposal(const State& i) const {
  if (i < model->n()) return std::log(model->q[i]);
  return model->q_outside > 0 ? std::log(model->q_outside) : kNegInf;
}

DiscreteLogModel::State DiscreteLogModel::sample_proposal(RandomStream& rs) const {
  const double u = rs.uniform() * cumq.back();
  for (std::size_t i = 0; i < cumq.size(); ++i)
    if (u < cumq[i]) return static_cast<int>(i);
  return static_cast<int>(cumq.size()) - 1;
}

LambdaGrid::LambdaGrid(double lo_, double hi_, double step_)
    : lo(lo_), hi(hi_), step(step_) {
  if (!(step > 0)) throw std::invalid_argument("grid: step must be > 0");
  if (!(lo >= 1.0 + step))
    throw std::invalid_argument("grid: lo must be at least 1 + step");
  if (!(hi >= lo)) throw std::invalid_argument("grid: hi must be >= lo");
}

double IntegerCurves::eps_lambda(double lambda) const {
  const int N = static_cast<int>(std::floor(lambda));
  if (N < 1 || N + 1 > n_hi)
    throw std::out_of_range("eps_lambda: lambda outside curve range");
  const double beta = N + 1 - lambda;
  return beta * eps[N - 1] + (1 - beta) * eps[N];
}

double IntegerCurves::eps_prime(double lambda) const {
  const int N = static_cast<int>(std::floor(lambda));
  if (N < 1 || N + 1 > n_hi)
    throw std::out_of_range("eps_prime: lambda outside curve range");
  return eps[N] - eps[N - 1];
}

double IntegerCurves::eps_s(double lambda) const {
  const int N = static_cast<int>(std::floor(lambda));
  if (N < 1 || N + 1 > static_cast<int>(eps_sq_a.size()))
    throw std::out_of_range("eps_s: lambda outside curve range");
  const double beta = N + 1 - lambda;
  return beta * beta * eps_sq_a[N - 1] +
         2.0 * beta * (1 - beta) * eps_sq_b[N - 1] +
         (1 - beta) * (1 - beta) * eps_sq_a[N];
}

MatrixXd IntegerCurves::transition(double lambda) const {
  const int N = static_cast<int>(std::floor(lambda));
  if (N < 1 || N + 1 > n_hi)
    throw std::out_of_range("transition: lambda outside curve range");
  const double beta = N + 1 - lambda;
  return beta * P[N - 1] + (1 - beta) * P[N];
}

double IntegerCurves::psi(double lambda, const DiscreteModel& m) const {
  if (m.n() < 2)
    throw std::runtime_error("psi: #(Sp) > 1 required");
  const MatrixXd Pl = transition(lambda);
  const double denom = 1.0 - m.pi.squaredNorm();
  double num = 0.0;
  for (int i = 0; i < m.n(); ++i) num += m.pi[i] * (Pl(i, i) - m.pi[i]);
  return num / denom;
}

MatrixXd reversibilize(const VectorXd& pi, const MatrixXd& P) {
  const VectorXd s = pi.array().sqrt();
  MatrixXd S = s.asDiagonal() * P * s.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();
  return s.cwiseInverse().asDiagonal() * S * s.asDiagonal();
}

}  // namespace isir
