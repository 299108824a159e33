#include "streamrec/stream_solver.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "streamrec/errors.hpp"

namespace streamrec {

namespace {

using nlohmann::json;

constexpr int kCheckpointVersion = 1;

Cholesky factor_or_throw(const Matrix& m, const char* what, long k) {
  try {
    return Cholesky(m);
  } catch (const NotPositiveDefinite& e) {
    throw SingularBlock(std::string(what) + " for packet " + std::to_string(k) +
                        " is not positive definite (raise lambda): " + e.what());
  }
}

void symmetrize(Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double s = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = s;
      m(j, i) = s;
    }
}

void check_batch(const SampleBatch& batch, std::size_t n) {
  if (batch.a.rows() != batch.size() || batch.b.rows() != batch.size() || batch.values.size() != batch.size())
    throw std::invalid_argument("stream solver: batch " + std::to_string(batch.k) + " is not assembled");
  if (batch.size() > 0 && (batch.a.cols() != n || batch.b.cols() != n))
    throw std::invalid_argument("stream solver: batch " + std::to_string(batch.k) + " has the wrong column count");
}

// Empty batches come with 0 x 0 matrices from some callers; normalise to 0 x N.
Matrix gram_of(const Matrix& a, std::size_t n) {
  if (a.rows() == 0) return Matrix(n, n);
  return transpose_times(a, a);
}

Vector project_of(const Matrix& a, const Vector& y, std::size_t n) {
  if (a.rows() == 0) return Vector(n, 0.0);
  return transpose_times(a, y);
}

Matrix cross_of(const Matrix& a, const Matrix& b, std::size_t n) {
  if (a.rows() == 0) return Matrix(n, n);
  return transpose_times(a, b);
}

json to_json_matrix(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix from_json_matrix(const json& j) {
  return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                j.at("data").get<std::vector<double>>());
}

json to_json_options(const SolverOptions& o) {
  json j;
  j["max_lag"] = o.max_lag ? json(*o.max_lag) : json(nullptr);
  j["freeze_lag"] = o.freeze_lag ? json(*o.freeze_lag) : json(nullptr);
  j["tail_reg_transient"] = o.tail_reg_transient;
  j["record_history"] = o.record_history;
  j["record_trace"] = o.record_trace;
  return j;
}

SolverOptions from_json_options(const json& j) {
  SolverOptions o;
  if (!j.at("max_lag").is_null()) o.max_lag = j.at("max_lag").get<std::size_t>();
  if (!j.at("freeze_lag").is_null()) o.freeze_lag = j.at("freeze_lag").get<std::size_t>();
  o.tail_reg_transient = j.at("tail_reg_transient").get<bool>();
  o.record_history = j.at("record_history").get<bool>();
  o.record_trace = j.at("record_trace").get<bool>();
  return o;
}

}  // namespace

double default_tail_lambda(const Matrix& a, double rel) {
  if (a.rows() == 0 || a.cols() == 0) return rel;
  double trace = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (double v : a.row(i)) trace += v * v;
  if (trace == 0.0) return rel;
  return rel * trace / static_cast<double>(a.cols());
}

// ---------------------------------------------------------------------------

void EstimateHistory::record(long k, long K, Vector alpha) { snapshots_[{k, K}] = std::move(alpha); }

void EstimateHistory::record_converged(long k, Vector alpha) { converged_[k] = std::move(alpha); }

bool EstimateHistory::contains(long k, long K) const { return snapshots_.count({k, K}) > 0; }

const Vector& EstimateHistory::at(long k, long K) const {
  auto it = snapshots_.find({k, K});
  if (it == snapshots_.end())
    throw std::out_of_range("EstimateHistory: no snapshot for k=" + std::to_string(k) + ", K=" + std::to_string(K));
  return it->second;
}

const Vector* EstimateHistory::latest(long k, long K) const {
  auto it = snapshots_.upper_bound({k, K});
  if (it == snapshots_.begin()) return nullptr;
  --it;
  if (it->first.first != k) return nullptr;
  return &it->second;
}

// ---------------------------------------------------------------------------

StreamSolver::StreamSolver(std::size_t n, SolverOptions options) : n_(n), options_(options) {
  if (n == 0) throw std::invalid_argument("StreamSolver: N must be positive");
}

void StreamSolver::push(const SampleBatch& batch, double lambda) {
  if (!initialized_)
    init(batch, lambda);
  else
    step(batch, lambda);
}

void StreamSolver::init(const SampleBatch& batch, double lambda) {
  if (initialized_) throw std::logic_error("StreamSolver::init called twice");
  check_batch(batch, n_);
  if (lambda < 0.0) throw std::invalid_argument("StreamSolver: negative lambda");

  first_ = last_ = batch.k;
  gram_tail_ = gram_of(batch.a, n_);
  q_tail_ = gram_tail_;
  add_diagonal(q_tail_, lambda);
  w_tail_ = project_of(batch.a, batch.values, n_);
  lambdas_.assign(1, lambda);

  Vector alpha;
  try {
    alpha = Cholesky(q_tail_).solve(w_tail_);
  } catch (const NotPositiveDefinite& e) {
    throw SingularTail(std::string("StreamSolver::init: Q'_0 is not positive definite (raise lambda_0): ") +
                       e.what());
  }
  current_[last_] = alpha;
  if (options_.record_history) history_.record(last_, last_, std::move(alpha));
  if (options_.record_trace) {
    trace_.first = first_;
    trace_.q_tail.push_back(q_tail_);
    trace_.y.push_back(batch.values);
  }
  initialized_ = true;
  update_high_water();
}

void StreamSolver::step(const SampleBatch& batch, double lambda) {
  if (!initialized_) throw std::logic_error("StreamSolver::step before init");
  if (batch.k != last_ + 1)
    throw NonContiguousBatch("StreamSolver::step: expected batch " + std::to_string(last_ + 1) + ", got " +
                             std::to_string(batch.k));
  check_batch(batch, n_);
  if (lambda < 0.0) throw std::invalid_argument("StreamSolver: negative lambda");

  const long K = last_;
  const Matrix btb = gram_of(batch.b, n_);

  // Promote the tail: Q_K = Q'_K + B^T B, w_K = w'_K + B^T y.
  Matrix q = q_tail_ + btb;
  if (options_.tail_reg_transient) add_diagonal(q, -lambdas_.back());
  symmetrize(q);
  Vector w = w_tail_;
  {
    const Vector bty = project_of(batch.b, batch.values, n_);
    for (std::size_t i = 0; i < n_; ++i) w[i] += bty[i];
  }
  const Cholesky qf = factor_or_throw(q, "Q_k", K);

  if (has_prev_) {
    const Vector ev = e_prev_ * v_prev_;
    for (std::size_t i = 0; i < n_; ++i) w[i] -= ev[i];
  }
  Vector v = qf.solve(w);

  const Matrix e = cross_of(batch.a, batch.b, n_);  // E_K = A_{K+1}^T B_{K+1}
  Matrix u = qf.solve(e.transpose());                // U_K = Q_K^{-1} E_K^T

  const Matrix ata = gram_of(batch.a, n_);
  Matrix q_next = ata;
  add_diagonal(q_next, lambda);
  q_next -= e * u;
  symmetrize(q_next);
  Vector w_next = project_of(batch.a, batch.values, n_);

  Vector rhs = w_next;
  {
    const Vector ev = e * v;
    for (std::size_t i = 0; i < n_; ++i) rhs[i] -= ev[i];
  }
  const Cholesky qnf = factor_or_throw(q_next, "Q'_k", K + 1);
  Vector alpha_tail = qnf.solve(rhs);

  if (options_.record_trace) {
    Matrix d = gram_tail_ + btb;
    if (!options_.tail_reg_transient) add_diagonal(d, lambdas_.back());
    trace_.d.push_back(std::move(d));
    trace_.e.push_back(e);
    trace_.q.push_back(q);
    trace_.q_tail.push_back(q_next);
    trace_.y.push_back(batch.values);
  }

  // Commit.
  packets_.push_back(Packet{K, std::move(u), v});
  e_prev_ = e;
  v_prev_ = std::move(v);
  has_prev_ = true;
  q_tail_ = std::move(q_next);
  w_tail_ = std::move(w_next);
  gram_tail_ = ata;
  lambdas_.push_back(lambda);
  last_ = K + 1;
  current_[last_] = alpha_tail;
  if (options_.record_history) history_.record(last_, last_, std::move(alpha_tail));

  sweep();
  update_high_water();
  apply_retention();
}

void StreamSolver::sweep() {
  const long K = last_;
  long lowest = packets_.empty() ? K : packets_.front().k;
  if (options_.max_lag) lowest = std::max(lowest, K - static_cast<long>(*options_.max_lag));
  for (auto it = packets_.rbegin(); it != packets_.rend() && it->k >= lowest; ++it) {
    const Vector& next = current_.at(it->k + 1);
    Vector alpha = subtract(it->v, it->u * next);
    if (options_.record_history) history_.record(it->k, K, alpha);
    current_[it->k] = std::move(alpha);
  }
}

void StreamSolver::apply_retention() {
  const long K = last_;
  if (options_.freeze_lag) freeze(*options_.freeze_lag);
  if (options_.max_lag) {
    // The next sweep reaches back to K + 1 - L_max.
    const long keep_from = K + 1 - static_cast<long>(*options_.max_lag);
    while (!packets_.empty() && packets_.front().k < keep_from) {
      const long k = packets_.front().k;
      history_.record_converged(k, current_.at(k));
      current_.erase(k);
      packets_.pop_front();
    }
  }
}

std::vector<long> StreamSolver::freeze(std::size_t lag) {
  std::vector<long> emitted;
  const long K = last_;
  while (!packets_.empty() && K - packets_.front().k >= static_cast<long>(lag)) {
    const long k = packets_.front().k;
    history_.record_converged(k, current_.at(k));
    current_.erase(k);
    packets_.pop_front();
    emitted.push_back(k);
  }
  return emitted;
}

void StreamSolver::update_high_water() { high_water_ = std::max(high_water_, retained_blocks()); }

std::size_t StreamSolver::retained_blocks() const {
  // U_k and v_k per packet, plus Q'_K, w'_K, E_{K-1}, v_{K-1} and the estimates.
  return 2 * packets_.size() + 4 + current_.size();
}

const Vector& StreamSolver::estimate(long k) const {
  auto it = current_.find(k);
  if (it == current_.end()) throw std::out_of_range("StreamSolver::estimate: packet " + std::to_string(k) + " not retained");
  return it->second;
}

std::vector<long> StreamSolver::retained_packets() const {
  std::vector<long> out;
  for (const auto& [k, v] : current_) out.push_back(k);
  return out;
}

std::vector<Vector> StreamSolver::full_backward_sweep() const {
  if (!initialized_) throw std::logic_error("StreamSolver::full_backward_sweep before init");
  const std::size_t needed = static_cast<std::size_t>(last_ - first_);
  if (packets_.size() != needed || (!packets_.empty() && packets_.front().k != first_))
    throw HistoryTruncated("StreamSolver::full_backward_sweep: factors before packet " +
                           std::to_string(packets_.empty() ? last_ : packets_.front().k) + " were released");
  std::vector<Vector> out(needed + 1);
  out[needed] = current_.at(last_);
  for (std::size_t i = needed; i-- > 0;) {
    const Packet& p = packets_[i];
    out[i] = subtract(p.v, p.u * out[i + 1]);
  }
  return out;
}

std::vector<double> StreamSolver::effective_lambdas() const {
  std::vector<double> out = lambdas_;
  if (options_.tail_reg_transient)
    for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = 0.0;
  return out;
}

// ---------------------------------------------------------------------------

std::string StreamSolver::checkpoint() const {
  json j;
  j["format"] = "streamrec-checkpoint";
  j["version"] = kCheckpointVersion;
  j["n"] = n_;
  j["options"] = to_json_options(options_);
  j["initialized"] = initialized_;
  j["first"] = first_;
  j["last"] = last_;
  j["q_tail"] = to_json_matrix(q_tail_);
  j["w_tail"] = w_tail_;
  j["e_prev"] = to_json_matrix(e_prev_);
  j["v_prev"] = v_prev_;
  j["has_prev"] = has_prev_;
  j["gram_tail"] = to_json_matrix(gram_tail_);
  j["lambdas"] = lambdas_;
  j["high_water"] = high_water_;
  json packets = json::array();
  for (const auto& p : packets_) packets.push_back({{"k", p.k}, {"u", to_json_matrix(p.u)}, {"v", p.v}});
  j["packets"] = packets;
  json current = json::array();
  for (const auto& [k, v] : current_) current.push_back({{"k", k}, {"alpha", v}});
  j["current"] = current;
  json snaps = json::array();
  for (const auto& [key, v] : history_.snapshots())
    snaps.push_back({{"k", key.first}, {"K", key.second}, {"alpha", v}});
  json conv = json::array();
  for (const auto& [k, v] : history_.converged()) conv.push_back({{"k", k}, {"alpha", v}});
  j["history"] = {{"snapshots", snaps}, {"converged", conv}};
  auto matrices = [](const std::vector<Matrix>& ms) {
    json a = json::array();
    for (const auto& m : ms) a.push_back(to_json_matrix(m));
    return a;
  };
  j["trace"] = {{"first", trace_.first}, {"d", matrices(trace_.d)},         {"e", matrices(trace_.e)},
                {"q", matrices(trace_.q)}, {"q_tail", matrices(trace_.q_tail)}, {"y", trace_.y}};
  return j.dump();
}

StreamSolver StreamSolver::restore(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("checkpoint is not valid JSON");
  if (j.value("format", "") != "streamrec-checkpoint") throw std::invalid_argument("not a streamrec checkpoint");
  if (j.at("version").get<int>() != kCheckpointVersion)
    throw std::invalid_argument("unsupported checkpoint version " + std::to_string(j.at("version").get<int>()));
  StreamSolver s(j.at("n").get<std::size_t>(), from_json_options(j.at("options")));
  s.initialized_ = j.at("initialized").get<bool>();
  s.first_ = j.at("first").get<long>();
  s.last_ = j.at("last").get<long>();
  s.q_tail_ = from_json_matrix(j.at("q_tail"));
  s.w_tail_ = j.at("w_tail").get<Vector>();
  s.e_prev_ = from_json_matrix(j.at("e_prev"));
  s.v_prev_ = j.at("v_prev").get<Vector>();
  s.has_prev_ = j.at("has_prev").get<bool>();
  s.gram_tail_ = from_json_matrix(j.at("gram_tail"));
  s.lambdas_ = j.at("lambdas").get<std::vector<double>>();
  s.high_water_ = j.at("high_water").get<std::size_t>();
  for (const auto& p : j.at("packets"))
    s.packets_.push_back(Packet{p.at("k").get<long>(), from_json_matrix(p.at("u")), p.at("v").get<Vector>()});
  for (const auto& c : j.at("current")) s.current_[c.at("k").get<long>()] = c.at("alpha").get<Vector>();
  for (const auto& e : j.at("history").at("snapshots"))
    s.history_.record(e.at("k").get<long>(), e.at("K").get<long>(), e.at("alpha").get<Vector>());
  for (const auto& e : j.at("history").at("converged"))
    s.history_.record_converged(e.at("k").get<long>(), e.at("alpha").get<Vector>());
  const json& t = j.at("trace");
  s.trace_.first = t.at("first").get<long>();
  auto matrices = [](const json& a) {
    std::vector<Matrix> out;
    for (const auto& m : a) out.push_back(from_json_matrix(m));
    return out;
  };
  s.trace_.d = matrices(t.at("d"));
  s.trace_.e = matrices(t.at("e"));
  s.trace_.q = matrices(t.at("q"));
  s.trace_.q_tail = matrices(t.at("q_tail"));
  s.trace_.y = t.at("y").get<std::vector<Vector>>();
  return s;
}

void StreamSolver::save_checkpoint(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  out << checkpoint() << "\n";
}

StreamSolver StreamSolver::load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return restore(buffer.str());
}

bool StreamSolver::operator==(const StreamSolver& o) const {
  auto same_packets = [&] {
    if (packets_.size() != o.packets_.size()) return false;
    for (std::size_t i = 0; i < packets_.size(); ++i)
      if (packets_[i].k != o.packets_[i].k || packets_[i].u != o.packets_[i].u || packets_[i].v != o.packets_[i].v)
        return false;
    return true;
  };
  return n_ == o.n_ && options_ == o.options_ && initialized_ == o.initialized_ && first_ == o.first_ &&
         last_ == o.last_ && q_tail_ == o.q_tail_ && w_tail_ == o.w_tail_ && e_prev_ == o.e_prev_ &&
         v_prev_ == o.v_prev_ && has_prev_ == o.has_prev_ && gram_tail_ == o.gram_tail_ && same_packets() &&
         current_ == o.current_ && lambdas_ == o.lambdas_ && history_.snapshots() == o.history_.snapshots() &&
         history_.converged() == o.history_.converged();
}

}  // namespace streamrec
