#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ncemb {

enum class CompositionKind { add, full_add, matrix, lstm };

std::string to_string(CompositionKind kind);
CompositionKind composition_kind_from_string(const std::string& name);

/// f(v1, v2) = alpha*v1 + beta*v2
struct AddParams {
  double alpha = 0.0;
  double beta = 0.0;
};

/// f(v1, v2) = W1*v1 + W2*v2, both d x d.
struct FullAddParams {
  Eigen::MatrixXd w1;
  Eigen::MatrixXd w2;
};

// f(v1, v2) = tanh of a linear map of [v1; v2]. The matrix is stored
// 2d x d and applied as y = tanh(W^T [v1; v2]); the orientation is fixed
// here because a 2d x d shape alone does not pin it down.
struct MatrixParams {
  Eigen::MatrixXd w;
};

// Single-layer LSTM, hidden size d == input size d, zero initial state.
// Gates: input i, forget f, output o, candidate g:
//   i = sigmoid(Wi x + Ui h + bi)      f = sigmoid(Wf x + Uf h + bf)
//   o = sigmoid(Wo x + Uo h + bo)      g = tanh   (Wc x + Uc h + bc)
//   c' = f .* c + i .* g               h' = o .* tanh(c')
// No peepholes. The phrase vector is the final hidden state.
struct LstmParams {
  Eigen::MatrixXd wi, ui;
  Eigen::MatrixXd wf, uf;
  Eigen::MatrixXd wo, uo;
  Eigen::MatrixXd wc, uc;
  Eigen::VectorXd bi, bf, bo, bc;
};

struct CompositionModel {
  CompositionKind kind = CompositionKind::add;
  Eigen::Index dim = 0;
  std::variant<AddParams, FullAddParams, MatrixParams, LstmParams> params;

  AddParams& add() { return std::get<AddParams>(params); }
  const AddParams& add() const { return std::get<AddParams>(params); }
  FullAddParams& full_add() { return std::get<FullAddParams>(params); }
  const FullAddParams& full_add() const { return std::get<FullAddParams>(params); }
  MatrixParams& matrix() { return std::get<MatrixParams>(params); }
  const MatrixParams& matrix() const { return std::get<MatrixParams>(params); }
  LstmParams& lstm() { return std::get<LstmParams>(params); }
  const LstmParams& lstm() const { return std::get<LstmParams>(params); }
};

Eigen::VectorXd compose_add(const AddParams& p, const Eigen::VectorXd& v1,
                            const Eigen::VectorXd& v2);
Eigen::VectorXd compose_fulladd(const FullAddParams& p, const Eigen::VectorXd& v1,
                                const Eigen::VectorXd& v2);
Eigen::VectorXd compose_matrix(const MatrixParams& p, const Eigen::VectorXd& v1,
                               const Eigen::VectorXd& v2);
Eigen::VectorXd compose_lstm(const LstmParams& p,
                             std::span<const Eigen::VectorXd> sequence);

/// Dispatch on kind; the LSTM sees (v1, v2) as a length-2 sequence.
Eigen::VectorXd compose(const CompositionModel& model, const Eigen::VectorXd& v1,
                        const Eigen::VectorXd& v2);

// Deterministic initialization: Add starts at alpha = beta = 0.5,
// matrices are uniform in [-s, s] with s = sqrt(6 / (fan_in + fan_out)),
// the LSTM forget bias starts at 1 and all other biases at 0.
CompositionModel init_model(CompositionKind kind, Eigen::Index dim,
                            std::uint64_t seed);

/// Same shapes as `like`, every parameter zero. Doubles as a gradient holder.
CompositionModel zeros_like(const CompositionModel& like);

std::size_t parameter_count(const CompositionModel& model);

/// Contiguous views over every parameter tensor, in a fixed order shared
/// by models and their gradient holders.
struct ParamSpan {
  double* data;
  std::size_t size;
};
std::vector<ParamSpan> param_spans(CompositionModel& model);

// Versioned binary model file; round-trips bit-exactly.
void serialize_model(const CompositionModel& model, std::ostream& out);
CompositionModel deserialize_model(std::istream& in);
/// Throws Error when the stored kind differs from `expected`.
CompositionModel deserialize_model(std::istream& in, CompositionKind expected);

void save_model_file(const CompositionModel& model, const std::string& path);
CompositionModel load_model_file(const std::string& path);

} // namespace ncemb
