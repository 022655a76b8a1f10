#include "ncemb/compose.hpp"

#include "ncemb/error.hpp"
#include "ncemb/rng.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace ncemb {

namespace {

void require_dim(const Eigen::VectorXd& v, Eigen::Index d, const char* what) {
  if (v.size() != d) {
    throw Error(std::string(what) + ": expected length " + std::to_string(d) + ", got " +
                std::to_string(v.size()));
  }
}

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = rng.uniform(-s, s);
    }
  }
  return m;
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return ((-z.array()).exp() + 1.0).inverse();
}

constexpr std::uint32_t kModelMagic = 0x4e434d31; // "NCM1"
constexpr std::uint32_t kModelVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw ParseError("model file truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw ParseError("model file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void write_doubles(std::ostream& out, const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], sizeof bits);
    write_u64(out, bits);
  }
}

void read_doubles(std::istream& in, double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = read_u64(in);
    std::memcpy(&data[i], &bits, sizeof bits);
  }
}

} // namespace

std::string to_string(CompositionKind kind) {
  switch (kind) {
    case CompositionKind::add: return "add";
    case CompositionKind::full_add: return "fulladd";
    case CompositionKind::matrix: return "matrix";
    case CompositionKind::lstm: return "lstm";
  }
  throw Error("unknown composition kind");
}

CompositionKind composition_kind_from_string(const std::string& name) {
  if (name == "add") return CompositionKind::add;
  if (name == "fulladd" || name == "full_add") return CompositionKind::full_add;
  if (name == "matrix") return CompositionKind::matrix;
  if (name == "lstm") return CompositionKind::lstm;
  throw ConfigError("unknown composition kind: " + name);
}

Eigen::VectorXd compose_add(const AddParams& p, const Eigen::VectorXd& v1,
                            const Eigen::VectorXd& v2) {
  if (v1.size() != v2.size()) throw Error("compose_add: dimension mismatch");
  return p.alpha * v1 + p.beta * v2;
}

Eigen::VectorXd compose_fulladd(const FullAddParams& p, const Eigen::VectorXd& v1,
                                const Eigen::VectorXd& v2) {
  const Eigen::Index d = p.w1.rows();
  if (p.w1.cols() != d || p.w2.rows() != d || p.w2.cols() != d) {
    throw Error("compose_fulladd: weight matrices must be square and equal-sized");
  }
  require_dim(v1, d, "compose_fulladd v1");
  require_dim(v2, d, "compose_fulladd v2");
  return p.w1 * v1 + p.w2 * v2;
}

Eigen::VectorXd compose_matrix(const MatrixParams& p, const Eigen::VectorXd& v1,
                               const Eigen::VectorXd& v2) {
  const Eigen::Index d = p.w.cols();
  if (p.w.rows() != 2 * d) throw Error("compose_matrix: weight must be 2d x d");
  require_dim(v1, d, "compose_matrix v1");
  require_dim(v2, d, "compose_matrix v2");
  Eigen::VectorXd concat(2 * d);
  concat << v1, v2;
  return (p.w.transpose() * concat).array().tanh();
}

Eigen::VectorXd compose_lstm(const LstmParams& p,
                             std::span<const Eigen::VectorXd> sequence) {
  if (sequence.empty()) throw Error("compose_lstm: empty sequence");
  const Eigen::Index d = p.wi.rows();

  Eigen::VectorXd h = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
  for (const auto& x : sequence) {
    require_dim(x, d, "compose_lstm input");
    const Eigen::VectorXd i = sigmoid(p.wi * x + p.ui * h + p.bi);
    const Eigen::VectorXd f = sigmoid(p.wf * x + p.uf * h + p.bf);
    const Eigen::VectorXd o = sigmoid(p.wo * x + p.uo * h + p.bo);
    const Eigen::VectorXd g = (p.wc * x + p.uc * h + p.bc).array().tanh();
    c = f.cwiseProduct(c) + i.cwiseProduct(g);
    h = o.cwiseProduct(c.array().tanh().matrix());
  }
  return h;
}

Eigen::VectorXd compose(const CompositionModel& model, const Eigen::VectorXd& v1,
                        const Eigen::VectorXd& v2) {
  switch (model.kind) {
    case CompositionKind::add: return compose_add(model.add(), v1, v2);
    case CompositionKind::full_add: return compose_fulladd(model.full_add(), v1, v2);
    case CompositionKind::matrix: return compose_matrix(model.matrix(), v1, v2);
    case CompositionKind::lstm: {
      const std::vector<Eigen::VectorXd> seq{v1, v2};
      return compose_lstm(model.lstm(), seq);
    }
  }
  throw Error("unknown composition kind");
}

CompositionModel init_model(CompositionKind kind, Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw Error("init_model: dimension must be >= 1");
  Rng rng(derive_seed(seed, "init/" + to_string(kind)));

  CompositionModel model;
  model.kind = kind;
  model.dim = dim;
  switch (kind) {
    case CompositionKind::add:
      model.params = AddParams{0.5, 0.5};
      break;
    case CompositionKind::full_add: {
      FullAddParams p;
      p.w1 = uniform_matrix(dim, dim, rng);
      p.w2 = uniform_matrix(dim, dim, rng);
      model.params = std::move(p);
      break;
    }
    case CompositionKind::matrix: {
      MatrixParams p;
      p.w = uniform_matrix(2 * dim, dim, rng);
      model.params = std::move(p);
      break;
    }
    case CompositionKind::lstm: {
      LstmParams p;
      p.wi = uniform_matrix(dim, dim, rng);
      p.ui = uniform_matrix(dim, dim, rng);
      p.wf = uniform_matrix(dim, dim, rng);
      p.uf = uniform_matrix(dim, dim, rng);
      p.wo = uniform_matrix(dim, dim, rng);
      p.uo = uniform_matrix(dim, dim, rng);
      p.wc = uniform_matrix(dim, dim, rng);
      p.uc = uniform_matrix(dim, dim, rng);
      p.bi = Eigen::VectorXd::Zero(dim);
      p.bf = Eigen::VectorXd::Ones(dim); // forget bias 1 for short-sequence flow
      p.bo = Eigen::VectorXd::Zero(dim);
      p.bc = Eigen::VectorXd::Zero(dim);
      model.params = std::move(p);
      break;
    }
  }
  return model;
}

CompositionModel zeros_like(const CompositionModel& like) {
  CompositionModel z = like;
  for (auto span : param_spans(z)) {
    std::fill(span.data, span.data + span.size, 0.0);
  }
  return z;
}

std::size_t parameter_count(const CompositionModel& model) {
  std::size_t n = 0;
  auto spans = param_spans(const_cast<CompositionModel&>(model));
  for (const auto& s : spans) n += s.size;
  return n;
}

std::vector<ParamSpan> param_spans(CompositionModel& model) {
  std::vector<ParamSpan> spans;
  switch (model.kind) {
    case CompositionKind::add: {
      auto& p = model.add();
      spans.push_back({&p.alpha, 1});
      spans.push_back({&p.beta, 1});
      break;
    }
    case CompositionKind::full_add: {
      auto& p = model.full_add();
      spans.push_back({p.w1.data(), static_cast<std::size_t>(p.w1.size())});
      spans.push_back({p.w2.data(), static_cast<std::size_t>(p.w2.size())});
      break;
    }
    case CompositionKind::matrix: {
      auto& p = model.matrix();
      spans.push_back({p.w.data(), static_cast<std::size_t>(p.w.size())});
      break;
    }
    case CompositionKind::lstm: {
      auto& p = model.lstm();
      for (Eigen::MatrixXd* m : {&p.wi, &p.ui, &p.wf, &p.uf, &p.wo, &p.uo, &p.wc, &p.uc}) {
        spans.push_back({m->data(), static_cast<std::size_t>(m->size())});
      }
      for (Eigen::VectorXd* v : {&p.bi, &p.bf, &p.bo, &p.bc}) {
        spans.push_back({v->data(), static_cast<std::size_t>(v->size())});
      }
      break;
    }
  }
  return spans;
}

void serialize_model(const CompositionModel& model, std::ostream& out) {
  write_u32(out, kModelMagic);
  write_u32(out, kModelVersion);
  write_u32(out, static_cast<std::uint32_t>(model.kind));
  write_u64(out, static_cast<std::uint64_t>(model.dim));
  auto spans = param_spans(const_cast<CompositionModel&>(model));
  write_u32(out, static_cast<std::uint32_t>(spans.size()));
  for (const auto& s : spans) {
    write_u64(out, s.size);
    write_doubles(out, s.data, s.size);
  }
  if (!out) throw Error("failed writing model stream");
}

CompositionModel deserialize_model(std::istream& in) {
  if (read_u32(in) != kModelMagic) throw ParseError("not a model file (bad magic)");
  const std::uint32_t version = read_u32(in);
  if (version != kModelVersion) {
    throw ParseError("unsupported model format version " + std::to_string(version));
  }
  const std::uint32_t kind_raw = read_u32(in);
  if (kind_raw > static_cast<std::uint32_t>(CompositionKind::lstm)) {
    throw ParseError("unknown composition kind tag " + std::to_string(kind_raw));
  }
  const auto kind = static_cast<CompositionKind>(kind_raw);
  const auto dim = static_cast<Eigen::Index>(read_u64(in));
  if (dim < 1) throw ParseError("model file has non-positive dimension");

  CompositionModel model = init_model(kind, dim, 0);
  auto spans = param_spans(model);
  const std::uint32_t span_count = read_u32(in);
  if (span_count != spans.size()) {
    throw ParseError("model parameter layout mismatch (shape/kind disagreement)");
  }
  for (auto& s : spans) {
    const std::uint64_t n = read_u64(in);
    if (n != s.size) {
      throw ParseError("model parameter shape mismatch for kind " + to_string(kind));
    }
    read_doubles(in, s.data, s.size);
  }
  return model;
}

CompositionModel deserialize_model(std::istream& in, CompositionKind expected) {
  CompositionModel model = deserialize_model(in);
  if (model.kind != expected) {
    throw Error("model kind mismatch: file holds " + to_string(model.kind) +
                ", expected " + to_string(expected));
  }
  return model;
}

void save_model_file(const CompositionModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  serialize_model(model, out);
}

CompositionModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingResourceError("cannot open model file: " + path);
  return deserialize_model(in);
}

} // namespace ncemb
