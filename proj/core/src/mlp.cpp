#include "rwp/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rwp {

Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "identity") return Activation::Identity;
  throw Error("unknown activation '" + name + "'");
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Identity: return "identity";
  }
  return "?";
}

double apply_activation(Activation a, double x) {
  switch (a) {
    case Activation::Tanh: return std::tanh(x);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::Identity: return x;
  }
  return x;
}

int MlpParams::param_count() const {
  int n = 0;
  for (const auto& l : layers) n += static_cast<int>(l.W.size() + l.b.size());
  return n;
}

void MlpParams::validate() const {
  if (layers.empty()) throw Error("controller has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.W.rows() != l.b.size()) {
      throw DimensionError("layer " + std::to_string(i) + ": bias size " +
                           std::to_string(l.b.size()) + " does not match " +
                           std::to_string(l.W.rows()) + " rows");
    }
    if (i > 0 && layers[i - 1].W.rows() != l.W.cols()) {
      throw DimensionError("layer " + std::to_string(i) + ": input width " +
                           std::to_string(l.W.cols()) + " does not chain from previous output " +
                           std::to_string(layers[i - 1].W.rows()));
    }
    if (!l.W.allFinite() || !l.b.allFinite()) {
      throw Error("layer " + std::to_string(i) + " contains non-finite entries");
    }
  }
}

Eigen::VectorXd mlp_eval(const MlpParams& mlp, const Eigen::VectorXd& input) {
  if (input.size() != mlp.input_dim()) {
    throw DimensionError("controller input dimension mismatch: got " +
                         std::to_string(input.size()) + ", expected " +
                         std::to_string(mlp.input_dim()));
  }
  Eigen::VectorXd x = input;
  for (const Layer& l : mlp.layers) {
    x = (l.W * x + l.b).eval();
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = apply_activation(l.act, x[i]);
  }
  return x;
}

Eigen::VectorXd mlp_flatten(const MlpParams& mlp) {
  Eigen::VectorXd out(mlp.param_count());
  Eigen::Index k = 0;
  for (const Layer& l : mlp.layers) {
    for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) out[k++] = l.W(r, c);
    }
    for (Eigen::Index r = 0; r < l.b.size(); ++r) out[k++] = l.b[r];
  }
  return out;
}

MlpParams mlp_unflatten(const MlpParams& shape, const Eigen::VectorXd& params) {
  if (params.size() != shape.param_count()) {
    throw DimensionError("parameter vector size mismatch");
  }
  MlpParams out = shape;
  Eigen::Index k = 0;
  for (Layer& l : out.layers) {
    for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) l.W(r, c) = params[k++];
    }
    for (Eigen::Index r = 0; r < l.b.size(); ++r) l.b[r] = params[k++];
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string mlp_to_text(const MlpParams& mlp) {
  std::ostringstream os;
  os << "rwp-mlp v1\n";
  os << "layers " << mlp.layers.size() << "\n";
  for (const Layer& l : mlp.layers) {
    os << "layer " << l.W.cols() << " " << l.W.rows() << " " << activation_name(l.act) << "\n";
    for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
      os << "W";
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) os << " " << fmt(l.W(r, c));
      os << "\n";
    }
    os << "b";
    for (Eigen::Index r = 0; r < l.b.size(); ++r) os << " " << fmt(l.b[r]);
    os << "\n";
  }
  return os.str();
}

MlpParams mlp_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string word;
  is >> word;
  if (word != "rwp-mlp") throw Error("not a controller weight file");
  is >> word;
  if (word != "v1") throw Error("unsupported weight file version '" + word + "'");
  is >> word;
  if (word != "layers") throw Error("expected 'layers' count");
  std::size_t n = 0;
  is >> n;
  MlpParams mlp;
  for (std::size_t i = 0; i < n; ++i) {
    is >> word;
    if (word != "layer") throw Error("expected 'layer' header");
    Eigen::Index in = 0, out = 0;
    std::string act;
    is >> in >> out >> act;
    Layer l;
    l.act = activation_from_name(act);
    l.W.resize(out, in);
    l.b.resize(out);
    for (Eigen::Index r = 0; r < out; ++r) {
      is >> word;
      if (word != "W") throw Error("expected weight row");
      for (Eigen::Index c = 0; c < in; ++c) is >> l.W(r, c);
    }
    is >> word;
    if (word != "b") throw Error("expected bias row");
    for (Eigen::Index r = 0; r < out; ++r) is >> l.b[r];
    mlp.layers.push_back(std::move(l));
  }
  if (!is) throw Error("truncated or malformed weight file");
  mlp.validate();
  return mlp;
}

void save_mlp(const std::string& path, const MlpParams& mlp) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << mlp_to_text(mlp);
}

MlpParams load_mlp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open weight file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return mlp_from_text(ss.str());
}

}  // namespace rwp
