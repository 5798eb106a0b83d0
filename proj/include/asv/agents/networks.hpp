#pragma once

#include <algorithm>
#include <vector>

#include "asv/agents/nn.hpp"
#include "asv/env/lpp.hpp"
#include "asv/env/pf.hpp"

namespace asv::nn {

// ---------------------------------------------------------------------------------------------
// Path following: memory LSTM over o_{t-h..t-1}, current-feature branch over o_t.

struct PfBatch {
  std::vector<Mat> past;  ///< h matrices B×16, oldest first
  Mat current;            ///< B×16
  Eigen::Index size() const { return current.rows(); }
};

inline PfBatch make_pf_batch(const std::vector<const PfHistory*>& hs) {
  if (hs.empty()) throw StructuralError("empty batch");
  const std::size_t len = hs.front()->size();
  if (len < 2) throw StructuralError("path-following history needs at least two observations");
  const auto B = static_cast<Eigen::Index>(hs.size());
  PfBatch out;
  out.past.assign(len - 1, Mat(B, kPfObsDim));
  out.current.resize(B, kPfObsDim);
  for (Eigen::Index r = 0; r < B; ++r) {
    const PfHistory& h = *hs[static_cast<std::size_t>(r)];
    if (h.size() != len) throw StructuralError("history length mismatch within batch");
    for (std::size_t l = 0; l + 1 < len; ++l)
      for (int k = 0; k < kPfObsDim; ++k) out.past[l](r, k) = h[l][static_cast<std::size_t>(k)];
    for (int k = 0; k < kPfObsDim; ++k) out.current(r, k) = h.back()[static_cast<std::size_t>(k)];
  }
  return out;
}

inline PfBatch make_pf_batch(const PfHistory& h) { return make_pf_batch(std::vector<const PfHistory*>{&h}); }

struct PfNetConfig {
  int width = 128;
  int lstm = 128;
};

class PfActor {
 public:
  PfActor() = default;
  PfActor(Rng& rng, PfNetConfig c = {})
      : mem_("mem", kPfObsDim, c.lstm, rng), cur_("cur", kPfObsDim, c.width, rng),
        merge_("merge", c.lstm + c.width, c.width, rng), out_("out", c.width, 1, rng) {}

  Mat forward(const PfBatch& b) {
    const Mat m = mem_.forward(b.past);
    const Mat c = cur_relu_.forward(cur_.forward(b.current));
    const Mat z = merge_relu_.forward(merge_.forward(hcat(m, c)));
    return tanh_.forward(out_.forward(z));
  }

  void backward(const Mat& da) {
    const Mat dz = out_.backward(tanh_.backward(da));
    const Mat dmc = merge_.backward(merge_relu_.backward(dz));
    const Eigen::Index H = mem_.hidden();
    mem_.backward(dmc.leftCols(H), false);
    cur_.accumulate(cur_relu_.backward(dmc.rightCols(dmc.cols() - H)));
  }

  double act(const PfHistory& h) { return forward(make_pf_batch(h))(0, 0); }

  ParamList params() {
    ParamList p;
    for (auto* t : mem_.params()) p.push_back(t);
    for (auto* t : cur_.params()) p.push_back(t);
    for (auto* t : merge_.params()) p.push_back(t);
    for (auto* t : out_.params()) p.push_back(t);
    return p;
  }

 private:
  Lstm mem_;
  Dense cur_, merge_, out_;
  Relu cur_relu_, merge_relu_;
  Tanh tanh_;
};

class PfCritic {
 public:
  PfCritic() = default;
  PfCritic(Rng& rng, PfNetConfig c = {})
      : mem_("mem", kPfObsDim, c.lstm, rng), cur_("cur", kPfObsDim + 1, c.width, rng),
        merge_("merge", c.lstm + c.width, c.width, rng), out_("out", c.width, 1, rng) {}

  Mat forward(const PfBatch& b, const Mat& a) {
    const Mat m = mem_.forward(b.past);
    const Mat c = cur_relu_.forward(cur_.forward(hcat(b.current, a)));
    const Mat z = merge_relu_.forward(merge_.forward(hcat(m, c)));
    return out_.forward(z);
  }

  /// Returns dQ/da; with `params` false no parameter gradient is touched.
  Mat backward(const Mat& dq, bool params = true) {
    const Eigen::Index H = mem_.hidden();
    if (!params) {
      const Mat dmc = merge_.backward_input(merge_relu_.backward(out_.backward_input(dq)));
      return cur_.backward_input(cur_relu_.backward(dmc.rightCols(dmc.cols() - H))).rightCols(1);
    }
    const Mat dz = out_.backward(dq);
    const Mat dmc = merge_.backward(merge_relu_.backward(dz));
    mem_.backward(dmc.leftCols(H), false);
    const Mat dx = cur_.backward(cur_relu_.backward(dmc.rightCols(dmc.cols() - H)));
    return dx.rightCols(1);
  }

  ParamList params() {
    ParamList p;
    for (auto* t : mem_.params()) p.push_back(t);
    for (auto* t : cur_.params()) p.push_back(t);
    for (auto* t : merge_.params()) p.push_back(t);
    for (auto* t : out_.params()) p.push_back(t);
    return p;
  }

 private:
  Lstm mem_;
  Dense cur_, merge_, out_;
  Relu cur_relu_, merge_relu_;
};

// ---------------------------------------------------------------------------------------------
// Local path planning: per-lag spatial encoders feeding a temporal LSTM.

inline constexpr int kLppStaticDim = kLppOwnDim + kLppWaterwayDim;

struct LppLagBatch {
  Mat fixed;                  ///< B×14 own + waterway features
  std::vector<Mat> targets;   ///< T steps of B×7 in stored (farthest first) order, right-aligned
  std::vector<Vec> masks;     ///< empty when every row has T targets
};

struct LppBatch {
  std::vector<LppLagBatch> lags;  ///< oldest first
  Eigen::Index size() const { return lags.empty() ? 0 : lags.front().fixed.rows(); }
};

inline LppBatch make_lpp_batch(const std::vector<const LppHistory*>& hs) {
  if (hs.empty()) throw StructuralError("empty batch");
  const std::size_t len = hs.front()->size();
  if (len == 0) throw StructuralError("empty observation history");
  const auto B = static_cast<Eigen::Index>(hs.size());
  LppBatch out;
  out.lags.resize(len);
  for (std::size_t l = 0; l < len; ++l) {
    LppLagBatch& lb = out.lags[l];
    lb.fixed.resize(B, kLppStaticDim);
    std::size_t T = 0;
    for (const LppHistory* h : hs) {
      if (h->size() != len) throw StructuralError("history length mismatch within batch");
      if ((*h)[l].targets.empty()) throw StructuralError("observation without target rows");
      T = std::max(T, (*h)[l].targets.size());
    }
    lb.targets.assign(T, Mat::Zero(B, kLppTargetDim));
    bool ragged = false;
    for (Eigen::Index r = 0; r < B; ++r) {
      const LppObservation& o = (*hs[static_cast<std::size_t>(r)])[l];
      for (int k = 0; k < kLppOwnDim; ++k) lb.fixed(r, k) = o.own[static_cast<std::size_t>(k)];
      for (int k = 0; k < kLppWaterwayDim; ++k) lb.fixed(r, kLppOwnDim + k) = o.waterway[static_cast<std::size_t>(k)];
      const std::size_t n = o.targets.size();
      if (n != T) ragged = true;
      for (std::size_t j = 0; j < n; ++j) {
        const LppTargetFeatures& f = o.targets[j];
        for (int k = 0; k < kLppTargetDim; ++k) lb.targets[T - n + j](r, k) = f[static_cast<std::size_t>(k)];
      }
    }
    if (ragged) {
      lb.masks.assign(T, Vec::Ones(B));
      for (Eigen::Index r = 0; r < B; ++r) {
        const std::size_t n = (*hs[static_cast<std::size_t>(r)])[l].targets.size();
        for (std::size_t t = 0; t < T - n; ++t) lb.masks[t][r] = 0.0;
      }
    }
  }
  return out;
}

inline LppBatch make_lpp_batch(const LppHistory& h) { return make_lpp_batch(std::vector<const LppHistory*>{&h}); }

struct LppNetConfig {
  int width = 64;
  int lstm = 64;
  int lags = 3;
};

class LppEncoder {
 public:
  LppEncoder() = default;
  LppEncoder(const std::string& name, Rng& rng, const LppNetConfig& c)
      : fixed_(name + ".fixed", kLppStaticDim, c.width, rng), spatial_(name + ".spatial", kLppTargetDim, c.lstm, rng),
        merge_(name + ".merge", c.width + c.lstm, c.width, rng) {}

  Mat forward(const LppLagBatch& b) {
    const Mat e = fixed_relu_.forward(fixed_.forward(b.fixed));
    const Mat s = spatial_.forward(b.targets, b.masks);
    return merge_relu_.forward(merge_.forward(hcat(e, s)));
  }

  void backward(const Mat& dz) {
    const Mat des = merge_.backward(merge_relu_.backward(dz));
    const Eigen::Index W = fixed_.out();
    fixed_.accumulate(fixed_relu_.backward(des.leftCols(W)));
    spatial_.backward(des.rightCols(des.cols() - W), false);
  }

  ParamList params() {
    ParamList p;
    for (auto* t : fixed_.params()) p.push_back(t);
    for (auto* t : spatial_.params()) p.push_back(t);
    for (auto* t : merge_.params()) p.push_back(t);
    return p;
  }

 private:
  Dense fixed_;
  Lstm spatial_;
  Dense merge_;
  Relu fixed_relu_, merge_relu_;
};

class LppTrunk {
 public:
  LppTrunk() = default;
  LppTrunk(Rng& rng, const LppNetConfig& c) : temporal_("temporal", c.width, c.lstm, rng) {
    for (int l = 0; l < c.lags; ++l) enc_.emplace_back("lag" + std::to_string(l), rng, c);
  }

  int hidden() const { return temporal_.hidden(); }

  Mat forward(const LppBatch& b) {
    if (b.lags.size() != enc_.size()) throw StructuralError("history length does not match the network lag count");
    std::vector<Mat> zs(enc_.size());
    for (std::size_t l = 0; l < enc_.size(); ++l) zs[l] = enc_[l].forward(b.lags[l]);
    return temporal_.forward(zs);
  }

  void backward(const Mat& dh) {
    const std::vector<Mat> dz = temporal_.backward(dh);
    for (std::size_t l = 0; l < enc_.size(); ++l) enc_[l].backward(dz[l]);
  }

  ParamList params() {
    ParamList p;
    for (auto& e : enc_)
      for (auto* t : e.params()) p.push_back(t);
    for (auto* t : temporal_.params()) p.push_back(t);
    return p;
  }

 private:
  std::vector<LppEncoder> enc_;
  Lstm temporal_;
};

class LppActor {
 public:
  LppActor() = default;
  LppActor(Rng& rng, LppNetConfig c = {})
      : trunk_(rng, c), fc_("head", c.lstm, c.width, rng), out_("out", c.width, 1, rng) {}

  Mat forward(const LppBatch& b) {
    const Mat h = trunk_.forward(b);
    return tanh_.forward(out_.forward(relu_.forward(fc_.forward(h))));
  }

  void backward(const Mat& da) {
    const Mat dh = fc_.backward(relu_.backward(out_.backward(tanh_.backward(da))));
    trunk_.backward(dh);
  }

  double act(const LppHistory& h) { return forward(make_lpp_batch(h))(0, 0); }

  ParamList params() {
    ParamList p = trunk_.params();
    for (auto* t : fc_.params()) p.push_back(t);
    for (auto* t : out_.params()) p.push_back(t);
    return p;
  }

 private:
  LppTrunk trunk_;
  Dense fc_, out_;
  Relu relu_;
  Tanh tanh_;
};

class LppCritic {
 public:
  LppCritic() = default;
  LppCritic(Rng& rng, LppNetConfig c = {})
      : trunk_(rng, c), fc_("head", c.lstm + 1, c.width, rng), out_("out", c.width, 1, rng) {}

  Mat forward(const LppBatch& b, const Mat& a) {
    const Mat h = trunk_.forward(b);
    return out_.forward(relu_.forward(fc_.forward(hcat(h, a))));
  }

  /// Returns dQ/da; with `params` false no parameter gradient is touched.
  Mat backward(const Mat& dq, bool params = true) {
    if (!params) return fc_.backward_input(relu_.backward(out_.backward_input(dq))).rightCols(1);
    const Mat dx = fc_.backward(relu_.backward(out_.backward(dq)));
    trunk_.backward(dx.leftCols(trunk_.hidden()));
    return dx.rightCols(1);
  }

  ParamList params() {
    ParamList p = trunk_.params();
    for (auto* t : fc_.params()) p.push_back(t);
    for (auto* t : out_.params()) p.push_back(t);
    return p;
  }

 private:
  LppTrunk trunk_;
  Dense fc_, out_;
  Relu relu_;
};

}  // namespace asv::nn
