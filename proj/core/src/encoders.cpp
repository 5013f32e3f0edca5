#include "haucl/encoders.hpp"

namespace haucl {

namespace {

GruDirectionParams make_gru_direction(ParamRegistry& reg, const std::string& prefix,
                                      std::size_t in_dim, std::size_t hidden, RngStream& rng) {
  GruDirectionParams p;
  p.W_z = reg.add(prefix + ".W_z", {in_dim, hidden}, in_dim, rng);
  p.U_z = reg.add(prefix + ".U_z", {hidden, hidden}, hidden, rng);
  p.b_z = reg.add(prefix + ".b_z", {1, hidden}, hidden, rng);
  p.W_r = reg.add(prefix + ".W_r", {in_dim, hidden}, in_dim, rng);
  p.U_r = reg.add(prefix + ".U_r", {hidden, hidden}, hidden, rng);
  p.b_r = reg.add(prefix + ".b_r", {1, hidden}, hidden, rng);
  p.W_n = reg.add(prefix + ".W_n", {in_dim, hidden}, in_dim, rng);
  p.U_n = reg.add(prefix + ".U_n", {hidden, hidden}, hidden, rng);
  p.b_n = reg.add(prefix + ".b_n", {1, hidden}, hidden, rng);
  return p;
}

}  // namespace

EncoderParams make_encoder_params(ParamRegistry& reg, std::size_t dim_t, std::size_t dim_a,
                                  std::size_t dim_v, std::size_t d, std::size_t num_speakers,
                                  RngStream& rng) {
  EncoderParams p;
  p.gru_hidden = d / 2;
  if (p.gru_hidden == 0) p.gru_hidden = 1;
  p.W_a = reg.add("enc.acoustic.W", {dim_a, d}, dim_a, rng);
  p.b_a = reg.add("enc.acoustic.b", {1, d}, dim_a, rng);
  p.W_v = reg.add("enc.visual.W", {dim_v, d}, dim_v, rng);
  p.b_v = reg.add("enc.visual.b", {1, d}, dim_v, rng);
  p.gru_fw = make_gru_direction(reg, "enc.gru.fw", dim_t, p.gru_hidden, rng);
  p.gru_bw = make_gru_direction(reg, "enc.gru.bw", dim_t, p.gru_hidden, rng);
  p.W_t = reg.add("enc.text.W", {2 * p.gru_hidden, d}, 2 * p.gru_hidden, rng);
  p.b_t = reg.add("enc.text.b", {1, d}, 2 * p.gru_hidden, rng);
  p.W_s = reg.add("enc.speaker.W", {num_speakers, d}, num_speakers, rng);
  p.b_s = reg.add("enc.speaker.b", {1, d}, num_speakers, rng);
  return p;
}

Tensor gru_pass(const Tensor& inputs, const GruDirectionParams& p, bool reverse) {
  std::size_t n = inputs.rows();
  std::size_t hidden = p.U_z.rows();
  Tensor h = Tensor::zeros({1, hidden});
  std::vector<Tensor> states(n);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t t = reverse ? n - 1 - step : step;
    Tensor x = slice_rows(inputs, t, 1);
    Tensor z = sigmoid(add(add(matmul(x, p.W_z), matmul(h, p.U_z)), p.b_z));
    Tensor r = sigmoid(add(add(matmul(x, p.W_r), matmul(h, p.U_r)), p.b_r));
    Tensor cand = tanh_op(add(add(matmul(x, p.W_n), mul(r, matmul(h, p.U_n))), p.b_n));
    h = add(mul(sub_from_scalar(1.0, z), cand), mul(z, h));
    states[t] = h;
  }
  return concat(states, 0);
}

Tensor encode_modalities(const DialogueFeatures& dlg, const EncoderParams& p) {
  if (dlg.num_utterances == 0) throw ValueError("encode_modalities: empty dialogue");
  std::size_t n = dlg.num_utterances;

  Tensor raw_t = Tensor::from({n, dlg.dim_t}, dlg.text);
  Tensor raw_a = Tensor::from({n, dlg.dim_a}, dlg.acoustic);
  Tensor raw_v = Tensor::from({n, dlg.dim_v}, dlg.visual);

  Tensor u_a = add(matmul(raw_a, p.W_a), p.b_a);
  Tensor u_v = add(matmul(raw_v, p.W_v), p.b_v);

  Tensor fw = gru_pass(raw_t, p.gru_fw, /*reverse=*/false);
  Tensor bw = gru_pass(raw_t, p.gru_bw, /*reverse=*/true);
  Tensor u_t = add(matmul(concat({fw, bw}, 1), p.W_t), p.b_t);

  return concat({u_t, u_a, u_v}, 0);
}

Tensor embed_and_fuse_speakers(const Tensor& encoded, const std::vector<int>& speakers,
                               const EncoderParams& p, bool enabled) {
  if (!enabled) return encoded;
  std::size_t n = speakers.size();
  if (encoded.rows() != 3 * n) {
    throw ShapeError("embed_and_fuse_speakers: expected " + std::to_string(3 * n) +
                     " node rows, got " + std::to_string(encoded.rows()));
  }
  std::size_t num_speakers = p.W_s.rows();
  std::vector<Tensor> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    int s = speakers[i];
    if (s < 0 || static_cast<std::size_t>(s) >= num_speakers) {
      throw ValueError("speaker id " + std::to_string(s) + " out of range [0, " +
                       std::to_string(num_speakers) + ") at utterance " + std::to_string(i));
    }
    rows[i] = slice_rows(p.W_s, static_cast<std::size_t>(s), 1);
  }
  Tensor s_mat = add(concat(rows, 0), p.b_s);        // [N x d]
  Tensor tiled = concat({s_mat, s_mat, s_mat}, 0);   // one copy per modality block
  return add(encoded, tiled);
}

}  // namespace haucl
