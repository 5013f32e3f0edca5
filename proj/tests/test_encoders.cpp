#include "haucl/encoders.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace haucl;

namespace {

void fill(Tensor t, const std::vector<double>& vals) { t.mutable_values() = vals; }
void fill_const(Tensor t, double v) {
  for (double& x : t.mutable_values()) x = v;
}
void fill_identity(Tensor t) {
  std::size_t n = t.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) t.mutable_values()[i * t.cols() + j] = i == j;
}

DialogueFeatures make_dialogue(std::size_t n, std::size_t dt, std::size_t da, std::size_t dv,
                               std::uint64_t seed) {
  RngStream rng(seed);
  DialogueFeatures dlg;
  dlg.num_utterances = n;
  dlg.dim_t = dt;
  dlg.dim_a = da;
  dlg.dim_v = dv;
  for (std::size_t i = 0; i < n * dt; ++i) dlg.text.push_back(rng.uniform(-1, 1));
  for (std::size_t i = 0; i < n * da; ++i) dlg.acoustic.push_back(rng.uniform(-1, 1));
  for (std::size_t i = 0; i < n * dv; ++i) dlg.visual.push_back(rng.uniform(-1, 1));
  for (std::size_t i = 0; i < n; ++i) {
    dlg.speakers.push_back(static_cast<int>(i % 2));
    dlg.labels.push_back(0);
  }
  return dlg;
}

// independent scalar re-implementation of one recurrent direction
std::vector<double> gru_oracle(const std::vector<double>& x, std::size_t n, std::size_t in_dim,
                               const GruDirectionParams& p, bool reverse) {
  std::size_t hd = p.U_z.rows();
  auto mat = [&](const Tensor& t, std::size_t i, std::size_t j) { return t.values()[i * t.cols() + j]; };
  auto sigm = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };

  std::vector<double> h(hd, 0.0), out(n * hd, 0.0);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t t = reverse ? n - 1 - step : step;
    std::vector<double> z(hd), r(hd), cand(hd);
    for (std::size_t j = 0; j < hd; ++j) {
      double az = p.b_z.values()[j], ar = p.b_r.values()[j];
      for (std::size_t k = 0; k < in_dim; ++k) {
        az += x[t * in_dim + k] * mat(p.W_z, k, j);
        ar += x[t * in_dim + k] * mat(p.W_r, k, j);
      }
      for (std::size_t k = 0; k < hd; ++k) {
        az += h[k] * mat(p.U_z, k, j);
        ar += h[k] * mat(p.U_r, k, j);
      }
      z[j] = sigm(az);
      r[j] = sigm(ar);
    }
    for (std::size_t j = 0; j < hd; ++j) {
      double an = p.b_n.values()[j];
      for (std::size_t k = 0; k < in_dim; ++k) an += x[t * in_dim + k] * mat(p.W_n, k, j);
      double rec = 0.0;
      for (std::size_t k = 0; k < hd; ++k) rec += h[k] * mat(p.U_n, k, j);
      cand[j] = std::tanh(an + r[j] * rec);
    }
    for (std::size_t j = 0; j < hd; ++j) h[j] = (1.0 - z[j]) * cand[j] + z[j] * h[j];
    for (std::size_t j = 0; j < hd; ++j) out[t * hd + j] = h[j];
  }
  return out;
}

}  // namespace

TEST(Encoders, AcousticIdentityMapPassesThrough) {
  const std::size_t d = 4;
  ParamRegistry reg;
  RngStream init(1);
  EncoderParams p = make_encoder_params(reg, 3, d, 5, d, 2, init);
  fill_identity(p.W_a);
  fill_const(p.b_a, 0.0);

  DialogueFeatures dlg = make_dialogue(3, 3, d, 5, 2);
  Tensor u = encode_modalities(dlg, p);
  // acoustic block is rows [N, 2N)
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      EXPECT_NEAR(u.at(3 + i, j), dlg.acoustic[i * d + j], 1e-15);
    }
  }
}

TEST(Encoders, ZeroTextWeightsGiveBiasRows) {
  ParamRegistry reg;
  RngStream init(2);
  EncoderParams p = make_encoder_params(reg, 3, 4, 5, 6, 2, init);
  for (Tensor t : {p.gru_fw.W_z, p.gru_fw.U_z, p.gru_fw.b_z, p.gru_fw.W_r, p.gru_fw.U_r,
                   p.gru_fw.b_r, p.gru_fw.W_n, p.gru_fw.U_n, p.gru_fw.b_n, p.gru_bw.W_z,
                   p.gru_bw.U_z, p.gru_bw.b_z, p.gru_bw.W_r, p.gru_bw.U_r, p.gru_bw.b_r,
                   p.gru_bw.W_n, p.gru_bw.U_n, p.gru_bw.b_n, p.W_t}) {
    fill_const(t, 0.0);
  }
  fill(p.b_t, {1, 2, 3, 4, 5, 6});

  DialogueFeatures dlg = make_dialogue(2, 3, 4, 5, 3);
  Tensor u = encode_modalities(dlg, p);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(u.at(i, j), double(j + 1), 1e-15);
  }
}

TEST(Encoders, GruMatchesScalarRecurrenceOracle) {
  const std::size_t n = 2, dt = 3, d = 6;
  ParamRegistry reg;
  RngStream init(3);
  EncoderParams p = make_encoder_params(reg, dt, 4, 5, d, 2, init);
  DialogueFeatures dlg = make_dialogue(n, dt, 4, 5, 4);

  Tensor raw = Tensor::from({n, dt}, dlg.text);
  for (bool reverse : {false, true}) {
    const GruDirectionParams& dir = reverse ? p.gru_bw : p.gru_fw;
    Tensor got = gru_pass(raw, dir, reverse);
    std::vector<double> want = gru_oracle(dlg.text, n, dt, dir, reverse);
    ASSERT_EQ(got.numel(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got.values()[i], want[i], 1e-12);
  }
}

TEST(Encoders, LongerGruMatchesOracleToo) {
  const std::size_t n = 5, dt = 4, d = 8;
  ParamRegistry reg;
  RngStream init(9);
  EncoderParams p = make_encoder_params(reg, dt, 4, 5, d, 2, init);
  DialogueFeatures dlg = make_dialogue(n, dt, 4, 5, 10);
  Tensor raw = Tensor::from({n, dt}, dlg.text);
  Tensor got = gru_pass(raw, p.gru_fw, false);
  std::vector<double> want = gru_oracle(dlg.text, n, dt, p.gru_fw, false);
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got.values()[i], want[i], 1e-12);
}

TEST(Encoders, AcousticVisualEquivariantTextualOrderSensitive) {
  const std::size_t n = 4;
  ParamRegistry reg;
  RngStream init(5);
  EncoderParams p = make_encoder_params(reg, 3, 4, 5, 6, 2, init);
  DialogueFeatures dlg = make_dialogue(n, 3, 4, 5, 6);

  DialogueFeatures reversed = dlg;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 3; ++k) reversed.text[i * 3 + k] = dlg.text[(n - 1 - i) * 3 + k];
    for (std::size_t k = 0; k < 4; ++k)
      reversed.acoustic[i * 4 + k] = dlg.acoustic[(n - 1 - i) * 4 + k];
    for (std::size_t k = 0; k < 5; ++k)
      reversed.visual[i * 5 + k] = dlg.visual[(n - 1 - i) * 5 + k];
    reversed.speakers[i] = dlg.speakers[n - 1 - i];
    reversed.labels[i] = dlg.labels[n - 1 - i];
  }

  Tensor u = encode_modalities(dlg, p);
  Tensor ur = encode_modalities(reversed, p);

  // acoustic / visual rows are pure row maps: reversal permutes them exactly
  double max_av_diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      max_av_diff = std::max(max_av_diff, std::fabs(u.at(n + i, j) - ur.at(n + (n - 1 - i), j)));
      max_av_diff =
          std::max(max_av_diff, std::fabs(u.at(2 * n + i, j) - ur.at(2 * n + (n - 1 - i), j)));
    }
  }
  EXPECT_LT(max_av_diff, 1e-12);

  // the recurrent textual encoding must depend on the order
  double max_t_diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      max_t_diff = std::max(max_t_diff, std::fabs(u.at(i, j) - ur.at(n - 1 - i, j)));
    }
  }
  EXPECT_GT(max_t_diff, 1e-6);
}

TEST(Encoders, OutputDimensionIsUnified) {
  ParamRegistry reg;
  RngStream init(7);
  EncoderParams p = make_encoder_params(reg, 7, 4, 3, 10, 2, init);
  DialogueFeatures dlg = make_dialogue(3, 7, 4, 3, 8);
  Tensor u = encode_modalities(dlg, p);
  EXPECT_EQ(u.shape(), (Shape{9, 10}));
}

TEST(Encoders, DimensionMismatchIsShapeError) {
  ParamRegistry reg;
  RngStream init(7);
  EncoderParams p = make_encoder_params(reg, 7, 4, 3, 10, 2, init);
  DialogueFeatures dlg = make_dialogue(3, 7, 5 /* != 4 */, 3, 8);
  EXPECT_THROW(encode_modalities(dlg, p), ShapeError);
}

TEST(Speakers, ZeroParamsLeaveFeaturesUntouched) {
  ParamRegistry reg;
  RngStream init(11);
  EncoderParams p = make_encoder_params(reg, 3, 4, 5, 6, 2, init);
  fill_const(p.W_s, 0.0);
  fill_const(p.b_s, 0.0);
  DialogueFeatures dlg = make_dialogue(3, 3, 4, 5, 12);
  Tensor u = encode_modalities(dlg, p);
  Tensor v = embed_and_fuse_speakers(u, dlg.speakers, p);
  EXPECT_EQ(v.values(), u.values());
}

TEST(Speakers, SameSpeakerSameOffset) {
  ParamRegistry reg;
  RngStream init(12);
  EncoderParams p = make_encoder_params(reg, 3, 4, 5, 6, 2, init);
  DialogueFeatures dlg = make_dialogue(4, 3, 4, 5, 13);
  dlg.speakers = {1, 0, 1, 0};
  Tensor u = encode_modalities(dlg, p);
  Tensor v = embed_and_fuse_speakers(u, dlg.speakers, p);
  // utterances 0 and 2 share a speaker: their added offsets agree
  for (std::size_t j = 0; j < 6; ++j) {
    double off0 = v.at(0, j) - u.at(0, j);
    double off2 = v.at(2, j) - u.at(2, j);
    EXPECT_NEAR(off0, off2, 1e-15);
  }
}

TEST(Speakers, IdentityEmbeddingAddsUnitRow) {
  const std::size_t d = 2;
  ParamRegistry reg;
  RngStream init(13);
  EncoderParams p = make_encoder_params(reg, 3, 4, 5, d, 2, init);
  fill_identity(p.W_s);  // speaker 0 -> [1, 0], speaker 1 -> [0, 1]
  fill_const(p.b_s, 0.0);
  DialogueFeatures dlg = make_dialogue(1, 3, 4, 5, 14);
  dlg.speakers = {0};
  Tensor u = encode_modalities(dlg, p);
  Tensor v = embed_and_fuse_speakers(u, dlg.speakers, p);
  EXPECT_NEAR(v.at(0, 0) - u.at(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(v.at(0, 1) - u.at(0, 1), 0.0, 1e-15);
}

TEST(Speakers, OutOfRangeIdRejected) {
  ParamRegistry reg;
  RngStream init(14);
  EncoderParams p = make_encoder_params(reg, 3, 4, 5, 6, 2, init);
  DialogueFeatures dlg = make_dialogue(2, 3, 4, 5, 15);
  dlg.speakers = {0, 2};
  Tensor u = encode_modalities(dlg, p);
  EXPECT_THROW(embed_and_fuse_speakers(u, dlg.speakers, p), ValueError);
}

TEST(Speakers, DisabledReturnsInputUnchanged) {
  ParamRegistry reg;
  RngStream init(15);
  EncoderParams p = make_encoder_params(reg, 3, 4, 5, 6, 2, init);
  DialogueFeatures dlg = make_dialogue(2, 3, 4, 5, 16);
  Tensor u = encode_modalities(dlg, p);
  Tensor v = embed_and_fuse_speakers(u, dlg.speakers, p, /*enabled=*/false);
  EXPECT_EQ(v.values(), u.values());
}

TEST(Encoders, GradientsFlowThroughWholeEncoder) {
  ParamRegistry reg;
  RngStream init(17);
  EncoderParams p = make_encoder_params(reg, 3, 4, 5, 6, 2, init);
  DialogueFeatures dlg = make_dialogue(2, 3, 4, 5, 18);
  RngStream ro(99);
  Tensor w = Tensor::uniform({6, 6}, -1.0, 1.0, ro);  // [3N x d] readout

  std::vector<Tensor> inputs;
  for (const auto& [name, t] : reg.items()) inputs.push_back(t);
  auto build = [&]() {
    Tensor u = encode_modalities(dlg, p);
    Tensor v = embed_and_fuse_speakers(u, dlg.speakers, p);
    return sum(mul(v, w));
  };
  EXPECT_LT(haucl::testing::max_grad_error(inputs, build), 1e-5);
}
