// Interpreter for .mlq models embedded as byte arrays.
//
// Layout, little-endian: "MLQ1", version u8, dtype u8 (0 float32, 1 int8),
// layer count u16; per layer: in u32, out u32, activation u8 (0 linear,
// 1 relu, 2 sigmoid); float32 layers then hold weights f32[out*in] row-major
// and biases f32[out]; int8 layers hold scale f32, zero point i32, weights
// i8[out*in] and biases f32[out]. An int8 weight q stands for scale * (q - zero).
//
// Activations live in one arena of max(in + out) floats over all layers.
// Layer inputs and outputs alternate between the two ends of the arena.
#pragma once

#include <math.h>
#include <stdint.h>
#include <string.h>

namespace mlq {

enum class Status : uint8_t { Ok, BadMagic, BadVersion, BadDtype, BadActivation, Truncated, Shape, ArenaTooSmall };

struct Model {
  const uint8_t* data = nullptr;
  uint32_t len = 0;
  uint8_t dtype = 0;
  uint16_t layers = 0;
  uint32_t input_dim = 0;
  uint32_t output_dim = 0;
};

inline uint32_t read_u32(const uint8_t* p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) | (uint32_t(p[3]) << 24);
}

inline float read_f32(const uint8_t* p) {
  uint32_t bits = read_u32(p);
  float v;
  memcpy(&v, &bits, sizeof v);
  return v;
}

inline float activate(uint8_t code, float v) {
  switch (code) {
    case 1:
      return v > 0.0f ? v : 0.0f;
    case 2:
      return 1.0f / (1.0f + expf(-v));
    default:
      return v;
  }
}

// Checks the header and every layer extent before any inference runs.
inline Status open(const uint8_t* data, uint32_t len, Model* m, uint32_t arena_floats) {
  if (len < 8 || memcmp(data, "MLQ1", 4) != 0) return Status::BadMagic;
  if (data[4] != 1) return Status::BadVersion;
  if (data[5] > 1) return Status::BadDtype;
  m->data = data;
  m->len = len;
  m->dtype = data[5];
  m->layers = uint16_t(data[6] | (data[7] << 8));
  if (m->layers == 0) return Status::Shape;
  uint64_t off = 8;
  uint32_t prev_out = 0;
  for (uint16_t i = 0; i < m->layers; ++i) {
    if (off + 9 > len) return Status::Truncated;
    uint32_t n_in = read_u32(data + off);
    uint32_t n_out = read_u32(data + off + 4);
    if (data[off + 8] > 2) return Status::BadActivation;
    if (n_in == 0 || n_out == 0 || (i > 0 && n_in != prev_out)) return Status::Shape;
    if (uint64_t(n_in) + n_out > arena_floats) return Status::ArenaTooSmall;
    if (i == 0) m->input_dim = n_in;
    prev_out = n_out;
    uint64_t weights = uint64_t(n_in) * n_out;
    off += 9 + (m->dtype == 0 ? 4 * weights : 8 + weights) + 4 * uint64_t(n_out);
    if (off > len) return Status::Truncated;
  }
  if (off != len) return Status::Shape;
  m->output_dim = prev_out;
  return Status::Ok;
}

// Runs the network on arena[0, input_dim) and returns the output scores,
// which also live in the arena.
inline const float* forward(const Model& m, float* arena, uint32_t arena_floats) {
  const uint8_t* p = m.data + 8;
  const float* result = arena;
  for (uint16_t i = 0; i < m.layers; ++i) {
    uint32_t n_in = read_u32(p);
    uint32_t n_out = read_u32(p + 4);
    uint8_t act = p[8];
    p += 9;
    const float* in = (i % 2 == 0) ? arena : arena + arena_floats - n_in;
    float* out = (i % 2 == 0) ? arena + arena_floats - n_out : arena;
    if (m.dtype == 0) {
      const uint8_t* w = p;
      const uint8_t* b = p + 4 * n_in * n_out;
      for (uint32_t o = 0; o < n_out; ++o) {
        float acc = 0.0f;
        const uint8_t* row = w + 4 * o * n_in;
        for (uint32_t k = 0; k < n_in; ++k) acc += read_f32(row + 4 * k) * in[k];
        out[o] = activate(act, acc + read_f32(b + 4 * o));
      }
      p = b + 4 * n_out;
    } else {
      float scale = read_f32(p);
      float zero = float(int32_t(read_u32(p + 4)));
      const int8_t* w = reinterpret_cast<const int8_t*>(p + 8);
      const uint8_t* b = p + 8 + n_in * n_out;
      for (uint32_t o = 0; o < n_out; ++o) {
        float acc = 0.0f;
        const int8_t* row = w + o * n_in;
        for (uint32_t k = 0; k < n_in; ++k) acc += (float(row[k]) - zero) * in[k];
        out[o] = activate(act, scale * acc + read_f32(b + 4 * o));
      }
      p = b + 4 * n_out;
    }
    result = out;
  }
  return result;
}

// Argmax with ties to the lowest index; a single-unit head thresholds at 0.5.
inline uint32_t predict_class(const float* scores, uint32_t n) {
  if (n == 1) return scores[0] >= 0.5f ? 1 : 0;
  uint32_t best = 0;
  for (uint32_t i = 1; i < n; ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

}  // namespace mlq
