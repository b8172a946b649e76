// Generated by miniallo 0.1.0
#include <ap_fixed.h>
#include <ap_int.h>
#include <hls_stream.h>
#include <stdint.h>

void gemm(
  int32_t A[16][16],
  int32_t B[16][16],
  int32_t C[16][16]
) {
  l_L0_i: for (int i = 0; i < 16; i++) {
    l_L1_j: for (int j = 0; j < 16; j++) {
      l_L2_k: for (int k = 0; k < 16; k++) {
        C[i][j] += A[i][k] * B[k][j];
      }
    }
  }
}
