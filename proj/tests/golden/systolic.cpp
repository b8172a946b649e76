// Generated by miniallo 0.1.0, schedule 6d5724628c8ca820
#include <ap_fixed.h>
#include <ap_int.h>
#include <hls_stream.h>
#include <stdint.h>

void kernel_0_0(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[0][0].read();
    buf_A_reg = A_fifo[0][0].read();
    C[0][0] += buf_A_reg * buf_B_reg;
    A_fifo[0][1].write(buf_A_reg);
    B_fifo[0][1].write(buf_B_reg);
  }
}

void kernel_0_1(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[1][0].read();
    buf_A_reg = A_fifo[0][1].read();
    C[0][1] += buf_A_reg * buf_B_reg;
    A_fifo[0][2].write(buf_A_reg);
    B_fifo[1][1].write(buf_B_reg);
  }
}

void kernel_0_2(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[2][0].read();
    buf_A_reg = A_fifo[0][2].read();
    C[0][2] += buf_A_reg * buf_B_reg;
    A_fifo[0][3].write(buf_A_reg);
    B_fifo[2][1].write(buf_B_reg);
  }
}

void kernel_0_3(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[3][0].read();
    buf_A_reg = A_fifo[0][3].read();
    C[0][3] += buf_A_reg * buf_B_reg;
    A_fifo[0][4].write(buf_A_reg);
    B_fifo[3][1].write(buf_B_reg);
  }
}

void kernel_1_0(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[0][1].read();
    buf_A_reg = A_fifo[1][0].read();
    C[1][0] += buf_A_reg * buf_B_reg;
    A_fifo[1][1].write(buf_A_reg);
    B_fifo[0][2].write(buf_B_reg);
  }
}

void kernel_1_1(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[1][1].read();
    buf_A_reg = A_fifo[1][1].read();
    C[1][1] += buf_A_reg * buf_B_reg;
    A_fifo[1][2].write(buf_A_reg);
    B_fifo[1][2].write(buf_B_reg);
  }
}

void kernel_1_2(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[2][1].read();
    buf_A_reg = A_fifo[1][2].read();
    C[1][2] += buf_A_reg * buf_B_reg;
    A_fifo[1][3].write(buf_A_reg);
    B_fifo[2][2].write(buf_B_reg);
  }
}

void kernel_1_3(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[3][1].read();
    buf_A_reg = A_fifo[1][3].read();
    C[1][3] += buf_A_reg * buf_B_reg;
    A_fifo[1][4].write(buf_A_reg);
    B_fifo[3][2].write(buf_B_reg);
  }
}

void kernel_2_0(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[0][2].read();
    buf_A_reg = A_fifo[2][0].read();
    C[2][0] += buf_A_reg * buf_B_reg;
    A_fifo[2][1].write(buf_A_reg);
    B_fifo[0][3].write(buf_B_reg);
  }
}

void kernel_2_1(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[1][2].read();
    buf_A_reg = A_fifo[2][1].read();
    C[2][1] += buf_A_reg * buf_B_reg;
    A_fifo[2][2].write(buf_A_reg);
    B_fifo[1][3].write(buf_B_reg);
  }
}

void kernel_2_2(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[2][2].read();
    buf_A_reg = A_fifo[2][2].read();
    C[2][2] += buf_A_reg * buf_B_reg;
    A_fifo[2][3].write(buf_A_reg);
    B_fifo[2][3].write(buf_B_reg);
  }
}

void kernel_2_3(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[3][2].read();
    buf_A_reg = A_fifo[2][3].read();
    C[2][3] += buf_A_reg * buf_B_reg;
    A_fifo[2][4].write(buf_A_reg);
    B_fifo[3][3].write(buf_B_reg);
  }
}

void kernel_3_0(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[0][3].read();
    buf_A_reg = A_fifo[3][0].read();
    C[3][0] += buf_A_reg * buf_B_reg;
    A_fifo[3][1].write(buf_A_reg);
    B_fifo[0][4].write(buf_B_reg);
  }
}

void kernel_3_1(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[1][3].read();
    buf_A_reg = A_fifo[3][1].read();
    C[3][1] += buf_A_reg * buf_B_reg;
    A_fifo[3][2].write(buf_A_reg);
    B_fifo[1][4].write(buf_B_reg);
  }
}

void kernel_3_2(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[2][3].read();
    buf_A_reg = A_fifo[3][2].read();
    C[3][2] += buf_A_reg * buf_B_reg;
    A_fifo[3][3].write(buf_A_reg);
    B_fifo[2][4].write(buf_B_reg);
  }
}

void kernel_3_3(
  int16_t C[4][4],
  hls::stream< int8_t > A_fifo[4][5],
  hls::stream< int8_t > B_fifo[4][5]
) {
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  #pragma HLS stream variable=A_fifo depth=5
  #pragma HLS stream variable=B_fifo depth=5
  int8_t buf_A_reg;
  int8_t buf_B_reg;
  l_L2_k: for (int k = 0; k < 4; k++) {
    buf_B_reg = B_fifo[3][3].read();
    buf_A_reg = A_fifo[3][3].read();
    C[3][3] += buf_A_reg * buf_B_reg;
    A_fifo[3][4].write(buf_A_reg);
    B_fifo[3][4].write(buf_B_reg);
  }
}

void gemm(
  int8_t A[4][4],
  int8_t B[4][4],
  int16_t C[4][4]
) {
  #pragma HLS dataflow
  #pragma HLS array_partition variable=A complete dim=1
  #pragma HLS array_partition variable=B complete dim=2
  #pragma HLS array_partition variable=C complete dim=1
  #pragma HLS array_partition variable=C complete dim=2
  hls::stream< int8_t > A_fifo[4][5];
  #pragma HLS stream variable=A_fifo depth=5
  int8_t A_drain[4];
  hls::stream< int8_t > B_fifo[4][5];
  #pragma HLS stream variable=B_fifo depth=5
  int8_t B_drain[4];
  l_load_A: for (int A_fifo_k = 0; A_fifo_k < 4; A_fifo_k++) {
    l_load_A_o: for (int A_fifo_o = 0; A_fifo_o < 4; A_fifo_o++) {
      A_fifo[A_fifo_o][0].write(A[A_fifo_o][A_fifo_k]);
    }
  }
  l_load_B: for (int B_fifo_k = 0; B_fifo_k < 4; B_fifo_k++) {
    l_load_B_o: for (int B_fifo_o = 0; B_fifo_o < 4; B_fifo_o++) {
      B_fifo[B_fifo_o][0].write(B[B_fifo_k][B_fifo_o]);
    }
  }
  kernel_0_0(C, A_fifo, B_fifo);
  kernel_0_1(C, A_fifo, B_fifo);
  kernel_0_2(C, A_fifo, B_fifo);
  kernel_0_3(C, A_fifo, B_fifo);
  kernel_1_0(C, A_fifo, B_fifo);
  kernel_1_1(C, A_fifo, B_fifo);
  kernel_1_2(C, A_fifo, B_fifo);
  kernel_1_3(C, A_fifo, B_fifo);
  kernel_2_0(C, A_fifo, B_fifo);
  kernel_2_1(C, A_fifo, B_fifo);
  kernel_2_2(C, A_fifo, B_fifo);
  kernel_2_3(C, A_fifo, B_fifo);
  kernel_3_0(C, A_fifo, B_fifo);
  kernel_3_1(C, A_fifo, B_fifo);
  kernel_3_2(C, A_fifo, B_fifo);
  kernel_3_3(C, A_fifo, B_fifo);
  l_drain_B: for (int B_fifo_k = 0; B_fifo_k < 4; B_fifo_k++) {
    l_drain_B_o: for (int B_fifo_o = 0; B_fifo_o < 4; B_fifo_o++) {
      B_drain[B_fifo_o] = B_fifo[B_fifo_o][4].read();
    }
  }
  l_drain_A: for (int A_fifo_k = 0; A_fifo_k < 4; A_fifo_k++) {
    l_drain_A_o: for (int A_fifo_o = 0; A_fifo_o < 4; A_fifo_o++) {
      A_drain[A_fifo_o] = A_fifo[A_fifo_o][4].read();
    }
  }
}
