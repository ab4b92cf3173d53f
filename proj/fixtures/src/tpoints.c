/* Two timing points around a data-dependent region. */
volatile int sink;

#define TIMING_POINT(name) __asm__ volatile(".globl " #name "\n" #name ":\n\tnop")

__attribute__((noinline)) int mix(int n) {
  int acc = 1;
  for (int i = 0; i < n; i++) {
    acc = acc * 3 + i;
    sink = acc;
  }
  return acc;
}

int tpoints(int n) {
  TIMING_POINT(tp_a);
  int r = mix(n);
  TIMING_POINT(tp_b);
  return r + 1;
}
