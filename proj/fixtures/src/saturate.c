/* Saturating 8-bit signed addition. */
volatile int sink;

int sat_add8(int a, int b) {
  int s = a + b;
  if (s > 127) {
    sink = s;
    s = 127;
  } else if (s < -128) {
    sink = s;
    sink = s;
    s = -128;
  }
  return s;
}
