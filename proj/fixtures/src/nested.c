/* Nested loop whose inner bound depends on the outer index and an input. */
volatile int sink;

int nested(int n, int m) {
  int acc = 0;
  for (int i = 0; i < n; i++) {
    for (int j = 0; j < i + m; j++) {
      acc += j;
      sink = acc;
    }
  }
  return acc;
}
