/* Countdown loop: iteration count equals the argument. */
volatile int sink;

int countdown(int n) {
  int acc = 0;
  while (n > 0) {
    acc ^= n;
    sink = acc;
    n--;
  }
  return acc;
}
