/* Four input plateaus, each with a different fixed amount of work. */
volatile int sink;

static void spin(int k) {
  for (int i = 0; i < k; i++)
    sink = i;
}

int classify(unsigned x) {
  if (x < 1000) {
    spin(2);
    return 0;
  }
  if (x < 20000) {
    spin(9);
    return 1;
  }
  if (x < 40000) {
    spin(5);
    return 2;
  }
  spin(7);
  return 3;
}
