/* Small branch diamonds. */
volatile int sink;

int absval(int x) {
  if (x < 0) {
    sink = x;
    return -x;
  }
  return x;
}

int min2(int a, int b) {
  if (a < b) {
    sink = a;
    return a;
  }
  sink = b;
  sink = a;
  return b;
}

int max2(int a, int b) {
  int r = b;
  if (a > b) {
    sink = b;
    sink = a;
    r = a;
  }
  return r;
}
