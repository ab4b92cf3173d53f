/* Direct calls and bounded recursion. */
volatile int sink;

__attribute__((noinline)) int twice(int x) {
  sink = x;
  return x + x;
}

__attribute__((noinline)) int fact(int n) {
  if (n <= 1)
    return 1;
  return n * fact(n - 1);
}

int calls(int a, int b) {
  int r = twice(a);
  if (b > 2)
    r += twice(b);
  return r + fact(b & 7);
}
