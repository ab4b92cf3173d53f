/* Bit manipulation, sub-word memory traffic, and division. */
unsigned char buf[8];
short halves[4];

int popcount(unsigned x) {
  int c = 0;
  while (x) {
    c += x & 1;
    x >>= 1;
  }
  return c;
}

int bytes(unsigned v) {
  for (int i = 0; i < 4; i++)
    buf[i] = (unsigned char)(v >> (8 * i));
  halves[0] = (short)v;
  halves[1] = (short)(v >> 16);
  int s = 0;
  for (int i = 0; i < 4; i++)
    s += (signed char)buf[i];
  return s + halves[0] + (unsigned short)halves[1];
}

unsigned gcd(unsigned a, unsigned b) {
  while (b != 0) {
    unsigned t = a % b;
    a = b;
    b = t;
  }
  return a;
}

int divmix(int a, int b) {
  int d = b | 1;
  int q = a / d;
  int r = a % d;
  long long p = (long long)a * b;
  return q + r + (int)(p >> 32) + (a ^ ~b);
}
