/* Insertion sort over a global four-element array. */
int vals[4];

void isort(void) {
  for (int i = 1; i < 4; i++) {
    int key = vals[i];
    int j = i - 1;
    while (j >= 0 && vals[j] > key) {
      vals[j + 1] = vals[j];
      j--;
    }
    vals[j + 1] = key;
  }
}
