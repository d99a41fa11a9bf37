// VERDICT: FAILED
// PROPERTY: dereference failure: array bounds violated
int main() {
  int n;
  if (n == 3) {
    int *p = new int[n];
    p[2] = 1;
    p[3] = 1;
    delete[] p;
  }
  return 0;
}
