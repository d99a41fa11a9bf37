// VERDICT: SUCCESSFUL
int main() {
  int n;
  if (n == 3) {
    int *p = new int[n];
    p[2] = 1;
    delete[] p;
  }
  return 0;
}
