// VERDICT: FAILED
// PROPERTY: bad allocation
int main() {
  int n = 0 - 2;
  int *p = new int[n];
  delete[] p;
  return 0;
}
