// VERDICT: SUCCESSFUL
int main() {
  int *p = new int[4];
  p[0] = 1;
  p[3] = 4;
  assert(p[0] + p[3] == 5);
  delete[] p;
  return 0;
}
