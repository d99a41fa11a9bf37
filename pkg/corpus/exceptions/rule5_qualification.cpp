// VERDICT: SUCCESSFUL
int main() {
  int v = 3;
  int *p = &v;
  try { throw p; }
  catch (const int *q) { return 0; }
  return 1;
}
