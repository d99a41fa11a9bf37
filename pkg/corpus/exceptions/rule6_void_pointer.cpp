// VERDICT: SUCCESSFUL
int main() {
  int v = 3;
  int *p = &v;
  try { throw p; }
  catch (void *q) { return 0; }
  return 1;
}
