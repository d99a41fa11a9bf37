// VERDICT: FAILED
// PROPERTY: dereference failure: invalidated dynamic object
// FLAGS: --unwind 3
int main() {
  int *p = new int(0);
  delete p;
  while (*p < 2) { }
  return 0;
}
