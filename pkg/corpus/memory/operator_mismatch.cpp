// VERDICT: FAILED
// PROPERTY: operator mismatch
int main() {
  int *p = new int[3];
  delete p;
  return 0;
}
