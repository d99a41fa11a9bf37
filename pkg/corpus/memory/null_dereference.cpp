// VERDICT: FAILED
// PROPERTY: dereference failure: NULL pointer
int main() {
  int *p = nullptr;
  *p = 1;
  return 0;
}
