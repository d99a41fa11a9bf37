// VERDICT: FAILED
// PROPERTY: dereference failure: array bounds violated
int main() {
  int a[2];
  a[0] = 1;
  a[1] = 2;
  int *p = &a[0];
  int x = *(p + 2);
  return 0;
}
