// VERDICT: SUCCESSFUL
int main() {
  int *p = new int(7);
  assert(*p == 7);
  *p = 9;
  assert(*p == 9);
  delete p;
  return 0;
}
