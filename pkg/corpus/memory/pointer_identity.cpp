// VERDICT: SUCCESSFUL
int main() {
  int *p = new int(1);
  int *q = p;
  assert(p == q);
  int *r = new int(2);
  assert(p != r);
  assert(r != nullptr);
  delete p;
  delete r;
  return 0;
}
