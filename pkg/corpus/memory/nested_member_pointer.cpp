// VERDICT: SUCCESSFUL
struct Inner {
  int v;
  int get() { return v; }
};
struct Outer {
  Inner inner;
};
int main() {
  Outer o;
  o.inner.v = 7;
  assert(o.inner.get() == 7);
  int *p = &o.inner.v;
  *p = 9;
  assert(o.inner.v == 9);
  return 0;
}
