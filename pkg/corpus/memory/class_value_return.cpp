// VERDICT: SUCCESSFUL
struct Box { int v; };
Box make(int seed) {
  Box b;
  b.v = seed * 2;
  return b;
}
int consume(const Box &b) { return b.v; }
int main() {
  Box got = make(4);
  assert(got.v == 8);
  assert(consume(make(3)) == 6);
  return 0;
}
