// VERDICT: SUCCESSFUL
template <int N> struct Box {
  int get() { return N * 2; }
};
int main() {
  Box<21> b;
  assert(b.get() == 42);
  return 0;
}
