// VERDICT: SUCCESSFUL
template <typename T> T id(T x) { return x; }
int main() {
  int y = id(5);
  assert(y == 5);
  return 0;
}
