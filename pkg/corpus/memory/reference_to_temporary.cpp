// VERDICT: SUCCESSFUL
int helper() { return 41; }
int twice(const int &x) { return x + x; }
int main() {
  int &&r = helper();
  assert(r == 41);
  r = r + 1;
  assert(r == 42);
  assert(twice(5) == 10);
  return 0;
}
