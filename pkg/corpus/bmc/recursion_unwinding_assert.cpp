// VERDICT: FAILED
// PROPERTY: unwinding assertion
// FLAGS: --unwind 4 --unwinding-assertions
int count_down(int n) {
  if (n <= 0) { return 0; }
  return count_down(n - 1) + 1;
}
int main() {
  assert(count_down(8) == 8);
  return 0;
}
