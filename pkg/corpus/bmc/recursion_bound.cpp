// VERDICT: SUCCESSFUL
// FLAGS: --unwind 6
int count_down(int n) {
  if (n <= 0) { return 0; }
  return count_down(n - 1) + 1;
}
int main() {
  assert(count_down(3) == 3);
  return 0;
}
